// NaN must fail positivity checks, so `!(x > 0.0)` is intended throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod numeric;
pub mod riesz;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
