//! Reference spectra: closed forms for boxes, disks and annuli, and P1
//! finite elements for polygons.

mod analytic;
mod bessel;
mod eigen;
mod fem;
mod mesh;

pub use analytic::{analytic_spectrum, annulus_radial_roots, box_spectrum};
pub use bessel::{
    bessel_j, bessel_j_prime, bessel_j_seq, bessel_jy_int, bessel_zero, bessel_zeros_below, lambda1_ball, mcmahon,
    BallEigen, ZeroKind,
};
pub use eigen::{lowest_eigenpairs, EigenOptions, EigenSolution, SkylineCholesky, SparseSym};
pub use fem::{fem_spectrum, FemOptions, FemReport};
pub use mesh::{Mesh, MeshOptions};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bc {
    Dirichlet,
    Neumann,
}

impl std::str::FromStr for Bc {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" | "d" => Ok(Bc::Dirichlet),
            "neumann" | "n" => Ok(Bc::Neumann),
            other => Err(Error::Parse(format!("unknown boundary condition '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Analytic,
    Fem,
    User,
}

/// Sorted eigenvalues with multiplicity and per-value error bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub bc: Bc,
    pub values: Vec<f64>,
    pub error_bounds: Vec<f64>,
    pub source: Source,
    /// Every eigenvalue strictly below this cutoff is present. Defaults to
    /// the largest value when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete_below: Option<f64>,
}

impl Spectrum {
    pub fn new(bc: Bc, values: Vec<f64>, error_bounds: Vec<f64>, source: Source) -> Result<Self> {
        let s = Spectrum {
            bc,
            values,
            error_bounds,
            source,
            complete_below: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// Exact spectrum with zero error bounds.
    pub fn exact(bc: Bc, values: Vec<f64>, source: Source) -> Result<Self> {
        let n = values.len();
        Self::new(bc, values, vec![0.0; n], source)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidArgument("spectrum has no values".into()));
        }
        if self.error_bounds.len() != self.values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values but {} error bounds",
                self.values.len(),
                self.error_bounds.len()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) || self.error_bounds.iter().any(|e| !(*e >= 0.0)) {
            return Err(Error::InvalidArgument(
                "non-finite value or negative error bound".into(),
            ));
        }
        if self.values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument(
                "eigenvalues must be sorted nondecreasing".into(),
            ));
        }
        let lo = self.values[0] + self.error_bounds[0];
        match self.bc {
            Bc::Dirichlet if lo <= 0.0 => {
                return Err(Error::InvalidArgument("Dirichlet eigenvalues must be positive".into()))
            }
            Bc::Neumann if lo < 0.0 => {
                return Err(Error::InvalidArgument("Neumann eigenvalues must be nonnegative".into()))
            }
            _ => {}
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let sp: Spectrum = serde_json::from_str(s).map_err(|e| Error::Parse(format!("spectrum: {e}")))?;
        sp.validate()?;
        Ok(sp)
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn cutoff(&self) -> f64 {
        self.complete_below.unwrap_or(*self.values.last().unwrap())
    }

    /// λ_k with 1-based k.
    pub fn value(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.values.len() {
            return Err(Error::OutOfRange {
                k,
                available: self.values.len(),
            });
        }
        Ok(self.values[k - 1])
    }

    pub fn max_error(&self) -> f64 {
        self.error_bounds.iter().cloned().fold(0.0, f64::max)
    }

    /// Eigenvalues of the domain scaled by `t`.
    pub fn scaled(&self, t: f64) -> Spectrum {
        let f = 1.0 / (t * t);
        Spectrum {
            bc: self.bc,
            values: self.values.iter().map(|v| v * f).collect(),
            error_bounds: self.error_bounds.iter().map(|v| v * f).collect(),
            source: self.source,
            complete_below: self.complete_below.map(|c| c * f),
        }
    }

    pub fn truncated(&self, n: usize) -> Spectrum {
        let n = n.min(self.values.len());
        let complete = if n < self.values.len() {
            Some(self.values[n].min(self.cutoff()))
        } else {
            self.complete_below
        };
        Spectrum {
            bc: self.bc,
            values: self.values[..n].to_vec(),
            error_bounds: self.error_bounds[..n].to_vec(),
            source: self.source,
            complete_below: complete,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let s = Spectrum::exact(Bc::Neumann, vec![0.0, 1.0, 1.0], Source::User).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("\"bc\":\"neumann\""));
        assert_eq!(Spectrum::from_json(&j).unwrap(), s);
    }

    #[test]
    fn rejects_unsorted_and_negative() {
        assert!(Spectrum::exact(Bc::Dirichlet, vec![2.0, 1.0], Source::User).is_err());
        assert!(Spectrum::exact(Bc::Dirichlet, vec![0.0, 1.0], Source::User).is_err());
        assert!(Spectrum::exact(Bc::Neumann, vec![-1.0, 1.0], Source::User).is_err());
    }

    #[test]
    fn value_out_of_range() {
        let s = Spectrum::exact(Bc::Dirichlet, vec![1.0], Source::User).unwrap();
        assert_eq!(s.value(2), Err(Error::OutOfRange { k: 2, available: 1 }));
    }
}
