//! Regression of bound remainders R(k) against their large-k behaviour.

use crate::bounds::{dirichlet_c2, dirichlet_class_s, dirichlet_planar, BoundResult, PlanarCase, Query};
use crate::error::{Error, Result};
use crate::geometry::{summarize, tube_volume_with, Domain};
use crate::numeric::{least_squares, logspace_int};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Bounds with a closed-form remainder limit or growth statement.
pub const FIT_IDS: &[&str] = &["thm2.7", "thm2.9", "thm2.11i", "thm2.11iv"];

const SAMPLES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    /// Intercept of R(k) = L + Σ a_i k^{−i/d}.
    Limit,
    /// Log-log slope of |R(k)| / k^{1/d}.
    Slope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub theorem_id: String,
    pub kind: FitKind,
    pub estimate: f64,
    pub prediction: f64,
    pub deviation: f64,
    pub k_min: usize,
    pub k_max: usize,
    pub samples: usize,
}

/// Fits the remainder of `theorem_id` on `domain` over log-spaced k in
/// `k_range`, which must span at least one decade.
///
/// Limits are compared with the closed form from geometry. For the class-S
/// bound the remainder is only known to be o(k^{1/d}); the prediction is the
/// slope −1/d of a bounded remainder.
pub fn asymptotic_fit(theorem_id: &str, domain: &Domain, k_range: (usize, usize)) -> Result<AsymptoticFit> {
    let (a, b) = k_range;
    if a == 0 || b < 10 * a {
        return Err(Error::InvalidArgument(format!(
            "k-range [{a}, {b}] must start at 1 or above and span at least one decade"
        )));
    }
    let geom = summarize(domain)?;
    let df = geom.dim as f64;
    let tube = |h: f64| Ok(tube_volume_with(domain, &geom, h, 42)?.value);
    let eval = |k: usize| -> Result<BoundResult> {
        match theorem_id {
            "thm2.7" => dirichlet_class_s(Query::Average { k }, &geom, &tube),
            "thm2.9" => dirichlet_c2(k, &geom),
            "thm2.11i" => dirichlet_planar(PlanarCase::C2, k, &geom),
            "thm2.11iv" => dirichlet_planar(PlanarCase::Polygon, k, &geom),
            other => Err(Error::InvalidArgument(format!("no asymptotic statement for '{other}'"))),
        }
    };
    let mut pts = Vec::new();
    let mut limit = f64::NAN;
    for k in logspace_int(a, b, SAMPLES) {
        let r = eval(k)?;
        limit = r.extras.get("limit").copied().unwrap_or(f64::NAN);
        match r.extras.get("remainder") {
            Some(&rem) if r.applicable && rem.is_finite() => pts.push((k as f64, rem)),
            _ => {}
        }
    }
    if pts.len() < 6 {
        return Err(Error::NotApplicable(format!(
            "only {} admissible points for {theorem_id} on [{a}, {b}]",
            pts.len()
        )));
    }
    let (kind, estimate, prediction) = if theorem_id == "thm2.7" {
        let xy: Vec<(f64, f64)> = pts
            .iter()
            .filter(|p| p.1 != 0.0)
            .map(|&(k, r)| (k.ln(), (r.abs() / k.powf(1.0 / df)).ln()))
            .collect();
        let x = DMatrix::from_fn(xy.len(), 2, |i, j| if j == 0 { 1.0 } else { xy[i].0 });
        let y = DVector::from_iterator(xy.len(), xy.iter().map(|p| p.1));
        (FitKind::Slope, least_squares(&x, &y)?[1], -1.0 / df)
    } else {
        let x = DMatrix::from_fn(pts.len(), 4, |i, j| pts[i].0.powf(-(j as f64) / df));
        let y = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
        (FitKind::Limit, least_squares(&x, &y)?[0], limit)
    };
    Ok(AsymptoticFit {
        theorem_id: theorem_id.into(),
        kind,
        estimate,
        prediction,
        deviation: (estimate - prediction).abs(),
        k_min: a,
        k_max: b,
        samples: pts.len(),
    })
}
