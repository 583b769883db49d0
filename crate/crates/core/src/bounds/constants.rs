use super::{require_dim, require_positive, Assumption, BoundResult, Functional, Side, Threshold};
use crate::error::Result;
use crate::numeric::unit_ball_volume;
use crate::spectra::Bc;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// C_d = 4π² ω_d^{−2/d}; defined for every d ≥ 1 (C_1 = π² enters boundary terms).
pub fn classical_constant(d: usize) -> f64 {
    assert!(d >= 1, "classical constant needs d >= 1");
    4.0 * PI * PI * unit_ball_volume(d).powf(-2.0 / d as f64)
}

/// Constant bounding the Neumann spectral function near the boundary.
pub fn neumann_constant(d: usize) -> f64 {
    let df = d as f64;
    let t = 3f64.powf(1.0 / (df + 1.0));
    4.0 * unit_ball_volume(d)
        * ((2.0 * PI).powf(-df)
            + df * (df + 2.0)
                * t
                * PI.powf(-1.0 - df)
                * (0.5 + t * (df + 2.0)).powf(df - 1.0)
                * (2.0 * (df + 2.0) * t + PI))
}

/// (d/(d+2)) C_d (k/|Ω|)^{2/d}.
pub fn weyl_one_term(d: usize, volume: f64, k: f64) -> f64 {
    let df = d as f64;
    df / (df + 2.0) * classical_constant(d) * (k / volume).powf(2.0 / df)
}

/// Coefficient of |∂Ω|/|Ω|·(k/|Ω|)^{1/d} in the two-term asymptotics of averages.
pub fn weyl_boundary_coefficient(d: usize) -> f64 {
    let df = d as f64;
    classical_constant(d).powf((df + 1.0) / 2.0) / (2.0 * (df + 1.0) * classical_constant(d - 1).powf((df - 1.0) / 2.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Semiclassical {
    pub d: usize,
    pub k: usize,
    pub c_d: f64,
    /// Lower bound on Dirichlet averages and upper bound on Neumann averages.
    pub one_term: f64,
    /// Reference curves only; these are not bounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_term_dirichlet: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_term_neumann: Option<f64>,
    pub bounds: Vec<BoundResult>,
}

/// One-term Weyl value at `k`, as the Berezin–Li–Yau lower bound (Dirichlet)
/// and the Kröger upper bound (Neumann), plus optional two-term curves.
pub fn semiclassical(d: usize, volume: f64, k: usize, boundary: Option<f64>) -> Result<Semiclassical> {
    require_dim(d)?;
    require_positive("volume", volume)?;
    if k == 0 {
        return Err(crate::Error::InvalidArgument("k must be at least 1".into()));
    }
    let kf = k as f64;
    let one = weyl_one_term(d, volume, kf);
    let second = boundary.map(|b| weyl_boundary_coefficient(d) * b / volume * (kf / volume).powf(1.0 / d as f64));
    let bly = BoundResult::new(
        "bly",
        Bc::Dirichlet,
        Side::Lower,
        Functional::Average,
        one,
        Some(kf),
        Threshold::none(),
        &[Assumption::Any],
    );
    let kroger = BoundResult::new(
        "kroger",
        Bc::Neumann,
        Side::Upper,
        Functional::Average,
        one,
        Some(kf),
        Threshold::none(),
        &[Assumption::Any],
    );
    Ok(Semiclassical {
        d,
        k,
        c_d: classical_constant(d),
        one_term: one,
        two_term_dirichlet: second.map(|s| one + s),
        two_term_neumann: second.map(|s| one - s),
        bounds: vec![bly, kroger],
    })
}

/// Berezin's upper bound Σ(z − λ_j)_+ ≤ (2/(d+2)) C_d^{−d/2} |Ω| z^{1+d/2}.
pub fn berezin_riesz(d: usize, volume: f64, z: f64) -> Result<BoundResult> {
    require_dim(d)?;
    require_positive("volume", volume)?;
    let df = d as f64;
    let v = 2.0 / (df + 2.0) * classical_constant(d).powf(-df / 2.0) * volume * z.max(0.0).powf(1.0 + df / 2.0);
    Ok(BoundResult::new(
        "berezin",
        Bc::Dirichlet,
        Side::Upper,
        Functional::Riesz1,
        v,
        Some(z),
        Threshold::none(),
        &[Assumption::Any],
    ))
}

/// Second-term constant of the class-S average bound divided by the exact
/// two-term coefficient.
pub fn second_term_ratio(d: usize) -> f64 {
    let df = d as f64;
    2.0 * (2.0 * classical_constant(d) / (df + 2.0)).sqrt() / weyl_boundary_coefficient(d)
}

/// Boundary coefficient of the convex Riesz bound divided by the exact
/// two-term Riesz coefficient.
pub fn convex_riesz_ratio(d: usize) -> f64 {
    let df = d as f64;
    let num = 2.0 * (2.0 / (df + 2.0)).sqrt() * (2.0 * PI).powf(-df) * unit_ball_volume(d);
    let den = 0.25 * (2.0 / (df + 1.0)) * (2.0 * PI).powf(1.0 - df) * unit_ball_volume(d - 1);
    num / den
}
