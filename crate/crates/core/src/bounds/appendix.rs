use super::constants::classical_constant;
use super::{require_dim, require_positive, Assumption, BoundResult, Functional, Side, Threshold};
use crate::error::{Error, Result};
use crate::spectra::Bc;
use serde::{Deserialize, Serialize};

/// Generalized Berezin–Li–Yau inequality for φf_j with f_j orthonormal:
/// Σ‖∇(φf_j)‖² ≥ −(2/(d+2)) C_d^{−d/2} ‖φ‖₂² R^{d+2} + R² Σ‖φf_j‖².
///
/// Without `r` the right side is maximized at R = C_d^{1/2}(m/‖φ‖₂²)^{1/d},
/// giving (d/(d+2)) C_d ‖φ‖₂^{−4/d} m^{1+2/d}. The returned bound is a lower
/// bound on `sum_grad`.
pub fn bly_generalized(sum_grad: f64, sum_mass: f64, phi_l2_sq: f64, d: usize, r: Option<f64>) -> Result<BoundResult> {
    require_dim(d)?;
    require_positive("phi_l2_sq", phi_l2_sq)?;
    if !(sum_mass >= 0.0 && sum_grad >= 0.0) {
        return Err(Error::InvalidArgument("sums must be nonnegative".into()));
    }
    let df = d as f64;
    let cd = classical_constant(d);
    let rhs = |r: f64| -2.0 / (df + 2.0) * cd.powf(-df / 2.0) * phi_l2_sq * r.powf(df + 2.0) + r * r * sum_mass;
    let optimal_r = cd.sqrt() * (sum_mass / phi_l2_sq).powf(1.0 / df);
    let (value, used) = match r {
        Some(r) => {
            require_positive("R", r)?;
            (rhs(r), r)
        }
        None => (
            df / (df + 2.0) * cd * phi_l2_sq.powf(-2.0 / df) * sum_mass.powf(1.0 + 2.0 / df),
            optimal_r,
        ),
    };
    Ok(BoundResult::new(
        "appA.1",
        Bc::Dirichlet,
        Side::Lower,
        Functional::GradientSum,
        value,
        None,
        Threshold::none(),
        &[Assumption::Any],
    )
    .with_extra("r", used)
    .with_extra("optimal_r", optimal_r)
    .with_extra("sum_grad", sum_grad))
}

/// Single-eigenvalue bounds implied by two-sided average bounds
/// W(k) ≤ avg ≤ W(k) + A(k/|Ω|)^{1/d} + B for k ≥ k0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleBounds {
    pub k: usize,
    /// Window length used to compare λ_k with neighbouring averages.
    pub l: usize,
    pub lower_k: f64,
    pub upper_k_next: f64,
    /// Centre C_d(k/|Ω|)^{2/d} + ((d+1)/d) A (k/|Ω|)^{1/d} of the modulus bound.
    pub centre: f64,
    pub modulus: f64,
}

pub fn single_from_averages(k: usize, a: f64, b: f64, k0: usize, d: usize, volume: f64) -> Result<SingleBounds> {
    require_dim(d)?;
    require_positive("volume", volume)?;
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "A and B must be nonnegative, got {a}, {b}"
        )));
    }
    if k < k0.max(1) {
        return Err(Error::NotApplicable(format!("k = {k} is below k0 = {k0}")));
    }
    let df = d as f64;
    let kf = k as f64;
    let x = kf.powf(1.0 - 1.0 / (2.0 * df));
    let l = x.round() as usize;
    assert!(
        0.5 * x <= l as f64 && l as f64 <= 1.5 * x,
        "window length {l} outside [{}, {}]",
        0.5 * x,
        1.5 * x
    );
    let cd = classical_constant(d);
    let kv = kf / volume;
    let lead = cd * kv.powf(2.0 / df);
    let mid =
        (3.0 / (df + 2.0) * cd * volume.powf(-2.0 / df) + 2.0 * a * volume.powf(-1.0 / df)) * kf.powf(3.0 / (2.0 * df));
    let second = (df + 1.0) / df * a * kv.powf(1.0 / df);
    let low_tail = 3.0 * a / (2.0 * df) * volume.powf(-1.0 / df) * kf.powf(1.0 / (2.0 * df));
    let high_tail = (3.0 * a / (2.0 * df) * volume.powf(-1.0 / df) + 2.0 * b) * kf.powf(1.0 / (2.0 * df));
    Ok(SingleBounds {
        k,
        l,
        lower_k: lead - mid + second - low_tail - b,
        upper_k_next: lead + mid + second + high_tail + b,
        centre: lead + second,
        modulus: mid + high_tail + b,
    })
}
