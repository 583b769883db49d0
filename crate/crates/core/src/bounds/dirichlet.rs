use super::constants::{classical_constant, weyl_one_term};
use super::{require_dim, require_positive, Assumption, BoundResult, Functional, Query, Side, Threshold, Variable};
use crate::error::{Error, Result};
use crate::geometry::GeometricSummary;
use crate::numeric::{binomial, unit_ball_volume};
use crate::spectra::{lambda1_ball, Bc};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::{E, PI};

/// Norms of an admissible test function φ ∈ H¹₀(Ω) ∩ L^∞(Ω).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionNorms {
    pub l2_sq: f64,
    pub grad_l2_sq: f64,
    pub sup: f64,
    /// ‖φ‖₂² / (|Ω| ‖φ‖∞²)
    pub rho: f64,
}

impl TestFunctionNorms {
    pub fn new(l2_sq: f64, grad_l2_sq: f64, sup: f64, volume: f64) -> Result<Self> {
        require_positive("l2_sq", l2_sq)?;
        require_positive("grad_l2_sq", grad_l2_sq)?;
        require_positive("sup", sup)?;
        require_positive("volume", volume)?;
        let rho = l2_sq / (volume * sup * sup);
        if rho > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "rho = {rho} exceeds 1, inconsistent with the sup norm"
            )));
        }
        Ok(TestFunctionNorms {
            l2_sq,
            grad_l2_sq,
            sup,
            rho,
        })
    }

    /// Rayleigh quotient ‖∇φ‖²/‖φ‖².
    pub fn rayleigh(&self) -> f64 {
        self.grad_l2_sq / self.l2_sq
    }
}

/// Boundary-layer profile of the cut-off φ_h = f(δ(x)/h).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiProfile {
    /// f(p) = p
    Linear,
    /// f(p) = sin(πp/2)
    Sine,
}

/// Norms of φ_h from the tube volume |ω_h|, using the conservative
/// ‖φ_h‖₂² ≥ |Ω| − |ω_h|.
pub fn phi_h_norms(profile: PhiProfile, h: f64, volume: f64, tube: f64) -> Result<TestFunctionNorms> {
    require_positive("h", h)?;
    let l2 = volume - tube;
    if !(l2 > 0.0) {
        return Err(Error::NotApplicable(format!(
            "tube of width {h} covers the domain (|ω_h| = {tube}, |Ω| = {volume})"
        )));
    }
    let grad = match profile {
        PhiProfile::Linear => tube / (h * h),
        PhiProfile::Sine => PI * PI / (4.0 * h * h) * tube,
    };
    TestFunctionNorms::new(l2, grad, 1.0, volume)
}

/// Averaged-variational-principle bounds driven by one test function.
pub fn dirichlet_avp(norms: &TestFunctionNorms, volume: f64, d: usize, query: Query) -> Result<BoundResult> {
    require_dim(d)?;
    query.validate()?;
    if norms.rho >= 1.0 {
        return Err(Error::InvalidArgument(format!("rho = {} must be below 1", norms.rho)));
    }
    let df = d as f64;
    let g = norms.rayleigh();
    let sup2 = norms.sup * norms.sup;
    let semi = (2.0 * PI).powf(-df) * unit_ball_volume(d);
    let any = [Assumption::Any];
    let r = match query {
        Query::Riesz { z } => {
            let v = 2.0 / (df + 2.0) * semi * norms.l2_sq * (z - g).max(0.0).powf(df / 2.0 + 1.0) / sup2;
            BoundResult::new(
                "thm2.1",
                Bc::Dirichlet,
                Side::Lower,
                Functional::Riesz1,
                v,
                Some(z),
                Threshold::none(),
                &any,
            )
        }
        Query::Average { k } => {
            let v = g + weyl_one_term(d, volume, k as f64) * norms.rho.powf(-2.0 / df);
            BoundResult::new(
                "thm2.1",
                Bc::Dirichlet,
                Side::Upper,
                Functional::Average,
                v,
                Some(k as f64),
                Threshold::none(),
                &any,
            )
        }
        Query::Partition { t } => {
            let heat = (4.0 * PI * t).powf(df / 2.0);
            let v = volume / heat - (norms.grad_l2_sq * t + volume * sup2 - norms.l2_sq) / (sup2 * heat);
            BoundResult::new(
                "cor2.2",
                Bc::Dirichlet,
                Side::Lower,
                Functional::Partition,
                v,
                Some(t),
                Threshold::none(),
                &any,
            )
        }
        Query::Lambda1 => BoundResult::new(
            "thm2.1",
            Bc::Dirichlet,
            Side::Upper,
            Functional::Lambda1,
            g,
            None,
            Threshold::none(),
            &any,
        ),
    };
    Ok(r.with_extra("rayleigh", g).with_extra("rho", norms.rho))
}

/// Two-sided single-eigenvalue bracket from the average of the first k
/// eigenvalues: a lower bound on λ_k and an upper bound on λ_{k+1}.
///
/// The bracket is centred at the Rayleigh quotient g of φ: with ν_j = λ_j − g
/// the averaged inequality is the Kröger-type Riesz bound for volume ρ|Ω|, so
/// g + L x₋ ≤ λ_k ≤ λ_{k+1} ≤ g + L x₊ with
/// x± = 1 ± sqrt(1 − (d+2)/d · (avg − g)/L), L = C_d (k/|Ω|)^{2/d} ρ^{−2/d}.
/// Requires λ_k ≥ g, recorded as an eigenvalue threshold.
pub fn dirichlet_avp_bracket(
    norms: &TestFunctionNorms,
    volume: f64,
    d: usize,
    k: usize,
    avg_k: f64,
) -> Result<(BoundResult, BoundResult)> {
    require_dim(d)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if norms.rho >= 1.0 {
        return Err(Error::InvalidArgument(format!("rho = {} must be below 1", norms.rho)));
    }
    let df = d as f64;
    let g = norms.rayleigh();
    let l = classical_constant(d) * (k as f64 / volume).powf(2.0 / df) * norms.rho.powf(-2.0 / df);
    let disc = 1.0 - (df + 2.0) / df * (avg_k - g) / l;
    let th = Threshold::at_least(Variable::Eigenvalue, g, "lambda_k >= |grad phi|^2/|phi|^2");
    let (lo, hi) = if disc >= 0.0 {
        (g + l * (1.0 - disc.sqrt()), g + l * (1.0 + disc.sqrt()))
    } else {
        (f64::NAN, f64::NAN)
    };
    let mk = |side, v: f64, at: usize| {
        let r = BoundResult::new(
            "cor2.3",
            Bc::Dirichlet,
            side,
            Functional::Single,
            v,
            Some(at as f64),
            th.clone(),
            &[Assumption::Any],
        )
        .with_extra("scale", l)
        .with_extra("rayleigh", g);
        if disc < 0.0 {
            r.inapplicable("negative discriminant: bound not applicable at this k")
        } else {
            r
        }
    };
    Ok((mk(Side::Lower, lo, k), mk(Side::Upper, hi, k + 1)))
}

/// Bounds through the inradius and λ₁: the Riesz lower bound for
/// z ≥ (d+2)/(2r²), the average upper bound (returned as a bound on the
/// average itself, λ₁ plus the excess), and λ₁ ≤ λ₁(B)/r².
pub fn dirichlet_inradius(query: Query, lambda1: f64, r: f64, volume: f64, d: usize) -> Result<BoundResult> {
    require_dim(d)?;
    query.validate()?;
    require_positive("lambda1", lambda1)?;
    require_positive("inradius", r)?;
    require_positive("volume", volume)?;
    let df = d as f64;
    let ball = lambda1_ball(d)?;
    let lb = ball.lambda1_b;
    let j = ball.j_at_sqrt.abs();
    let any = [Assumption::Any];
    let res = match query {
        Query::Riesz { z } => {
            let zmin = (df + 2.0) / (2.0 * r * r);
            let v = j * r.powf(df) / (df * lb.powf((df - 1.0) / 2.0)) / (df + 2.0)
                * (z - lambda1).max(0.0).powf(df / 2.0 + 1.0);
            BoundResult::new(
                "thm2.5",
                Bc::Dirichlet,
                Side::Lower,
                Functional::Riesz1,
                v,
                Some(z),
                Threshold::at_least(Variable::Z, zmin, "z >= (d+2)/(2 r^2)"),
                &any,
            )
        }
        Query::Average { k } => {
            let excess = weyl_one_term(d, volume, k as f64)
                * (2.0 * df * unit_ball_volume(d) * volume / j).powf(2.0 / df)
                * lb.powf((df - 1.0) / df)
                / (4.0 * PI * PI * r * r);
            BoundResult::new(
                "thm2.5",
                Bc::Dirichlet,
                Side::Upper,
                Functional::Average,
                lambda1 + excess,
                Some(k as f64),
                Threshold::none(),
                &any,
            )
            .with_extra("excess", excess)
        }
        Query::Lambda1 => BoundResult::new(
            "rem2.1",
            Bc::Dirichlet,
            Side::Upper,
            Functional::Lambda1,
            lb / (r * r),
            None,
            Threshold::none(),
            &any,
        ),
        Query::Partition { .. } => {
            return Err(Error::InvalidArgument(
                "the inradius bounds have no partition form".into(),
            ))
        }
    };
    Ok(res.with_extra("lambda1_ball", lb))
}

/// Heat-kernel variants of the inradius bounds, using only λ₁.
pub fn dirichlet_inradius_heat(query: Query, lambda1: f64, d: usize) -> Result<BoundResult> {
    require_dim(d)?;
    query.validate()?;
    require_positive("lambda1", lambda1)?;
    let df = d as f64;
    let any = [Assumption::Any];
    match query {
        Query::Riesz { z } => {
            let a = (df / (2.0 * E)).powf(df / 2.0) / gamma(df / 2.0 + 2.0);
            let v = lambda1 * a * (z / lambda1 - 1.0).max(0.0).powf(df / 2.0 + 1.0);
            Ok(BoundResult::new(
                "rem2.2",
                Bc::Dirichlet,
                Side::Lower,
                Functional::Riesz1,
                v,
                Some(z),
                Threshold::none(),
                &any,
            ))
        }
        Query::Average { k } => {
            let excess =
                df / (df + 2.0) * classical_constant(d) * (k as f64).powf(2.0 / df) * (E * lambda1 / (2.0 * df * PI));
            Ok(BoundResult::new(
                "rem2.2",
                Bc::Dirichlet,
                Side::Upper,
                Functional::Average,
                lambda1 + excess,
                Some(k as f64),
                Threshold::none(),
                &any,
            )
            .with_extra("excess", excess))
        }
        _ => Err(Error::InvalidArgument(
            "heat-kernel variant exists for riesz and average only".into(),
        )),
    }
}

/// λ₁ ≥ π²/(4 r²) on convex domains.
pub fn protter_lower(r: f64, convex: bool) -> Result<BoundResult> {
    require_positive("inradius", r)?;
    if !convex {
        return Err(Error::NotApplicable(
            "lower bound via inradius requires a convex domain".into(),
        ));
    }
    Ok(BoundResult::new(
        "protter",
        Bc::Dirichlet,
        Side::Lower,
        Functional::Lambda1,
        PI * PI / (4.0 * r * r),
        None,
        Threshold::none(),
        &[Assumption::Convex],
    ))
}

fn require_convex(geom: &GeometricSummary) -> Result<()> {
    if !geom.tags.convex {
        return Err(Error::NotApplicable("bound requires a convex domain".into()));
    }
    Ok(())
}

/// Convex-domain bounds depending only on |Ω| and |∂Ω|.
pub fn dirichlet_convex(query: Query, geom: &GeometricSummary) -> Result<BoundResult> {
    require_convex(geom)?;
    query.validate()?;
    let d = geom.dim;
    require_dim(d)?;
    let df = d as f64;
    let (v, p, r) = (geom.volume, geom.boundary_measure, geom.inradius);
    let cd = classical_constant(d);
    let semi = (2.0 * PI).powf(-df) * unit_ball_volume(d);
    let conv = [Assumption::Convex];
    let res = match query {
        Query::Riesz { z } => {
            let val = 2.0 / (df + 2.0) * semi * v * z.powf(df / 2.0 + 1.0)
                - 2.0 * (2.0 / (df + 2.0)).sqrt() * semi * p * z.powf(df / 2.0 + 0.5);
            BoundResult::new(
                "thm2.4",
                Bc::Dirichlet,
                Side::Lower,
                Functional::Riesz1,
                val,
                Some(z),
                Threshold::at_least(Variable::Z, (df + 2.0) / (2.0 * r * r), "z >= (d+2)/(2 r^2)"),
                &conv,
            )
        }
        Query::Average { k } => {
            let kv = k as f64 / v;
            let val = weyl_one_term(d, v, k as f64)
                + 2.0 * (2.0 * cd / (df + 2.0)).sqrt() * kv.powf(1.0 / df) * p / v
                + 4.0 * p * p / (v * v);
            BoundResult::new(
                "thm2.4",
                Bc::Dirichlet,
                Side::Upper,
                Functional::Average,
                val,
                Some(k as f64),
                Threshold::none(),
                &conv,
            )
        }
        Query::Lambda1 => BoundResult::new(
            "thm2.4",
            Bc::Dirichlet,
            Side::Upper,
            Functional::Lambda1,
            4.0 * p * p / (v * v),
            None,
            Threshold::none(),
            &conv,
        ),
        Query::Partition { .. } => {
            return Err(Error::InvalidArgument(
                "the convex bounds have no partition form".into(),
            ))
        }
    };
    Ok(res)
}

/// Convex Riesz lower bound with a free parameter α > 0, valid for z ≥ αd/r².
pub fn dirichlet_convex_aaa(z: f64, alpha: f64, geom: &GeometricSummary) -> Result<BoundResult> {
    require_convex(geom)?;
    require_positive("alpha", alpha)?;
    let d = geom.dim;
    require_dim(d)?;
    let df = d as f64;
    let semi = (2.0 * PI).powf(-df) * unit_ball_volume(d);
    let ad = alpha * df;
    let val = 2.0 / (df + 2.0) * semi * geom.volume * z.powf(df / 2.0 + 1.0)
        - semi * geom.boundary_measure * z.powf(df / 2.0 + 0.5) * (1.0 / ad.sqrt() + 2.0 * ad.sqrt());
    Ok(BoundResult::new(
        "thm2.4-alpha",
        Bc::Dirichlet,
        Side::Lower,
        Functional::Riesz1,
        val,
        Some(z),
        Threshold::at_least(Variable::Z, ad / (geom.inradius * geom.inradius), "z >= alpha d / r^2"),
        &[Assumption::Convex],
    )
    .with_extra("alpha", alpha))
}

/// Both sides of the convex average bound on a long product Ω' × (0, L) in
/// the limit L → ∞ at fixed κ = k/(L|Ω'|). Returns (average, bound).
/// Valid in the regime π²κ²|Ω′|² < λ₂(Ω′) − λ₁(Ω′) where the low modes are
/// products with the first cross-section mode.
pub fn convex_slab_limit(
    lambda1_cross: f64,
    cross_volume: f64,
    cross_boundary: f64,
    d: usize,
    kappa: f64,
) -> (f64, f64) {
    let df = d as f64;
    let cd = classical_constant(d);
    let lhs = lambda1_cross + PI * PI * cross_volume * cross_volume * kappa * kappa / 3.0;
    let rhs = df / (df + 2.0) * cd * kappa.powf(2.0 / df)
        + 2.0 * cross_boundary / cross_volume * (2.0 * cd / (df + 2.0)).sqrt() * kappa.powf(1.0 / df)
        + 4.0 * cross_boundary * cross_boundary / (cross_volume * cross_volume);
    (lhs, rhs)
}

/// h(k) = (2C_d/(d+2))^{−1/2} (k/|Ω|)^{−1/d}.
pub fn weyl_scale_h(d: usize, volume: f64, k: f64) -> f64 {
    let df = d as f64;
    (2.0 * classical_constant(d) / (df + 2.0)).powf(-0.5) * (k / volume).powf(-1.0 / df)
}

/// Remainder of the class-S average bound at width h with tube volume |ω_h|;
/// NaN when the tube fills the domain.
pub fn class_s_remainder(d: usize, volume: f64, boundary: f64, k: f64, h: f64, tube: f64) -> f64 {
    let df = d as f64;
    let core = volume - tube;
    if !(core > 0.0) {
        return f64::NAN;
    }
    let factor = 2.0 / (df + 2.0) * classical_constant(d) * (k / volume).powf(2.0 / df) + 1.0 / (h * h);
    factor * (h * boundary * tube + volume * (tube - h * boundary)) / (volume * core)
}

fn class_s_second(d: usize, volume: f64, boundary: f64, k: f64) -> f64 {
    let df = d as f64;
    2.0 * (2.0 * classical_constant(d) / (df + 2.0)).sqrt() * boundary / volume * (k / volume).powf(1.0 / df)
}

/// Class-S bounds using the tube volume function of the domain: the average
/// upper bound for k ≥ |Ω| r^{−d} ((d+2)/(2C_d))^{d/2}, and the heat trace
/// lower bound (|Ω| − 2|ω_√t|)/(4πt)^{d/2} for 0 < t ≤ r².
pub fn dirichlet_class_s(
    query: Query,
    geom: &GeometricSummary,
    tube: &dyn Fn(f64) -> Result<f64>,
) -> Result<BoundResult> {
    if !geom.tags.class_s {
        return Err(Error::NotApplicable("bound requires a class-S domain".into()));
    }
    query.validate()?;
    let d = geom.dim;
    require_dim(d)?;
    let df = d as f64;
    let (v, p, r) = (geom.volume, geom.boundary_measure, geom.inradius);
    let cls = [Assumption::ClassS];
    match query {
        Query::Average { k } => {
            let kf = k as f64;
            let k0 = v * r.powf(-df) * ((df + 2.0) / (2.0 * classical_constant(d))).powf(df / 2.0);
            let th = Threshold::at_least(Variable::K, k0, "k >= |Omega| r^-d ((d+2)/(2 C_d))^(d/2)");
            let h = weyl_scale_h(d, v, kf);
            // The threshold binds the remainder formula too.
            let (val, rem) = if th.admits(kf) {
                let w = tube(h)?;
                let rem = class_s_remainder(d, v, p, kf, h, w);
                (weyl_one_term(d, v, kf) + class_s_second(d, v, p, kf) + rem, rem)
            } else {
                (f64::NAN, f64::NAN)
            };
            let mut res = BoundResult::new(
                "thm2.7",
                Bc::Dirichlet,
                Side::Upper,
                Functional::Average,
                val,
                Some(kf),
                th,
                &cls,
            )
            .with_extra("h", h);
            if rem.is_finite() {
                res = res.with_extra("remainder", rem);
            }
            Ok(res)
        }
        Query::Partition { t } => {
            let th = Threshold::interval(Variable::T, None, Some(r * r), "0 < t <= r^2");
            let s = t.sqrt();
            let w = tube(s)?;
            let heat = (4.0 * PI * t).powf(df / 2.0);
            let val = (v - 2.0 * w) / heat;
            Ok(BoundResult::new(
                "cor2.8",
                Bc::Dirichlet,
                Side::Lower,
                Functional::Partition,
                val,
                Some(t),
                th,
                &cls,
            )
            .with_extra("remainder", 2.0 * (s * p - w) / heat))
        }
        _ => Err(Error::InvalidArgument(
            "class-S bounds exist for average and partition only".into(),
        )),
    }
}

/// Explicit C² remainder at width h from the curvature integrals
/// I_j = ∫𝓗^j dσ (index j−1 in `integrals`); NaN when the denominator is
/// not positive.
pub fn smooth_remainder(d: usize, volume: f64, boundary: f64, integrals: &[f64], h: f64) -> f64 {
    let df = d as f64;
    let mut num_sum = 0.0;
    let mut den_sum = 0.0;
    for j in 2..=d {
        let ij = integrals.get(j - 2).copied().unwrap_or(0.0);
        let c = binomial(d, j) * if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
        num_sum += c * h.powi(j as i32 - 2) * ij;
        den_sum += c * h.powi(j as i32) * ij;
    }
    let num = 2.0 * boundary * boundary + 2.0 * (h * boundary + volume) * num_sum / df;
    let den = volume * volume - h * volume * boundary - volume / df * den_sum;
    if den > 0.0 {
        num / den
    } else {
        f64::NAN
    }
}

fn require_c2(geom: &GeometricSummary) -> Result<&[f64]> {
    if !geom.tags.c2 {
        return Err(Error::NotApplicable("bound requires a C2 domain".into()));
    }
    geom.curvature_integrals
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("curvature integrals are missing from the summary".into()))
}

/// C² average upper bound with the explicit curvature remainder, valid for
/// h(k) ≤ h̄. The k → ∞ limit of the remainder is returned as `limit`.
pub fn dirichlet_c2(k: usize, geom: &GeometricSummary) -> Result<BoundResult> {
    let integrals = require_c2(geom)?;
    let d = geom.dim;
    require_dim(d)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let df = d as f64;
    let (v, p, hb) = (geom.volume, geom.boundary_measure, geom.max_tube_radius);
    let kf = k as f64;
    let k0 = v * hb.powf(-df) * ((df + 2.0) / (2.0 * classical_constant(d))).powf(df / 2.0);
    let h = weyl_scale_h(d, v, kf);
    let rem = smooth_remainder(d, v, p, integrals, h);
    let limit = 2.0 * p * p / (v * v) - (df - 1.0) / v * integrals.first().copied().unwrap_or(0.0);
    let val = weyl_one_term(d, v, kf) + class_s_second(d, v, p, kf) + rem;
    let mut res = BoundResult::new(
        "thm2.9",
        Bc::Dirichlet,
        Side::Upper,
        Functional::Average,
        val,
        Some(kf),
        Threshold::at_least(Variable::K, k0, "k >= |Omega| hbar^-d ((d+2)/(2 C_d))^(d/2)"),
        &[Assumption::C2],
    )
    .with_extra("h", h)
    .with_extra("limit", limit);
    if rem.is_finite() {
        res = res.with_extra("remainder", rem);
    }
    Ok(res)
}

/// Mean-convex C² domains: the convex average bound under a k-threshold
/// depending on h̄, or for all k when h̄ ≥ |Ω|/(2|∂Ω|).
pub fn dirichlet_mean_convex(k: usize, geom: &GeometricSummary) -> Result<BoundResult> {
    require_c2(geom)?;
    if !geom.tags.mean_convex {
        return Err(Error::NotApplicable("bound requires a mean-convex domain".into()));
    }
    let d = geom.dim;
    require_dim(d)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let df = d as f64;
    let (v, p, hb) = (geom.volume, geom.boundary_measure, geom.max_tube_radius);
    let cd = classical_constant(d);
    let kf = k as f64;
    let val = weyl_one_term(d, v, kf) + class_s_second(d, v, p, kf) + 4.0 * p * p / (v * v);
    let mut flags = Vec::new();
    let th = if hb >= v / (2.0 * p) {
        flags.push("hbar >= |Omega|/(2|dOmega|): all k admitted".to_string());
        Threshold::none()
    } else {
        let radicand = (df + 2.0) / (2.0 * cd) * (v - 2.0 * hb * p) / (hb * hb * v);
        if radicand <= 0.0 {
            flags.push("nonpositive radicand in the k-threshold: all k admitted".to_string());
            Threshold::none()
        } else {
            Threshold::at_least(
                Variable::K,
                v * radicand.powf(df / 2.0),
                "k >= |Omega| ((d+2)/(2C_d) (|Omega| - 2 hbar |dOmega|)/(hbar^2 |Omega|))^(d/2)",
            )
        }
    };
    let mut res = BoundResult::new(
        "cor2.10",
        Bc::Dirichlet,
        Side::Upper,
        Functional::Average,
        val,
        Some(kf),
        th,
        &[Assumption::C2, Assumption::MeanConvex],
    );
    for f in flags {
        res = res.with_flag(f);
    }
    Ok(res)
}

/// Planar cases of the average upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum PlanarCase {
    /// C² boundary with b components.
    C2,
    /// C² boundary with at most two components, parameter α ∈ (0, 1).
    TwoComponents {
        alpha: f64,
    },
    Convex,
    /// Simple polygon, through the angle sums S_A and S_B.
    Polygon,
}

/// Planar average upper bound 2πk/|Ω| + √(8π)(|∂Ω|/|Ω|)(k/|Ω|)^{1/2} + R(k).
pub fn dirichlet_planar(case: PlanarCase, k: usize, geom: &GeometricSummary) -> Result<BoundResult> {
    if geom.dim != 2 {
        return Err(Error::NotApplicable(format!(
            "planar bounds need d = 2, got d = {}",
            geom.dim
        )));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let (v, p, hb) = (geom.volume, geom.boundary_measure, geom.max_tube_radius);
    let kf = k as f64;
    let h = (v / (2.0 * kf * PI)).sqrt();
    let head = 2.0 * PI * kf / v + (8.0 * PI).sqrt() * p / v * (kf / v).sqrt();
    // R(k) for a tube polynomial h|∂Ω| − c h², with its k → ∞ limit.
    let curved = |c: f64| {
        let den = v * (v - p * h + c * h * h);
        let rem = if den > 0.0 {
            2.0 * (p * p - c * v - c * p * h) / den
        } else {
            f64::NAN
        };
        (rem, 2.0 * (p * p - c * v) / (v * v))
    };
    let (id, rem, limit, th, assumptions): (&str, f64, f64, Threshold, Vec<Assumption>) = match case {
        PlanarCase::C2 => {
            require_c2(geom)?;
            let b = geom.boundary_components as f64;
            let (rem, lim) = curved((2.0 - b) * PI);
            let th = Threshold::at_least(Variable::K, v / (2.0 * PI * hb * hb), "k >= |Omega|/(2 pi hbar^2)");
            ("thm2.11i", rem, lim, th, vec![Assumption::C2, Assumption::Planar])
        }
        PlanarCase::TwoComponents { alpha } => {
            require_c2(geom)?;
            if geom.boundary_components > 2 {
                return Err(Error::NotApplicable(
                    "case needs at most two boundary components".into(),
                ));
            }
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
            }
            let rem = 2.0 * p * p / ((1.0 - alpha) * v * v);
            let k0 = v / (2.0 * PI) * (hb.powi(-2)).max((p / (alpha * v)).powi(2));
            let th = Threshold::at_least(
                Variable::K,
                k0,
                "k >= (|Omega|/2pi) max(hbar^-2, (|dOmega|/(alpha |Omega|))^2)",
            );
            ("thm2.11ii", rem, rem, th, vec![Assumption::C2, Assumption::Planar])
        }
        PlanarCase::Convex => {
            require_convex(geom)?;
            let rem = 4.0 * p * p / (v * v);
            (
                "thm2.11iii",
                rem,
                rem,
                Threshold::none(),
                vec![Assumption::Convex, Assumption::Planar],
            )
        }
        PlanarCase::Polygon => {
            if !geom.tags.polygon {
                return Err(Error::NotApplicable("case needs a polygon".into()));
            }
            let sums = geom
                .angle_sums
                .ok_or_else(|| Error::InvalidArgument("angle sums are missing from the summary".into()))?;
            let (rem, lim) = curved(sums.s_a - sums.s_b);
            let th = Threshold::at_least(Variable::K, v / (2.0 * PI * hb * hb), "k >= |Omega|/(2 pi htilde^2)");
            ("thm2.11iv", rem, lim, th, vec![Assumption::Polygon, Assumption::Planar])
        }
    };
    let mut res = BoundResult::new(
        id,
        Bc::Dirichlet,
        Side::Upper,
        Functional::Average,
        head + rem,
        Some(kf),
        th,
        &assumptions,
    )
    .with_extra("h", h)
    .with_extra("limit", limit);
    if let PlanarCase::TwoComponents { alpha } = case {
        res = res.with_extra("alpha", alpha);
    }
    if rem.is_finite() {
        res = res.with_extra("remainder", rem);
    }
    Ok(res)
}
