use super::constants::{classical_constant, neumann_constant, weyl_one_term};
use super::{require_dim, require_positive, Assumption, BoundResult, Functional, Query, Side, Threshold, Variable};
use crate::error::{Error, Result};
use crate::geometry::GeometricSummary;
use crate::numeric::unit_ball_volume;
use crate::spectra::Bc;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Classical Neumann bounds: the Kröger average upper bound, the Riesz-mean
/// lower bound and the heat-trace lower bound.
pub fn neumann_classical(query: Query, volume: f64, d: usize) -> Result<BoundResult> {
    require_dim(d)?;
    require_positive("volume", volume)?;
    query.validate()?;
    let df = d as f64;
    let any = [Assumption::Any];
    let r = match query {
        Query::Average { k } => BoundResult::new(
            "thm3.1",
            Bc::Neumann,
            Side::Upper,
            Functional::Average,
            weyl_one_term(d, volume, k as f64),
            Some(k as f64),
            Threshold::none(),
            &any,
        ),
        Query::Riesz { z } => BoundResult::new(
            "thm3.1",
            Bc::Neumann,
            Side::Lower,
            Functional::Riesz1,
            2.0 / (df + 2.0) * classical_constant(d).powf(-df / 2.0) * volume * z.powf(1.0 + df / 2.0),
            Some(z),
            Threshold::none(),
            &any,
        ),
        Query::Partition { t } => BoundResult::new(
            "thm3.1",
            Bc::Neumann,
            Side::Lower,
            Functional::Partition,
            volume / (4.0 * PI * t).powf(df / 2.0),
            Some(t),
            Threshold::none(),
            &any,
        ),
        Query::Lambda1 => return Err(Error::InvalidArgument("no Neumann bound on lambda1".into())),
    };
    Ok(r)
}

/// Both sides of the quadratic inequality linking the average of μ_1..μ_k
/// to μ_{k+1}: LHS = (d+2)/d·avg − L, RHS = −L (μ_{k+1}/L − 1)².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticRecord {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn neumann_quadratic_record(k: usize, volume: f64, d: usize, avg_k: f64, mu_next: f64) -> Result<QuadraticRecord> {
    require_dim(d)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let df = d as f64;
    let l = classical_constant(d) * (k as f64 / volume).powf(2.0 / df);
    let lhs = (df + 2.0) / df * avg_k - l;
    let rhs = -l * (mu_next / l - 1.0).powi(2);
    let slack = 1e-9 * lhs.abs().max(rhs.abs()).max(1.0);
    Ok(QuadraticRecord {
        k,
        lhs,
        rhs,
        holds: lhs <= rhs + slack,
    })
}

/// Bracket L x₋ ≤ μ_k ≤ μ_{k+1} ≤ L x₊ with x± = 1 ± sqrt(1 − (d+2)/d·avg/L).
pub fn neumann_bracket(k: usize, volume: f64, d: usize, avg_k: f64) -> Result<(BoundResult, BoundResult)> {
    require_dim(d)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let df = d as f64;
    let l = classical_constant(d) * (k as f64 / volume).powf(2.0 / df);
    let disc = 1.0 - (df + 2.0) / df * avg_k / l;
    let (lo, hi) = if disc >= 0.0 {
        (l * (1.0 - disc.sqrt()), l * (1.0 + disc.sqrt()))
    } else {
        (f64::NAN, f64::NAN)
    };
    let mk = |side, v: f64, at: usize| {
        let r = BoundResult::new(
            "thm3.1",
            Bc::Neumann,
            side,
            Functional::Mu,
            v,
            Some(at as f64),
            Threshold::none(),
            &[Assumption::Any],
        )
        .with_extra("scale", l);
        if disc < 0.0 {
            r.inapplicable("negative discriminant: bound not applicable at this k")
        } else {
            r
        }
    };
    Ok((mk(Side::Lower, lo, k), mk(Side::Upper, hi, k + 1)))
}

/// Two-term Riesz lower bound through the width δ_v(Ω) in one direction.
pub fn neumann_width(z: f64, volume: f64, d: usize, width: f64) -> Result<BoundResult> {
    require_dim(d)?;
    require_positive("volume", volume)?;
    require_positive("width", width)?;
    if !(z >= 0.0) {
        return Err(Error::InvalidArgument(format!("z must be nonnegative, got {z}")));
    }
    let df = d as f64;
    let main = 2.0 / (df + 2.0) * classical_constant(d).powf(-df / 2.0) * volume * z.powf(df / 2.0 + 1.0);
    let second = 0.25 * (2.0 / (df + 1.0)) * classical_constant(d - 1).powf(-(df - 1.0) / 2.0) * volume / width
        * z.powf(df / 2.0 + 0.5)
        - (2.0 * PI).powf(2.0 - df) * unit_ball_volume(d) * volume / (96.0 * width * width) * z.powf(df / 2.0);
    Ok(BoundResult::new(
        "thm3.2",
        Bc::Neumann,
        Side::Lower,
        Functional::Riesz1,
        main + second.max(0.0),
        Some(z),
        Threshold::none(),
        &[Assumption::Any],
    )
    .with_extra("width", width))
}

/// C² Neumann bounds: Riesz upper bound for z ≥ z₀ and average lower bound.
///
/// `curvature_max` is M = max |Σ hκ_i/(1 − hκ_i)| over the boundary and
/// h ∈ [0, h̄/2]. The average form must satisfy both the stated threshold
/// k ≥ c_d|Ω| max{h̄^{−d}, (2/3)M^d} and the one the argument actually uses,
/// k ≥ c_d|Ω|z₀^{d/2}; the larger is enforced and a flag notes when they differ.
pub fn neumann_c2(
    query: Query,
    geom: &GeometricSummary,
    z0: f64,
    curvature_max: f64,
    tube: &dyn Fn(f64) -> Result<f64>,
) -> Result<BoundResult> {
    if !geom.tags.c2 {
        return Err(Error::NotApplicable("bound requires a C2 domain".into()));
    }
    query.validate()?;
    require_positive("z0", z0)?;
    let d = geom.dim;
    require_dim(d)?;
    let df = d as f64;
    let (v, p, hb) = (geom.volume, geom.boundary_measure, geom.max_tube_radius);
    let cd = neumann_constant(d);
    let big_c = classical_constant(d);
    let remainder = |z: f64| -> Result<f64> {
        let h = PI / (2.0 * z.sqrt());
        let w = tube(h)?;
        Ok(2.0 * z.powf(1.0 + df / 2.0) * cd * (w - h * p).abs())
    };
    let c2 = [Assumption::C2];
    match query {
        Query::Riesz { z } => {
            let rp = remainder(z)?;
            let val = 2.0 / (df + 2.0) * big_c.powf(-df / 2.0) * v * z.powf(1.0 + df / 2.0)
                + PI * p * cd * z.powf(df / 2.0 + 0.5)
                + rp;
            Ok(BoundResult::new(
                "thm3.3",
                Bc::Neumann,
                Side::Upper,
                Functional::Riesz1,
                val,
                Some(z),
                Threshold::at_least(Variable::Z, z0, "z >= z0"),
                &c2,
            )
            .with_extra("remainder", rp)
            .with_extra("c_d", cd))
        }
        Query::Average { k } => {
            let kf = k as f64;
            let stated = cd * v * hb.powf(-df).max(2.0 / 3.0 * curvature_max.powf(df));
            let proof = cd * v * z0.powf(df / 2.0);
            let th = Threshold::at_least(
                Variable::K,
                stated.max(proof),
                "k >= c_d |Omega| max(hbar^-d, (2/3) M^d) and k >= c_d |Omega| z0^(d/2)",
            );
            let z = big_c * (kf / v).powf(2.0 / df);
            let rk = remainder(z)? / kf;
            let val =
                weyl_one_term(d, v, kf) - PI * cd * big_c.powf((df + 1.0) / 2.0) * p / v * (kf / v).powf(1.0 / df) - rk;
            let mut res = BoundResult::new(
                "thm3.3",
                Bc::Neumann,
                Side::Lower,
                Functional::Average,
                val,
                Some(kf),
                th,
                &c2,
            )
            .with_extra("remainder", rk)
            .with_extra("c_d", cd)
            .with_extra("k_stated", stated)
            .with_extra("k_proof", proof);
            if (stated - proof).abs() > 1e-12 * stated.max(proof) {
                res = res.with_flag("stated and derived k-thresholds differ; the larger is enforced");
            }
            Ok(res)
        }
        _ => Err(Error::InvalidArgument(
            "C2 Neumann bounds exist for riesz and average only".into(),
        )),
    }
}

/// Bound on the Neumann spectral function Σ_{μ_j ≤ μ} v_j(x)² at distance δ
/// from the boundary, split into the Weyl term and the boundary correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralFunctionBound {
    pub main: f64,
    pub correction: f64,
    pub total: f64,
}

pub fn spectral_function_bound(mu: f64, delta: f64, d: usize) -> Result<SpectralFunctionBound> {
    require_dim(d)?;
    require_positive("mu", mu)?;
    require_positive("delta", delta)?;
    let df = d as f64;
    let w = unit_ball_volume(d);
    let t = 3f64.powf(1.0 / (df + 1.0));
    let main = (2.0 * PI).powf(-df) * w * mu.powf(df / 2.0);
    let coef = df * (df + 2.0) * (2.0 * PI).powf(-df) * t * w * (2.0 / PI * (df + 2.0) * t + 1.0) / delta;
    let correction = coef * (mu.sqrt() + (df + 2.0) * t / delta).powf(df - 1.0);
    Ok(SpectralFunctionBound {
        main,
        correction,
        total: main + correction,
    })
}
