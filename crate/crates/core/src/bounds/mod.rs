//! Closed-form two-term bounds on eigenvalue averages, Riesz means and heat
//! traces. Each evaluation returns a [`BoundResult`] carrying its side, the
//! functional it controls and the hypothesis threshold it was checked against.

mod appendix;
mod constants;
mod dirichlet;
mod neumann;
#[cfg(test)]
mod spectral_tests;

pub use appendix::{bly_generalized, single_from_averages, SingleBounds};
pub use constants::{
    berezin_riesz, classical_constant, convex_riesz_ratio, neumann_constant, second_term_ratio, semiclassical,
    weyl_boundary_coefficient, weyl_one_term, Semiclassical,
};
pub use dirichlet::{
    class_s_remainder, convex_slab_limit, dirichlet_avp, dirichlet_avp_bracket, dirichlet_c2, dirichlet_class_s,
    dirichlet_convex, dirichlet_convex_aaa, dirichlet_inradius, dirichlet_inradius_heat, dirichlet_mean_convex,
    dirichlet_planar, phi_h_norms, protter_lower, smooth_remainder, weyl_scale_h, PhiProfile, PlanarCase,
    TestFunctionNorms,
};
pub use neumann::{
    neumann_bracket, neumann_c2, neumann_classical, neumann_quadratic_record, neumann_width, spectral_function_bound,
    QuadraticRecord, SpectralFunctionBound,
};

use crate::spectra::Bc;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

/// The spectral quantity a bound controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// (1/k) Σ_{j≤k} λ_j
    Average,
    /// Σ (z − λ_j)_+
    Riesz1,
    /// Σ e^{−λ_j t}
    Partition,
    /// a single Dirichlet eigenvalue λ_k (the index is in `BoundResult::at`)
    Single,
    Lambda1,
    /// a single Neumann eigenvalue μ_k
    Mu,
    /// Σ ‖∇f_j‖² in the generalized Berezin–Li–Yau inequality
    GradientSum,
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Functional::Average => "average",
            Functional::Riesz1 => "riesz1",
            Functional::Partition => "partition",
            Functional::Single => "single",
            Functional::Lambda1 => "lambda1",
            Functional::Mu => "mu",
            Functional::GradientSum => "gradient_sum",
        };
        f.write_str(s)
    }
}

/// Domain classes a bound may require.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    Any,
    Convex,
    ClassS,
    C2,
    MeanConvex,
    Planar,
    Polygon,
}

/// Which query variable a threshold constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    K,
    Z,
    T,
    /// a condition on the spectrum itself, e.g. λ_k ≥ g
    Eigenvalue,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub variable: Variable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    pub description: String,
}

impl Threshold {
    pub fn none() -> Self {
        Threshold {
            variable: Variable::None,
            min: None,
            max: None,
            description: "all values".into(),
        }
    }

    pub fn at_least(variable: Variable, min: f64, description: impl Into<String>) -> Self {
        Threshold {
            variable,
            min: Some(min),
            max: None,
            description: description.into(),
        }
    }

    pub fn interval(variable: Variable, min: Option<f64>, max: Option<f64>, description: impl Into<String>) -> Self {
        Threshold {
            variable,
            min,
            max,
            description: description.into(),
        }
    }

    /// Strict evaluation of the hypothesis at `x`, with no tolerance.
    pub fn admits(&self, x: f64) -> bool {
        self.min.is_none_or(|m| x >= m) && self.max.is_none_or(|m| x <= m)
    }
}

/// A query the bound is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Query {
    Average { k: usize },
    Riesz { z: f64 },
    Partition { t: f64 },
    Lambda1,
}

impl Query {
    pub fn at(&self) -> Option<f64> {
        match *self {
            Query::Average { k } => Some(k as f64),
            Query::Riesz { z } => Some(z),
            Query::Partition { t } => Some(t),
            Query::Lambda1 => None,
        }
    }

    pub(crate) fn validate(&self) -> crate::Result<()> {
        let ok = match *self {
            Query::Average { k } => k >= 1,
            Query::Riesz { z } => z.is_finite() && z >= 0.0,
            Query::Partition { t } => t.is_finite() && t > 0.0,
            Query::Lambda1 => true,
        };
        if ok {
            Ok(())
        } else {
            Err(crate::Error::InvalidArgument(format!("invalid query {self:?}")))
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Average { k } => write!(f, "average k={k}"),
            Query::Riesz { z } => write!(f, "riesz z={z}"),
            Query::Partition { t } => write!(f, "partition t={t}"),
            Query::Lambda1 => write!(f, "lambda1"),
        }
    }
}

/// One evaluated bound.
///
/// `value` is finite whenever the formula could be evaluated; when the
/// hypothesis fails so badly that it cannot (for instance a tube that swallows
/// the whole domain) it is NaN and serializes as `null`. `applicable` records
/// whether the threshold admits the query point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub theorem_id: String,
    pub bc: Bc,
    pub side: Side,
    pub functional: Functional,
    #[serde(serialize_with = "nan_as_null", deserialize_with = "null_as_nan")]
    pub value: f64,
    /// k, z or t the bound was evaluated at.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<f64>,
    pub threshold: Threshold,
    pub assumptions: Vec<Assumption>,
    pub applicable: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

pub(crate) fn nan_as_null<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

pub(crate) fn null_as_nan<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

impl BoundResult {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        theorem_id: &str,
        bc: Bc,
        side: Side,
        functional: Functional,
        value: f64,
        at: Option<f64>,
        threshold: Threshold,
        assumptions: &[Assumption],
    ) -> Self {
        // Eigenvalue conditions can only be checked against a spectrum.
        let applicable = value.is_finite()
            && match threshold.variable {
                Variable::K | Variable::Z | Variable::T => at.is_none_or(|x| threshold.admits(x)),
                Variable::Eigenvalue | Variable::None => true,
            };
        BoundResult {
            theorem_id: theorem_id.into(),
            bc,
            side,
            functional,
            value,
            at,
            threshold,
            assumptions: assumptions.to_vec(),
            applicable,
            extras: BTreeMap::new(),
            flags: Vec::new(),
        }
    }

    pub(crate) fn with_extra(mut self, key: &str, v: f64) -> Self {
        self.extras.insert(key.into(), v);
        self
    }

    pub(crate) fn with_flag(mut self, flag: impl Into<String>) -> Self {
        self.flags.push(flag.into());
        self
    }

    pub(crate) fn inapplicable(mut self, reason: impl Into<String>) -> Self {
        self.applicable = false;
        self.flags.push(reason.into());
        self
    }

    /// Whether `truth` is on the correct side of the bound, with relative slack.
    pub fn holds(&self, truth: f64, rel_slack: f64) -> bool {
        let slack = rel_slack * self.value.abs().max(truth.abs()).max(1.0);
        match self.side {
            Side::Upper => truth <= self.value + slack,
            Side::Lower => truth >= self.value - slack,
        }
    }

    /// Signed distance from the bound to the truth, positive when satisfied.
    pub fn margin(&self, truth: f64) -> f64 {
        match self.side {
            Side::Upper => self.value - truth,
            Side::Lower => truth - self.value,
        }
    }
}

pub(crate) fn require_dim(d: usize) -> crate::Result<()> {
    if d < 2 {
        return Err(crate::Error::InvalidArgument(format!(
            "bounds are defined for d >= 2, got d = {d}"
        )));
    }
    Ok(())
}

pub(crate) fn require_positive(name: &str, x: f64) -> crate::Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(crate::Error::InvalidArgument(format!(
            "{name} must be positive and finite, got {x}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_is_inclusive_and_strict() {
        let t = Threshold::at_least(Variable::K, 3.0, "k >= 3");
        assert!(t.admits(3.0));
        assert!(!t.admits(3.0 - 1e-15 * 3.0));
        let i = Threshold::interval(Variable::T, Some(0.0), Some(0.25), "0 < t <= r^2");
        assert!(i.admits(0.25) && !i.admits(0.2500001));
    }

    #[test]
    fn nan_value_round_trips_as_null() {
        let r = BoundResult::new(
            "x",
            Bc::Dirichlet,
            Side::Upper,
            Functional::Average,
            f64::NAN,
            Some(1.0),
            Threshold::none(),
            &[Assumption::Any],
        );
        assert!(!r.applicable);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"value\":null"), "{s}");
        let back: BoundResult = serde_json::from_str(&s).unwrap();
        assert!(back.value.is_nan());
    }

    #[test]
    fn holds_respects_side() {
        let up = BoundResult::new(
            "u",
            Bc::Dirichlet,
            Side::Upper,
            Functional::Average,
            10.0,
            None,
            Threshold::none(),
            &[],
        );
        assert!(up.holds(10.0, 0.0) && !up.holds(10.1, 1e-9));
        assert_eq!(up.margin(4.0), 6.0);
    }
}
