//! Spectral functionals: Riesz means, averages, counting function, heat
//! trace and the Legendre conjugate of the first Riesz mean.

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, least_squares};
use crate::spectra::Spectrum;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_ur, ln_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpectralQuery {
    RieszMean { z: f64, sigma: f64 },
    Average { k: usize },
    Counting { lambda: f64 },
    Partition { t: f64 },
    Legendre { w: f64 },
}

impl SpectralQuery {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        match *self {
            SpectralQuery::RieszMean { z, sigma } => {
                if !(z >= 0.0 && z.is_finite()) || !(sigma > 0.0 && sigma.is_finite()) {
                    return bad(format!(
                        "Riesz mean needs z >= 0 and sigma > 0, got z = {z}, sigma = {sigma}"
                    ));
                }
            }
            SpectralQuery::Average { k: 0 } => return bad("average needs k >= 1".into()),
            SpectralQuery::Counting { lambda } if !lambda.is_finite() => {
                return bad(format!("counting needs a finite lambda, got {lambda}"))
            }
            SpectralQuery::Partition { t } if !(t > 0.0 && t.is_finite()) => {
                return bad(format!("partition needs t > 0, got {t}"))
            }
            SpectralQuery::Legendre { w } if !(w > 0.0 && w.is_finite()) => {
                return bad(format!("Legendre transform needs w > 0, got {w}"))
            }
            _ => {}
        }
        Ok(())
    }
}

/// Functional value plus a bound on what the finite spectrum leaves out.
/// Only the heat trace has a nonzero truncation; it is never added to `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: f64,
    pub truncation: f64,
}

pub fn evaluate(spectrum: &Spectrum, query: SpectralQuery) -> Result<f64> {
    Ok(evaluate_detailed(spectrum, query)?.value)
}

pub fn evaluate_detailed(spectrum: &Spectrum, query: SpectralQuery) -> Result<Evaluation> {
    query.validate()?;
    let exact = |value| Ok(Evaluation { value, truncation: 0.0 });
    match query {
        SpectralQuery::RieszMean { z, sigma } => exact(riesz_mean(spectrum, z, sigma)?),
        SpectralQuery::Average { k } => exact(average(spectrum, k)?),
        SpectralQuery::Counting { lambda } => exact(counting(spectrum, lambda)? as f64),
        SpectralQuery::Partition { t } => partition(spectrum, t),
        SpectralQuery::Legendre { w } => exact(legendre(spectrum, w)?),
    }
}

fn require_cutoff(spectrum: &Spectrum, z: f64, strict: bool, what: &str) -> Result<()> {
    let c = spectrum.cutoff();
    let ok = if strict { z < c } else { z <= c };
    if ok {
        Ok(())
    } else {
        Err(Error::IncompleteSpectrum(format!(
            "{what} at {z} needs every eigenvalue up to it; spectrum is complete only below {c}"
        )))
    }
}

/// R_σ(z) = Σ (z − λ_j)_+^σ.
pub fn riesz_mean(spectrum: &Spectrum, z: f64, sigma: f64) -> Result<f64> {
    require_cutoff(spectrum, z, false, "Riesz mean")?;
    Ok(compensated_sum(
        spectrum.values.iter().filter(|&&l| l < z).map(|&l| (z - l).powf(sigma)),
    ))
}

/// (1/k) Σ_{j≤k} λ_j.
pub fn average(spectrum: &Spectrum, k: usize) -> Result<f64> {
    Ok(partial_sum(spectrum, k)? / k as f64)
}

pub fn partial_sum(spectrum: &Spectrum, k: usize) -> Result<f64> {
    if k == 0 || k > spectrum.count() {
        return Err(Error::OutOfRange {
            k,
            available: spectrum.count(),
        });
    }
    Ok(compensated_sum(spectrum.values[..k].iter().copied()))
}

/// N(λ) = #{λ_j ≤ λ}.
pub fn counting(spectrum: &Spectrum, lambda: f64) -> Result<usize> {
    require_cutoff(spectrum, lambda, true, "counting function")?;
    Ok(spectrum.values.partition_point(|&v| v <= lambda))
}

/// Σ e^{−λ_j t} over the available values, with a Weyl-model tail bound.
pub fn partition(spectrum: &Spectrum, t: f64) -> Result<Evaluation> {
    let value = compensated_sum(spectrum.values.iter().map(|&l| (-l * t).exp()));
    Ok(Evaluation {
        value,
        truncation: weyl_tail(spectrum, t),
    })
}

/// Fit N(λ) ≈ c λ^γ to the top decile and integrate e^{−λt} dN beyond the
/// cutoff: c Γ(γ+1) t^{−γ} Q(γ, Λt).
fn weyl_tail(spectrum: &Spectrum, t: f64) -> f64 {
    let n = spectrum.count();
    let m = (n / 10).max(2).min(n);
    let pts: Vec<(f64, f64)> = spectrum.values[n - m..]
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0.0)
        .map(|(i, &l)| (l.ln(), ((n - m + i + 1) as f64).ln()))
        .collect();
    if pts.len() < 2 || pts.iter().all(|p| p.0 == pts[0].0) {
        return f64::INFINITY;
    }
    let a = DMatrix::from_fn(pts.len(), 2, |r, c| if c == 0 { 1.0 } else { pts[r].0 });
    let y = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let Ok(coef) = least_squares(&a, &y) else {
        return f64::INFINITY;
    };
    let (lnc, gamma) = (coef[0], coef[1]);
    if !(gamma > 0.0) {
        return f64::INFINITY;
    }
    let cut = spectrum.cutoff();
    let scale = (lnc - gamma * t.ln() + ln_gamma(gamma + 1.0)).exp();
    scale * gamma_ur(gamma, cut * t)
}

/// Legendre conjugate of R_1: (w − ⌊w⌋) λ_{⌊w⌋+1} + Σ_{j≤⌊w⌋} λ_j.
pub fn legendre(spectrum: &Spectrum, w: f64) -> Result<f64> {
    let fl = w.floor();
    let k = fl as usize;
    let frac = w - fl;
    let head = if k == 0 { 0.0 } else { partial_sum(spectrum, k)? };
    if frac == 0.0 {
        return Ok(head);
    }
    Ok(head + frac * spectrum.value(k + 1)?)
}

/// Largest gap between the closed-form conjugate and a direct supremum of
/// wz − R_1(z) over every eigenvalue corner plus a uniform z-grid.
pub fn legendre_identity_check(spectrum: &Spectrum, w_grid: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &w in w_grid {
        let closed = legendre(spectrum, w)?;
        let top = spectrum.values[((w.floor() as usize) + 1).min(spectrum.count()) - 1];
        let zmax = top.min(spectrum.cutoff());
        let r1 = |z: f64| compensated_sum(spectrum.values.iter().filter(|&&l| l < z).map(|&l| z - l));
        let mut best = f64::NEG_INFINITY;
        for &z in spectrum.values.iter().filter(|&&l| l <= zmax) {
            best = best.max(w * z - r1(z));
        }
        let steps = 2000;
        for i in 0..=steps {
            let z = zmax * i as f64 / steps as f64;
            best = best.max(w * z - r1(z));
        }
        worst = worst.max((best - closed).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::spectra::{analytic_spectrum, Bc, Source};
    use std::f64::consts::PI;

    fn square(bc: Bc, n: usize) -> Spectrum {
        analytic_spectrum(&Domain::unit_square(), bc, n).unwrap()
    }

    #[test]
    fn spec_examples() {
        let s = square(Bc::Dirichlet, 20);
        assert_eq!(evaluate(&s, SpectralQuery::Counting { lambda: 30.0 }).unwrap(), 1.0);
        let l = evaluate(&s, SpectralQuery::Legendre { w: 3.0 }).unwrap();
        assert!((l - 12.0 * PI * PI).abs() < 1e-12);
        assert_eq!(
            evaluate(&s, SpectralQuery::RieszMean { z: 0.0, sigma: 1.0 }).unwrap(),
            0.0
        );
    }

    #[test]
    fn legendre_examples() {
        let s = square(Bc::Dirichlet, 20);
        assert!(legendre_identity_check(&s, &[1.0, 2.5, 7.0]).unwrap() <= 1e-10);
        let single = Spectrum::exact(Bc::Dirichlet, vec![3.25], Source::User).unwrap();
        assert_eq!(legendre(&single, 1.0).unwrap(), 3.25);
        let n = square(Bc::Neumann, 10);
        assert_eq!(legendre(&n, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn average_and_partial_sums() {
        let s = square(Bc::Dirichlet, 3);
        assert!((average(&s, 3).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
        assert_eq!(average(&s, 4), Err(Error::OutOfRange { k: 4, available: 3 }));
    }

    #[test]
    fn incomplete_cutoffs_are_errors() {
        let s = square(Bc::Dirichlet, 5);
        let c = s.cutoff();
        assert!(matches!(
            riesz_mean(&s, c * 1.01, 1.0),
            Err(Error::IncompleteSpectrum(_))
        ));
        assert!(matches!(counting(&s, c), Err(Error::IncompleteSpectrum(_))));
        assert!(riesz_mean(&s, c, 1.0).is_ok());
    }

    #[test]
    fn riesz_derivative_is_counting() {
        let s = square(Bc::Dirichlet, 200);
        let zmax = 0.9 * s.cutoff();
        let dz = 1e-6;
        let mut prev = None;
        for i in 1..400 {
            let z = zmax * i as f64 / 400.0 + 0.123;
            if s.values.iter().any(|&l| (l - z).abs() < 10.0 * dz) {
                continue;
            }
            let r = riesz_mean(&s, z, 1.0).unwrap();
            let r2 = riesz_mean(&s, z + dz, 1.0).unwrap();
            let n = counting(&s, z).unwrap() as f64;
            assert!(((r2 - r) / dz - n).abs() < 1e-4 * n.max(1.0));
            if let Some((pz, pr)) = prev {
                assert!(r >= pr, "monotone at {z} after {pz}");
            }
            prev = Some((z, r));
        }
    }

    #[test]
    fn partition_tail_is_small_and_decreasing() {
        let s = square(Bc::Dirichlet, 500);
        let mut last = f64::INFINITY;
        for &t in &[0.001, 0.01, 0.1, 1.0] {
            let e = partition(&s, t).unwrap();
            assert!(e.value < last);
            last = e.value;
            assert!(e.truncation >= 0.0);
        }
        // The unit-square trace factors as θ(t)² with θ(t) = Σ_{m≥1} e^{−π²m²t}.
        let theta = |t: f64| (1..2000).map(|m| (-PI * PI * (m * m) as f64 * t).exp()).sum::<f64>();
        for &t in &[0.0002, 0.0005] {
            let e = partition(&s, t).unwrap();
            let exact = theta(t).powi(2);
            assert!(e.value < exact);
            let missing = exact - e.value;
            assert!(missing > 0.01 * exact, "tail should matter at t = {t}");
            assert!(
                (e.truncation - missing).abs() < 0.1 * missing,
                "{} vs {missing}",
                e.truncation
            );
        }
        assert!(partition(&s, 1.0).unwrap().truncation < 1e-100);
    }

    #[test]
    fn query_json() {
        let q: SpectralQuery = serde_json::from_str(r#"{"type":"riesz_mean","z":5.0,"sigma":1.0}"#).unwrap();
        assert_eq!(q, SpectralQuery::RieszMean { z: 5.0, sigma: 1.0 });
        assert!(SpectralQuery::Partition { t: 0.0 }.validate().is_err());
    }
}
