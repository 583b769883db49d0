//! The averaged variational principle on ℝⁿ with a finite weighted frame.
//!
//! For a symmetric positive semidefinite A with eigenpairs (λ_j, u_j) and a
//! family f_ξ with Σ_ξ μ(ξ) |⟨φ, f_ξ⟩|² = C‖φ‖², the checks are
//!
//!   Σ_{j≤k} (λ_{k+1} − λ_j) Σ_ξ μ(ξ)|⟨f_ξ, u_j⟩|² ≥ Σ_ξ μ(ξ)(λ_{k+1}‖f_ξ‖² − ⟨A f_ξ, f_ξ⟩)_+
//!
//! and R₁(z) ≥ (1/C) Σ_ξ μ(ξ)(z‖f_ξ‖² − ⟨A f_ξ, f_ξ⟩)_+ for z ∈ [λ_k, λ_{k+1}].

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

const TIGHT_TOL: f64 = 1e-10;
const CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct TightFrameFamily {
    pub vectors: Vec<DVector<f64>>,
    pub weights: Vec<f64>,
    pub constant: f64,
}

impl TightFrameFamily {
    /// Validates tightness on the standard basis: Σ μ f fᵀ must equal C·I.
    pub fn new(vectors: Vec<DVector<f64>>, weights: Vec<f64>) -> Result<Self> {
        if vectors.is_empty() || vectors.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} vectors with {} weights",
                vectors.len(),
                weights.len()
            )));
        }
        let n = vectors[0].len();
        if n == 0 || vectors.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidArgument(
                "frame vectors must share a nonzero dimension".into(),
            ));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument("frame weights must be positive".into()));
        }
        let mut s = DMatrix::zeros(n, n);
        for (f, w) in vectors.iter().zip(&weights) {
            s += *w * f * f.transpose();
        }
        let c = s.trace() / n as f64;
        let dev = (&s - DMatrix::identity(n, n) * c).abs().max();
        if !(c > 0.0) || dev > TIGHT_TOL * c.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "frame is not tight: deviation {dev:e} from {c}·I"
            )));
        }
        Ok(TightFrameFamily {
            vectors,
            weights,
            constant: c,
        })
    }

    pub fn standard_basis(n: usize) -> Self {
        let vectors = (0..n)
            .map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        TightFrameFamily {
            vectors,
            weights: vec![1.0; n],
            constant: 1.0,
        }
    }

    /// m Gaussian vectors with weights in [0.5, 2], rotated into a tight frame
    /// by F = G (Gᵀ W G)^{−1/2}, then rescaled so that C is random as well.
    pub fn random(n: usize, m: usize, seed: u64) -> Result<Self> {
        if m < n {
            return Err(Error::InvalidArgument(format!("need at least {n} vectors, got {m}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let weights: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..2.0)).collect();
        let w = DMatrix::from_diagonal(&DVector::from_vec(weights.clone()));
        let s = g.transpose() * &w * &g;
        let eig = SymmetricEigen::new(s);
        if eig.eigenvalues.min() <= 0.0 {
            return Err(Error::InvalidArgument("degenerate random frame".into()));
        }
        let inv_sqrt = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt()))
            * eig.eigenvectors.transpose();
        let scale: f64 = rng.gen_range(0.5..3.0);
        let f = g * inv_sqrt * scale.sqrt();
        let vectors = (0..m).map(|i| f.row(i).transpose()).collect();
        Self::new(vectors, weights)
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszSample {
    pub z: f64,
    /// R₁(z)
    pub lhs: f64,
    /// (1/C) Σ μ (z‖f‖² − Q(f))_+
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvpCheck {
    pub k: usize,
    pub eigenvalues: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub riesz: Vec<RieszSample>,
    pub pass: bool,
}

/// Symmetric positive semidefinite BᵀB/n with Gaussian B.
pub fn random_psd(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    b.transpose() * b / n as f64
}

/// Both inequalities for a given matrix, with μ₀ the restriction of μ to the
/// set where the integrand is positive.
pub fn avp_check_matrix(a: &DMatrix<f64>, k: usize, frame: &TightFrameFamily, zs: &[f64]) -> Result<AvpCheck> {
    let n = a.nrows();
    if a.ncols() != n || frame.dim() != n {
        return Err(Error::InvalidArgument(format!(
            "matrix is {}x{}, frame dimension {}",
            a.nrows(),
            a.ncols(),
            frame.dim()
        )));
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!("need 1 <= k < n, got k = {k}, n = {n}")));
    }
    if (a - a.transpose()).abs().max() > 1e-12 * a.abs().max().max(1.0) {
        return Err(Error::InvalidArgument("matrix is not symmetric".into()));
    }
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let lam: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let u: Vec<DVector<f64>> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    let next = lam[k];

    let quad: Vec<(f64, f64)> = frame
        .vectors
        .iter()
        .map(|f| (f.norm_squared(), f.dot(&(a * f))))
        .collect();
    let mut lhs = 0.0;
    for j in 0..k {
        let mass: f64 = frame
            .vectors
            .iter()
            .zip(&frame.weights)
            .map(|(f, w)| w * f.dot(&u[j]).powi(2))
            .sum();
        lhs += (next - lam[j]) * mass;
    }
    let positive_part = |z: f64| -> f64 {
        quad.iter()
            .zip(&frame.weights)
            .map(|(&(nf, q), w)| w * (z * nf - q).max(0.0))
            .sum()
    };
    let rhs = positive_part(next);
    let scale = lam.iter().fold(1.0f64, |m, l| m.max(l.abs())) * frame.constant * n as f64;
    let mut pass = lhs >= rhs - CHECK_TOL * scale;
    let mut riesz = Vec::new();
    for &z in zs {
        let r1: f64 = lam.iter().map(|l| (z - l).max(0.0)).sum();
        let rr = positive_part(z) / frame.constant;
        pass &= r1 >= rr - CHECK_TOL * scale;
        riesz.push(RieszSample { z, lhs: r1, rhs: rr });
    }
    Ok(AvpCheck {
        k,
        eigenvalues: lam,
        lhs,
        rhs,
        riesz,
        pass,
    })
}

/// Seeded instance: random PSD matrix of size n, with z sampled at both ends
/// of [λ_k, λ_{k+1}] and at three interior points.
pub fn avp_finite_check(seed: u64, n: usize, k: usize, frame: &TightFrameFamily) -> Result<AvpCheck> {
    if n == 0 || k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!("need 1 <= k < n, got k = {k}, n = {n}")));
    }
    let a = random_psd(n, seed);
    let mut lam: Vec<f64> = SymmetricEigen::new(a.clone()).eigenvalues.iter().copied().collect();
    lam.sort_by(f64::total_cmp);
    let (lo, hi) = (lam[k - 1], lam[k]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut zs = vec![lo, hi];
    zs.extend((0..3).map(|_| lo + (hi - lo) * rng.gen::<f64>()));
    avp_check_matrix(&a, k, frame, &zs)
}
