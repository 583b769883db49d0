//! Bessel functions of the first and second kind, and their zeros.
//!
//! J is evaluated by Miller's backward recurrence normalized with the
//! Neumann addition series; Y for integer order comes from the Neumann
//! series for Y₀, Y₁ followed by upward recurrence.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE: f64 = 1e250;

/// Which function's zeros to find.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroKind {
    J,
    /// Zeros of the derivative J'.
    JPrime,
}

/// J_{nu0 + n}(x) for n = 0..=nmax.
pub fn bessel_j_seq(nu0: f64, nmax: usize, x: f64) -> Vec<f64> {
    assert!(nu0 >= 0.0 && x >= 0.0);
    if x == 0.0 {
        let mut out = vec![0.0; nmax + 1];
        if nu0 == 0.0 {
            out[0] = 1.0;
        }
        return out;
    }
    // Start well above both the requested order and the turning point.
    let top = nmax as f64 + nu0;
    let start = (top.max(x) + 30.0 + 6.0 * x.max(1.0).cbrt() * 3.0).ceil() as usize;
    let mut start = start.max(nmax + 20);
    if start % 2 == 1 {
        start += 1;
    }
    let mut vals = vec![0.0f64; start + 2];
    vals[start + 1] = 0.0;
    vals[start] = 1e-300;
    for m in (1..=start).rev() {
        let nu = nu0 + m as f64;
        let next = 2.0 * nu / x * vals[m] - vals[m + 1];
        vals[m - 1] = next;
        if next.abs() > RESCALE {
            for v in vals[m - 1..].iter_mut() {
                *v /= RESCALE;
            }
        }
    }
    // Normalization: Σ_k w_k J_{ν+2k} = (x/2)^ν / Γ(ν+1).
    let mut sum = vals[0];
    let mut c = 1.0; // Π_{i=1}^{k-1}(ν+i) / k!
    let mut k = 1;
    while 2 * k <= start {
        if k > 1 {
            c *= (nu0 + k as f64 - 1.0) / k as f64;
        }
        sum += (nu0 + 2.0 * k as f64) * c * vals[2 * k];
        k += 1;
    }
    let log_rhs = if nu0 == 0.0 {
        0.0
    } else {
        nu0 * (0.5 * x).ln() - ln_gamma(nu0 + 1.0)
    };
    // Scale in log space to avoid overflow at large orders.
    let sign = sum.signum();
    let log_scale = log_rhs - sum.abs().ln();
    vals.truncate(nmax + 1);
    vals.iter()
        .map(|&v| {
            if v == 0.0 {
                0.0
            } else {
                sign * v.signum() * (v.abs().ln() + log_scale).exp()
            }
        })
        .collect()
}

pub fn bessel_j(nu: f64, x: f64) -> f64 {
    bessel_j_seq(nu, 0, x)[0]
}

/// J'_ν(x) = (ν/x)J_ν − J_{ν+1}.
pub fn bessel_j_prime(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 1.0 { 0.5 } else { 0.0 };
    }
    let s = bessel_j_seq(nu, 1, x);
    nu / x * s[0] - s[1]
}

/// Integer orders J_n(x), Y_n(x) for n = 0..=nmax, x > 0.
pub fn bessel_jy_int(nmax: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(x > 0.0);
    let top = nmax.max(2) + (2.0 * x) as usize + 40;
    let j = bessel_j_seq(0.0, top, x);
    let l = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k < top {
        let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sgn * j[2 * k] / k as f64;
        s1 += sgn * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = 2.0 / PI * (l * j[0] - 2.0 * s0);
    let y1 = 2.0 / PI * (-j[0] / x + l * j[1] + s1);
    let mut y = Vec::with_capacity(nmax + 1);
    y.push(y0);
    if nmax >= 1 {
        y.push(y1);
    }
    for n in 1..nmax {
        let next = 2.0 * n as f64 / x * y[n] - y[n - 1];
        y.push(next);
    }
    (j[..=nmax].to_vec(), y)
}

/// McMahon's large-zero estimate for the k-th zero.
pub fn mcmahon(nu: f64, k: usize, kind: ZeroKind) -> f64 {
    let m = 4.0 * nu * nu;
    match kind {
        ZeroKind::J => {
            let b = (k as f64 + 0.5 * nu - 0.25) * PI;
            b - (m - 1.0) / (8.0 * b) - 4.0 * (m - 1.0) * (7.0 * m - 31.0) / (3.0 * (8.0 * b).powi(3))
        }
        ZeroKind::JPrime => {
            let b = (k as f64 + 0.5 * nu - 0.75) * PI;
            b - (m + 3.0) / (8.0 * b) - 4.0 * (7.0 * m * m + 82.0 * m - 9.0) / (3.0 * (8.0 * b).powi(3))
        }
    }
}

fn zero_fn(nu: f64, kind: ZeroKind) -> impl Fn(f64) -> f64 {
    move |x| match kind {
        ZeroKind::J => bessel_j(nu, x),
        ZeroKind::JPrime => bessel_j_prime(nu, x),
    }
}

/// The k-th positive zero of J_ν or J'_ν (the trivial zero of J'_0 at the
/// origin is not counted).
pub fn bessel_zero(nu: f64, k: usize, kind: ZeroKind) -> Result<f64> {
    if !(nu >= 0.0) || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "bessel_zero needs nu >= 0 and k >= 1, got nu = {nu}, k = {k}"
        )));
    }
    let f = zero_fn(nu, kind);
    let step = 0.25;
    let mut a = nu.max(0.05);
    let mut fa = f(a);
    let limit = mcmahon(nu, k, kind).max(nu) + 10.0 * PI + 10.0;
    let mut found = 0;
    while a < limit {
        let b = a + step;
        let fb = f(b);
        if fa == 0.0 || fa.signum() != fb.signum() {
            found += 1;
            if found == k {
                return refine_zero(&f, a, b);
            }
        }
        a = b;
        fa = fb;
    }
    Err(Error::NoConvergence {
        what: "bessel_zero scan",
        achieved: a,
        wanted: limit,
    })
}

fn refine_zero(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    crate::numeric::bisect(f, a, b, 0.0)
}

/// All zeros of J_ν (or J'_ν) in (0, xmax], in increasing order.
pub fn bessel_zeros_below(nu: f64, xmax: f64, kind: ZeroKind) -> Result<Vec<f64>> {
    let f = zero_fn(nu, kind);
    let step = 0.25;
    let mut out = Vec::new();
    let mut a = nu.max(0.05);
    if a >= xmax {
        return Ok(out);
    }
    let mut fa = f(a);
    while a < xmax {
        let b = (a + step).min(xmax + step);
        let fb = f(b);
        if fa != 0.0 && fa.signum() != fb.signum() {
            let z = refine_zero(&f, a, b)?;
            if z <= xmax {
                out.push(z);
            }
        }
        a = b;
        fa = fb;
    }
    Ok(out)
}

/// λ₁ of the unit ball in ℝ^d and J_{d/2} at its square root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallEigen {
    pub lambda1_b: f64,
    pub j_at_sqrt: f64,
}

pub fn lambda1_ball(d: usize) -> Result<BallEigen> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("lambda1_ball needs d >= 2, got {d}")));
    }
    let nu = d as f64 / 2.0 - 1.0;
    let j = bessel_zero(nu, 1, ZeroKind::J)?;
    Ok(BallEigen {
        lambda1_b: j * j,
        j_at_sqrt: bessel_j(d as f64 / 2.0, j),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Power series oracle, fine for small x.
    fn j_series(nu: f64, x: f64) -> f64 {
        j_series_with_mass(nu, x).0
    }

    /// Series value and the sum of absolute terms, which bounds cancellation error.
    /// Terms follow by recurrence so only the leading one needs a gamma value.
    fn j_series_with_mass(nu: f64, x: f64) -> (f64, f64) {
        let q = 0.25 * x * x;
        let mut t = (nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)).exp();
        let mut sum = 0.0;
        let mut mass = 0.0;
        for m in 0..80 {
            sum += t;
            mass += t.abs();
            t *= -q / ((m as f64 + 1.0) * (m as f64 + 1.0 + nu));
        }
        (sum, mass)
    }

    #[test]
    fn matches_power_series() {
        for &nu in &[0.0, 0.5, 1.0, 1.5, 2.0, 3.7, 7.0] {
            for &x in &[0.1, 1.0, 2.5, 5.0, 9.0] {
                let a = bessel_j(nu, x);
                let (b, mass) = j_series_with_mass(nu, x);
                let tol = 1e-14 + 64.0 * f64::EPSILON * mass;
                assert!((a - b).abs() < tol, "nu={nu} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn half_integer_closed_forms() {
        for &x in &[0.3, 2.0, 10.0, 40.0, 85.0] {
            let j12 = (2.0 / (PI * x)).sqrt() * x.sin();
            let j32 = (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos());
            assert!((bessel_j(0.5, x) - j12).abs() < 1e-13, "x={x}");
            assert!((bessel_j(1.5, x) - j32).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn wronskian_identity() {
        // J_{n+1}Y_n − J_nY_{n+1} = 2/(πx)
        for &x in &[0.5, 3.0, 17.0, 60.0, 110.0] {
            let (j, y) = bessel_jy_int(40, x);
            for n in 0..39 {
                let w = j[n + 1] * y[n] - j[n] * y[n + 1];
                let want = 2.0 / (PI * x);
                assert!(
                    (w - want).abs() < 1e-10 * want.max(1e-3) + 1e-13,
                    "n={n} x={x}: {w} vs {want}"
                );
            }
        }
    }

    #[test]
    fn y_known_values() {
        let (_, y) = bessel_jy_int(2, 1.0);
        assert!((y[0] - 0.088_256_964_215_676_96).abs() < 1e-14);
        assert!((y[1] + 0.781_212_821_300_288_7).abs() < 1e-14);
    }

    #[test]
    fn first_zeros() {
        // Bisection on the independent power series as oracle.
        let oracle = crate::numeric::bisect(|x| j_series(0.0, x), 2.0, 3.0, 0.0).unwrap();
        let z = bessel_zero(0.0, 1, ZeroKind::J).unwrap();
        assert!((z - oracle).abs() < 1e-12);
        assert!((z - 2.404825557695773).abs() < 1e-12);
        let dp = |x: f64| j_series(1.0, x) / x - j_series(2.0, x);
        let oracle = crate::numeric::bisect(dp, 1.5, 2.2, 0.0).unwrap();
        let z = bessel_zero(1.0, 1, ZeroKind::JPrime).unwrap();
        assert!((z - oracle).abs() < 1e-12);
        assert!((z - 1.8411837813406593).abs() < 1e-12);
        assert!((bessel_zero(0.5, 1, ZeroKind::J).unwrap() - PI).abs() < 1e-12);
        assert!((bessel_zero(0.5, 3, ZeroKind::J).unwrap() - 3.0 * PI).abs() < 1e-11);
    }

    #[test]
    fn interlacing() {
        for nu in 0..=5 {
            for k in 1..=5 {
                let a = bessel_zero(nu as f64, k, ZeroKind::J).unwrap();
                let b = bessel_zero(nu as f64 + 1.0, k, ZeroKind::J).unwrap();
                let c = bessel_zero(nu as f64, k + 1, ZeroKind::J).unwrap();
                assert!(a < b && b < c, "nu={nu} k={k}");
            }
        }
    }

    #[test]
    fn mcmahon_is_close_for_large_k() {
        let z = bessel_zero(2.0, 20, ZeroKind::J).unwrap();
        assert!((z - mcmahon(2.0, 20, ZeroKind::J)).abs() < 1e-6);
    }

    #[test]
    fn ball_values() {
        let b2 = lambda1_ball(2).unwrap();
        assert!((b2.lambda1_b - 5.783185962946784).abs() < 1e-10);
        assert!((b2.j_at_sqrt - j_series(1.0, b2.lambda1_b.sqrt())).abs() < 1e-12);
        assert!((b2.j_at_sqrt - 0.519147).abs() < 1e-6);
        assert!(bessel_j(0.0, b2.lambda1_b.sqrt()).abs() < 1e-10);
        let b3 = lambda1_ball(3).unwrap();
        assert!((b3.lambda1_b - PI * PI).abs() < 1e-10);
        // J_{3/2}(π) = √(2/π)/√π·(0 + 1) = √2/π
        assert!((b3.j_at_sqrt - 2f64.sqrt() / PI).abs() < 1e-12);
        assert!(lambda1_ball(1).is_err());
    }
}
