//! Small numerical helpers shared across modules.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Neumaier-compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = KahanSum::new();
    for x in it {
        s.add(x);
    }
    s.value()
}

/// Volume of the unit ball in R^d, by the two-step recursion.
pub fn unit_ball_volume(d: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let (mut w, start) = if d.is_multiple_of(2) { (1.0, 2) } else { (2.0, 3) };
    let mut n = start;
    while n <= d {
        w *= 2.0 * pi / n as f64;
        n += 2;
    }
    w
}

/// `n` log-spaced points on [a, b], endpoints included.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Log-spaced integers on [a, b], deduplicated.
pub fn logspace_int(a: usize, b: usize, n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = logspace(a as f64, b as f64, n)
        .into_iter()
        .map(|x| x.round() as usize)
        .collect();
    out.dedup();
    out
}

/// Bisection for a sign change of `f` on [a, b]; returns the midpoint once
/// the bracket is below `xtol` (absolute).
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidArgument(format!("no sign change on [{a}, {b}]")));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a) <= xtol || m <= a || m >= b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Least-squares solution of `A c = y` through a QR-backed SVD solve.
pub fn least_squares(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    if a.nrows() < a.ncols() {
        return Err(Error::InvalidArgument(format!(
            "least squares needs at least {} rows, got {}",
            a.ncols(),
            a.nrows()
        )));
    }
    let svd = a.clone().svd(true, true);
    svd.solve(y, 1e-14)
        .map_err(|e| Error::InvalidArgument(format!("least squares failed: {e}")))
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Relative closeness with an absolute floor of 1.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        // Gamma-function form as oracle.
        for d in 1..30 {
            let g = statrs::function::gamma::gamma(1.0 + d as f64 / 2.0);
            let w = PI.powf(d as f64 / 2.0) / g;
            assert!((unit_ball_volume(d) - w).abs() <= 1e-12 * w, "d = {d}");
        }
    }

    #[test]
    fn compensated_beats_naive() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
    }

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn logspace_endpoints() {
        let g = logspace(1.0, 100.0, 3);
        assert_eq!(g[0], 1.0);
        assert!((g[1] - 10.0).abs() < 1e-12);
        assert_eq!(g[2], 100.0);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(2, 2), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
    }

    #[test]
    fn lsq_exact_line() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 4.0, 3.0, 9.0]);
        let y = DVector::from_vec(vec![3.0, 10.0, 21.0]);
        let c = least_squares(&a, &y).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 2.0).abs() < 1e-12);
    }
}
