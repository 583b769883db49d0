//! Sparse symmetric generalized eigenproblems K x = λ M x.
//!
//! Shift-invert subspace iteration with Rayleigh–Ritz projection. Linear
//! solves go through an envelope (skyline) Cholesky factor after a reverse
//! Cuthill–McKee reordering.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, VecDeque};

/// Symmetric matrix in compressed-row form, both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSym {
    /// Duplicates are summed. Entries must already be symmetric.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidArgument(format!("entry ({i}, {j}) outside {n}x{n}")));
            }
            *rows[i].entry(j).or_default() += v;
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in rows {
            for (j, v) in r {
                cols.push(j);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        let m = SparseSym { n, row_ptr, cols, vals };
        for i in 0..n {
            for (j, v) in m.row(i) {
                let t = m.get(j, i);
                if (t - v).abs() > 1e-12 * (v.abs() + t.abs()).max(f64::MIN_POSITIVE) {
                    return Err(Error::InvalidArgument(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(p) => self.vals[r.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut y = DMatrix::zeros(self.n, x.ncols());
        for c in 0..x.ncols() {
            for i in 0..self.n {
                y[(i, c)] = self.row(i).map(|(j, v)| v * x[(j, c)]).sum();
            }
        }
        y
    }

    /// self + s·other.
    pub fn add_scaled(&self, other: &SparseSym, s: f64) -> Result<SparseSym> {
        if self.n != other.n {
            return Err(Error::InvalidArgument("dimension mismatch".into()));
        }
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            t.extend(self.row(i).map(|(j, v)| (i, j, v)));
            t.extend(other.row(i).map(|(j, v)| (i, j, s * v)));
        }
        SparseSym::from_triplets(self.n, &t)
    }

    /// Reverse Cuthill–McKee ordering: `perm[new] = old`.
    pub fn rcm_order(&self) -> Vec<usize> {
        let n = self.n;
        let deg: Vec<usize> = (0..n).map(|i| self.row(i).filter(|&(j, _)| j != i).count()).collect();
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let bfs_last = |start: usize, seen: &[bool]| -> usize {
            let mut mark = seen.to_vec();
            let mut q = VecDeque::from([start]);
            mark[start] = true;
            let mut last = start;
            while let Some(u) = q.pop_front() {
                last = u;
                for (v, _) in self.row(u) {
                    if !mark[v] {
                        mark[v] = true;
                        q.push_back(v);
                    }
                }
            }
            last
        };
        while order.len() < n {
            let seed = (0..n).filter(|&i| !seen[i]).min_by_key(|&i| deg[i]).unwrap();
            // Two sweeps give a pseudo-peripheral start.
            let start = bfs_last(bfs_last(seed, &seen), &seen);
            let mut q = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = q.pop_front() {
                order.push(u);
                let mut nb: Vec<usize> = self.row(u).map(|(v, _)| v).filter(|&v| !seen[v]).collect();
                nb.sort_by_key(|&v| deg[v]);
                for v in nb {
                    seen[v] = true;
                    q.push_back(v);
                }
            }
        }
        order.reverse();
        order
    }
}

/// Envelope Cholesky factor L Lᵀ = P A Pᵀ.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl SkylineCholesky {
    pub fn factor(a: &SparseSym) -> Result<Self> {
        let n = a.dim();
        let perm = a.rcm_order();
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new, &old) in perm.iter().enumerate() {
            for (j, _) in a.row(old) {
                first[new] = first[new].min(inv[j]);
            }
        }
        let mut rows: Vec<Vec<f64>> = (0..n).map(|i| vec![0.0; i - first[i] + 1]).collect();
        for (new, &old) in perm.iter().enumerate() {
            for (j, v) in a.row(old) {
                let c = inv[j];
                if c <= new {
                    rows[new][c - first[new]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut s = rows[i][j - fi];
                for k in lo..j {
                    s -= rows[i][k - fi] * rows[j][k - fj];
                }
                rows[i][j - fi] = s / rows[j][j - fj];
            }
            let mut d = rows[i][i - fi];
            for k in fi..i {
                d -= rows[i][k - fi].powi(2);
            }
            if !(d > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "matrix not positive definite (pivot {d:e} at row {i})"
                )));
            }
            rows[i][i - fi] = d.sqrt();
        }
        Ok(SkylineCholesky { perm, first, rows })
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let mut s = y[i];
            for k in fi..i {
                s -= self.rows[i][k - fi] * y[k];
            }
            y[i] = s / self.rows[i][i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            y[i] /= self.rows[i][i - fi];
            let yi = y[i];
            for k in fi..i {
                y[k] -= self.rows[i][k - fi] * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }

    pub fn envelope_size(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub count: usize,
    /// Shift σ; K − σM must be positive definite.
    pub shift: f64,
    /// Relative residual target.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl EigenOptions {
    pub fn new(count: usize) -> Self {
        EigenOptions {
            count,
            shift: 0.0,
            tol: 1e-9,
            max_iter: 500,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub values: Vec<f64>,
    /// M-orthonormal eigenvectors, one per column.
    pub vectors: DMatrix<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Projected generalized problem: returns sorted eigenvalues and M-orthonormal
/// coefficient vectors.
fn rayleigh_ritz(kp: DMatrix<f64>, mp: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let mp = (&mp + mp.transpose()) * 0.5;
    let kp = (&kp + kp.transpose()) * 0.5;
    let chol = mp
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("projected mass matrix is singular".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("projected mass matrix is singular".into()))?;
    let c = &linv * kp * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let v = DMatrix::from_fn(idx.len(), idx.len(), |r, c| eig.eigenvectors[(r, idx[c])]);
    Ok((vals, linv.transpose() * v))
}

/// Lowest `opts.count` eigenpairs of K x = λ M x (M positive definite).
pub fn lowest_eigenpairs(k: &SparseSym, m: &SparseSym, opts: EigenOptions) -> Result<EigenSolution> {
    let n = k.dim();
    if m.dim() != n {
        return Err(Error::InvalidArgument("K and M differ in size".into()));
    }
    if opts.count == 0 || opts.count > n {
        return Err(Error::InvalidArgument(format!(
            "requested {} eigenpairs from a problem of size {n}",
            opts.count
        )));
    }
    let p = (2 * opts.count).max(opts.count + 8).min(n);
    let shifted = k.add_scaled(m, -opts.shift)?;
    let fact = SkylineCholesky::factor(&shifted)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x = DMatrix::from_fn(n, p, |_, _| rng.gen::<f64>() - 0.5);
    let mut residuals = vec![f64::INFINITY; opts.count];
    for it in 1..=opts.max_iter {
        let mx = m.mul_dense(&x);
        let mut y = DMatrix::zeros(n, p);
        for c in 0..p {
            let col: Vec<f64> = mx.column(c).iter().copied().collect();
            y.set_column(c, &DVector::from_vec(fact.solve(&col)));
        }
        let ky = k.mul_dense(&y);
        let my = m.mul_dense(&y);
        let (vals, q) = rayleigh_ritz(y.transpose() * &ky, y.transpose() * &my)?;
        x = &y * &q;
        let kx = &ky * &q;
        let mxn = &my * &q;
        let mut worst: f64 = 0.0;
        for c in 0..opts.count {
            let r = kx.column(c) - mxn.column(c) * vals[c];
            let denom = (vals[c] - opts.shift).abs() * mxn.column(c).norm();
            residuals[c] = r.norm() / denom.max(f64::MIN_POSITIVE);
            worst = worst.max(residuals[c]);
        }
        if worst <= opts.tol {
            return Ok(EigenSolution {
                values: vals[..opts.count].to_vec(),
                vectors: x.columns(0, opts.count).into_owned(),
                residuals,
                iterations: it,
            });
        }
    }
    Err(Error::NoConvergence {
        what: "subspace iteration",
        achieved: residuals.iter().cloned().fold(0.0, f64::max),
        wanted: opts.tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// 1D second-difference matrix on n interior points of (0, 1).
    fn laplace_1d(n: usize) -> SparseSym {
        let h = 1.0 / (n + 1) as f64;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 / (h * h)));
            if i + 1 < n {
                t.push((i, i + 1, -1.0 / (h * h)));
                t.push((i + 1, i, -1.0 / (h * h)));
            }
        }
        SparseSym::from_triplets(n, &t).unwrap()
    }

    fn identity(n: usize) -> SparseSym {
        SparseSym::from_triplets(n, &(0..n).map(|i| (i, i, 1.0)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn cholesky_solves_against_dense() {
        // Random sparse SPD matrix: graph Laplacian plus identity.
        let n = 60;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut t: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, i, 1.0)).collect();
        for _ in 0..150 {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i != j {
                let w: f64 = rng.gen_range(0.1..2.0);
                t.extend([(i, i, w), (j, j, w), (i, j, -w), (j, i, -w)]);
            }
        }
        let a = SparseSym::from_triplets(n, &t).unwrap();
        let dense = DMatrix::from_fn(n, n, |i, j| a.get(i, j));
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = SkylineCholesky::factor(&a).unwrap().solve(&b);
        let oracle = dense.cholesky().unwrap().solve(&DVector::from_vec(b));
        for i in 0..n {
            assert!((x[i] - oracle[i]).abs() < 1e-10 * (1.0 + oracle[i].abs()));
        }
    }

    #[test]
    fn rcm_is_a_permutation_and_reduces_envelope() {
        // 2D grid numbered column-major with a scrambled labelling.
        let m = 15;
        let n = m * m;
        let label = |i: usize| (i * 97) % n;
        let mut t = Vec::new();
        for r in 0..m {
            for c in 0..m {
                let u = label(r * m + c);
                t.push((u, u, 4.0));
                for (dr, dc) in [(0, 1), (1, 0)] {
                    if r + dr < m && c + dc < m {
                        let v = label((r + dr) * m + c + dc);
                        t.extend([(u, v, -1.0), (v, u, -1.0)]);
                    }
                }
            }
        }
        let a = SparseSym::from_triplets(n, &t).unwrap();
        let mut p = a.rcm_order();
        p.sort();
        assert_eq!(p, (0..n).collect::<Vec<_>>());
        let f = SkylineCholesky::factor(&a).unwrap();
        assert!(f.envelope_size() < n * 3 * m, "envelope {}", f.envelope_size());
    }

    #[test]
    fn second_difference_eigenvalues() {
        let n = 200;
        let h = 1.0 / (n + 1) as f64;
        let sol = lowest_eigenpairs(&laplace_1d(n), &identity(n), EigenOptions::new(6)).unwrap();
        for (j, v) in sol.values.iter().enumerate() {
            let exact = 4.0 / (h * h) * (((j + 1) as f64) * PI * h / 2.0).sin().powi(2);
            assert!((v - exact).abs() < 1e-8 * exact, "{j}: {v} vs {exact}");
        }
    }

    #[test]
    fn shifted_singular_problem() {
        // Path-graph Laplacian has a zero eigenvalue; a negative shift handles it.
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n - 1 {
            t.extend([(i, i, 1.0), (i + 1, i + 1, 1.0), (i, i + 1, -1.0), (i + 1, i, -1.0)]);
        }
        let l = SparseSym::from_triplets(n, &t).unwrap();
        let mut o = EigenOptions::new(4);
        o.shift = -1.0;
        let sol = lowest_eigenpairs(&l, &identity(n), o).unwrap();
        for (j, v) in sol.values.iter().enumerate() {
            let exact = 4.0 * (j as f64 * PI / (2.0 * n as f64)).sin().powi(2);
            assert!((v - exact).abs() < 1e-9, "{j}: {v} vs {exact}");
        }
    }

    #[test]
    fn rejects_asymmetric_and_oversized() {
        assert!(SparseSym::from_triplets(2, &[(0, 1, 1.0)]).is_err());
        let a = identity(3);
        assert!(lowest_eigenpairs(&a, &a, EigenOptions::new(4)).is_err());
    }
}
