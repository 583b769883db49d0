//! P1 finite-element spectra on polygons with Richardson extrapolation over
//! uniformly refined meshes.

use super::eigen::{lowest_eigenpairs, EigenOptions, SparseSym};
use super::mesh::{Mesh, MeshOptions};
use super::{Bc, Source, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::Polygon;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FemOptions {
    /// Edge length of the coarsest mesh; `None` picks diameter/8.
    pub target_h: Option<f64>,
    /// Number of uniform refinements after the coarsest mesh.
    pub refinements: usize,
    pub seed: u64,
}

impl Default for FemOptions {
    fn default() -> Self {
        FemOptions {
            target_h: None,
            refinements: 3,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FemLevel {
    pub h: f64,
    pub dofs: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FemReport {
    pub spectrum: Spectrum,
    pub levels: Vec<FemLevel>,
    /// Observed convergence order per eigenvalue (2.0 when not estimable).
    pub orders: Vec<f64>,
    pub min_angle_deg: f64,
}

/// Stiffness and mass matrices restricted to the free nodes.
fn assemble(mesh: &Mesh, bc: Bc) -> Result<(SparseSym, SparseSym)> {
    let mut dof = vec![usize::MAX; mesh.nodes.len()];
    let mut n = 0;
    for (i, &b) in mesh.on_boundary.iter().enumerate() {
        if bc == Bc::Neumann || !b {
            dof[i] = n;
            n += 1;
        }
    }
    let mut kt = Vec::with_capacity(9 * mesh.triangles.len());
    let mut mt = Vec::with_capacity(9 * mesh.triangles.len());
    for t in &mesh.triangles {
        let p = [mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]];
        let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
        let b: Vec<f64> = (0..3).map(|i| p[(i + 1) % 3][1] - p[(i + 2) % 3][1]).collect();
        let c: Vec<f64> = (0..3).map(|i| p[(i + 2) % 3][0] - p[(i + 1) % 3][0]).collect();
        for i in 0..3 {
            let di = dof[t[i]];
            if di == usize::MAX {
                continue;
            }
            for j in 0..3 {
                let dj = dof[t[j]];
                if dj == usize::MAX {
                    continue;
                }
                kt.push((di, dj, (b[i] * b[j] + c[i] * c[j]) / (4.0 * area)));
                let m = if i == j { area / 6.0 } else { area / 12.0 };
                mt.push((di, dj, m));
            }
        }
    }
    if n == 0 {
        return Err(Error::Mesh("mesh has no free nodes".into()));
    }
    Ok((SparseSym::from_triplets(n, &kt)?, SparseSym::from_triplets(n, &mt)?))
}

fn free_dofs(mesh: &Mesh, bc: Bc) -> usize {
    match bc {
        Bc::Neumann => mesh.nodes.len(),
        Bc::Dirichlet => mesh.on_boundary.iter().filter(|b| !**b).count(),
    }
}

/// Lowest `count` eigenvalues of the Laplacian on `polygon`.
pub fn fem_spectrum(polygon: &Polygon, bc: Bc, count: usize, opts: FemOptions) -> Result<FemReport> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    if opts.refinements == 0 {
        return Err(Error::InvalidArgument(
            "extrapolation needs at least two mesh levels (refinements >= 1)".into(),
        ));
    }
    let mut h = opts.target_h.unwrap_or(polygon.diameter_scale() / 8.0);
    // The coarsest level must resolve the requested modes.
    let needed = (2 * count).max(count + 8);
    let mut mesh = Mesh::build(polygon, MeshOptions::new(h))?;
    while free_dofs(&mesh, bc) < 2 * needed {
        h *= 0.7;
        mesh = Mesh::build(polygon, MeshOptions::new(h))?;
    }
    let min_angle = mesh.min_angle_deg();
    let shift = match bc {
        Bc::Dirichlet => 0.0,
        Bc::Neumann => -1.0,
    };
    let mut levels = Vec::new();
    for level in 0..=opts.refinements {
        if level > 0 {
            mesh = mesh.refine_uniform();
        }
        let (k, m) = assemble(&mesh, bc)?;
        let mut eo = EigenOptions::new(count);
        eo.shift = shift;
        eo.seed = opts.seed;
        let sol = lowest_eigenpairs(&k, &m, eo)?;
        levels.push(FemLevel {
            h: mesh.max_edge(),
            dofs: k.dim(),
            values: sol.values,
        });
    }
    let nl = levels.len();
    let mut pairs = Vec::with_capacity(count);
    let mut orders = Vec::with_capacity(count);
    for j in 0..count {
        let fine = levels[nl - 1].values[j];
        let prev = levels[nl - 2].values[j];
        let mut p = 2.0;
        if nl >= 3 {
            let a = levels[nl - 3].values[j] - prev;
            let b = prev - fine;
            if a != 0.0 && b != 0.0 && a / b > 0.0 {
                let est = (a / b).log2();
                if (1.0..=4.0).contains(&est) {
                    p = est;
                }
            }
        }
        let corr = (fine - prev) / (2f64.powf(p) - 1.0);
        let mut value = fine + corr;
        let mut err = corr.abs();
        if bc == Bc::Neumann && j == 0 {
            // Connected domain: the constant mode is exact.
            let tol = 1e-6 * levels[nl - 1].values.get(1).copied().unwrap_or(1.0).abs().max(1.0);
            if fine.abs() < tol {
                value = 0.0;
                err = fine.abs();
            }
        }
        pairs.push((value, err));
        orders.push(p);
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (values, errors): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let spectrum = Spectrum::new(bc, values, errors, Source::Fem)?;
    Ok(FemReport {
        spectrum,
        levels,
        orders,
        min_angle_deg: min_angle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::spectra::analytic_spectrum;
    use std::f64::consts::PI;

    fn square() -> Polygon {
        Domain::unit_square().as_polygon().unwrap()
    }

    #[test]
    fn square_dirichlet_first() {
        let opts = FemOptions {
            refinements: 2,
            ..Default::default()
        };
        let r = fem_spectrum(&square(), Bc::Dirichlet, 1, opts).unwrap();
        let exact = 2.0 * PI * PI;
        assert!((r.spectrum.values[0] - exact).abs() < 5e-3 * exact);
        for l in &r.levels {
            assert!(l.values[0] >= exact);
        }
    }

    #[test]
    fn square_neumann_four() {
        let r = fem_spectrum(&square(), Bc::Neumann, 4, FemOptions::default()).unwrap();
        let p2 = PI * PI;
        let want = [0.0, p2, p2, 2.0 * p2];
        assert_eq!(r.spectrum.values[0], 0.0);
        for (v, w) in r.spectrum.values.iter().zip(want).skip(1) {
            assert!((v - w).abs() < 5e-3 * w, "{v} vs {w}");
        }
    }

    #[test]
    fn square_first_ten_against_analytic() {
        let r = fem_spectrum(&square(), Bc::Dirichlet, 10, FemOptions::default()).unwrap();
        let a = analytic_spectrum(&Domain::unit_square(), Bc::Dirichlet, 10).unwrap();
        for (j, (v, w)) in r.spectrum.values.iter().zip(&a.values).enumerate() {
            assert!((v - w).abs() < 5e-3 * w, "{j}: {v} vs {w}");
            assert!(r.levels.last().unwrap().values[j] >= *w);
        }
    }

    #[test]
    fn l_shape_self_convergence() {
        let l = Polygon::new(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ])
        .unwrap();
        let r = fem_spectrum(&l, Bc::Dirichlet, 1, FemOptions::default()).unwrap();
        let v = r.spectrum.values[0];
        let e = r.spectrum.error_bounds[0];
        // Successive levels decrease monotonically toward the extrapolated value.
        let raw: Vec<f64> = r.levels.iter().map(|l| l.values[0]).collect();
        assert!(raw.windows(2).all(|w| w[1] < w[0]));
        assert!(v < *raw.last().unwrap());
        assert!(e < 1e-2 * v, "error bar {e}");
        assert!((v - 9.6397).abs() < 1e-2 * 9.6397, "{v}");
    }

    #[test]
    fn scaling_within_error_bars() {
        let a = fem_spectrum(&square(), Bc::Dirichlet, 3, FemOptions::default()).unwrap();
        let big = square().scaled(3.0);
        let b = fem_spectrum(&big, Bc::Dirichlet, 3, FemOptions::default()).unwrap();
        for j in 0..3 {
            let x = a.spectrum.values[j] / 9.0;
            let y = b.spectrum.values[j];
            assert!((x - y).abs() <= 1e-8 * x + a.spectrum.error_bounds[j] / 9.0 + b.spectrum.error_bounds[j]);
        }
    }

    #[test]
    fn needs_two_levels() {
        let opts = FemOptions {
            refinements: 0,
            ..Default::default()
        };
        assert!(fem_spectrum(&square(), Bc::Dirichlet, 1, opts).is_err());
    }
}
