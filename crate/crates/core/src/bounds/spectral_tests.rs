//! Bounds checked against closed-form spectra.

use super::*;
use crate::geometry::{summarize, tube_volume, Domain, GeometricSummary};
use crate::riesz::{average, partition, riesz_mean};
use crate::spectra::{analytic_spectrum, Bc, Spectrum};
use std::f64::consts::PI;

const SLACK: f64 = 1e-9;

fn setup(domain: &Domain, bc: Bc, n: usize) -> (GeometricSummary, Spectrum) {
    (summarize(domain).unwrap(), analytic_spectrum(domain, bc, n).unwrap())
}

fn tube_fn(domain: &Domain) -> impl Fn(f64) -> crate::Result<f64> + '_ {
    move |h| tube_volume(domain, h, 42).map(|t| t.value)
}

fn square_phi(h: f64) -> TestFunctionNorms {
    let tube = 1.0 - (1.0 - 2.0 * h).powi(2);
    phi_h_norms(PhiProfile::Linear, h, 1.0, tube).unwrap()
}

#[test]
fn avp_square_average_example() {
    let n = square_phi(0.1);
    assert!((n.l2_sq - 0.64).abs() < 1e-12 && (n.grad_l2_sq - 36.0).abs() < 1e-9);
    let r = dirichlet_avp(&n, 1.0, 2, Query::Average { k: 1 }).unwrap();
    let want = 36.0 / 0.64 + 2.0 * PI / 0.64;
    assert!((r.value - want).abs() < 1e-9 && (r.value - 66.1).abs() < 0.05);
    let (_, s) = setup(&Domain::unit_square(), Bc::Dirichlet, 400);
    for k in 1..=300 {
        let r = dirichlet_avp(&n, 1.0, 2, Query::Average { k }).unwrap();
        assert!(r.holds(average(&s, k).unwrap(), SLACK), "k = {k}");
    }
}

#[test]
fn avp_riesz_and_partition_signs() {
    let n = square_phi(0.1);
    let g = n.rayleigh();
    let r = dirichlet_avp(&n, 1.0, 2, Query::Riesz { z: g }).unwrap();
    assert_eq!(r.value, 0.0);
    let r = dirichlet_avp(&n, 1.0, 2, Query::Riesz { z: 0.5 * g }).unwrap();
    assert_eq!(r.value, 0.0);
    let (_, s) = setup(&Domain::unit_square(), Bc::Dirichlet, 2000);
    for z in [60.0, 100.0, 300.0, 1000.0, 3000.0] {
        let r = dirichlet_avp(&n, 1.0, 2, Query::Riesz { z }).unwrap();
        assert!(
            r.value > 0.0 && r.holds(riesz_mean(&s, z, 1.0).unwrap(), SLACK),
            "z = {z}"
        );
    }
    let n2 = square_phi(0.2);
    for t in [0.005, 0.01, 0.1, 1.0] {
        let r = dirichlet_avp(&n2, 1.0, 2, Query::Partition { t }).unwrap();
        // the truncated sum is itself below the true trace
        assert!(r.holds(partition(&s, t).unwrap().value, SLACK), "t = {t}");
    }
}

#[test]
fn avp_bracket_contains_neighbours() {
    let (_, s) = setup(&Domain::unit_square(), Bc::Dirichlet, 400);
    for h in [0.05, 0.1, 0.2] {
        let n = square_phi(h);
        let mut checked = 0;
        for k in 1..=300 {
            let (lo, hi) = dirichlet_avp_bracket(&n, 1.0, 2, k, average(&s, k).unwrap()).unwrap();
            let lk = s.values[k - 1];
            if !lo.applicable || !lo.threshold.admits(lk) {
                continue;
            }
            assert!(lo.holds(lk, SLACK) && hi.holds(s.values[k], SLACK), "h = {h}, k = {k}");
            checked += 1;
        }
        assert!(checked > 250, "only {checked} admissible k");
    }
    // an average far above the scale makes the discriminant negative
    let (lo, _) = dirichlet_avp_bracket(&square_phi(0.1), 1.0, 2, 1, 1e6).unwrap();
    assert!(!lo.applicable && lo.value.is_nan());
}

#[test]
fn avp_rejects_rho_one() {
    let n = TestFunctionNorms::new(1.0, 1.0, 1.0, 1.0).unwrap();
    assert!(dirichlet_avp(&n, 1.0, 2, Query::Average { k: 1 }).is_err());
    assert!(TestFunctionNorms::new(2.0, 1.0, 1.0, 1.0).is_err());
}

#[test]
fn inradius_square() {
    let l1 = 2.0 * PI * PI;
    let b = dirichlet_inradius(Query::Lambda1, l1, 0.5, 1.0, 2).unwrap();
    // j_{0,1}² / r²
    assert!((b.value - 2.404825557695773f64.powi(2) / 0.25).abs() < 1e-9);
    assert!((b.value - 23.133).abs() < 1e-3 && b.holds(l1, 0.0));
    let (_, s) = setup(&Domain::unit_square(), Bc::Dirichlet, 100);
    for k in [1, 5, 20] {
        let r = dirichlet_inradius(Query::Average { k }, l1, 0.5, 1.0, 2).unwrap();
        let excess = r.extras["excess"];
        assert!((excess / k as f64 - 37.06).abs() < 5e-3, "{excess}");
        assert!(r.holds(average(&s, k).unwrap(), SLACK));
    }
    let heat = dirichlet_inradius_heat(Query::Average { k: 1 }, l1, 2).unwrap();
    assert!((heat.extras["excess"] - E_PI2).abs() < 1e-9);
    for k in [1, 10, 50] {
        let heat = dirichlet_inradius_heat(Query::Average { k }, l1, 2).unwrap();
        assert!(heat.holds(average(&s, k).unwrap(), SLACK));
    }
    // Riesz forms
    let r = dirichlet_inradius(Query::Riesz { z: 3.9 }, l1, 0.5, 1.0, 2).unwrap();
    assert!(!r.applicable, "threshold is z >= 8");
    for z in [20.0, 60.0, 200.0, 600.0] {
        let r = dirichlet_inradius(Query::Riesz { z }, l1, 0.5, 1.0, 2).unwrap();
        assert!(r.applicable && r.holds(riesz_mean(&s, z, 1.0).unwrap(), SLACK));
        let h = dirichlet_inradius_heat(Query::Riesz { z }, l1, 2).unwrap();
        assert!(h.holds(riesz_mean(&s, z, 1.0).unwrap(), SLACK));
    }
    let p = protter_lower(0.5, true).unwrap();
    assert!((p.value - PI * PI).abs() < 1e-12 && p.holds(l1, 0.0));
    assert!(protter_lower(0.5, false).is_err());
}

const E_PI2: f64 = std::f64::consts::E * PI * PI;

#[test]
fn convex_square() {
    let (g, s) = setup(&Domain::unit_square(), Bc::Dirichlet, 2000);
    let r = dirichlet_convex(Query::Average { k: 1 }, &g).unwrap();
    let want = 2.0 * PI + 2.0 * (2.0 * PI).sqrt() * 4.0 + 64.0;
    assert!((r.value - want).abs() < 1e-10 && (r.value - 90.34).abs() < 5e-3);
    let l = dirichlet_convex(Query::Lambda1, &g).unwrap();
    assert_eq!(l.value, 64.0);
    for k in 1..=500 {
        let r = dirichlet_convex(Query::Average { k }, &g).unwrap();
        assert!(r.holds(average(&s, k).unwrap(), SLACK), "k = {k}");
    }
    for z in [8.0, 20.0, 100.0, 1000.0, 5000.0] {
        let truth = riesz_mean(&s, z, 1.0).unwrap();
        let r = dirichlet_convex(Query::Riesz { z }, &g).unwrap();
        assert!(r.applicable && r.holds(truth, SLACK), "z = {z}");
        let a = dirichlet_convex_aaa(z, 1.0, &g).unwrap();
        if a.applicable {
            assert!(a.holds(truth, SLACK));
        }
    }
    let ann = summarize(&Domain::annulus(1.0, 2.0).unwrap()).unwrap();
    assert!(dirichlet_convex(Query::Average { k: 1 }, &ann).is_err());
}

#[test]
fn alpha_variant_at_matching_threshold() {
    // At α = (d+2)/(2d) both forms share the z-threshold; the α form carries
    // the larger boundary coefficient √(2/(d+2)) + √(2(d+2)) ≥ 2√(2/(d+2)).
    for dom in [Domain::unit_square(), Domain::boxed(&[1.0, 1.0, 1.0]).unwrap()] {
        let g = summarize(&dom).unwrap();
        let d = g.dim as f64;
        let alpha = (d + 2.0) / (2.0 * d);
        for z in [50.0, 500.0] {
            let a = dirichlet_convex_aaa(z, alpha, &g).unwrap();
            let b = dirichlet_convex(Query::Riesz { z }, &g).unwrap();
            assert!((a.threshold.min.unwrap() - b.threshold.min.unwrap()).abs() < 1e-12);
            let semi = (2.0 * PI).powf(-d) * crate::numeric::unit_ball_volume(g.dim);
            let coef = (2.0 / (d + 2.0)).sqrt() + (2.0 * (d + 2.0)).sqrt();
            let gap = (coef - 2.0 * (2.0 / (d + 2.0)).sqrt()) * semi * g.boundary_measure * z.powf(d / 2.0 + 0.5);
            assert!((b.value - a.value - gap).abs() < 1e-9 * gap);
        }
    }
}

#[test]
fn slab_limit_reads_pi_squared_le_16() {
    let (lhs, rhs) = convex_slab_limit(PI * PI, 1.0, 2.0, 2, 0.0);
    assert!((lhs - PI * PI).abs() < 1e-14 && (rhs - 16.0).abs() < 1e-14);
    assert!(lhs <= rhs);
    // valid while π²κ²|Ω'|² < λ₂(Ω') − λ₁(Ω') = 3π², i.e. κ < √3
    for kappa in [0.1, 1.0, 1.7] {
        let (l, r) = convex_slab_limit(PI * PI, 1.0, 2.0, 2, kappa);
        assert!(l <= r, "kappa = {kappa}");
    }
}

#[test]
fn convex_cube() {
    let dom = Domain::boxed(&[1.0, 1.0, 1.0]).unwrap();
    let (g, s) = setup(&dom, Bc::Dirichlet, 800);
    for k in [1, 2, 10, 100, 500] {
        let r = dirichlet_convex(Query::Average { k }, &g).unwrap();
        assert!(r.holds(average(&s, k).unwrap(), SLACK));
    }
    for z in [20.0, 100.0, 400.0] {
        let r = dirichlet_convex(Query::Riesz { z }, &g).unwrap();
        if r.applicable {
            assert!(r.holds(riesz_mean(&s, z, 1.0).unwrap(), SLACK));
        }
    }
}

#[test]
fn class_s_square_k10() {
    let dom = Domain::unit_square();
    let (g, s) = setup(&dom, Bc::Dirichlet, 400);
    let tube = tube_fn(&dom);
    let r = dirichlet_class_s(Query::Average { k: 10 }, &g, &tube).unwrap();
    let h = (2.0 * PI * 10.0).powf(-0.5);
    assert!((r.extras["h"] - h).abs() < 1e-12 && (h - 0.12616).abs() < 1e-5);
    // pieces from closed forms
    let w = 1.0 - (1.0 - 2.0 * h).powi(2);
    let rem = 2.0 / (h * h) * (4.0 * h * w + (w - 4.0 * h)) / (1.0 - w);
    let want = 20.0 * PI + 2.0 * (2.0 * PI).sqrt() * 4.0 * 10f64.sqrt() + rem;
    assert!((r.value - want).abs() < 1e-9 * want);
    let avg10 = average(&s, 10).unwrap();
    assert!((avg10 - 10.0 * PI * PI).abs() < 1e-9);
    assert!(r.holds(avg10, SLACK));
    for k in 1..=300 {
        let r = dirichlet_class_s(Query::Average { k }, &g, &tube).unwrap();
        if r.applicable {
            assert!(r.holds(average(&s, k).unwrap(), SLACK), "k = {k}");
        }
    }
}

#[test]
fn class_s_threshold_on_thin_box() {
    let dom = Domain::boxed(&[1.0, 0.1]).unwrap();
    let g = summarize(&dom).unwrap();
    let tube = tube_fn(&dom);
    let r = dirichlet_class_s(Query::Average { k: 1 }, &g, &tube).unwrap();
    assert!(!r.applicable && r.value.is_nan());
    assert!(r.extras["h"] > g.inradius);
    let k0 = r.threshold.min.unwrap();
    let ok = dirichlet_class_s(Query::Average { k: k0.ceil() as usize }, &g, &tube).unwrap();
    assert!(ok.applicable);
}

#[test]
fn class_s_partition_disk() {
    let dom = Domain::disk(1.0).unwrap();
    let (g, s) = setup(&dom, Bc::Dirichlet, 1500);
    let tube = tube_fn(&dom);
    let r = dirichlet_class_s(Query::Partition { t: 0.01 }, &g, &tube).unwrap();
    let w = 2.0 * PI * 0.1 - PI * 0.01;
    assert!((r.value - (PI - 2.0 * w) / (0.04 * PI)).abs() < 1e-9);
    assert!((r.extras["remainder"] - 0.5).abs() < 1e-9);
    let trace = partition(&s, 0.01).unwrap();
    assert!(r.holds(trace.value, SLACK));
    for t in [0.001, 0.05, 0.5, 1.0] {
        let r = dirichlet_class_s(Query::Partition { t }, &g, &tube).unwrap();
        assert_eq!(r.applicable, t <= 1.0);
        if r.applicable {
            assert!(r.holds(partition(&s, t).unwrap().value, SLACK), "t = {t}");
        }
    }
}

#[test]
fn c2_disk_limit_and_convergence() {
    let g = summarize(&Domain::disk(1.0).unwrap()).unwrap();
    let r = dirichlet_c2(10, &g).unwrap();
    assert!((r.extras["limit"] - 6.0).abs() < 1e-12);
    // R(k) − limit = O(k^{−1/2}): fit the slope on a log grid
    let ks: [f64; 4] = [1e3, 1e4, 1e5, 1e6];
    let pts: Vec<(f64, f64)> = ks
        .iter()
        .map(|&k| {
            let r = dirichlet_c2(k as usize, &g).unwrap();
            (k.ln(), (r.extras["remainder"] - 6.0).abs().ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 * p.0, a.1 + p.0 * p.1));
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!((slope + 0.5).abs() < 0.01, "slope {slope}");
    let big = dirichlet_c2(1_000_000, &g).unwrap();
    assert!((big.extras["remainder"] - 6.0).abs() < 1e-2);
}

#[test]
fn c2_disk_against_bessel_spectrum() {
    let dom = Domain::disk(1.0).unwrap();
    let (g, s) = setup(&dom, Bc::Dirichlet, 300);
    for k in 1..=300 {
        let avg = average(&s, k).unwrap();
        let r = dirichlet_c2(k, &g).unwrap();
        if r.applicable {
            assert!(r.holds(avg, SLACK), "thm 2.9 k = {k}");
        }
        if k <= 200 {
            let m = dirichlet_mean_convex(k, &g).unwrap();
            assert!(m.applicable, "all k admitted for the unit disk");
            assert!(m.holds(avg, SLACK), "k = {k}");
        }
    }
    let m = dirichlet_mean_convex(1, &g).unwrap();
    assert!(m.flags.iter().any(|f| f.contains("all k")));
}

#[test]
fn c2_requires_tags() {
    let sq = summarize(&Domain::unit_square()).unwrap();
    assert!(dirichlet_c2(5, &sq).is_err());
    let ann = summarize(&Domain::annulus(1.0, 2.0).unwrap()).unwrap();
    assert!(dirichlet_mean_convex(5, &ann).is_err());
}

#[test]
fn planar_cases() {
    let disk = Domain::disk(1.0).unwrap();
    let (g, s) = setup(&disk, Bc::Dirichlet, 300);
    let r = dirichlet_planar(PlanarCase::C2, 10, &g).unwrap();
    assert!((r.extras["h"] - 0.05f64.sqrt()).abs() < 1e-12);
    assert!((r.extras["limit"] - 6.0).abs() < 1e-12);
    // both C² formulas agree in the plane
    let r9 = dirichlet_c2(10, &g).unwrap();
    assert!((r.value - r9.value).abs() < 1e-9 * r.value);
    for k in 1..=300 {
        let avg = average(&s, k).unwrap();
        for case in [
            PlanarCase::C2,
            PlanarCase::TwoComponents { alpha: 0.5 },
            PlanarCase::Convex,
        ] {
            let r = dirichlet_planar(case, k, &g).unwrap();
            if r.applicable {
                assert!(r.holds(avg, SLACK), "{case:?} k = {k}");
            }
        }
    }
    let sq = Domain::unit_square();
    let (g, s) = setup(&sq, Bc::Dirichlet, 200);
    assert!((g.max_tube_radius - 0.5).abs() < 1e-12);
    for k in 1..=100 {
        let r = dirichlet_planar(PlanarCase::Polygon, k, &g).unwrap();
        assert!(r.applicable && (r.threshold.min.unwrap() - 2.0 / PI).abs() < 1e-12);
        assert!((r.extras["limit"] - 24.0).abs() < 1e-12);
        assert!(r.holds(average(&s, k).unwrap(), SLACK), "k = {k}");
    }
    assert!(dirichlet_planar(PlanarCase::C2, 3, &g).is_err());
    let cube = summarize(&Domain::boxed(&[1.0, 1.0, 1.0]).unwrap()).unwrap();
    assert!(dirichlet_planar(PlanarCase::Convex, 3, &cube).is_err());
}

#[test]
fn planar_annulus() {
    let ann = Domain::annulus(1.0, 2.0).unwrap();
    let (g, s) = setup(&ann, Bc::Dirichlet, 600);
    let mut used = 0;
    for k in 1..=600 {
        let avg = average(&s, k).unwrap();
        for case in [PlanarCase::C2, PlanarCase::TwoComponents { alpha: 0.5 }] {
            let r = dirichlet_planar(case, k, &g).unwrap();
            if r.applicable {
                used += 1;
                assert!(r.holds(avg, SLACK), "{case:?} k = {k}");
            }
        }
    }
    assert!(used > 500);
    // b = 2: the tube is exactly h|∂Ω|, so R tends to 2|∂Ω|²/|Ω|²
    let r = dirichlet_planar(PlanarCase::C2, 100, &g).unwrap();
    assert!((r.extras["limit"] - 2.0 * 36.0 * PI * PI / (9.0 * PI * PI)).abs() < 1e-12);
}

#[test]
fn neumann_square_examples() {
    let (_, s) = setup(&Domain::unit_square(), Bc::Neumann, 2000);
    let (lo, hi) = neumann_bracket(1, 1.0, 2, 0.0).unwrap();
    assert!(lo.value.abs() < 1e-12 && (hi.value - 8.0 * PI).abs() < 1e-12);
    assert!(lo.holds(0.0, SLACK) && hi.holds(PI * PI, SLACK));
    let r = neumann_classical(Query::Riesz { z: 20.0 }, 1.0, 2).unwrap();
    assert!((r.value - 400.0 / (8.0 * PI)).abs() < 1e-12);
    let truth = riesz_mean(&s, 20.0, 1.0).unwrap();
    // modes (0,0), (1,0), (0,1), (1,1) lie below z = 20
    assert!((truth - (20.0 + 2.0 * (20.0 - PI * PI) + (20.0 - 2.0 * PI * PI))).abs() < 1e-12);
    assert!(r.holds(truth, SLACK));
    let p = neumann_classical(Query::Partition { t: 0.1 }, 1.0, 2).unwrap();
    assert!((p.value - 1.0 / (0.4 * PI)).abs() < 1e-12);
    // θ(t) = Σ_{m≥0} e^{−π²m²t}
    let theta: f64 = (0..100).map(|m| (-(PI * PI) * (m * m) as f64 * 0.1).exp()).sum();
    assert!((partition(&s, 0.1).unwrap().value - theta * theta).abs() < 1e-9);
    assert!(p.holds(theta * theta, SLACK));
}

#[test]
fn neumann_classical_on_all_domains() {
    for dom in [
        Domain::unit_square(),
        Domain::boxed(&[1.0, 2.0]).unwrap(),
        Domain::boxed(&[1.0, 1.0, 1.0]).unwrap(),
        Domain::disk(1.0).unwrap(),
        Domain::annulus(1.0, 2.0).unwrap(),
    ] {
        let (g, s) = setup(&dom, Bc::Neumann, 600);
        let d = g.dim;
        for k in 1..599 {
            let avg = average(&s, k).unwrap();
            let r = neumann_classical(Query::Average { k }, g.volume, d).unwrap();
            assert!(r.holds(avg, SLACK), "{} k = {k}", dom.describe());
            let rec = neumann_quadratic_record(k, g.volume, d, avg, s.values[k]).unwrap();
            assert!(rec.holds, "{} k = {k}: {rec:?}", dom.describe());
            let (lo, hi) = neumann_bracket(k, g.volume, d, avg).unwrap();
            assert!(lo.applicable, "Kröger keeps the discriminant nonnegative");
            assert!(lo.holds(s.values[k - 1], SLACK) && hi.holds(s.values[k], SLACK));
        }
        let zmax = s.cutoff();
        for f in [0.1, 0.5, 1.0] {
            let z = f * zmax;
            let truth = riesz_mean(&s, z, 1.0).unwrap();
            assert!(neumann_classical(Query::Riesz { z }, g.volume, d)
                .unwrap()
                .holds(truth, SLACK));
            for v in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]] {
                let w = crate::geometry::direction_width(&dom, &v[..d]).unwrap();
                let b = neumann_width(z, g.volume, d, w).unwrap();
                assert!(b.holds(truth, SLACK), "{} z = {z}", dom.describe());
            }
        }
    }
}

#[test]
fn neumann_c2_disk() {
    let dom = Domain::disk(1.0).unwrap();
    let (g, s) = setup(&dom, Bc::Neumann, 400);
    let z0 = crate::geometry::neumann_z0_threshold(&dom).unwrap();
    let m = crate::geometry::neumann_curvature_max(&dom).unwrap();
    assert!((z0 - 1.0).abs() < 1e-12 && (m - 1.0).abs() < 1e-9);
    let tube = tube_fn(&dom);
    let r = neumann_c2(Query::Riesz { z: 100.0 }, &g, z0, m, &tube).unwrap();
    let h = PI / 20.0;
    let cd = neumann_constant(2);
    assert!((r.extras["remainder"] - 2e4 * cd * PI * h * h).abs() < 1e-6 * r.extras["remainder"]);
    assert!(r.applicable && r.holds(riesz_mean(&s, 100.0, 1.0).unwrap(), SLACK));
    let a = neumann_c2(Query::Average { k: 5 }, &g, z0, m, &tube).unwrap();
    assert!(!a.applicable);
    let k0 = a.threshold.min.unwrap();
    assert!((k0 - cd * PI).abs() < 1e-9 * k0, "both forms give c_d |Omega| here");
    let a = neumann_c2(Query::Average { k: 1400 }, &g, z0, m, &tube).unwrap();
    assert!(a.applicable && a.value < 0.0, "lower bound is vacuous but valid");
    let sq = summarize(&Domain::unit_square()).unwrap();
    assert!(neumann_c2(Query::Riesz { z: 100.0 }, &sq, 1.0, 1.0, &tube).is_err());
}

#[test]
fn spectral_function_pieces() {
    let b = spectral_function_bound(100.0, 1.0, 2).unwrap();
    assert!((b.main - 100.0 / (4.0 * PI)).abs() < 1e-12);
    assert!((b.total - b.main - b.correction).abs() < 1e-12 && b.correction > 0.0);
    // the correction decays like 1/δ; relative size √μ^{d−1}/(δ μ^{d/2})
    let far = spectral_function_bound(1e6, 1e8, 2).unwrap();
    assert!((far.total - far.main).abs() <= 1e-9 * far.main);
    let mut prev = f64::INFINITY;
    for i in 0..40 {
        let delta = 0.05 * 1.3f64.powi(i);
        let v = spectral_function_bound(100.0, delta, 2).unwrap().total;
        assert!(v < prev);
        prev = v;
    }
}

#[test]
fn single_from_convex_averages() {
    let (_, s) = setup(&Domain::unit_square(), Bc::Dirichlet, 400);
    let a = 2.0 * (2.0 * PI).sqrt() * 4.0;
    for k in [16, 64, 144] {
        let b = single_from_averages(k, a, 64.0, 1, 2, 1.0).unwrap();
        assert!(s.values[k - 1] >= b.lower_k && s.values[k] <= b.upper_k_next, "k = {k}");
        assert!((s.values[k - 1] - b.centre).abs() <= b.modulus);
    }
}

fn scaled_pair(dom: &Domain, t: f64) -> (GeometricSummary, GeometricSummary) {
    (summarize(dom).unwrap(), summarize(&dom.scaled(t).unwrap()).unwrap())
}

#[test]
fn scale_consistency() {
    let t = 2.5;
    for dom in [Domain::boxed(&[1.0, 2.0]).unwrap(), Domain::disk(1.0).unwrap()] {
        let (a, b) = scaled_pair(&dom, t);
        let ta = tube_fn(&dom);
        let scaled = dom.scaled(t).unwrap();
        let tb = tube_fn(&scaled);
        for k in [10, 50] {
            let x = dirichlet_class_s(Query::Average { k }, &a, &ta).unwrap();
            let y = dirichlet_class_s(Query::Average { k }, &b, &tb).unwrap();
            assert!((x.value / (t * t) - y.value).abs() < 1e-9 * y.value.abs());
            let x = dirichlet_planar(PlanarCase::Convex, k, &a);
            if let Ok(x) = x {
                let y = dirichlet_planar(PlanarCase::Convex, k, &b).unwrap();
                assert!((x.value / (t * t) - y.value).abs() < 1e-9 * y.value);
            }
        }
        let x = dirichlet_convex(Query::Riesz { z: 40.0 }, &a).unwrap();
        let y = dirichlet_convex(Query::Riesz { z: 40.0 / (t * t) }, &b).unwrap();
        assert!((x.threshold.min.unwrap() / (t * t) - y.threshold.min.unwrap()).abs() < 1e-12);
        let x = dirichlet_class_s(Query::Partition { t: 0.01 }, &a, &ta).unwrap();
        let y = dirichlet_class_s(Query::Partition { t: 0.01 * t * t }, &b, &tb).unwrap();
        assert!((x.threshold.max.unwrap() * t * t - y.threshold.max.unwrap()).abs() < 1e-12);
        // heat traces are dimensionless
        assert!((x.value - y.value).abs() < 1e-9 * x.value.abs());
    }
}
