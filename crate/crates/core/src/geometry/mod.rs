//! Domains and the geometric functionals the bounds consume.

mod curve;
mod polygon;

pub use curve::{CurveSample, CurveSource, SmoothCurve};
pub use polygon::{segment_distance, Point, Polygon};

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Grid resolution per axis for the stratified tube estimate.
const TUBE_STRATA: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Box { lengths: Vec<f64> },
    Disk { radius: f64 },
    Annulus { r_in: f64, r_out: f64 },
    Polygon(Polygon),
    Curve(SmoothCurve),
}

/// JSON form of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DomainSpec {
    Box {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        lengths: Vec<f64>,
    },
    Disk {
        radius: f64,
    },
    Annulus {
        r_in: f64,
        r_out: f64,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    Curve {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        builtin: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<Vec<[f64; 7]>>,
    },
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

impl Domain {
    pub fn unit_square() -> Self {
        Domain::Box {
            lengths: vec![1.0, 1.0],
        }
    }

    pub fn boxed(lengths: &[f64]) -> Result<Self> {
        Self::from_spec(DomainSpec::Box {
            dim: None,
            lengths: lengths.to_vec(),
        })
    }

    pub fn disk(radius: f64) -> Result<Self> {
        Self::from_spec(DomainSpec::Disk { radius })
    }

    pub fn annulus(r_in: f64, r_out: f64) -> Result<Self> {
        Self::from_spec(DomainSpec::Annulus { r_in, r_out })
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        Ok(Domain::Polygon(Polygon::new(vertices)?))
    }

    pub fn from_spec(spec: DomainSpec) -> Result<Self> {
        match spec {
            DomainSpec::Box { dim, lengths } => {
                if lengths.is_empty() {
                    return Err(Error::InvalidDomain("box needs at least one length".into()));
                }
                if let Some(d) = dim {
                    if d != lengths.len() {
                        return Err(Error::InvalidDomain(format!(
                            "box dim {d} does not match {} lengths",
                            lengths.len()
                        )));
                    }
                }
                for &l in &lengths {
                    positive("box length", l)?;
                }
                Ok(Domain::Box { lengths })
            }
            DomainSpec::Disk { radius } => {
                positive("radius", radius)?;
                Ok(Domain::Disk { radius })
            }
            DomainSpec::Annulus { r_in, r_out } => {
                positive("r_in", r_in)?;
                positive("r_out", r_out)?;
                if r_in >= r_out {
                    return Err(Error::InvalidDomain("annulus requires r_in < r_out".into()));
                }
                Ok(Domain::Annulus { r_in, r_out })
            }
            DomainSpec::Polygon { vertices } => Domain::polygon(vertices),
            DomainSpec::Curve { builtin, table } => match (builtin, table) {
                (Some(b), None) => Ok(Domain::Curve(SmoothCurve::builtin(&b)?)),
                (None, Some(t)) => Ok(Domain::Curve(SmoothCurve::from_table(&t)?)),
                _ => Err(Error::Parse("curve needs exactly one of 'builtin' or 'table'".into())),
            },
        }
    }

    pub fn to_spec(&self) -> DomainSpec {
        match self {
            Domain::Box { lengths } => DomainSpec::Box {
                dim: Some(lengths.len()),
                lengths: lengths.clone(),
            },
            Domain::Disk { radius } => DomainSpec::Disk { radius: *radius },
            Domain::Annulus { r_in, r_out } => DomainSpec::Annulus {
                r_in: *r_in,
                r_out: *r_out,
            },
            Domain::Polygon(p) => DomainSpec::Polygon {
                vertices: p.vertices().to_vec(),
            },
            Domain::Curve(c) => match c.source {
                CurveSource::Ellipse { a, b } => DomainSpec::Curve {
                    builtin: Some(format!("ellipse {a} {b}")),
                    table: None,
                },
                CurveSource::Table => DomainSpec::Curve {
                    builtin: None,
                    table: Some(c.table_rows()),
                },
            },
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: DomainSpec = serde_json::from_str(s).map_err(|e| Error::Parse(format!("domain spec: {e}")))?;
        Self::from_spec(spec)
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { lengths } => lengths.len(),
            _ => 2,
        }
    }

    /// Short human-readable descriptor.
    pub fn describe(&self) -> String {
        match self {
            Domain::Box { lengths } => format!(
                "box[{}]",
                lengths.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("x")
            ),
            Domain::Disk { radius } => format!("disk(r={radius})"),
            Domain::Annulus { r_in, r_out } => format!("annulus({r_in},{r_out})"),
            Domain::Polygon(p) => format!("polygon({} vertices)", p.len()),
            Domain::Curve(c) => match c.source {
                CurveSource::Ellipse { a, b } => format!("ellipse({a},{b})"),
                CurveSource::Table => format!("curve({} samples)", c.samples().len()),
            },
        }
    }

    /// Planar polygonal view: polygons and two-dimensional boxes.
    pub fn as_polygon(&self) -> Option<Polygon> {
        match self {
            Domain::Polygon(p) => Some(p.clone()),
            Domain::Box { lengths } if lengths.len() == 2 => {
                let (a, b) = (lengths[0], lengths[1]);
                Polygon::new(vec![[0.0, 0.0], [a, 0.0], [a, b], [0.0, b]]).ok()
            }
            _ => None,
        }
    }

    pub fn tags(&self) -> DomainTags {
        let dim = self.dim();
        let (convex, c2, mean_convex) = match self {
            Domain::Box { .. } => (true, false, false),
            Domain::Disk { .. } => (true, true, true),
            Domain::Annulus { .. } => (false, true, false),
            Domain::Polygon(p) => (p.is_convex(), false, false),
            Domain::Curve(c) => {
                let nonneg = c.min_curvature() >= -1e-12 * c.max_abs_curvature();
                (nonneg, true, nonneg)
            }
        };
        DomainTags {
            convex,
            class_s: true,
            c2,
            mean_convex,
            planar: dim == 2,
            polygon: self.as_polygon().is_some(),
        }
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        positive("scale", t)?;
        Ok(match self {
            Domain::Box { lengths } => Domain::Box {
                lengths: lengths.iter().map(|l| l * t).collect(),
            },
            Domain::Disk { radius } => Domain::Disk { radius: radius * t },
            Domain::Annulus { r_in, r_out } => Domain::Annulus {
                r_in: r_in * t,
                r_out: r_out * t,
            },
            Domain::Polygon(p) => Domain::Polygon(p.scaled(t)),
            Domain::Curve(c) => Domain::Curve(c.scaled(t)?),
        })
    }

    /// Point membership for planar domains.
    fn contains2(&self, p: Point) -> bool {
        match self {
            Domain::Box { lengths } => p[0] > 0.0 && p[0] < lengths[0] && p[1] > 0.0 && p[1] < lengths[1],
            Domain::Disk { radius } => p[0].hypot(p[1]) < *radius,
            Domain::Annulus { r_in, r_out } => {
                let r = p[0].hypot(p[1]);
                r > *r_in && r < *r_out
            }
            Domain::Polygon(poly) => poly.contains(p),
            Domain::Curve(c) => c.contains(p),
        }
    }

    fn boundary_distance2(&self, p: Point) -> f64 {
        match self {
            Domain::Box { lengths } => p[0]
                .abs()
                .min((lengths[0] - p[0]).abs())
                .min(p[1].abs())
                .min((lengths[1] - p[1]).abs()),
            Domain::Disk { radius } => (radius - p[0].hypot(p[1])).abs(),
            Domain::Annulus { r_in, r_out } => {
                let r = p[0].hypot(p[1]);
                (r - r_in).abs().min((r_out - r).abs())
            }
            Domain::Polygon(poly) => poly.boundary_distance(p),
            Domain::Curve(c) => c.boundary_distance(p),
        }
    }

    fn bbox2(&self) -> (Point, Point) {
        match self {
            Domain::Box { lengths } => ([0.0, 0.0], [lengths[0], lengths[1]]),
            Domain::Disk { radius } => ([-radius, -radius], [*radius, *radius]),
            Domain::Annulus { r_out, .. } => ([-r_out, -r_out], [*r_out, *r_out]),
            Domain::Polygon(p) => p.bbox(),
            Domain::Curve(c) => c.outline().bbox(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainTags {
    pub convex: bool,
    pub class_s: bool,
    pub c2: bool,
    pub mean_convex: bool,
    pub planar: bool,
    pub polygon: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleSums {
    pub s_a: f64,
    pub s_b: f64,
}

/// Which summary fields come from closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactFlags {
    pub volume: bool,
    pub boundary_measure: bool,
    pub inradius: bool,
    pub max_tube_radius: bool,
    pub curvature_integrals: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricSummary {
    pub dim: usize,
    pub volume: f64,
    pub boundary_measure: f64,
    pub inradius: f64,
    pub max_tube_radius: f64,
    pub boundary_components: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_sums: Option<AngleSums>,
    /// I_j = ∫ 𝓗^j dσ for j = 1..d−1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curvature_integrals: Option<Vec<f64>>,
    pub tags: DomainTags,
    pub exact: ExactFlags,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl GeometricSummary {
    pub fn is_convex(&self) -> bool {
        self.tags.convex
    }
}

/// Computes every geometric scalar for a domain.
pub fn summarize(domain: &Domain) -> Result<GeometricSummary> {
    let tags = domain.tags();
    let all_exact = ExactFlags {
        volume: true,
        boundary_measure: true,
        inradius: true,
        max_tube_radius: true,
        curvature_integrals: true,
    };
    let mut flags = Vec::new();
    let s = match domain {
        Domain::Box { lengths } => {
            let d = lengths.len();
            let volume: f64 = lengths.iter().product();
            let boundary: f64 = (0..d).map(|i| 2.0 * volume / lengths[i]).sum();
            let inradius = lengths.iter().cloned().fold(f64::INFINITY, f64::min) / 2.0;
            let angle_sums = (d == 2).then_some(AngleSums { s_a: 4.0, s_b: 0.0 });
            GeometricSummary {
                dim: d,
                volume,
                boundary_measure: if d == 1 { 2.0 } else { boundary },
                inradius,
                max_tube_radius: inradius,
                boundary_components: 1,
                angle_sums,
                curvature_integrals: None,
                tags,
                exact: all_exact,
                flags,
            }
        }
        Domain::Disk { radius } => GeometricSummary {
            dim: 2,
            volume: PI * radius * radius,
            boundary_measure: 2.0 * PI * radius,
            inradius: *radius,
            max_tube_radius: *radius,
            boundary_components: 1,
            angle_sums: None,
            curvature_integrals: Some(vec![2.0 * PI]),
            tags,
            exact: all_exact,
            flags,
        },
        Domain::Annulus { r_in, r_out } => GeometricSummary {
            dim: 2,
            volume: PI * (r_out * r_out - r_in * r_in),
            boundary_measure: 2.0 * PI * (r_in + r_out),
            inradius: (r_out - r_in) / 2.0,
            max_tube_radius: (r_out - r_in) / 2.0,
            boundary_components: 2,
            angle_sums: None,
            curvature_integrals: Some(vec![0.0]),
            tags,
            exact: all_exact,
            flags,
        },
        Domain::Polygon(p) => {
            let inradius = p.inradius();
            let (h, fallback) = p.tube_formula_radius();
            if fallback {
                flags.push("max_tube_radius: no bisector intersection inside, inradius used".into());
            }
            let (s_a, s_b) = p.angle_sums();
            GeometricSummary {
                dim: 2,
                volume: p.area(),
                boundary_measure: p.perimeter(),
                inradius,
                max_tube_radius: h.min(inradius),
                boundary_components: 1,
                angle_sums: Some(AngleSums { s_a, s_b }),
                curvature_integrals: None,
                tags,
                exact: ExactFlags {
                    inradius: false,
                    max_tube_radius: !fallback,
                    ..all_exact
                },
                flags,
            }
        }
        Domain::Curve(c) => {
            let inradius = c.inradius();
            let hbar = c.max_tube_radius().min(inradius);
            GeometricSummary {
                dim: 2,
                volume: c.area(),
                boundary_measure: c.length(),
                inradius,
                max_tube_radius: hbar,
                boundary_components: 1,
                angle_sums: None,
                curvature_integrals: Some(vec![c.curvature_integral(1)]),
                tags,
                exact: ExactFlags {
                    volume: false,
                    boundary_measure: false,
                    inradius: false,
                    max_tube_radius: false,
                    curvature_integrals: false,
                },
                flags,
            }
        }
    };
    Ok(s)
}

/// Volume of the inner tube ω_h, with a standard error for sampled values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeVolume {
    pub value: f64,
    pub std_error: f64,
    pub exact: bool,
}

impl TubeVolume {
    fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            exact: true,
        }
    }
}

/// |ω_h| for `h > 0`.
pub fn tube_volume(domain: &Domain, h: f64, seed: u64) -> Result<TubeVolume> {
    let s = summarize(domain)?;
    tube_volume_with(domain, &s, h, seed)
}

/// As [`tube_volume`], reusing a precomputed summary.
pub fn tube_volume_with(domain: &Domain, s: &GeometricSummary, h: f64, seed: u64) -> Result<TubeVolume> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("tube radius must be positive, got {h}")));
    }
    if h >= s.inradius {
        return Ok(TubeVolume::exact(s.volume));
    }
    match domain {
        Domain::Box { lengths } => {
            let core: f64 = lengths.iter().map(|l| (l - 2.0 * h).max(0.0)).product();
            Ok(TubeVolume::exact(s.volume - core))
        }
        Domain::Disk { radius } => {
            let c = (radius - h).max(0.0);
            Ok(TubeVolume::exact(PI * (radius * radius - c * c)))
        }
        Domain::Annulus { r_in, r_out } => {
            let a = r_in + h;
            let b = r_out - h;
            let core = if b > a { PI * (b * b - a * a) } else { 0.0 };
            Ok(TubeVolume::exact(s.volume - core))
        }
        Domain::Polygon(p) => {
            if h < s.max_tube_radius {
                Ok(TubeVolume::exact(p.tube_area_formula(h)))
            } else {
                Ok(sampled_tube(domain, h, seed))
            }
        }
        Domain::Curve(_) => {
            if h < s.max_tube_radius {
                let b = s.boundary_components as f64;
                Ok(TubeVolume {
                    value: h * s.boundary_measure - PI * (2.0 - b) * h * h,
                    std_error: 0.0,
                    exact: false,
                })
            } else {
                Ok(sampled_tube(domain, h, seed))
            }
        }
    }
}

/// Stratified estimate with two uniform points per cell; the variance is
/// estimated from the within-cell pairs.
pub fn sampled_tube(domain: &Domain, h: f64, seed: u64) -> TubeVolume {
    sampled_tube_strata(domain, h, seed, TUBE_STRATA)
}

pub fn sampled_tube_strata(domain: &Domain, h: f64, seed: u64, m: usize) -> TubeVolume {
    let (lo, hi) = domain.bbox2();
    let dx = (hi[0] - lo[0]) / m as f64;
    let dy = (hi[1] - lo[1]) / m as f64;
    let cell = dx * dy;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hit = |p: Point| domain.contains2(p) && domain.boundary_distance2(p) <= h;
    let mut total = 0.0;
    let mut var = 0.0;
    for i in 0..m {
        for j in 0..m {
            let mut y = [0.0; 2];
            for yk in &mut y {
                let p = [
                    lo[0] + (i as f64 + rng.gen::<f64>()) * dx,
                    lo[1] + (j as f64 + rng.gen::<f64>()) * dy,
                ];
                *yk = if hit(p) { 1.0 } else { 0.0 };
            }
            total += 0.5 * (y[0] + y[1]);
            var += 0.25 * (y[0] - y[1]) * (y[0] - y[1]);
        }
    }
    TubeVolume {
        value: total * cell,
        std_error: var.sqrt() * cell,
        exact: false,
    }
}

/// Width sup v·(x − y) over the domain for a unit vector `v`.
pub fn direction_width(domain: &Domain, v: &[f64]) -> Result<f64> {
    let d = domain.dim();
    if v.len() != d {
        return Err(Error::InvalidArgument(format!(
            "direction has {} components, domain dimension is {d}",
            v.len()
        )));
    }
    let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        return Err(Error::InvalidArgument("direction is the zero vector".into()));
    }
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "direction must be a unit vector, |v| = {n}"
        )));
    }
    Ok(match domain {
        Domain::Box { lengths } => lengths.iter().zip(v).map(|(l, x)| l * x.abs()).sum(),
        Domain::Disk { radius } => 2.0 * radius,
        Domain::Annulus { r_out, .. } => 2.0 * r_out,
        Domain::Polygon(p) => p.width([v[0], v[1]]),
        Domain::Curve(c) => c.width([v[0], v[1]]),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiFit {
    /// Coefficient of h; estimates the boundary measure.
    pub slope: f64,
    /// Coefficient of h².
    pub curvature_coefficient: f64,
    pub residuals: Vec<f64>,
}

/// Least-squares fit |ω_h| ≈ c₁h + c₂h² over a decreasing grid.
pub fn minkowski_content_fit(domain: &Domain, h_grid: &[f64], seed: u64) -> Result<MinkowskiFit> {
    if h_grid.len() < 2 {
        return Err(Error::InvalidArgument(
            "Minkowski fit needs at least 2 grid points".into(),
        ));
    }
    if h_grid.windows(2).any(|w| w[1] >= w[0]) || h_grid.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::InvalidArgument(
            "h grid must be positive and strictly decreasing".into(),
        ));
    }
    let s = summarize(domain)?;
    let vols: Vec<f64> = h_grid
        .iter()
        .map(|&h| tube_volume_with(domain, &s, h, seed).map(|t| t.value))
        .collect::<Result<_>>()?;
    let a = nalgebra::DMatrix::from_fn(h_grid.len(), 2, |i, j| h_grid[i].powi(j as i32 + 1));
    let y = nalgebra::DVector::from_vec(vols.clone());
    let c = crate::numeric::least_squares(&a, &y)?;
    let residuals = h_grid
        .iter()
        .zip(&vols)
        .map(|(h, v)| v - (c[0] * h + c[1] * h * h))
        .collect();
    Ok(MinkowskiFit {
        slope: c[0],
        curvature_coefficient: c[1],
        residuals,
    })
}

/// max{h̄^{−2}, (4/9)·max_{x, h ∈ [0, h̄/2]} |hκ/(1 − hκ)|²} for planar C² domains.
/// M = max over boundary points and h ∈ [0, h̄/2] of |hκ/(1 − hκ)| (planar case).
pub fn neumann_curvature_max(domain: &Domain) -> Result<f64> {
    let curvatures: Vec<f64> = match domain {
        Domain::Disk { radius } => vec![1.0 / radius],
        Domain::Annulus { r_in, r_out } => vec![1.0 / r_out, -1.0 / r_in],
        Domain::Curve(c) => c.samples().iter().map(|s| s.curvature()).collect(),
        _ => {
            return Err(Error::UnsupportedDomain {
                op: "neumann_z0_threshold",
                reason: "principal curvatures are not defined for this domain".into(),
            })
        }
    };
    let hbar = summarize(domain)?.max_tube_radius;
    let f = |h: f64, k: f64| (h * k / (1.0 - h * k)).abs();
    let mut best = 0.0f64;
    let n = 200;
    for &k in &curvatures {
        let mut arg = 0usize;
        let mut local = 0.0;
        for i in 0..=n {
            let h = 0.5 * hbar * i as f64 / n as f64;
            let v = f(h, k);
            if v > local {
                local = v;
                arg = i;
            }
        }
        // golden-section refinement around the best grid cell
        let lo = 0.5 * hbar * (arg.saturating_sub(1)) as f64 / n as f64;
        let hi = 0.5 * hbar * ((arg + 1).min(n)) as f64 / n as f64;
        let (mut a, mut b) = (lo, hi);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c1 = b - g * (b - a);
            let c2 = a + g * (b - a);
            if f(c1, k) > f(c2, k) {
                b = c2;
            } else {
                a = c1;
            }
        }
        local = local.max(f(0.5 * (a + b), k));
        best = best.max(local);
    }
    Ok(best)
}

pub fn neumann_z0_threshold(domain: &Domain) -> Result<f64> {
    let m = neumann_curvature_max(domain)?;
    let hbar = summarize(domain)?.max_tube_radius;
    Ok((1.0 / (hbar * hbar)).max(4.0 / 9.0 * m * m))
}
