//! Closed C² boundary curves given by samples of (t, x, y, x', y', x'', y'').

use super::polygon::{compass_maximize, segment_distance, Point, Polygon};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const DEFAULT_SAMPLES: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub dx: f64,
    pub dy: f64,
    pub ddx: f64,
    pub ddy: f64,
}

impl CurveSample {
    fn from_row(r: [f64; 7]) -> Self {
        Self {
            t: r[0],
            x: r[1],
            y: r[2],
            dx: r[3],
            dy: r[4],
            ddx: r[5],
            ddy: r[6],
        }
    }

    pub fn speed(&self) -> f64 {
        self.dx.hypot(self.dy)
    }

    /// Signed curvature; positive where the curve bends towards the interior.
    pub fn curvature(&self) -> f64 {
        (self.dx * self.ddy - self.dy * self.ddx) / self.speed().powi(3)
    }

    /// Inward unit normal for a counter-clockwise curve.
    pub fn inward_normal(&self) -> Point {
        let s = self.speed();
        [-self.dy / s, self.dx / s]
    }

    pub fn point(&self) -> Point {
        [self.x, self.y]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveSource {
    Ellipse { a: f64, b: f64 },
    Table,
}

/// A sampled, positively oriented, simple closed curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothCurve {
    pub source: CurveSource,
    samples: Vec<CurveSample>,
    /// Quadrature weight in t for each sample (periodic trapezoid).
    weights: Vec<f64>,
    outline: Polygon,
}

impl SmoothCurve {
    /// Ellipse with semi-axes `a` (x) and `b` (y).
    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        Self::ellipse_with(a, b, DEFAULT_SAMPLES)
    }

    pub fn ellipse_with(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidDomain("ellipse semi-axes must be positive".into()));
        }
        let dt = 2.0 * PI / n as f64;
        let samples = (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                let (s, c) = t.sin_cos();
                CurveSample {
                    t,
                    x: a * c,
                    y: b * s,
                    dx: -a * s,
                    dy: b * c,
                    ddx: -a * c,
                    ddy: -b * s,
                }
            })
            .collect();
        Self::finish(CurveSource::Ellipse { a, b }, samples, vec![dt; n])
    }

    /// Parses a built-in description such as `"ellipse 2 1"`.
    pub fn builtin(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split_whitespace().collect();
        match parts.as_slice() {
            ["ellipse", a, b] => {
                let a: f64 = a.parse().map_err(|_| Error::Parse(format!("bad ellipse axis {a}")))?;
                let b: f64 = b.parse().map_err(|_| Error::Parse(format!("bad ellipse axis {b}")))?;
                Self::ellipse(a, b)
            }
            ["circle", r] => {
                let r: f64 = r.parse().map_err(|_| Error::Parse(format!("bad radius {r}")))?;
                Self::ellipse(r, r)
            }
            _ => Err(Error::Parse(format!("unknown curve built-in '{spec}'"))),
        }
    }

    /// Builds a curve from table rows (t, x, y, x', y', x'', y''). The last
    /// row must close the curve, i.e. repeat the first point.
    pub fn from_table(rows: &[[f64; 7]]) -> Result<Self> {
        if rows.len() < 9 {
            return Err(Error::InvalidDomain("curve table needs at least 9 rows".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDomain("non-finite curve table entry".into()));
        }
        let first = rows[0];
        let last = rows[rows.len() - 1];
        let scale = rows
            .iter()
            .map(|r| r[1].abs().max(r[2].abs()))
            .fold(0.0f64, f64::max)
            .max(1e-300);
        if (first[1] - last[1]).hypot(first[2] - last[2]) > 1e-9 * scale {
            return Err(Error::InvalidDomain("curve is not closed".into()));
        }
        let n = rows.len() - 1;
        let ts: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        if ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidDomain("curve parameter must increase".into()));
        }
        let weights = (0..n)
            .map(|i| {
                let prev = if i == 0 { ts[n] - ts[n - 1] } else { ts[i] - ts[i - 1] };
                let next = ts[i + 1] - ts[i];
                0.5 * (prev + next)
            })
            .collect();
        let samples = rows[..n].iter().map(|r| CurveSample::from_row(*r)).collect();
        Self::finish(CurveSource::Table, samples, weights)
    }

    fn finish(source: CurveSource, samples: Vec<CurveSample>, weights: Vec<f64>) -> Result<Self> {
        let max_speed = samples.iter().map(|s| s.speed()).fold(0.0f64, f64::max);
        if samples.iter().any(|s| s.speed() <= 1e-9 * max_speed.max(1e-300)) {
            return Err(Error::InvalidDomain("curve is not regular".into()));
        }
        let outline = Polygon::new(samples.iter().map(|s| s.point()).collect()).map_err(|e| {
            Error::InvalidDomain(format!(
                "curve outline rejected ({e}); orientation must be positive and the curve simple"
            ))
        })?;
        Ok(Self {
            source,
            samples,
            weights,
            outline,
        })
    }

    pub fn samples(&self) -> &[CurveSample] {
        &self.samples
    }

    /// Polygonal outline through the samples.
    pub fn outline(&self) -> &Polygon {
        &self.outline
    }

    fn integrate<F: Fn(&CurveSample) -> f64>(&self, f: F) -> f64 {
        crate::numeric::compensated_sum(self.samples.iter().zip(&self.weights).map(|(s, w)| f(s) * w))
    }

    /// Enclosed area by Green's theorem.
    pub fn area(&self) -> f64 {
        0.5 * self.integrate(|s| s.x * s.dy - s.y * s.dx)
    }

    pub fn length(&self) -> f64 {
        self.integrate(|s| s.speed())
    }

    /// ∫ κ^j dσ.
    pub fn curvature_integral(&self, j: i32) -> f64 {
        self.integrate(|s| s.curvature().powi(j) * s.speed())
    }

    pub fn max_abs_curvature(&self) -> f64 {
        self.samples.iter().map(|s| s.curvature().abs()).fold(0.0, f64::max)
    }

    pub fn min_curvature(&self) -> f64 {
        self.samples.iter().map(|s| s.curvature()).fold(f64::INFINITY, f64::min)
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        let n = self.samples.len();
        (0..n)
            .map(|i| segment_distance(p, self.samples[i].point(), self.samples[(i + 1) % n].point()))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.outline().contains(p)
    }

    /// Half the shortest distance along an inward normal to the next boundary
    /// crossing, minimized over a subset of samples.
    pub fn half_min_normal_chord(&self) -> f64 {
        let outline = self.outline();
        let n = self.samples.len();
        let stride = (n / 256).max(1);
        let diam = outline.diameter_scale();
        let step = diam / 200.0;
        let mut best = f64::INFINITY;
        for s in self.samples.iter().step_by(stride) {
            let p = s.point();
            let nv = s.inward_normal();
            let at = |r: f64| [p[0] + r * nv[0], p[1] + r * nv[1]];
            // march until the ray leaves the domain, then bisect the crossing
            let mut r = step;
            let mut inside_prev = true;
            while r < 2.0 * diam {
                let inside = outline.contains(at(r));
                if inside_prev && !inside && r > step {
                    break;
                }
                inside_prev = inside;
                r += step;
            }
            if r >= 2.0 * diam {
                continue;
            }
            let (mut lo, mut hi) = (r - step, r);
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                if outline.contains(at(m)) {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            best = best.min(0.5 * lo);
        }
        best
    }

    pub fn max_tube_radius(&self) -> f64 {
        let k = self.max_abs_curvature();
        let curv = if k > 0.0 { 1.0 / k } else { f64::INFINITY };
        curv.min(self.half_min_normal_chord())
    }

    pub fn inradius(&self) -> f64 {
        let outline = self.outline();
        let (lo, hi) = outline.bbox();
        let m = 48;
        let dx = (hi[0] - lo[0]) / m as f64;
        let dy = (hi[1] - lo[1]) / m as f64;
        let depth = |p: Point| {
            let d = self.boundary_distance(p);
            if outline.contains(p) {
                d
            } else {
                -d
            }
        };
        let mut cands: Vec<(f64, Point)> = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let p = [lo[0] + (i as f64 + 0.5) * dx, lo[1] + (j as f64 + 0.5) * dy];
                if outline.contains(p) {
                    cands.push((self.boundary_distance(p), p));
                }
            }
        }
        cands.sort_by(|a, b| b.0.total_cmp(&a.0));
        cands.truncate(6);
        let tol = 1e-12 * outline.diameter_scale();
        cands
            .into_iter()
            .map(|(d0, p0)| compass_maximize(depth, p0, d0, dx.max(dy), tol).1)
            .fold(0.0, f64::max)
    }

    pub fn width(&self, v: Point) -> f64 {
        if let CurveSource::Ellipse { a, b } = self.source {
            return 2.0 * (a * a * v[0] * v[0] + b * b * v[1] * v[1]).sqrt();
        }
        self.outline().width(v)
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        match self.source {
            CurveSource::Ellipse { a, b } => Self::ellipse_with(a * t, b * t, self.samples.len()),
            CurveSource::Table => {
                let rows: Vec<[f64; 7]> = self
                    .table_rows()
                    .into_iter()
                    .map(|r| [r[0], r[1] * t, r[2] * t, r[3] * t, r[4] * t, r[5] * t, r[6] * t])
                    .collect();
                Self::from_table(&rows)
            }
        }
    }

    /// Rows (t, x, y, x', y', x'', y'') with the closing row appended.
    pub fn table_rows(&self) -> Vec<[f64; 7]> {
        let n = self.samples.len();
        let mut rows: Vec<[f64; 7]> = self
            .samples
            .iter()
            .map(|s| [s.t, s.x, s.y, s.dx, s.dy, s.ddx, s.ddy])
            .collect();
        let last_gap = 2.0 * self.weights[0] - (self.samples[1].t - self.samples[0].t);
        let mut closing = rows[0];
        closing[0] = self.samples[n - 1].t + last_gap;
        rows.push(closing);
        rows
    }
}
