//! Simple polygons: validation, angle data, inradius, bisector tube radius.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type Point = [f64; 2];

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}
fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}
fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// Distance from `p` to the segment [a, b].
pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let l2 = dot(ab, ab);
    let t = if l2 > 0.0 {
        (dot(ap, ab) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    norm([ap[0] - t * ab[0], ap[1] - t * ab[1]])
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    cross(sub(b, a), sub(c, a))
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// Distance between two segments (zero if they intersect).
pub fn segment_segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    segment_distance(a, c, d)
        .min(segment_distance(b, c, d))
        .min(segment_distance(c, a, b))
        .min(segment_distance(d, a, b))
}

/// A simple, counter-clockwise polygon without collinear vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Validates and normalizes the vertex list: drops a repeated closing
    /// vertex and merges collinear vertices. Clockwise input is rejected.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(Error::InvalidDomain("non-finite polygon vertex".into()));
        }
        let mut vs = vertices;
        if vs.len() > 1 && vs.first() == vs.last() {
            vs.pop();
        }
        vs.dedup();
        let scale = vs
            .iter()
            .flat_map(|v| [v[0].abs(), v[1].abs()])
            .fold(0.0f64, f64::max)
            .max(1e-300);
        // merge collinear vertices until none remain
        loop {
            let n = vs.len();
            if n < 3 {
                return Err(Error::InvalidDomain(
                    "polygon needs at least 3 non-collinear vertices".into(),
                ));
            }
            let mut removed = false;
            for i in 0..n {
                let a = vs[(i + n - 1) % n];
                let b = vs[i];
                let c = vs[(i + 1) % n];
                let e1 = sub(b, a);
                let e2 = sub(c, b);
                if cross(e1, e2).abs() <= 1e-14 * scale * scale && dot(e1, e2) > 0.0 {
                    vs.remove(i);
                    removed = true;
                    break;
                }
            }
            if !removed {
                break;
            }
        }
        let p = Self { vertices: vs };
        let area = p.signed_area();
        if area <= 0.0 {
            return Err(Error::InvalidDomain(
                "polygon must be counter-clockwise with positive area".into(),
            ));
        }
        if !p.is_simple() {
            return Err(Error::InvalidDomain("polygon is not simple".into()));
        }
        Ok(p)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge(&self, i: usize) -> (Point, Point) {
        let n = self.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.len();
        0.5 * (0..n)
            .map(|i| cross(self.vertices[i], self.vertices[(i + 1) % n]))
            .sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                norm(sub(b, a))
            })
            .sum()
    }

    fn is_simple(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            let (a, b) = self.edge(i);
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (c, d) = self.edge(j);
                if adjacent {
                    // adjacent edges may only share their common vertex
                    let shared = if j == i + 1 { b } else { a };
                    let (other_a, other_b) = if j == i + 1 { (a, d) } else { (b, c) };
                    let e1 = sub(other_a, shared);
                    let e2 = sub(other_b, shared);
                    if cross(e1, e2) == 0.0 && dot(e1, e2) > 0.0 {
                        return false;
                    }
                    continue;
                }
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    pub fn diameter_scale(&self) -> f64 {
        let (lo, hi) = self.bbox();
        (hi[0] - lo[0]).hypot(hi[1] - lo[1])
    }

    /// Even-odd crossing test; points on the boundary may go either way.
    pub fn contains(&self, p: Point) -> bool {
        let n = self.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[j];
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                segment_distance(p, a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance to the boundary for interior points, negative outside.
    pub fn signed_depth(&self, p: Point) -> f64 {
        let d = self.boundary_distance(p);
        if self.contains(p) {
            d
        } else {
            -d
        }
    }

    /// Turning angle at each vertex, in (-π, π); positive for convex vertices.
    fn turns(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[(i + n - 1) % n];
                let b = self.vertices[i];
                let c = self.vertices[(i + 1) % n];
                let e1 = sub(b, a);
                let e2 = sub(c, b);
                cross(e1, e2).atan2(dot(e1, e2))
            })
            .collect()
    }

    /// Interior angles in (0, 2π).
    pub fn interior_angles(&self) -> Vec<f64> {
        self.turns().into_iter().map(|t| PI - t).collect()
    }

    pub fn is_convex(&self) -> bool {
        self.turns().iter().all(|&t| t > 0.0)
    }

    /// (S_A, S_B): Σ cot(α/2) over convex angles and Σ (β−π)/2 over reflex ones.
    pub fn angle_sums(&self) -> (f64, f64) {
        let mut sa = 0.0;
        let mut sb = 0.0;
        for a in self.interior_angles() {
            if a < PI {
                sa += 1.0 / (a / 2.0).tan();
            } else {
                sb += (a - PI) / 2.0;
            }
        }
        (sa, sb)
    }

    /// Unit direction of the interior angle bisector at vertex `i`.
    fn bisector(&self, i: usize) -> Point {
        let n = self.len();
        let v = self.vertices[i];
        let a = sub(self.vertices[(i + n - 1) % n], v);
        let b = sub(self.vertices[(i + 1) % n], v);
        let (la, lb) = (norm(a), norm(b));
        let mut s = [a[0] / la + b[0] / lb, a[1] / la + b[1] / lb];
        let turn = cross(
            sub(v, self.vertices[(i + n - 1) % n]),
            sub(self.vertices[(i + 1) % n], v),
        );
        if turn < 0.0 {
            s = [-s[0], -s[1]];
        }
        let l = norm(s);
        [s[0] / l, s[1] / l]
    }

    /// Intersection points of consecutive bisector lines that lie strictly
    /// inside the polygon.
    pub fn bisector_intersections(&self) -> Vec<Point> {
        let n = self.len();
        let tol = 1e-12 * self.diameter_scale();
        let mut out = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            let (p, d1) = (self.vertices[i], self.bisector(i));
            let (q, d2) = (self.vertices[j], self.bisector(j));
            let den = cross(d1, d2);
            if den.abs() < 1e-14 {
                continue;
            }
            let s = cross(sub(q, p), d2) / den;
            let o = [p[0] + s * d1[0], p[1] + s * d1[1]];
            if self.contains(o) && self.boundary_distance(o) > tol {
                out.push(o);
            }
        }
        out
    }

    /// Smallest boundary distance over interior bisector intersections, or
    /// `None` if every intersection falls outside.
    pub fn bisector_tube_radius(&self) -> Option<f64> {
        self.bisector_intersections()
            .into_iter()
            .map(|o| self.boundary_distance(o))
            .reduce(f64::min)
    }

    /// Largest `h` below which the polygon tube formula is exact. For convex
    /// polygons this is the bisector radius; otherwise it is additionally
    /// capped by edge collapse and by half the gap between non-adjacent edges.
    pub fn tube_formula_radius(&self) -> (f64, bool) {
        let bis = self.bisector_tube_radius();
        let fallback = bis.is_none();
        let mut h = bis.unwrap_or_else(|| self.inradius());
        if self.is_convex() {
            return (h, fallback);
        }
        let n = self.len();
        let angles = self.interior_angles();
        let cot_half = |a: f64| if a < PI { 1.0 / (a / 2.0).tan() } else { 0.0 };
        for i in 0..n {
            let (a, b) = self.edge(i);
            let c = cot_half(angles[i]) + cot_half(angles[(i + 1) % n]);
            if c > 0.0 {
                h = h.min(norm(sub(b, a)) / c);
            }
        }
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = self.edge(i);
                let (c, d) = self.edge(j);
                h = h.min(0.5 * segment_segment_distance(a, b, c, d));
            }
        }
        (h, fallback)
    }

    /// Closed-form tube area h|∂Ω| − h²S_A + h²S_B.
    pub fn tube_area_formula(&self, h: f64) -> f64 {
        let (sa, sb) = self.angle_sums();
        h * self.perimeter() - h * h * sa + h * h * sb
    }

    /// Radius of the largest inscribed disk: coarse grid, then compass
    /// search from the best grid points and bisector intersections.
    pub fn inradius(&self) -> f64 {
        self.inradius_center().1
    }

    pub fn inradius_center(&self) -> (Point, f64) {
        let (lo, hi) = self.bbox();
        let m = 64;
        let dx = (hi[0] - lo[0]) / m as f64;
        let dy = (hi[1] - lo[1]) / m as f64;
        let mut cands: Vec<(f64, Point)> = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let p = [lo[0] + (i as f64 + 0.5) * dx, lo[1] + (j as f64 + 0.5) * dy];
                let d = self.signed_depth(p);
                if d > 0.0 {
                    cands.push((d, p));
                }
            }
        }
        cands.sort_by(|a, b| b.0.total_cmp(&a.0));
        cands.truncate(12);
        for o in self.bisector_intersections() {
            cands.push((self.signed_depth(o), o));
        }
        let step0 = dx.max(dy);
        let tol = 1e-14 * self.diameter_scale();
        let mut best = (self.vertices[0], 0.0);
        for (d0, p0) in cands {
            let (p, d) = compass_maximize(|q| self.signed_depth(q), p0, d0, step0, tol);
            if d > best.1 {
                best = (p, d);
            }
        }
        best
    }

    /// Width of the polygon in direction `v` (unit).
    pub fn width(&self, v: Point) -> f64 {
        let proj: Vec<f64> = self.vertices.iter().map(|p| dot(*p, v)).collect();
        let mx = proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mn = proj.iter().cloned().fold(f64::INFINITY, f64::min);
        mx - mn
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| [v[0] * t, v[1] * t]).collect(),
        }
    }
}

/// Derivative-free maximization by compass search with step halving.
pub(crate) fn compass_maximize<F: Fn(Point) -> f64>(
    f: F,
    mut p: Point,
    mut fp: f64,
    mut step: f64,
    tol: f64,
) -> (Point, f64) {
    use std::f64::consts::FRAC_1_SQRT_2;
    let dirs: [Point; 8] = [
        [1.0, 0.0],
        [-1.0, 0.0],
        [0.0, 1.0],
        [0.0, -1.0],
        [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        [-FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
        [-FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    ];
    let mut iters = 0;
    while step > tol && iters < 10_000 {
        iters += 1;
        let mut improved = false;
        for d in dirs {
            let q = [p[0] + step * d[0], p[1] + step * d[1]];
            let fq = f(q);
            if fq > fp {
                p = q;
                fp = fq;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (p, fp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polygon {
        Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    fn l_shape() -> Polygon {
        Polygon::new(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ])
        .unwrap()
    }

    #[test]
    fn square_basics() {
        let p = square();
        assert_eq!(p.area(), 1.0);
        assert_eq!(p.perimeter(), 4.0);
        let (sa, sb) = p.angle_sums();
        assert!((sa - 4.0).abs() < 1e-12);
        assert_eq!(sb, 0.0);
        assert!(p.is_convex());
        assert!((p.inradius() - 0.5).abs() < 1e-10);
        assert!((p.bisector_tube_radius().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_clockwise_and_self_intersecting() {
        assert!(Polygon::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).is_err());
        let bowtie = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(Polygon::new(bowtie).is_err());
    }

    #[test]
    fn merges_collinear() {
        let p = Polygon::new(vec![[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn l_shape_reflex_sum() {
        let p = l_shape();
        let (sa, sb) = p.angle_sums();
        assert!((sa - 5.0).abs() < 1e-12);
        assert!((sb - PI / 4.0).abs() < 1e-12);
        assert!(!p.is_convex());
        // largest inscribed disk of the L touches both outer sides and the
        // reflex corner
        let r = p.inradius();
        let exact = 1.0 / (2.0 + 2f64.sqrt()) * 2.0;
        assert!((r - exact).abs() < 1e-9, "{r} vs {exact}");
    }

    #[test]
    fn triangle_width() {
        let p = Polygon::new(vec![[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!((p.width([0.0, 1.0]) - 1.0).abs() < 1e-15);
        assert!((p.width([1.0, 0.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_inradius_matches_area_over_semiperimeter() {
        let p = Polygon::new(vec![[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]]).unwrap();
        let r = 2.0 * p.area() / p.perimeter();
        assert!((p.inradius() - r).abs() < 1e-10);
    }
}
