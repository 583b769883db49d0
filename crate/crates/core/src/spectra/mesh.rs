//! Triangular meshes of simple polygons.

use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};
use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOptions {
    /// Target edge length of the base mesh.
    pub target_h: f64,
    pub min_angle_deg: f64,
}

impl MeshOptions {
    pub fn new(target_h: f64) -> Self {
        Self {
            target_h,
            min_angle_deg: 25.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Point>,
    /// Counter-clockwise triangles.
    pub triangles: Vec<[usize; 3]>,
    pub on_boundary: Vec<bool>,
}

fn tri_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl Mesh {
    /// Constrained Delaunay refinement with a minimum-angle and maximum-area
    /// criterion; boundary vertices stay on the polygon edges.
    pub fn build(polygon: &Polygon, opts: MeshOptions) -> Result<Self> {
        if !(opts.target_h > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "target_h must be positive, got {}",
                opts.target_h
            )));
        }
        let verts = polygon.vertices();
        let n = verts.len();
        // Pre-split long edges so boundary resolution matches target_h.
        let mut pts: Vec<Point2<f64>> = Vec::new();
        for i in 0..n {
            let a = verts[i];
            let b = verts[(i + 1) % n];
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            let m = (len / opts.target_h).ceil().max(1.0) as usize;
            for s in 0..m {
                let t = s as f64 / m as f64;
                pts.push(Point2::new(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])));
            }
        }
        let np = pts.len();
        let edges: Vec<[usize; 2]> = (0..np).map(|i| [i, (i + 1) % np]).collect();
        let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> =
            ConstrainedDelaunayTriangulation::bulk_load_cdt(pts, edges)
                .map_err(|e| Error::Mesh(format!("constrained triangulation failed: {e:?}")))?;
        let max_area = opts.target_h * opts.target_h * 3f64.sqrt() / 4.0;
        let params = RefinementParameters::<f64>::new()
            .with_angle_limit(AngleLimit::from_deg(opts.min_angle_deg))
            .with_max_allowed_area(max_area)
            .exclude_outer_faces(true)
            .with_max_additional_vertices(2_000_000);
        let res = cdt.refine(params);
        if !res.refinement_complete {
            return Err(Error::Mesh("refinement ran out of vertices".into()));
        }
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut nodes = Vec::new();
        let mut triangles = Vec::new();
        for face in cdt.inner_faces() {
            let vs = face.vertices();
            let p: Vec<Point> = vs.iter().map(|v| [v.position().x, v.position().y]).collect();
            let c = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
            if !polygon.contains(c) {
                continue;
            }
            let mut t = [0usize; 3];
            for (k, v) in vs.iter().enumerate() {
                let id = v.fix().index();
                let next = nodes.len();
                t[k] = *index.entry(id).or_insert_with(|| {
                    nodes.push(p[k]);
                    next
                });
            }
            if tri_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]) < 0.0 {
                t.swap(1, 2);
            }
            triangles.push(t);
        }
        if triangles.is_empty() {
            return Err(Error::Mesh("no triangles inside the polygon".into()));
        }
        let mut mesh = Mesh {
            on_boundary: vec![false; nodes.len()],
            nodes,
            triangles,
        };
        mesh.mark_boundary();
        let covered: f64 = mesh.area();
        if (covered - polygon.area()).abs() > 1e-9 * polygon.area() {
            return Err(Error::Mesh(format!(
                "mesh covers area {covered}, polygon area {}",
                polygon.area()
            )));
        }
        Ok(mesh)
    }

    /// Nodes on edges that belong to exactly one triangle.
    fn mark_boundary(&mut self) {
        let mut count: HashMap<(usize, usize), u32> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        self.on_boundary = vec![false; self.nodes.len()];
        for ((a, b), c) in count {
            if c == 1 {
                self.on_boundary[a] = true;
                self.on_boundary[b] = true;
            }
        }
    }

    /// Red refinement: every triangle split into four similar ones.
    pub fn refine_uniform(&self) -> Mesh {
        let mut nodes = self.nodes.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, nodes: &mut Vec<Point>| -> usize {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let p = [0.5 * (nodes[a][0] + nodes[b][0]), 0.5 * (nodes[a][1] + nodes[b][1])];
                nodes.push(p);
                nodes.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = midpoint(a, b, &mut nodes);
            let bc = midpoint(b, c, &mut nodes);
            let ca = midpoint(c, a, &mut nodes);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        let mut m = Mesh {
            on_boundary: vec![false; nodes.len()],
            nodes,
            triangles,
        };
        m.mark_boundary();
        m
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| tri_area(self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]))
            .sum()
    }

    pub fn min_angle_deg(&self) -> f64 {
        let mut best = 180.0f64;
        for t in &self.triangles {
            for k in 0..3 {
                let p = self.nodes[t[k]];
                let q = self.nodes[t[(k + 1) % 3]];
                let r = self.nodes[t[(k + 2) % 3]];
                let u = [q[0] - p[0], q[1] - p[1]];
                let v = [r[0] - p[0], r[1] - p[1]];
                let ang = (u[0] * v[1] - u[1] * v[0]).abs().atan2(u[0] * v[0] + u[1] * v[1]);
                best = best.min(ang.to_degrees());
            }
        }
        best
    }

    pub fn max_edge(&self) -> f64 {
        let mut h = 0.0f64;
        for t in &self.triangles {
            for k in 0..3 {
                let p = self.nodes[t[k]];
                let q = self.nodes[t[(k + 1) % 3]];
                h = h.max((q[0] - p[0]).hypot(q[1] - p[1]));
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn mesh_quality_and_cover() {
        let m = Mesh::build(&l_shape(), MeshOptions::new(0.2)).unwrap();
        assert!((m.area() - 3.0).abs() < 1e-12);
        assert!(m.min_angle_deg() >= 25.0 - 1e-6, "min angle {}", m.min_angle_deg());
        assert!(m
            .triangles
            .iter()
            .all(|t| tri_area(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]) > 0.0));
        let poly = l_shape();
        for (p, &b) in m.nodes.iter().zip(&m.on_boundary) {
            assert_eq!(b, poly.boundary_distance(*p) < 1e-12, "node {p:?}");
        }
    }

    #[test]
    fn red_refinement_halves_and_keeps_angles() {
        let m = Mesh::build(&l_shape(), MeshOptions::new(0.3)).unwrap();
        let r = m.refine_uniform();
        assert_eq!(r.triangles.len(), 4 * m.triangles.len());
        assert!((r.max_edge() - 0.5 * m.max_edge()).abs() < 1e-12);
        assert!((r.min_angle_deg() - m.min_angle_deg()).abs() < 1e-9);
        assert!((r.area() - 3.0).abs() < 1e-12);
    }
}
