//! Triangulated Riemannian surfaces.
//!
//! The metric of a [`MetricSurface`] is stored per triangle as the Gram matrix
//! of its two edge vectors `e1 = v1 − v0`, `e2 = v2 − v0`. Surfaces built from
//! exact edge lengths (flat tori, glued hyperbolic polygons, geodesic discs)
//! derive the Gram matrix from the three lengths; chart-based surfaces (warped
//! products) integrate the metric tensor with a three point rule. Both feed the
//! same finite element assembly. Edge lengths used by path computations are
//! stored separately, one per undirected edge.

mod conformal;
mod cover;
mod generators;
mod subsurface;

use std::collections::HashMap;

use thiserror::Error;

use crate::real::Real;

pub use conformal::ConformalFactor;
pub use cover::{build_exhaustion, cut_sides, glue_sheets, CoverKind, CutSides, ExhaustionFamily, SheetLayout};
pub use generators::{
    make_flat_disc, make_flat_torus, make_geodesic_disc, make_hyperbolic_disc, make_hyperbolic_octagon,
    make_klein_bottle, make_round_sphere, make_warped_cylinder, octagon_geometry, OctagonGeometry,
    WarpedCylinderSpec,
};
pub use subsurface::{extract_subsurface, Incompressibility, Subsurface, SubsurfaceSummary, TopoClass};

pub const NONE: usize = usize::MAX;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("triangle {0} is degenerate under the metric")]
    DegenerateTriangle(usize),
    #[error("triangle {0} violates the strict triangle inequality")]
    TriangleInequality(usize),
    #[error("edge ({0}, {1}) has more than two incident triangles")]
    NonManifoldEdge(usize, usize),
    #[error("triangle {0} repeats a vertex")]
    RepeatedVertex(usize),
    #[error("lattice basis is degenerate")]
    DegenerateLattice,
    #[error("warping function must be positive, got {0} at x = {1}")]
    NonPositiveWarp(f64, f64),
    #[error("conformal factor must be positive, got {0}")]
    NonPositiveFactor(f64),
    #[error("conformal factor must equal 1 on the declared core")]
    FactorNotOneOnCore,
    #[error("selection is empty")]
    EmptySelection,
    #[error("operation requires topological class {expected}, got {got}")]
    WrongClass { expected: &'static str, got: String },
    #[error("cut loop separates the surface")]
    SeparatingLoop,
    #[error("cut path is not simple")]
    NonSimpleLoop,
    #[error("cut loop is one-sided")]
    OneSidedLoop,
    #[error("consecutive path vertices {0} and {1} are not joined by an edge")]
    NotAnEdge(usize, usize),
    #[error("radii must be strictly increasing")]
    NonIncreasingRadii,
    #[error("surface has no radial coordinate for its ends")]
    MissingRadialCoordinate,
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

/// Triangle mesh with a discrete Riemannian metric.
#[derive(Debug, Clone)]
pub struct MetricSurface<T> {
    pub(crate) name: String,
    pub(crate) n_vertices: usize,
    pub(crate) triangles: Vec<[usize; 3]>,
    pub(crate) gram: Vec<[T; 3]>,
    pub(crate) edges: Vec<[usize; 2]>,
    pub(crate) tri_edges: Vec<[usize; 3]>,
    pub(crate) edge_tris: Vec<[usize; 2]>,
    pub(crate) edge_length: Vec<T>,
    pub(crate) adjacency: Vec<Vec<(usize, usize)>>,
    pub(crate) coords: Vec<[T; 2]>,
    pub(crate) curvature: Option<Vec<T>>,
    pub(crate) radial: Option<Vec<T>>,
    pub(crate) boundary_loops: Vec<Vec<usize>>,
    pub(crate) orientable: bool,
    pub(crate) flip: Vec<bool>,
}

/// Gram entries `(g11, g12, g22)` of a triangle with side lengths
/// `l01`, `l12`, `l20`.
pub fn gram_from_lengths<T: Real>(l01: T, l12: T, l20: T) -> [T; 3] {
    let a = l01 * l01;
    let c = l20 * l20;
    [a, (a + c - l12 * l12) / T::lit(2.0), c]
}

impl<T: Real> MetricSurface<T> {
    /// Builds a surface from per-triangle exact side lengths
    /// `[|v0v1|, |v1v2|, |v2v0|]`. Shared edges take the mean of the values
    /// reported by their incident triangles.
    pub fn from_edge_lengths(
        name: impl Into<String>,
        n_vertices: usize,
        triangles: Vec<[usize; 3]>,
        lengths: Vec<[T; 3]>,
        coords: Vec<[T; 2]>,
    ) -> Result<Self, SurfaceError> {
        for (t, l) in lengths.iter().enumerate() {
            let [a, b, c] = *l;
            if !(a + b > c && b + c > a && c + a > b) {
                return Err(SurfaceError::TriangleInequality(t));
            }
        }
        let gram = lengths.iter().map(|l| gram_from_lengths(l[0], l[1], l[2])).collect();
        let mut s = Self::assemble_topology(name.into(), n_vertices, triangles, gram, coords)?;
        let mut sum = vec![T::zero(); s.edges.len()];
        let mut cnt = vec![0usize; s.edges.len()];
        for (t, te) in s.tri_edges.iter().enumerate() {
            for k in 0..3 {
                sum[te[k]] += lengths[t][k];
                cnt[te[k]] += 1;
            }
        }
        s.edge_length = sum.iter().zip(&cnt).map(|(&x, &c)| x / T::from_usize_lossy(c)).collect();
        Ok(s)
    }

    /// Builds a surface from per-triangle Gram matrices and independently
    /// computed edge lengths (indexed by the sorted vertex pair).
    pub fn from_gram(
        name: impl Into<String>,
        n_vertices: usize,
        triangles: Vec<[usize; 3]>,
        gram: Vec<[T; 3]>,
        edge_length: impl Fn(usize, usize) -> T,
        coords: Vec<[T; 2]>,
    ) -> Result<Self, SurfaceError> {
        let mut s = Self::assemble_topology(name.into(), n_vertices, triangles, gram, coords)?;
        s.edge_length = s.edges.iter().map(|e| edge_length(e[0], e[1])).collect();
        Ok(s)
    }

    fn assemble_topology(
        name: String,
        n_vertices: usize,
        triangles: Vec<[usize; 3]>,
        gram: Vec<[T; 3]>,
        coords: Vec<[T; 2]>,
    ) -> Result<Self, SurfaceError> {
        assert_eq!(triangles.len(), gram.len());
        for (t, g) in gram.iter().enumerate() {
            let det = g[0] * g[2] - g[1] * g[1];
            if !(g[0] > T::zero() && g[2] > T::zero() && det > T::zero()) || !det.is_finite() {
                return Err(SurfaceError::DegenerateTriangle(t));
            }
        }
        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_tris: Vec<[usize; 2]> = Vec::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[2] == tri[0] {
                return Err(SurfaceError::RepeatedVertex(t));
            }
            let mut te = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_tris.push([NONE, NONE]);
                    edges.len() - 1
                });
                let slot = &mut edge_tris[e];
                if slot[0] == NONE {
                    slot[0] = t;
                } else if slot[1] == NONE {
                    slot[1] = t;
                } else {
                    return Err(SurfaceError::NonManifoldEdge(key.0, key.1));
                }
                te[k] = e;
            }
            tri_edges.push(te);
        }
        let mut adjacency = vec![Vec::new(); n_vertices];
        for (e, &[a, b]) in edges.iter().enumerate() {
            adjacency[a].push((b, e));
            adjacency[b].push((a, e));
        }
        for adj in adjacency.iter_mut() {
            adj.sort_unstable();
        }
        let mut s = Self {
            name,
            n_vertices,
            triangles,
            gram,
            edges,
            tri_edges,
            edge_tris,
            edge_length: Vec::new(),
            adjacency,
            coords,
            curvature: None,
            radial: None,
            boundary_loops: Vec::new(),
            orientable: true,
            flip: Vec::new(),
        };
        s.boundary_loops = s.trace_boundary_loops();
        let (orientable, flip) = s.propagate_orientation();
        s.orientable = orientable;
        s.flip = flip;
        Ok(s)
    }

    fn trace_boundary_loops(&self) -> Vec<Vec<usize>> {
        let bedges: Vec<usize> = (0..self.edges.len()).filter(|&e| self.edge_tris[e][1] == NONE).collect();
        let mut used = vec![false; self.edges.len()];
        let mut by_vertex: HashMap<usize, Vec<usize>> = HashMap::new();
        for &e in &bedges {
            for &v in &self.edges[e] {
                by_vertex.entry(v).or_default().push(e);
            }
        }
        let mut loops = Vec::new();
        for &e0 in &bedges {
            if used[e0] {
                continue;
            }
            used[e0] = true;
            let start = self.edges[e0][0];
            let mut lp = vec![start];
            let mut cur = self.edges[e0][1];
            while cur != start {
                lp.push(cur);
                let next = by_vertex[&cur].iter().copied().find(|&e| !used[e]);
                match next {
                    Some(e) => {
                        used[e] = true;
                        let [a, b] = self.edges[e];
                        cur = if a == cur { b } else { a };
                    }
                    None => break,
                }
            }
            loops.push(lp);
        }
        loops
    }

    /// Returns `(orientable, flip)` where flipping the flagged triangles
    /// makes shared edges traversed in opposite directions wherever possible.
    fn propagate_orientation(&self) -> (bool, Vec<bool>) {
        let nt = self.triangles.len();
        let mut flip = vec![false; nt];
        let mut seen = vec![false; nt];
        let mut orientable = true;
        for root in 0..nt {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut stack = vec![root];
            while let Some(t) = stack.pop() {
                for k in 0..3 {
                    let e = self.tri_edges[t][k];
                    let other = self.other_triangle(e, t);
                    if other == NONE {
                        continue;
                    }
                    let dir_t = self.edge_direction(t, e) ^ flip[t];
                    let want = !dir_t;
                    let raw = self.edge_direction(other, e);
                    let need_flip = raw != want;
                    if !seen[other] {
                        seen[other] = true;
                        flip[other] = need_flip;
                        stack.push(other);
                    } else if flip[other] != need_flip {
                        orientable = false;
                    }
                }
            }
        }
        (orientable, flip)
    }

    /// `true` when triangle `t` (in its stored order) traverses edge `e`
    /// from its lower to its higher vertex index.
    pub(crate) fn edge_direction(&self, t: usize, e: usize) -> bool {
        let tri = self.triangles[t];
        let k = self.tri_edges[t].iter().position(|&x| x == e).expect("edge of triangle");
        tri[k] < tri[(k + 1) % 3]
    }

    pub(crate) fn other_triangle(&self, e: usize, t: usize) -> usize {
        let [a, b] = self.edge_tris[e];
        if a == t {
            b
        } else {
            a
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn gram(&self, t: usize) -> [T; 3] {
        self.gram[t]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_length(&self, e: usize) -> T {
        self.edge_length[e]
    }

    pub fn edge_lengths(&self) -> &[T] {
        &self.edge_length
    }

    pub fn tri_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }

    pub fn edge_triangles(&self, e: usize) -> [usize; 2] {
        self.edge_tris[e]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_tris[e][1] == NONE
    }

    /// Neighbours of `v` as `(vertex, edge)` pairs.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a]
            .binary_search_by_key(&b, |&(w, _)| w)
            .ok()
            .map(|i| self.adjacency[a][i].1)
    }

    pub fn coords(&self) -> &[[T; 2]] {
        &self.coords
    }

    pub fn curvature(&self) -> Option<&[T]> {
        self.curvature.as_deref()
    }

    pub fn with_curvature(mut self, k: Vec<T>) -> Self {
        assert_eq!(k.len(), self.triangles.len());
        self.curvature = Some(k);
        self
    }

    pub fn with_constant_curvature(self, k: T) -> Self {
        let n = self.triangles.len();
        self.with_curvature(vec![k; n])
    }

    pub fn radial(&self) -> Option<&[T]> {
        self.radial.as_deref()
    }

    pub fn with_radial(mut self, r: Vec<T>) -> Self {
        assert_eq!(r.len(), self.n_vertices);
        self.radial = Some(r);
        self
    }

    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.boundary_loops
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_loops.is_empty()
    }

    pub fn is_orientable(&self) -> bool {
        self.orientable
    }

    /// Triangle `t` with vertices in the propagated orientation.
    pub fn oriented_triangle(&self, t: usize) -> [usize; 3] {
        let [a, b, c] = self.triangles[t];
        if self.flip.get(t).copied().unwrap_or(false) {
            [a, c, b]
        } else {
            [a, b, c]
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    pub fn triangle_area(&self, t: usize) -> T {
        let g = self.gram[t];
        (g[0] * g[2] - g[1] * g[1]).sqrt() / T::lit(2.0)
    }

    pub fn area(&self) -> T {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Side lengths `[|v0v1|, |v1v2|, |v2v0|]` of triangle `t` under its own metric.
    pub fn local_lengths(&self, t: usize) -> [T; 3] {
        let g = self.gram[t];
        let l12 = (g[0] + g[2] - T::lit(2.0) * g[1]).max(T::zero()).sqrt();
        [g[0].sqrt(), l12, g[2].sqrt()]
    }

    /// Interior angles at `v0`, `v1`, `v2`.
    pub fn angles(&self, t: usize) -> [T; 3] {
        let g = self.gram[t];
        let [l01, l12, l20] = self.local_lengths(t);
        let clamp = |x: T| x.max(-T::one()).min(T::one());
        let a0 = clamp(g[1] / (l01 * l20)).acos();
        let a1 = clamp((g[0] - g[1]) / (l01 * l12)).acos();
        let a2 = clamp((g[2] - g[1]) / (l12 * l20)).acos();
        [a0, a1, a2]
    }

    /// Longest edge length, used as the mesh size `h`.
    pub fn mesh_size(&self) -> T {
        (0..self.triangles.len())
            .flat_map(|t| self.local_lengths(t))
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Total length of a closed vertex cycle.
    pub fn loop_length(&self, cycle: &[usize]) -> Result<T, SurfaceError> {
        let mut s = T::zero();
        for i in 0..cycle.len() {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            let e = self.edge_between(a, b).ok_or(SurfaceError::NotAnEdge(a, b))?;
            s += self.edge_length[e];
        }
        Ok(s)
    }

    /// Gauss–Bonnet residual `Σ K·area + boundary turning − 2πχ`, with the
    /// boundary turning measured from the discrete angles at boundary
    /// vertices. Returns `None` without a curvature field.
    pub fn gauss_bonnet_residual(&self) -> Option<T> {
        let k = self.curvature.as_ref()?;
        let interior: T = (0..self.triangles.len()).map(|t| k[t] * self.triangle_area(t)).sum();
        let mut angle_sum = vec![T::zero(); self.n_vertices];
        for t in 0..self.triangles.len() {
            let a = self.angles(t);
            for (i, &v) in self.triangles[t].iter().enumerate() {
                angle_sum[v] += a[i];
            }
        }
        let turning: T = self
            .boundary_loops
            .iter()
            .flatten()
            .map(|&v| T::PI() - angle_sum[v])
            .sum();
        let chi = T::from_i64(self.euler_characteristic()).unwrap();
        Some(interior + turning - T::lit(2.0) * T::PI() * chi)
    }

    /// Restricts the surface to a triangle subset, returning the new surface
    /// and the map from new vertex ids to parent vertex ids.
    pub fn restrict(&self, tris: &[usize]) -> Result<(MetricSurface<T>, Vec<usize>), SurfaceError> {
        if tris.is_empty() {
            return Err(SurfaceError::EmptySelection);
        }
        let mut local = vec![NONE; self.n_vertices];
        let mut back = Vec::new();
        let mut triangles = Vec::with_capacity(tris.len());
        for &t in tris {
            let mut nt = [0usize; 3];
            for (k, &v) in self.triangles[t].iter().enumerate() {
                if local[v] == NONE {
                    local[v] = back.len();
                    back.push(v);
                }
                nt[k] = local[v];
            }
            triangles.push(nt);
        }
        let gram = tris.iter().map(|&t| self.gram[t]).collect();
        let coords = back.iter().map(|&v| self.coords[v]).collect();
        let lens: HashMap<(usize, usize), T> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| local[e[0]] != NONE && local[e[1]] != NONE)
            .map(|(i, e)| {
                let (a, b) = (local[e[0]], local[e[1]]);
                ((a.min(b), a.max(b)), self.edge_length[i])
            })
            .collect();
        let mut s = MetricSurface::from_gram(
            format!("{}|restricted", self.name),
            back.len(),
            triangles,
            gram,
            |a, b| lens[&(a, b)],
            coords,
        )?;
        if let Some(k) = &self.curvature {
            s.curvature = Some(tris.iter().map(|&t| k[t]).collect());
        }
        if let Some(r) = &self.radial {
            s.radial = Some(back.iter().map(|&v| r[v]).collect());
        }
        Ok((s, back))
    }

    /// Writes the mesh in OFF format using the chart coordinates (z = 0).
    pub fn to_off(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "OFF").unwrap();
        writeln!(out, "{} {} {}", self.n_vertices, self.triangles.len(), self.edges.len()).unwrap();
        for c in &self.coords {
            writeln!(out, "{} {} 0", c[0].as_f64(), c[1].as_f64()).unwrap();
        }
        for t in &self.triangles {
            writeln!(out, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
        }
        out
    }

    /// Auxiliary edge-length table accompanying the OFF export.
    pub fn edge_length_table(&self) -> String {
        let mut out = String::from("u,v,length\n");
        for (e, l) in self.edges.iter().zip(&self.edge_length) {
            out.push_str(&format!("{},{},{}\n", e[0], e[1], l.as_f64()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> MetricSurface<f64> {
        MetricSurface::from_edge_lengths(
            "square",
            4,
            vec![[0, 1, 2], [0, 2, 3]],
            vec![[1.0, 1.0, 2f64.sqrt()], [2f64.sqrt(), 1.0, 1.0]],
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        )
        .unwrap()
    }

    #[test]
    fn square_topology() {
        let s = square();
        assert_eq!(s.n_edges(), 5);
        assert_eq!(s.euler_characteristic(), 1);
        assert_eq!(s.boundary_loops().len(), 1);
        assert_eq!(s.boundary_loops()[0].len(), 4);
        assert!(s.is_orientable());
        assert!((s.area() - 1.0).abs() < 1e-15);
        let a = s.angles(0);
        assert!((a[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn triangle_inequality_is_enforced() {
        let r = MetricSurface::<f64>::from_edge_lengths("bad", 3, vec![[0, 1, 2]], vec![[1.0, 1.0, 2.0]], vec![[0.0; 2]; 3]);
        assert_eq!(r.unwrap_err(), SurfaceError::TriangleInequality(0));
    }

    #[test]
    fn non_manifold_edge_rejected() {
        let l = [1.0, 1.0, 1.0];
        let r = MetricSurface::<f64>::from_edge_lengths(
            "fin",
            5,
            vec![[0, 1, 2], [0, 1, 3], [0, 1, 4]],
            vec![l; 3],
            vec![[0.0; 2]; 5],
        );
        assert!(matches!(r, Err(SurfaceError::NonManifoldEdge(0, 1))));
    }

    #[test]
    fn off_export_has_header_and_counts() {
        let s = square();
        let off = s.to_off();
        assert!(off.starts_with("OFF\n4 2 5\n"));
        assert_eq!(s.edge_length_table().lines().count(), 6);
    }
}
