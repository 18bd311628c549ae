//! Shortest edge paths and first-order eikonal distances.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::real::Real;
use crate::surface::{MetricSurface, NONE};

#[derive(Clone, Copy)]
pub(super) struct Entry<T>(pub T, pub usize);

impl<T: PartialOrd> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: PartialOrd> Eq for Entry<T> {}

impl<T: PartialOrd> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: PartialOrd> Ord for Entry<T> {
    /// Reversed so that `BinaryHeap` pops the smallest distance, then the
    /// smallest vertex.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .partial_cmp(&self.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.1.cmp(&self.1))
    }
}

/// Whether edge `e` borders a triangle of the allowed set.
fn edge_allowed<T: Real>(s: &MetricSurface<T>, e: usize, allowed: Option<&[bool]>) -> bool {
    match allowed {
        None => true,
        Some(m) => s.edge_triangles(e).iter().any(|&t| t != NONE && m[t]),
    }
}

/// Shortest-path tree along mesh edges.
#[derive(Debug, Clone)]
pub struct ShortestPaths<T> {
    /// Distance to the nearest source; infinite when unreached.
    pub dist: Vec<T>,
    /// Predecessor vertex, `NONE` at sources and unreached vertices.
    pub parent: Vec<usize>,
    /// Edge to the predecessor, `NONE` at sources and unreached vertices.
    pub parent_edge: Vec<usize>,
    /// Vertices in the order they were settled.
    pub order: Vec<usize>,
}

impl<T: Real> ShortestPaths<T> {
    pub fn reached(&self, v: usize) -> bool {
        self.dist[v].is_finite()
    }

    /// Vertices from `v` back to its source.
    pub fn path_to_source(&self, mut v: usize) -> Vec<usize> {
        let mut out = vec![v];
        while self.parent[v] != NONE {
            v = self.parent[v];
            out.push(v);
        }
        out
    }
}

/// Multi-source Dijkstra on the edge graph, optionally restricted to edges of
/// allowed triangles. Vertices farther than `cutoff` stay unreached.
pub fn dijkstra<T: Real>(
    s: &MetricSurface<T>,
    sources: &[usize],
    allowed: Option<&[bool]>,
    cutoff: Option<T>,
) -> ShortestPaths<T> {
    let n = s.n_vertices();
    let mut dist = vec![T::infinity(); n];
    let mut parent = vec![NONE; n];
    let mut parent_edge = vec![NONE; n];
    let mut done = vec![false; n];
    let mut order = Vec::new();
    let mut heap = BinaryHeap::new();
    for &v in sources {
        dist[v] = T::zero();
        heap.push(Entry(T::zero(), v));
    }
    let limit = cutoff.unwrap_or_else(T::infinity);
    while let Some(Entry(d, u)) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        done[u] = true;
        order.push(u);
        for &(w, e) in s.neighbors(u) {
            if done[w] || !edge_allowed(s, e, allowed) {
                continue;
            }
            let nd = d + s.edge_length(e);
            if nd < dist[w] && nd <= limit {
                dist[w] = nd;
                parent[w] = u;
                parent_edge[w] = e;
                heap.push(Entry(nd, w));
            }
        }
    }
    ShortestPaths {
        dist,
        parent,
        parent_edge,
        order,
    }
}

/// Local shape of the wavefront in the fast-marching triangle update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Front {
    /// Circular front of a virtual point source, exact near point sources.
    Point,
    /// Straight front, exact for distances from a boundary curve.
    Planar,
}

/// Distance at `c` from a wavefront known at `a` and `b`, or `None` when the
/// characteristic through `c` does not cross the segment `ab`.
fn triangle_update<T: Real>(front: Front, ca: T, cb: T, ab: T, ua: T, ub: T) -> Option<T> {
    let two = T::lit(2.0);
    if (ua - ub).abs() >= ab {
        return None;
    }
    // Frame with a at the origin, b on the positive x-axis, c above.
    let cx = (ca * ca - cb * cb + ab * ab) / (two * ab);
    let cy = (ca * ca - cx * cx).max(T::zero()).sqrt();
    match front {
        Front::Point => {
            // Virtual source below the axis at distances ua, ub from a and b.
            let sx = (ua * ua - ub * ub + ab * ab) / (two * ab);
            let sy = -(ua * ua - sx * sx).max(T::zero()).sqrt();
            let cross = sx + (cx - sx) * (-sy) / (cy - sy);
            if cross < T::zero() || cross > ab {
                return None;
            }
            Some(((cx - sx) * (cx - sx) + (cy - sy) * (cy - sy)).sqrt())
        }
        Front::Planar => {
            // Unit gradient of the linear front through (a, ua) and (b, ub).
            let gx = (ub - ua) / ab;
            let gy = (T::one() - gx * gx).sqrt();
            let cross = cx - gx * cy / gy;
            if cross < T::zero() || cross > ab {
                return None;
            }
            Some(ua + gx * cx + gy * cy)
        }
    }
}

/// Fast-marching distances from isolated source points: each vertex takes
/// the smaller of the edge update and the triangle update through every
/// triangle whose other two corners are settled. Restricted to allowed
/// triangles when given.
pub fn eikonal_distances<T: Real>(s: &MetricSurface<T>, sources: &[usize], allowed: Option<&[bool]>) -> Vec<T> {
    march(s, sources, allowed, Front::Point)
}

/// Fast-marching distances from a curve through `sources`, such as a
/// boundary or a closed loop.
pub fn curve_distances<T: Real>(s: &MetricSurface<T>, sources: &[usize], allowed: Option<&[bool]>) -> Vec<T> {
    march(s, sources, allowed, Front::Planar)
}

fn march<T: Real>(s: &MetricSurface<T>, sources: &[usize], allowed: Option<&[bool]>, front: Front) -> Vec<T> {
    let n = s.n_vertices();
    let mut dist = vec![T::infinity(); n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &v in sources {
        dist[v] = T::zero();
        heap.push(Entry(T::zero(), v));
    }
    while let Some(Entry(d, u)) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        done[u] = true;
        for &(w, e) in s.neighbors(u) {
            if done[w] || !edge_allowed(s, e, allowed) {
                continue;
            }
            let mut best = d + s.edge_length(e);
            for t in s.edge_triangles(e) {
                if t == NONE || allowed.is_some_and(|m| !m[t]) {
                    continue;
                }
                let tri = s.triangle(t);
                let x = tri.iter().copied().find(|&x| x != u && x != w).unwrap();
                if !done[x] {
                    continue;
                }
                let l = s.local_lengths(t);
                let side = |p: usize, q: usize| {
                    let i = tri.iter().position(|&v| v == p).unwrap();
                    let j = tri.iter().position(|&v| v == q).unwrap();
                    match (i.min(j), i.max(j)) {
                        (0, 1) => l[0],
                        (1, 2) => l[1],
                        _ => l[2],
                    }
                };
                if let Some(v) = triangle_update(front, side(w, u), side(w, x), side(u, x), d, dist[x]) {
                    best = best.min(v);
                }
            }
            if best < dist[w] {
                dist[w] = best;
                heap.push(Entry(best, w));
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{make_flat_disc, make_flat_torus};

    #[test]
    fn point_update_recovers_point_source() {
        // Source at (0, −1); a = (0, 0), b = (1, 0), c = (0.5, 1).
        let src = [0.0f64, -1.0];
        let dist = |p: [f64; 2]| ((p[0] - src[0]).powi(2) + (p[1] - src[1]).powi(2)).sqrt();
        let (a, b, c) = ([0.0, 0.0], [1.0, 0.0], [0.5, 1.0]);
        let len = |p: [f64; 2], q: [f64; 2]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        let u = triangle_update(Front::Point, len(c, a), len(c, b), len(a, b), dist(a), dist(b)).unwrap();
        assert!((u - dist(c)).abs() < 1e-12);
    }

    #[test]
    fn planar_update_recovers_line_source() {
        // Front along the line y = 0.3x − 2 moving up.
        let n = [-0.3f64, 1.0];
        let norm = (n[0] * n[0] + n[1] * n[1]).sqrt();
        let dist = |p: [f64; 2]| (n[0] * p[0] + n[1] * p[1] + 2.0) / norm;
        let (a, b, c) = ([0.0, 0.0], [1.0, 0.0], [0.4, 0.8]);
        let len = |p: [f64; 2], q: [f64; 2]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        let u = triangle_update(Front::Planar, len(c, a), len(c, b), len(a, b), dist(a), dist(b)).unwrap();
        assert!((u - dist(c)).abs() < 1e-12);
    }

    #[test]
    fn curve_distances_on_flat_cylinder_are_exact() {
        let s = make_flat_torus([1.0f64, 0.0], [0.0, 1.0], 16).unwrap();
        // Vertices on the row y = 0 form a closed geodesic.
        let row: Vec<usize> = (0..16).collect();
        let d = curve_distances(&s, &row, None);
        for v in 0..s.n_vertices() {
            let k = v / 16;
            let exact = k.min(16 - k) as f64 / 16.0;
            assert!((d[v] - exact).abs() < 1e-12, "{v}: {} vs {exact}", d[v]);
        }
    }

    #[test]
    fn dijkstra_on_disc_radial_edges_is_exact() {
        let s = make_flat_disc(1.0f64, 16).unwrap();
        let sp = dijkstra(&s, &[0], None, None);
        for &v in &s.boundary_loops()[0] {
            assert!((sp.dist[v] - 1.0).abs() < 1e-12);
        }
        let path = sp.path_to_source(s.boundary_loops()[0][0]);
        assert_eq!(*path.last().unwrap(), 0);
    }

    #[test]
    fn eikonal_beats_graph_metric_on_torus() {
        let n = 32;
        let s = make_flat_torus([1.0f64, 0.0], [0.0, 1.0], n).unwrap();
        let graph = dijkstra(&s, &[0], None, None);
        let eik = eikonal_distances(&s, &[0], None);
        // Vertex (8, 4): Euclidean distance √80 / 32.
        let v = 8 + 4 * n;
        let exact = 80f64.sqrt() / n as f64;
        assert!(graph.dist[v] - exact > 0.02);
        assert!((eik[v] - exact).abs() < 0.01, "{} vs {exact}", eik[v]);
        assert!((0..s.n_vertices()).all(|v| eik[v] <= graph.dist[v] + 1e-12));
    }

    #[test]
    fn cutoff_limits_reach() {
        let s = make_flat_torus([1.0f64, 0.0], [0.0, 1.0], 16).unwrap();
        let sp = dijkstra(&s, &[0], None, Some(0.2));
        assert!(sp.order.iter().all(|&v| sp.dist[v] <= 0.2));
        assert!(sp.order.len() < s.n_vertices());
    }
}
