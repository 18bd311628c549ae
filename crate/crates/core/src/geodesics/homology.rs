//! First homology of a triangulated surface via a tree–cotree decomposition.
//!
//! Every edge `e = (lo, hi)` is oriented from its lower to its higher vertex
//! and receives a coordinate vector `c(e)`; the class of a 1-cycle `z` is
//! `Σ z_e c(e)`. Integer coefficients are used on orientable surfaces and
//! ℤ/2 coefficients otherwise. The map kills the boundary of every triangle
//! and is an isomorphism onto `ℤ^g` (resp. `(ℤ/2)^g`).

use std::collections::VecDeque;

use crate::real::Real;
use crate::surface::{MetricSurface, SurfaceError, NONE};

#[derive(Debug, Clone)]
pub struct Homology {
    rank: usize,
    modulus: i64,
    edge_class: Vec<Vec<i64>>,
}

impl Homology {
    pub fn new<T: Real>(s: &MetricSurface<T>) -> Self {
        let nv = s.n_vertices();
        let ne = s.n_edges();
        let nt = s.n_triangles();
        let modulus = if s.is_orientable() { 0 } else { 2 };

        // Primal BFS spanning forest.
        let mut in_tree = vec![false; ne];
        let mut seen = vec![false; nv];
        for root in 0..nv {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut q = VecDeque::from([root]);
            while let Some(v) = q.pop_front() {
                for &(w, e) in s.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        in_tree[e] = true;
                        q.push_back(w);
                    }
                }
            }
        }

        // Dual BFS spanning tree over triangles plus a virtual outer node
        // (index nt) adjacent through boundary edges, avoiding primal tree edges.
        let outer = nt;
        let mut parent_edge = vec![NONE; nt + 1];
        let mut dual_seen = vec![false; nt + 1];
        let mut order = Vec::with_capacity(nt + 1);
        let has_boundary = !s.is_closed();
        let mut in_cotree = vec![false; ne];
        let roots: Vec<usize> = if has_boundary { vec![outer] } else { vec![] };
        let mut queue: VecDeque<usize> = VecDeque::new();
        let neighbors_of = |f: usize| -> Vec<(usize, usize)> {
            if f == outer {
                (0..ne)
                    .filter(|&e| s.is_boundary_edge(e))
                    .map(|e| (s.edge_triangles(e)[0], e))
                    .collect()
            } else {
                s.tri_edges(f)
                    .iter()
                    .map(|&e| {
                        let o = s.other_triangle(e, f);
                        (if o == NONE { outer } else { o }, e)
                    })
                    .collect()
            }
        };
        let mut start_nodes = roots;
        start_nodes.extend(0..nt);
        for root in start_nodes {
            if dual_seen[root] {
                continue;
            }
            dual_seen[root] = true;
            order.push(root);
            queue.push_back(root);
            while let Some(f) = queue.pop_front() {
                for (g, e) in neighbors_of(f) {
                    if in_tree[e] || dual_seen[g] {
                        continue;
                    }
                    dual_seen[g] = true;
                    parent_edge[g] = e;
                    in_cotree[e] = true;
                    order.push(g);
                    queue.push_back(g);
                }
            }
        }

        let generators: Vec<usize> = (0..ne).filter(|&e| !in_tree[e] && !in_cotree[e]).collect();
        let rank = generators.len();
        let mut edge_class = vec![vec![0i64; rank]; ne];
        for (i, &e) in generators.iter().enumerate() {
            edge_class[e][i] = 1;
        }
        // Peel triangles from the leaves of the dual tree: the boundary of a
        // triangle has zero class, which determines its parent cotree edge.
        for &f in order.iter().rev() {
            if f == outer || parent_edge[f] == NONE {
                continue;
            }
            let pe = parent_edge[f];
            let tri = s.oriented_triangle(f);
            let mut acc = vec![0i64; rank];
            let mut pe_sign = 0i64;
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let e = s.edge_between(a, b).expect("triangle edge");
                let sign = if modulus == 2 || a < b { 1 } else { -1 };
                if e == pe {
                    pe_sign = sign;
                } else {
                    for (x, y) in acc.iter_mut().zip(&edge_class[e]) {
                        *x += sign * y;
                    }
                }
            }
            edge_class[pe] = acc.iter().map(|&x| reduce(-pe_sign * x, modulus)).collect();
        }
        Self {
            rank,
            modulus,
            edge_class,
        }
    }

    /// Number of independent classes.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// 0 for integer coefficients, 2 for ℤ/2.
    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    /// Class of the edge traversed from `a` to `b`.
    pub fn step(&self, e: usize, a: usize, b: usize) -> impl Iterator<Item = i64> + '_ {
        let sign = if self.modulus == 2 || a < b { 1 } else { -1 };
        self.edge_class[e].iter().map(move |&x| sign * x)
    }

    pub fn edge_class(&self, e: usize) -> &[i64] {
        &self.edge_class[e]
    }

    pub fn reduce(&self, v: &mut [i64]) {
        for x in v {
            *x = reduce(*x, self.modulus);
        }
    }

    pub fn is_zero(&self, v: &[i64]) -> bool {
        v.iter().all(|&x| reduce(x, self.modulus) == 0)
    }

    /// Class of a closed vertex cycle `v0 → v1 → … → v0`.
    pub fn class_of_cycle<T: Real>(&self, s: &MetricSurface<T>, cycle: &[usize]) -> Result<Vec<i64>, SurfaceError> {
        let mut acc = vec![0i64; self.rank];
        for i in 0..cycle.len() {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            let e = s.edge_between(a, b).ok_or(SurfaceError::NotAnEdge(a, b))?;
            for (x, y) in acc.iter_mut().zip(self.step(e, a, b)) {
                *x += y;
            }
        }
        self.reduce(&mut acc);
        Ok(acc)
    }
}

fn reduce(x: i64, modulus: i64) -> i64 {
    if modulus == 0 {
        x
    } else {
        x.rem_euclid(modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{make_flat_disc, make_flat_torus, make_hyperbolic_octagon, make_klein_bottle};

    #[test]
    fn ranks_match_topology() {
        let t = make_flat_torus([1.0, 0.0], [0.0, 1.0], 6).unwrap();
        assert_eq!(Homology::new(&t).rank(), 2);
        let o = make_hyperbolic_octagon::<f64>(8).unwrap();
        assert_eq!(Homology::new(&o).rank(), 4);
        let k = make_klein_bottle(1.0, 1.0, 6).unwrap();
        let hk = Homology::new(&k);
        assert_eq!(hk.rank(), 2);
        assert_eq!(hk.modulus(), 2);
        let d = make_flat_disc(1.0, 12).unwrap();
        assert_eq!(Homology::new(&d).rank(), 0);
    }

    #[test]
    fn triangle_boundaries_vanish() {
        let o = make_hyperbolic_octagon::<f64>(8).unwrap();
        let h = Homology::new(&o);
        for t in 0..o.n_triangles() {
            let c = h.class_of_cycle(&o, &o.oriented_triangle(t)).unwrap();
            assert!(h.is_zero(&c), "triangle {t}: {c:?}");
        }
    }

    #[test]
    fn torus_straight_loops_are_independent() {
        let n = 6;
        let t = make_flat_torus([1.0, 0.0], [0.0, 1.0], n).unwrap();
        let h = Homology::new(&t);
        let horiz: Vec<usize> = (0..n).collect();
        let vert: Vec<usize> = (0..n).map(|j| j * n).collect();
        let a = h.class_of_cycle(&t, &horiz).unwrap();
        let b = h.class_of_cycle(&t, &vert).unwrap();
        assert!(!h.is_zero(&a) && !h.is_zero(&b));
        assert!(a[0] * b[1] - a[1] * b[0] != 0);
        let back: Vec<usize> = horiz.iter().rev().copied().collect();
        let c = h.class_of_cycle(&t, &back).unwrap();
        assert_eq!(c, a.iter().map(|x| -x).collect::<Vec<_>>());
    }

    #[test]
    fn annulus_core_is_nontrivial() {
        use crate::surface::{make_warped_cylinder, WarpedCylinderSpec};
        let spec = WarpedCylinderSpec { x_range: (0.0, 1.0), circumference: 1.0, x_cells: 4, y_cells: 5 };
        let s = make_warped_cylinder(|_| 1.0, spec).unwrap();
        let h = Homology::new(&s);
        assert_eq!(h.rank(), 1);
        let ring: Vec<usize> = (0..5).map(|j| 2 * 5 + j).collect();
        assert!(!h.is_zero(&h.class_of_cycle(&s, &ring).unwrap()));
    }
}
