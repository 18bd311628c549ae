//! Shortest essential edge loops.

use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::real::Real;
use crate::surface::{cut_sides, glue_sheets, MetricSurface, Subsurface, TopoClass, NONE};

use super::distance::{dijkstra, Entry, ShortestPaths};
use super::{GeodesicError, Homology};

/// Why a loop is essential, when that is known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// Nonzero first homology class in the ambient surface.
    HomologyNontrivial(Vec<i64>),
    Contractible,
    /// Freely homotopic to a boundary circle of the subsurface it was found in.
    BoundaryParallel,
    Unknown,
}

/// A closed edge path; the last vertex connects back to the first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoopResult<T> {
    pub edge_path: Vec<usize>,
    pub length: T,
    pub certificate: Certificate,
}

impl<T: Real> LoopResult<T> {
    /// Whether the loop visits each vertex once and has at least three.
    pub fn is_simple(&self) -> bool {
        let mut v = self.edge_path.clone();
        v.sort_unstable();
        v.dedup();
        v.len() == self.edge_path.len() && v.len() >= 3
    }
}

/// Rotates a cycle to start at its smallest vertex, walking towards the
/// smaller of its two neighbours.
fn canonical_cycle(mut c: Vec<usize>) -> Vec<usize> {
    let n = c.len();
    let k = (0..n).min_by_key(|&i| c[i]).unwrap();
    c.rotate_left(k);
    if n > 2 && c[n - 1] < c[1] {
        c[1..].reverse();
    }
    c
}

/// Shortest homologically nontrivial loop through the root of a
/// shortest-path tree, trimmed at the branch point of its two tree paths.
fn best_tree_loop<T: Real>(s: &MetricSurface<T>, h: &Homology, sp: &ShortestPaths<T>) -> Option<(T, Vec<usize>)> {
    let rank = h.rank();
    let mut class = vec![Vec::new(); s.n_vertices()];
    for &v in &sp.order {
        class[v] = if sp.parent[v] == NONE {
            vec![0; rank]
        } else {
            let p = sp.parent[v];
            class[p].iter().zip(h.step(sp.parent_edge[v], p, v)).map(|(a, b)| a + b).collect()
        };
    }
    let mut best: Option<(T, usize)> = None;
    for (e, &[a, b]) in s.edges().iter().enumerate() {
        if !sp.reached(a) || !sp.reached(b) || sp.parent_edge[a] == e || sp.parent_edge[b] == e {
            continue;
        }
        let len = sp.dist[a] + s.edge_length(e) + sp.dist[b];
        if best.is_some_and(|(l, _)| len >= l) {
            continue;
        }
        let mut c: Vec<i64> = class[a].iter().zip(h.step(e, a, b)).zip(&class[b]).map(|((x, y), z)| x + y - z).collect();
        h.reduce(&mut c);
        if !h.is_zero(&c) {
            best = Some((len, e));
        }
    }
    let (_, e) = best?;
    let [a, b] = s.edges()[e];
    let pa = sp.path_to_source(a);
    let pb = sp.path_to_source(b);
    // Drop the common tail shared by both tree paths, keeping the branch vertex.
    let mut common = 0;
    while common < pa.len().min(pb.len()) && pa[pa.len() - 1 - common] == pb[pb.len() - 1 - common] {
        common += 1;
    }
    let mut cycle: Vec<usize> = pa[..=pa.len() - common].iter().rev().copied().collect();
    cycle.extend_from_slice(&pb[..pb.len() - common]);
    let cycle = canonical_cycle(cycle);
    let len = s.loop_length(&cycle).ok()?;
    Some((len, cycle))
}

fn better<T: Real>(a: &(T, Vec<usize>), b: &(T, Vec<usize>)) -> bool {
    match a.0.partial_cmp(&b.0) {
        Some(std::cmp::Ordering::Less) => true,
        Some(std::cmp::Ordering::Equal) => a.1 < b.1,
        _ => false,
    }
}

/// Shortest homologically nontrivial edge cycle of a closed surface with
/// `χ ≤ 0`, an upper bound for the systole.
pub fn systole_upper<T: Real>(s: &MetricSurface<T>) -> Result<LoopResult<T>, GeodesicError> {
    if !s.is_closed() {
        return Err(GeodesicError::NotClosed);
    }
    if s.euler_characteristic() > 0 {
        return Err(GeodesicError::PositiveChi(s.euler_characteristic()));
    }
    let h = Homology::new(s);
    let first = best_tree_loop(s, &h, &dijkstra(s, &[0], None, None)).ok_or(GeodesicError::NoEssentialLoop)?;
    let max_edge = s.edge_lengths().iter().copied().fold(T::zero(), T::max);
    let cutoff = first.0 / T::lit(2.0) + max_edge;
    let best = (1..s.n_vertices())
        .into_par_iter()
        .filter_map(|b| best_tree_loop(s, &h, &dijkstra(s, &[b], None, Some(cutoff))))
        .reduce_with(|x, y| if better(&y, &x) { y } else { x });
    let (length, path) = match best {
        Some(b) if better(&b, &first) => b,
        _ => first,
    };
    let class = h.class_of_cycle(s, &path)?;
    Ok(LoopResult {
        edge_path: path,
        length,
        certificate: Certificate::HomologyNontrivial(class),
    })
}

/// Simple edge arc from the first boundary loop to the second whose interior
/// vertices avoid the boundary.
fn spanning_arc<T: Real>(s: &MetricSurface<T>) -> Option<Vec<usize>> {
    let loops = s.boundary_loops();
    if loops.len() != 2 {
        return None;
    }
    let n = s.n_vertices();
    let mut on = vec![NONE; n];
    for (i, l) in loops.iter().enumerate() {
        for &v in l {
            on[v] = i;
        }
    }
    let mut dist = vec![T::infinity(); n];
    let mut parent = vec![NONE; n];
    let mut heap = BinaryHeap::new();
    for &v in &loops[0] {
        dist[v] = T::zero();
        heap.push(Entry(T::zero(), v));
    }
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if on[u] == 1 {
            let mut arc = vec![u];
            let mut v = u;
            while parent[v] != NONE {
                v = parent[v];
                arc.push(v);
            }
            arc.reverse();
            return Some(arc);
        }
        for &(w, e) in s.neighbors(u) {
            if on[w] == 0 {
                continue;
            }
            let nd = d + s.edge_length(e);
            if nd < dist[w] {
                dist[w] = nd;
                parent[w] = u;
                heap.push(Entry(nd, w));
            }
        }
    }
    None
}

/// Shortest loop in an annulus homotopic to its core.
///
/// The annulus is cut along a boundary-to-boundary arc and three copies are
/// glued into a strip; the answer is the shortest strip path joining the
/// copies of an arc vertex on the two sides of the middle sheet.
pub fn shortest_in_homotopy_class<T: Real>(f: &Subsurface<T>) -> Result<LoopResult<T>, GeodesicError> {
    if f.topo_class() != TopoClass::Annulus {
        return Err(GeodesicError::WrongClass(f.topo_class()));
    }
    let (local, back) = f.to_surface()?;
    let arc = spanning_arc(&local).ok_or(GeodesicError::NoSpanningArc)?;
    let sides = cut_sides(&local, &arc, false)?;
    let strip = glue_sheets(&local, &sides, 3, false)?;
    let candidates: Vec<(T, Vec<usize>)> = arc
        .par_iter()
        .filter_map(|&v| {
            let from = strip.cut_copy(v, 1)?;
            let to = strip.cut_copy(v, 2)?;
            let sp = dijkstra(&strip.surface, &[from], None, None);
            if !sp.reached(to) {
                return None;
            }
            let mut path = sp.path_to_source(to);
            path.reverse();
            Some((sp.dist[to], path))
        })
        .collect();
    let (_, path) = candidates
        .into_iter()
        .reduce(|x, y| if better(&y, &x) { y } else { x })
        .ok_or(GeodesicError::NoSpanningArc)?;
    if path.iter().any(|&v| matches!(strip.level[v], Some(0) | Some(3))) {
        return Err(GeodesicError::SheetOverflow);
    }
    let parent = f.parent();
    let cycle: Vec<usize> = path[..path.len() - 1].iter().map(|&v| back[strip.origin[v]]).collect();
    let length = parent.loop_length(&cycle)?;
    let h = Homology::new(&**parent);
    let class = h.class_of_cycle(parent, &cycle)?;
    let certificate = if h.is_zero(&class) {
        Certificate::BoundaryParallel
    } else {
        Certificate::HomologyNontrivial(class)
    };
    Ok(LoopResult {
        edge_path: cycle,
        length,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::surface::{
        extract_subsurface, make_flat_torus, make_hyperbolic_octagon, make_round_sphere, make_warped_cylinder,
        ConformalFactor, WarpedCylinderSpec,
    };

    #[test]
    fn square_torus_systole_is_one() {
        let s = make_flat_torus([1.0f64, 0.0], [0.0, 1.0], 12).unwrap();
        let l = systole_upper(&s).unwrap();
        assert!((l.length - 1.0).abs() < 1e-12);
        assert!(l.is_simple());
        assert_eq!(l.length, s.loop_length(&l.edge_path).unwrap());
        assert!(matches!(l.certificate, Certificate::HomologyNontrivial(_)));
    }

    #[test]
    fn systole_is_deterministic() {
        let s = make_flat_torus([1.0f64, 0.0], [0.5, 0.9], 10).unwrap();
        let a = systole_upper(&s).unwrap();
        let b = systole_upper(&s).unwrap();
        assert_eq!(a.edge_path, b.edge_path);
        assert_eq!(a.length.to_bits(), b.length.to_bits());
    }

    #[test]
    fn sphere_is_rejected() {
        let s = make_round_sphere::<f64>(8).unwrap();
        assert_eq!(systole_upper(&s).unwrap_err(), GeodesicError::PositiveChi(2));
    }

    #[test]
    fn octagon_systole_within_tolerance() {
        let s = make_hyperbolic_octagon::<f64>(32).unwrap();
        let l = systole_upper(&s).unwrap();
        let sys = 2.0 * (1.0 + 2f64.sqrt()).acosh();
        assert!((l.length - sys).abs() / sys < 0.03, "{}", l.length);
    }

    fn cylinder(warp: impl Fn(f64) -> f64, half: f64) -> Arc<MetricSurface<f64>> {
        let spec = WarpedCylinderSpec { x_range: (-half, half), circumference: 1.5, x_cells: 12, y_cells: 24 };
        Arc::new(make_warped_cylinder(warp, spec).unwrap())
    }

    #[test]
    fn flat_cylinder_core_is_circumference() {
        let s = cylinder(|_| 1.0, 0.5);
        let l = shortest_in_homotopy_class(&Subsurface::whole(s.clone())).unwrap();
        assert!((l.length - 1.5).abs() < 1e-12, "{}", l.length);
        assert!(l.is_simple());
        assert!(matches!(l.certificate, Certificate::HomologyNontrivial(_)));
    }

    #[test]
    fn hyperbolic_collar_core() {
        let s = cylinder(f64::cosh, 0.8);
        let l = shortest_in_homotopy_class(&Subsurface::whole(s.clone())).unwrap();
        assert!((l.length - 1.5).abs() / 1.5 < 0.03, "{}", l.length);
    }

    #[test]
    fn scaling_up_does_not_shorten() {
        let s = cylinder(f64::cosh, 0.8);
        let base = shortest_in_homotopy_class(&Subsurface::whole(s.clone())).unwrap();
        let f: Vec<f64> = (0..s.n_vertices()).map(|v| 1.0 + 0.5 * (v % 7) as f64 / 7.0).collect();
        let scaled = Arc::new(s.conformal_scale(&ConformalFactor::PerVertex(f)).unwrap());
        let l = shortest_in_homotopy_class(&Subsurface::whole(scaled)).unwrap();
        assert!(l.length >= base.length - 1e-12);
    }

    #[test]
    fn non_annulus_rejected() {
        let s = Arc::new(make_flat_torus([1.0f64, 0.0], [0.0, 1.0], 8).unwrap());
        let f = extract_subsurface(&s, |t| t < 4).unwrap();
        assert!(matches!(shortest_in_homotopy_class(&f), Err(GeodesicError::WrongClass(_))));
    }
}
