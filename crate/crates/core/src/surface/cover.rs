//! Cutting along edge paths, cyclic covers and exhaustions by truncation.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::real::Real;

use super::{MetricSurface, Subsurface, SurfaceError, NONE};

/// Side assignment of the triangles around every vertex of a cut path.
#[derive(Debug, Clone)]
pub struct CutSides {
    path: Vec<usize>,
    closed: bool,
    left: HashMap<(usize, usize), bool>,
}

impl CutSides {
    pub fn path(&self) -> &[usize] {
        &self.path
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// `Some(true)` when triangle `t` lies on the left of the cut at vertex `v`,
    /// `None` when `v` is not on the cut.
    pub fn is_left(&self, t: usize, v: usize) -> Option<bool> {
        self.left.get(&(t, v)).copied()
    }
}

/// Fan of triangles around `v` reachable from `t` without crossing the
/// edges in `walls`.
fn fan<T: Real>(s: &MetricSurface<T>, v: usize, t: usize, walls: &[usize]) -> Vec<usize> {
    let mut out = vec![t];
    let mut stack = vec![t];
    while let Some(f) = stack.pop() {
        for &e in &s.tri_edges[f] {
            if !s.edges[e].contains(&v) || walls.contains(&e) {
                continue;
            }
            let o = s.other_triangle(e, f);
            if o != NONE && !out.contains(&o) {
                out.push(o);
                stack.push(o);
            }
        }
    }
    out
}

fn star<T: Real>(s: &MetricSurface<T>, v: usize) -> Vec<usize> {
    let mut out: Vec<usize> = s
        .neighbors(v)
        .iter()
        .flat_map(|&(_, e)| s.edge_tris[e])
        .filter(|&t| t != NONE)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Splits the star of every path vertex into a left and a right fan.
///
/// A closed path must be a simple two-sided cycle; an open path must be a
/// simple arc meeting the boundary exactly at its two endpoints.
pub fn cut_sides<T: Real>(s: &MetricSurface<T>, path: &[usize], closed: bool) -> Result<CutSides, SurfaceError> {
    let n = path.len();
    if n < if closed { 3 } else { 2 } {
        return Err(SurfaceError::NonSimpleLoop);
    }
    let mut sorted = path.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != n {
        return Err(SurfaceError::NonSimpleLoop);
    }
    let m = if closed { n } else { n - 1 };
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let (a, b) = (path[i], path[(i + 1) % n]);
        edges.push(s.edge_between(a, b).ok_or(SurfaceError::NotAnEdge(a, b))?);
    }
    if edges.iter().any(|&e| s.is_boundary_edge(e)) {
        return Err(SurfaceError::NonSimpleLoop);
    }
    if !closed {
        let on_bd = |v: usize| s.neighbors(v).iter().any(|&(_, e)| s.is_boundary_edge(e));
        if !on_bd(path[0]) || !on_bd(path[n - 1]) || path[1..n - 1].iter().any(|&v| on_bd(v)) {
            return Err(SurfaceError::NonSimpleLoop);
        }
    }
    let walls_at = |i: usize| -> Vec<usize> {
        let mut w = Vec::new();
        if closed || i > 0 {
            w.push(edges[(i + m - 1) % m]);
        }
        if closed || i < m {
            w.push(edges[i % m]);
        }
        w
    };
    let mut left = HashMap::new();
    let mut current = s.edge_tris[edges[0]][0];
    for i in 0..n {
        let v = path[i];
        let walls = walls_at(i);
        let lf = fan(s, v, current, &walls);
        for t in star(s, v) {
            left.insert((t, v), lf.contains(&t));
        }
        if i + 1 < n || closed {
            let e_next = edges[i % m];
            if i < m {
                let [a, b] = s.edge_tris[e_next];
                current = if lf.contains(&a) {
                    a
                } else if lf.contains(&b) {
                    b
                } else {
                    return Err(SurfaceError::NonSimpleLoop);
                };
            }
        }
    }
    if closed {
        // Returning to the start must land on the same side.
        let lf0 = fan(s, path[0], current, &walls_at(0));
        if !lf0.contains(&s.edge_tris[edges[0]][0]) {
            return Err(SurfaceError::OneSidedLoop);
        }
    }
    // Check each triangle adjacent to the path edges sees one left and one right.
    for (i, &e) in edges.iter().enumerate() {
        let [a, b] = s.edge_tris[e];
        let v = path[i];
        if left[&(a, v)] == left[&(b, v)] {
            return Err(SurfaceError::NonSimpleLoop);
        }
    }
    let sides = CutSides {
        path: path.to_vec(),
        closed,
        left,
    };
    if closed && separates(s, &sides) {
        return Err(SurfaceError::SeparatingLoop);
    }
    Ok(sides)
}

fn separates<T: Real>(s: &MetricSurface<T>, sides: &CutSides) -> bool {
    let n = sides.path.len();
    let cut: Vec<usize> = (0..n)
        .map(|i| s.edge_between(sides.path[i], sides.path[(i + 1) % n]).unwrap())
        .collect();
    let mut seen = vec![false; s.n_triangles()];
    seen[0] = true;
    let mut q = VecDeque::from([0usize]);
    let mut count = 1;
    while let Some(t) = q.pop_front() {
        for &e in &s.tri_edges[t] {
            if cut.contains(&e) {
                continue;
            }
            let o = s.other_triangle(e, t);
            if o != NONE && !seen[o] {
                seen[o] = true;
                count += 1;
                q.push_back(o);
            }
        }
    }
    count < s.n_triangles()
}

/// Vertex bookkeeping of a multi-sheeted cover.
#[derive(Debug, Clone)]
pub struct SheetLayout<T> {
    pub surface: MetricSurface<T>,
    /// Parent vertex of each cover vertex.
    pub origin: Vec<usize>,
    /// For copies of cut vertices, the level between sheets; `None` otherwise.
    pub level: Vec<Option<usize>>,
    /// Sheet of each non-cut vertex copy.
    pub sheet: Vec<Option<usize>>,
    /// Parent triangle and sheet of each cover triangle.
    pub triangle_origin: Vec<(usize, usize)>,
}

impl<T: Real> SheetLayout<T> {
    /// Cover vertex lying over parent vertex `v` at cut level `level`.
    pub fn cut_copy(&self, v: usize, level: usize) -> Option<usize> {
        (0..self.origin.len()).find(|&i| self.origin[i] == v && self.level[i] == Some(level))
    }
}

/// Glues `sheets` copies of `s` cut along `sides`.
///
/// The right side of sheet `i` is glued to the left side of sheet `i − 1`
/// through the cut copies at level `i`. With `wrap` the last sheet is glued
/// back to the first (levels modulo `sheets`); otherwise levels run over
/// `0..=sheets` and levels `0` and `sheets` form new boundary.
pub fn glue_sheets<T: Real>(
    s: &MetricSurface<T>,
    sides: &CutSides,
    sheets: usize,
    wrap: bool,
) -> Result<SheetLayout<T>, SurfaceError> {
    if sheets == 0 {
        return Err(SurfaceError::BadParameter("sheet count must be positive".into()));
    }
    let on_cut: HashMap<usize, usize> = sides.path.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let levels = if wrap { sheets } else { sheets + 1 };
    let mut origin = Vec::new();
    let mut level = Vec::new();
    let mut sheet = Vec::new();
    let mut plain_id = vec![vec![NONE; s.n_vertices()]; sheets];
    let mut cut_id = vec![vec![NONE; sides.path.len()]; levels];
    for (sh, ids) in plain_id.iter_mut().enumerate() {
        for v in 0..s.n_vertices() {
            if !on_cut.contains_key(&v) {
                ids[v] = origin.len();
                origin.push(v);
                level.push(None);
                sheet.push(Some(sh));
            }
        }
    }
    for (lv, ids) in cut_id.iter_mut().enumerate() {
        for (i, &v) in sides.path.iter().enumerate() {
            ids[i] = origin.len();
            origin.push(v);
            level.push(Some(lv));
            sheet.push(None);
        }
    }
    let mut tris = Vec::with_capacity(sheets * s.n_triangles());
    let mut gram = Vec::with_capacity(sheets * s.n_triangles());
    let mut tri_origin = Vec::with_capacity(sheets * s.n_triangles());
    for sh in 0..sheets {
        for t in 0..s.n_triangles() {
            let mut nt = [0usize; 3];
            for (k, &v) in s.triangles[t].iter().enumerate() {
                nt[k] = match on_cut.get(&v) {
                    None => plain_id[sh][v],
                    Some(&i) => {
                        let l = if sides.is_left(t, v).unwrap() { sh + 1 } else { sh };
                        cut_id[if wrap { l % sheets } else { l }][i]
                    }
                };
            }
            tris.push(nt);
            gram.push(s.gram[t]);
            tri_origin.push((t, sh));
        }
    }
    let lengths: HashMap<(usize, usize), T> = tris
        .iter()
        .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
        .map(|(a, b)| {
            let e = s.edge_between(origin[a], origin[b]).expect("lifted edge");
            ((a.min(b), a.max(b)), s.edge_length[e])
        })
        .collect();
    let coords = origin.iter().map(|&v| s.coords[v]).collect();
    let name = format!("{}|cover{}{}", s.name, sheets, if wrap { "" } else { "-chain" });
    let mut surface = MetricSurface::from_gram(name, origin.len(), tris, gram, |a, b| lengths[&(a, b)], coords)?;
    if let Some(k) = &s.curvature {
        surface.curvature = Some(tri_origin.iter().map(|&(t, _)| k[t]).collect());
    }
    Ok(SheetLayout {
        surface,
        origin,
        level,
        sheet,
        triangle_origin: tri_origin,
    })
}

/// How the sheets of a cyclic cover are joined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CoverKind {
    /// `k` sheets glued cyclically: a closed `k`-fold cover.
    Closed,
    /// `k` sheets glued in a row: a segment of the infinite cyclic cover with
    /// two boundary loops.
    Chain,
}

impl<T: Real> MetricSurface<T> {
    /// Cyclic cover obtained by cutting along a simple non-separating loop.
    pub fn cyclic_cover(&self, cut_loop: &[usize], sheets: usize, kind: CoverKind) -> Result<MetricSurface<T>, SurfaceError> {
        let sides = cut_sides(self, cut_loop, true)?;
        Ok(glue_sheets(self, &sides, sheets, kind == CoverKind::Closed)?.surface)
    }
}

/// Nested truncations `K_i = {r ≤ r_i}` of a surface with ends.
#[derive(Debug, Clone)]
pub struct ExhaustionFamily<T> {
    pub surface: Arc<MetricSurface<T>>,
    pub levels: Vec<T>,
    pub truncations: Vec<Subsurface<T>>,
}

fn barycentric_radius<T: Real>(s: &MetricSurface<T>, t: usize) -> T {
    let r = s.radial.as_ref().expect("radial coordinate");
    s.triangles[t].iter().map(|&v| r[v]).sum::<T>() / T::lit(3.0)
}

/// Truncations selected by the mean radial coordinate of each triangle.
pub fn build_exhaustion<T: Real>(surface: Arc<MetricSurface<T>>, radii: &[T]) -> Result<ExhaustionFamily<T>, SurfaceError> {
    if surface.radial.is_none() {
        return Err(SurfaceError::MissingRadialCoordinate);
    }
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SurfaceError::NonIncreasingRadii);
    }
    let truncations = radii
        .iter()
        .map(|&r| {
            let tris = (0..surface.n_triangles()).filter(|&t| barycentric_radius(&surface, t) <= r).collect();
            Subsurface::from_triangles(surface.clone(), tris)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExhaustionFamily {
        surface,
        levels: radii.to_vec(),
        truncations,
    })
}

impl<T: Real> ExhaustionFamily<T> {
    /// `S ∖ K_i`, restricted to radial coordinate at most `far`.
    pub fn complement(&self, i: usize, far: Option<T>) -> Result<Subsurface<T>, SurfaceError> {
        let ki = &self.truncations[i];
        let tris = (0..self.surface.n_triangles())
            .filter(|&t| !ki.contains_triangle(t))
            .filter(|&t| far.map_or(true, |f| barycentric_radius(&self.surface, t) <= f))
            .collect();
        Subsurface::from_triangles(self.surface.clone(), tris)
    }

    /// Connected components of `S ∖ K_i` as subsurfaces.
    pub fn complement_pieces(&self, i: usize) -> Result<Vec<Subsurface<T>>, SurfaceError> {
        self.truncations[i]
            .complement_components()
            .into_iter()
            .map(|c| Subsurface::from_triangles(self.surface.clone(), c))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{make_flat_torus, make_klein_bottle, make_warped_cylinder, TopoClass, WarpedCylinderSpec};

    fn torus() -> MetricSurface<f64> {
        make_flat_torus([1.0, 0.0], [0.0, 1.0], 8).unwrap()
    }

    #[test]
    fn chain_cover_of_torus_is_cylinder() {
        let s = torus();
        let lp: Vec<usize> = (0..8).collect();
        for k in [1, 2, 3] {
            let c = s.cyclic_cover(&lp, k, CoverKind::Chain).unwrap();
            assert_eq!(c.euler_characteristic(), 0);
            assert_eq!(c.boundary_loops().len(), 2);
            assert!((c.area() - k as f64).abs() < 1e-12);
            assert!(c.is_orientable());
        }
    }

    #[test]
    fn closed_cover_scales_area() {
        let s = torus();
        let lp: Vec<usize> = (0..8).map(|j| j * 8).collect();
        let c1 = s.cyclic_cover(&lp, 1, CoverKind::Closed).unwrap();
        assert_eq!(c1.n_vertices(), s.n_vertices());
        assert_eq!(c1.n_edges(), s.n_edges());
        let c3 = s.cyclic_cover(&lp, 3, CoverKind::Closed).unwrap();
        assert!(c3.is_closed());
        assert_eq!(c3.euler_characteristic(), 0);
        assert!((c3.area() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn one_sided_loop_is_rejected() {
        let s = make_klein_bottle(1.0, 1.0, 8).unwrap();
        let lp: Vec<usize> = (0..8).collect();
        assert_eq!(s.cyclic_cover(&lp, 2, CoverKind::Chain).unwrap_err(), SurfaceError::OneSidedLoop);
    }

    #[test]
    fn separating_loop_is_rejected() {
        let spec = WarpedCylinderSpec { x_range: (0.0, 1.0), circumference: 1.0, x_cells: 4, y_cells: 6 };
        let s = make_warped_cylinder(|_| 1.0, spec).unwrap();
        let ring: Vec<usize> = (0..6).map(|j| 2 * 6 + j).collect();
        assert_eq!(s.cyclic_cover(&ring, 2, CoverKind::Chain).unwrap_err(), SurfaceError::SeparatingLoop);
    }

    #[test]
    fn repeated_vertex_is_not_simple() {
        let s = torus();
        let lp = vec![0, 1, 2, 1];
        assert_eq!(s.cyclic_cover(&lp, 2, CoverKind::Chain).unwrap_err(), SurfaceError::NonSimpleLoop);
    }

    #[test]
    fn exhaustion_of_symmetric_funnel() {
        let spec = WarpedCylinderSpec { x_range: (-4.0, 4.0), circumference: 1.0, x_cells: 32, y_cells: 6 };
        let s = Arc::new(make_warped_cylinder(|x: f64| x.cosh(), spec).unwrap());
        let fam = build_exhaustion(s, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(fam.truncations.len(), 3);
        for i in 0..3 {
            assert_eq!(fam.truncations[i].chi(), 0);
            assert_eq!(fam.truncations[i].topo_class(), TopoClass::Annulus);
            if i > 0 {
                assert!(fam.truncations[i - 1].is_subset_of(&fam.truncations[i]));
            }
            let pieces = fam.complement_pieces(i).unwrap();
            assert_eq!(pieces.len(), 2);
            assert!(pieces.iter().all(|p| p.topo_class() == TopoClass::Annulus));
        }
        assert!(matches!(
            build_exhaustion(fam.surface.clone(), &[2.0, 1.0]),
            Err(SurfaceError::NonIncreasingRadii)
        ));
    }
}
