//! Triangle selections of a surface and their topological classification.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geodesics::Homology;
use crate::real::Real;

use super::{MetricSurface, SurfaceError, NONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TopoClass {
    Disc,
    Annulus,
    CrossCap,
    Other,
}

impl std::fmt::Display for TopoClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TopoClass::Disc => "Disc",
            TopoClass::Annulus => "Annulus",
            TopoClass::CrossCap => "CrossCap",
            TopoClass::Other => "Other",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Incompressibility {
    Incompressible,
    Compressible,
    Unknown,
}

/// A set of triangles of a parent surface with its boundary loops along
/// mesh edges.
#[derive(Debug, Clone)]
pub struct Subsurface<T> {
    parent: Arc<MetricSurface<T>>,
    triangles: Vec<usize>,
    member: Vec<bool>,
    vertices: Vec<usize>,
    on_boundary: Vec<bool>,
    boundary_loops: Vec<Vec<usize>>,
    boundary_edges: Vec<usize>,
    chi: i64,
    area: T,
    boundary_length: T,
    orientable: bool,
    connected: bool,
    manifold: bool,
    class: TopoClass,
}

/// Serializable summary of a [`Subsurface`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsurfaceSummary {
    pub topo_class: TopoClass,
    pub chi: i64,
    pub area: f64,
    pub boundary_length: f64,
    pub n_triangles: usize,
    pub n_boundary_loops: usize,
}

/// Selects the triangles satisfying `predicate`.
pub fn extract_subsurface<T: Real>(
    parent: &Arc<MetricSurface<T>>,
    predicate: impl Fn(usize) -> bool,
) -> Result<Subsurface<T>, SurfaceError> {
    let tris = (0..parent.n_triangles()).filter(|&t| predicate(t)).collect();
    Subsurface::from_triangles(parent.clone(), tris)
}

impl<T: Real> Subsurface<T> {
    pub fn from_triangles(parent: Arc<MetricSurface<T>>, mut triangles: Vec<usize>) -> Result<Self, SurfaceError> {
        triangles.sort_unstable();
        triangles.dedup();
        if triangles.is_empty() {
            return Err(SurfaceError::EmptySelection);
        }
        let s = &*parent;
        let mut member = vec![false; s.n_triangles()];
        for &t in &triangles {
            member[t] = true;
        }
        let mut vmark = vec![false; s.n_vertices()];
        let mut emark = vec![0u8; s.n_edges()];
        for &t in &triangles {
            for &v in &s.triangles[t] {
                vmark[v] = true;
            }
            for &e in &s.tri_edges[t] {
                emark[e] += 1;
            }
        }
        let vertices: Vec<usize> = (0..s.n_vertices()).filter(|&v| vmark[v]).collect();
        let n_edges = emark.iter().filter(|&&c| c > 0).count();
        let boundary_edges: Vec<usize> = (0..s.n_edges()).filter(|&e| emark[e] == 1).collect();
        let chi = vertices.len() as i64 - n_edges as i64 + triangles.len() as i64;

        let mut bdeg: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut on_boundary = vec![false; s.n_vertices()];
        for &e in &boundary_edges {
            for &v in &s.edges[e] {
                bdeg.entry(v).or_default().push(e);
                on_boundary[v] = true;
            }
        }
        let mut manifold = bdeg.values().all(|es| es.len() == 2);
        // A vertex whose selected triangles form more than one fan is pinched
        // even when it carries exactly two boundary edges.
        if manifold {
            manifold = vertices.iter().all(|&v| fan_count(s, &member, v) <= 1);
        }

        let boundary_loops = if manifold { trace_loops(s, &boundary_edges, &bdeg) } else { Vec::new() };

        let (connected, orientable) = connectivity_and_orientation(s, &member, &triangles);
        let area = triangles.iter().map(|&t| s.triangle_area(t)).sum();
        let boundary_length = boundary_edges.iter().map(|&e| s.edge_length[e]).sum();

        let class = if !(manifold && connected) {
            TopoClass::Other
        } else {
            match (chi, boundary_loops.len(), orientable) {
                (1, 1, _) => TopoClass::Disc,
                (0, 2, true) => TopoClass::Annulus,
                (0, 1, false) => TopoClass::CrossCap,
                _ => TopoClass::Other,
            }
        };
        Ok(Self {
            parent,
            triangles,
            member,
            vertices,
            on_boundary,
            boundary_loops,
            boundary_edges,
            chi,
            area,
            boundary_length,
            orientable,
            connected,
            manifold,
            class,
        })
    }

    /// The whole parent surface as a subsurface.
    pub fn whole(parent: Arc<MetricSurface<T>>) -> Self {
        let all = (0..parent.n_triangles()).collect();
        Self::from_triangles(parent, all).expect("surface has triangles")
    }

    pub fn parent(&self) -> &Arc<MetricSurface<T>> {
        &self.parent
    }

    pub fn triangles(&self) -> &[usize] {
        &self.triangles
    }

    pub fn contains_triangle(&self, t: usize) -> bool {
        self.member[t]
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Whether `v` lies on the boundary of the selection.
    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.on_boundary[v]
    }

    /// Selected vertices off the boundary (the Dirichlet unknowns).
    pub fn interior_vertices(&self) -> Vec<usize> {
        self.vertices.iter().copied().filter(|&v| !self.on_boundary[v]).collect()
    }

    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.boundary_loops
    }

    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary_edges
    }

    pub fn has_boundary(&self) -> bool {
        !self.boundary_edges.is_empty()
    }

    pub fn chi(&self) -> i64 {
        self.chi
    }

    pub fn area(&self) -> T {
        self.area
    }

    pub fn boundary_length(&self) -> T {
        self.boundary_length
    }

    pub fn is_orientable(&self) -> bool {
        self.orientable
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn is_manifold(&self) -> bool {
        self.manifold
    }

    pub fn topo_class(&self) -> TopoClass {
        self.class
    }

    /// `true` when every triangle of `self` is a triangle of `other`.
    pub fn is_subset_of(&self, other: &Subsurface<T>) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent) && self.triangles.iter().all(|&t| other.member[t])
    }

    pub fn summary(&self) -> SubsurfaceSummary {
        SubsurfaceSummary {
            topo_class: self.class,
            chi: self.chi,
            area: self.area.as_f64(),
            boundary_length: self.boundary_length.as_f64(),
            n_triangles: self.triangles.len(),
            n_boundary_loops: self.boundary_loops.len(),
        }
    }

    /// Standalone copy of the selection, with the map from its vertex ids to
    /// parent vertex ids.
    pub fn to_surface(&self) -> Result<(MetricSurface<T>, Vec<usize>), SurfaceError> {
        self.parent.restrict(&self.triangles)
    }

    /// Complementary triangle components in the parent surface.
    pub fn complement_components(&self) -> Vec<Vec<usize>> {
        let s = &*self.parent;
        let mut comp = vec![NONE; s.n_triangles()];
        let mut out = Vec::new();
        for start in 0..s.n_triangles() {
            if self.member[start] || comp[start] != NONE {
                continue;
            }
            let id = out.len();
            let mut list = vec![start];
            comp[start] = id;
            let mut q = VecDeque::from([start]);
            while let Some(t) = q.pop_front() {
                for &e in &s.tri_edges[t] {
                    let o = s.other_triangle(e, t);
                    if o != NONE && !self.member[o] && comp[o] == NONE {
                        comp[o] = id;
                        list.push(o);
                        q.push_back(o);
                    }
                }
            }
            list.sort_unstable();
            out.push(list);
        }
        out
    }

    /// Sufficient homological test for π₁-injectivity of annuli and cross caps.
    ///
    /// Annulus: incompressible when a boundary loop (homotopic to the core)
    /// carries a nonzero class in the parent; compressible when a boundary
    /// loop bounds a complementary disc. Cross cap: the one-sided core has
    /// infinite order whenever the parent has `χ ≤ 0`.
    pub fn classify_incompressible(&self) -> Result<Incompressibility, SurfaceError> {
        match self.class {
            TopoClass::Annulus => {
                let h = Homology::new(&*self.parent);
                let class = h.class_of_cycle(&self.parent, &self.boundary_loops[0])?;
                if !h.is_zero(&class) {
                    return Ok(Incompressibility::Incompressible);
                }
                for comp in self.complement_components() {
                    let c = Subsurface::from_triangles(self.parent.clone(), comp)?;
                    if c.class == TopoClass::Disc {
                        let mut cl = c.boundary_loops[0].clone();
                        cl.sort_unstable();
                        for lp in &self.boundary_loops {
                            let mut l = lp.clone();
                            l.sort_unstable();
                            if l == cl {
                                return Ok(Incompressibility::Compressible);
                            }
                        }
                    }
                }
                Ok(Incompressibility::Unknown)
            }
            TopoClass::CrossCap => {
                if self.parent.euler_characteristic() <= 0 {
                    Ok(Incompressibility::Incompressible)
                } else {
                    Ok(Incompressibility::Unknown)
                }
            }
            other => Err(SurfaceError::WrongClass {
                expected: "Annulus or CrossCap",
                got: other.to_string(),
            }),
        }
    }
}

/// Number of edge-connected fans of selected triangles around `v`.
fn fan_count<T: Real>(s: &MetricSurface<T>, member: &[bool], v: usize) -> usize {
    let star: Vec<usize> = s
        .neighbors(v)
        .iter()
        .flat_map(|&(_, e)| s.edge_tris[e])
        .filter(|&t| t != NONE && member[t])
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if star.is_empty() {
        return 0;
    }
    let mut seen = vec![false; star.len()];
    let mut fans = 0;
    for i in 0..star.len() {
        if seen[i] {
            continue;
        }
        fans += 1;
        seen[i] = true;
        let mut stack = vec![star[i]];
        while let Some(t) = stack.pop() {
            for &e in &s.tri_edges[t] {
                if !s.edges[e].contains(&v) {
                    continue;
                }
                let o = s.other_triangle(e, t);
                if o == NONE || !member[o] {
                    continue;
                }
                if let Some(j) = star.iter().position(|&x| x == o) {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(o);
                    }
                }
            }
        }
    }
    fans
}

fn trace_loops<T: Real>(s: &MetricSurface<T>, bedges: &[usize], bdeg: &HashMap<usize, Vec<usize>>) -> Vec<Vec<usize>> {
    let mut used: HashMap<usize, bool> = bedges.iter().map(|&e| (e, false)).collect();
    let mut loops = Vec::new();
    for &e0 in bedges {
        if used[&e0] {
            continue;
        }
        used.insert(e0, true);
        let start = s.edges[e0][0];
        let mut lp = vec![start];
        let mut cur = s.edges[e0][1];
        while cur != start {
            lp.push(cur);
            let next = bdeg[&cur].iter().copied().find(|e| !used[e]);
            match next {
                Some(e) => {
                    used.insert(e, true);
                    let [a, b] = s.edges[e];
                    cur = if a == cur { b } else { a };
                }
                None => break,
            }
        }
        loops.push(lp);
    }
    loops
}

fn connectivity_and_orientation<T: Real>(s: &MetricSurface<T>, member: &[bool], tris: &[usize]) -> (bool, bool) {
    let mut flip: HashMap<usize, bool> = HashMap::new();
    let mut orientable = true;
    flip.insert(tris[0], false);
    let mut stack = vec![tris[0]];
    while let Some(t) = stack.pop() {
        for &e in &s.tri_edges[t] {
            let o = s.other_triangle(e, t);
            if o == NONE || !member[o] {
                continue;
            }
            let want = !(s.edge_direction(t, e) ^ flip[&t]);
            let need = s.edge_direction(o, e) != want;
            match flip.get(&o) {
                None => {
                    flip.insert(o, need);
                    stack.push(o);
                }
                Some(&f) if f != need => orientable = false,
                _ => {}
            }
        }
    }
    (flip.len() == tris.len(), orientable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{make_flat_torus, make_hyperbolic_octagon, make_klein_bottle};

    fn torus(n: usize) -> Arc<MetricSurface<f64>> {
        Arc::new(make_flat_torus([1.0, 0.0], [0.0, 1.0], n).unwrap())
    }

    /// Grid cell `(i, j)` of triangle `t` on an `n × n` generator grid.
    fn cell(t: usize, n: usize) -> (f64, f64) {
        let c = t / 2;
        (((c % n) as f64 + 0.5) / n as f64, ((c / n) as f64 + 0.5) / n as f64)
    }

    fn band(s: &Arc<MetricSurface<f64>>, n: usize, lo: f64, hi: f64) -> Subsurface<f64> {
        extract_subsurface(s, |t| {
            let y = cell(t, n).1;
            y > lo && y < hi
        })
        .unwrap()
    }

    #[test]
    fn star_is_disc() {
        let s = torus(8);
        let v = 3 * 8 + 3;
        let f = extract_subsurface(&s, |t| s.triangle(t).contains(&v)).unwrap();
        assert_eq!(f.topo_class(), TopoClass::Disc);
        assert_eq!(f.interior_vertices(), vec![v]);
    }

    #[test]
    fn whole_closed_surface_is_other() {
        let s = torus(6);
        let f = Subsurface::whole(s);
        assert_eq!(f.topo_class(), TopoClass::Other);
        assert!(!f.has_boundary());
    }

    #[test]
    fn empty_selection_is_an_error() {
        let s = torus(6);
        assert_eq!(extract_subsurface(&s, |_| false).unwrap_err(), SurfaceError::EmptySelection);
    }

    #[test]
    fn torus_band_is_incompressible_annulus() {
        let s = torus(10);
        let f = band(&s, 10, 0.2, 0.6);
        assert_eq!(f.topo_class(), TopoClass::Annulus);
        assert!((f.area() - 0.4).abs() < 1e-12);
        assert!((f.boundary_length() - 2.0).abs() < 1e-12);
        assert_eq!(f.classify_incompressible().unwrap(), Incompressibility::Incompressible);
    }

    #[test]
    fn ring_around_a_point_is_compressible() {
        let s = torus(12);
        let c = [0.5, 0.5];
        let f = extract_subsurface(&s, |t| {
            let (x, y) = cell(t, 12);
            let r = ((x - c[0]).powi(2) + (y - c[1]).powi(2)).sqrt();
            r > 0.15 && r < 0.35
        })
        .unwrap();
        assert_eq!(f.topo_class(), TopoClass::Annulus);
        assert_eq!(f.classify_incompressible().unwrap(), Incompressibility::Compressible);
    }

    #[test]
    fn klein_bottle_one_sided_band_is_cross_cap() {
        let s = Arc::new(make_klein_bottle(1.0, 1.0, 12).unwrap());
        let f = extract_subsurface(&s, |t| (cell(t, 12).1 - 0.5).abs() < 0.2)
        .unwrap();
        assert_eq!(f.topo_class(), TopoClass::CrossCap);
        assert!(!f.is_orientable());
        assert_eq!(f.classify_incompressible().unwrap(), Incompressibility::Incompressible);
    }

    #[test]
    fn incompressibility_requires_annulus_or_cross_cap() {
        let s = Arc::new(make_hyperbolic_octagon::<f64>(8).unwrap());
        let f = extract_subsurface(&s, |t| s.triangle(t).contains(&0)).unwrap();
        assert_eq!(f.topo_class(), TopoClass::Disc);
        assert!(matches!(f.classify_incompressible(), Err(SurfaceError::WrongClass { .. })));
    }
}
