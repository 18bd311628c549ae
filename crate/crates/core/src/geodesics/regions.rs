//! Distance-defined subsurfaces and the inradius.

use std::sync::Arc;

use crate::real::Real;
use crate::surface::{extract_subsurface, MetricSurface, Subsurface};

use super::distance::{curve_distances, eikonal_distances};
use super::{GeodesicError, LoopResult};

fn mean_distance<T: Real>(s: &MetricSurface<T>, dist: &[T], t: usize) -> T {
    s.triangle(t).iter().map(|&v| dist[v]).sum::<T>() / T::lit(3.0)
}

/// Largest distance from a vertex of `F` to the boundary of `F`, measured
/// inside `F`.
pub fn inradius<T: Real>(f: &Subsurface<T>) -> Result<T, GeodesicError> {
    if !f.has_boundary() {
        return Err(GeodesicError::NoBoundary);
    }
    let s = f.parent();
    let mut allowed = vec![false; s.n_triangles()];
    for &t in f.triangles() {
        allowed[t] = true;
    }
    let sources: Vec<usize> = f.vertices().iter().copied().filter(|&v| f.is_boundary_vertex(v)).collect();
    let dist = curve_distances(s, &sources, Some(&allowed));
    Ok(f.vertices().iter().map(|&v| dist[v]).fold(T::zero(), T::max))
}

/// Triangles whose mean vertex distance from `center` is at most `r`,
/// together with the star of `center`.
pub fn metric_ball<T: Real>(s: &Arc<MetricSurface<T>>, center: usize, r: T) -> Result<Subsurface<T>, GeodesicError> {
    if !(r > T::zero()) {
        return Err(GeodesicError::BadParameter("ball radius must be positive".into()));
    }
    if center >= s.n_vertices() {
        return Err(GeodesicError::BadParameter(format!("vertex {center} out of range")));
    }
    let dist = eikonal_distances(s, &[center], None);
    Ok(extract_subsurface(s, |t| {
        s.triangle(t).contains(&center) || mean_distance(s, &dist, t) <= r
    })?)
}

/// Triangles whose mean vertex distance from a simple core loop is at most
/// `half_width`, together with the triangles touching the core.
pub fn collar<T: Real>(s: &Arc<MetricSurface<T>>, core: &LoopResult<T>, half_width: T) -> Result<Subsurface<T>, GeodesicError> {
    if !core.is_simple() {
        return Err(GeodesicError::NonSimpleCore);
    }
    if !(half_width > T::zero()) {
        return Err(GeodesicError::BadParameter("collar half-width must be positive".into()));
    }
    s.loop_length(&core.edge_path)?;
    let dist = curve_distances(s, &core.edge_path, None);
    let on_core: Vec<bool> = {
        let mut m = vec![false; s.n_vertices()];
        core.edge_path.iter().for_each(|&v| m[v] = true);
        m
    };
    Ok(extract_subsurface(s, |t| {
        let tri = s.triangle(t);
        tri.iter().filter(|&&v| on_core[v]).count() >= 2 || mean_distance(s, &dist, t) <= half_width
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::systole_upper;
    use crate::surface::{make_flat_disc, make_flat_torus, make_klein_bottle, make_warped_cylinder, TopoClass, WarpedCylinderSpec};

    #[test]
    fn disc_inradius_is_radius() {
        let s = Arc::new(make_flat_disc(1.0f64, 24).unwrap());
        let r = inradius(&Subsurface::whole(s.clone())).unwrap();
        assert!((r - 1.0).abs() <= s.mesh_size(), "{r}");
    }

    #[test]
    fn cylinder_inradius_is_half_length() {
        let spec = WarpedCylinderSpec { x_range: (0.0, 2.0), circumference: 1.0, x_cells: 20, y_cells: 10 };
        let s = Arc::new(make_warped_cylinder(|_: f64| 1.0, spec).unwrap());
        let r = inradius(&Subsurface::whole(s.clone())).unwrap();
        assert!((r - 1.0).abs() <= s.mesh_size(), "{r}");
        let closed = Arc::new(make_flat_torus([1.0f64, 0.0], [0.0, 1.0], 4).unwrap());
        assert_eq!(inradius(&Subsurface::whole(closed)).unwrap_err(), GeodesicError::NoBoundary);
    }

    #[test]
    fn small_balls_are_discs() {
        let s = Arc::new(make_flat_torus([1.0f64, 0.0], [0.0, 1.0], 32).unwrap());
        let tiny = metric_ball(&s, 5, 1e-6).unwrap();
        assert_eq!(tiny.topo_class(), TopoClass::Disc);
        assert_eq!(tiny.triangles().len(), 6);
        let r = 0.4;
        let b = metric_ball(&s, 5, r).unwrap();
        assert_eq!(b.topo_class(), TopoClass::Disc);
        let disc = std::f64::consts::PI * r * r;
        assert!(b.area() >= 0.97 * disc, "{} vs {disc}", b.area());
    }

    #[test]
    fn torus_collar_is_annulus() {
        let s = Arc::new(make_flat_torus([1.0f64, 0.0], [0.0, 1.0], 40).unwrap());
        let core = systole_upper(&*s).unwrap();
        let c = collar(&s, &core, 0.3).unwrap();
        assert_eq!(c.topo_class(), TopoClass::Annulus);
        assert!((c.area() - 0.6 * core.length).abs() < 0.05 * 0.6, "{}", c.area());
    }

    #[test]
    fn klein_bottle_one_sided_collar_is_cross_cap() {
        let n = 24;
        let s = Arc::new(make_klein_bottle(1.0f64, 1.0, n).unwrap());
        // Row y = 0 is one-sided.
        let core = LoopResult { edge_path: (0..n).collect(), length: 1.0, certificate: super::super::Certificate::Unknown };
        let c = collar(&s, &core, 0.2).unwrap();
        assert_eq!(c.topo_class(), TopoClass::CrossCap);
        let bad = LoopResult { edge_path: vec![0, 1, 0], length: 0.0, certificate: super::super::Certificate::Unknown };
        assert_eq!(collar(&s, &bad, 0.2).unwrap_err(), GeodesicError::NonSimpleCore);
    }
}
