//! Conformal rescaling `g ↦ f·g` of a discrete metric.

use crate::real::Real;

use super::{gram_from_lengths, MetricSurface, SurfaceError};

/// Positive conformal factor, sampled per vertex or constant per triangle.
#[derive(Debug, Clone)]
pub enum ConformalFactor<T> {
    PerVertex(Vec<T>),
    PerTriangle(Vec<T>),
}

impl<T: Real> ConformalFactor<T> {
    fn check(&self) -> Result<(), SurfaceError> {
        let v = match self {
            ConformalFactor::PerVertex(v) | ConformalFactor::PerTriangle(v) => v,
        };
        match v.iter().find(|&&f| !(f > T::zero()) || !f.is_finite()) {
            Some(f) => Err(SurfaceError::NonPositiveFactor(f.as_f64())),
            None => Ok(()),
        }
    }
}

impl<T: Real> MetricSurface<T> {
    /// Metric `f·g`.
    ///
    /// Per-vertex factors scale every edge by the mean of `√f` at its
    /// endpoints and rebuild each triangle from its scaled sides. Per-triangle
    /// factors scale the Gram matrix of each triangle by its factor, which
    /// leaves the P1 stiffness matrix unchanged and scales the mass matrix by
    /// the factor; edges take the mean of `√f` over their triangles.
    pub fn conformal_scale(&self, factor: &ConformalFactor<T>) -> Result<MetricSurface<T>, SurfaceError> {
        factor.check()?;
        let two = T::lit(2.0);
        let mut out = self.clone();
        out.name = format!("{}|conformal", self.name);
        match factor {
            ConformalFactor::PerVertex(f) => {
                if f.len() != self.n_vertices {
                    return Err(SurfaceError::BadParameter("factor length must equal vertex count".into()));
                }
                let edge_scale = |a: usize, b: usize| (f[a].sqrt() + f[b].sqrt()) / two;
                for t in 0..self.triangles.len() {
                    let [a, b, c] = self.triangles[t];
                    let l = self.local_lengths(t);
                    let (l01, l12, l20) = (l[0] * edge_scale(a, b), l[1] * edge_scale(b, c), l[2] * edge_scale(c, a));
                    if !(l01 + l12 > l20 && l12 + l20 > l01 && l20 + l01 > l12) {
                        return Err(SurfaceError::TriangleInequality(t));
                    }
                    out.gram[t] = gram_from_lengths(l01, l12, l20);
                }
                for (e, &[a, b]) in self.edges.iter().enumerate() {
                    out.edge_length[e] = self.edge_length[e] * edge_scale(a, b);
                }
                if let Some(k) = &self.curvature {
                    out.curvature = Some(
                        (0..self.triangles.len())
                            .map(|t| {
                                let m = self.triangles[t].iter().map(|&v| f[v]).sum::<T>() / T::lit(3.0);
                                k[t] / m
                            })
                            .collect(),
                    );
                }
            }
            ConformalFactor::PerTriangle(c) => {
                if c.len() != self.triangles.len() {
                    return Err(SurfaceError::BadParameter("factor length must equal triangle count".into()));
                }
                for t in 0..self.triangles.len() {
                    let g = self.gram[t];
                    out.gram[t] = [g[0] * c[t], g[1] * c[t], g[2] * c[t]];
                }
                for e in 0..self.edges.len() {
                    let [t0, t1] = self.edge_tris[e];
                    let s = if t1 == super::NONE {
                        c[t0].sqrt()
                    } else {
                        (c[t0].sqrt() + c[t1].sqrt()) / two
                    };
                    out.edge_length[e] = self.edge_length[e] * s;
                }
                if let Some(k) = &self.curvature {
                    out.curvature = Some(k.iter().zip(c).map(|(&k, &c)| k / c).collect());
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::make_flat_torus;

    #[test]
    fn unit_factor_is_identity() {
        let s = make_flat_torus::<f64>([1.0, 0.0], [0.2, 1.0], 6).unwrap();
        let c = s.conformal_scale(&ConformalFactor::PerTriangle(vec![1.0; s.n_triangles()])).unwrap();
        assert_eq!(c.gram, s.gram);
        assert_eq!(c.edge_length, s.edge_length);
        let v = s.conformal_scale(&ConformalFactor::PerVertex(vec![1.0; s.n_vertices()])).unwrap();
        for t in 0..s.n_triangles() {
            for k in 0..3 {
                assert!((v.gram[t][k] - s.gram[t][k]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_factor_scales_area_and_lengths() {
        let s = make_flat_torus::<f64>([1.0, 0.0], [0.0, 1.0], 6).unwrap();
        let c = s.conformal_scale(&ConformalFactor::PerVertex(vec![4.0; s.n_vertices()])).unwrap();
        assert!((c.area() - 4.0 * s.area()).abs() < 1e-12);
        for e in 0..s.n_edges() {
            assert!((c.edge_length(e) - 2.0 * s.edge_length(e)).abs() < 1e-14);
        }
    }

    #[test]
    fn nonpositive_factor_rejected() {
        let s = make_flat_torus::<f64>([1.0, 0.0], [0.0, 1.0], 4).unwrap();
        let mut f = vec![1.0; s.n_vertices()];
        f[3] = 0.0;
        assert_eq!(
            s.conformal_scale(&ConformalFactor::PerVertex(f)).unwrap_err(),
            SurfaceError::NonPositiveFactor(0.0)
        );
    }
}
