//! First Dirichlet eigenvalues, ground states, Rayleigh quotients and
//! level-set sweeps with P1 finite elements.

mod assemble;
mod eigen;
mod sweep;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::Real;
use crate::sparse::FactorError;
use crate::surface::{MetricSurface, Subsurface, SurfaceError};

pub use assemble::{assemble, assemble_free, assemble_surface, element_mass, element_stiffness, Assembly};
pub use eigen::{smallest_eigenpairs, EigenOptions, EigenPairs};
pub use sweep::{gradient_norms, sweep, sweep_inequality, SweepInequality, SweepProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("triangle {0} has zero area under the metric")]
    DegenerateTriangle(usize),
    #[error("no interior degrees of freedom")]
    EmptyInterior,
    #[error("eigensolver did not converge in {iterations} iterations (residual {residual:e})")]
    SolverDivergence { iterations: usize, residual: f64 },
    #[error("vector vanishes after Dirichlet masking")]
    ZeroVector,
    #[error("density must be non-negative, got {0}")]
    NegativeDensity(f64),
    #[error("region lives on a different surface")]
    DisjointRegion,
    #[error("operation requires a closed surface")]
    NotClosed,
    #[error("refinement values must be monotone for extrapolation")]
    NonMonotoneRefinement,
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Richardson-extrapolated value assuming `O(h²)` convergence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: f64,
    pub error_bar: f64,
}

impl Extrapolation {
    /// Extrapolates from `(resolution, value)` pairs ordered from coarse to
    /// fine. With three levels the error bar is the gap between the fine and
    /// coarse extrapolants; with two it is the fine-level correction.
    pub fn from_levels(levels: &[(usize, f64)]) -> Result<Self, SpectralError> {
        if levels.len() < 2 {
            return Err(SpectralError::NonMonotoneRefinement);
        }
        let diffs: Vec<f64> = levels.windows(2).map(|w| w[1].1 - w[0].1).collect();
        if !(diffs.iter().all(|&d| d <= 0.0) || diffs.iter().all(|&d| d >= 0.0)) {
            return Err(SpectralError::NonMonotoneRefinement);
        }
        let step = |a: (usize, f64), b: (usize, f64)| {
            let r = b.0 as f64 / a.0 as f64;
            b.1 + (b.1 - a.1) / (r * r - 1.0)
        };
        let n = levels.len();
        let fine = step(levels[n - 2], levels[n - 1]);
        let error_bar = if n >= 3 {
            (fine - step(levels[n - 3], levels[n - 2])).abs()
        } else {
            (fine - levels[n - 1].1).abs()
        };
        Ok(Self { value: fine, error_bar })
    }
}

/// First Dirichlet eigenpair of a subsurface.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult<T> {
    pub lambda0: T,
    /// `L²`-normalized ground state indexed by parent vertex, zero on the
    /// boundary and outside the subsurface.
    #[serde(skip)]
    pub ground_state: Vec<T>,
    pub rayleigh: T,
    pub residual: T,
    pub iterations: usize,
    pub mesh_h: T,
    pub extrapolated: Option<Extrapolation>,
}

impl<T: Real> SpectralResult<T> {
    /// Whether the ground state is strictly positive at every interior vertex.
    pub fn is_positive_on(&self, f: &Subsurface<T>) -> bool {
        if !f.has_boundary() {
            return self.ground_state.iter().all(|&x| x > T::zero());
        }
        f.interior_vertices().iter().all(|&v| self.ground_state[v] > T::zero())
    }
}

fn mesh_h<T: Real>(f: &Subsurface<T>) -> T {
    let s = f.parent();
    f.triangles()
        .iter()
        .flat_map(|&t| s.local_lengths(t))
        .fold(T::zero(), |a, b| a.max(b))
}

/// Smallest Dirichlet eigenvalue of `F`; a closed `F` returns exactly zero
/// with the constant ground state.
pub fn lambda0<T: Real>(f: &Subsurface<T>, tol: T) -> Result<SpectralResult<T>, SpectralError> {
    let s = f.parent();
    let h = mesh_h(f);
    if !f.has_boundary() {
        let c = T::one() / f.area().sqrt();
        let mut phi = vec![T::zero(); s.n_vertices()];
        for &v in f.vertices() {
            phi[v] = c;
        }
        return Ok(SpectralResult {
            lambda0: T::zero(),
            ground_state: phi,
            rayleigh: T::zero(),
            residual: T::zero(),
            iterations: 0,
            mesh_h: h,
            extrapolated: None,
        });
    }
    let asm = assemble(f)?;
    if asm.dofs.is_empty() {
        return Err(SpectralError::EmptyInterior);
    }
    let opts = EigenOptions { tol, ..EigenOptions::default() };
    let pairs = smallest_eigenpairs(&asm.stiffness, &asm.mass, 1, opts, None)?;
    let mut x = pairs.vectors[0].clone();
    let total: T = x.iter().copied().sum();
    if total < T::zero() {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    let mx = asm.mass.mul_vec(&x);
    let nrm = x.iter().zip(&mx).map(|(&a, &b)| a * b).sum::<T>().sqrt();
    x.iter_mut().for_each(|v| *v /= nrm);
    let rq = asm.stiffness.bilinear(&x, &x) / asm.mass.bilinear(&x, &x);
    let mut phi = vec![T::zero(); s.n_vertices()];
    for (i, &v) in asm.dofs.iter().enumerate() {
        phi[v] = x[i];
    }
    Ok(SpectralResult {
        lambda0: pairs.values[0],
        ground_state: phi,
        rayleigh: rq,
        residual: pairs.residuals[0],
        iterations: pairs.iterations,
        mesh_h: h,
        extrapolated: None,
    })
}

/// The `k` smallest nonzero eigenpairs of a closed surface, with vectors
/// `M`-orthogonal to the constants.
pub fn closed_eigenpairs<T: Real>(s: &MetricSurface<T>, k: usize, tol: T) -> Result<EigenPairs<T>, SpectralError> {
    if !s.is_closed() {
        return Err(SpectralError::NotClosed);
    }
    let asm = assemble_surface(s)?;
    let ones = vec![T::one(); s.n_vertices()];
    let opts = EigenOptions {
        tol,
        shift: T::one() / s.area(),
        ..EigenOptions::default()
    };
    smallest_eigenpairs(&asm.stiffness, &asm.mass, k, opts, Some(&ones))
}

/// First `k + 1` eigenvalues of a closed surface, ascending with
/// multiplicity; the first is the exact zero of the constants.
pub fn lambda_k<T: Real>(s: &MetricSurface<T>, k: usize, tol: T) -> Result<Vec<T>, SpectralError> {
    if !s.is_closed() {
        return Err(SpectralError::NotClosed);
    }
    let mut out = vec![T::zero()];
    if k > 0 {
        out.extend(closed_eigenpairs(s, k, tol)?.values);
    }
    Ok(out)
}

/// `vᵀKv / vᵀMv` over the Dirichlet unknowns of `F`; `v` is indexed by parent vertex.
pub fn rayleigh<T: Real>(f: &Subsurface<T>, v: &[T]) -> Result<T, SpectralError> {
    let asm = assemble(f)?;
    let x: Vec<T> = asm.dofs.iter().map(|&d| v[d]).collect();
    let den = asm.mass.bilinear(&x, &x);
    if !(den > T::zero()) {
        return Err(SpectralError::ZeroVector);
    }
    Ok(asm.stiffness.bilinear(&x, &x) / den)
}

/// `∫_{F ∩ region} φ²` for the ground state `φ` of `F`.
pub fn mass_in<T: Real>(f: &Subsurface<T>, ground: &SpectralResult<T>, region: &Subsurface<T>) -> Result<T, SpectralError> {
    if !std::sync::Arc::ptr_eq(f.parent(), region.parent()) {
        return Err(SpectralError::DisjointRegion);
    }
    let s = f.parent();
    let mut total = T::zero();
    for &t in f.triangles() {
        if !region.contains_triangle(t) {
            continue;
        }
        let me = element_mass(s.triangle_area(t));
        let tri = s.triangle(t);
        for a in 0..3 {
            for b in 0..3 {
                total += me[a][b] * ground.ground_state[tri[a]] * ground.ground_state[tri[b]];
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::surface::{extract_subsurface, make_flat_disc, make_flat_torus, make_warped_cylinder, WarpedCylinderSpec};

    #[test]
    fn extrapolation_recovers_quadratic_model() {
        let f = |n: usize| 2.0 + 3.0 / (n * n) as f64;
        let e = Extrapolation::from_levels(&[(8, f(8)), (16, f(16)), (32, f(32))]).unwrap();
        assert!((e.value - 2.0).abs() < 1e-12);
        assert!(e.error_bar < 1e-12);
        assert!(Extrapolation::from_levels(&[(8, 1.0), (16, 2.0), (32, 1.5)]).is_err());
    }

    #[test]
    fn closed_torus_has_zero_ground_energy() {
        let s = Arc::new(make_flat_torus([1.0, 0.0], [0.0, 1.0], 8).unwrap());
        let r = lambda0(&Subsurface::whole(s), 1e-10).unwrap();
        assert_eq!(r.lambda0, 0.0);
    }

    #[test]
    fn square_torus_spectrum() {
        let s = make_flat_torus([1.0, 0.0], [0.0, 1.0], 24).unwrap();
        let v = lambda_k(&s, 4, 1e-9).unwrap();
        assert_eq!(v[0], 0.0);
        let target = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        for &x in &v[1..] {
            assert!((x - target).abs() / target < 0.02, "{x}");
        }
    }

    #[test]
    fn flat_cylinder_dirichlet() {
        let spec = WarpedCylinderSpec { x_range: (0.0, 0.5), circumference: 1.0, x_cells: 32, y_cells: 16 };
        let s = Arc::new(make_warped_cylinder(|_: f64| 1.0, spec).unwrap());
        let f = Subsurface::whole(s);
        let r = lambda0(&f, 1e-10).unwrap();
        let exact = 4.0 * std::f64::consts::PI.powi(2);
        assert!((r.lambda0 - exact).abs() / exact < 0.01, "{}", r.lambda0);
        assert!((r.rayleigh - r.lambda0).abs() < 1e-8 * exact);
        assert!(r.is_positive_on(&f));
    }

    #[test]
    fn rayleigh_bounds_and_mass() {
        let s = Arc::new(make_flat_disc(1.0, 24).unwrap());
        let f = Subsurface::whole(s.clone());
        let r = lambda0(&f, 1e-10).unwrap();
        let tent: Vec<f64> = (0..s.n_vertices()).map(|v| 1.0 - s.radial().unwrap()[v]).collect();
        assert!(rayleigh(&f, &tent).unwrap() >= r.lambda0);
        assert!((mass_in(&f, &r, &f).unwrap() - 1.0).abs() < 1e-10);
        let zero = vec![0.0; s.n_vertices()];
        assert_eq!(rayleigh(&f, &zero).unwrap_err(), SpectralError::ZeroVector);
        let half = extract_subsurface(&s, |t| t % 2 == 0).unwrap();
        let m = mass_in(&f, &r, &half).unwrap();
        assert!(m > 0.0 && m < 1.0);
    }
}
