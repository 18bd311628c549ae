//! Superlevel-set statistics of a piecewise linear density.

use serde::Serialize;

use crate::real::Real;
use crate::surface::{MetricSurface, Subsurface};

use super::{element_mass, SpectralError, SpectralResult};

/// Areas `A(t)` of `{ψ ≥ t}` and lengths `L(t)` of `{ψ = t}` at increasing
/// thresholds starting at 0.
#[derive(Debug, Clone, Serialize)]
pub struct SweepProfile<T> {
    pub thresholds: Vec<T>,
    pub areas: Vec<T>,
    pub lengths: Vec<T>,
    pub ratios: Vec<T>,
    /// Maximum of the density; `A` and `L` vanish beyond it.
    pub t_max: T,
}

impl<T: Real> SweepProfile<T> {
    fn trapezoid(&self, y: &[T]) -> T {
        let mut s = T::zero();
        let n = self.thresholds.len();
        for i in 1..n {
            s += (self.thresholds[i] - self.thresholds[i - 1]) * (y[i] + y[i - 1]) / T::lit(2.0);
        }
        s + (self.t_max - self.thresholds[n - 1]) * y[n - 1] / T::lit(2.0)
    }

    /// `∫₀^∞ A(t) dt` by the trapezoid rule.
    pub fn integral_area(&self) -> T {
        self.trapezoid(&self.areas)
    }

    /// `∫₀^∞ L(t) dt` by the trapezoid rule.
    pub fn integral_length(&self) -> T {
        self.trapezoid(&self.lengths)
    }

    /// `min L(t)/A(t)` over positive thresholds.
    pub fn min_ratio(&self) -> Option<(T, T)> {
        self.thresholds
            .iter()
            .zip(&self.ratios)
            .filter(|(&t, _)| t > T::zero())
            .map(|(&t, &r)| (t, r))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    }
}

/// Value-sorted local corners `(value, local index)` of a triangle.
fn sorted_corners<T: Real>(vals: [T; 3]) -> [(T, usize); 3] {
    let mut c = [(vals[0], 0), (vals[1], 1), (vals[2], 2)];
    c.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    c
}

const CORNER: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

fn lerp_local<T: Real>(i: usize, j: usize, s: T) -> [T; 2] {
    let a = CORNER[i];
    let b = CORNER[j];
    [
        T::lit(a[0]) + s * T::lit(b[0] - a[0]),
        T::lit(a[1]) + s * T::lit(b[1] - a[1]),
    ]
}

fn metric_length<T: Real>(g: [T; 3], p: [T; 2], q: [T; 2]) -> T {
    let d = [p[0] - q[0], p[1] - q[1]];
    (g[0] * d[0] * d[0] + T::lit(2.0) * g[1] * d[0] * d[1] + g[2] * d[1] * d[1])
        .max(T::zero())
        .sqrt()
}

/// Area fraction of `{ψ ≥ t}` and length of `{ψ = t}` inside one triangle.
fn triangle_level<T: Real>(g: [T; 3], area: T, vals: [T; 3], t: T) -> (T, T) {
    let [(a, ia), (b, ib), (c, ic)] = sorted_corners(vals);
    if t <= a {
        return (area, T::zero());
    }
    if t >= c {
        return (T::zero(), T::zero());
    }
    let p = lerp_local(ia, ic, (t - a) / (c - a));
    let (frac, q) = if t <= b {
        let f = T::one() - (t - a) * (t - a) / ((b - a) * (c - a));
        (f, lerp_local(ia, ib, (t - a) / (b - a)))
    } else {
        let f = (c - t) * (c - t) / ((c - a) * (c - b));
        (f, lerp_local(ib, ic, (t - b) / (c - b)))
    };
    (area * frac, metric_length(g, p, q))
}

/// Metric norm of the gradient of the linear interpolant on each triangle.
pub fn gradient_norms<T: Real>(s: &MetricSurface<T>, triangles: &[usize], values: &[T]) -> Vec<T> {
    triangles
        .iter()
        .map(|&t| {
            let g = s.gram(t);
            let [v0, v1, v2] = s.triangle(t);
            let d = [values[v1] - values[v0], values[v2] - values[v0]];
            let det = g[0] * g[2] - g[1] * g[1];
            ((g[2] * d[0] * d[0] - T::lit(2.0) * g[1] * d[0] * d[1] + g[0] * d[1] * d[1]) / det)
                .max(T::zero())
                .sqrt()
        })
        .collect()
}

/// Superlevel areas and level lengths of the P1 density `ψ` (indexed by
/// parent vertex) over `F`, at thresholds mixing area quantiles and uniform
/// levels (`2·n_thresholds` in total, starting at 0).
pub fn sweep<T: Real>(f: &Subsurface<T>, psi: &[T], n_thresholds: usize) -> Result<SweepProfile<T>, SpectralError> {
    let s = f.parent();
    let mut t_max = T::zero();
    for &v in f.vertices() {
        if psi[v] < T::zero() {
            return Err(SpectralError::NegativeDensity(psi[v].as_f64()));
        }
        t_max = t_max.max(psi[v]);
    }
    let n = n_thresholds.max(2);
    let tris = f.triangles();
    let data: Vec<([T; 3], T, [T; 3])> = tris
        .iter()
        .map(|&t| {
            let [a, b, c] = s.triangle(t);
            (s.gram(t), s.triangle_area(t), [psi[a], psi[b], psi[c]])
        })
        .collect();
    let level = |t: T| -> (T, T) {
        data.iter().fold((T::zero(), T::zero()), |acc, (g, a, v)| {
            let (da, dl) = triangle_level(*g, *a, *v, t);
            (acc.0 + da, acc.1 + dl)
        })
    };

    let mut thresholds: Vec<T> = (0..n)
        .map(|i| t_max * T::from_usize_lossy(i) / T::from_usize_lossy(n))
        .collect();
    // Area quantiles: bisection on A(t) for targets |F|·(1 − k/n).
    let total = f.area();
    for k in 1..n {
        let target = total * (T::one() - T::from_usize_lossy(k) / T::from_usize_lossy(n));
        let (mut lo, mut hi) = (T::zero(), t_max);
        for _ in 0..50 {
            let mid = (lo + hi) / T::lit(2.0);
            if level(mid).0 > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        thresholds.push((lo + hi) / T::lit(2.0));
    }
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thresholds.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * t_max);
    thresholds.retain(|&t| t < t_max);

    let mut areas = Vec::with_capacity(thresholds.len());
    let mut lengths = Vec::with_capacity(thresholds.len());
    for &t in &thresholds {
        let (a, l) = level(t);
        areas.push(a);
        lengths.push(l);
    }
    let ratios = areas
        .iter()
        .zip(&lengths)
        .map(|(&a, &l)| if a > T::zero() { l / a } else { T::zero() })
        .collect();
    Ok(SweepProfile {
        thresholds,
        areas,
        lengths,
        ratios,
        t_max,
    })
}

/// The ground-state sweep inequality `∫|∇ψ| ≤ 2√λ₀ ∫ψ` for `ψ = φ²`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepInequality<T> {
    /// `∫|∇ψ_h|` for the P1 interpolant `ψ_h` of `φ²`.
    pub grad_psi: T,
    /// `∫ψ_h`.
    pub psi: T,
    /// `∫ 2φ|∇φ|` evaluated exactly for the P1 ground state.
    pub two_phi_grad_phi: T,
    /// `∫φ²` with the consistent mass matrix.
    pub phi_sq: T,
    /// `2√λ₀`.
    pub two_sqrt_lambda: T,
}

impl<T: Real> SweepInequality<T> {
    /// `∫ 2φ|∇φ| ≤ 2√λ₀ ∫φ²`, which holds exactly at the discrete level.
    pub fn holds_exact(&self, rel_tol: T) -> bool {
        self.two_phi_grad_phi <= self.two_sqrt_lambda * self.phi_sq * (T::one() + rel_tol)
    }

    /// `∫|∇ψ_h| ≤ 2√λ₀ ∫ψ_h · (1 + slack)`.
    pub fn holds_interpolated(&self, slack: T) -> bool {
        self.grad_psi <= self.two_sqrt_lambda * self.psi * (T::one() + slack)
    }
}

pub fn sweep_inequality<T: Real>(f: &Subsurface<T>, ground: &SpectralResult<T>) -> SweepInequality<T> {
    let s = f.parent();
    let phi = &ground.ground_state;
    let psi: Vec<T> = phi.iter().map(|&x| x * x).collect();
    let tris = f.triangles();
    let gpsi = gradient_norms(s, tris, &psi);
    let gphi = gradient_norms(s, tris, phi);
    let three = T::lit(3.0);
    let mut out = SweepInequality {
        grad_psi: T::zero(),
        psi: T::zero(),
        two_phi_grad_phi: T::zero(),
        phi_sq: T::zero(),
        two_sqrt_lambda: T::lit(2.0) * ground.lambda0.max(T::zero()).sqrt(),
    };
    for (k, &t) in tris.iter().enumerate() {
        let a = s.triangle_area(t);
        let tri = s.triangle(t);
        let mean_psi = tri.iter().map(|&v| psi[v]).sum::<T>() / three;
        let mean_abs_phi = tri.iter().map(|&v| phi[v].abs()).sum::<T>() / three;
        out.grad_psi += a * gpsi[k];
        out.psi += a * mean_psi;
        out.two_phi_grad_phi += T::lit(2.0) * gphi[k] * a * mean_abs_phi;
        let me = element_mass(a);
        for i in 0..3 {
            for j in 0..3 {
                out.phi_sq += me[i][j] * phi[tri[i]] * phi[tri[j]];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::spectral::lambda0;
    use crate::surface::make_flat_disc;

    #[test]
    fn constant_density() {
        let s = Arc::new(make_flat_disc(1.0, 16).unwrap());
        let f = Subsurface::whole(s.clone());
        let psi = vec![1.0f64; s.n_vertices()];
        let p = sweep(&f, &psi, 16).unwrap();
        assert!(p.areas.iter().all(|&a| (a - f.area()).abs() < 1e-12));
        assert!(p.lengths.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn negative_density_rejected() {
        let s = Arc::new(make_flat_disc(1.0, 8).unwrap());
        let f = Subsurface::whole(s.clone());
        let mut psi = vec![1.0; s.n_vertices()];
        psi[3] = -0.5;
        assert_eq!(sweep(&f, &psi, 8).unwrap_err(), SpectralError::NegativeDensity(-0.5));
    }

    #[test]
    fn coarea_and_cavalieri_on_ground_state() {
        let s = Arc::new(make_flat_disc(1.0, 32).unwrap());
        let f = Subsurface::whole(s.clone());
        let r = lambda0(&f, 1e-10).unwrap();
        let psi: Vec<f64> = r.ground_state.iter().map(|x| x * x).collect();
        let p = sweep(&f, &psi, 128).unwrap();
        let ineq = sweep_inequality(&f, &r);
        assert!(p.areas.windows(2).all(|w| w[1] <= w[0]));
        assert!((p.areas[0] - f.area()).abs() < 1e-12);
        assert!((p.integral_area() - ineq.psi).abs() / ineq.psi < 1e-3);
        assert!((p.integral_length() - ineq.grad_psi).abs() / ineq.grad_psi < 1e-2);
        assert!(ineq.holds_exact(1e-12));
    }
}
