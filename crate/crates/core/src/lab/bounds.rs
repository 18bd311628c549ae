//! Closed-form lower bounds for the analytic systole and their verification.

use serde::{Deserialize, Serialize};

use crate::cmpfun::{collar_width, CurvatureBound, Sidedness};
use crate::surface::MetricSurface;

use super::{InequalityReport, LabError, LambdaUpper};

/// Systole value used in a bound, with whether it is certified from below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystoleEstimate {
    pub value: f64,
    /// True when an independent oracle gives the exact value; otherwise the
    /// value is a mesh upper bound and bounds built on it carry a caveat.
    pub certified: bool,
    pub source: String,
}

/// Length of the shortest nonzero vector of the lattice spanned by `a` and
/// `b`, by Lagrange–Gauss reduction; the systole of the flat torus `ℝ²/Λ`.
pub fn flat_torus_systole(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dot = |u: [f64; 2], v: [f64; 2]| u[0] * v[0] + u[1] * v[1];
    let (mut u, mut v) = if dot(a, a) <= dot(b, b) { (a, b) } else { (b, a) };
    loop {
        let m = (dot(u, v) / dot(u, u)).round();
        v = [v[0] - m * u[0], v[1] - m * u[1]];
        if dot(v, v) >= dot(u, u) {
            return dot(u, u).sqrt();
        }
        std::mem::swap(&mut u, &mut v);
    }
}

/// Lower bound for the analytic systole in terms of area, systole and an
/// upper curvature bound `κ`.
///
/// `κ ≤ 0`: `−κ/4 + min{π, sys²/|S|}/|S|`. `κ > 0`: `min{π/|S| − κ/4, sys²/|S|²}`
/// when orientable and `min{π/|S| − κ/4, sys²/(4|S|²)}` otherwise.
pub fn lower_bound_formula(area: f64, sys: f64, kappa: f64, orientable: bool) -> f64 {
    let pi = std::f64::consts::PI;
    if kappa <= 0.0 {
        -kappa / 4.0 + pi.min(sys * sys / area) / area
    } else {
        let sys_term = if orientable { sys * sys / (area * area) } else { sys * sys / (4.0 * area * area) };
        (pi / area - kappa / 4.0).min(sys_term)
    }
}

/// [`lower_bound_formula`] for `S`, after checking `κ` against the curvature
/// field when the surface carries one.
pub fn lambda_lower_bound(s: &MetricSurface<f64>, kappa: CurvatureBound<f64>, sys: &SystoleEstimate) -> Result<f64, LabError> {
    if let Some(k) = s.curvature() {
        let max_curvature = k.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max_curvature > kappa.kappa + 1e-9 {
            return Err(LabError::InvalidCurvatureBound {
                kappa: kappa.kappa,
                max_curvature,
            });
        }
    }
    Ok(lower_bound_formula(s.area(), sys.value, kappa.kappa, s.is_orientable()))
}

/// Checks every candidate eigenvalue against the lower bound.
///
/// The tolerance is `slack · bound` and each candidate carries its own FEM
/// error bar.
pub fn check_systolic_bound(
    s: &MetricSurface<f64>,
    kappa: CurvatureBound<f64>,
    sys: &SystoleEstimate,
    search: &LambdaUpper,
    slack: f64,
    instance: &str,
) -> Result<Vec<InequalityReport>, LabError> {
    let bound = lambda_lower_bound(s, kappa, sys)?;
    Ok(search
        .candidates
        .iter()
        .map(|c| {
            InequalityReport::new(
                format!("systolic_lower_bound[{}]", c.id),
                instance,
                c.lambda0.lambda0,
                bound,
                slack * bound.abs(),
                c.error_bar,
            )
        })
        .collect())
}

/// Both sides of the two-sided estimate for closed hyperbolic surfaces.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    /// `1/4 + sys²/(4π²χ²) ≤ Λ_up`.
    pub lower: InequalityReport,
    /// `Λ_up ≤ 1/4 + 4π²/w²` with `w` the two-sided collar width.
    pub upper: InequalityReport,
    /// Every candidate against the curvature lower bound.
    pub candidates: Vec<InequalityReport>,
    pub collar_width: f64,
    pub lower_value: f64,
    pub upper_value: f64,
    pub lambda_up: f64,
}

/// Checks `1/4 + sys²/(4π²χ²) ≤ Λ_up ≤ 1/4 + 4π²/w(sys)²` on a closed
/// surface of curvature −1, with relative tolerance `tol`.
pub fn check_sandwich(
    s: &MetricSurface<f64>,
    sys: &SystoleEstimate,
    search: &LambdaUpper,
    tol: f64,
    instance: &str,
) -> Result<SandwichReport, LabError> {
    let chi = s.euler_characteristic() as f64;
    if !s.is_closed() || chi >= 0.0 {
        return Err(LabError::BadParameter("sandwich needs a closed hyperbolic surface".into()));
    }
    let pi = std::f64::consts::PI;
    let w = collar_width(sys.value, Sidedness::TwoSided)?;
    let lower_value = 0.25 + sys.value * sys.value / (4.0 * pi * pi * chi * chi);
    let upper_value = 0.25 + 4.0 * pi * pi / (w * w);
    let best = search.best_record();
    let lower = InequalityReport::new("sandwich_lower", instance, search.value, lower_value, tol * lower_value, best.error_bar);
    let upper = InequalityReport::new("sandwich_upper", instance, upper_value, search.value, tol * search.value, best.error_bar);
    let candidates = check_systolic_bound(s, CurvatureBound::new(-1.0), sys, search, tol, instance)?;
    Ok(SandwichReport {
        lower,
        upper,
        candidates,
        collar_width: w,
        lower_value,
        upper_value,
        lambda_up: search.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::make_flat_torus;

    #[test]
    fn square_torus_bound_is_one() {
        let s = make_flat_torus([1.0, 0.0], [0.0, 1.0], 4).unwrap();
        let sys = SystoleEstimate { value: 1.0, certified: true, source: "lattice".into() };
        assert!((lambda_lower_bound(&s, CurvatureBound::new(0.0), &sys).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            lambda_lower_bound(&s, CurvatureBound::new(-1.0), &sys),
            Err(LabError::InvalidCurvatureBound { .. })
        ));
    }

    #[test]
    fn lattice_systole() {
        assert!((flat_torus_systole([1.0, 0.0], [0.0, 1.0]) - 1.0).abs() < 1e-15);
        assert!((flat_torus_systole([1.0, 0.0], [7.5, 1.0]) - 1.0).abs() < 1e-15);
        let h = 3f64.sqrt() / 2.0;
        let s = (1.0 / h).sqrt();
        assert!((flat_torus_systole([s, 0.0], [5.5 * s, h * s]) - s).abs() < 1e-12);
        // Brute force over small coefficients.
        let (a, b) = ([1.3, 0.2], [4.1, 0.9]);
        let brute = (-20i32..=20)
            .flat_map(|i| (-20i32..=20).map(move |j| (i, j)))
            .filter(|&p| p != (0, 0))
            .map(|(i, j)| (i as f64 * a[0] + j as f64 * b[0]).hypot(i as f64 * a[1] + j as f64 * b[1]))
            .fold(f64::INFINITY, f64::min);
        assert!((flat_torus_systole(a, b) - brute).abs() < 1e-12);
    }

    #[test]
    fn octagon_bound_value() {
        let pi = std::f64::consts::PI;
        let sys = 2.0 * (1.0 + 2f64.sqrt()).acosh();
        let area = 4.0 * pi;
        let v = lower_bound_formula(area, sys, -1.0, true);
        assert!((v - (0.25 + sys * sys / (area * area))).abs() < 1e-15);
        // sys²/|S| < π, so the minimum is inactive.
        assert!(sys * sys / area < pi);
    }

    #[test]
    fn positive_curvature_branches() {
        let pi = std::f64::consts::PI;
        assert!((lower_bound_formula(1.0, 0.1, 1.0, true) - 0.01).abs() < 1e-15);
        assert!((lower_bound_formula(1.0, 0.1, 1.0, false) - 0.0025).abs() < 1e-15);
        assert!((lower_bound_formula(10.0, 10.0, 1.0, true) - (pi / 10.0 - 0.25)).abs() < 1e-15);
    }
}
