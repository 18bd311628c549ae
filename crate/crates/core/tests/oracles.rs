//! Frozen reference values from independent solvers.

use std::sync::Arc;

use systole_core::geodesics::systole_upper;
use systole_core::spectral::{lambda0, lambda_k, Extrapolation};
use systole_core::surface::{make_flat_disc, make_flat_torus, make_hyperbolic_disc, make_round_sphere, MetricSurface};
use systole_core::Region;

/// First zero of `J0`, squared.
const FLAT_UNIT_DISC: f64 = 5.783185962946784;

/// Dirichlet ground state of the hyperbolic disc of radius `R`, from a
/// shooting solve of the radial equation.
const HYPERBOLIC_DISC: [(f64, f64); 7] = [
    (1.0, 6.113081819713277),
    (2.0, 1.7672530903382742),
    (3.0, 0.9539621891763154),
    (4.0, 0.663319626516295),
    (5.0, 0.5250361693802467),
    (6.0, 0.4476228220898365),
    (8.0, 0.3674166740857681),
];

/// Systole of the regular genus-two octagon surface.
const OCTAGON_SYSTOLE: f64 = 3.057141838961996;

fn extrapolated(build: impl Fn(usize) -> MetricSurface<f64>, resolutions: &[usize]) -> Extrapolation {
    let levels: Vec<(usize, f64)> = resolutions
        .iter()
        .map(|&n| (n, lambda0(&Region::whole(Arc::new(build(n))), 1e-10).unwrap().lambda0))
        .collect();
    Extrapolation::from_levels(&levels).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn flat_disc_ground_state() {
    let x = extrapolated(|n| make_flat_disc(1.0, n).unwrap(), &[16, 32, 64]);
    assert!(rel(x.value, FLAT_UNIT_DISC) < 1e-3, "{x:?}");
}

#[test]
fn flat_disc_scales_inverse_square() {
    let x = extrapolated(|n| make_flat_disc(2.0, n).unwrap(), &[16, 32, 64]);
    assert!(rel(x.value, FLAT_UNIT_DISC / 4.0) < 1e-3, "{x:?}");
}

#[test]
fn hyperbolic_disc_ground_states() {
    for &(r, expected) in &HYPERBOLIC_DISC[..4] {
        let x = extrapolated(|n| make_hyperbolic_disc(r, n).unwrap(), &[16, 32, 64]);
        assert!(rel(x.value, expected) < 0.01, "R={r}: {x:?} vs {expected}");
    }
}

#[test]
fn hyperbolic_disc_reference_values_decrease_toward_quarter() {
    assert!(HYPERBOLIC_DISC.windows(2).all(|w| w[1].1 < w[0].1));
    assert!(HYPERBOLIC_DISC.iter().all(|&(_, l)| l > 0.25));
}

#[test]
fn unit_torus_first_eigenvalue() {
    let s: MetricSurface<f64> = make_flat_torus([1.0, 0.0], [0.0, 1.0], 24).unwrap();
    let l = lambda_k(&s, 1, 1e-10).unwrap();
    assert!(l[0].abs() < 1e-8);
    assert!(rel(l[1], 4.0 * std::f64::consts::PI.powi(2)) < 0.02, "{l:?}");
}

#[test]
fn round_sphere_first_eigenvalue() {
    let s: MetricSurface<f64> = make_round_sphere(32).unwrap();
    let l = lambda_k(&s, 1, 1e-10).unwrap();
    assert!(rel(l[1], 2.0) < 0.02, "{l:?}");
}

#[test]
fn octagon_systole_from_mesh() {
    let s: MetricSurface<f64> = systole_core::surface::make_hyperbolic_octagon(24).unwrap();
    let l = systole_upper(&s).unwrap();
    assert!(l.length >= OCTAGON_SYSTOLE * (1.0 - 1e-9));
    assert!(rel(l.length, OCTAGON_SYSTOLE) < 0.03, "{}", l.length);
}
