//! Cheeger constant estimates and isoperimetric inequalities on subsurfaces.

use serde::{Deserialize, Serialize};

use crate::cmpfun::{ct, tn, CurvatureBound};
use crate::geodesics::{inradius, shortest_in_homotopy_class, GeodesicError};
use crate::spectral::{lambda0, sweep, sweep_inequality, SweepInequality, SweepProfile};
use crate::surface::{Subsurface, TopoClass};

use super::{InequalityReport, LabError};

/// Superlevel sweep of the squared ground state.
#[derive(Debug, Clone, Serialize)]
pub struct CheegerEstimate {
    /// `min L(t)/A(t)` over the sweep, an upper bound for the Cheeger constant.
    pub h_upper: f64,
    /// Threshold attaining `h_upper`.
    pub threshold: f64,
    pub lambda0: f64,
    pub profile: SweepProfile<f64>,
    pub sweep_inequality: SweepInequality<f64>,
}

/// Upper bound for the Cheeger constant of `F` from the superlevel sets of
/// the squared ground state, each of which is an admissible competitor.
pub fn cheeger_upper(f: &Subsurface<f64>, n_thresholds: usize, tol: f64) -> Result<CheegerEstimate, LabError> {
    if !f.has_boundary() {
        return Err(GeodesicError::NoBoundary.into());
    }
    let ground = lambda0(f, tol)?;
    let psi: Vec<f64> = ground.ground_state.iter().map(|x| x * x).collect();
    let profile = sweep(f, &psi, n_thresholds)?;
    let (threshold, h_upper) = profile.min_ratio().ok_or(LabError::BadParameter("sweep has no positive threshold".into()))?;
    Ok(CheegerEstimate {
        h_upper,
        threshold,
        lambda0: ground.lambda0,
        sweep_inequality: sweep_inequality(f, &ground),
        profile,
    })
}

/// Tolerance and error bar of the isoperimetric checks, both relative to the
/// right-hand side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoperimetricOptions {
    pub tolerance_rel: f64,
    pub error_bar_rel: f64,
    pub instance: String,
}

impl Default for IsoperimetricOptions {
    fn default() -> Self {
        Self {
            tolerance_rel: 0.0,
            error_bar_rel: 0.0,
            instance: String::new(),
        }
    }
}

/// Measured quantities and verdicts of the three isoperimetric inequalities.
#[derive(Debug, Clone, Serialize)]
pub struct IsoperimetricReport {
    pub chi: i64,
    pub area: f64,
    pub boundary_length: f64,
    pub inradius: Option<f64>,
    /// Total length of the shortest loops homotopic to the boundary circles.
    pub ell: Option<f64>,
    /// `∫(K − κ)⁺`.
    pub curvature_excess: f64,
    pub reports: Vec<InequalityReport>,
}

/// Evaluates, with `a = 2πχ − ∫(K − κ)⁺`:
///
/// * `|∂F|² ≥ −κ|F|² + 2a|F|` always;
/// * `|∂F| ≥ |F| ct_κ(ρ) + a tn_κ(ρ/2)` when `κ ≤ 0`;
/// * `√(|∂F|² − ℓ²) ≥ √−κ |F| + a/√−κ` when `κ < 0` and `F` is an annulus.
pub fn check_isoperimetric(
    f: &Subsurface<f64>,
    kappa: CurvatureBound<f64>,
    opts: &IsoperimetricOptions,
) -> Result<IsoperimetricReport, LabError> {
    if !f.has_boundary() {
        return Err(GeodesicError::NoBoundary.into());
    }
    let s = f.parent();
    let k = kappa.kappa;
    let curvature = s.curvature().ok_or(LabError::MissingCurvatureField)?;
    let excess: f64 = f
        .triangles()
        .iter()
        .map(|&t| (curvature[t] - k).max(0.0) * s.triangle_area(t))
        .sum();
    let chi = f.chi();
    let area = f.area();
    let perim = f.boundary_length();
    let a = 2.0 * std::f64::consts::PI * chi as f64 - excess;
    let report = |name: &str, lhs: f64, rhs: f64| {
        InequalityReport::new(name, opts.instance.clone(), lhs, rhs, opts.tolerance_rel * rhs.abs(), opts.error_bar_rel * rhs.abs())
    };

    let mut reports = vec![report("isoperimetric_area", perim * perim, -k * area * area + 2.0 * a * area)];
    let mut rho = None;
    if k <= 0.0 {
        let r = inradius(f)?;
        rho = Some(r);
        let rhs = |r: f64| -> Result<f64, LabError> { Ok(area * ct(k, r)? + a * tn(k, r / 2.0)) };
        let at_r = rhs(r)?;
        // Every point of a triangle with edges at most `h` lies within
        // `h/√3` of a corner, so the vertex maximum misses by at most that.
        let h = f
            .triangles()
            .iter()
            .flat_map(|&t| s.tri_edges(t))
            .map(|e| s.edge_length(e))
            .fold(0.0, f64::max)
            / 3f64.sqrt();
        let mut spread: f64 = 0.0;
        for i in 1..=8 {
            spread = spread.max((rhs(r + h * i as f64 / 8.0)? - at_r).abs());
        }
        reports.push(InequalityReport::new(
            "isoperimetric_inradius",
            opts.instance.clone(),
            perim,
            at_r,
            opts.tolerance_rel * at_r.abs(),
            opts.error_bar_rel * at_r.abs() + spread,
        ));
    }
    let mut ell = None;
    if k < 0.0 && f.topo_class() == TopoClass::Annulus {
        let l = 2.0 * shortest_in_homotopy_class(f)?.length;
        ell = Some(l);
        let sk = (-k).sqrt();
        reports.push(report("isoperimetric_loops", (perim * perim - l * l).max(0.0).sqrt(), sk * area + a / sk));
    }
    Ok(IsoperimetricReport {
        chi,
        area,
        boundary_length: perim,
        inradius: rho,
        ell,
        curvature_excess: excess,
        reports,
    })
}
