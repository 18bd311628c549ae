//! Estimates of the analytic systole and checks of the inequalities relating
//! it to the systole, area, curvature and Cheeger constant.
//!
//! Everything here works in `f64`.

mod bounds;
mod candidates;
mod cheeger;
mod ends;
mod experiments;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cmpfun::CmpError;
use crate::geodesics::GeodesicError;
use crate::spectral::SpectralError;
use crate::surface::SurfaceError;

pub use bounds::{check_sandwich, check_systolic_bound, flat_torus_systole, lambda_lower_bound, lower_bound_formula, SandwichReport, SystoleEstimate};
pub use candidates::{lambda_upper, CandidateFamily, CandidateRecord, LambdaUpper, SearchConfig};
pub use cheeger::{cheeger_upper, check_isoperimetric, CheegerEstimate, IsoperimetricOptions, IsoperimetricReport};
pub use ends::{ess_spectrum_estimate, mass_concentration, EssSpecEstimate, MassConcentration};
pub use experiments::{
    conformal_experiment, cover_experiment, annulus_ground_state_diagnostic, ConformalRow, ConformalTable, CoverRow, CoverTable,
    AnnulusGroundStateReport,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("no disc, annulus or cross-cap candidate was found")]
    NoValidCandidate,
    #[error("curvature bound {kappa} is below the maximal curvature {max_curvature}")]
    InvalidCurvatureBound { kappa: f64, max_curvature: f64 },
    #[error("surface carries no curvature field")]
    MissingCurvatureField,
    #[error("δ must lie in (0, 1/2), got {0}")]
    DeltaOutOfRange(f64),
    #[error("need at least {needed} exhaustion levels, got {got}")]
    TooFewLevels { needed: usize, got: usize },
    #[error("conformal factor differs from 1 on the core")]
    FactorNotOneOnCore,
    #[error("{0}")]
    BadParameter(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Cmp(#[from] CmpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

/// One evaluated inequality `lhs ≥ rhs`.
///
/// The margin is `lhs − rhs + tolerance`. The verdict is `Holds` when the
/// margin is at least the discretization error bar, `Violated` when it is
/// below minus the error bar, and `Inconclusive` in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub error_bar: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

impl InequalityReport {
    pub fn new(name: impl Into<String>, instance: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, error_bar: f64) -> Self {
        let margin = lhs - rhs + tolerance;
        let verdict = if !margin.is_finite() {
            Verdict::Inconclusive
        } else if margin >= error_bar {
            Verdict::Holds
        } else if margin < -error_bar {
            Verdict::Violated
        } else {
            Verdict::Inconclusive
        };
        Self {
            name: name.into(),
            instance: instance.into(),
            lhs,
            rhs,
            tolerance,
            error_bar,
            margin,
            verdict,
        }
    }
}

/// Discretization error bar `λ² h² / 12` of a P1 eigenvalue `λ` on a mesh of
/// size `h`, the leading term of the uniform one-dimensional expansion.
pub fn fem_error_bar(lambda: f64, h: f64) -> f64 {
    lambda * lambda * h * h / 12.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rule() {
        assert_eq!(InequalityReport::new("a", "x", 2.0, 1.0, 0.0, 0.5).verdict, Verdict::Holds);
        assert_eq!(InequalityReport::new("a", "x", 1.0, 2.0, 0.0, 0.5).verdict, Verdict::Violated);
        assert_eq!(InequalityReport::new("a", "x", 1.0, 1.2, 0.0, 0.5).verdict, Verdict::Inconclusive);
        assert_eq!(InequalityReport::new("a", "x", 1.0, 1.2, 0.3, 0.05).verdict, Verdict::Holds);
        assert_eq!(InequalityReport::new("a", "x", 1.0, 1.0, 0.0, 0.0).verdict, Verdict::Holds);
    }

    #[test]
    fn fem_error_bar_matches_path_expansion() {
        // Uniform 1D P1: λ_h = 6/h² (1 − cos πh)/(2 + cos πh) ≈ λ + λ² h²/12.
        let h = 0.01;
        let c = (std::f64::consts::PI * h).cos();
        let lh = 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
        let l = std::f64::consts::PI.powi(2);
        assert!(((lh - l) - fem_error_bar(l, h)).abs() / fem_error_bar(l, h) < 1e-3);
    }
}
