//! Failure classes and their exit codes.

use std::fmt::Display;

use systole_core::geodesics::GeodesicError;
use systole_core::lab::LabError;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_VIOLATED: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    /// Missing or malformed input.
    #[error("{0:#}")]
    Input(anyhow::Error),
    /// A computation on valid input did not succeed.
    #[error("{0:#}")]
    Solver(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Solver(_) => EXIT_SOLVER,
        }
    }

    pub fn input(msg: impl Display) -> Self {
        Failure::Input(anyhow::anyhow!("{msg}"))
    }
}

pub type Outcome<T> = Result<T, Failure>;

/// Classifies an error as bad input or as a solver failure.
pub trait Classify<T> {
    fn input_err(self, context: &str) -> Outcome<T>;
    fn solver_err(self, context: &str) -> Outcome<T>;
}

impl<T, E> Classify<T> for Result<T, E>
where
    E: std::error::Error + Send + Sync + 'static,
{
    fn input_err(self, context: &str) -> Outcome<T> {
        self.map_err(|e| Failure::Input(anyhow::Error::new(e).context(context.to_string())))
    }

    fn solver_err(self, context: &str) -> Outcome<T> {
        self.map_err(|e| Failure::Solver(anyhow::Error::new(e).context(context.to_string())))
    }
}

fn classified(input: bool, err: anyhow::Error) -> Failure {
    if input {
        Failure::Input(err)
    } else {
        Failure::Solver(err)
    }
}

fn geodesic_input(e: &GeodesicError) -> bool {
    matches!(
        e,
        GeodesicError::NotClosed
            | GeodesicError::PositiveChi(_)
            | GeodesicError::WrongClass(_)
            | GeodesicError::NoBoundary
            | GeodesicError::BadParameter(_)
    )
}

/// Surfaces of the wrong kind are input errors; the rest are solver failures.
pub fn geodesic<T>(r: Result<T, GeodesicError>, context: &str) -> Outcome<T> {
    r.map_err(|e| classified(geodesic_input(&e), anyhow::Error::new(e).context(context.to_string())))
}

/// Parameter errors of the lab routines are input errors; the rest are
/// solver failures.
pub fn lab<T>(r: Result<T, LabError>, context: &str) -> Outcome<T> {
    r.map_err(|e| {
        let input = match &e {
            LabError::InvalidCurvatureBound { .. }
            | LabError::MissingCurvatureField
            | LabError::DeltaOutOfRange(_)
            | LabError::TooFewLevels { .. }
            | LabError::FactorNotOneOnCore
            | LabError::BadParameter(_) => true,
            LabError::Geodesic(g) => geodesic_input(g),
            _ => false,
        };
        classified(input, anyhow::Error::new(e).context(context.to_string()))
    })
}
