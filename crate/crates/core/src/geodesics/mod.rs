//! Discrete length computations on triangulated surfaces.

mod distance;
mod fuchsian;
mod homology;
mod loops;
mod regions;

use thiserror::Error;

use crate::surface::{SurfaceError, TopoClass};

pub use distance::{curve_distances, dijkstra, eikonal_distances, ShortestPaths};
pub use fuchsian::fuchsian_lengths;
pub use homology::Homology;
pub use loops::{shortest_in_homotopy_class, systole_upper, Certificate, LoopResult};
pub use regions::{collar, inradius, metric_ball};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesicError {
    #[error("systole requires a closed surface")]
    NotClosed,
    #[error("systole requires χ ≤ 0, got χ = {0}")]
    PositiveChi(i64),
    #[error("no homologically nontrivial loop found")]
    NoEssentialLoop,
    #[error("word length cap produces no hyperbolic element")]
    CapTooSmall,
    #[error("expected an annulus, got {0}")]
    WrongClass(TopoClass),
    #[error("subsurface has no boundary")]
    NoBoundary,
    #[error("core loop is not simple")]
    NonSimpleCore,
    #[error("no arc joins the two boundary circles")]
    NoSpanningArc,
    #[error("shortest lift reaches the ends of the unrolled strip")]
    SheetOverflow,
    #[error("{0}")]
    BadParameter(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}
