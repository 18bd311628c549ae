//! Spectral geometry of meshed Riemannian surfaces: Dirichlet eigenvalues,
//! systoles, Cheeger constants and the inequalities relating them.

pub mod cmpfun;
pub mod geodesics;
pub mod lab;
pub mod real;
pub mod scene;
pub mod sparse;
pub mod spectral;
pub mod surface;

pub type Surface = surface::MetricSurface<f64>;
pub type Region = surface::Subsurface<f64>;
pub type Exhaustion = surface::ExhaustionFamily<f64>;
pub type Spectrum = spectral::SpectralResult<f64>;
pub type Loop = geodesics::LoopResult<f64>;
