//! Pseudo-spectral simulation of the nonlocal Kuramoto-Sivashinsky equation
//!
//! ```text
//! u_t + u_xxxx + u_xx + u u_x + alpha H(u_xxx) = 0,   x in (-l, l), periodic
//! ```
//!
//! where `H` is the periodic Hilbert transform, together with the numerical
//! machinery used to study the limit `alpha -> 0`: trajectory differences
//! against the classical (local) equation, Gronwall-type bounds, scaling fits
//! and attractor sampling.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: zero-mean periodic fields, transforms, multipliers, norms.
//! * [`dynamics`]: linear symbol, dealiased nonlinearity, ETDRK4 stepping.
//! * [`analysis`]: inequality checks, norm estimates, bounds, fits, attractors.
//! * [`experiment`]: configuration and deterministic experiment drivers.
//! * [`io`]: CSV and JSON records.

pub mod analysis;
pub mod dynamics;
mod error;
pub mod experiment;
pub mod io;
pub mod spectral;

pub use error::{Error, Result};

pub use analysis::{
    AttractorSample, BoundVerdict, ConvergenceReport, GronwallConstants, NormEstimates,
    NormSeries, ScalingFit,
};
pub use dynamics::{LinearSymbol, SolverParams, Stepper};
pub use experiment::RunConfig;
pub use spectral::{DomainConfig, RealField, SpectralField};
