//! Numerical counterparts of the analytic statements about the equation:
//! functional inequalities and Hilbert identities, uniform norm bounds, the
//! Gronwall estimate for trajectory differences, scaling fits in `alpha`
//! and attractor sampling.

mod attractor;
mod convergence;
mod gronwall;
mod inequalities;
mod series;

pub use attractor::{
    attractor_study, field_semidistance, hausdorff_semidistance, sample_attractor,
    AttractorReport, AttractorSample, SampledRun,
};
pub use convergence::{
    convergence_sweep, fit_scaling, measure_uniform_bounds, trajectory_difference,
    trajectory_difference_between, ConvergenceReport, DifferenceRun, FailedRun, ScalingFit,
    SweepEntry, UniformBounds,
};
pub use gronwall::{gronwall_bound, verify_bound, BoundVerdict, BoundViolation, GronwallConstants};
pub use inequalities::{
    agmon_ratio, check_inequalities, poincare_ratio, PropertyCheck, PropertyKind, PropertyReport,
    IDENTITY_TOL,
};
pub use series::{NormEstimates, NormSeries};
