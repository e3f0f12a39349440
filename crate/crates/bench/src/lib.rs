//! Shared fixtures for the benchmarks.

use nlks::spectral::random_field;
use nlks::{DomainConfig, SolverParams, SpectralField};

/// Grid sizes exercised by every kernel benchmark.
pub const GRID_SIZES: [usize; 3] = [128, 512, 2048];

/// Smooth random field on the chaotic-regime interval with `n` points.
pub fn fixture(n: usize) -> SpectralField {
    let d = DomainConfig::new(DomainConfig::chaotic_default().half_length, n)
        .expect("benchmark grids are valid");
    random_field(d, 0, 1.0, 2.0).expect("fixture parameters are valid")
}

/// Default solver settings with a short horizon.
pub fn params(alpha: f64) -> SolverParams {
    SolverParams::default().with_alpha(alpha).with_t_end(1.0)
}
