//! Experiment configuration and deterministic drivers.
//!
//! A [`RunConfig`] is one JSON document; every field has a default that
//! reproduces the chaotic-regime setup, so `{}` is a valid configuration.
//! All randomness flows from `initial.seed`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{
    attractor_study, check_inequalities, convergence_sweep, AttractorReport, ConvergenceReport,
    NormSeries, PropertyReport,
};
use crate::dynamics::{integrate, SolverParams};
use crate::io::{save_snapshot, Snapshot};
use crate::spectral::random_field;
use crate::{DomainConfig, Error, Result, SpectralField};

/// Environment variable capping the number of concurrent runs.
pub const THREADS_ENV: &str = "NLKS_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialData {
    pub seed: u64,
    pub amplitude: f64,
    pub decay: f64,
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData {
            seed: 0,
            amplitude: 1.0,
            decay: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub alphas: Vec<f64>,
    pub t_end: f64,
    pub t_max_check: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            alphas: vec![1e-2, 1e-3, 1e-4],
            t_end: 10.0,
            t_max_check: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttractorConfig {
    pub alphas: Vec<f64>,
    pub t_transient: f64,
    pub t_sample: f64,
    pub stride: usize,
    /// Also keep snapshot fields and report L2 distances between them.
    pub full_fields: bool,
}

impl Default for AttractorConfig {
    fn default() -> Self {
        AttractorConfig {
            alphas: vec![1e-1, 1e-2, 1e-3],
            t_transient: 50.0,
            t_sample: 200.0,
            stride: 1,
            full_fields: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropertiesConfig {
    pub count: usize,
}

impl Default for PropertiesConfig {
    fn default() -> Self {
        PropertiesConfig { count: 100 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for per-observation `x,u` snapshot files (simulate only).
    pub snapshot_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub solver: SolverParams,
    pub initial: InitialData,
    pub sweep: SweepConfig,
    pub attractor: AttractorConfig,
    pub properties: PropertiesConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        self.solver.validate()?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("initial.amplitude", self.initial.amplitude)?;
        positive("initial.decay", self.initial.decay)?;
        positive("sweep.t_end", self.sweep.t_end)?;
        positive("sweep.t_max_check", self.sweep.t_max_check)?;
        if self.attractor.stride == 0 {
            return Err(Error::config("attractor.stride must be at least 1"));
        }
        if !(self.attractor.t_transient >= 0.0 && self.attractor.t_sample >= 0.0) {
            return Err(Error::config("attractor windows must be nonnegative"));
        }
        for (name, grid) in [("sweep", &self.sweep.alphas), ("attractor", &self.attractor.alphas)] {
            if let Some(a) = grid.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
                return Err(Error::config(format!("{name}.alphas entries must be >= 0, got {a}")));
            }
        }
        Ok(())
    }

    /// Applies command-line overrides; `alpha` replaces the solver value and
    /// both sweep grids.
    pub fn apply_overrides(&mut self, seed: Option<u64>, alpha: Option<f64>) {
        if let Some(seed) = seed {
            self.initial.seed = seed;
        }
        if let Some(alpha) = alpha {
            self.solver.alpha = alpha;
            self.sweep.alphas = vec![alpha];
            self.attractor.alphas = vec![alpha];
        }
    }

    pub fn initial_field(&self) -> Result<SpectralField> {
        random_field(
            self.domain,
            self.initial.seed,
            self.initial.amplitude,
            self.initial.decay,
        )
    }
}

/// Worker count for `jobs` independent runs: `NLKS_THREADS` if set, else `jobs`.
pub fn thread_count(jobs: usize) -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(jobs)
        .max(1)
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(jobs))
        .build()
        .map_err(|e| Error::config(format!("cannot build thread pool: {e}")))?;
    pool.install(f)
}

/// Integrates one trajectory; writes snapshot files when configured.
pub fn simulate(cfg: &RunConfig) -> Result<NormSeries> {
    cfg.validate()?;
    let u0 = cfg.initial_field()?;
    let dir = cfg.output.snapshot_dir.as_ref();
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut index = 0usize;
    let mut write_error = None;
    let series = integrate(&u0, &cfg.solver, |t, u| {
        let Some(dir) = dir else { return };
        if write_error.is_some() {
            return;
        }
        let path = dir.join(format!("snapshot_{index:06}.csv"));
        index += 1;
        if let Err(e) = Snapshot::from_spectral(t, cfg.solver.alpha, u)
            .and_then(|s| save_snapshot(path, &s))
        {
            write_error = Some(e);
        }
    })?;
    if let Some(e) = write_error {
        return Err(e);
    }
    Ok(series)
}

pub fn sweep(cfg: &RunConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let u0 = cfg.initial_field()?;
    let params = cfg.solver.with_t_end(cfg.sweep.t_end);
    with_pool(cfg.sweep.alphas.len(), || {
        convergence_sweep(&u0, &params, &cfg.sweep.alphas, cfg.sweep.t_max_check)
    })
}

pub fn attractor(cfg: &RunConfig) -> Result<AttractorReport> {
    cfg.validate()?;
    let u0 = cfg.initial_field()?;
    let a = &cfg.attractor;
    with_pool(a.alphas.len() + 1, || {
        attractor_study(
            &u0,
            &cfg.solver,
            &a.alphas,
            a.t_transient,
            a.t_sample,
            a.stride,
            a.full_fields,
        )
    })
}

pub fn properties(cfg: &RunConfig) -> Result<PropertyReport> {
    cfg.validate()?;
    check_inequalities(cfg.domain, cfg.initial.seed, cfg.properties.count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_json_gives_defaults() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.domain.grid_size, 512);
        assert_eq!(cfg.solver.dt, 0.05);
        assert_eq!(cfg.sweep.alphas, vec![1e-2, 1e-3, 1e-4]);
    }

    #[test]
    fn partial_json_overrides_fields() {
        let cfg = RunConfig::from_json(r#"{"domain": {"grid_size": 64}, "solver": {"alpha": 0.5}}"#)
            .unwrap();
        assert_eq!(cfg.domain.grid_size, 64);
        assert_eq!(cfg.domain.half_length, DomainConfig::chaotic_default().half_length);
        assert_eq!(cfg.solver.alpha, 0.5);
        assert_eq!(cfg.solver.dt, 0.05);
    }

    #[test]
    fn bad_configs_rejected() {
        assert!(matches!(RunConfig::from_json(r#"{"solver": {"dt": -1}}"#), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_json(r#"{"domain": {"grid_size": 7}}"#), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_json(r#"{"typo": 1}"#), Err(Error::Json(_))));
        assert!(RunConfig::from_json(r#"{"sweep": {"alphas": [-1]}}"#).is_err());
    }

    #[test]
    fn overrides() {
        let mut cfg = RunConfig::default();
        cfg.apply_overrides(Some(9), Some(0.2));
        assert_eq!(cfg.initial.seed, 9);
        assert_eq!(cfg.solver.alpha, 0.2);
        assert_eq!(cfg.sweep.alphas, vec![0.2]);
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }
}
