//! Trajectory differences between the nonlocal and local equations, uniform
//! norm estimates over an `alpha` grid, and log-log scaling fits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{verify_bound, BoundVerdict, NormEstimates, NormSeries};
use crate::dynamics::{check_mean, integrate, Simulation, SolverParams};
use crate::{DomainConfig, Error, Result, SpectralField};

/// Norm series of `u` (nonlocal), `v` (local) and `w = u - v` on a shared grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceRun {
    pub alpha: f64,
    pub w: NormSeries,
    pub u: NormSeries,
    pub v: NormSeries,
}

impl DifferenceRun {
    pub fn sup_w(&self) -> f64 {
        self.w.sup_l2()
    }

    /// Pooled suprema of `u` and `v` over `[0, t_end]`; these enter the
    /// Gronwall constants, which need bounds on both solutions.
    pub fn estimates(&self) -> Result<NormEstimates> {
        Ok(self.u.full_estimates()?.max(self.v.full_estimates()?))
    }
}

/// Integrates the nonlocal equation with `params.alpha` and the local one
/// (`alpha = 0`) from the same `u0` on the same time grid.
pub fn trajectory_difference(
    u0: &SpectralField,
    alpha: f64,
    params: &SolverParams,
) -> Result<DifferenceRun> {
    trajectory_difference_between(u0, &params.with_alpha(alpha), &params.with_alpha(0.0))
}

/// Lockstep integration of two parameter sets; `w` is `first - second`.
pub fn trajectory_difference_between(
    u0: &SpectralField,
    first: &SolverParams,
    second: &SolverParams,
) -> Result<DifferenceRun> {
    if first.dt != second.dt
        || first.t_end != second.t_end
        || first.snapshot_every != second.snapshot_every
    {
        return Err(Error::config(format!(
            "time grids differ: (dt {}, t_end {}, every {}) vs (dt {}, t_end {}, every {})",
            first.dt,
            first.t_end,
            first.snapshot_every,
            second.dt,
            second.t_end,
            second.snapshot_every
        )));
    }
    let mut a = Simulation::new(u0.clone(), first)?;
    let mut b = Simulation::new(u0.clone(), second)?;
    let mut run = DifferenceRun {
        alpha: first.alpha,
        w: NormSeries::default(),
        u: NormSeries::default(),
        v: NormSeries::default(),
    };
    loop {
        if a.at_snapshot() {
            let t = a.time();
            check_mean(run.u.record(t, a.state()), t)?;
            check_mean(run.v.record(t, b.state()), t)?;
            let w = a.state().checked_sub(b.state())?;
            run.w.record(t, &w);
        }
        if a.is_done() {
            break;
        }
        a.advance()?;
        b.advance()?;
    }
    Ok(run)
}

/// Least-squares line through `(ln alpha, ln sup_w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
    pub used: usize,
    /// Indices of points dropped because `alpha` or `sup_w` was not positive.
    pub excluded: Vec<usize>,
}

pub fn fit_scaling(alphas: &[f64], sup_w: &[f64]) -> Result<ScalingFit> {
    if alphas.len() != sup_w.len() {
        return Err(Error::config("alphas and sup_w differ in length"));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut excluded = Vec::new();
    for (i, (&a, &s)) in alphas.iter().zip(sup_w).enumerate() {
        if a > 0.0 && s > 0.0 && a.is_finite() && s.is_finite() {
            xs.push(a.ln());
            ys.push(s.ln());
        } else {
            excluded.push(i);
        }
    }
    if xs.len() < 3 {
        return Err(Error::config(format!(
            "scaling fit needs at least 3 positive points, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::config("scaling fit needs distinct alphas"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(ScalingFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
        used: xs.len(),
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedRun {
    pub alpha: f64,
    pub error: String,
}

/// One `alpha` of a convergence sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub alpha: f64,
    pub sup_w: f64,
    /// `sup_t ||w_x||`, diagnostic only.
    pub sup_w_h1: f64,
    pub estimates: NormEstimates,
    pub bound: BoundVerdict,
    /// Bound check repeated at twice the grid size after a violation.
    pub bound_at_double_resolution: Option<BoundVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub domain: DomainConfig,
    pub params: SolverParams,
    pub t_max_check: f64,
    /// Successful runs, sorted by descending `alpha`.
    pub alphas: Vec<f64>,
    pub sup_w: Vec<f64>,
    pub entries: Vec<SweepEntry>,
    pub fit: Option<ScalingFit>,
    pub fit_error: Option<String>,
    pub failed: Vec<FailedRun>,
}

impl ConvergenceReport {
    pub fn bound_checks(&self) -> impl Iterator<Item = &BoundVerdict> {
        self.entries.iter().map(|e| &e.bound)
    }

    pub fn all_bounds_hold(&self) -> bool {
        self.entries.iter().all(|e| {
            e.bound.satisfied
                || e.bound_at_double_resolution
                    .as_ref()
                    .is_some_and(|v| v.satisfied)
        })
    }
}

fn sweep_entry(u0: &SpectralField, params: &SolverParams, alpha: f64, t_max_check: f64) -> Result<SweepEntry> {
    let run = trajectory_difference(u0, alpha, params)?;
    let estimates = run.estimates()?;
    let bound = verify_bound(&run.w, &estimates, alpha, t_max_check);
    let bound_at_double_resolution = if bound.satisfied {
        None
    } else {
        let d = u0.domain();
        let fine = DomainConfig::new(d.half_length, 2 * d.grid_size)?;
        let rerun = trajectory_difference(&u0.resample(fine)?, alpha, params)?;
        Some(verify_bound(&rerun.w, &rerun.estimates()?, alpha, t_max_check))
    };
    Ok(SweepEntry {
        alpha,
        sup_w: run.sup_w(),
        sup_w_h1: run.w.h1.iter().copied().fold(0.0, f64::max),
        estimates,
        bound,
        bound_at_double_resolution,
    })
}

/// Runs [`trajectory_difference`] for every `alpha` (concurrently, in the
/// ambient rayon pool), checks the Gronwall bound up to `t_max_check` and
/// fits the scaling of `sup_t ||w||` in `alpha`. Blown-up runs are listed
/// in `failed`; the fit uses the survivors.
pub fn convergence_sweep(
    u0: &SpectralField,
    params: &SolverParams,
    alphas: &[f64],
    t_max_check: f64,
) -> Result<ConvergenceReport> {
    params.validate()?;
    if alphas.is_empty() {
        return Err(Error::config("alpha grid is empty"));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
        return Err(Error::config(format!("alpha must be >= 0, got {a}")));
    }
    let mut sorted = alphas.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));

    let outcomes: Vec<Result<SweepEntry>> = sorted
        .par_iter()
        .map(|&alpha| sweep_entry(u0, params, alpha, t_max_check))
        .collect();

    let mut entries = Vec::new();
    let mut failed = Vec::new();
    for (alpha, outcome) in sorted.iter().zip(outcomes) {
        match outcome {
            Ok(e) => entries.push(e),
            Err(e) if e.is_numerical() => failed.push(FailedRun {
                alpha: *alpha,
                error: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    let alphas: Vec<f64> = entries.iter().map(|e| e.alpha).collect();
    let sup_w: Vec<f64> = entries.iter().map(|e| e.sup_w).collect();
    let (fit, fit_error) = match fit_scaling(&alphas, &sup_w) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(ConvergenceReport {
        domain: *u0.domain(),
        params: *params,
        t_max_check,
        alphas,
        sup_w,
        entries,
        fit,
        fit_error,
        failed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformBounds {
    pub window: (f64, f64),
    pub per_alpha: Vec<(f64, NormEstimates)>,
    pub pooled: NormEstimates,
}

impl UniformBounds {
    /// Largest ratio max/min across `alpha` for each of `rho0, rho1, rho2`.
    pub fn spread(&self) -> [f64; 3] {
        let mut out = [1.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            let vals: Vec<f64> = self.per_alpha.iter().map(|(_, e)| e.as_array()[i]).collect();
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            *o = if hi == 0.0 { 1.0 } else { hi / lo };
        }
        out
    }
}

/// Suprema of `||u||`, `||u_x||`, `||u_xx||` over `window` for each `alpha`
/// from the shared initial data, plus their maxima over the grid.
pub fn measure_uniform_bounds(
    u0: &SpectralField,
    params: &SolverParams,
    alphas: &[f64],
    window: (f64, f64),
) -> Result<UniformBounds> {
    if !(window.0 >= 0.0 && window.0 <= window.1 && window.1 <= params.t_end) {
        return Err(Error::config(format!(
            "window [{}, {}] must lie inside [0, {}]",
            window.0, window.1, params.t_end
        )));
    }
    let per_alpha = alphas
        .par_iter()
        .map(|&alpha| {
            let series = integrate(u0, &params.with_alpha(alpha), |_, _| {})?;
            Ok((alpha, series.estimates(window)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let pooled = per_alpha
        .iter()
        .fold(NormEstimates::default(), |acc, (_, e)| acc.max(*e));
    Ok(UniformBounds {
        window,
        per_alpha,
        pooled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random_field;
    use std::f64::consts::PI;

    fn small() -> (SpectralField, SolverParams) {
        let d = DomainConfig::new(8.0 * PI, 128).unwrap();
        let u0 = random_field(d, 2, 0.5, 2.0).unwrap();
        let p = SolverParams {
            dt: 0.05,
            t_end: 2.0,
            snapshot_every: 4,
            ..SolverParams::default()
        };
        (u0, p)
    }

    #[test]
    fn exact_power_laws_are_recovered() {
        let alphas = [1e-1, 1e-2, 1e-3, 1e-4];
        for p in [1.0, 2.0, 0.5] {
            let sup: Vec<f64> = alphas.iter().map(|a: &f64| 3.7 * a.powf(p)).collect();
            let f = fit_scaling(&alphas, &sup).unwrap();
            assert!((f.slope - p).abs() < 1e-12, "{}", f.slope);
            assert!((f.intercept - 3.7f64.ln()).abs() < 1e-12);
            assert!(f.residual < 1e-12);
        }
    }

    #[test]
    fn zero_points_are_excluded() {
        let f = fit_scaling(&[1e-1, 1e-2, 0.0, 1e-3], &[1.0, 0.1, 0.0, 0.01]).unwrap();
        assert_eq!(f.excluded, vec![2]);
        assert_eq!(f.used, 3);
        assert!(fit_scaling(&[1e-1, 1e-2, 0.0], &[1.0, 0.1, 0.0]).is_err());
    }

    #[test]
    fn zero_alpha_difference_vanishes() {
        let (u0, p) = small();
        let run = trajectory_difference(&u0, 0.0, &p).unwrap();
        assert!(run.w.l2.iter().all(|&w| w == 0.0));
        assert_eq!(run.u, run.v);
    }

    #[test]
    fn zero_data_difference_vanishes() {
        let (u0, p) = small();
        let z = SpectralField::zeros(*u0.domain());
        let run = trajectory_difference(&z, 0.1, &p).unwrap();
        assert!(run.w.l2.iter().all(|&w| w == 0.0));
    }

    #[test]
    fn difference_starts_at_zero_and_is_symmetric() {
        let (u0, p) = small();
        let fwd = trajectory_difference_between(&u0, &p.with_alpha(0.01), &p.with_alpha(0.0)).unwrap();
        let rev = trajectory_difference_between(&u0, &p.with_alpha(0.0), &p.with_alpha(0.01)).unwrap();
        assert_eq!(fwd.w.l2[0], 0.0);
        assert_eq!(fwd.w.l2, rev.w.l2);
        assert_eq!(fwd.w.h1, rev.w.h1);
        assert!(fwd.sup_w() > 0.0);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let (u0, p) = small();
        let err = trajectory_difference_between(&u0, &p, &p.with_dt(0.01)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn sweep_handles_zero_alpha() {
        let (u0, p) = small();
        let r = convergence_sweep(&u0, &p, &[0.0, 1e-2, 1e-3, 1e-4], 1.0).unwrap();
        assert_eq!(r.alphas, vec![1e-2, 1e-3, 1e-4, 0.0]);
        assert_eq!(r.sup_w[3], 0.0);
        let fit = r.fit.as_ref().unwrap();
        assert_eq!(fit.excluded, vec![3]);
        assert!(r.all_bounds_hold());
        assert!(r.failed.is_empty());
    }

    #[test]
    fn uniform_bounds_of_zero_data_vanish() {
        let (u0, p) = small();
        let z = SpectralField::zeros(*u0.domain());
        let b = measure_uniform_bounds(&z, &p, &[0.0, 0.5], (0.0, 2.0)).unwrap();
        assert_eq!(b.pooled, NormEstimates::default());
        assert!(measure_uniform_bounds(&z, &p, &[0.0], (1.0, 3.0)).is_err());
    }

    #[test]
    fn linear_decay_bounds_attained_initially() {
        let (u0, p) = small();
        let lin = SolverParams { nonlinear: false, ..p };
        // every mode of u0 with q > 1 decays; drop the growing ones
        let d = *u0.domain();
        let stable = SpectralField::from_modes(
            d,
            &(9..20).map(|k| (k, u0.coeff(k))).collect::<Vec<_>>(),
        )
        .unwrap();
        let b = measure_uniform_bounds(&stable, &lin, &[0.0, 0.5], (0.0, 2.0)).unwrap();
        for (_, e) in &b.per_alpha {
            assert_eq!(e.rho0, stable.l2_norm());
        }
    }
}
