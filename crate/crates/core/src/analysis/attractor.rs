//! Post-transient trajectory samples as a computable proxy for the global
//! attractor, and one-sided Hausdorff distances between them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FailedRun;
use crate::dynamics::{integrate, SolverParams};
use crate::{Error, Result, SpectralField};

/// Observable cloud `(||u||, ||u_x||, ||u||_inf)` along one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractorSample {
    pub alpha: f64,
    pub t_transient: f64,
    pub t_sample: f64,
    pub stride: usize,
    pub points: Vec<[f64; 3]>,
    /// Snapshot fields at the sampled times, kept only on request.
    #[serde(skip)]
    pub fields: Option<Vec<SpectralField>>,
}

impl AttractorSample {
    /// Spread of the L2 coordinate across the cloud.
    pub fn l2_spread(&self) -> f64 {
        let (lo, hi) = self
            .points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p[0]), hi.max(p[0]))
            });
        hi - lo
    }
}

/// Integrates to `t_transient + t_sample` and keeps every `stride`-th
/// observation at or after `t_transient`.
pub fn sample_attractor(
    u0: &SpectralField,
    params: &SolverParams,
    t_transient: f64,
    t_sample: f64,
    stride: usize,
    keep_fields: bool,
) -> Result<AttractorSample> {
    if stride == 0 {
        return Err(Error::config("stride must be at least 1"));
    }
    if !(t_transient >= 0.0 && t_sample >= 0.0) {
        return Err(Error::config("sampling windows must be nonnegative"));
    }
    let run = params.with_t_end(t_transient + t_sample);
    let mut points = Vec::new();
    let mut fields = Vec::new();
    let mut seen = 0usize;
    integrate(u0, &run, |t, u| {
        if t < t_transient - 1e-9 {
            return;
        }
        if seen.is_multiple_of(stride) {
            points.push([u.l2_norm(), u.h1_norm(), u.linf_norm()]);
            if keep_fields {
                fields.push(u.clone());
            }
        }
        seen += 1;
    })?;
    if points.is_empty() {
        return Err(Error::config("sampling window recorded no observations"));
    }
    Ok(AttractorSample {
        alpha: params.alpha,
        t_transient,
        t_sample,
        stride,
        points,
        fields: keep_fields.then_some(fields),
    })
}

/// `max_{a in A} min_{b in B} |a - b|` (Euclidean).
pub fn hausdorff_semidistance<P: AsRef<[f64]>>(a: &[P], b: &[P]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::config("point clouds must be nonempty"));
    }
    let dim = a[0].as_ref().len();
    if a.iter().chain(b).any(|p| p.as_ref().len() != dim) {
        return Err(Error::config("point clouds have mismatched dimensions"));
    }
    let d = a
        .iter()
        .map(|p| {
            b.iter()
                .map(|q| {
                    p.as_ref()
                        .iter()
                        .zip(q.as_ref())
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok(d.sqrt())
}

/// One-sided Hausdorff distance between snapshot sets in the L2 norm.
pub fn field_semidistance(a: &[SpectralField], b: &[SpectralField]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::config("snapshot sets must be nonempty"));
    }
    let mut worst = 0.0f64;
    for p in a {
        let mut best = f64::INFINITY;
        for q in b {
            best = best.min(p.checked_sub(q)?.l2_norm());
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledRun {
    pub sample: AttractorSample,
    /// `d(A_alpha -> A_0)` on the observable clouds.
    pub distance: f64,
    /// Same distance between snapshot fields, when fields were kept.
    pub field_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractorReport {
    pub reference: AttractorSample,
    pub runs: Vec<SampledRun>,
    pub failed: Vec<FailedRun>,
}

impl AttractorReport {
    pub fn alphas(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.sample.alpha).collect()
    }

    pub fn distances(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.distance).collect()
    }
}

/// Samples the `alpha = 0` cloud and one cloud per grid entry (in the given
/// order, concurrently) and measures each against the reference.
pub fn attractor_study(
    u0: &SpectralField,
    params: &SolverParams,
    alphas: &[f64],
    t_transient: f64,
    t_sample: f64,
    stride: usize,
    keep_fields: bool,
) -> Result<AttractorReport> {
    if alphas.is_empty() {
        return Err(Error::config("alpha grid is empty"));
    }
    let sample = |alpha: f64| {
        sample_attractor(
            u0,
            &params.with_alpha(alpha),
            t_transient,
            t_sample,
            stride,
            keep_fields,
        )
    };
    let (reference, outcomes) = rayon::join(
        || sample(0.0),
        || alphas.par_iter().map(|&a| sample(a)).collect::<Vec<_>>(),
    );
    let reference = reference?;
    let mut runs = Vec::new();
    let mut failed = Vec::new();
    for (alpha, outcome) in alphas.iter().zip(outcomes) {
        match outcome {
            Ok(sample) => {
                let distance = hausdorff_semidistance(&sample.points, &reference.points)?;
                let field_distance = match (&sample.fields, &reference.fields) {
                    (Some(a), Some(b)) => Some(field_semidistance(a, b)?),
                    _ => None,
                };
                runs.push(SampledRun {
                    sample,
                    distance,
                    field_distance,
                });
            }
            Err(e) if e.is_numerical() => failed.push(FailedRun {
                alpha: *alpha,
                error: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(AttractorReport {
        reference,
        runs,
        failed,
    })
}
