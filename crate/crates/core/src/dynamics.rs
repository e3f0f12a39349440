//! Right-hand side and stiff time stepping for
//!
//! ```text
//! u_t = -u_xxxx - u_xx - alpha H(u_xxx) - u u_x.
//! ```
//!
//! In Fourier space the linear part is diagonal with symbol
//! `lambda_k = q_k^2 - q_k^4 - alpha |q_k|^3` (the Hilbert multiplier
//! `i sgn(k)` times `(i q_k)^3` is `|q_k|^3`), so the equation is advanced
//! with fourth-order exponential time differencing (ETDRK4). The
//! phi-function weights are evaluated as contour means around each
//! `lambda_k dt` to stay accurate where `lambda_k dt` is near zero.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::NormSeries;
use crate::spectral::{FftPair, SpectralField};
use crate::{DomainConfig, Error, Result};

/// Number of contour nodes used for the phi-function weights.
const CONTOUR_POINTS: usize = 32;
const CONTOUR_RADIUS: f64 = 1.0;

/// L2 norm above which a run is declared blown up.
pub const BLOWUP_L2: f64 = 1e6;

/// Largest tolerated grid mean of a snapshot.
pub const MEAN_TOL: f64 = 1e-10;

/// Recipe for one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverParams {
    /// Coefficient of the Hilbert term.
    pub alpha: f64,
    pub dt: f64,
    pub t_end: f64,
    /// 2/3-rule truncation around the quadratic product.
    pub dealias: bool,
    /// Steps between recorded observations.
    pub snapshot_every: usize,
    /// When false only the linear flow is integrated.
    pub nonlinear: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            alpha: 0.01,
            dt: 0.05,
            t_end: 100.0,
            dealias: true,
            snapshot_every: 2,
            nonlinear: true,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::config(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::config(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.snapshot_every == 0 {
            return Err(Error::config("snapshot_every must be at least 1"));
        }
        Ok(())
    }

    /// Number of fixed steps covering `[0, t_end]`.
    pub fn n_steps(&self) -> usize {
        if self.t_end == 0.0 {
            return 0;
        }
        (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        SolverParams { alpha, ..self }
    }

    pub fn with_t_end(self, t_end: f64) -> Self {
        SolverParams { t_end, ..self }
    }

    pub fn with_dt(self, dt: f64) -> Self {
        SolverParams { dt, ..self }
    }

    /// Whether `alpha` lies in the range where the uniform norm bounds apply.
    pub fn in_uniform_regime(&self) -> bool {
        (0.0..=1.0).contains(&self.alpha)
    }
}

/// Diagonal linear operator in Fourier space.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSymbol {
    domain: DomainConfig,
    alpha: f64,
    lambda: Vec<f64>,
}

impl LinearSymbol {
    /// `lambda_k = q_k^2 - q_k^4 - alpha |q_k|^3`. For `alpha == 0` this is
    /// exactly [`LinearSymbol::local`].
    pub fn new(domain: DomainConfig, alpha: f64) -> Self {
        if alpha == 0.0 {
            return LinearSymbol::local(domain);
        }
        let lambda = domain
            .wavenumbers()
            .into_iter()
            .map(|q| q * q - q.powi(4) - alpha * q.abs().powi(3))
            .collect();
        LinearSymbol {
            domain,
            alpha,
            lambda,
        }
    }

    /// Symbol of the classical equation, `q_k^2 - q_k^4`.
    pub fn local(domain: DomainConfig) -> Self {
        let lambda = domain
            .wavenumbers()
            .into_iter()
            .map(|q| q * q - q.powi(4))
            .collect();
        LinearSymbol {
            domain,
            alpha: 0.0,
            lambda,
        }
    }

    pub fn domain(&self) -> &DomainConfig {
        &self.domain
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Values in FFT order.
    pub fn values(&self) -> &[f64] {
        &self.lambda
    }

    /// Value at signed wavenumber index `k`.
    pub fn at(&self, k: i64) -> f64 {
        self.domain
            .k_to_index(k)
            .map(|j| self.lambda[j])
            .unwrap_or(f64::NEG_INFINITY)
    }

    pub fn apply(&self, u: &SpectralField) -> Result<SpectralField> {
        if u.domain() != &self.domain {
            return Err(Error::config("linear symbol built for a different domain"));
        }
        let mut out = u.clone();
        for (c, &l) in out.coeffs_mut().iter_mut().zip(&self.lambda) {
            *c *= l;
        }
        Ok(out)
    }
}

/// Evaluates `-u u_x = -(u^2)_x / 2` pseudo-spectrally.
#[derive(Clone)]
pub struct Nonlinearity {
    domain: DomainConfig,
    fft: FftPair,
    dealias: bool,
}

impl Nonlinearity {
    pub fn new(domain: DomainConfig, dealias: bool) -> Self {
        Nonlinearity {
            domain,
            fft: FftPair::new(domain.grid_size),
            dealias,
        }
    }

    fn truncate(&self, buf: &mut [Complex64]) {
        let cutoff = self.domain.dealias_cutoff();
        for (j, c) in buf.iter_mut().enumerate() {
            if self.domain.index_to_k(j).abs() > cutoff {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    pub fn eval(&self, u: &SpectralField) -> SpectralField {
        let d = self.domain;
        let n = d.grid_size;
        let mut buf = u.coeffs().to_vec();
        if self.dealias {
            self.truncate(&mut buf);
        }
        self.fft.synthesize(&mut buf);
        for c in buf.iter_mut() {
            *c = Complex64::new(c.re * c.re, 0.0);
        }
        self.fft.analyze(&mut buf);
        if self.dealias {
            self.truncate(&mut buf);
        }
        buf[0] = Complex64::new(0.0, 0.0);
        buf[n / 2] = Complex64::new(0.0, 0.0);
        for j in 1..n / 2 {
            // -1/2 * (i q_k) * (u^2)_k, Hermitian-symmetrized
            let sq = 0.5 * (buf[j] + buf[n - j].conj());
            let q = d.wavenumber(j as i64);
            let c = Complex64::new(0.5 * q * sq.im, -0.5 * q * sq.re);
            buf[j] = c;
            buf[n - j] = c.conj();
        }
        SpectralField::from_raw(d, buf)
    }
}

/// Spectral coefficients of `-u u_x`, with optional 2/3-rule dealiasing.
pub fn nonlinear_term(u: &SpectralField, dealias: bool) -> SpectralField {
    Nonlinearity::new(*u.domain(), dealias).eval(u)
}

/// `lambda_k c_k + N(u)_k`.
pub fn rhs(u: &SpectralField, symbol: &LinearSymbol, dealias: bool) -> Result<SpectralField> {
    let lin = symbol.apply(u)?;
    lin.checked_add(&nonlinear_term(u, dealias))
}

/// Right-hand side of the classical equation, assembled from spectral
/// derivatives without any symbol or Hilbert code.
pub fn rhs_local(u: &SpectralField, dealias: bool) -> SpectralField {
    let d = *u.domain();
    let mut out = SpectralField::zeros(d);
    let nl = nonlinear_term(u, dealias);
    for (j, c) in out.coeffs_mut().iter_mut().enumerate() {
        let q = d.wavenumber(d.index_to_k(j));
        let lam = q * q - q.powi(4);
        *c = lam * u.coeffs()[j] + nl.coeffs()[j];
    }
    out
}

/// Precomputed ETDRK4 weights for one `(domain, alpha, dt)`.
#[derive(Clone)]
pub struct Stepper {
    symbol: LinearSymbol,
    dt: f64,
    nonlinear: bool,
    exp_full: Vec<f64>,
    exp_half: Vec<f64>,
    q_half: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    f3: Vec<f64>,
    nonlinearity: Nonlinearity,
}

/// Contour means of the ETDRK4 phi combinations at `z = lambda dt`.
/// Returns `(Q, f1, f2, f3)` already scaled by `dt`.
pub fn etdrk4_weights(lambda: f64, dt: f64) -> (f64, f64, f64, f64) {
    let lr = lambda * dt;
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for j in 0..CONTOUR_POINTS {
        let theta = 2.0 * PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64;
        let z = Complex64::new(lr, 0.0) + Complex64::from_polar(CONTOUR_RADIUS, theta);
        let ez = z.exp();
        let z3 = z * z * z;
        acc[0] += ((z / 2.0).exp() - 1.0) / z;
        acc[1] += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
        acc[2] += (2.0 + z + ez * (z - 2.0)) / z3;
        acc[3] += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    let m = CONTOUR_POINTS as f64;
    (
        dt * acc[0].re / m,
        dt * acc[1].re / m,
        dt * acc[2].re / m,
        dt * acc[3].re / m,
    )
}

impl Stepper {
    pub fn new(domain: DomainConfig, params: &SolverParams) -> Result<Self> {
        domain.validate()?;
        Stepper::with_symbol(LinearSymbol::new(domain, params.alpha), params)
    }

    /// Stepper for the classical equation; `params.alpha` is ignored.
    pub fn local(domain: DomainConfig, params: &SolverParams) -> Result<Self> {
        domain.validate()?;
        Stepper::with_symbol(LinearSymbol::local(domain), params)
    }

    pub fn with_symbol(symbol: LinearSymbol, params: &SolverParams) -> Result<Self> {
        params.validate()?;
        let domain = *symbol.domain();
        let dt = params.dt;
        let n = domain.grid_size;
        let mut s = Stepper {
            symbol,
            dt,
            nonlinear: params.nonlinear,
            exp_full: Vec::with_capacity(n),
            exp_half: Vec::with_capacity(n),
            q_half: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
            nonlinearity: Nonlinearity::new(domain, params.dealias),
        };
        for &lam in s.symbol.values() {
            let (q, f1, f2, f3) = etdrk4_weights(lam, dt);
            s.exp_full.push((lam * dt).exp());
            s.exp_half.push((lam * dt / 2.0).exp());
            s.q_half.push(q);
            s.f1.push(f1);
            s.f2.push(f2);
            s.f3.push(f3);
        }
        let all_finite = [&s.exp_full, &s.exp_half, &s.q_half, &s.f1, &s.f2, &s.f3]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()));
        if !all_finite {
            return Err(Error::config(format!(
                "non-finite integrator weights for dt = {dt}"
            )));
        }
        Ok(s)
    }

    pub fn symbol(&self) -> &LinearSymbol {
        &self.symbol
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn domain(&self) -> &DomainConfig {
        self.symbol.domain()
    }

    /// One ETDRK4 step from time `t`. Fails if the result is non-finite or
    /// its L2 norm exceeds [`BLOWUP_L2`].
    pub fn step(&self, u: &SpectralField, t: f64) -> Result<SpectralField> {
        if u.domain() != self.domain() {
            return Err(Error::config("stepper built for a different domain"));
        }
        let next = if self.nonlinear {
            self.step_etdrk4(u)
        } else {
            let mut v = u.clone();
            for (c, e) in v.coeffs_mut().iter_mut().zip(&self.exp_full) {
                *c *= *e;
            }
            v
        };
        let t_next = t + self.dt;
        if !next.is_finite() {
            return Err(Error::BlowUp {
                t: t_next,
                reason: "non-finite Fourier coefficient".into(),
            });
        }
        let l2 = next.l2_norm();
        if l2 > BLOWUP_L2 {
            return Err(Error::BlowUp {
                t: t_next,
                reason: format!("L2 norm {l2:e} exceeds {BLOWUP_L2:e}"),
            });
        }
        if next.coeffs()[0] != Complex64::new(0.0, 0.0) {
            return Err(Error::invariant(format!("mean coefficient drifted at t = {t_next}")));
        }
        Ok(next)
    }

    fn step_etdrk4(&self, u: &SpectralField) -> SpectralField {
        let d = *self.domain();
        let n = d.grid_size;
        let nl = &self.nonlinearity;
        let uc = u.coeffs();

        let nu = nl.eval(u);
        let a: Vec<Complex64> = (0..n)
            .map(|j| self.exp_half[j] * uc[j] + self.q_half[j] * nu.coeffs()[j])
            .collect();
        let a = SpectralField::from_raw(d, a);
        let na = nl.eval(&a);
        let b: Vec<Complex64> = (0..n)
            .map(|j| self.exp_half[j] * uc[j] + self.q_half[j] * na.coeffs()[j])
            .collect();
        let b = SpectralField::from_raw(d, b);
        let nb = nl.eval(&b);
        let c: Vec<Complex64> = (0..n)
            .map(|j| {
                self.exp_half[j] * a.coeffs()[j]
                    + self.q_half[j] * (2.0 * nb.coeffs()[j] - nu.coeffs()[j])
            })
            .collect();
        let c = SpectralField::from_raw(d, c);
        let nc = nl.eval(&c);
        let next: Vec<Complex64> = (0..n)
            .map(|j| {
                self.exp_full[j] * uc[j]
                    + self.f1[j] * nu.coeffs()[j]
                    + 2.0 * self.f2[j] * (na.coeffs()[j] + nb.coeffs()[j])
                    + self.f3[j] * nc.coeffs()[j]
            })
            .collect();
        SpectralField::from_raw(d, next)
    }
}

/// A trajectory being advanced on a fixed time grid.
pub struct Simulation {
    stepper: Stepper,
    state: SpectralField,
    step: usize,
    n_steps: usize,
    snapshot_every: usize,
}

impl Simulation {
    pub fn new(u0: SpectralField, params: &SolverParams) -> Result<Self> {
        let stepper = Stepper::new(*u0.domain(), params)?;
        Simulation::with_stepper(u0, stepper, params)
    }

    /// Uses a prebuilt stepper; `params` supplies the horizon and recording
    /// interval and must carry the stepper's `dt`.
    pub fn with_stepper(u0: SpectralField, stepper: Stepper, params: &SolverParams) -> Result<Self> {
        params.validate()?;
        if stepper.dt() != params.dt {
            return Err(Error::config("stepper dt differs from params.dt"));
        }
        if u0.domain() != stepper.domain() {
            return Err(Error::config("stepper built for a different domain"));
        }
        if u0.coeffs()[0] != Complex64::new(0.0, 0.0) {
            return Err(Error::invariant("initial data must have zero mean"));
        }
        Ok(Simulation {
            stepper,
            state: u0,
            step: 0,
            n_steps: params.n_steps(),
            snapshot_every: params.snapshot_every,
        })
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.stepper.dt()
    }

    pub fn state(&self) -> &SpectralField {
        &self.state
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn is_done(&self) -> bool {
        self.step >= self.n_steps
    }

    /// Whether the current step is an observation point.
    pub fn at_snapshot(&self) -> bool {
        self.step.is_multiple_of(self.snapshot_every) || self.step == self.n_steps
    }

    pub fn advance(&mut self) -> Result<()> {
        self.state = self.stepper.step(&self.state, self.time())?;
        self.step += 1;
        Ok(())
    }
}

/// Fails if a recorded grid mean exceeds [`MEAN_TOL`].
pub(crate) fn check_mean(mean: f64, t: f64) -> Result<()> {
    if mean.abs() > MEAN_TOL {
        return Err(Error::invariant(format!(
            "mean {mean:e} at t = {t} exceeds {MEAN_TOL:e}"
        )));
    }
    Ok(())
}

/// Integrates from `u0` over `[0, t_end]`, calling `observer(t, u)` at every
/// observation point (step 0, every `snapshot_every` steps and the final
/// step) and recording the norms there.
pub fn integrate<F>(u0: &SpectralField, params: &SolverParams, mut observer: F) -> Result<NormSeries>
where
    F: FnMut(f64, &SpectralField),
{
    let mut sim = Simulation::new(u0.clone(), params)?;
    let mut series = NormSeries::default();
    loop {
        if sim.at_snapshot() {
            let t = sim.time();
            check_mean(series.record(t, sim.state()), t)?;
            observer(t, sim.state());
        }
        if sim.is_done() {
            break;
        }
        sim.advance()?;
    }
    Ok(series)
}
