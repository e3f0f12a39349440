//! Zero-mean periodic fields on `I = (-l, l)` and their Fourier representation.
//!
//! A field is stored by its complex exponential coefficients `c_k`,
//!
//! ```text
//! u(x) = sum_k c_k exp(i k pi x / l),   k = -N/2 .. N/2 - 1,
//! ```
//!
//! in FFT order (`k = j` for `j < N/2`, `k = j - N` otherwise). Every field
//! satisfies `c_0 = 0`, `c_{-k} = conj(c_k)` and `c_{-N/2} = 0`; the
//! operations here preserve those three properties exactly.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative tolerance used when validating Hermitian symmetry of user input.
const HERMITIAN_TOL: f64 = 1e-12;

/// Half-period `l` and collocation size `N` of the periodic domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    pub half_length: f64,
    pub grid_size: usize,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig::chaotic_default()
    }
}

impl DomainConfig {
    pub fn new(half_length: f64, grid_size: usize) -> Result<Self> {
        let domain = DomainConfig {
            half_length,
            grid_size,
        };
        domain.validate()?;
        Ok(domain)
    }

    /// `l = 16 pi`, `N = 512`: about sixteen linearly unstable modes.
    pub fn chaotic_default() -> Self {
        DomainConfig {
            half_length: 16.0 * PI,
            grid_size: 512,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_length.is_finite() && self.half_length > 0.0) {
            return Err(Error::config(format!(
                "half_length must be positive and finite, got {}",
                self.half_length
            )));
        }
        if self.grid_size < 8 || !self.grid_size.is_multiple_of(2) {
            return Err(Error::config(format!(
                "grid_size must be even and at least 8, got {}",
                self.grid_size
            )));
        }
        Ok(())
    }

    /// Length of the periodic cell, `2l`.
    pub fn period(&self) -> f64 {
        2.0 * self.half_length
    }

    /// Signed wavenumber index stored at FFT slot `j`.
    #[inline]
    pub fn index_to_k(&self, j: usize) -> i64 {
        let n = self.grid_size;
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    /// FFT slot of signed index `k`, if it is representable.
    pub fn k_to_index(&self, k: i64) -> Option<usize> {
        let half = (self.grid_size / 2) as i64;
        if k >= 0 && k < half {
            Some(k as usize)
        } else if k < 0 && k >= -half {
            Some((k + self.grid_size as i64) as usize)
        } else {
            None
        }
    }

    /// `q_k = k pi / l`.
    #[inline]
    pub fn wavenumber(&self, k: i64) -> f64 {
        k as f64 * PI / self.half_length
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.grid_size)
            .map(|j| self.wavenumber(self.index_to_k(j)))
            .collect()
    }

    /// FFT slot of the unpaired Nyquist mode `k = -N/2`.
    #[inline]
    pub fn nyquist_index(&self) -> usize {
        self.grid_size / 2
    }

    /// Largest `|k|` kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.grid_size / 3) as i64
    }

    /// Collocation points `x_j = -l + 2 l j / N`.
    pub fn grid(&self) -> Vec<f64> {
        let dx = self.period() / self.grid_size as f64;
        (0..self.grid_size)
            .map(|j| -self.half_length + dx * j as f64)
            .collect()
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Cached forward/inverse plans of one length.
#[derive(Clone)]
pub(crate) struct FftPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftPair {
    pub(crate) fn new(n: usize) -> Self {
        PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            FftPair {
                forward: p.plan_fft_forward(n),
                inverse: p.plan_fft_inverse(n),
            }
        })
    }

    /// Samples to coefficients in place: `c_k = (-1)^k / N * sum_j f_j e^{-2 pi i k j / N}`.
    /// The alternating sign accounts for the grid starting at `x = -l`.
    pub(crate) fn analyze(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
        let inv_n = 1.0 / buf.len() as f64;
        for (j, c) in buf.iter_mut().enumerate() {
            let s = if j % 2 == 0 { inv_n } else { -inv_n };
            *c *= s;
        }
    }

    /// Coefficients to samples in place.
    pub(crate) fn synthesize(&self, buf: &mut [Complex64]) {
        for c in buf.iter_mut().skip(1).step_by(2) {
            *c = -*c;
        }
        self.inverse.process(buf);
    }
}

/// Real samples of a periodic function on the collocation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    domain: DomainConfig,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(domain: DomainConfig, values: Vec<f64>) -> Result<Self> {
        domain.validate()?;
        if values.len() != domain.grid_size {
            return Err(Error::config(format!(
                "expected {} samples, got {}",
                domain.grid_size,
                values.len()
            )));
        }
        Ok(RealField { domain, values })
    }

    /// Samples `f` on the collocation grid.
    pub fn from_fn(domain: DomainConfig, f: impl Fn(f64) -> f64) -> Self {
        let values = domain.grid().into_iter().map(f).collect();
        RealField { domain, values }
    }

    pub fn domain(&self) -> &DomainConfig {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete Fourier analysis. The mean and the Nyquist mode are
    /// projected out, and the result is made exactly Hermitian.
    pub fn to_spectral(&self) -> SpectralField {
        to_spectral(self)
    }
}

/// See [`RealField::to_spectral`].
pub fn to_spectral(f: &RealField) -> SpectralField {
    let n = f.domain.grid_size;
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPair::new(n).analyze(&mut buf);
    let mut field = SpectralField {
        domain: f.domain,
        coeffs: buf,
    };
    field.symmetrize();
    field
}

/// Complex Fourier coefficients of a real, zero-mean periodic field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    domain: DomainConfig,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(domain: DomainConfig) -> Self {
        SpectralField {
            domain,
            coeffs: vec![Complex64::new(0.0, 0.0); domain.grid_size],
        }
    }

    /// Builds a field from coefficients in FFT order.
    ///
    /// Fails if the length is wrong, the mean coefficient is nonzero, or the
    /// coefficients are not Hermitian. The Nyquist coefficient is zeroed.
    pub fn from_coeffs(domain: DomainConfig, coeffs: Vec<Complex64>) -> Result<Self> {
        domain.validate()?;
        if coeffs.len() != domain.grid_size {
            return Err(Error::config(format!(
                "expected {} coefficients, got {}",
                domain.grid_size,
                coeffs.len()
            )));
        }
        if coeffs[0] != Complex64::new(0.0, 0.0) {
            return Err(Error::invariant(format!(
                "mean coefficient must be zero, got {}",
                coeffs[0]
            )));
        }
        let mut field = SpectralField { domain, coeffs };
        field.coeffs[domain.nyquist_index()] = Complex64::new(0.0, 0.0);
        field.check_hermitian()?;
        Ok(field)
    }

    /// Builds a field from amplitudes of positive wavenumbers; the negative
    /// partners are set to the conjugates.
    pub fn from_modes(domain: DomainConfig, modes: &[(i64, Complex64)]) -> Result<Self> {
        domain.validate()?;
        let mut field = SpectralField::zeros(domain);
        let half = (domain.grid_size / 2) as i64;
        for &(k, c) in modes {
            if k <= 0 || k >= half {
                return Err(Error::config(format!(
                    "mode index must lie in 1..{half}, got {k}"
                )));
            }
            let j = k as usize;
            field.coeffs[j] = c;
            field.coeffs[domain.grid_size - j] = c.conj();
        }
        Ok(field)
    }

    /// `sin(k pi x / l)`.
    pub fn sine(domain: DomainConfig, k: i64) -> Result<Self> {
        SpectralField::from_modes(domain, &[(k, Complex64::new(0.0, -0.5))])
    }

    /// `cos(k pi x / l)`.
    pub fn cosine(domain: DomainConfig, k: i64) -> Result<Self> {
        SpectralField::from_modes(domain, &[(k, Complex64::new(0.5, 0.0))])
    }

    pub fn domain(&self) -> &DomainConfig {
        &self.domain
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of signed wavenumber index `k` (zero if unrepresented).
    pub fn coeff(&self, k: i64) -> Complex64 {
        self.domain
            .k_to_index(k)
            .map(|j| self.coeffs[j])
            .unwrap_or_default()
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub(crate) fn from_raw(domain: DomainConfig, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), domain.grid_size);
        SpectralField { domain, coeffs }
    }

    fn symmetrize(&mut self) {
        let n = self.domain.grid_size;
        self.coeffs[0] = Complex64::new(0.0, 0.0);
        self.coeffs[n / 2] = Complex64::new(0.0, 0.0);
        for j in 1..n / 2 {
            let c = 0.5 * (self.coeffs[j] + self.coeffs[n - j].conj());
            self.coeffs[j] = c;
            self.coeffs[n - j] = c.conj();
        }
    }

    fn check_hermitian(&self) -> Result<()> {
        let n = self.domain.grid_size;
        let scale = self.max_coeff_abs().max(1.0);
        for j in 1..n / 2 {
            let err = (self.coeffs[j] - self.coeffs[n - j].conj()).norm();
            if err > HERMITIAN_TOL * scale {
                return Err(Error::invariant(format!(
                    "Hermitian symmetry broken at k = {j}: |c_k - conj(c_-k)| = {err:e}"
                )));
            }
        }
        Ok(())
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Samples on the grid without re-validating symmetry.
    pub(crate) fn synthesize(&self) -> Vec<f64> {
        let mut buf = self.coeffs.clone();
        FftPair::new(self.domain.grid_size).synthesize(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Discrete Fourier synthesis onto the collocation grid.
    pub fn to_real(&self) -> Result<RealField> {
        self.check_hermitian()?;
        Ok(RealField {
            domain: self.domain,
            values: self.synthesize(),
        })
    }

    /// Grid average of the synthesized samples.
    pub fn sample_mean(&self) -> f64 {
        let v = self.synthesize();
        v.iter().sum::<f64>() / v.len() as f64
    }

    /// Applies a per-wavenumber multiplier and zeroes the Nyquist slot.
    pub fn map_multiplier(&self, mult: impl Fn(i64, f64) -> Complex64) -> SpectralField {
        let d = self.domain;
        let mut coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let k = d.index_to_k(j);
                mult(k, d.wavenumber(k)) * c
            })
            .collect();
        coeffs[d.nyquist_index()] = Complex64::new(0.0, 0.0);
        SpectralField { domain: d, coeffs }
    }

    /// `d^order u / dx^order` via the multiplier `(i q_k)^order`.
    pub fn derivative(&self, order: u32) -> SpectralField {
        self.map_multiplier(|_, q| derivative_multiplier(q, order))
    }

    /// Periodic Hilbert transform, multiplier `i sgn(k)`.
    pub fn hilbert(&self) -> SpectralField {
        self.map_multiplier(|k, _| hilbert_multiplier(k))
    }

    /// `(int_I |D^order u|^2 dx)^{1/2}` by Parseval.
    pub fn sobolev_seminorm(&self, order: u32) -> f64 {
        let d = self.domain;
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let q = d.wavenumber(d.index_to_k(j));
                q.powi(2 * order as i32) * c.norm_sqr()
            })
            .sum();
        (d.period() * sum).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_seminorm(0)
    }

    /// `||u_x||`, a norm on the zero-mean space.
    pub fn h1_norm(&self) -> f64 {
        self.sobolev_seminorm(1)
    }

    /// `||u_xx||`.
    pub fn h2_norm(&self) -> f64 {
        self.sobolev_seminorm(2)
    }

    /// Maximum absolute value over the collocation points.
    pub fn linf_norm(&self) -> f64 {
        self.synthesize().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `int_I u v dx` by Parseval.
    pub fn inner_product(&self, other: &SpectralField) -> Result<f64> {
        self.check_same_domain(other)?;
        let sum: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        Ok(self.domain.period() * sum)
    }

    pub(crate) fn check_same_domain(&self, other: &SpectralField) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::config(format!(
                "domain mismatch: {:?} vs {:?}",
                self.domain, other.domain
            )));
        }
        Ok(())
    }

    /// `self - other`.
    pub fn checked_sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_same_domain(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(SpectralField {
            domain: self.domain,
            coeffs,
        })
    }

    /// `self + other`.
    pub fn checked_add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_same_domain(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(SpectralField {
            domain: self.domain,
            coeffs,
        })
    }

    pub fn scaled(&self, factor: f64) -> SpectralField {
        SpectralField {
            domain: self.domain,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Moves the field to another grid size on the same interval by
    /// zero-padding or truncating the spectrum.
    pub fn resample(&self, target: DomainConfig) -> Result<SpectralField> {
        target.validate()?;
        if target.half_length != self.domain.half_length {
            return Err(Error::config(format!(
                "cannot resample from l = {} to l = {}",
                self.domain.half_length, target.half_length
            )));
        }
        let mut out = SpectralField::zeros(target);
        let kmax = (self.domain.grid_size.min(target.grid_size) / 2) as i64;
        for k in 1..kmax {
            let c = self.coeff(k);
            let j = k as usize;
            out.coeffs[j] = c;
            out.coeffs[target.grid_size - j] = c.conj();
        }
        Ok(out)
    }
}

/// `(i q)^order`, with the power of `i` taken exactly.
pub fn derivative_multiplier(q: f64, order: u32) -> Complex64 {
    let m = q.powi(order as i32);
    match order % 4 {
        0 => Complex64::new(m, 0.0),
        1 => Complex64::new(0.0, m),
        2 => Complex64::new(-m, 0.0),
        _ => Complex64::new(0.0, -m),
    }
}

/// `i sgn(k)` with `sgn(0) = 0`.
pub fn hilbert_multiplier(k: i64) -> Complex64 {
    Complex64::new(0.0, k.signum() as f64)
}

/// Seeded random zero-mean field with `|c_k| = amplitude |k|^{-decay}` and
/// uniform random phases on `1 <= |k| <= N/6`.
pub fn random_field(
    domain: DomainConfig,
    seed: u64,
    amplitude: f64,
    decay: f64,
) -> Result<SpectralField> {
    domain.validate()?;
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::config(format!("amplitude must be positive, got {amplitude}")));
    }
    if !(decay > 0.0 && decay.is_finite()) {
        return Err(Error::config(format!("decay must be positive, got {decay}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = domain.grid_size;
    let mut field = SpectralField::zeros(domain);
    for k in 1..=n / 6 {
        let mag = amplitude * (k as f64).powf(-decay);
        let phase = 2.0 * PI * rng.random::<f64>();
        let c = Complex64::from_polar(mag, phase);
        field.coeffs[k] = c;
        field.coeffs[n - k] = c.conj();
    }
    Ok(field)
}
