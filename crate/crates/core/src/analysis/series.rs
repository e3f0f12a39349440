use serde::{Deserialize, Serialize};

use crate::{Error, Result, SpectralField};

/// Norms of a trajectory at its observation times.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    pub linf: Vec<f64>,
    pub mean: Vec<f64>,
}

impl NormSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push_row(&mut self, t: f64, l2: f64, h1: f64, h2: f64, linf: f64, mean: f64) {
        self.times.push(t);
        self.l2.push(l2);
        self.h1.push(h1);
        self.h2.push(h2);
        self.linf.push(linf);
        self.mean.push(mean);
    }

    /// Appends the norms of `u` at time `t` and returns its grid mean.
    pub fn record(&mut self, t: f64, u: &SpectralField) -> f64 {
        let samples = u.synthesize();
        let linf = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        self.push_row(t, u.l2_norm(), u.h1_norm(), u.h2_norm(), linf, mean);
        mean
    }

    pub fn row(&self, i: usize) -> [f64; 6] {
        [
            self.times[i],
            self.l2[i],
            self.h1[i],
            self.h2[i],
            self.linf[i],
            self.mean[i],
        ]
    }

    pub fn sup_l2(&self) -> f64 {
        self.l2.iter().copied().fold(0.0, f64::max)
    }

    /// Checks equal lengths, strictly increasing times and nonnegative norms.
    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        if [&self.l2, &self.h1, &self.h2, &self.linf, &self.mean]
            .iter()
            .any(|c| c.len() != n)
        {
            return Err(Error::invariant("norm series columns differ in length"));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invariant("norm series times are not strictly increasing"));
        }
        let negative = [&self.l2, &self.h1, &self.h2, &self.linf]
            .iter()
            .any(|c| c.iter().any(|&v| v.is_nan() || v < 0.0));
        if negative {
            return Err(Error::invariant("norm series contains a negative or NaN norm"));
        }
        Ok(())
    }

    /// Suprema of the L2, H1 and H2 norms over `window` (inclusive).
    pub fn estimates(&self, window: (f64, f64)) -> Result<NormEstimates> {
        let (t0, t1) = window;
        let mut est = NormEstimates::default();
        let mut seen = false;
        for i in 0..self.len() {
            let t = self.times[i];
            if t < t0 - 1e-12 || t > t1 + 1e-12 {
                continue;
            }
            seen = true;
            est.rho0 = est.rho0.max(self.l2[i]);
            est.rho1 = est.rho1.max(self.h1[i]);
            est.rho2 = est.rho2.max(self.h2[i]);
        }
        if !seen {
            return Err(Error::config(format!(
                "no observations in window [{t0}, {t1}]"
            )));
        }
        Ok(est)
    }

    /// Estimates over every recorded time.
    pub fn full_estimates(&self) -> Result<NormEstimates> {
        self.estimates((f64::NEG_INFINITY, f64::INFINITY))
    }
}

/// Measured suprema of `||u||`, `||u_x||`, `||u_xx||`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NormEstimates {
    pub rho0: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl NormEstimates {
    /// Componentwise maximum.
    pub fn max(self, other: NormEstimates) -> NormEstimates {
        NormEstimates {
            rho0: self.rho0.max(other.rho0),
            rho1: self.rho1.max(other.rho1),
            rho2: self.rho2.max(other.rho2),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.rho0.is_finite() && self.rho1.is_finite() && self.rho2.is_finite()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.rho0, self.rho1, self.rho2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series() -> NormSeries {
        let mut s = NormSeries::default();
        s.push_row(0.0, 3.0, 1.0, 0.5, 1.0, 0.0);
        s.push_row(1.0, 2.0, 4.0, 0.1, 1.0, 0.0);
        s.push_row(2.0, 1.0, 0.5, 6.0, 1.0, 0.0);
        s
    }

    #[test]
    fn window_suprema() {
        let s = series();
        let all = s.full_estimates().unwrap();
        assert_eq!(all.as_array(), [3.0, 4.0, 6.0]);
        let late = s.estimates((1.0, 2.0)).unwrap();
        assert_eq!(late.as_array(), [2.0, 4.0, 6.0]);
        assert!(s.estimates((5.0, 6.0)).is_err());
        assert_eq!(all.max(late), all);
    }

    #[test]
    fn validation() {
        let mut s = series();
        assert!(s.validate().is_ok());
        s.times[2] = 1.0;
        assert!(s.validate().is_err());
        let mut s = series();
        s.h1.pop();
        assert!(s.validate().is_err());
        let mut s = series();
        s.l2[0] = -1.0;
        assert!(s.validate().is_err());
    }
}
