//! Randomized checks of the Hilbert-transform identities and of the
//! Poincare and Agmon inequalities on the zero-mean space.
//!
//! Identity residuals are normalized by the natural scale of each side
//! (`||u||`, `||u|| ||v||`, ...), so the tolerance is independent of the
//! amplitude of the random fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::spectral::random_field;
use crate::{DomainConfig, Error, Result, SpectralField};

/// Largest accepted normalized identity residual.
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    /// `worst` is the largest normalized residual; must be `<= IDENTITY_TOL`.
    Identity,
    /// `worst` is the largest ratio lhs/rhs; must be `< 1`.
    Inequality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub kind: PropertyKind,
    pub worst: f64,
    pub failures: usize,
}

impl PropertyCheck {
    fn new(name: &str, kind: PropertyKind) -> Self {
        PropertyCheck {
            name: name.to_string(),
            kind,
            worst: 0.0,
            failures: 0,
        }
    }

    fn observe(&mut self, value: f64) {
        self.worst = self.worst.max(value);
        let fails = match self.kind {
            PropertyKind::Identity => value.is_nan() || value > IDENTITY_TOL,
            PropertyKind::Inequality => value.is_nan() || value >= 1.0,
        };
        if fails {
            self.failures += 1;
        }
    }

    /// Distance from failing: tolerance minus residual, or `1 - ratio`.
    pub fn slack(&self) -> f64 {
        match self.kind {
            PropertyKind::Identity => IDENTITY_TOL - self.worst,
            PropertyKind::Inequality => 1.0 - self.worst,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub domain: DomainConfig,
    pub seed: u64,
    pub count: usize,
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(PropertyCheck::passed)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `||g|| / (2l ||g_x||)`, below one for every nonzero zero-mean field.
pub fn poincare_ratio(g: &SpectralField) -> f64 {
    g.l2_norm() / (g.domain().period() * g.h1_norm())
}

/// `||g||_inf^2 / (2 ||g|| ||g_x||)`, below one for every nonzero zero-mean field.
pub fn agmon_ratio(g: &SpectralField) -> f64 {
    let linf = g.linf_norm();
    linf * linf / (2.0 * g.l2_norm() * g.h1_norm())
}

fn norm_of_difference(a: &SpectralField, b: &SpectralField) -> f64 {
    a.checked_sub(b).map(|d| d.l2_norm()).unwrap_or(f64::INFINITY)
}

fn draw_field(domain: DomainConfig, rng: &mut ChaCha8Rng) -> Result<SpectralField> {
    let seed = rng.random::<u64>();
    let amplitude = 10f64.powf(rng.random_range(-1.0..1.0));
    let decay = rng.random_range(0.5..3.0);
    random_field(domain, seed, amplitude, decay)
}

/// Evaluates every identity and both inequalities on `count` seeded random
/// fields (each paired with the next draw for the bilinear identities).
pub fn check_inequalities(domain: DomainConfig, seed: u64, count: usize) -> Result<PropertyReport> {
    if count == 0 {
        return Err(Error::config("property count must be at least 1"));
    }
    domain.validate()?;
    use PropertyKind::*;
    let mut checks = vec![
        PropertyCheck::new("hilbert_anti_involution", Identity),
        PropertyCheck::new("hilbert_isometry", Identity),
        PropertyCheck::new("hilbert_orthogonality", Identity),
        PropertyCheck::new("hilbert_antisymmetry", Identity),
        PropertyCheck::new("hilbert_preserves_inner_product", Identity),
        PropertyCheck::new("hilbert_commutes_with_derivative", Identity),
        PropertyCheck::new("poincare", Inequality),
        PropertyCheck::new("agmon", Inequality),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = draw_field(domain, &mut rng)?;
    for _ in 0..count {
        let u = v;
        v = draw_field(domain, &mut rng)?;
        let hu = u.hilbert();
        let hv = v.hilbert();
        let nu = u.l2_norm();
        let nv = v.l2_norm();
        let uv = u.inner_product(&v)?;

        let values = [
            norm_of_difference(&hu.hilbert(), &u.scaled(-1.0)) / nu,
            (hu.l2_norm() - nu).abs() / nu,
            u.inner_product(&hu)?.abs() / (nu * nu),
            (v.inner_product(&hu)? + u.inner_product(&hv)?).abs() / (nu * nv),
            (hu.inner_product(&hv)? - uv).abs() / (nu * nv),
            norm_of_difference(&hu.derivative(1), &u.derivative(1).hilbert()) / u.h1_norm(),
            poincare_ratio(&u),
            agmon_ratio(&u),
        ];
        for (check, value) in checks.iter_mut().zip(values) {
            check.observe(value);
        }
    }
    Ok(PropertyReport {
        domain,
        seed,
        count,
        checks,
    })
}
