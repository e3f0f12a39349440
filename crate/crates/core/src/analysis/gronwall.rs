//! Energy-estimate bound for `w = u - v`, the difference between the
//! nonlocal and local solutions started from the same data:
//!
//! ```text
//! ||w(t)||^2 <= (b2 / b1) (exp(b1 t) - 1) alpha^2,
//! b1 = 2 + 4 sqrt(rho1 rho2),   b2 = 2 rho1^2.
//! ```

use serde::{Deserialize, Serialize};

use super::{NormEstimates, NormSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GronwallConstants {
    pub b1: f64,
    pub b2: f64,
}

impl From<&NormEstimates> for GronwallConstants {
    fn from(est: &NormEstimates) -> Self {
        GronwallConstants {
            b1: 2.0 + 4.0 * est.rho1.sqrt() * est.rho2.sqrt(),
            b2: 2.0 * est.rho1 * est.rho1,
        }
    }
}

/// `alpha * sqrt((b2/b1)(exp(b1 t) - 1))`; `+inf` once `exp(b1 t)` overflows.
pub fn gronwall_bound(est: &NormEstimates, alpha: f64, t: f64) -> f64 {
    if alpha == 0.0 || t == 0.0 {
        return 0.0;
    }
    let c = GronwallConstants::from(est);
    let growth = (c.b1 * t).exp_m1();
    if !growth.is_finite() {
        return f64::INFINITY;
    }
    let bound = alpha * (c.b2 / c.b1 * growth).sqrt();
    if bound.is_finite() {
        bound
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub t: f64,
    pub observed: f64,
    pub bound: f64,
}

/// Outcome of comparing a measured `||w(t)||` against the bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundVerdict {
    pub alpha: f64,
    pub t_max_check: f64,
    pub constants: GronwallConstants,
    /// Observation times compared.
    pub checked: usize,
    pub satisfied: bool,
    /// The bound was infinite at some checked time.
    pub vacuous: bool,
    /// First checked time with an infinite bound.
    pub vacuous_from: Option<f64>,
    /// `min_t (bound - observed)` over checked times with a finite bound.
    pub worst_margin: Option<f64>,
    pub worst_margin_t: Option<f64>,
    pub violations: Vec<BoundViolation>,
}

/// Checks `||w(t)|| <= gronwall_bound(est, alpha, t)` at every recorded
/// `t <= t_max_check`, using the L2 column of `diff`.
pub fn verify_bound(
    diff: &NormSeries,
    est: &NormEstimates,
    alpha: f64,
    t_max_check: f64,
) -> BoundVerdict {
    let mut verdict = BoundVerdict {
        alpha,
        t_max_check,
        constants: GronwallConstants::from(est),
        checked: 0,
        satisfied: true,
        vacuous: false,
        vacuous_from: None,
        worst_margin: None,
        worst_margin_t: None,
        violations: Vec::new(),
    };
    for (&t, &observed) in diff.times.iter().zip(&diff.l2) {
        if t > t_max_check + 1e-12 {
            break;
        }
        verdict.checked += 1;
        let bound = gronwall_bound(est, alpha, t);
        if bound.is_infinite() {
            if !verdict.vacuous {
                verdict.vacuous = true;
                verdict.vacuous_from = Some(t);
            }
            continue;
        }
        let margin = bound - observed;
        if verdict.worst_margin.is_none_or(|m| margin < m) {
            verdict.worst_margin = Some(margin);
            verdict.worst_margin_t = Some(t);
        }
        if observed > bound {
            verdict.satisfied = false;
            verdict.violations.push(BoundViolation { t, observed, bound });
        }
    }
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> NormEstimates {
        NormEstimates {
            rho0: 1.0,
            rho1: 1.0,
            rho2: 1.0,
        }
    }

    #[test]
    fn constants_from_estimates() {
        let c = GronwallConstants::from(&unit());
        assert_eq!(c.b1, 6.0);
        assert_eq!(c.b2, 2.0);
        let c = GronwallConstants::from(&NormEstimates::default());
        assert_eq!((c.b1, c.b2), (2.0, 0.0));
    }

    #[test]
    fn bound_values() {
        let est = unit();
        assert_eq!(gronwall_bound(&est, 0.3, 0.0), 0.0);
        assert_eq!(gronwall_bound(&est, 0.0, 5.0), 0.0);
        for &(alpha, t) in &[(0.1f64, 0.5f64), (1e-3, 2.0), (1.0, 0.01)] {
            let want = alpha * ((1.0 / 3.0) * ((6.0 * t).exp() - 1.0)).sqrt();
            let got = gronwall_bound(&est, alpha, t);
            assert!((got - want).abs() <= 1e-14 * want, "{got} vs {want}");
        }
        assert!(gronwall_bound(&est, 0.1, 1e3).is_infinite());
    }

    fn diff_series(values: &[(f64, f64)]) -> NormSeries {
        let mut s = NormSeries::default();
        for &(t, w) in values {
            s.push_row(t, w, 0.0, 0.0, 0.0, 0.0);
        }
        s
    }

    #[test]
    fn zero_alpha_is_trivially_satisfied() {
        let s = diff_series(&[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0)]);
        let v = verify_bound(&s, &unit(), 0.0, 1.0);
        assert!(v.satisfied && !v.vacuous);
        assert_eq!(v.checked, 3);
        assert_eq!(v.worst_margin, Some(0.0));
    }

    #[test]
    fn violations_are_reported() {
        let s = diff_series(&[(0.0, 0.0), (0.1, 1.0), (2.0, 100.0)]);
        let v = verify_bound(&s, &unit(), 0.01, 1.0);
        assert!(!v.satisfied);
        assert_eq!(v.checked, 2);
        assert_eq!(v.violations.len(), 1);
        assert_eq!(v.violations[0].t, 0.1);
        assert!(v.worst_margin.unwrap() < 0.0);
    }

    #[test]
    fn overflow_region_is_vacuous() {
        let s = diff_series(&[(0.0, 0.0), (500.0, 1e300)]);
        let v = verify_bound(&s, &unit(), 0.1, 1e3);
        assert!(v.satisfied && v.vacuous);
        assert_eq!(v.vacuous_from, Some(500.0));
    }
}
