//! Truncated Poisson weights for uniformisation.
//!
//! Weights are evaluated at the mode in log space and extended outwards with
//! the ratio recurrence `p(k+1) = p(k)·λ/(k+1)`, `p(k-1) = p(k)·k/λ`, so
//! nothing under- or overflows for any rate that fits the term cap. Each tail
//! is cut once a geometric bound on its remaining mass drops below `δ/2`.
//! The retained weights are then renormalized to sum to one; with at most `δ`
//! of mass dropped this keeps the weighted-sum error within `δ`.

use statrs::function::gamma::ln_gamma;

use super::AnalysisError;

/// Default cap on the number of retained Poisson terms.
pub const DEFAULT_MAX_TERMS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWeights {
    pub left: usize,
    pub right: usize,
    /// `weights[n]` is the probability of `left + n` events.
    pub weights: Vec<f64>,
    /// Sum of `weights` (one up to rounding).
    pub total: f64,
    /// Poisson mass covered by `[left, right]` before renormalization.
    pub retained_mass: f64,
}

impl PoissonWeights {
    pub fn weight(&self, k: usize) -> f64 {
        if k < self.left || k > self.right {
            0.0
        } else {
            self.weights[k - self.left]
        }
    }
}

pub fn poisson_weights(lambda: f64, delta: f64) -> Result<PoissonWeights, AnalysisError> {
    poisson_weights_capped(lambda, delta, DEFAULT_MAX_TERMS)
}

pub fn poisson_weights_capped(
    lambda: f64,
    delta: f64,
    max_terms: usize,
) -> Result<PoissonWeights, AnalysisError> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(AnalysisError::InvalidPoissonRate(lambda));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(AnalysisError::DeltaOutOfRange(delta));
    }
    if lambda == 0.0 {
        return Ok(PoissonWeights {
            left: 0,
            right: 0,
            weights: vec![1.0],
            total: 1.0,
            retained_mass: 1.0,
        });
    }

    let too_wide = |terms: usize| AnalysisError::TruncationTooWide {
        lambda,
        terms,
        cap: max_terms,
    };
    let half = delta / 2.0;
    let mode = lambda.floor() as usize;
    let p_mode = (-lambda + mode as f64 * lambda.ln() - ln_gamma(mode as f64 + 1.0)).exp();

    let mut upper = vec![p_mode];
    let mut k = mode;
    let mut p = p_mode;
    loop {
        let next = p * lambda / (k + 1) as f64;
        let ratio = lambda / (k + 2) as f64;
        if ratio < 1.0 && next / (1.0 - ratio) <= half {
            break;
        }
        upper.push(next);
        p = next;
        k += 1;
        if upper.len() > max_terms {
            return Err(too_wide(upper.len()));
        }
    }
    let right = k;

    let mut lower = Vec::new();
    let mut k = mode;
    let mut p = p_mode;
    while k > 0 {
        let prev = p * k as f64 / lambda;
        let ratio = (k - 1) as f64 / lambda;
        if ratio < 1.0 && prev / (1.0 - ratio) <= half {
            break;
        }
        lower.push(prev);
        p = prev;
        k -= 1;
        if lower.len() + upper.len() > max_terms {
            return Err(too_wide(lower.len() + upper.len()));
        }
    }
    let left = k;

    lower.reverse();
    lower.extend(upper);
    let mut weights = lower;
    let retained_mass: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= retained_mass);
    let total = weights.iter().sum::<f64>().min(1.0);
    Ok(PoissonWeights {
        left,
        right,
        weights,
        total,
        retained_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_is_degenerate() {
        let w = poisson_weights(0.0, 1e-9).unwrap();
        assert_eq!((w.left, w.right), (0, 0));
        assert_eq!(w.weights, vec![1.0]);
    }

    #[test]
    fn retained_mass_meets_budget() {
        for &lambda in &[1e-6, 0.3, 1.0, 5.0, 37.5, 1e3, 2.5e5] {
            for &delta in &[1e-3, 1e-9, 1e-12] {
                let w = poisson_weights(lambda, delta).unwrap();
                assert!(w.total >= 1.0 - delta && w.total <= 1.0, "{lambda} {delta} {}", w.total);
                // log-space evaluation of the mode term is good to ~1e-16·λ relative
                let slack = 1e-15 * lambda.max(1.0);
                assert!(w.retained_mass >= 1.0 - delta - slack, "{lambda} {delta} {}", w.retained_mass);
                assert_eq!(w.weights.len(), w.right - w.left + 1);
            }
        }
    }

    #[test]
    fn ratio_identity_at_mode() {
        let w = poisson_weights(5.0, 1e-9).unwrap();
        assert_eq!(w.weight(4) / w.weight(5), 1.0);
        for k in w.left + 1..=w.right {
            let r = w.weight(k) / w.weight(k - 1);
            assert!((r - 5.0 / k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_direct_pmf() {
        let lambda: f64 = 7.25;
        let w = poisson_weights(lambda, 1e-12).unwrap();
        let mut pmf = (-lambda).exp();
        for k in 0..=w.right {
            if k > 0 {
                pmf *= lambda / k as f64;
            }
            if k >= w.left {
                assert!((w.weight(k) * w.retained_mass - pmf).abs() <= 1e-15 + 1e-12 * pmf);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = poisson_weights_capped(1e6, 1e-9, 1000).unwrap_err();
        assert!(matches!(err, AnalysisError::TruncationTooWide { cap: 1000, .. }));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(poisson_weights(-1.0, 1e-9).is_err());
        assert!(poisson_weights(f64::NAN, 1e-9).is_err());
        assert!(poisson_weights(1.0, 0.0).is_err());
    }
}
