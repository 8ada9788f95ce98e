use super::RepairError;

/// Binary search configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsmConfig {
    /// Stop once the search interval is at most this wide.
    pub epsilon: f64,
    /// Safety cap on the number of probes.
    pub max_iters: usize,
}

impl Default for BsmConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            max_iters: 64,
        }
    }
}

impl BsmConfig {
    pub fn new(epsilon: f64, max_iters: usize) -> Result<Self, RepairError> {
        let cfg = Self { epsilon, max_iters };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RepairError> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(RepairError::InvalidConfig(format!(
                "epsilon must be in (0, 0.5), got {}",
                self.epsilon
            )));
        }
        let needed = (1.0 / self.epsilon).log2().ceil() as usize;
        if needed > self.max_iters {
            return Err(RepairError::InvalidConfig(format!(
                "epsilon {} needs {needed} halvings but max_iters is {}",
                self.epsilon, self.max_iters
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BsmOutcome {
    /// Lower end of the final interval.
    pub value: f64,
    /// Whether any probe satisfied the predicate. When false, `value` is the
    /// initial lower bound and the search failed.
    pub found: bool,
    /// Every probe in order, with its verdict.
    pub probes: Vec<(f64, bool)>,
}

/// Halves `(lo, hi]` until it is at most `epsilon` wide: a satisfying
/// midpoint becomes the new lower end, otherwise the new upper end.
///
/// Panics unless `0 <= lo < hi <= 1`.
pub fn bsm<E>(
    mut satisfies: impl FnMut(f64) -> Result<bool, E>,
    lo: f64,
    hi: f64,
    cfg: &BsmConfig,
) -> Result<BsmOutcome, E> {
    assert!(
        (0.0..1.0).contains(&lo) && lo < hi && hi <= 1.0,
        "bsm interval ({lo}, {hi}] outside [0, 1]"
    );
    let (mut lower, mut upper) = (lo, hi);
    let mut probes = Vec::new();
    while upper - lower > cfg.epsilon && probes.len() < cfg.max_iters {
        let middle = (lower + upper) / 2.0;
        let ok = satisfies(middle)?;
        probes.push((middle, ok));
        if ok {
            lower = middle;
        } else {
            upper = middle;
        }
    }
    Ok(BsmOutcome {
        value: lower,
        found: probes.iter().any(|&(_, ok)| ok),
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn run(pred: impl Fn(f64) -> bool) -> BsmOutcome {
        bsm(|x| Ok::<_, Infallible>(pred(x)), 0.0, 1.0, &BsmConfig::default()).unwrap()
    }

    #[test]
    fn finds_analytic_threshold() {
        let threshold = -(0.8f64).ln() / 5.0;
        assert!((threshold - 0.044_628_7).abs() < 1e-7);
        let out = run(|x| x <= threshold);
        assert!((out.value - threshold).abs() <= 1e-4);
        assert!(out.value <= threshold);
        assert!(out.found);
        assert_eq!(out.probes.len(), 14);
    }

    #[test]
    fn never_satisfied_returns_sentinel() {
        let out = run(|_| false);
        assert_eq!(out.value, 0.0);
        assert!(!out.found);
    }

    #[test]
    fn always_satisfied_approaches_upper() {
        let out = run(|_| true);
        assert!(out.value >= 1.0 - 1e-4);
        assert!(out.value < 1.0);
    }

    #[test]
    fn narrow_interval_makes_no_probe() {
        let out = bsm(|_| Ok::<_, Infallible>(true), 0.0, 5e-5, &BsmConfig::default()).unwrap();
        assert!(out.probes.is_empty());
        assert!(!out.found);
    }

    #[test]
    fn predicate_errors_propagate() {
        let r = bsm(|_| Err::<bool, _>("boom"), 0.0, 1.0, &BsmConfig::default());
        assert_eq!(r, Err("boom"));
    }

    #[test]
    fn config_validation() {
        assert!(BsmConfig::new(0.0, 64).is_err());
        assert!(BsmConfig::new(0.5, 64).is_err());
        assert!(BsmConfig::new(1e-4, 13).is_err());
        assert!(BsmConfig::new(1e-4, 14).is_ok());
    }
}
