//! Numerical core: qualitative graph analysis, untimed Until probabilities and
//! time-bounded Until probabilities by uniformisation.

mod graph;
mod poisson;
mod transient;
mod untimed;

use thiserror::Error;

pub use graph::{prob0, prob1, Qualitative};
pub use poisson::{poisson_weights, poisson_weights_capped, PoissonWeights, DEFAULT_MAX_TERMS};
pub use transient::{timed_until_prob, timed_until_with, TransientSetup};
pub use untimed::{untimed_until_prob, UntimedResult, DENSE_FALLBACK_LIMIT, GS_ITERATION_CAP, GS_TOLERANCE};

/// Default truncation error budget of the Poisson series.
pub const DEFAULT_DELTA: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("time bound must be > 0, got {0}")]
    NonPositiveTime(f64),
    #[error("truncation error must be in (0, 1e-3], got {0}")]
    DeltaOutOfRange(f64),
    #[error("poisson rate must be finite and >= 0, got {0}")]
    InvalidPoissonRate(f64),
    #[error("poisson series for lambda = {lambda} needs {terms} terms, cap is {cap}")]
    TruncationTooWide { lambda: f64, terms: usize, cap: usize },
    #[error("linear solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("state set over {got} states used with a {expected}-state model")]
    UniverseMismatch { expected: usize, got: usize },
}

pub(crate) fn check_universe(
    smc: &crate::Smc,
    sets: &[&crate::StateSet],
) -> Result<(), AnalysisError> {
    for set in sets {
        if set.universe() != smc.num_states() {
            return Err(AnalysisError::UniverseMismatch {
                expected: smc.num_states(),
                got: set.universe(),
            });
        }
    }
    Ok(())
}
