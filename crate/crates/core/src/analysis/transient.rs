use super::{check_universe, poisson_weights_capped, AnalysisError, PoissonWeights, DEFAULT_MAX_TERMS};
use crate::{Smc, StateSet};

/// Uniformisation parameters for one `(chain, t, δ)` triple.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientSetup {
    /// Uniformisation rate: the largest exit rate of the absorbing-transformed
    /// chain, or 1 when every state is absorbing.
    pub q: f64,
    pub t: f64,
    pub delta: f64,
    pub weights: PoissonWeights,
}

impl TransientSetup {
    pub fn new(q: f64, t: f64, delta: f64, max_terms: usize) -> Result<Self, AnalysisError> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(AnalysisError::NonPositiveTime(t));
        }
        if !(delta > 0.0 && delta <= 1e-3) {
            return Err(AnalysisError::DeltaOutOfRange(delta));
        }
        let weights = poisson_weights_capped(q * t, delta, max_terms)?;
        Ok(Self {
            q,
            t,
            delta,
            weights,
        })
    }

    pub fn left_trunc(&self) -> usize {
        self.weights.left
    }

    pub fn right_trunc(&self) -> usize {
        self.weights.right
    }
}

/// Pr(s, phi U<=t psi) for every state, with truncation error at most `delta`.
pub fn timed_until_prob(
    smc: &Smc,
    phi: &StateSet,
    psi: &StateSet,
    t: f64,
    delta: f64,
) -> Result<Vec<f64>, AnalysisError> {
    timed_until_with(smc, phi, psi, t, delta, DEFAULT_MAX_TERMS)
}

pub fn timed_until_with(
    smc: &Smc,
    phi: &StateSet,
    psi: &StateSet,
    t: f64,
    delta: f64,
    max_terms: usize,
) -> Result<Vec<f64>, AnalysisError> {
    check_universe(smc, &[phi, psi])?;
    let n = smc.num_states();
    // Psi-states and (!phi & !psi)-states are made absorbing.
    let live: Vec<usize> = (0..n)
        .filter(|&s| phi.contains(s) && !psi.contains(s))
        .collect();
    let q = live
        .iter()
        .map(|&s| smc.exit_rate(s))
        .fold(0.0, f64::max);
    let q = if q > 0.0 { q } else { 1.0 };
    let setup = TransientSetup::new(q, t, delta, max_terms)?;

    // Rows of P = I + Q/q restricted to live states: (state, diagonal, off-diagonal).
    let rows: Vec<(usize, f64, Vec<(usize, f64)>)> = live
        .iter()
        .map(|&s| {
            let off: Vec<(usize, f64)> = smc.successors(s).map(|e| (e.dst, e.rate / q)).collect();
            let diag = 1.0 - smc.exit_rate(s) / q;
            (s, diag.max(0.0), off)
        })
        .collect();

    let mut x: Vec<f64> = (0..n).map(|s| if psi.contains(s) { 1.0 } else { 0.0 }).collect();
    let mut next = x.clone();
    let mut acc = vec![0.0; n];
    let PoissonWeights {
        left,
        right,
        ref weights,
        ..
    } = setup.weights;
    for k in 0..=right {
        if k >= left {
            let w = weights[k - left];
            for (a, v) in acc.iter_mut().zip(&x) {
                *a += w * v;
            }
        }
        if k == right {
            break;
        }
        for (s, diag, off) in &rows {
            next[*s] = diag * x[*s] + off.iter().map(|&(d, p)| p * x[d]).sum::<f64>();
        }
        std::mem::swap(&mut x, &mut next);
    }

    for s in 0..n {
        acc[s] = if psi.contains(s) {
            1.0
        } else {
            // only sub-delta overshoot can leave [0, 1] here
            acc[s].clamp(0.0, 1.0)
        };
    }
    Ok(acc)
}
