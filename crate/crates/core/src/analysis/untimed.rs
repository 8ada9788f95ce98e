use nalgebra::{DMatrix, DVector};

use super::{check_universe, AnalysisError, Qualitative};
use crate::{Smc, StateSet};

/// Gauss–Seidel stopping criterion (infinity-norm residual).
pub const GS_TOLERANCE: f64 = 1e-12;
pub const GS_ITERATION_CAP: usize = 1_000_000;
/// Largest undecided-state count for which a dense direct solve is attempted
/// when Gauss–Seidel stalls.
pub const DENSE_FALLBACK_LIMIT: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct UntimedResult {
    pub prob: Vec<f64>,
    pub exactly_one: StateSet,
    pub exactly_zero: StateSet,
}

impl UntimedResult {
    pub fn qualitative(&self) -> Qualitative {
        Qualitative {
            exactly_zero: self.exactly_zero.clone(),
            exactly_one: self.exactly_one.clone(),
        }
    }
}

/// Pr(s, phi U psi) for every state.
///
/// Boundary states are fixed by the exact graph analysis; the rest solve
/// `p(s) = Σ P_emb(s,s')·p(s')` over the embedded jump chain.
pub fn untimed_until_prob(
    smc: &Smc,
    phi: &StateSet,
    psi: &StateSet,
) -> Result<UntimedResult, AnalysisError> {
    check_universe(smc, &[phi, psi])?;
    let Qualitative {
        exactly_zero,
        exactly_one,
    } = Qualitative::compute(smc, phi, psi);
    let n = smc.num_states();
    let mut prob: Vec<f64> = (0..n)
        .map(|s| if exactly_one.contains(s) { 1.0 } else { 0.0 })
        .collect();
    let maybe: Vec<usize> = exactly_zero.union(&exactly_one).complement().iter().collect();

    if !maybe.is_empty() {
        // Embedded chain rows of the undecided states.
        let rows: Vec<Vec<(usize, f64)>> = maybe
            .iter()
            .map(|&s| {
                let exit = smc.exit_rate(s);
                smc.successors(s).map(|t| (t.dst, t.rate / exit)).collect()
            })
            .collect();
        let (iterations, residual) = gauss_seidel(&maybe, &rows, &mut prob);
        if residual > GS_TOLERANCE {
            if maybe.len() > DENSE_FALLBACK_LIMIT {
                return Err(AnalysisError::NonConvergence {
                    iterations,
                    residual,
                });
            }
            dense_solve(&maybe, &rows, &mut prob, n);
            let residual = residual_norm(&maybe, &rows, &prob);
            if residual > GS_TOLERANCE {
                return Err(AnalysisError::NonConvergence {
                    iterations,
                    residual,
                });
            }
        }
    }

    Ok(UntimedResult {
        prob,
        exactly_one,
        exactly_zero,
    })
}

fn residual_norm(maybe: &[usize], rows: &[Vec<(usize, f64)>], prob: &[f64]) -> f64 {
    maybe
        .iter()
        .zip(rows)
        .map(|(&s, row)| {
            let rhs: f64 = row.iter().map(|&(d, p)| p * prob[d]).sum();
            (prob[s] - rhs).abs()
        })
        .fold(0.0, f64::max)
}

fn gauss_seidel(maybe: &[usize], rows: &[Vec<(usize, f64)>], prob: &mut [f64]) -> (usize, f64) {
    let mut residual = f64::INFINITY;
    for iter in 1..=GS_ITERATION_CAP {
        for (&s, row) in maybe.iter().zip(rows) {
            prob[s] = row.iter().map(|&(d, p)| p * prob[d]).sum();
        }
        // Checking the residual every sweep doubles the work; every 16 is plenty.
        if iter % 16 == 0 || iter == GS_ITERATION_CAP {
            residual = residual_norm(maybe, rows, prob);
            if residual <= GS_TOLERANCE {
                return (iter, residual);
            }
        }
    }
    (GS_ITERATION_CAP, residual)
}

fn dense_solve(maybe: &[usize], rows: &[Vec<(usize, f64)>], prob: &mut [f64], n: usize) {
    let m = maybe.len();
    let mut local = vec![usize::MAX; n];
    for (at, &s) in maybe.iter().enumerate() {
        local[s] = at;
    }
    // (I - A) x = b, where b collects the mass going straight into Prob1.
    let mut a = DMatrix::<f64>::identity(m, m);
    let mut b = DVector::<f64>::zeros(m);
    for (r, row) in rows.iter().enumerate() {
        for &(d, p) in row {
            if local[d] != usize::MAX {
                a[(r, local[d])] -= p;
            } else {
                b[r] += p * prob[d];
            }
        }
    }
    if let Some(x) = a.lu().solve(&b) {
        for (at, &s) in maybe.iter().enumerate() {
            prob[s] = x[at];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Transition;

    #[test]
    fn certain_reachability() {
        let smc = Smc::new(2, vec![Transition::new(0, 1, 2.0)], vec![]).unwrap();
        let phi = StateSet::from_indices(2, [0]);
        let psi = StateSet::from_indices(2, [1]);
        let r = untimed_until_prob(&smc, &phi, &psi).unwrap();
        assert_eq!(r.prob, vec![1.0, 1.0]);
        assert!(r.exactly_one.contains(0));
    }

    #[test]
    fn symmetric_race() {
        let smc = Smc::new(
            3,
            vec![Transition::new(0, 1, 1.5), Transition::new(0, 2, 1.5)],
            vec![],
        )
        .unwrap();
        let phi = StateSet::from_indices(3, [0]);
        let psi = StateSet::from_indices(3, [1]);
        let r = untimed_until_prob(&smc, &phi, &psi).unwrap();
        assert!((r.prob[0] - 0.5).abs() < 1e-14);
        assert!(r.exactly_zero.contains(2));
    }

    #[test]
    fn asymmetric_race_with_cycle() {
        // 0 <-> 1 cycle, 0 -> psi (a), 1 -> invalid (b): p0 = a/(a+c) + c/(a+c)·p1,
        // p1 = d/(d+b)·p0  (c: 0->1, d: 1->0)
        let (a, b, c, d) = (1.0, 2.0, 3.0, 4.0);
        let smc = Smc::new(
            4,
            vec![
                Transition::new(0, 2, a),
                Transition::new(0, 1, c),
                Transition::new(1, 0, d),
                Transition::new(1, 3, b),
            ],
            vec![],
        )
        .unwrap();
        let phi = StateSet::from_indices(4, [0, 1]);
        let psi = StateSet::from_indices(4, [2]);
        let r = untimed_until_prob(&smc, &phi, &psi).unwrap();
        let p1_over_p0 = d / (d + b);
        let p0 = (a / (a + c)) / (1.0 - c / (a + c) * p1_over_p0);
        assert!((r.prob[0] - p0).abs() < 1e-11);
        assert!((r.prob[1] - p1_over_p0 * p0).abs() < 1e-11);
    }
}
