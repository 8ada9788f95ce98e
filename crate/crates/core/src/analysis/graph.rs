//! Qualitative (graph-based) Until analysis on the embedded jump graph.
//!
//! Membership in the probability-0 and probability-1 sets is decided exactly
//! from the edge structure; rates never enter.

use std::collections::VecDeque;

use crate::{Smc, StateSet};

/// Exact Prob0 / Prob1 membership for `phi U psi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Qualitative {
    pub exactly_zero: StateSet,
    pub exactly_one: StateSet,
}

impl Qualitative {
    pub fn compute(smc: &Smc, phi: &StateSet, psi: &StateSet) -> Self {
        let exactly_zero = prob0(smc, phi, psi);
        let exactly_one = prob1(smc, phi, psi, &exactly_zero);
        Self {
            exactly_zero,
            exactly_one,
        }
    }
}

/// Backward closure of `seed` where only states in `through` may be added.
fn backward_closure(pred: &[Vec<usize>], seed: &StateSet, through: &StateSet) -> StateSet {
    let mut reached = seed.clone();
    let mut queue: VecDeque<usize> = seed.iter().collect();
    while let Some(s) = queue.pop_front() {
        for &p in &pred[s] {
            if through.contains(p) && reached.insert(p) {
                queue.push_back(p);
            }
        }
    }
    reached
}

/// States from which no path through `phi`-states reaches a `psi`-state.
pub fn prob0(smc: &Smc, phi: &StateSet, psi: &StateSet) -> StateSet {
    let pred = smc.predecessors();
    let transit = phi.difference(psi);
    backward_closure(&pred, psi, &transit).complement()
}

/// States from which `phi U psi` holds almost surely: the complement of the
/// states that can reach `zero` while staying in `phi \ psi`.
pub fn prob1(smc: &Smc, phi: &StateSet, psi: &StateSet, zero: &StateSet) -> StateSet {
    let pred = smc.predecessors();
    let transit = phi.difference(psi);
    backward_closure(&pred, zero, &transit).complement()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Transition;

    #[test]
    fn absorbing_transit_state_is_prob0() {
        // 0 -> 1 (psi), 2 is phi but absorbing
        let smc = Smc::new(3, vec![Transition::new(0, 1, 1.0)], vec![]).unwrap();
        let phi = StateSet::from_indices(3, [0, 2]);
        let psi = StateSet::from_indices(3, [1]);
        let q = Qualitative::compute(&smc, &phi, &psi);
        assert_eq!(q.exactly_zero.iter().collect::<Vec<_>>(), vec![2]);
        assert_eq!(q.exactly_one.iter().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn self_loop_only_state_never_reaches_target() {
        let smc = Smc::new(2, vec![Transition::new(0, 0, 3.0)], vec![]).unwrap();
        let phi = StateSet::from_indices(2, [0]);
        let psi = StateSet::from_indices(2, [1]);
        let q = Qualitative::compute(&smc, &phi, &psi);
        assert!(q.exactly_zero.contains(0));
        assert!(!q.exactly_one.contains(0));
    }
}
