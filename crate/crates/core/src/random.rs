//! Random labelled chains for property tests and benchmarks.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;

use crate::{Smc, Transition};

#[derive(Debug, Clone)]
pub struct RandomSmcParams {
    pub min_states: usize,
    pub max_states: usize,
    pub max_out_degree: usize,
    /// Exit rate of every non-absorbing state is drawn uniformly from this range.
    pub exit_rate: (f64, f64),
    pub absorbing_prob: f64,
    pub self_loop_prob: f64,
    /// Each state carries each proposition independently with its probability.
    pub labels: Vec<(String, f64)>,
}

impl Default for RandomSmcParams {
    fn default() -> Self {
        Self {
            min_states: 2,
            max_states: 30,
            max_out_degree: 4,
            exit_rate: (0.1, 10.0),
            absorbing_prob: 0.1,
            self_loop_prob: 0.05,
            labels: vec![("phi".to_string(), 0.7), ("psi".to_string(), 0.2)],
        }
    }
}

pub fn random_smc<R: Rng + ?Sized>(rng: &mut R, params: &RandomSmcParams) -> Smc {
    let n = rng.random_range(params.min_states..=params.max_states.max(params.min_states));
    let mut transitions = Vec::new();
    for s in 0..n {
        if rng.random_bool(params.self_loop_prob) {
            transitions.push(Transition::new(s, s, rng.random_range(0.1..1.0)));
        }
        if n == 1 || rng.random_bool(params.absorbing_prob) {
            continue;
        }
        let degree = rng.random_range(1..=params.max_out_degree.min(n - 1).max(1));
        let others: Vec<usize> = (0..n).filter(|&d| d != s).collect();
        let picks = sample(rng, others.len(), degree);
        let weights: Vec<f64> = (0..degree).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let exit = rng.random_range(params.exit_rate.0..=params.exit_rate.1);
        for (at, w) in picks.iter().zip(weights) {
            transitions.push(Transition::new(s, others[at], exit * w / total));
        }
    }
    let labels = (0..n)
        .map(|_| {
            params
                .labels
                .iter()
                .filter(|(_, p)| rng.random_bool(*p))
                .map(|(name, _)| name.clone())
                .collect::<BTreeSet<String>>()
        })
        .collect();
    Smc::new(n, transitions, labels).expect("generated chain is well formed")
}
