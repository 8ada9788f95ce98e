//! Monte Carlo path simulation of Until properties.
//!
//! This is deliberately independent of [`crate::analysis`]: it shares no code
//! with the numerical solvers and serves as their statistical oracle. Every
//! path draws from its own ChaCha stream selected by `(seed, path index)`, so
//! estimates do not depend on thread scheduling.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::{Smc, StateSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub num_paths: usize,
    pub seed: u64,
    pub max_jumps: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            num_paths: 100_000,
            seed: 0,
            max_jumps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    Bounded(f64),
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimEstimate {
    pub estimate: f64,
    /// Binomial standard error of `estimate`.
    pub std_error: f64,
    pub successes: usize,
    pub paths: usize,
    /// Paths cut off by `max_jumps` and scored as non-satisfying.
    pub truncated: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("start state {start} out of range for {states} states")]
    StartOutOfRange { start: usize, states: usize },
    #[error("num_paths must be >= 1")]
    NoPaths,
    #[error("time bound must be > 0, got {0}")]
    NonPositiveTime(f64),
    #[error("state set over {got} states used with a {expected}-state model")]
    UniverseMismatch { expected: usize, got: usize },
}

#[derive(Clone, Copy)]
enum PathEnd {
    Success,
    Failure,
    Truncated,
}

/// States with no path through `phi`-states into `psi`.
fn cannot_reach(smc: &Smc, phi: &StateSet, psi: &StateSet) -> Vec<bool> {
    let n = smc.num_states();
    let mut back = vec![Vec::new(); n];
    for t in smc.transitions() {
        back[t.dst].push(t.src);
    }
    let mut good = vec![false; n];
    let mut queue = VecDeque::new();
    for s in psi.iter() {
        good[s] = true;
        queue.push_back(s);
    }
    while let Some(s) = queue.pop_front() {
        for &p in &back[s] {
            if !good[p] && phi.contains(p) {
                good[p] = true;
                queue.push_back(p);
            }
        }
    }
    good.into_iter().map(|g| !g).collect()
}

/// Estimates Pr(start, phi U<=t psi), or the untimed probability for
/// [`Horizon::Unbounded`].
pub fn simulate_until(
    smc: &Smc,
    start: usize,
    phi: &StateSet,
    psi: &StateSet,
    horizon: Horizon,
    cfg: &SimConfig,
) -> Result<SimEstimate, OracleError> {
    let n = smc.num_states();
    if start >= n {
        return Err(OracleError::StartOutOfRange { start, states: n });
    }
    if cfg.num_paths == 0 {
        return Err(OracleError::NoPaths);
    }
    for set in [phi, psi] {
        if set.universe() != n {
            return Err(OracleError::UniverseMismatch {
                expected: n,
                got: set.universe(),
            });
        }
    }
    if let Horizon::Bounded(t) = horizon {
        if !(t > 0.0) {
            return Err(OracleError::NonPositiveTime(t));
        }
    }

    // Jump structure without self-loops: (exit rate, [(dst, rate)]).
    let rows: Vec<(f64, Vec<(usize, f64)>)> = (0..n)
        .map(|s| {
            let out: Vec<(usize, f64)> = smc
                .outgoing(s)
                .iter()
                .filter(|e| e.dst != s)
                .map(|e| (e.dst, e.rate))
                .collect();
            (out.iter().map(|&(_, r)| r).sum(), out)
        })
        .collect();
    let dead = match horizon {
        Horizon::Unbounded => cannot_reach(smc, phi, psi),
        Horizon::Bounded(_) => vec![false; n],
    };

    let walk = |path: usize| -> PathEnd {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(path as u64);
        let mut state = start;
        let mut clock = 0.0;
        for _ in 0..=cfg.max_jumps {
            if psi.contains(state) {
                return PathEnd::Success;
            }
            if !phi.contains(state) || dead[state] {
                return PathEnd::Failure;
            }
            let (exit, ref out) = rows[state];
            if exit <= 0.0 {
                return PathEnd::Failure;
            }
            if let Horizon::Bounded(t) = horizon {
                let sojourn = Exp::new(exit).expect("positive exit rate");
                clock += rng.sample(sojourn);
                if clock > t {
                    return PathEnd::Failure;
                }
            }
            let mut pick = rng.random::<f64>() * exit;
            let mut next = out[out.len() - 1].0;
            for &(dst, rate) in out {
                if pick < rate {
                    next = dst;
                    break;
                }
                pick -= rate;
            }
            state = next;
        }
        PathEnd::Truncated
    };

    let ends: Vec<PathEnd> = (0..cfg.num_paths).into_par_iter().map(walk).collect();
    let successes = ends.iter().filter(|e| matches!(e, PathEnd::Success)).count();
    let truncated = ends.iter().filter(|e| matches!(e, PathEnd::Truncated)).count();
    let paths = cfg.num_paths;
    let estimate = successes as f64 / paths as f64;
    let std_error = (estimate * (1.0 - estimate) / paths as f64).sqrt();
    Ok(SimEstimate {
        estimate,
        std_error,
        successes,
        paths,
        truncated,
    })
}
