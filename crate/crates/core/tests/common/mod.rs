//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smc_repair::random::{random_smc, RandomSmcParams};
use smc_repair::{Smc, StateClass, StateSet, Transition};

pub fn chain(n: usize, edges: &[(usize, usize, f64)], labels: &[(usize, &str)]) -> Smc {
    let mut l = vec![BTreeSet::new(); n];
    for &(s, p) in labels {
        l[s].insert(p.to_string());
    }
    Smc::new(
        n,
        edges.iter().map(|&(s, d, r)| Transition::new(s, d, r)).collect(),
        l,
    )
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_model(rng: &mut ChaCha8Rng, max_states: usize) -> Smc {
    random_smc(
        rng,
        &RandomSmcParams {
            max_states,
            ..RandomSmcParams::default()
        },
    )
}

pub fn phi_psi(smc: &Smc) -> (StateSet, StateSet) {
    let n = smc.num_states();
    (
        StateSet::from_predicate(n, |s| smc.has_label(s, "phi")),
        StateSet::from_predicate(n, |s| smc.has_label(s, "psi")),
    )
}

pub fn random_time(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.05..3.0)
}

fn successors(smc: &Smc, s: usize) -> Vec<usize> {
    smc.outgoing(s)
        .iter()
        .filter(|t| t.dst != s)
        .map(|t| t.dst)
        .collect()
}

/// Forward search from `s` through phi-states; true if a psi-state is hit.
fn can_reach(smc: &Smc, phi: &StateSet, psi: &StateSet, s: usize) -> bool {
    let mut seen = vec![false; smc.num_states()];
    let mut stack = vec![s];
    while let Some(u) = stack.pop() {
        if psi.contains(u) {
            return true;
        }
        if seen[u] || !phi.contains(u) {
            continue;
        }
        seen[u] = true;
        stack.extend(successors(smc, u));
    }
    false
}

/// Prob1 as the greatest fixpoint of a least fixpoint:
/// nu Z. mu Y. psi | (phi & Post ⊆ Z & Post ∩ Y ≠ ∅).
fn prob1_fixpoint(smc: &Smc, phi: &StateSet, psi: &StateSet) -> Vec<bool> {
    let n = smc.num_states();
    let mut z = vec![true; n];
    loop {
        let mut y: Vec<bool> = (0..n).map(|s| psi.contains(s)).collect();
        loop {
            let mut changed = false;
            for s in 0..n {
                if y[s] || !phi.contains(s) {
                    continue;
                }
                let post = successors(smc, s);
                if !post.is_empty() && post.iter().all(|&d| z[d]) && post.iter().any(|&d| y[d]) {
                    y[s] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if y == z {
            return z;
        }
        z = y;
    }
}

pub fn oracle_partition(smc: &Smc, phi: &StateSet, psi: &StateSet) -> Vec<StateClass> {
    let one = prob1_fixpoint(smc, phi, psi);
    (0..smc.num_states())
        .map(|s| {
            if psi.contains(s) {
                StateClass::Target
            } else if !phi.contains(s) {
                StateClass::Invalid
            } else if !can_reach(smc, phi, psi, s) {
                StateClass::GoToInvalid
            } else if one[s] {
                StateClass::GoToTarget
            } else {
                StateClass::GoBothWays
            }
        })
        .collect()
}

/// Dense matrix exponential by scaling and squaring of a Taylor series.
fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a / 2f64.powi(squarings as i32);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Pr(s, phi U<=t psi) from exp(Qt) of the absorbing-transformed chain.
pub fn expm_until(smc: &Smc, phi: &StateSet, psi: &StateSet, t: f64) -> Vec<f64> {
    let n = smc.num_states();
    let mut q = DMatrix::<f64>::zeros(n, n);
    for tr in smc.transitions() {
        let live = phi.contains(tr.src) && !psi.contains(tr.src);
        if live && tr.src != tr.dst {
            q[(tr.src, tr.dst)] += tr.rate;
            q[(tr.src, tr.src)] -= tr.rate;
        }
    }
    let p = expm(&(q * t));
    (0..n)
        .map(|s| psi.iter().map(|d| p[(s, d)]).sum::<f64>())
        .collect()
}

/// P(Exp(a) + Exp(b) <= t) for a != b.
pub fn hypoexp_cdf(a: f64, b: f64, t: f64) -> f64 {
    1.0 - (b * (-a * t).exp() - a * (-b * t).exp()) / (b - a)
}

/// Root of a decreasing function on [lo, hi] by regula falsi (Illinois).
pub fn root_decreasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let (mut flo, mut fhi) = (f(lo), f(hi));
    assert!(flo >= 0.0 && fhi <= 0.0, "root not bracketed: {flo} {fhi}");
    let mut side = 0;
    for _ in 0..200 {
        let x = (lo * fhi - hi * flo) / (fhi - flo);
        let fx = f(x);
        if fx.abs() < 1e-15 || hi - lo < 1e-15 {
            return x;
        }
        if fx > 0.0 {
            lo = x;
            flo = fx;
            if side == 1 {
                fhi /= 2.0;
            }
            side = 1;
        } else {
            hi = x;
            fhi = fx;
            if side == -1 {
                flo /= 2.0;
            }
            side = -1;
        }
    }
    (lo + hi) / 2.0
}
