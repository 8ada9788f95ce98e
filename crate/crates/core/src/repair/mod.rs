//! Rate-reduction repair for time-bounded Until requirements.
//!
//! For an upper probability bound, [`algorithm1`] first slows the edges from
//! `gototarget` into `target` (factor `i`) and then the edges from
//! `gobothways` towards the target side (factor `k`). For a lower bound,
//! [`algorithm2`] slows the edges from `gobothways` towards the invalid side
//! (factor `j`) and may fail: slowing exits also slows the whole process, so
//! the time bound can stay out of reach.
//!
//! Each factor is located with [`bsm`] against the currently worst state of
//! its class. Probability curves of different states can cross while a factor
//! shrinks, so after every search the whole class is rechecked and the search
//! repeats on `(0, current]` until no state of the class violates.

mod bsm;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{timed_until_prob, AnalysisError, Qualitative, DEFAULT_DELTA};
use crate::csl::{Comparison, UntilRequirement};
use crate::model::{ModelError, Smc, TransitionId};
use crate::partition::{build_reduced, FactorName, Factors, Partition, ReducedSmc, StateClass};
use crate::StateSet;

pub use bsm::{bsm, BsmConfig, BsmOutcome};

#[derive(Debug, Error)]
pub enum RepairError {
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{algorithm} handles {expected:?} requirements only")]
    WrongComparison {
        algorithm: &'static str,
        expected: Comparison,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("factor {factor} still violated after {passes} recheck passes")]
    LoopCap { factor: FactorName, passes: usize },
    #[error(
        "no satisfying value of factor {factor} found for state {state} even with truncation error {delta:e}"
    )]
    Numerical {
        factor: FactorName,
        state: usize,
        delta: f64,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct RepairConfig {
    pub bsm: BsmConfig,
    /// Truncation error of every transient solve.
    pub delta: f64,
    /// Recheck passes allowed per factor; `None` means the number of states.
    pub max_passes: Option<usize>,
}

impl Default for RepairConfig {
    fn default() -> Self {
        Self {
            bsm: BsmConfig::default(),
            delta: DEFAULT_DELTA,
            max_passes: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RepairStatus {
    NoReductionNeeded,
    Repaired,
    Failed,
    NothingToRepair,
}

impl RepairStatus {
    pub fn message(self) -> &'static str {
        match self {
            RepairStatus::NoReductionNeeded => "No need for rate reduction",
            RepairStatus::Repaired => "Repaired",
            RepairStatus::Failed => "No common reduction factor satisfies the requirement",
            RepairStatus::NothingToRepair => "No states whose probabilities can be modified",
        }
    }
}

/// Recheck passes spent on each factor.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PhaseIterations {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

/// Where a lower-bound repair gave up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FailureDetail {
    /// The least-probability state the search ran against.
    pub state: usize,
    /// Smallest factor value probed.
    pub factor: f64,
    /// Probability of `state` at that factor; the best the common factor reaches.
    pub probability: f64,
}

#[derive(Debug, Clone)]
pub struct RepairOutcome {
    pub status: RepairStatus,
    pub factors: Factors,
    pub t_i: Vec<TransitionId>,
    pub t_j: Vec<TransitionId>,
    pub t_k: Vec<TransitionId>,
    pub before: Vec<f64>,
    pub after: Vec<f64>,
    pub iterations: PhaseIterations,
    pub partition: Partition,
    /// States the algorithm tries to make satisfying.
    pub scope: Vec<usize>,
    pub failure: Option<FailureDetail>,
    /// The chain that `after` was computed on: the instantiated reduced chain,
    /// or the input chain when nothing was reduced.
    pub model: Smc,
}

impl RepairOutcome {
    pub fn transitions_for(&self, name: FactorName) -> &[TransitionId] {
        match name {
            FactorName::I => &self.t_i,
            FactorName::J => &self.t_j,
            FactorName::K => &self.t_k,
        }
    }
}

struct Problem<'a> {
    req: &'a UntilRequirement,
    phi: StateSet,
    psi: StateSet,
    reduced: ReducedSmc,
    delta: f64,
}

impl Problem<'_> {
    fn probs(&self, factors: Factors) -> Result<Vec<f64>, RepairError> {
        let smc = self.reduced.instantiate(factors)?;
        Ok(timed_until_prob(
            &smc,
            &self.phi,
            &self.psi,
            self.req.time_bound,
            self.delta,
        )?)
    }

    fn sat(&self, prob: f64) -> bool {
        self.req.is_satisfied_by(prob)
    }
}

enum Phase {
    Done,
    Stuck { state: usize, floor: f64 },
}

/// Index of the worst state among `members`: highest probability for an upper
/// bound, lowest for a lower bound. Ties go to the lowest index.
fn worst_state(members: &[usize], probs: &[f64], comparison: Comparison) -> usize {
    let mut best = members[0];
    for &s in &members[1..] {
        let worse = match comparison {
            Comparison::Leq => probs[s] > probs[best],
            Comparison::Geq => probs[s] < probs[best],
        };
        if worse {
            best = s;
        }
    }
    best
}

fn run_phase(
    problem: &Problem<'_>,
    factors: &mut Factors,
    name: FactorName,
    members: &[usize],
    cfg: &RepairConfig,
    max_passes: usize,
    passes: &mut usize,
) -> Result<Phase, RepairError> {
    loop {
        let probs = problem.probs(*factors)?;
        if members.iter().all(|&s| problem.sat(probs[s])) {
            return Ok(Phase::Done);
        }
        if *passes >= max_passes {
            return Err(RepairError::LoopCap {
                factor: name,
                passes: *passes,
            });
        }
        *passes += 1;
        let target = worst_state(members, &probs, problem.req.comparison);
        let current = factors.get(name);
        let base = *factors;
        let out = bsm(
            |x| Ok::<_, RepairError>(problem.sat(problem.probs(base.with(name, x))?[target])),
            0.0,
            current,
            &cfg.bsm,
        )?;
        if !out.found {
            let floor = out
                .probes
                .iter()
                .map(|&(x, _)| x)
                .fold(current, f64::min);
            return Ok(Phase::Stuck {
                state: target,
                floor,
            });
        }
        *factors = factors.with(name, out.value);
    }
}

fn setup<'a>(smc: &Smc, req: &'a UntilRequirement, cfg: &RepairConfig) -> Result<Problem<'a>, RepairError> {
    cfg.bsm.validate()?;
    let (phi, psi) = req.state_sets(smc);
    let qualitative = Qualitative::compute(smc, &phi, &psi);
    let partition = Partition::from_qualitative(&phi, &psi, &qualitative);
    let reduced = build_reduced(smc, &partition);
    Ok(Problem {
        req,
        phi,
        psi,
        reduced,
        delta: cfg.delta,
    })
}

fn ids(set: &std::collections::BTreeSet<TransitionId>) -> Vec<TransitionId> {
    set.iter().copied().collect()
}

fn unchanged(
    status: RepairStatus,
    smc: &Smc,
    problem: Problem<'_>,
    scope: Vec<usize>,
    before: Vec<f64>,
) -> RepairOutcome {
    RepairOutcome {
        status,
        factors: Factors::ONE,
        t_i: Vec::new(),
        t_j: Vec::new(),
        t_k: Vec::new(),
        after: before.clone(),
        before,
        iterations: PhaseIterations::default(),
        partition: problem.reduced.partition,
        scope,
        failure: None,
        model: smc.clone(),
    }
}

/// Repair for `P<=b [ phi U<=t psi ]`.
pub fn algorithm1(
    smc: &Smc,
    req: &UntilRequirement,
    cfg: &RepairConfig,
) -> Result<RepairOutcome, RepairError> {
    if req.comparison != Comparison::Leq {
        return Err(RepairError::WrongComparison {
            algorithm: "algorithm1",
            expected: Comparison::Leq,
        });
    }
    let mut problem = setup(smc, req, cfg)?;
    let partition = &problem.reduced.partition;
    let to_target: Vec<usize> = partition.members(StateClass::GoToTarget).iter().collect();
    let both_ways: Vec<usize> = partition.members(StateClass::GoBothWays).iter().collect();
    let scope: Vec<usize> = partition
        .members_of(&[StateClass::GoToTarget, StateClass::GoBothWays])
        .iter()
        .collect();
    let before = timed_until_prob(smc, &problem.phi, &problem.psi, req.time_bound, cfg.delta)?;
    if scope.is_empty() {
        return Ok(unchanged(RepairStatus::NothingToRepair, smc, problem, scope, before));
    }
    if scope.iter().all(|&s| problem.sat(before[s])) {
        return Ok(unchanged(RepairStatus::NoReductionNeeded, smc, problem, scope, before));
    }

    let max_passes = cfg.max_passes.unwrap_or(smc.num_states());
    let mut factors = Factors::ONE;
    let mut iterations = PhaseIterations::default();
    for (name, members) in [(FactorName::I, &to_target), (FactorName::K, &both_ways)] {
        let passes = match name {
            FactorName::I => &mut iterations.i,
            _ => &mut iterations.k,
        };
        let mut retried = false;
        loop {
            match run_phase(&problem, &mut factors, name, members, cfg, max_passes, passes)? {
                Phase::Done => break,
                // Unreachable in exact arithmetic: the untimed problem is
                // always solvable and bounds the timed one.
                Phase::Stuck { state, .. } if retried => {
                    return Err(RepairError::Numerical {
                        factor: name,
                        state,
                        delta: problem.delta,
                    });
                }
                Phase::Stuck { .. } => {
                    retried = true;
                    problem.delta /= 100.0;
                }
            }
        }
    }

    let after = problem.probs(factors)?;
    let model = problem.reduced.instantiate(factors)?;
    Ok(RepairOutcome {
        status: RepairStatus::Repaired,
        factors,
        t_i: if factors.i < 1.0 { ids(&problem.reduced.t_i) } else { Vec::new() },
        t_j: Vec::new(),
        t_k: if factors.k < 1.0 { ids(&problem.reduced.t_k) } else { Vec::new() },
        before,
        after,
        iterations,
        partition: problem.reduced.partition,
        scope,
        failure: None,
        model,
    })
}

/// Repair for `P>=b [ phi U<=t psi ]`.
pub fn algorithm2(
    smc: &Smc,
    req: &UntilRequirement,
    cfg: &RepairConfig,
) -> Result<RepairOutcome, RepairError> {
    if req.comparison != Comparison::Geq {
        return Err(RepairError::WrongComparison {
            algorithm: "algorithm2",
            expected: Comparison::Geq,
        });
    }
    let problem = setup(smc, req, cfg)?;
    let scope: Vec<usize> = problem
        .reduced
        .partition
        .members(StateClass::GoBothWays)
        .iter()
        .collect();
    let before = timed_until_prob(smc, &problem.phi, &problem.psi, req.time_bound, cfg.delta)?;
    if scope.is_empty() {
        return Ok(unchanged(RepairStatus::NothingToRepair, smc, problem, scope, before));
    }
    if scope.iter().all(|&s| problem.sat(before[s])) {
        return Ok(unchanged(RepairStatus::NoReductionNeeded, smc, problem, scope, before));
    }

    let max_passes = cfg.max_passes.unwrap_or(smc.num_states());
    let mut factors = Factors::ONE;
    let mut iterations = PhaseIterations::default();
    let phase = run_phase(
        &problem,
        &mut factors,
        FactorName::J,
        &scope,
        cfg,
        max_passes,
        &mut iterations.j,
    )?;
    let failure = match phase {
        Phase::Done => None,
        Phase::Stuck { state, floor } => {
            let probability = problem.probs(factors.with(FactorName::J, floor))?[state];
            Some(FailureDetail {
                state,
                factor: floor,
                probability,
            })
        }
    };
    let after = problem.probs(factors)?;
    let model = problem.reduced.instantiate(factors)?;
    Ok(RepairOutcome {
        status: if failure.is_some() {
            RepairStatus::Failed
        } else {
            RepairStatus::Repaired
        },
        factors,
        t_i: Vec::new(),
        t_j: if factors.j < 1.0 { ids(&problem.reduced.t_j) } else { Vec::new() },
        t_k: Vec::new(),
        before,
        after,
        iterations,
        partition: problem.reduced.partition,
        scope,
        failure,
        model,
    })
}

/// Dispatches on the comparison operator of `req`.
pub fn repair(
    smc: &Smc,
    req: &UntilRequirement,
    cfg: &RepairConfig,
) -> Result<RepairOutcome, RepairError> {
    match req.comparison {
        Comparison::Leq => algorithm1(smc, req, cfg),
        Comparison::Geq => algorithm2(smc, req, cfg),
    }
}
