//! Requirement-driven classification of states and the reduced parametric
//! chain built from it.
//!
//! The classes depend only on the state formulas of the requirement: neither
//! the time bound nor the probability bound enters.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::analysis::{Qualitative, UntimedResult};
use crate::model::{ModelError, Smc, Transition, TransitionId};
use crate::StateSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateClass {
    /// Satisfies neither phi nor psi.
    Invalid,
    /// Satisfies psi.
    Target,
    /// Transit state reaching a target almost surely.
    GoToTarget,
    /// Transit state that can never reach a target.
    GoToInvalid,
    /// Transit state with untimed probability strictly between 0 and 1.
    GoBothWays,
}

impl StateClass {
    pub const ALL: [StateClass; 5] = [
        StateClass::Invalid,
        StateClass::Target,
        StateClass::GoToTarget,
        StateClass::GoToInvalid,
        StateClass::GoBothWays,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateClass::Invalid => "invalid",
            StateClass::Target => "target",
            StateClass::GoToTarget => "gototarget",
            StateClass::GoToInvalid => "gotoinvalid",
            StateClass::GoBothWays => "gobothways",
        }
    }
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    class_of: Vec<StateClass>,
}

impl Partition {
    /// Classifies states from exact Prob0/Prob1 membership.
    pub fn from_qualitative(phi: &StateSet, psi: &StateSet, q: &Qualitative) -> Self {
        let class_of = (0..phi.universe())
            .map(|s| {
                if psi.contains(s) {
                    StateClass::Target
                } else if !phi.contains(s) {
                    StateClass::Invalid
                } else if q.exactly_one.contains(s) {
                    StateClass::GoToTarget
                } else if q.exactly_zero.contains(s) {
                    StateClass::GoToInvalid
                } else {
                    StateClass::GoBothWays
                }
            })
            .collect();
        Self { class_of }
    }

    pub fn class(&self, s: usize) -> StateClass {
        self.class_of[s]
    }

    pub fn classes(&self) -> &[StateClass] {
        &self.class_of
    }

    pub fn num_states(&self) -> usize {
        self.class_of.len()
    }

    pub fn members(&self, class: StateClass) -> StateSet {
        StateSet::from_predicate(self.class_of.len(), |s| self.class_of[s] == class)
    }

    pub fn members_of(&self, classes: &[StateClass]) -> StateSet {
        StateSet::from_predicate(self.class_of.len(), |s| classes.contains(&self.class_of[s]))
    }

    pub fn count(&self, class: StateClass) -> usize {
        self.class_of.iter().filter(|&&c| c == class).count()
    }
}

/// Builds the partition of `smc` for `phi U psi` from a solved untimed result.
pub fn partition(
    smc: &Smc,
    phi: &StateSet,
    psi: &StateSet,
    untimed: &UntimedResult,
) -> Result<Partition, ModelError> {
    let n = smc.num_states();
    for len in [
        phi.universe(),
        psi.universe(),
        untimed.prob.len(),
        untimed.exactly_one.universe(),
        untimed.exactly_zero.universe(),
    ] {
        if len != n {
            return Err(ModelError::LengthMismatch {
                expected: n,
                got: len,
            });
        }
    }
    Ok(Partition::from_qualitative(phi, psi, &untimed.qualitative()))
}

/// One of the three reduction factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorName {
    /// gototarget -> target
    I,
    /// gobothways -> gotoinvalid | invalid
    J,
    /// gobothways -> gototarget | target
    K,
}

impl FactorName {
    pub fn symbol(self) -> char {
        match self {
            FactorName::I => 'i',
            FactorName::J => 'j',
            FactorName::K => 'k',
        }
    }

    /// The class whose probabilities the factor is meant to move.
    pub fn scope(self) -> StateClass {
        match self {
            FactorName::I => StateClass::GoToTarget,
            FactorName::J | FactorName::K => StateClass::GoBothWays,
        }
    }
}

impl fmt::Display for FactorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl std::str::FromStr for FactorName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "i" => Ok(FactorName::I),
            "j" => Ok(FactorName::J),
            "k" => Ok(FactorName::K),
            other => Err(format!("unknown factor {other:?}, expected i, j or k")),
        }
    }
}

/// Reduction factors, each in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Factors {
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl Default for Factors {
    fn default() -> Self {
        Self::ONE
    }
}

impl Factors {
    pub const ONE: Factors = Factors {
        i: 1.0,
        j: 1.0,
        k: 1.0,
    };

    pub fn new(i: f64, j: f64, k: f64) -> Result<Self, ModelError> {
        let f = Self { i, j, k };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, value) in [('i', self.i), ('j', self.j), ('k', self.k)] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(ModelError::FactorOutOfRange { name, value });
            }
        }
        Ok(())
    }

    pub fn get(&self, name: FactorName) -> f64 {
        match name {
            FactorName::I => self.i,
            FactorName::J => self.j,
            FactorName::K => self.k,
        }
    }

    pub fn with(mut self, name: FactorName, value: f64) -> Self {
        match name {
            FactorName::I => self.i = value,
            FactorName::J => self.j = value,
            FactorName::K => self.k = value,
        }
        self
    }
}

/// The reduced parametric chain: base rates plus the placement of the
/// factors. The base chain is never modified.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSmc {
    pub base: Smc,
    pub partition: Partition,
    pub t_i: BTreeSet<TransitionId>,
    pub t_j: BTreeSet<TransitionId>,
    pub t_k: BTreeSet<TransitionId>,
    /// Edges leaving target or invalid states; absent from every instance.
    pub zeroed: BTreeSet<TransitionId>,
}

pub fn build_reduced(smc: &Smc, partition: &Partition) -> ReducedSmc {
    use StateClass::*;
    let mut t_i = BTreeSet::new();
    let mut t_j = BTreeSet::new();
    let mut t_k = BTreeSet::new();
    let mut zeroed = BTreeSet::new();
    for t in smc.transitions() {
        let (from, to) = (partition.class(t.src), partition.class(t.dst));
        match (from, to) {
            (Target | Invalid, _) => zeroed.insert(t.id()),
            (GoToTarget, Target) => t_i.insert(t.id()),
            (GoBothWays, GoToInvalid | Invalid) => t_j.insert(t.id()),
            (GoBothWays, GoToTarget | Target) => t_k.insert(t.id()),
            _ => false,
        };
    }
    ReducedSmc {
        base: smc.clone(),
        partition: partition.clone(),
        t_i,
        t_j,
        t_k,
        zeroed,
    }
}

impl ReducedSmc {
    pub fn transitions_for(&self, name: FactorName) -> &BTreeSet<TransitionId> {
        match name {
            FactorName::I => &self.t_i,
            FactorName::J => &self.t_j,
            FactorName::K => &self.t_k,
        }
    }

    /// Fixes the factors, yielding a concrete chain.
    pub fn instantiate(&self, factors: Factors) -> Result<Smc, ModelError> {
        factors.validate()?;
        let transitions = self
            .base
            .transitions()
            .iter()
            .filter(|t| !self.zeroed.contains(&t.id()))
            .map(|t| {
                let id = t.id();
                let scale = if self.t_i.contains(&id) {
                    factors.i
                } else if self.t_j.contains(&id) {
                    factors.j
                } else if self.t_k.contains(&id) {
                    factors.k
                } else {
                    1.0
                };
                Transition::new(t.src, t.dst, t.rate * scale)
            })
            .collect();
        Ok(Smc::from_valid_parts(
            self.base.num_states(),
            transitions,
            self.base.all_labels().to_vec(),
        ))
    }
}

pub fn instantiate(reduced: &ReducedSmc, factors: Factors) -> Result<Smc, ModelError> {
    reduced.instantiate(factors)
}
