//! The CSL fragment handled here: a propositional state formula on each side
//! of a single upper time-bounded Until, wrapped in one probability bound.
//!
//! ```text
//! P<=0.2 [ "up" U<=5 "repair" ]
//! P>=0.95 [ up & !off U<=5 repair ]
//! ```

mod parser;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::analysis::{timed_until_prob, AnalysisError};
use crate::{Smc, StateSet};

pub use parser::{parse, CslError};

/// Propositional state formula. Conjunction and implication are desugared
/// into negation and disjunction when parsed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PropFormula {
    Atom(String),
    Not(Box<PropFormula>),
    Or(Box<PropFormula>, Box<PropFormula>),
}

impl PropFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        PropFormula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: PropFormula) -> Self {
        PropFormula::Not(Box::new(f))
    }

    pub fn or(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Or(Box::new(a), Box::new(b))
    }

    /// `a & b` as `!(!a | !b)`.
    pub fn and(a: PropFormula, b: PropFormula) -> Self {
        Self::not(Self::or(Self::not(a), Self::not(b)))
    }

    pub fn implies(a: PropFormula, b: PropFormula) -> Self {
        Self::or(Self::not(a), b)
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            PropFormula::Atom(name) => {
                out.insert(name);
            }
            PropFormula::Not(f) => f.collect_atoms(out),
            PropFormula::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropFormula::Atom(name) => write!(f, "{name:?}"),
            PropFormula::Not(inner) => write!(f, "!{inner}"),
            PropFormula::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Comparison {
    Leq,
    Geq,
}

impl Comparison {
    pub fn holds(self, prob: f64, bound: f64) -> bool {
        match self {
            Comparison::Leq => prob <= bound,
            Comparison::Geq => prob >= bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Leq => "<=",
            Comparison::Geq => ">=",
        }
    }
}

/// `P~b [ phi U<=t psi ]` with `b` in (0, 1) and `t > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct UntilRequirement {
    pub comparison: Comparison,
    pub bound: f64,
    pub phi: PropFormula,
    pub psi: PropFormula,
    pub time_bound: f64,
}

impl UntilRequirement {
    pub fn new(
        comparison: Comparison,
        bound: f64,
        phi: PropFormula,
        psi: PropFormula,
        time_bound: f64,
    ) -> Result<Self, CslError> {
        if !(bound > 0.0 && bound < 1.0) {
            return Err(CslError::BoundOutOfRange(bound));
        }
        if !(time_bound > 0.0 && time_bound.is_finite()) {
            return Err(CslError::NonPositiveTime(time_bound));
        }
        Ok(Self {
            comparison,
            bound,
            phi,
            psi,
            time_bound,
        })
    }

    pub fn is_satisfied_by(&self, prob: f64) -> bool {
        self.comparison.holds(prob, self.bound)
    }

    /// `Sat(phi)` and `Sat(psi)` on `smc`.
    pub fn state_sets(&self, smc: &Smc) -> (StateSet, StateSet) {
        (eval_prop(smc, &self.phi), eval_prop(smc, &self.psi))
    }

    /// Atom names in the requirement that label no state of `smc`.
    pub fn unknown_atoms(&self, smc: &Smc) -> BTreeSet<String> {
        let known = smc.propositions();
        self.phi
            .atoms()
            .into_iter()
            .chain(self.psi.atoms())
            .filter(|a| !known.contains(a))
            .map(str::to_string)
            .collect()
    }
}

impl fmt::Display for UntilRequirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P{}{:?} [ {} U<={:?} {} ]",
            self.comparison.symbol(),
            self.bound,
            self.phi,
            self.time_bound,
            self.psi
        )
    }
}

/// `Sat(f)`: states whose label set satisfies `f`. Unknown atoms are false
/// everywhere.
pub fn eval_prop(smc: &Smc, f: &PropFormula) -> StateSet {
    let n = smc.num_states();
    match f {
        PropFormula::Atom(name) => StateSet::from_predicate(n, |s| smc.has_label(s, name)),
        PropFormula::Not(inner) => eval_prop(smc, inner).complement(),
        PropFormula::Or(a, b) => eval_prop(smc, a).union(&eval_prop(smc, b)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateVerdict {
    pub prob: f64,
    pub sat: bool,
}

/// Model-checks `req` in every state.
pub fn check(smc: &Smc, req: &UntilRequirement, delta: f64) -> Result<Vec<StateVerdict>, AnalysisError> {
    let (phi, psi) = req.state_sets(smc);
    let probs = timed_until_prob(smc, &phi, &psi, req.time_bound, delta)?;
    Ok(probs
        .into_iter()
        .map(|prob| StateVerdict {
            prob,
            sat: req.is_satisfied_by(prob),
        })
        .collect())
}
