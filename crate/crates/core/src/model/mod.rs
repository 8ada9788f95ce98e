//! State-labelled continuous-time Markov chains.
//!
//! An [`Smc`] is a finite state space with a sparse matrix of strictly positive
//! rates and a set of atomic propositions per state. Values are immutable once
//! built; derived chains (for example the reduced chain used during repair) are
//! always new values.

mod format;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use format::{parse_model, write_model, ParseOptions};

/// Canonical transition identifier. At most one edge exists per ordered pair.
pub type TransitionId = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    pub src: usize,
    pub dst: usize,
    pub rate: f64,
}

impl Transition {
    pub fn new(src: usize, dst: usize, rate: f64) -> Self {
        Self { src, dst, rate }
    }

    pub fn id(&self) -> TransitionId {
        (self.src, self.dst)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyStateSpace,
    NonPositiveRate { src: usize, dst: usize, rate: f64 },
    IndexOutOfRange { src: usize, dst: usize },
    DuplicateEdge { src: usize, dst: usize },
    LabelOutOfRange { state: usize },
    InvalidProposition { state: usize, name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyStateSpace => write!(f, "model must have at least one state"),
            Violation::NonPositiveRate { src, dst, rate } => {
                write!(f, "non-positive rate {rate} on {src} -> {dst}")
            }
            Violation::IndexOutOfRange { src, dst } => {
                write!(f, "index out of range in transition {src} -> {dst}")
            }
            Violation::DuplicateEdge { src, dst } => {
                write!(f, "duplicate edge {src} -> {dst}")
            }
            Violation::LabelOutOfRange { state } => {
                write!(f, "index out of range in labelling of state {state}")
            }
            Violation::InvalidProposition { state, name } => {
                write!(f, "invalid proposition name {name:?} on state {state}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    Invalid(ValidationReport),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("reduction factor {name} = {value} is outside (0, 1]")]
    FactorOutOfRange { name: char, value: f64 },
    #[error("vector of length {got} does not match {expected} states")]
    LengthMismatch { expected: usize, got: usize },
}

pub(crate) fn is_proposition_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Checks raw model parts against the structural invariants of [`Smc`].
pub fn validate(
    num_states: usize,
    transitions: &[Transition],
    labels: &[BTreeSet<String>],
) -> ValidationReport {
    let mut violations = Vec::new();
    if num_states == 0 {
        violations.push(Violation::EmptyStateSpace);
    }
    let mut seen = BTreeSet::new();
    for t in transitions {
        if t.src >= num_states || t.dst >= num_states {
            violations.push(Violation::IndexOutOfRange {
                src: t.src,
                dst: t.dst,
            });
        }
        // NaN fails this comparison as well.
        if !(t.rate > 0.0 && t.rate.is_finite()) {
            violations.push(Violation::NonPositiveRate {
                src: t.src,
                dst: t.dst,
                rate: t.rate,
            });
        }
        if !seen.insert(t.id()) {
            violations.push(Violation::DuplicateEdge {
                src: t.src,
                dst: t.dst,
            });
        }
    }
    for state in num_states..labels.len() {
        violations.push(Violation::LabelOutOfRange { state });
    }
    for (state, props) in labels.iter().enumerate() {
        for name in props {
            if !is_proposition_name(name) {
                violations.push(Violation::InvalidProposition {
                    state,
                    name: name.clone(),
                });
            }
        }
    }
    ValidationReport { violations }
}

/// Sums the rates of repeated `(src, dst)` pairs, keeping first-seen order.
pub fn merge_duplicates(transitions: Vec<Transition>) -> Vec<Transition> {
    let mut index: BTreeMap<TransitionId, usize> = BTreeMap::new();
    let mut merged: Vec<Transition> = Vec::with_capacity(transitions.len());
    for t in transitions {
        match index.get(&t.id()) {
            Some(&at) => merged[at].rate += t.rate,
            None => {
                index.insert(t.id(), merged.len());
                merged.push(t);
            }
        }
    }
    merged
}

/// A state-labelled CTMC with a compressed-row rate matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Smc {
    num_states: usize,
    // sorted by (src, dst)
    transitions: Vec<Transition>,
    row_start: Vec<usize>,
    labels: Vec<BTreeSet<String>>,
}

impl Smc {
    /// Builds a chain. `labels` may be shorter than `num_states`; missing
    /// entries are the empty label set.
    pub fn new(
        num_states: usize,
        transitions: Vec<Transition>,
        mut labels: Vec<BTreeSet<String>>,
    ) -> Result<Self, ModelError> {
        let report = validate(num_states, &transitions, &labels);
        if !report.is_ok() {
            return Err(ModelError::Invalid(report));
        }
        labels.resize(num_states, BTreeSet::new());
        Ok(Self::from_valid_parts(num_states, transitions, labels))
    }

    pub(crate) fn from_valid_parts(
        num_states: usize,
        mut transitions: Vec<Transition>,
        labels: Vec<BTreeSet<String>>,
    ) -> Self {
        transitions.sort_by_key(Transition::id);
        let mut row_start = vec![0; num_states + 1];
        for t in &transitions {
            row_start[t.src + 1] += 1;
        }
        for s in 0..num_states {
            row_start[s + 1] += row_start[s];
        }
        Self {
            num_states,
            transitions,
            row_start,
            labels,
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// All transitions, ordered by `(src, dst)`.
    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Outgoing transitions of `s`, self-loop included if present.
    pub fn outgoing(&self, s: usize) -> &[Transition] {
        &self.transitions[self.row_start[s]..self.row_start[s + 1]]
    }

    /// Outgoing transitions of `s` that actually leave the state.
    pub fn successors(&self, s: usize) -> impl Iterator<Item = &Transition> + '_ {
        self.outgoing(s).iter().filter(move |t| t.dst != s)
    }

    /// Total rate of leaving `s`. Self-loops are invisible in a CTMC and do
    /// not count.
    pub fn exit_rate(&self, s: usize) -> f64 {
        self.successors(s).map(|t| t.rate).sum()
    }

    pub fn rate(&self, src: usize, dst: usize) -> Option<f64> {
        let row = self.outgoing(src);
        row.binary_search_by_key(&dst, |t| t.dst)
            .ok()
            .map(|at| row[at].rate)
    }

    pub fn labels(&self, s: usize) -> &BTreeSet<String> {
        &self.labels[s]
    }

    pub fn all_labels(&self) -> &[BTreeSet<String>] {
        &self.labels
    }

    pub fn has_label(&self, s: usize, prop: &str) -> bool {
        self.labels[s].contains(prop)
    }

    /// Every proposition name used anywhere in the labelling.
    pub fn propositions(&self) -> BTreeSet<&str> {
        self.labels
            .iter()
            .flat_map(|l| l.iter().map(String::as_str))
            .collect()
    }

    /// Always ok for a constructed chain; kept for symmetry with [`validate`].
    pub fn validate(&self) -> ValidationReport {
        validate(self.num_states, &self.transitions, &self.labels)
    }

    /// Predecessor lists over non-self-loop edges, used by graph fixpoints.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.num_states];
        for t in &self.transitions {
            if t.src != t.dst {
                pred[t.dst].push(t.src);
            }
        }
        pred
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(spec: &[&[&str]]) -> Vec<BTreeSet<String>> {
        spec.iter()
            .map(|l| l.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    #[test]
    fn minimal_chain_is_valid() {
        let report = validate(2, &[Transition::new(0, 1, 1.0)], &[]);
        assert!(report.is_ok());
        assert_eq!(report.to_string(), "ok");
    }

    #[test]
    fn zero_rate_is_rejected() {
        let report = validate(2, &[Transition::new(0, 1, 0.0)], &[]);
        assert_eq!(
            report.violations,
            vec![Violation::NonPositiveRate {
                src: 0,
                dst: 1,
                rate: 0.0
            }]
        );
        assert!(report.to_string().contains("non-positive rate"));
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let report = validate(2, &[Transition::new(0, 3, 1.0)], &[]);
        assert_eq!(
            report.violations,
            vec![Violation::IndexOutOfRange { src: 0, dst: 3 }]
        );
        assert!(report.to_string().contains("index out of range"));
    }

    #[test]
    fn duplicates_rejected_or_merged() {
        let ts = vec![
            Transition::new(0, 1, 1.0),
            Transition::new(1, 0, 2.0),
            Transition::new(0, 1, 0.5),
        ];
        let err = Smc::new(2, ts.clone(), vec![]).unwrap_err();
        assert!(matches!(err, ModelError::Invalid(r)
            if r.violations == vec![Violation::DuplicateEdge { src: 0, dst: 1 }]));
        let smc = Smc::new(2, merge_duplicates(ts), vec![]).unwrap();
        assert_eq!(smc.rate(0, 1), Some(1.5));
        assert_eq!(smc.rate(1, 0), Some(2.0));
    }

    #[test]
    fn bad_proposition_name() {
        let report = validate(1, &[], &labels(&[&["9lives"]]));
        assert!(!report.is_ok());
    }

    #[test]
    fn self_loops_do_not_count_towards_exit_rate() {
        let smc = Smc::new(
            2,
            vec![Transition::new(0, 0, 5.0), Transition::new(0, 1, 1.5)],
            labels(&[&["up"], &[]]),
        )
        .unwrap();
        assert_eq!(smc.exit_rate(0), 1.5);
        assert_eq!(smc.exit_rate(1), 0.0);
        assert_eq!(smc.outgoing(0).len(), 2);
        assert_eq!(smc.successors(0).count(), 1);
        assert!(smc.has_label(0, "up"));
        assert!(smc.labels(1).is_empty());
        assert_eq!(smc.predecessors()[1], vec![0]);
    }
}
