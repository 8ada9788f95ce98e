use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use smc_repair::csl::{StateVerdict, UntilRequirement};
use smc_repair::oracle::SimEstimate;
use smc_repair::repair::{FailureDetail, PhaseIterations, RepairOutcome, RepairStatus};
use smc_repair::{Factors, Partition, StateClass, TransitionId};

fn json_line<W: Write, T: Serialize>(mut out: W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}

fn by_state(values: &[f64]) -> BTreeMap<usize, f64> {
    values.iter().copied().enumerate().collect()
}

#[derive(Serialize)]
struct CheckRow {
    state: usize,
    probability: f64,
    satisfied: bool,
    class: StateClass,
}

#[derive(Serialize)]
struct CheckReport {
    requirement: String,
    all_satisfied: bool,
    states: Vec<CheckRow>,
}

pub fn check_json<W: Write>(
    out: W,
    req: &UntilRequirement,
    verdicts: &[StateVerdict],
    partition: &Partition,
) -> io::Result<()> {
    let states = verdicts
        .iter()
        .enumerate()
        .map(|(state, v)| CheckRow {
            state,
            probability: v.prob,
            satisfied: v.sat,
            class: partition.class(state),
        })
        .collect();
    json_line(
        out,
        &CheckReport {
            requirement: req.to_string(),
            all_satisfied: verdicts.iter().all(|v| v.sat),
            states,
        },
    )
}

pub fn check_text<W: Write>(
    mut out: W,
    req: &UntilRequirement,
    verdicts: &[StateVerdict],
    partition: &Partition,
) -> io::Result<()> {
    writeln!(out, "requirement: {req}")?;
    writeln!(out, "{:>6}  {:<14}  {:>14}  verdict", "state", "class", "probability")?;
    for (s, v) in verdicts.iter().enumerate() {
        writeln!(
            out,
            "{s:>6}  {:<14}  {:>14.10}  {}",
            partition.class(s).name(),
            v.prob,
            if v.sat { "sat" } else { "VIOLATED" }
        )?;
    }
    let bad = verdicts.iter().filter(|v| !v.sat).count();
    writeln!(out, "{bad} of {} states violate the requirement", verdicts.len())
}

#[derive(Serialize)]
struct TransitionSets<'a> {
    i: &'a [TransitionId],
    j: &'a [TransitionId],
    k: &'a [TransitionId],
}

#[derive(Serialize)]
struct RepairReport<'a> {
    requirement: String,
    status: RepairStatus,
    message: &'static str,
    factors: Factors,
    transitions: TransitionSets<'a>,
    iterations: PhaseIterations,
    scope: &'a [usize],
    before: BTreeMap<usize, f64>,
    after: BTreeMap<usize, f64>,
    failure: Option<FailureDetail>,
}

pub fn repair_json<W: Write>(out: W, req: &UntilRequirement, o: &RepairOutcome) -> io::Result<()> {
    json_line(
        out,
        &RepairReport {
            requirement: req.to_string(),
            status: o.status,
            message: o.status.message(),
            factors: o.factors,
            transitions: TransitionSets {
                i: &o.t_i,
                j: &o.t_j,
                k: &o.t_k,
            },
            iterations: o.iterations,
            scope: &o.scope,
            before: by_state(&o.before),
            after: by_state(&o.after),
            failure: o.failure,
        },
    )
}

fn edge_list(ids: &[TransitionId]) -> String {
    ids.iter()
        .map(|(s, d)| format!("{s}->{d}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn repair_text<W: Write>(mut out: W, req: &UntilRequirement, o: &RepairOutcome) -> io::Result<()> {
    writeln!(out, "requirement: {req}")?;
    writeln!(out, "{}", o.status.message())?;
    writeln!(out, "factors: i = {}  j = {}  k = {}", o.factors.i, o.factors.j, o.factors.k)?;
    for (name, ids) in [("T_i", &o.t_i), ("T_j", &o.t_j), ("T_k", &o.t_k)] {
        writeln!(out, "|{name}| = {}  {}", ids.len(), edge_list(ids))?;
    }
    writeln!(
        out,
        "passes: i = {}  j = {}  k = {}",
        o.iterations.i, o.iterations.j, o.iterations.k
    )?;
    if let Some(f) = &o.failure {
        writeln!(
            out,
            "state {} reaches at most {:.10} (j = {:e}), below the bound {}",
            f.state, f.probability, f.factor, req.bound
        )?;
    }
    writeln!(out, "{:>6}  {:<14}  {:>14}  {:>14}", "state", "class", "before", "after")?;
    for s in 0..o.before.len() {
        writeln!(
            out,
            "{s:>6}  {:<14}  {:>14.10}  {:>14.10}",
            o.partition.class(s).name(),
            o.before[s],
            o.after[s]
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PartitionReport {
    classes: Vec<StateClass>,
    counts: BTreeMap<&'static str, usize>,
}

pub fn partition_json<W: Write>(out: W, p: &Partition) -> io::Result<()> {
    json_line(
        out,
        &PartitionReport {
            classes: p.classes().to_vec(),
            counts: StateClass::ALL.iter().map(|&c| (c.name(), p.count(c))).collect(),
        },
    )
}

pub fn partition_text<W: Write>(mut out: W, p: &Partition) -> io::Result<()> {
    for (s, c) in p.classes().iter().enumerate() {
        writeln!(out, "{s:>6}  {}", c.name())?;
    }
    for c in StateClass::ALL {
        let members: Vec<String> = p.members(c).iter().map(|s| s.to_string()).collect();
        let listing = if members.is_empty() { "(empty)".to_string() } else { members.join(" ") };
        writeln!(out, "{:<14} {:>4}  {listing}", c.name(), p.count(c))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    state: usize,
    #[serde(flatten)]
    estimate: &'a SimEstimate,
}

pub fn simulate_json<W: Write>(out: W, state: usize, est: &SimEstimate) -> io::Result<()> {
    json_line(out, &SimulateReport { state, estimate: est })
}

pub fn simulate_text<W: Write>(mut out: W, state: usize, est: &SimEstimate) -> io::Result<()> {
    writeln!(
        out,
        "state {state}: {:.6} ± {:.6} ({} of {} paths succeeded)",
        est.estimate, est.std_error, est.successes, est.paths
    )?;
    if est.truncated > 0 {
        writeln!(out, "warning: {} paths hit the jump limit", est.truncated)?;
    }
    Ok(())
}
