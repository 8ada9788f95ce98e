use std::fs;
use std::io::{self, Write};

use anyhow::{bail, Context, Result};
use smc_repair::analysis::untimed_until_prob;
use smc_repair::csl::{self, UntilRequirement};
use smc_repair::model::{parse_model, write_model, ParseOptions};
use smc_repair::oracle::{simulate_until, Horizon, SimConfig};
use smc_repair::repair::{self as algo, BsmConfig, RepairConfig, RepairStatus};
use smc_repair::sweep::{self as curves, Grid, SweepSpec};
use smc_repair::{Factors, Partition, Smc};

use crate::report;
use crate::{Common, RepairArgs, SimulateArgs, SweepArgs};

pub struct Loaded {
    pub smc: Smc,
    pub req: UntilRequirement,
}

fn read_formula(common: &Common) -> Result<String> {
    if let Some(text) = &common.formula {
        return Ok(text.clone());
    }
    let path = common.formula_file.as_ref().expect("clap enforces one of the two");
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    match lines.as_slice() {
        [line] => Ok(line.to_string()),
        [] => bail!("{}: no requirement found", path.display()),
        _ => bail!("{}: expected a single-line requirement, found {} lines", path.display(), lines.len()),
    }
}

fn load(common: &Common) -> Result<Loaded> {
    let text = fs::read_to_string(&common.model)
        .with_context(|| format!("reading {}", common.model.display()))?;
    let smc = parse_model(
        &text,
        ParseOptions {
            merge_duplicates: common.merge_duplicates,
        },
    )
    .with_context(|| format!("{}", common.model.display()))?;
    let formula = read_formula(common)?;
    let req = csl::parse(&formula).with_context(|| format!("requirement {formula:?}"))?;
    let unknown = req.unknown_atoms(&smc);
    if !unknown.is_empty() {
        let list = unknown.into_iter().collect::<Vec<_>>().join(", ");
        if common.strict_atoms {
            bail!("atoms not used by any state: {list}");
        }
        eprintln!("warning: atoms not used by any state (false everywhere): {list}");
    }
    Ok(Loaded { smc, req })
}

fn classes(loaded: &Loaded) -> Result<Partition> {
    let (phi, psi) = loaded.req.state_sets(&loaded.smc);
    let untimed = untimed_until_prob(&loaded.smc, &phi, &psi)?;
    Ok(smc_repair::partition::partition(&loaded.smc, &phi, &psi, &untimed)?)
}

pub fn check(common: &Common) -> Result<u8> {
    let loaded = load(common)?;
    let verdicts = csl::check(&loaded.smc, &loaded.req, common.trunc_error)?;
    let partition = classes(&loaded)?;
    let out = io::stdout().lock();
    if common.json {
        report::check_json(out, &loaded.req, &verdicts, &partition)?;
    } else {
        report::check_text(out, &loaded.req, &verdicts, &partition)?;
    }
    Ok(if verdicts.iter().all(|v| v.sat) { 0 } else { 1 })
}

pub fn repair(args: &RepairArgs) -> Result<u8> {
    let loaded = load(&args.common)?;
    let cfg = RepairConfig {
        bsm: BsmConfig::new(args.epsilon, 64)?,
        delta: args.common.trunc_error,
        max_passes: None,
    };
    let outcome = algo::repair(&loaded.smc, &loaded.req, &cfg)?;
    if let Some(path) = &args.emit_model {
        fs::write(path, write_model(&outcome.model))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let out = io::stdout().lock();
    if args.common.json {
        report::repair_json(out, &loaded.req, &outcome)?;
    } else {
        report::repair_text(out, &loaded.req, &outcome)?;
    }
    Ok(match outcome.status {
        RepairStatus::Failed => 3,
        _ => 0,
    })
}

pub fn sweep(args: &SweepArgs) -> Result<u8> {
    let loaded = load(&args.common)?;
    let grid = match &args.points {
        Some(points) => Grid::Explicit(points.clone()),
        None => Grid::Uniform {
            start: args.start,
            stop: args.stop,
            steps: args.steps,
        },
    };
    let spec = SweepSpec {
        factor: args.factor,
        grid,
        fixed: Factors {
            i: args.fix_i,
            j: args.fix_j,
            k: args.fix_k,
        },
    };
    let rows = curves::sweep(&loaded.smc, &loaded.req, &spec, args.common.trunc_error)?;
    match &args.csv {
        Some(path) => {
            let mut buf = Vec::new();
            curves::write_csv(&rows, &mut buf)?;
            fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            let mut out = io::stdout().lock();
            curves::write_csv(&rows, &mut out)?;
            out.flush()?;
        }
    }
    Ok(0)
}

pub fn partition(common: &Common) -> Result<u8> {
    let loaded = load(common)?;
    let partition = classes(&loaded)?;
    let out = io::stdout().lock();
    if common.json {
        report::partition_json(out, &partition)?;
    } else {
        report::partition_text(out, &partition)?;
    }
    Ok(0)
}

pub fn simulate(args: &SimulateArgs) -> Result<u8> {
    let loaded = load(&args.common)?;
    let (phi, psi) = loaded.req.state_sets(&loaded.smc);
    let horizon = if args.untimed {
        Horizon::Unbounded
    } else {
        Horizon::Bounded(loaded.req.time_bound)
    };
    let cfg = SimConfig {
        num_paths: args.paths,
        seed: args.seed,
        ..SimConfig::default()
    };
    let est = simulate_until(&loaded.smc, args.state, &phi, &psi, horizon, &cfg)?;
    let out = io::stdout().lock();
    if args.common.json {
        report::simulate_json(out, args.state, &est)?;
    } else {
        report::simulate_text(out, args.state, &est)?;
    }
    Ok(0)
}
