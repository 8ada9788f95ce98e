//! Probability curves over one reduction factor, for plotting.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{timed_until_prob, AnalysisError, Qualitative};
use crate::csl::UntilRequirement;
use crate::model::ModelError;
use crate::partition::{build_reduced, FactorName, Factors, Partition};
use crate::Smc;

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    /// `steps` equidistant points from `start` to `stop` inclusive.
    Uniform { start: f64, stop: f64, steps: usize },
    Explicit(Vec<f64>),
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub factor: FactorName,
    pub grid: Grid,
    /// Values of the two factors not being swept; the swept one is ignored.
    pub fixed: Factors,
}

impl SweepSpec {
    pub fn points(&self) -> Result<Vec<f64>, SweepError> {
        let points = match &self.grid {
            Grid::Uniform { start, stop, steps } => {
                if *steps < 2 {
                    return Err(SweepError::InvalidSpec(format!("steps must be >= 2, got {steps}")));
                }
                let width = (stop - start) / (*steps - 1) as f64;
                (0..*steps)
                    .map(|n| if n + 1 == *steps { *stop } else { start + width * n as f64 })
                    .collect()
            }
            Grid::Explicit(points) => points.clone(),
        };
        if points.is_empty() {
            return Err(SweepError::InvalidSpec("empty grid".into()));
        }
        if let Some(bad) = points.iter().find(|&&x| !(x > 0.0 && x <= 1.0)) {
            return Err(SweepError::InvalidSpec(format!("grid point {bad} outside (0, 1]")));
        }
        self.fixed.with(self.factor, 1.0).validate()?;
        Ok(points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub factor: f64,
    pub state: usize,
    pub probability: f64,
}

/// Evaluates the tracked states (the scope class of the swept factor) at
/// every grid point. Rows are ordered by grid point, then state index.
pub fn sweep(
    smc: &Smc,
    req: &UntilRequirement,
    spec: &SweepSpec,
    delta: f64,
) -> Result<Vec<SweepRow>, SweepError> {
    let points = spec.points()?;
    let (phi, psi) = req.state_sets(smc);
    let partition = Partition::from_qualitative(&phi, &psi, &Qualitative::compute(smc, &phi, &psi));
    let tracked: Vec<usize> = partition.members(spec.factor.scope()).iter().collect();
    let reduced = build_reduced(smc, &partition);

    let per_point: Vec<Vec<SweepRow>> = points
        .par_iter()
        .map(|&x| -> Result<Vec<SweepRow>, SweepError> {
            let model = reduced.instantiate(spec.fixed.with(spec.factor, x))?;
            let probs = timed_until_prob(&model, &phi, &psi, req.time_bound, delta)?;
            Ok(tracked
                .iter()
                .map(|&s| SweepRow {
                    factor: x,
                    state: s,
                    probability: probs[s],
                })
                .collect())
        })
        .collect::<Result<_, _>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

/// `%.9g`-style rendering: nine significant digits, trailing zeros trimmed.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{exp}")
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "factor,state,probability")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{}",
            format_sig9(r.factor),
            r.state,
            format_sig9(r.probability)
        )?;
    }
    Ok(())
}
