//! Parameter sweeps: one classified run per grid value, run in parallel.

use std::fmt::Write as _;

use framelet_core::{DominanceClass, SchemeKind};
use rayon::prelude::*;

use crate::config::{check_grid, ExperimentConfig, SweepParameter, ThetaValue, WeightsConfig};
use crate::error::{LabError, Result};
use crate::experiment::Experiment;
use crate::io::format_float;

pub const SWEEP_HEADER: &str = "value,predicted,measured,limit_value,steps_to_plateau,degenerate";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub predicted: Option<DominanceClass>,
    pub degenerate: bool,
    pub measured: DominanceClass,
    pub limit_value: f64,
    pub steps_to_plateau: Option<usize>,
}

/// Returns `base` with `parameter` set to `value`.
pub fn apply_parameter(
    base: &ExperimentConfig,
    parameter: SweepParameter,
    value: f64,
) -> Result<ExperimentConfig> {
    let mut cfg = base.clone();
    match parameter {
        SweepParameter::LambdaW => match &mut cfg.weights {
            WeightsConfig::Scalar { lambda_w } => *lambda_w = value,
            _ => return Err(LabError::config("sweeping lambda_w needs scalar weights")),
        },
        SweepParameter::Theta => {
            if cfg.scheme.kind != SchemeKind::SpectralFramelet {
                return Err(LabError::config(
                    "sweeping theta needs the spectral_framelet scheme",
                ));
            }
            let theta = cfg.theta.get_or_insert_with(Default::default);
            theta.retain(|k, _| k == "low");
            theta.insert("high".into(), ThetaValue::Constant(value));
        }
        SweepParameter::Epsilon => {
            if !matches!(
                cfg.scheme.kind,
                SchemeKind::EeUfg | SchemeKind::PerturbedClosedForm
            ) {
                return Err(LabError::config(
                    "sweeping epsilon needs the ee_ufg or perturbed_closed_form scheme",
                ));
            }
            cfg.epsilon = value;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_point(base: &ExperimentConfig, parameter: SweepParameter, value: f64) -> Result<SweepRow> {
    let exp = Experiment::build(&apply_parameter(base, parameter, value)?)?;
    let prediction = exp.prediction()?;
    let outcome = exp.run()?;
    let verdict = outcome.verdict.expect("sweeps only run renormalized flows");
    Ok(SweepRow {
        value,
        predicted: prediction.map(|p| p.class),
        degenerate: prediction.is_some_and(|p| p.is_degenerate()),
        measured: verdict.class,
        limit_value: verdict.limit_value,
        steps_to_plateau: verdict.steps_to_plateau,
    })
}

/// Runs every grid point on a pool of `jobs` threads (all cores when
/// `None`). Rows come back in grid order whatever the thread count.
pub fn run_sweep(
    base: &ExperimentConfig,
    parameter: SweepParameter,
    grid: &[f64],
    jobs: Option<usize>,
) -> Result<Vec<SweepRow>> {
    check_grid(grid)?;
    if !base.run.renormalize {
        return Err(LabError::config(
            "sweeps classify every run and need run.renormalize = true",
        ));
    }
    // Surface configuration errors before spawning work.
    apply_parameter(base, parameter, grid[0])?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| LabError::config(format!("thread pool: {e}")))?;
    pool.install(|| {
        grid.par_iter()
            .map(|&v| run_point(base, parameter, v))
            .collect()
    })
}

pub fn format_sweep(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_float(r.value),
            r.predicted.map_or("", |c| c.as_str()),
            r.measured,
            format_float(r.limit_value),
            r.steps_to_plateau
                .map(|s| s.to_string())
                .unwrap_or_default(),
            r.degenerate
        );
    }
    out
}
