use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use framelet_core::analysis::classify_series;
use framelet_core::{generate_graph, GraphSpec, SchemeKind};
use framelet_lab::io::{parse_signal, parse_trace, read_text, write_text};
use framelet_lab::SweepParameter;
use framelet_lab::{
    energy_report, format_sweep, run_config, run_sweep, Experiment, ExperimentConfig, LabError,
    Result,
};

#[derive(Parser)]
#[command(
    name = "framelet-lab",
    version,
    about = "Run and classify framelet graph dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the graph and initial-signal seeds.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the config's graph as an edge list.
    Gen {
        /// Experiment config or bare graph spec (JSON).
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run one experiment, writing the trace CSV and summary JSON.
    Run(Common),
    /// Classify one run per grid value.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// One of lambda_w, theta, epsilon. Defaults to the config's sweep block.
        #[arg(long)]
        param: Option<SweepParameter>,
        /// Comma-separated grid values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid: Option<Vec<f64>>,
        /// Worker threads; all cores when omitted.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Evaluate every applicable energy of a signal file.
    Energy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        signal: PathBuf,
    },
    /// Re-classify an existing trace CSV.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trace: PathBuf,
        /// Overrides run.tol.
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.override_seed(seed);
    }
    if matches!(
        cfg.scheme.kind,
        SchemeKind::EeUfg | SchemeKind::PerturbedClosedForm
    ) && cfg.epsilon <= 0.0
    {
        eprintln!("warning: epsilon = {} is not positive", cfg.epsilon);
    }
    Ok(cfg)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut json = serde_json::to_string_pretty(value).expect("report serializes");
    json.push('\n');
    write_text(path, &json)
}

fn graph_spec(path: &Path, seed: Option<u64>) -> Result<GraphSpec> {
    let text = read_text(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| LabError::config(e.to_string()))?;
    let mut spec = if value.get("graph").is_some() {
        let mut cfg = ExperimentConfig::from_json(&text)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        cfg.graph
    } else {
        let mut spec: GraphSpec =
            serde_json::from_value(value).map_err(|e| LabError::config(e.to_string()))?;
        if let Some(p) = spec.path.as_mut().filter(|p| p.is_relative()) {
            *p = path.parent().unwrap_or(Path::new(".")).join(&*p);
        }
        spec
    };
    if let Some(seed) = seed {
        spec = spec.with_seed(seed);
    }
    Ok(spec)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { config, out, seed } => {
            let graph = generate_graph(&graph_spec(&config, seed)?)?;
            write_text(&out.join("graph.txt"), &graph.to_edge_list())
        }
        Command::Run(common) => {
            let cfg = load(&common)?;
            let outcome = run_config(&cfg, &common.out)?;
            match outcome.verdict {
                Some(v) => println!("{} E_norm={} steps={}", v.class, v.limit_value, v.steps),
                None => println!("steps={}", outcome.summary.steps),
            }
            Ok(())
        }
        Command::Sweep {
            common,
            param,
            grid,
            jobs,
        } => {
            let cfg = load(&common)?;
            let block = cfg.sweep.clone();
            let param = param
                .or(block.as_ref().map(|s| s.parameter))
                .ok_or_else(|| LabError::config("no sweep parameter given"))?;
            let grid = grid
                .or(block.map(|s| s.grid))
                .ok_or_else(|| LabError::config("no sweep grid given"))?;
            let rows = run_sweep(&cfg, param, &grid, jobs)?;
            write_text(&common.out.join("sweep.csv"), &format_sweep(&rows))
        }
        Command::Energy { common, signal } => {
            let exp = Experiment::build(&load(&common)?)?;
            let h = parse_signal(&read_text(&signal)?)?;
            write_json(&common.out.join("energy.json"), &energy_report(&exp, &h)?)
        }
        Command::Classify { common, trace, tol } => {
            let cfg = load(&common)?;
            let exp = Experiment::build(&cfg)?;
            let records = parse_trace(&read_text(&trace)?)?;
            let series: Vec<f64> = records.iter().map(|r| r.dirichlet_normalized).collect();
            let tol = tol.unwrap_or(cfg.run.tol);
            if tol.is_nan() || tol <= 0.0 {
                return Err(LabError::config("tol must be positive"));
            }
            let mut verdict = classify_series(
                &series,
                cfg.run.plateau_window,
                cfg.run.plateau_tol,
                exp.system.spectrum(),
                tol,
            );
            if let Some(p) = exp.prediction()? {
                verdict = verdict.with_prediction(&p);
            }
            write_json(&common.out.join("classify.json"), &verdict)?;
            println!("{}", verdict.class);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
