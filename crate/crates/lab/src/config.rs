//! Strict JSON experiment configuration.
//!
//! Unknown keys are rejected at every level. Band-keyed maps use `"r,j"`
//! keys such as `"0,2"` or `"1,1"`; theta maps additionally accept `"low"`
//! and `"high"` as shorthands for the low-pass band and every high-pass band.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use framelet_core::{Activation, BandIndex, FilterVariant, GraphSpec, Scales, SchemeKind};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub type Matrix = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    #[serde(default)]
    pub framelet: FrameletConfig,
    pub scheme: SchemeConfig,
    pub weights: WeightsConfig,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub beta: f64,
    /// Step size; defaults to 1 for the convolutions and 1e-2 otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<BTreeMap<String, ThetaValue>>,
    pub init: InitConfig,
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameletConfig {
    #[serde(default = "one_scale")]
    pub scales: Scales,
    #[serde(default)]
    pub variant: FilterVariant,
}

fn one_scale() -> Scales {
    Scales::ONE
}

impl Default for FrameletConfig {
    fn default() -> Self {
        Self {
            scales: Scales::ONE,
            variant: FilterVariant::Tight,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    #[serde(default)]
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightsConfig {
    /// `Ω = I`, `W_{0,J} = I`, `W_{1,j} = λ^W I`.
    Scalar { lambda_w: f64 },
    /// One `(Ω, W)` pair for every band.
    Shared {
        omega: Matrix,
        w: Matrix,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        w_tilde: Option<Matrix>,
    },
    /// Explicit matrices per band.
    Full {
        bands: BTreeMap<String, BandWeights>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandWeights {
    pub omega: Matrix,
    pub w: Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_tilde: Option<Matrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaValue {
    Constant(f64),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitConfig {
    /// i.i.d. standard normal entries, drawn row-major.
    RandomNormal {
        #[serde(default)]
        seed: u64,
        channels: usize,
    },
    File {
        path: PathBuf,
    },
    /// The `index`-th eigenvector of `L̂` (ascending order) as one channel.
    Eigenvector {
        index: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub steps: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_window")]
    pub plateau_window: usize,
    #[serde(default = "default_plateau_tol")]
    pub plateau_tol: f64,
    #[serde(default = "default_true")]
    pub renormalize: bool,
}

fn default_tol() -> f64 {
    framelet_core::analysis::DEFAULT_TOL
}

fn default_window() -> usize {
    framelet_core::dynamics::DEFAULT_PLATEAU_WINDOW
}

fn default_plateau_tol() -> f64 {
    framelet_core::dynamics::DEFAULT_PLATEAU_TOL
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_csv")]
    pub csv: PathBuf,
    #[serde(default = "default_summary")]
    pub summary: PathBuf,
}

fn default_csv() -> PathBuf {
    PathBuf::from("trace.csv")
}

fn default_summary() -> PathBuf {
    PathBuf::from("summary.json")
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            csv: default_csv(),
            summary: default_summary(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    LambdaW,
    Theta,
    Epsilon,
}

impl std::str::FromStr for SweepParameter {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda_w" => Ok(SweepParameter::LambdaW),
            "theta" => Ok(SweepParameter::Theta),
            "epsilon" => Ok(SweepParameter::Epsilon),
            other => Err(LabError::config(format!(
                "unknown sweep parameter {other:?}; expected lambda_w, theta or epsilon"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
}

impl ExperimentConfig {
    /// Parses and validates a config document.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| LabError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file and resolves its relative paths against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = crate::io::read_text(path)?;
        let mut cfg = Self::from_json(&text)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.graph.path.as_mut() {
            join(p);
        }
        if let InitConfig::File { path } = &mut self.init {
            join(path);
        }
    }

    /// Replaces the graph seed and the initial-signal seed.
    pub fn override_seed(&mut self, seed: u64) {
        self.graph.seed = seed;
        if let InitConfig::RandomNormal { seed: s, .. } = &mut self.init {
            *s = seed;
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau.unwrap_or(match self.scheme.kind {
            SchemeKind::SpatialFramelet | SchemeKind::EeUfg | SchemeKind::SpectralFramelet => 1.0,
            SchemeKind::GradfUfg | SchemeKind::Activated | SchemeKind::PerturbedClosedForm => 1e-2,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        if self.run.steps == 0 {
            return Err(LabError::config("run.steps must be at least 1"));
        }
        if self.run.tol.is_nan()
            || self.run.tol <= 0.0
            || self.run.plateau_tol.is_nan()
            || self.run.plateau_tol < 0.0
        {
            return Err(LabError::config(
                "run.tol must be positive and run.plateau_tol non-negative",
            ));
        }
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("beta", self.beta),
            ("tau", self.tau()),
        ] {
            if !v.is_finite() {
                return Err(LabError::config(format!("{name} must be finite")));
            }
        }
        if self.tau() < 0.0 {
            return Err(LabError::config("tau must be non-negative"));
        }
        if self.run.renormalize && !self.scheme.activation.is_positively_homogeneous() {
            return Err(framelet_core::Error::IllegalRenormalize.into());
        }
        framelet_core::Scheme::new(
            self.scheme.kind,
            self.scheme.activation,
            self.run.renormalize,
        )?;
        if let InitConfig::RandomNormal { channels: 0, .. } = self.init {
            return Err(LabError::config("init.channels must be at least 1"));
        }
        match &self.weights {
            WeightsConfig::Scalar { lambda_w } if !lambda_w.is_finite() => {
                return Err(LabError::config("lambda_w must be finite"));
            }
            WeightsConfig::Full { bands } => {
                for key in bands.keys() {
                    key.parse::<BandIndex>()?;
                }
            }
            _ => {}
        }
        if let Some(theta) = &self.theta {
            for key in theta.keys() {
                if key != "low" && key != "high" {
                    key.parse::<BandIndex>()?;
                }
            }
        }
        if self.scheme.kind == SchemeKind::SpectralFramelet && self.theta.is_none() {
            return Err(LabError::config("the spectral scheme needs a theta map"));
        }
        if let Some(sweep) = &self.sweep {
            check_grid(&sweep.grid)?;
        }
        Ok(())
    }
}

pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(LabError::config("sweep grid is empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(LabError::config("sweep grid values must be finite"));
    }
    Ok(())
}
