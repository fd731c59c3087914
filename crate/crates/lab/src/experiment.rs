//! Turns a validated config into operators, weights and an initial signal,
//! runs it, and writes the trace and summary.

use std::collections::BTreeMap;
use std::path::Path;

use framelet_core::analysis::{classify_dominance, dominant_frequency, DominantFrequency};
use framelet_core::energies::WeightConfig;
use framelet_core::{
    eigh, generate_graph, run_flow, AmplificationModel, BandIndex, DominanceVerdict, FlowTrace,
    FrameletSystem, Graph, GraphOperators, Scheme, SchemeKind, StopRule,
};
use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::config::{ExperimentConfig, InitConfig, Matrix, ThetaValue, WeightsConfig};
use crate::error::{LabError, Result};
use crate::io::{format_trace, parse_signal, read_text, write_text};

/// Everything a run needs, materialized from an [`ExperimentConfig`].
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub graph: Graph,
    pub ops: GraphOperators,
    pub system: FrameletSystem,
    pub weights: WeightConfig,
    pub scheme: Scheme,
    pub h0: Array2<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FinalEnergies {
    pub norm: f64,
    pub dirichlet: f64,
    pub dirichlet_normalized: f64,
    pub total_energy: f64,
}

/// Which family of dynamics a run exercises, plus the spectral prediction
/// when the weights belong to a scalar family.
#[derive(Debug, Clone, Serialize)]
pub struct Regime {
    pub name: &'static str,
    pub description: &'static str,
    pub prediction: Option<DominantFrequency>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub verdict: Option<DominanceVerdict>,
    pub rho_l: f64,
    pub top_multiplicity: usize,
    pub steps: usize,
    pub plateaued: bool,
    pub final_energies: FinalEnergies,
    pub regime: Regime,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: FlowTrace,
    pub verdict: Option<DominanceVerdict>,
    pub summary: Summary,
}

fn to_matrix(rows: &Matrix, what: &str) -> Result<Array2<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(LabError::config(format!(
            "{what} must be a non-empty rectangular matrix"
        )));
    }
    Ok(Array2::from_shape_fn((r, c), |(i, j)| rows[i][j]))
}

fn expect_channels(m: &Array2<f64>, c: usize, what: &str) -> Result<()> {
    if m.dim() != (c, c) {
        return Err(framelet_core::Error::DimensionMismatch(format!(
            "{what} is {:?}, the signal has {c} channels",
            m.dim()
        ))
        .into());
    }
    Ok(())
}

fn initial_signal(cfg: &ExperimentConfig, system: &FrameletSystem) -> Result<Array2<f64>> {
    let n = system.n();
    match &cfg.init {
        InitConfig::RandomNormal { seed, channels } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok(Array2::from_shape_simple_fn((n, *channels), || {
                StandardNormal.sample(&mut rng)
            }))
        }
        InitConfig::File { path } => {
            let h = parse_signal(&read_text(path)?)?;
            if h.nrows() != n {
                return Err(framelet_core::Error::DimensionMismatch(format!(
                    "signal has {} rows, graph has {n} nodes",
                    h.nrows()
                ))
                .into());
            }
            Ok(h)
        }
        InitConfig::Eigenvector { index } => {
            if *index >= n {
                return Err(framelet_core::Error::OutOfRange(format!(
                    "eigenvector index {index} with only {n} eigenvalues"
                ))
                .into());
            }
            Ok(system
                .spectrum()
                .vector(*index)
                .to_owned()
                .insert_axis(ndarray::Axis(1)))
        }
    }
}

fn build_weights(
    cfg: &ExperimentConfig,
    system: &FrameletSystem,
    c: usize,
) -> Result<WeightConfig> {
    let bands = system.index_set();
    let mut weights = match &cfg.weights {
        WeightsConfig::Scalar { lambda_w } => {
            let w = WeightConfig::scalar(&bands, c, *lambda_w);
            let eye: BTreeMap<_, _> = bands.iter().map(|&b| (b, Array2::eye(c))).collect();
            w.with_w_tilde(eye)
        }
        WeightsConfig::Shared { omega, w, w_tilde } => {
            let (omega, w) = (to_matrix(omega, "omega")?, to_matrix(w, "w")?);
            expect_channels(&omega, c, "omega")?;
            expect_channels(&w, c, "w")?;
            let mut out = WeightConfig::shared(&bands, omega, w);
            if let Some(wt) = w_tilde {
                let wt = to_matrix(wt, "w_tilde")?;
                expect_channels(&wt, c, "w_tilde")?;
                out = out.with_w_tilde(bands.iter().map(|&b| (b, wt.clone())).collect());
            }
            out
        }
        WeightsConfig::Full { bands: per_band } => {
            let mut omega = BTreeMap::new();
            let mut w = BTreeMap::new();
            let mut w_tilde = BTreeMap::new();
            for (key, bw) in per_band {
                let idx: BandIndex = key.parse()?;
                let (om, ww) = (to_matrix(&bw.omega, "omega")?, to_matrix(&bw.w, "w")?);
                expect_channels(&om, c, "omega")?;
                expect_channels(&ww, c, "w")?;
                omega.insert(idx, om);
                w.insert(idx, ww);
                if let Some(wt) = &bw.w_tilde {
                    let wt = to_matrix(wt, "w_tilde")?;
                    expect_channels(&wt, c, "w_tilde")?;
                    w_tilde.insert(idx, wt);
                }
            }
            let mut out = WeightConfig::shared(&[], Array2::eye(c), Array2::eye(c));
            out.omega = omega;
            out.w = w;
            if !w_tilde.is_empty() {
                out = out.with_w_tilde(w_tilde);
            }
            out
        }
    };
    weights.epsilon = cfg.epsilon;
    weights.beta = cfg.beta;
    weights.tau = cfg.tau();
    if let Some(theta) = &cfg.theta {
        weights.theta = expand_theta(theta, system)?;
    }
    weights.validate(system)?;
    Ok(weights)
}

/// Resolves explicit band keys first, then the `low`/`high` shorthands. The
/// low-pass filter defaults to 1.
fn expand_theta(
    theta: &BTreeMap<String, ThetaValue>,
    system: &FrameletSystem,
) -> Result<BTreeMap<BandIndex, Array1<f64>>> {
    let n = system.n();
    let mut explicit = BTreeMap::new();
    for (key, value) in theta {
        if key != "low" && key != "high" {
            explicit.insert(key.parse::<BandIndex>()?, value);
        }
    }
    let mut out = BTreeMap::new();
    for band in system.index_set() {
        let shorthand = if band.is_low_pass() { "low" } else { "high" };
        let value = explicit
            .get(&band)
            .copied()
            .or_else(|| theta.get(shorthand));
        let vector = match value {
            Some(ThetaValue::Constant(v)) => Array1::from_elem(n, *v),
            Some(ThetaValue::Vector(v)) if v.len() == n => Array1::from_vec(v.clone()),
            Some(ThetaValue::Vector(v)) => {
                return Err(framelet_core::Error::DimensionMismatch(format!(
                    "theta for {band} has length {}, graph has {n} nodes",
                    v.len()
                ))
                .into());
            }
            None if band.is_low_pass() => Array1::ones(n),
            None => {
                return Err(LabError::config(format!(
                    "theta has no value for band {band}"
                )))
            }
        };
        out.insert(band, vector);
    }
    Ok(out)
}

fn constant_theta(theta: &BTreeMap<String, ThetaValue>) -> Option<(f64, f64)> {
    let mut low = 1.0;
    let mut high = None;
    for (key, value) in theta {
        let ThetaValue::Constant(v) = value else {
            return None;
        };
        let is_low = match key.as_str() {
            "low" => true,
            "high" => false,
            k => k.parse::<BandIndex>().ok()?.is_low_pass(),
        };
        if is_low {
            low = *v;
        } else if high.is_some_and(|h| h != *v) {
            return None;
        } else {
            high = Some(*v);
        }
    }
    Some((low, high?))
}

impl Experiment {
    pub fn build(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let graph = generate_graph(&config.graph)?;
        let ops = GraphOperators::from_graph(&graph);
        let system = FrameletSystem::build(
            eigh(&ops.laplacian)?,
            config.framelet.scales,
            config.framelet.variant,
        )?;
        let h0 = initial_signal(config, &system)?;
        let weights = build_weights(config, &system, h0.ncols())?;
        let scheme = Scheme::new(
            config.scheme.kind,
            config.scheme.activation,
            config.run.renormalize,
        )?;
        Ok(Self {
            config: config.clone(),
            graph,
            ops,
            system,
            weights,
            scheme,
            h0,
        })
    }

    pub fn stop_rule(&self) -> StopRule {
        StopRule {
            max_steps: self.config.run.steps,
            plateau_window: self.config.run.plateau_window,
            plateau_tol: self.config.run.plateau_tol,
        }
    }

    /// The amplification model of the scalar weight family this run belongs
    /// to, if any.
    pub fn amplification_model(&self) -> Option<AmplificationModel> {
        let cfg = &self.config;
        match (cfg.scheme.kind, &cfg.weights) {
            (SchemeKind::SpatialFramelet, WeightsConfig::Scalar { lambda_w }) => {
                Some(AmplificationModel::Convolution {
                    lambda_w: *lambda_w,
                    epsilon: 0.0,
                })
            }
            (SchemeKind::EeUfg, WeightsConfig::Scalar { lambda_w }) => {
                Some(AmplificationModel::Convolution {
                    lambda_w: *lambda_w,
                    epsilon: cfg.epsilon,
                })
            }
            (SchemeKind::SpectralFramelet, _) => {
                let w = self.weights.shared_w().ok()?;
                let scale = w[[0, 0]];
                if (w - &(Array2::<f64>::eye(w.nrows()) * scale))
                    .iter()
                    .any(|&x| x != 0.0)
                {
                    return None;
                }
                match constant_theta(cfg.theta.as_ref()?)? {
                    (low, theta) if low == 1.0 && theta >= 0.0 => {
                        Some(AmplificationModel::Spectral { theta })
                    }
                    _ => None,
                }
            }
            _ => None,
        }
    }

    pub fn prediction(&self) -> Result<Option<DominantFrequency>> {
        self.amplification_model()
            .map(|model| {
                dominant_frequency(
                    self.system.spectrum(),
                    &model,
                    self.config.framelet.scales,
                    self.config.framelet.variant,
                )
            })
            .transpose()
            .map_err(Into::into)
    }

    pub fn regime(&self) -> Result<Regime> {
        let (name, description) = match (self.config.scheme.kind, &self.config.weights) {
            (SchemeKind::SpatialFramelet, WeightsConfig::Scalar { .. }) => (
                "scalar_weight_convolution",
                "spatial framelet convolution with identity low-pass and scalar high-pass weights; the dominant frequency maximizes the amplification factor",
            ),
            (SchemeKind::SpatialFramelet, WeightsConfig::Shared { .. }) => (
                "shared_weight_convolution",
                "spatial framelet convolution with one weight shared by every band; collapses to graph convolution on tight systems",
            ),
            (SchemeKind::SpatialFramelet, _) => (
                "framelet_convolution",
                "spatial framelet convolution, the unit-step gradient flow of the total framelet energy with identity omega",
            ),
            (SchemeKind::GradfUfg, _) if self.config.beta != 0.0 => (
                "gradient_flow_with_source",
                "explicit Euler steps of the total framelet energy with a source term anchored at the initial signal",
            ),
            (SchemeKind::GradfUfg, _) => ("gradient_flow", "explicit Euler steps of the total framelet energy"),
            (SchemeKind::EeUfg, _) => (
                "energy_enhanced_convolution",
                "band-shifted convolution, a unit gradient step of the total framelet energy with omega = I +/- epsilon W",
            ),
            (SchemeKind::SpectralFramelet, _) => (
                "spectral_convolution",
                "node-wise filtered framelet convolution; the dominant frequency maximizes the filter amplification",
            ),
            (SchemeKind::Activated, _) => (
                "activated_gradient_flow",
                "Euler steps along the activated negative gradient; the total framelet energy is non-increasing for small steps",
            ),
            (SchemeKind::PerturbedClosedForm, _) => (
                "perturbed_heat_flow",
                "exact flow of the perturbed framelet Dirichlet energy; always low-frequency dominant",
            ),
        };
        Ok(Regime {
            name,
            description,
            prediction: self.prediction()?,
        })
    }

    pub fn run(&self) -> Result<RunOutcome> {
        let trace = run_flow(
            &self.scheme,
            &self.system,
            &self.ops,
            &self.h0,
            &self.weights,
            &self.stop_rule(),
        )?;
        let prediction = self.prediction()?;
        let verdict = if trace.renormalized {
            let v = classify_dominance(&trace, self.system.spectrum(), self.config.run.tol)?;
            Some(match &prediction {
                Some(p) => v.with_prediction(p),
                None => v,
            })
        } else {
            None
        };
        let last = *trace.last().expect("trace has an initial row");
        let spectrum = self.system.spectrum();
        let summary = Summary {
            verdict,
            rho_l: spectrum.rho(),
            top_multiplicity: spectrum.top_multiplicity(),
            steps: trace.steps(),
            plateaued: trace.plateaued,
            final_energies: FinalEnergies {
                norm: last.norm,
                dirichlet: last.dirichlet_normalized * last.norm * last.norm,
                dirichlet_normalized: last.dirichlet_normalized,
                total_energy: last.total_energy,
            },
            regime: self.regime()?,
            config: self.config.clone(),
        };
        Ok(RunOutcome {
            trace,
            verdict,
            summary,
        })
    }
}

/// Builds and runs `config`, writing the trace CSV and summary JSON under
/// `out_dir`.
pub fn run_config(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    let outcome = Experiment::build(config)?.run()?;
    write_text(
        &out_dir.join(&config.output.csv),
        &format_trace(&outcome.trace.rows),
    )?;
    let mut json = serde_json::to_string_pretty(&outcome.summary).expect("summary serializes");
    json.push('\n');
    write_text(&out_dir.join(&config.output.summary), &json)?;
    Ok(outcome)
}
