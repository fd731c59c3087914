//! Discrete framelet dynamics and the trace recorder that drives them.
//!
//! Every step works on the `n×c` state directly; no Kronecker products are
//! formed. [`run_flow`] applies one scheme repeatedly, optionally rescaling
//! the state to unit Frobenius norm after each step, and records one
//! [`TraceRow`] per step.

use std::time::Instant;

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::energies::{
    dirichlet_energy, perturbed_energy, perturbed_energy_gradient, spectral_energy,
    total_framelet_energy, total_framelet_energy_gradient, WeightConfig,
};
use crate::error::{Error, Result};
use crate::framelets::FrameletSystem;
use crate::graph::GraphOperators;
use crate::linalg::{ensure_rows, ensure_square_of, frobenius};

/// Norm above which an unnormalized run is aborted.
pub const OVERFLOW_LIMIT: f64 = 1e150;
pub const DEFAULT_PLATEAU_WINDOW: usize = 10;
pub const DEFAULT_PLATEAU_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    Identity,
    Relu,
    Tanh,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
        }
    }

    /// `σ(αx) = ασ(x)` for every `α > 0`.
    pub fn is_positively_homogeneous(self) -> bool {
        !matches!(self, Activation::Tanh)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    SpatialFramelet,
    GradfUfg,
    EeUfg,
    SpectralFramelet,
    Activated,
    PerturbedClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Scheme {
    kind: SchemeKind,
    activation: Activation,
    renormalize: bool,
}

impl Scheme {
    /// Only the activated scheme takes a non-identity activation, and
    /// renormalization requires a positively homogeneous one.
    pub fn new(kind: SchemeKind, activation: Activation, renormalize: bool) -> Result<Self> {
        if kind != SchemeKind::Activated && activation != Activation::Identity {
            return Err(Error::InvalidSpec(format!(
                "activation {activation:?} only applies to the activated scheme"
            )));
        }
        if renormalize && !activation.is_positively_homogeneous() {
            return Err(Error::IllegalRenormalize);
        }
        Ok(Self {
            kind,
            activation,
            renormalize,
        })
    }

    /// A scheme with identity activation.
    pub fn linear(kind: SchemeKind, renormalize: bool) -> Self {
        Self {
            kind,
            activation: Activation::Identity,
            renormalize,
        }
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn renormalize(&self) -> bool {
        self.renormalize
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "step size {tau} must be finite and non-negative"
        )));
    }
    Ok(())
}

fn check_state(
    sys: &FrameletSystem,
    ops_adjacency: &Array2<f64>,
    h: &Array2<f64>,
    cfg: &WeightConfig,
) -> Result<()> {
    cfg.validate(sys)?;
    ensure_rows(h, sys.n(), "state")?;
    ensure_square_of(ops_adjacency, sys.n(), "adjacency")?;
    if h.ncols() != cfg.channels() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} channels, weights expect {}",
            h.ncols(),
            cfg.channels()
        )));
    }
    Ok(())
}

/// `τ Σ 𝒲ᵀ Â 𝒲 H W_{r,j}`.
pub fn step_spatial_framelet(
    sys: &FrameletSystem,
    adjacency: &Array2<f64>,
    h: &Array2<f64>,
    cfg: &WeightConfig,
) -> Result<Array2<f64>> {
    check_state(sys, adjacency, h, cfg)?;
    check_tau(cfg.tau)?;
    let mut out = Array2::zeros(h.dim());
    for b in sys.bands() {
        let x = adjacency.dot(&b.transform.dot(h)).dot(&cfg.w[&b.index]);
        out += &b.transform.t().dot(&x);
    }
    out *= cfg.tau;
    Ok(out)
}

/// One explicit Euler step of the total framelet energy's gradient flow,
/// `H − τ ∇ℰ^tot(H)`, with the source anchored at `h0`.
pub fn step_gradf_ufg(
    sys: &FrameletSystem,
    adjacency: &Array2<f64>,
    h: &Array2<f64>,
    h0: Option<&Array2<f64>>,
    cfg: &WeightConfig,
) -> Result<Array2<f64>> {
    check_tau(cfg.tau)?;
    let grad = total_framelet_energy_gradient(sys, adjacency, h, h0, cfg)?;
    Ok(h - &(grad * cfg.tau))
}

/// `𝒲₀ᵀ(Â − εI)𝒲₀ H W₀ + Σ 𝒲ᵀ(Â + εI)𝒲 H W`. The step size is fixed at one.
pub fn step_ee_ufg(
    sys: &FrameletSystem,
    adjacency: &Array2<f64>,
    h: &Array2<f64>,
    cfg: &WeightConfig,
) -> Result<Array2<f64>> {
    check_state(sys, adjacency, h, cfg)?;
    let mut out = Array2::zeros(h.dim());
    for b in sys.bands() {
        let x = b.transform.dot(h);
        let shift = if b.index.is_low_pass() {
            -cfg.epsilon
        } else {
            cfg.epsilon
        };
        let y = (adjacency.dot(&x) + &(&x * shift)).dot(&cfg.w[&b.index]);
        out += &b.transform.t().dot(&y);
    }
    Ok(out)
}

/// The weights under which a unit gradient step reproduces [`step_ee_ufg`]:
/// `Ω_{0,J} = I + εW_{0,J}` and `Ω_{r,j} = I − εW_{r,j}`, no source.
pub fn energy_enhanced_weights(cfg: &WeightConfig) -> WeightConfig {
    let mut out = cfg.clone();
    for (band, omega) in out.omega.iter_mut() {
        let w = &cfg.w[band];
        let eye = Array2::<f64>::eye(w.nrows());
        *omega = if band.is_low_pass() {
            eye + &(w * cfg.epsilon)
        } else {
            eye - &(w * cfg.epsilon)
        };
    }
    out.beta = 0.0;
    out.tau = 1.0;
    out
}

/// `τ Σ 𝒲ᵀ diag(θ_{r,j}) 𝒲 H W` with a single shared `W`.
pub fn step_spectral_framelet(
    sys: &FrameletSystem,
    h: &Array2<f64>,
    cfg: &WeightConfig,
) -> Result<Array2<f64>> {
    ensure_rows(h, sys.n(), "state")?;
    check_tau(cfg.tau)?;
    cfg.validate_theta(sys)?;
    let w = cfg.shared_w()?;
    ensure_square_of(w, h.ncols(), "w")?;
    crate::linalg::ensure_symmetric(w)?;
    let mut out = Array2::zeros(h.dim());
    for b in sys.bands() {
        let x = b.transform.dot(h) * cfg.theta[&b.index].view().insert_axis(Axis(1));
        out += &b.transform.t().dot(&x.dot(w));
    }
    out *= cfg.tau;
    Ok(out)
}

/// `H + τ σ(−∇ℰ^tot(H))` with `σ` applied entrywise.
pub fn step_activated(
    sys: &FrameletSystem,
    adjacency: &Array2<f64>,
    h: &Array2<f64>,
    h0: Option<&Array2<f64>>,
    cfg: &WeightConfig,
    activation: Activation,
) -> Result<Array2<f64>> {
    check_tau(cfg.tau)?;
    let grad = total_framelet_energy_gradient(sys, adjacency, h, h0, cfg)?;
    Ok(h + &(grad.mapv(|g| activation.apply(-g)) * cfg.tau))
}

/// Per-eigenvalue decay rate of the perturbed flow: `λ Σ Λ² + ε (Λ₀² − Σ Λ_{1,j}²)`.
pub fn perturbed_rates(sys: &FrameletSystem, epsilon: f64) -> Array1<f64> {
    let lambdas = sys.spectrum().values();
    lambdas * &sys.squared_response_sum() + &(sys.gap_response() * epsilon)
}

/// Exact solution at time `t` of `Ḣ = −∇E^ε(H)`, `H(0) = h0`:
/// `Uᵀ diag(exp(−rate·t)) U h0`.
pub fn perturbed_closed_form(
    sys: &FrameletSystem,
    h0: &Array2<f64>,
    epsilon: f64,
    t: f64,
) -> Result<Array2<f64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "time {t} must be finite and non-negative"
        )));
    }
    if !epsilon.is_finite() {
        return Err(Error::OutOfRange("epsilon must be finite".into()));
    }
    if t == 0.0 {
        return Ok(h0.clone());
    }
    let decay = perturbed_rates(sys, epsilon).mapv(|r| (-r * t).exp());
    sys.spectrum().apply_response(&decay, h0)
}

/// One explicit Euler step of the perturbed flow, `H − τ ∇E^ε(H)`.
pub fn step_perturbed_euler(
    sys: &FrameletSystem,
    laplacian: &Array2<f64>,
    h: &Array2<f64>,
    epsilon: f64,
    tau: f64,
) -> Result<Array2<f64>> {
    check_tau(tau)?;
    Ok(h - &(perturbed_energy_gradient(sys, laplacian, h, epsilon)? * tau))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub max_steps: usize,
    /// Consecutive steps with `|ΔE_norm| < plateau_tol` that end the run.
    pub plateau_window: usize,
    pub plateau_tol: f64,
}

impl StopRule {
    pub fn steps(max_steps: usize) -> Self {
        Self {
            max_steps,
            plateau_window: DEFAULT_PLATEAU_WINDOW,
            plateau_tol: DEFAULT_PLATEAU_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    /// `‖H‖_F` before any rescaling.
    pub norm: f64,
    /// `E(H/‖H‖_F)`.
    pub dirichlet_normalized: f64,
    /// The scheme's governing energy at the recorded state.
    pub total_energy: f64,
    /// `2 E(H/‖H‖_F)`.
    pub rayleigh: f64,
    pub elapsed_secs: f64,
}

#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub rows: Vec<TraceRow>,
    pub final_state: Array2<f64>,
    pub renormalized: bool,
    pub plateaued: bool,
    pub steps_to_plateau: Option<usize>,
}

impl FlowTrace {
    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// Number of steps taken after the initial row.
    pub fn steps(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }
}

/// Runs `scheme` from `h0` until the stop rule fires.
///
/// Row 0 records the initial state. With renormalization on, the state is
/// divided by its norm before the first step and after every step; the row
/// records the norm reached before rescaling. The source term of the
/// gradient schemes stays anchored at the unscaled `h0`.
pub fn run_flow(
    scheme: &Scheme,
    sys: &FrameletSystem,
    ops: &GraphOperators,
    h0: &Array2<f64>,
    cfg: &WeightConfig,
    stop: &StopRule,
) -> Result<FlowTrace> {
    if stop.max_steps == 0 {
        return Err(Error::OutOfRange("a run needs at least one step".into()));
    }
    if scheme.renormalize && !scheme.activation.is_positively_homogeneous() {
        return Err(Error::IllegalRenormalize);
    }
    let start = Instant::now();
    let governing = Governing::new(scheme.kind, cfg);

    let row_for = |step: usize, h: &Array2<f64>| -> Result<TraceRow> {
        let norm = frobenius(h);
        if !norm.is_finite() || (!scheme.renormalize && norm > OVERFLOW_LIMIT) {
            return Err(Error::NumericOverflow {
                step,
                limit: OVERFLOW_LIMIT,
            });
        }
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        let e_norm = dirichlet_energy(&ops.laplacian, h)? / (norm * norm);
        Ok(TraceRow {
            step,
            norm,
            dirichlet_normalized: e_norm,
            total_energy: governing.energy(sys, ops, h, h0)?,
            rayleigh: 2.0 * e_norm,
            elapsed_secs: start.elapsed().as_secs_f64(),
        })
    };

    let first = row_for(0, h0)?;
    let mut state = if scheme.renormalize {
        h0 / first.norm
    } else {
        h0.clone()
    };
    let mut rows = vec![first];
    let (mut plateaued, mut steps_to_plateau, mut flat_run) = (false, None, 0usize);

    for step in 1..=stop.max_steps {
        let next = match scheme.kind {
            SchemeKind::SpatialFramelet => step_spatial_framelet(sys, &ops.adjacency, &state, cfg)?,
            SchemeKind::GradfUfg => step_gradf_ufg(sys, &ops.adjacency, &state, Some(h0), cfg)?,
            SchemeKind::EeUfg => step_ee_ufg(sys, &ops.adjacency, &state, cfg)?,
            SchemeKind::SpectralFramelet => step_spectral_framelet(sys, &state, cfg)?,
            SchemeKind::Activated => step_activated(
                sys,
                &ops.adjacency,
                &state,
                Some(h0),
                cfg,
                scheme.activation,
            )?,
            SchemeKind::PerturbedClosedForm => {
                perturbed_closed_form(sys, &state, cfg.epsilon, cfg.tau)?
            }
        };
        let row = row_for(step, &next)?;
        state = if scheme.renormalize {
            next / row.norm
        } else {
            next
        };

        let prev = rows[rows.len() - 1].dirichlet_normalized;
        if (row.dirichlet_normalized - prev).abs() < stop.plateau_tol {
            flat_run += 1;
        } else {
            flat_run = 0;
        }
        rows.push(row);
        if stop.plateau_window > 0 && flat_run >= stop.plateau_window {
            plateaued = true;
            steps_to_plateau = Some(step);
            break;
        }
    }

    Ok(FlowTrace {
        rows,
        final_state: state,
        renormalized: scheme.renormalize,
        plateaued,
        steps_to_plateau,
    })
}

/// The energy a scheme descends (or, for the convolutions, the energy
/// whose gradient step the convolution equals).
enum Governing {
    Framelet { cfg: WeightConfig, source: bool },
    Spectral(WeightConfig),
    Perturbed(f64),
}

impl Governing {
    fn new(kind: SchemeKind, cfg: &WeightConfig) -> Self {
        match kind {
            SchemeKind::SpatialFramelet => {
                let mut unit = cfg.clone();
                for omega in unit.omega.values_mut() {
                    *omega = Array2::eye(omega.nrows());
                }
                Governing::Framelet {
                    cfg: unit,
                    source: false,
                }
            }
            SchemeKind::EeUfg => Governing::Framelet {
                cfg: energy_enhanced_weights(cfg),
                source: false,
            },
            SchemeKind::GradfUfg | SchemeKind::Activated => Governing::Framelet {
                cfg: cfg.clone(),
                source: true,
            },
            SchemeKind::SpectralFramelet => Governing::Spectral(cfg.clone()),
            SchemeKind::PerturbedClosedForm => Governing::Perturbed(cfg.epsilon),
        }
    }

    fn energy(
        &self,
        sys: &FrameletSystem,
        ops: &GraphOperators,
        h: &Array2<f64>,
        h0: &Array2<f64>,
    ) -> Result<f64> {
        match self {
            Governing::Framelet { cfg, source } => {
                total_framelet_energy(sys, &ops.adjacency, h, source.then_some(h0), cfg)
            }
            Governing::Spectral(cfg) => spectral_energy(sys, h, cfg),
            Governing::Perturbed(eps) => perturbed_energy(sys, &ops.laplacian, h, *eps),
        }
    }
}
