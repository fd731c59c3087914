//! Frequency-dominance analysis.
//!
//! A renormalized run is low-frequency dominant (LFD) when its normalized
//! Dirichlet energy tends to `0` and high-frequency dominant (HFD) when it
//! tends to `ρ_L/2`. For scalar weight families the linear iterations act on
//! each eigen-component by a fixed amplification factor, so the dominant
//! frequency can also be predicted from the spectrum alone.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dynamics::FlowTrace;
use crate::energies::dirichlet_energy;
use crate::error::{Error, Result};
use crate::framelets::{check_lambda, haar_response, FilterVariant, Scales};
use crate::linalg::frobenius;
use crate::spectral::{Spectrum, EIGEN_TIE_TOL};

pub const DEFAULT_TOL: f64 = 1e-6;
/// Relative argmax margin below which a prediction is flagged degenerate.
pub const DEGENERATE_MARGIN: f64 = 0.01;
/// Relative spread of `|g|` over the spectrum below which it counts as flat.
const FLAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DominanceClass {
    #[serde(rename = "LFD")]
    Lfd,
    #[serde(rename = "HFD")]
    Hfd,
    #[serde(rename = "MIXED")]
    Mixed,
    #[serde(rename = "UNDECIDED")]
    Undecided,
}

impl DominanceClass {
    pub fn as_str(self) -> &'static str {
        match self {
            DominanceClass::Lfd => "LFD",
            DominanceClass::Hfd => "HFD",
            DominanceClass::Mixed => "MIXED",
            DominanceClass::Undecided => "UNDECIDED",
        }
    }
}

impl std::fmt::Display for DominanceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DominanceClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "LFD" => Ok(DominanceClass::Lfd),
            "HFD" => Ok(DominanceClass::Hfd),
            "MIXED" => Ok(DominanceClass::Mixed),
            "UNDECIDED" => Ok(DominanceClass::Undecided),
            other => Err(Error::InvalidSpec(format!(
                "unknown dominance class {other:?}"
            ))),
        }
    }
}

/// `E(H/‖H‖_F)`.
pub fn normalized_dirichlet(laplacian: &Array2<f64>, h: &Array2<f64>) -> Result<f64> {
    let norm = frobenius(h);
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(dirichlet_energy(laplacian, h)? / (norm * norm))
}

fn squared_split(lambda: f64, scales: Scales, variant: FilterVariant) -> Result<(f64, f64)> {
    let mut low = 0.0;
    let mut high = 0.0;
    for (band, v) in haar_response(lambda, scales, variant)? {
        if band.is_low_pass() {
            low += v * v;
        } else {
            high += v * v;
        }
    }
    Ok((low, high))
}

/// Growth factor of the spatial framelet convolution at frequency `λ` for
/// `W_{0,J} = I`, `W_{1,j} = λ^W I`: `(Λ₀² + λ^W Σ Λ_{1,j}²)(1 − λ)`.
pub fn amplification_spatial(
    lambda: f64,
    lambda_w: f64,
    scales: Scales,
    variant: FilterVariant,
) -> Result<f64> {
    amplification_perturbed(lambda, lambda_w, 0.0, scales, variant)
}

/// Growth factor of the energy-enhanced convolution with the same scalar
/// weights: `Λ₀²(1 − λ − ε) + λ^W Σ Λ_{1,j}² (1 − λ + ε)`.
pub fn amplification_perturbed(
    lambda: f64,
    lambda_w: f64,
    epsilon: f64,
    scales: Scales,
    variant: FilterVariant,
) -> Result<f64> {
    let (low, high) = squared_split(lambda, scales, variant)?;
    Ok(low * (1.0 - lambda - epsilon) + lambda_w * high * (1.0 - lambda + epsilon))
}

/// Growth factor of the spectral convolution with unit low-pass filter and
/// high-pass filters `θ`: `Λ₀² + θ Σ Λ_{1,j}²`.
pub fn amplification_spectral(
    lambda: f64,
    theta: f64,
    scales: Scales,
    variant: FilterVariant,
) -> Result<f64> {
    if theta.is_nan() || theta < 0.0 {
        return Err(Error::OutOfRange(format!(
            "theta {theta} must be non-negative"
        )));
    }
    check_lambda(lambda)?;
    let (low, high) = squared_split(lambda, scales, variant)?;
    Ok(low + theta * high)
}

/// Scalar weight families with a closed-form amplification factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplificationModel {
    /// Spatial convolution (`ε = 0`) or its energy-enhanced variant.
    Convolution { lambda_w: f64, epsilon: f64 },
    /// Spectral convolution.
    Spectral { theta: f64 },
}

impl AmplificationModel {
    pub fn factor(&self, lambda: f64, scales: Scales, variant: FilterVariant) -> Result<f64> {
        match *self {
            AmplificationModel::Convolution { lambda_w, epsilon } => {
                amplification_perturbed(lambda, lambda_w, epsilon, scales, variant)
            }
            AmplificationModel::Spectral { theta } => {
                amplification_spectral(lambda, theta, scales, variant)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominantFrequency {
    /// Eigenvalue at which `|g|` is largest.
    pub lambda: f64,
    pub amplification: f64,
    pub class: DominanceClass,
    /// `(|g(λ*)| − max_{λ ≠ λ*} |g(λ)|) / |g(λ*)|`, over eigenvalues not tied with `λ*`.
    pub margin: f64,
    /// `|g|` is constant over the spectrum.
    pub flat: bool,
}

impl DominantFrequency {
    /// A prediction too close to a tie to be checked against simulation.
    pub fn is_degenerate(&self) -> bool {
        self.flat || self.margin < DEGENERATE_MARGIN
    }
}

/// Evaluates `|g(λ_i)|` over the spectrum and names the dominant frequency.
/// Ties and interior maxima are reported as MIXED.
pub fn dominant_frequency(
    spectrum: &Spectrum,
    model: &AmplificationModel,
    scales: Scales,
    variant: FilterVariant,
) -> Result<DominantFrequency> {
    let values = spectrum.values();
    let mags = values
        .iter()
        .map(|&l| model.factor(l, scales, variant).map(f64::abs))
        .collect::<Result<Vec<_>>>()?;

    let best = (0..mags.len()).fold(0, |b, i| if mags[i] > mags[b] { i } else { b });
    let (lambda, top) = (values[best], mags[best]);
    let runner_up = values
        .iter()
        .zip(&mags)
        .filter(|(&l, _)| (l - lambda).abs() > EIGEN_TIE_TOL)
        .map(|(_, &m)| m)
        .fold(f64::NEG_INFINITY, f64::max);
    let low = mags.iter().copied().fold(f64::INFINITY, f64::min);
    let flat = top - low <= FLAT_TOL * top.max(1.0);
    let margin = if runner_up.is_finite() && top > 0.0 {
        (top - runner_up) / top
    } else {
        1.0
    };

    let tied = runner_up.is_finite() && top - runner_up <= FLAT_TOL * top.max(1.0);
    let class = if flat || tied {
        DominanceClass::Mixed
    } else if lambda.abs() <= EIGEN_TIE_TOL {
        DominanceClass::Lfd
    } else if (lambda - spectrum.rho()).abs() <= EIGEN_TIE_TOL {
        DominanceClass::Hfd
    } else {
        DominanceClass::Mixed
    };
    Ok(DominantFrequency {
        lambda,
        amplification: model.factor(lambda, scales, variant)?,
        class,
        margin,
        flat,
    })
}

/// Projection of every column onto the eigenspace of `ρ_L`.
pub fn hfd_projection(spectrum: &Spectrum, h: &Array2<f64>) -> Result<Array2<f64>> {
    spectrum.eigenspace_projection(spectrum.rho(), h)
}

/// Projection of every column onto `ker L̂`.
pub fn kernel_projection(spectrum: &Spectrum, h: &Array2<f64>) -> Result<Array2<f64>> {
    spectrum.eigenspace_projection(0.0, h)
}

/// `‖P H‖_F / ‖H‖_F` for an orthogonal projection `P`, i.e. the cosine
/// between `H` and its projection.
pub fn projection_cosine(projected: &Array2<f64>, h: &Array2<f64>) -> Result<f64> {
    let norm = frobenius(h);
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(frobenius(projected) / norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominanceVerdict {
    pub class: DominanceClass,
    /// Final `E(H/‖H‖)`.
    pub limit_value: f64,
    pub target_low: f64,
    pub target_high: f64,
    pub dominant_lambda: Option<f64>,
    /// `‖H − P_ρH‖/‖H‖` for the final state, or an upper bound on it when
    /// only the energy series is available.
    pub residual: Option<f64>,
    pub top_multiplicity: usize,
    pub steps: usize,
    pub steps_to_plateau: Option<usize>,
}

impl DominanceVerdict {
    pub fn with_prediction(mut self, prediction: &DominantFrequency) -> Self {
        self.dominant_lambda = Some(prediction.lambda);
        self
    }
}

/// Classifies a renormalized trace from its final normalized energy and
/// final state.
pub fn classify_dominance(
    trace: &FlowTrace,
    spectrum: &Spectrum,
    tol: f64,
) -> Result<DominanceVerdict> {
    if !trace.renormalized {
        return Err(Error::TraceNotNormalized);
    }
    let residual = if trace.final_state.iter().any(|&x| x != 0.0) {
        let proj = hfd_projection(spectrum, &trace.final_state)?;
        Some(frobenius(&(&trace.final_state - &proj)) / frobenius(&trace.final_state))
    } else {
        None
    };
    let series: Vec<f64> = trace.rows.iter().map(|r| r.dirichlet_normalized).collect();
    Ok(verdict(
        &series,
        trace.plateaued,
        trace.steps_to_plateau,
        residual,
        spectrum,
        tol,
    ))
}

/// Classifies from the normalized-energy series alone, as read back from a
/// trace file. The top-eigenspace residual is bounded through the spectral
/// gap below `ρ_L`: `‖H − P_ρH‖² ≤ (ρ_L − 2E) / (ρ_L − λ_next)`.
pub fn classify_series(
    e_norm: &[f64],
    plateau_window: usize,
    plateau_tol: f64,
    spectrum: &Spectrum,
    tol: f64,
) -> DominanceVerdict {
    let mut plateau_at = None;
    let mut run = 0;
    for k in 1..e_norm.len() {
        if (e_norm[k] - e_norm[k - 1]).abs() < plateau_tol {
            run += 1;
        } else {
            run = 0;
        }
        if plateau_window > 0 && run >= plateau_window {
            plateau_at = Some(k);
            break;
        }
    }
    let rho = spectrum.rho();
    let next = spectrum
        .values()
        .iter()
        .copied()
        .filter(|&l| rho - l > EIGEN_TIE_TOL)
        .fold(f64::NEG_INFINITY, f64::max);
    let residual = e_norm.last().and_then(|&e| {
        (next.is_finite() && rho > next).then(|| ((rho - 2.0 * e).max(0.0) / (rho - next)).sqrt())
    });
    verdict(
        e_norm,
        plateau_at.is_some(),
        plateau_at,
        residual,
        spectrum,
        tol,
    )
}

fn verdict(
    series: &[f64],
    plateaued: bool,
    steps_to_plateau: Option<usize>,
    residual: Option<f64>,
    spectrum: &Spectrum,
    tol: f64,
) -> DominanceVerdict {
    let target_high = spectrum.rho() / 2.0;
    let limit_value = series.last().copied().unwrap_or(f64::NAN);
    let steps = series.len().saturating_sub(1);
    let class = if steps == 0 {
        DominanceClass::Undecided
    } else if limit_value.abs() <= tol {
        DominanceClass::Lfd
    } else if (limit_value - target_high).abs() <= tol && residual.is_some_and(|r| r <= tol.sqrt())
    {
        DominanceClass::Hfd
    } else if plateaued {
        DominanceClass::Mixed
    } else {
        DominanceClass::Undecided
    };
    DominanceVerdict {
        class,
        limit_value,
        target_low: 0.0,
        target_high,
        dominant_lambda: None,
        residual,
        top_multiplicity: spectrum.top_multiplicity(),
        steps,
        steps_to_plateau,
    }
}
