//! Energy functionals over graph signals and their analytic gradients.
//!
//! All energies are evaluated in `n×c` matrix form. For a band `(r,j)` with
//! coefficients `X = 𝒲_{r,j} H` the generalized band energy is
//!
//! ```text
//! ℰ_{r,j}(H) = ½ tr(Xᵀ X Ω_{r,j}) − ½ tr(Xᵀ Â X W_{r,j})
//! ```
//!
//! and the total framelet energy sums it over the index set. An optional
//! source `H(0)` subtracts `β Σ tr(Xᵀ H(0) W̃_{r,j})`, which makes the
//! descent direction pull the state toward `𝒲ᵀ H(0) W̃`.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::framelets::{check_lambda, BandIndex, FrameletSystem};
use crate::graph::Graph;
use crate::linalg::{ensure_rows, ensure_square_of, ensure_symmetric, inner};
use crate::spectral::eigh;

/// Per-band weights and the scalar knobs shared by the energies and flows.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightConfig {
    pub omega: BTreeMap<BandIndex, Array2<f64>>,
    pub w: BTreeMap<BandIndex, Array2<f64>>,
    /// Source mixing matrices; need not be symmetric.
    pub w_tilde: Option<BTreeMap<BandIndex, Array2<f64>>>,
    pub epsilon: f64,
    pub beta: f64,
    /// Node-domain filter coefficients for the spectral convolution.
    pub theta: BTreeMap<BandIndex, Array1<f64>>,
    pub tau: f64,
}

impl WeightConfig {
    /// One `(Ω, W)` pair replicated over every band.
    pub fn shared(bands: &[BandIndex], omega: Array2<f64>, w: Array2<f64>) -> Self {
        Self {
            omega: bands.iter().map(|&b| (b, omega.clone())).collect(),
            w: bands.iter().map(|&b| (b, w.clone())).collect(),
            w_tilde: None,
            epsilon: 0.0,
            beta: 0.0,
            theta: BTreeMap::new(),
            tau: 1.0,
        }
    }

    /// `Ω = I`, `W_{0,J} = I` and `W_{1,j} = λ^W I` on every high pass.
    pub fn scalar(bands: &[BandIndex], channels: usize, lambda_w: f64) -> Self {
        let eye = Array2::<f64>::eye(channels);
        let mut cfg = Self::shared(bands, eye.clone(), eye.clone());
        for (band, w) in cfg.w.iter_mut() {
            if !band.is_low_pass() {
                *w = &eye * lambda_w;
            }
        }
        cfg
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_w_tilde(mut self, w_tilde: BTreeMap<BandIndex, Array2<f64>>) -> Self {
        self.w_tilde = Some(w_tilde);
        self
    }

    pub fn with_theta(mut self, theta: BTreeMap<BandIndex, Array1<f64>>) -> Self {
        self.theta = theta;
        self
    }

    /// Constant filter vectors: `low` on the low pass, `high` on every high pass.
    pub fn with_constant_theta(self, n: usize, low: f64, high: f64) -> Self {
        let theta = self
            .w
            .keys()
            .map(|&b| {
                (
                    b,
                    Array1::from_elem(n, if b.is_low_pass() { low } else { high }),
                )
            })
            .collect();
        self.with_theta(theta)
    }

    /// Channel count implied by the weights.
    pub fn channels(&self) -> usize {
        self.w.values().next().map_or(0, |w| w.nrows())
    }

    /// Checks `Ω`, `W` and `W̃` against the system's index set: exact key
    /// coverage, a common `c×c` shape and symmetry of `Ω` and `W`.
    pub fn validate(&self, sys: &FrameletSystem) -> Result<()> {
        let bands = sys.index_set();
        let c = self.channels();
        if c == 0 {
            return Err(Error::DimensionMismatch(
                "weights have zero channels".into(),
            ));
        }
        for (name, map) in [("omega", &self.omega), ("w", &self.w)] {
            if !map.keys().copied().eq(bands.iter().copied()) {
                return Err(Error::BandMismatch);
            }
            for m in map.values() {
                ensure_square_of(m, c, name)?;
                ensure_symmetric(m)?;
            }
        }
        if let Some(wt) = &self.w_tilde {
            if !wt.keys().copied().eq(bands.iter().copied()) {
                return Err(Error::BandMismatch);
            }
            for m in wt.values() {
                ensure_square_of(m, c, "w_tilde")?;
            }
        }
        if !self.epsilon.is_finite() || !self.beta.is_finite() || !self.tau.is_finite() {
            return Err(Error::OutOfRange(
                "epsilon, beta and tau must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn validate_theta(&self, sys: &FrameletSystem) -> Result<()> {
        if !self.theta.keys().copied().eq(sys.index_set()) {
            return Err(Error::BandMismatch);
        }
        for t in self.theta.values() {
            if t.len() != sys.n() {
                return Err(Error::DimensionMismatch(format!(
                    "theta has length {}, expected {}",
                    t.len(),
                    sys.n()
                )));
            }
        }
        Ok(())
    }

    /// The single `W` used by the spectral convolution; every band must agree.
    pub fn shared_w(&self) -> Result<&Array2<f64>> {
        let mut it = self.w.values();
        let first = it.next().ok_or(Error::BandMismatch)?;
        if it.any(|w| w != first) {
            return Err(Error::WeightsNotShared);
        }
        Ok(first)
    }

    fn omega(&self, b: BandIndex) -> &Array2<f64> {
        &self.omega[&b]
    }

    fn w(&self, b: BandIndex) -> &Array2<f64> {
        &self.w[&b]
    }

    fn source_active(&self) -> bool {
        self.beta != 0.0 && self.w_tilde.is_some()
    }
}

/// Split of one band's generalized energy into particle terms.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnergyBreakdown {
    pub external: f64,
    pub attraction: f64,
    pub repulsion: f64,
    pub total: f64,
}

/// Per-band Dirichlet energies and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct BandEnergies {
    pub bands: BTreeMap<BandIndex, f64>,
    pub total: f64,
}

fn check_signal(sys: &FrameletSystem, h: &Array2<f64>) -> Result<()> {
    ensure_rows(h, sys.n(), "signal")
}

fn check_channels(cfg: &WeightConfig, h: &Array2<f64>) -> Result<()> {
    if h.ncols() != cfg.channels() {
        return Err(Error::DimensionMismatch(format!(
            "signal has {} channels, weights expect {}",
            h.ncols(),
            cfg.channels()
        )));
    }
    Ok(())
}

fn check_operator(op: &Array2<f64>, n: usize, what: &str) -> Result<()> {
    ensure_square_of(op, n, what)
}

/// `E(H) = ½ tr(Hᵀ L̂ H)`.
pub fn dirichlet_energy(laplacian: &Array2<f64>, h: &Array2<f64>) -> Result<f64> {
    check_operator(laplacian, h.nrows(), "laplacian")?;
    Ok(0.5 * inner(h, &laplacian.dot(h)))
}

/// `∇E(H) = L̂ H`.
pub fn dirichlet_gradient(laplacian: &Array2<f64>, h: &Array2<f64>) -> Result<Array2<f64>> {
    check_operator(laplacian, h.nrows(), "laplacian")?;
    Ok(laplacian.dot(h))
}

/// `E_{r,j}(H) = ½ tr((𝒲H)ᵀ L̂ 𝒲H)` for every band. On tight systems the
/// band energies sum to `E(H)`.
pub fn framelet_dirichlet_energies(
    sys: &FrameletSystem,
    laplacian: &Array2<f64>,
    h: &Array2<f64>,
) -> Result<BandEnergies> {
    if !sys.is_tight() {
        return Err(Error::VariantNotTight);
    }
    check_signal(sys, h)?;
    check_operator(laplacian, sys.n(), "laplacian")?;
    let bands: BTreeMap<_, _> = sys
        .bands()
        .iter()
        .map(|b| {
            let x = b.transform.dot(h);
            (b.index, 0.5 * inner(&x, &laplacian.dot(&x)))
        })
        .collect();
    let total = bands.values().sum();
    Ok(BandEnergies { bands, total })
}

/// `ℰ(H) = ½ tr(HᵀHΩ) − ½ tr(HᵀÂHW)`.
pub fn generalized_energy(
    adjacency: &Array2<f64>,
    h: &Array2<f64>,
    omega: &Array2<f64>,
    w: &Array2<f64>,
) -> Result<f64> {
    check_operator(adjacency, h.nrows(), "adjacency")?;
    for m in [omega, w] {
        ensure_square_of(m, h.ncols(), "weight")?;
        ensure_symmetric(m)?;
    }
    Ok(0.5 * inner(h, &h.dot(omega)) - 0.5 * inner(h, &adjacency.dot(h).dot(w)))
}

/// `HΩ − ÂHW`.
pub fn generalized_energy_gradient(
    adjacency: &Array2<f64>,
    h: &Array2<f64>,
    omega: &Array2<f64>,
    w: &Array2<f64>,
) -> Result<Array2<f64>> {
    generalized_energy(adjacency, h, omega, w)?;
    Ok(h.dot(omega) - adjacency.dot(h).dot(w))
}

fn prepare(
    sys: &FrameletSystem,
    adjacency: &Array2<f64>,
    h: &Array2<f64>,
    cfg: &WeightConfig,
) -> Result<()> {
    cfg.validate(sys)?;
    check_signal(sys, h)?;
    check_channels(cfg, h)?;
    check_operator(adjacency, sys.n(), "adjacency")
}

fn check_source(sys: &FrameletSystem, h: &Array2<f64>, h0: &Array2<f64>) -> Result<()> {
    if h0.dim() != h.dim() {
        return Err(Error::DimensionMismatch(format!(
            "source {:?} does not match state {:?}",
            h0.dim(),
            h.dim()
        )));
    }
    check_signal(sys, h0)
}

/// Total framelet generalized energy `Σ ℰ_{r,j}(H)`, minus the source term
/// when `h0` is given and the config carries `β ≠ 0` and `W̃`.
pub fn total_framelet_energy(
    sys: &FrameletSystem,
    adjacency: &Array2<f64>,
    h: &Array2<f64>,
    h0: Option<&Array2<f64>>,
    cfg: &WeightConfig,
) -> Result<f64> {
    prepare(sys, adjacency, h, cfg)?;
    let mut total = 0.0;
    for b in sys.bands() {
        let x = b.transform.dot(h);
        total += 0.5 * inner(&x, &x.dot(cfg.omega(b.index)))
            - 0.5 * inner(&x, &adjacency.dot(&x).dot(cfg.w(b.index)));
    }
    if let Some(h0) = h0 {
        total -= source_energy_term(sys, h, h0, cfg)?;
    }
    Ok(total)
}

/// `Σ (𝒲ᵀ𝒲 H Ω − 𝒲ᵀÂ𝒲 H W) − β Σ 𝒲ᵀ H(0) W̃`.
pub fn total_framelet_energy_gradient(
    sys: &FrameletSystem,
    adjacency: &Array2<f64>,
    h: &Array2<f64>,
    h0: Option<&Array2<f64>>,
    cfg: &WeightConfig,
) -> Result<Array2<f64>> {
    prepare(sys, adjacency, h, cfg)?;
    let mut grad = Array2::zeros(h.dim());
    for b in sys.bands() {
        let x = b.transform.dot(h);
        let inner_term = x.dot(cfg.omega(b.index)) - adjacency.dot(&x).dot(cfg.w(b.index));
        grad += &b.transform.t().dot(&inner_term);
    }
    if let Some(h0) = h0 {
        grad -= &source_energy_gradient(sys, h, h0, cfg)?;
    }
    Ok(grad)
}

/// `β Σ tr((𝒲H)ᵀ H(0) W̃)`; zero when `β = 0` or no `W̃` is configured.
pub fn source_energy_term(
    sys: &FrameletSystem,
    h: &Array2<f64>,
    h0: &Array2<f64>,
    cfg: &WeightConfig,
) -> Result<f64> {
    check_source(sys, h, h0)?;
    let Some(wt) = cfg.w_tilde.as_ref().filter(|_| cfg.source_active()) else {
        return Ok(0.0);
    };
    let mut total = 0.0;
    for b in sys.bands() {
        let m = wt.get(&b.index).ok_or(Error::BandMismatch)?;
        ensure_square_of(m, h.ncols(), "w_tilde")?;
        total += inner(&b.transform.dot(h), &h0.dot(m));
    }
    Ok(cfg.beta * total)
}

/// Gradient of [`source_energy_term`]: `β Σ 𝒲ᵀ H(0) W̃`, constant in `H`.
pub fn source_energy_gradient(
    sys: &FrameletSystem,
    h: &Array2<f64>,
    h0: &Array2<f64>,
    cfg: &WeightConfig,
) -> Result<Array2<f64>> {
    check_source(sys, h, h0)?;
    let mut grad = Array2::zeros(h.dim());
    let Some(wt) = cfg.w_tilde.as_ref().filter(|_| cfg.source_active()) else {
        return Ok(grad);
    };
    for b in sys.bands() {
        let m = wt.get(&b.index).ok_or(Error::BandMismatch)?;
        ensure_square_of(m, h.ncols(), "w_tilde")?;
        grad += &b.transform.t().dot(&h0.dot(m));
    }
    grad *= cfg.beta;
    Ok(grad)
}

/// `½ tr((𝒲₀H)ᵀ(L̂+εI)𝒲₀H) + ½ Σ tr((𝒲H)ᵀ(L̂−εI)𝒲H)`: the low pass is
/// shifted up by `ε` and every high pass down by `ε`.
pub fn perturbed_energy(
    sys: &FrameletSystem,
    laplacian: &Array2<f64>,
    h: &Array2<f64>,
    epsilon: f64,
) -> Result<f64> {
    check_signal(sys, h)?;
    check_operator(laplacian, sys.n(), "laplacian")?;
    let mut total = 0.0;
    for b in sys.bands() {
        let x = b.transform.dot(h);
        let shift = if b.index.is_low_pass() {
            epsilon
        } else {
            -epsilon
        };
        total += 0.5 * (inner(&x, &laplacian.dot(&x)) + shift * inner(&x, &x));
    }
    Ok(total)
}

pub fn perturbed_energy_gradient(
    sys: &FrameletSystem,
    laplacian: &Array2<f64>,
    h: &Array2<f64>,
    epsilon: f64,
) -> Result<Array2<f64>> {
    check_signal(sys, h)?;
    check_operator(laplacian, sys.n(), "laplacian")?;
    let mut grad = Array2::zeros(h.dim());
    for b in sys.bands() {
        let x = b.transform.dot(h);
        let shift = if b.index.is_low_pass() {
            epsilon
        } else {
            -epsilon
        };
        let y = laplacian.dot(&x) + &(&x * shift);
        grad += &b.transform.t().dot(&y);
    }
    Ok(grad)
}

/// Two-scale Haar energy gap
/// `cos²(λ/8)cos²(λ/16) − sin²(λ/8)cos²(λ/16) − sin²(λ/16)`.
pub fn energy_gap(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let (c8, s8) = ((lambda / 8.0).cos(), (lambda / 8.0).sin());
    let (c16, s16) = ((lambda / 16.0).cos(), (lambda / 16.0).sin());
    Ok(c8 * c8 * c16 * c16 - s8 * s8 * c16 * c16 - s16 * s16)
}

/// Splits a symmetric `W` into `Θ⁺ᵀΘ⁺ − Θ⁻ᵀΘ⁻` using the positive and
/// negative parts of its spectrum. Both factors are returned as symmetric
/// square roots `V diag(√λ±) Vᵀ`, which do not depend on the eigenbasis
/// chosen inside repeated eigenvalues.
pub fn weight_split(w: &Array2<f64>) -> Result<(Array2<f64>, Array2<f64>)> {
    ensure_symmetric(w)?;
    let spec = eigh(w)?;
    let pos = spec.values().mapv(|l| l.max(0.0).sqrt());
    let neg = spec.values().mapv(|l| (-l).max(0.0).sqrt());
    Ok((spec.spectral_matrix(&pos), spec.spectral_matrix(&neg)))
}

/// External, attraction and repulsion terms of every band's generalized
/// energy. Pair sums run over ordered node pairs joined by an edge.
pub fn particle_decomposition(
    sys: &FrameletSystem,
    graph: &Graph,
    h: &Array2<f64>,
    cfg: &WeightConfig,
) -> Result<BTreeMap<BandIndex, EnergyBreakdown>> {
    if graph.n() != sys.n() {
        return Err(Error::DimensionMismatch(
            "graph and framelet system sizes differ".into(),
        ));
    }
    cfg.validate(sys)?;
    check_signal(sys, h)?;
    check_channels(cfg, h)?;
    let inv_sqrt: Array1<f64> = graph
        .degrees()
        .iter()
        .map(|&d| 1.0 / (d as f64).sqrt())
        .collect();

    let mut out = BTreeMap::new();
    for b in sys.bands() {
        let x = b.transform.dot(h);
        let omega = cfg.omega(b.index);
        let w = cfg.w(b.index);
        let external = 0.5 * inner(&x, &x.dot(&(omega - w)));

        let (theta_pos, theta_neg) = weight_split(w)?;
        let scaled = &x * &inv_sqrt.view().insert_axis(Axis(1));
        let (mut attraction, mut repulsion) = (0.0, 0.0);
        for &(i, k) in graph.edges() {
            if i == k {
                continue;
            }
            let grad = &scaled.row(i) - &scaled.row(k);
            // Each undirected edge appears twice among ordered pairs: ¼·2 = ½.
            attraction += 0.5 * theta_pos.dot(&grad).mapv(|v| v * v).sum();
            repulsion += 0.5 * theta_neg.dot(&grad).mapv(|v| v * v).sum();
        }
        out.insert(
            b.index,
            EnergyBreakdown {
                external,
                attraction,
                repulsion,
                total: external + attraction - repulsion,
            },
        );
    }
    Ok(out)
}

fn spectral_prepare<'a>(
    sys: &FrameletSystem,
    h: &Array2<f64>,
    cfg: &'a WeightConfig,
) -> Result<&'a Array2<f64>> {
    check_signal(sys, h)?;
    cfg.validate_theta(sys)?;
    let w = cfg.shared_w()?;
    ensure_square_of(w, h.ncols(), "w")?;
    ensure_symmetric(w)?;
    Ok(w)
}

/// `½ Σ tr((𝒲H)ᵀ𝒲H − (𝒲H)ᵀ diag(θ) 𝒲H W)` with one shared `W`.
pub fn spectral_energy(sys: &FrameletSystem, h: &Array2<f64>, cfg: &WeightConfig) -> Result<f64> {
    let w = spectral_prepare(sys, h, cfg)?;
    let mut total = 0.0;
    for b in sys.bands() {
        let x = b.transform.dot(h);
        let filtered = &x * &cfg.theta[&b.index].view().insert_axis(Axis(1));
        total += 0.5 * (inner(&x, &x) - inner(&x, &filtered.dot(w)));
    }
    Ok(total)
}

/// `Σ (𝒲ᵀ𝒲H − 𝒲ᵀ diag(θ) 𝒲 H W)`.
pub fn spectral_energy_gradient(
    sys: &FrameletSystem,
    h: &Array2<f64>,
    cfg: &WeightConfig,
) -> Result<Array2<f64>> {
    let w = spectral_prepare(sys, h, cfg)?;
    let mut grad = Array2::zeros(h.dim());
    for b in sys.bands() {
        let x = b.transform.dot(h);
        let filtered = &x * &cfg.theta[&b.index].view().insert_axis(Axis(1));
        grad += &b.transform.t().dot(&(&x - &filtered.dot(w)));
    }
    Ok(grad)
}
