//! Energy report for a signal under an experiment's operators and weights.

use std::collections::BTreeMap;

use framelet_core::energies::{
    dirichlet_energy, framelet_dirichlet_energies, particle_decomposition, perturbed_energy,
    source_energy_term, spectral_energy, total_framelet_energy, EnergyBreakdown, WeightConfig,
};
use framelet_core::FilterVariant;
use ndarray::Array2;
use serde::Serialize;

use crate::error::Result;
use crate::experiment::Experiment;

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub dirichlet: f64,
    pub dirichlet_normalized: Option<f64>,
    /// Per-band Dirichlet energies; only defined on tight systems.
    pub band_dirichlet: Option<BTreeMap<String, f64>>,
    pub total_framelet: f64,
    /// Source term evaluated against the experiment's initial signal.
    pub source_term: f64,
    pub perturbed: f64,
    pub spectral: Option<f64>,
    /// Particle split per band; present when every `W` is symmetric.
    pub particles: Option<BTreeMap<String, EnergyBreakdown>>,
}

pub fn energy_report(exp: &Experiment, h: &Array2<f64>) -> Result<EnergyReport> {
    let (sys, ops, cfg) = (&exp.system, &exp.ops, &exp.weights);
    let dirichlet = dirichlet_energy(&ops.laplacian, h)?;
    let norm_sq = h.iter().map(|x| x * x).sum::<f64>();
    let band_dirichlet = match sys.variant() {
        FilterVariant::Tight => Some(
            framelet_dirichlet_energies(sys, &ops.laplacian, h)?
                .bands
                .into_iter()
                .map(|(b, e)| (b.to_string(), e))
                .collect(),
        ),
        _ => None,
    };
    let source = (h.dim() == exp.h0.dim()).then_some(&exp.h0);
    let source_term = match source {
        Some(h0) => source_energy_term(sys, h, h0, cfg)?,
        None => 0.0,
    };
    let spectral = if cfg.theta.is_empty() || cfg.shared_w().is_err() {
        None
    } else {
        Some(spectral_energy(sys, h, cfg)?)
    };
    let particles = if symmetric_weights(cfg) {
        Some(
            particle_decomposition(sys, &exp.graph, h, cfg)?
                .into_iter()
                .map(|(b, e)| (b.to_string(), e))
                .collect(),
        )
    } else {
        None
    };
    Ok(EnergyReport {
        dirichlet,
        dirichlet_normalized: (norm_sq > 0.0).then(|| dirichlet / norm_sq),
        band_dirichlet,
        total_framelet: total_framelet_energy(sys, &ops.adjacency, h, source, cfg)?,
        source_term,
        perturbed: perturbed_energy(sys, &ops.laplacian, h, cfg.epsilon)?,
        spectral,
        particles,
    })
}

fn symmetric_weights(cfg: &WeightConfig) -> bool {
    cfg.w.values().all(|w| {
        w.iter()
            .zip(w.t().iter())
            .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs()))
    })
}
