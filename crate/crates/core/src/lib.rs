//! Graph framelet transforms, framelet energies and gradient-flow dynamics.
//!
//! Signals are dense `n×c` matrices (`ndarray::Array2<f64>`): one row per
//! node, one column per channel. Spectra follow the `L̂ = Uᵀ Λ U` convention
//! with eigenvectors stored as rows.

pub mod analysis;
pub mod dynamics;
pub mod energies;
pub mod error;
pub mod framelets;
pub mod graph;
pub mod linalg;
pub mod spectral;

pub use analysis::{
    classify_dominance, dominant_frequency, AmplificationModel, DominanceClass, DominanceVerdict,
};
pub use dynamics::{run_flow, Activation, FlowTrace, Scheme, SchemeKind, StopRule, TraceRow};
pub use energies::WeightConfig;
pub use error::{Error, Result};
pub use framelets::{BandIndex, FilterVariant, FrameletSystem, Scales};
pub use graph::{generate_graph, parse_edge_list, Graph, GraphKind, GraphOperators, GraphSpec};
pub use spectral::{eigh, Spectrum};
