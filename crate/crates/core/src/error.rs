use thiserror::Error;

/// Errors raised by graph construction, the eigensolver, the framelet
/// machinery, the energy evaluators and the flow integrators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph spec: {0}")]
    InvalidSpec(String),
    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),
    #[error("edge list parse error at line {line}: {message}")]
    FileParse { line: usize, message: String },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("framelet bands do not match the system index set")]
    BandMismatch,
    #[error("operation requires a tight framelet system")]
    VariantNotTight,
    #[error("operation requires one weight matrix shared by every band")]
    WeightsNotShared,
    #[error("state norm exceeded {limit:e} at step {step}")]
    NumericOverflow { step: usize, limit: f64 },
    #[error("renormalization is not allowed with a tanh activation")]
    IllegalRenormalize,
    #[error("state has zero norm")]
    ZeroState,
    #[error("trace was not produced with renormalization")]
    TraceNotNormalized,
}

pub type Result<T> = std::result::Result<T, Error>;
