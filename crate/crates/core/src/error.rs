use thiserror::Error;

/// Errors produced while building, analysing or matching networks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("beam-splitter coupling is not Hermitian at ({row}, {col}): {value} vs conj {mirror}")]
    NonHermitianCoupling {
        row: usize,
        col: usize,
        value: String,
        mirror: String,
    },

    #[error("squeezing coupling is not symmetric at ({row}, {col}): {value} vs {mirror}")]
    AsymmetricSqueezing {
        row: usize,
        col: usize,
        value: String,
        mirror: String,
    },

    #[error("{what} refers to mode {index}, but the network has {modes} modes")]
    DanglingIndex {
        what: String,
        index: usize,
        modes: usize,
    },

    #[error("mode {mode} has more than one port")]
    DuplicatePort { mode: usize },

    #[error("duplicate mode label `{0}`")]
    DuplicateLabel(String),

    #[error("invalid value for {what}: {reason}")]
    InvalidValue { what: String, reason: String },

    #[error("index {index} out of range for {what} (len {len})")]
    IndexOutOfRange {
        what: String,
        index: usize,
        len: usize,
    },

    #[error("-iω - A is singular at ω = {omega}")]
    SingularAtFrequency { omega: f64 },

    #[error("network is unstable (max Re λ = {margin:e})")]
    UnstableNetwork { margin: f64 },

    #[error("mode {mode} has no port and cannot be adiabatically eliminated")]
    NoPortOnMode { mode: usize },

    #[error("mode {mode} is too weakly damped to eliminate: κ' = {kappa}, largest other rate {other}")]
    WeakDamping { mode: usize, kappa: f64, other: f64 },

    #[error("cannot eliminate mode {mode}: {reason}")]
    EliminationUnsupported { mode: usize, reason: String },

    #[error("forward gain vanishes")]
    ZeroGain,

    #[error("dissipator does not couple both modes")]
    NullDissipator,

    #[error("infeasible cooperativity {value}: {reason}")]
    InfeasibleCooperativity { value: f64, reason: String },

    #[error("matcher did not converge: residual {residual:e} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },

    #[error("network became unstable during the search")]
    UnstableDuringSearch,

    #[error("no free parameters to search over")]
    NoFreeParameters,

    #[error("unknown parameter `{name}`; available: {available}")]
    UnknownParameter { name: String, available: String },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Hilbert space dimension {dim} exceeds the cap {cap}")]
    HilbertSpaceTooLarge { dim: usize, cap: usize },

    #[error("integrator step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("truncation leak: mode {mode} top-level population {population:e} at t = {t}")]
    TruncationLeak { mode: usize, population: f64, t: f64 },

    #[error("operators are not factorizable between the two subsystems: {0}")]
    NotFactorizable(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
