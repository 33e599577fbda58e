use thiserror::Error;

/// Errors produced by ensemble construction and the analysis pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty matrix")]
    EmptyMatrix,

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("target position {0} is not erased")]
    TargetNotErased(usize),

    #[error("constraint code too large: n = {n}, limit {limit}")]
    CodeTooLarge { n: usize, limit: usize },

    #[error("kept column set is empty")]
    EmptyKeptSet,

    #[error("code dimension {k} exceeds enumeration limit {limit}")]
    DimensionTooLarge { k: usize, limit: usize },

    #[error("invalid protograph: {0}")]
    InvalidProtograph(String),

    #[error("component matrices do not sum to the base matrix")]
    EdgeSpreadMismatch,

    #[error("negative or malformed component entry")]
    BadComponent,

    #[error("coupling length must satisfy {0}")]
    BadCouplingLength(String),

    #[error("unknown builtin ensemble `{0}`")]
    UnknownBuiltin(String),

    #[error("rate denominator is not positive")]
    DegenerateRate,

    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("no root bracket in range: {0}")]
    NoRoot(String),

    #[error("lifting factor too small for multi-edge disjointness (B_ij = {multiplicity} > M = {m})")]
    LiftTooSmall { multiplicity: usize, m: usize },

    #[error("peeling does not support punctured ensembles")]
    PuncturedPeeling,

    #[error("not enough surviving trajectories at the critical point ({0})")]
    InsufficientSurvivors(usize),

    #[error("degenerate scaling inputs: {0}")]
    DegenerateScaling(String),

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("evolution halted: expected decodable fraction is not positive")]
    EvolutionHalted,

    #[error("optimizer did not converge: {0}")]
    OptimizerFailed(String),

    #[error("infeasible weight assignment")]
    InfeasibleWeights,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("ensemble spec: {0}")]
    SpecFile(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
