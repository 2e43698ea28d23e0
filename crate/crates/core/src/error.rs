use thiserror::Error;

/// Errors raised by grid construction, operator evaluation and solvers.
#[derive(Debug, Error)]
pub enum FracError {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("rank mismatch: {0}")]
    RankMismatch(String),

    #[error("alpha out of range: {0}")]
    AlphaRange(String),

    #[error("backend not supported for this operator: {0}")]
    UnsupportedBackend(String),

    #[error("atom outside the grid box at ({0}, {1})")]
    AtomOutsideBox(f64, f64),

    #[error("mollifier width {eps} below resolvable limit 2h = {min}")]
    MollifierTooNarrow { eps: f64, min: f64 },

    #[error("radius {r} below resolvable limit {min}")]
    RadiusTooSmall { r: f64, min: f64 },

    #[error("spectral input has nonzero mean {mean} under reject_nonzero_mean policy")]
    NonZeroMean { mean: f64 },

    #[error("exponent constraint violated: {0}")]
    ExponentRange(String),

    #[error("infeasible obstacle: {0}")]
    InfeasibleObstacle(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("zero denominator in {0}")]
    ZeroDenominator(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FracError>;
