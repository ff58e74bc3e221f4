use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("photon number {n} does not fit cutoff dimension {dim}")]
    CutoffViolation { n: usize, dim: usize },

    #[error(
        "cutoff {dim} discards tail probability {tail:.3e} (tolerance {tol:.1e}); use a cutoff of at least {suggested}"
    )]
    CutoffTooSmall { dim: usize, tail: f64, tol: f64, suggested: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("statistic undefined: {0}")]
    UndefinedStatistic(String),

    #[error("truncation defect {defect:.3e} exceeds {limit:.1e}; increase the cutoff")]
    Truncation { defect: f64, limit: f64 },

    #[error("P-function is singular for this state: {0}")]
    SingularP(String),

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("quadrature axis too small: captured mass {mass:.8} (deficit tolerance {tol:.1e})")]
    AxisTooSmall { mass: f64, tol: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("malformed data: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
