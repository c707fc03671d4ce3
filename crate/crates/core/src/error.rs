use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("operation not defined for model {0}")]
    UnsupportedModel(String),

    #[error("time step too large: dt = {dt:.6e} must stay below period/10 = {limit:.6e}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("trajectory diverged at t = {t:.6e}")]
    Divergence { t: f64 },

    #[error("singular transformation: {0}")]
    SingularTransform(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not Hermitian: max |A - A^dag| = {0:.3e}")]
    NonHermitian(f64),

    #[error("truncation too small: partition-sum tail estimate {tail:.3e} exceeds {limit:.3e}; increase dim")]
    TruncationTail { tail: f64, limit: f64 },

    #[error("gauge grid mismatch: {0}")]
    GridMismatch(String),

    #[error("determinant zero mode: holonomy sits at an integer multiple of 2 pi")]
    ZeroMode,

    #[error("phase undefined: |Tr(U rho)| = {0:.3e} is below threshold")]
    UndefinedPhase(f64),

    #[error("degenerate scan grid: {0}")]
    DegenerateGrid(String),

    #[error("empty input: {0}")]
    EmptyInput(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
