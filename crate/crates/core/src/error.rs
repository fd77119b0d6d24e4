use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("wrong component count: expected {expected}, got {got}")]
    ComponentCount { expected: usize, got: usize },

    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("field has a nonzero mean ({context})")]
    NonzeroMean { context: String },

    #[error("symbol cannot be evaluated at the zero frequency")]
    SymbolAtOrigin,

    #[error("dyadic block {0} is identically zero")]
    ZeroBlock(i32),

    #[error("invalid exponent {0}: must lie in [1, inf]")]
    InvalidExponent(f64),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("(alpha, l, eps) rejected: {0}")]
    AleViolation(String),

    #[error("eps must lie in (0,1), got {0}")]
    EpsilonRange(f64),

    #[error("quadratic has no real root: g0 = {0} > 1/4")]
    NoRealRoot(f64),

    #[error("missing calibration: {0}")]
    MissingCalibration(String),

    #[error("smallness condition fails (margin {margin}); rerun with override to explore")]
    SmallnessViolated { margin: f64 },

    #[error("Picard iteration diverged at iteration {iteration}: norm {norm} exceeds bound {bound}")]
    Divergence { iteration: usize, norm: f64, bound: f64 },

    #[error("Picard iteration did not converge in {iterations} iterations (last difference {last_diff:e})")]
    NotConverged { iterations: usize, last_diff: f64 },

    #[error("time {0} is not an interior node of the time grid")]
    NotANode(f64),

    #[error("interpolation parameter lambda = {0} is inadmissible")]
    InvalidLambda(f64),

    #[error("degenerate corpus: {0}")]
    DegenerateCorpus(String),

    #[error("unknown initial data kind '{0}'")]
    UnknownDataKind(String),

    #[error("solution record is incomplete: {0}")]
    IncompleteRecord(String),

    #[error("snapshot has bad magic bytes")]
    BadMagic,

    #[error("snapshot format version '{0}' is not supported")]
    UnknownVersion(char),

    #[error("corrupt snapshot: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
