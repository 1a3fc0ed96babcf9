use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("iteration did not converge within {max_iter} steps (last estimate {last_estimate:e})")]
    NonConvergence { max_iter: usize, last_estimate: f64 },

    #[error("matrix asymmetry {max_asymmetry:e} exceeds tolerance {tolerance:e}")]
    Asymmetric { max_asymmetry: f64, tolerance: f64 },

    #[error("eigensolver did not converge within {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("degenerate least-squares system: every Gram eigenvalue is below the rank cutoff")]
    DegenerateSystem,

    #[error("state matrix is rank deficient: sigma_max = {sigma_max:e}, sigma_min = {sigma_min:e}")]
    RankDeficient { sigma_max: f64, sigma_min: f64 },

    #[error("all-zero state matrix: singular-value relevances are undefined")]
    ZeroStates,

    #[error("entropy estimator needs at least 2 units, got {0}")]
    TooFewUnits(usize),

    /// Carries the per-epoch loss trace recorded up to and including the
    /// diverged epoch, so callers can still report the final value.
    #[error("LMS diverged at epoch {epoch}: epoch mse = {last_mse:e}")]
    LmsDiverged {
        epoch: usize,
        last_mse: f64,
        trace: Vec<f64>,
    },

    #[error("empty input sequence")]
    EmptyInput,

    #[error("washout {washout} must be smaller than the sequence length {len}")]
    WashoutTooLong { washout: usize, len: usize },

    #[error("series too short: need at least {required} samples, got {actual}")]
    SeriesTooShort { required: usize, actual: usize },

    #[error("target generation diverged on {0} consecutive seeds")]
    GeneratorDiverged(usize),

    #[error("drawn weight matrix has zero magnitude even after a redraw")]
    ZeroDraw,

    #[error("{path}:{line}: cannot parse sample {token:?}")]
    ParseSample {
        path: String,
        line: usize,
        token: String,
    },

    #[error("{path}: no samples found")]
    EmptyData { path: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("cannot aggregate an empty group")]
    EmptyGroup,
}

pub type Result<T> = std::result::Result<T, Error>;
