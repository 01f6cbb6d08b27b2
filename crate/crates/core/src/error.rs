use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid problem definition: {0}")]
    InvalidProblem(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("weighted least-squares system is numerically singular (rank {rank} < {columns})")]
    SingularRegression { rank: usize, columns: usize },

    #[error("invalid regression input: {0}")]
    InvalidRegression(String),

    #[error("regression failed at layer {layer}: {source}")]
    LayerRegression {
        layer: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("diffusion matrix is singular at t = {t}")]
    SingularDiffusion { t: f64 },

    #[error("layer {0} is empty")]
    EmptyLayer(usize),

    #[error("node {0} does not exist")]
    UnknownNode(usize),

    #[error("layer {layer} has no position {position}")]
    PositionOutOfRange { layer: usize, position: usize },

    #[error("node {0} is on the terminal layer and cannot be expanded")]
    TerminalParent(usize),

    #[error("missing pruning scores for layer {0}")]
    MissingScores(usize),

    #[error("no value coefficients for time index {0}")]
    MissingCoefficients(usize),

    #[error("control candidate set is empty")]
    EmptyCandidates,

    #[error("every lambda candidate failed; last error: {0}")]
    AllLambdaCandidatesFailed(Box<Error>),

    #[error("initial-state sets differ between the compared report sets")]
    MismatchedInitialStates,

    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// Coarse category used for process exit codes.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidProblem(_)
            | Error::InvalidParameter { .. }
            | Error::DimensionMismatch { .. }
            | Error::Config(_)
            | Error::MismatchedInitialStates => ErrorCategory::Input,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => ErrorCategory::Io,
            Error::Iteration { source, .. } | Error::LayerRegression { source, .. } => {
                source.category()
            }
            _ => ErrorCategory::Numerical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    Numerical,
    Io,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Input => 2,
            ErrorCategory::Numerical => 3,
            ErrorCategory::Io => 4,
        }
    }
}
