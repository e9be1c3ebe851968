use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("exact hypervolume is not supported for {0} objectives (use the Monte-Carlo estimator)")]
    UnsupportedDimension(usize),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid search space: {0}")]
    SearchSpace(String),

    #[error("invalid objective spec: {0}")]
    ObjectiveSpec(String),

    #[error("kernel matrix is not positive definite even with jitter {jitter:e}")]
    Conditioning { jitter: f64 },

    #[error("evaluation failed ({kind}): {message}")]
    Evaluation { kind: EvalFailure, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Reason an objective evaluation did not produce a usable vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalFailure {
    Timeout,
    Malformed,
    ProcessExit,
    NonFinite,
    Reported,
    Io,
}

impl std::fmt::Display for EvalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EvalFailure::Timeout => "timeout",
            EvalFailure::Malformed => "malformed response",
            EvalFailure::ProcessExit => "process exit",
            EvalFailure::NonFinite => "non-finite objective",
            EvalFailure::Reported => "evaluator error",
            EvalFailure::Io => "i/o",
        };
        f.write_str(s)
    }
}

impl Error {
    pub fn eval(kind: EvalFailure, message: impl Into<String>) -> Self {
        Error::Evaluation {
            kind,
            message: message.into(),
        }
    }
}
