use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Variants split into two groups: fail-fast outcomes (a precondition of an
/// algorithm does not hold at the configured parameters, so the run aborts
/// without emitting a coloring) and hard errors (malformed input, I/O).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("node {node} has no color")]
    MissingColor { node: usize },
    #[error("node {node} colored {color}, which is not in its list")]
    ColorNotInList { node: usize, color: u64 },
    #[error("missing orientation: {0}")]
    MissingOrientation(String),
    #[error("node {node} has an empty list")]
    EmptyList { node: usize },
    #[error("existence condition violated at node {node}: {detail}")]
    ConditionViolated { node: usize, detail: String },
    #[error("list too small at node {node}: have {have}, need {need}")]
    ListTooSmall { node: usize, have: String, need: String },
    #[error("greedy type-table construction exhausted at type {type_index}")]
    GreedyExhausted { type_index: usize },
    #[error("{what} exceeds cap {cap}")]
    CapExceeded { what: String, cap: u64 },
    #[error("message of {bits} bits on edge {from}->{to} in round {round} exceeds budget {budget}")]
    BudgetViolation { from: usize, to: usize, round: usize, bits: u64, budget: u64 },
    #[error("round limit {max_rounds} reached before all nodes produced output")]
    RoundLimitExceeded { max_rounds: usize },
    #[error("node {node} failed in round {round}: {reason}")]
    NodeFailure { node: usize, round: usize, reason: String },
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
    #[error("{0}")]
    Io(String),
}

impl Error {
    /// True for outcomes that signal "preconditions not met at these
    /// parameters" rather than a malformed input or an internal error.
    pub fn is_fail_fast(&self) -> bool {
        matches!(
            self,
            Error::ConditionViolated { .. }
                | Error::ListTooSmall { .. }
                | Error::GreedyExhausted { .. }
                | Error::CapExceeded { .. }
                | Error::BudgetViolation { .. }
                | Error::RoundLimitExceeded { .. }
                | Error::NodeFailure { .. }
                | Error::EmptyList { .. }
        )
    }

    /// Short stable tag used in reports and CSV summaries.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGraph(_) => "InvalidGraph",
            Error::InvalidInstance(_) => "InvalidInstance",
            Error::MissingColor { .. } => "MissingColor",
            Error::ColorNotInList { .. } => "ColorNotInList",
            Error::MissingOrientation(_) => "MissingOrientation",
            Error::EmptyList { .. } => "EmptyList",
            Error::ConditionViolated { .. } => "ConditionViolated",
            Error::ListTooSmall { .. } => "ListTooSmall",
            Error::GreedyExhausted { .. } => "GreedyExhausted",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::BudgetViolation { .. } => "BudgetViolation",
            Error::RoundLimitExceeded { .. } => "RoundLimitExceeded",
            Error::NodeFailure { .. } => "NodeFailure",
            Error::InvariantViolated(_) => "InvariantViolated",
            Error::InfeasibleParams(_) => "InfeasibleParams",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInstance(e.to_string())
    }
}

/// Fails with `InvariantViolated` when `cond` is false.
pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvariantViolated(msg()))
    }
}
