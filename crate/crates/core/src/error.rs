use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("malformed PD code: {0}")]
    MalformedPd(String),

    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    #[error("graph has {edges} edges, brute force is limited to {limit}")]
    EdgeBudget { edges: usize, limit: usize },

    /// Spec text did not match the grammar. `pos` is a byte offset into the input.
    #[error("parse error at position {pos}: {msg} (expected {expected})")]
    Parse {
        pos: usize,
        msg: String,
        expected: &'static str,
    },

    /// Two independent routes disagreed; this is a bug, never an input problem.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            op,
            msg: msg.into(),
        }
    }
}
