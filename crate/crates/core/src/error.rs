use thiserror::Error;

/// Errors raised across the crate.
///
/// Each variant maps onto one CLI exit code (see [`Error::exit_code`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation
    /// (empty set passed to `exp2`, `n = 0`, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or mismatched input: wrong coloring kind, bad lengths,
    /// an interval too short for the requested construction.
    #[error("input error: {0}")]
    Input(String),

    /// The proof construction cannot proceed with the supplied parameters.
    #[error("construction infeasible with supplied parameters: {0}")]
    Infeasible(String),

    /// A U/Hind oracle could not be resolved within the search budget.
    #[error("oracle unresolved: {0}")]
    UnknownOracle(String),

    /// An operation was invoked before the state it depends on was built.
    #[error("state error: {0}")]
    State(String),

    /// An internal consistency check of the construction failed.
    #[error("construction bug: {0}")]
    Construction(String),
}

impl Error {
    /// Exit code under the CLI contract: 1 invalid/infeasible,
    /// 2 budget exhausted, 3 input error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) | Error::Construction(_) => 1,
            Error::UnknownOracle(_) => 2,
            Error::Domain(_) | Error::Input(_) | Error::State(_) => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
