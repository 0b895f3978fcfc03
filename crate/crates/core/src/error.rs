use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent user input (chains, platforms, solutions, flags).
    #[error("invalid input: {0}")]
    Input(String),

    /// A stage list that does not tile the chain, or uses zero cores.
    #[error("invalid solution structure: {0}")]
    Structure(String),

    #[error("no feasible solution: {0}")]
    Infeasible(String),

    #[error("expansion budget exceeded after {expansions} nodes")]
    BudgetExceeded { expansions: u64 },

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("not enough {core_type} cores: need {needed}, topology has {available}")]
    Capacity {
        core_type: crate::CoreType,
        needed: usize,
        available: usize,
    },

    #[error("simulation deadlocked on link {link} (stage {from} -> stage {to}) with stream {stream} pending")]
    Deadlock {
        link: usize,
        from: usize,
        to: usize,
        stream: usize,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by the instance itself rather than by bad input.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::Infeasible(_) | Error::BudgetExceeded { .. } | Error::Deadlock { .. }
        )
    }
}

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
