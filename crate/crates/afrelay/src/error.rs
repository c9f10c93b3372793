use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or continued fraction exhausted its iteration budget.
    /// Budgets are hard limits; results are never silently truncated.
    #[error("{what} failed to converge within {budget} iterations")]
    NoConvergence { what: &'static str, budget: usize },

    /// A parameter violates the contract of a constructor.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Interferer aggregation needs at least one spec.
    #[error("interferer list is empty")]
    EmptyInterferers,

    /// An interferer power gain of exactly zero (probability-zero event
    /// under continuous fading) makes the SIR undefined.
    #[error("degenerate interferer gain: exactly zero")]
    DegenerateInterferer,

    /// A Monte-Carlo estimate would be statistically meaningless.
    #[error("unreliable estimate: {0}")]
    Unreliable(String),

    /// Experiment configuration is malformed.
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
