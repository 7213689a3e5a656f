use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid type: {0}")]
    InvalidType(String),
    #[error("type `{0}` has no finite enumeration")]
    NotFinite(String),
    #[error("value `{value}` does not inhabit `{ty}`")]
    NotInhabitant { value: String, ty: String },
    #[error("player `{0}` has an empty choice type")]
    EmptyChoice(String),
    #[error("cannot compose `{left}` with `{right}`: bottom boundary {bottom} does not match top boundary {top}")]
    Compose {
        left: String,
        right: String,
        bottom: String,
        top: String,
    },
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("selection: {0}")]
    Selection(String),
    #[error("profile does not match the strategy space: {0}")]
    ProfileShape(String),
    #[error("function `{name}`: {message}")]
    Function { name: String, message: String },
    #[error("not a closed game: interface is {0}")]
    NotClosed(String),
    #[error("strategy space has {cardinality} profiles, exceeding the budget of {budget}")]
    SpaceTooLarge { cardinality: String, budget: u64 },
    #[error("evaluation budget of {0} equilibrium checks exhausted")]
    BudgetExceeded(u64),
    #[error("{0}")]
    Overflow(String),
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("parameter: {0}")]
    Param(String),
    #[error("{line}:{col}: type error: {message}")]
    Type { line: usize, col: usize, message: String },
}

impl Error {
    /// True for errors raised because a search would exceed its budget.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::SpaceTooLarge { .. } | Error::BudgetExceeded(_) | Error::Overflow(_)
        )
    }
}
