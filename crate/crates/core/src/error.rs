use thiserror::Error;

use crate::reflection::ReflectionTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),

    #[error("order relation has a cycle through `{0}` and `{1}`")]
    CycleDetected(String, String),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("assignment has {got} entries but the domain has {expected} elements")]
    WrongArity { expected: usize, got: usize },

    #[error("image index {0} is out of range for the codomain")]
    ImageOutOfRange(usize),

    #[error("map is not monotone: `{lo}` <= `{hi}` but their images are not ordered")]
    NotMonotone { lo: String, hi: String },

    #[error("maps are not parallel")]
    NotParallel,

    #[error("maps do not share a domain")]
    DomainMismatch,

    #[error("maps are not composable")]
    NotComposable,

    #[error("square {0} does not start at the shared base")]
    BaseMismatch(usize),

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("name `{0}` is declared twice")]
    NameCollision(String),

    #[error("unknown declaration `{0}`")]
    UnknownName(String),

    #[error("invalid declaration `{name}`: {source}")]
    Validation {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error("reflection chain did not converge within {budget} stages (stage sizes {sizes:?})")]
    BudgetExceeded {
        budget: usize,
        sizes: Vec<usize>,
        trace: Box<ReflectionTrace>,
    },

    #[error("budget must be even and at least 2, got {0}")]
    InvalidBudget(usize),

    #[error("stage {stage} has {size} elements, over the limit of {limit}")]
    StageTooLarge {
        stage: usize,
        size: usize,
        limit: usize,
    },

    #[error("reflection trace has not converged")]
    NotConverged,

    #[error("target is not Kan-injective: {0}")]
    TargetNotInjective(String),

    #[error("no registry entry for the given span")]
    MissingSpan,

    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),
}
