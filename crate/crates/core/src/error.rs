use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("universe must contain at least one alternative")]
    EmptyUniverse,
    #[error("{n} alternatives exceeds the supported maximum of {max}")]
    TooManyAlternatives { n: usize, max: usize },
    #[error("need at least {min} alternatives, got {n}")]
    TooFewAlternatives { n: usize, min: usize },
    #[error(
        "invalid label {0:?}: labels must be nonempty and may not contain '>', ',' or whitespace"
    )]
    InvalidLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("expected {expected} alternatives, got {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("alternative index {index} is out of range for a universe of {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("universe mismatch: expected {expected} alternatives, found {found}")]
    UniverseMismatch { expected: usize, found: usize },
    #[error("a model must contain at least one preference")]
    EmptyModel,
    #[error("duplicate preference {0}")]
    DuplicatePreference(String),
    #[error("alternative {x} is not a member of menu {menu:#b}")]
    NotInMenu { x: usize, menu: u32 },
    #[error("n = {n} exceeds the configured cap of {cap} for {what}")]
    CapExceeded {
        n: usize,
        cap: usize,
        what: &'static str,
    },
    #[error("operation requires the appended flow diagram")]
    NeedsAppendedDiagram,
    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),
    #[error("circuit is not minimal: it traverses the appended edge {0} times")]
    NonMinimalCircuit(usize),
    #[error("invalid spanning tree: {0}")]
    InvalidTree(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid random choice rule: {0}")]
    InvalidRule(String),
    #[error("invalid preference distribution: {0}")]
    InvalidDistribution(String),
    #[error("model is not edge decomposable")]
    NotEdgeDecomposable,
    #[error("witness does not cover the model: {0}")]
    WitnessCoverage(String),
    #[error("data is not consistent with a Latin-square model: {0}")]
    NotCarum(String),
    #[error("invalid number {0:?}")]
    InvalidNumber(String),
    #[error("{field}: {message}")]
    Document { field: String, message: String },
}

impl Error {
    pub(crate) fn document(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Document {
            field: field.into(),
            message: message.into(),
        }
    }
}
