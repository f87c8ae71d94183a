use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("invalid input at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("skeleton mismatch: {0}")]
    SkeletonMismatch(String),

    #[error("relation {kind} does not apply to {skeleton}")]
    InapplicableRelation { kind: String, skeleton: String },

    #[error("budget exceeded after {count} items: {what}")]
    Budget { what: String, count: usize },

    #[error("vector has {} diagram(s) outside the generator index", .missing.len())]
    OutsideIndex { missing: Vec<String> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("weight system does not vanish on relation: {0}")]
    WeightSystem(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidDiagram(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
