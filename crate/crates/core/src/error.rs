use thiserror::Error;

/// Errors raised while building or solving instances.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("duplicate element id `{0}`")]
    DuplicateId(String),

    #[error("unknown element id `{0}`")]
    UnknownId(String),

    #[error("order relation contains a cycle: {}", .0.join(" < "))]
    Cycle(Vec<String>),

    #[error("weight component {value} of `{id}` is outside [-{limit}, {limit}]")]
    WeightOutOfRange { id: String, value: i64, limit: i64 },

    #[error("instance has {size} elements, more than the limit of {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("element index {0} is not part of the poset")]
    BadIndex(usize),

    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("decomposition width {width} exceeds the limit of {limit}")]
    WidthLimit { width: usize, limit: usize },

    #[error("poset has width greater than two; antichain {}", .0.join(", "))]
    WidthExceeded(Vec<String>),

    #[error("polygon is empty")]
    EmptyPolygon,

    #[error("objective is undefined at every vertex")]
    ObjectiveUndefined,

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
