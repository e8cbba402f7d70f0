use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("space mismatch: expected {expected}, found {found}")]
    SpaceMismatch { expected: String, found: String },

    #[error("atom index {index} out of range for a space with {count} atoms")]
    AtomOutOfRange { index: usize, count: usize },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cannot scale a positive measure by {0}; convert to a signed measure first")]
    NegativeScaling(f64),

    #[error("set of {size} atoms is too large for enumeration (limit {limit})")]
    TooLargeForEnumeration { size: usize, limit: usize },

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("invalid transfunction: {0}")]
    InvalidTransfunction(String),

    #[error("unknown property `{0}`")]
    UnknownProperty(String),

    #[error("transfunction appears unbounded: ratio {ratio} at total mass {mass}")]
    Unbounded { ratio: f64, mass: f64 },

    #[error("hypothesis `{property}` failed: {detail}")]
    HypothesisFailed { property: String, detail: String },

    #[error("candidate `{candidate}` does not restrict to the transfunction on positive measures (deviation {deviation})")]
    NotAnExtension { candidate: String, deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("document error at `{path}`: {message}")]
    Document { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
