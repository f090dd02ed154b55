use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("invalid monoid set: {0}")]
    InvalidSet(String),

    #[error("metric axiom violated: {0}")]
    MetricAxiom(String),

    #[error("generators {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("subshift is empty after trimming")]
    EmptyShift,

    #[error("inadmissible point: {0}")]
    InadmissiblePoint(String),

    #[error("point does not belong to this system")]
    ForeignPoint,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("point is not periodic")]
    NotPeriodic,

    #[error("orbits of the two periodic points coincide")]
    OrbitOverlap,

    #[error("orbits intersect without being equal; this indicates a bug in orbit computation")]
    OrbitPartialOverlap,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("generation failed: {0}")]
    GenerationFailed(String),

    #[error("spec error at `{field}`: {message}")]
    Spec { field: String, message: String },

    #[error("witness does not re-validate: {0}")]
    WitnessRejected(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn spec(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec { field: field.into(), message: message.into() }
    }
}
