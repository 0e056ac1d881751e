use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("unfaithful action for element `{element}`: {reason}")]
    UnfaithfulAction { element: String, reason: String },

    #[error("unresolved reference `{name}` at {path}")]
    UnresolvedReference { path: String, name: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("element set is not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("element `{element}` is not in the subgroup generated by the given sets")]
    NotInGeneratedSubgroup { element: String },

    #[error("representation is not well defined at `{element}`: alternative words differ by {deviation:e}")]
    WellDefinednessViolation { element: String, deviation: f64 },

    #[error("fallback vector for |{experiment},{value}> has vanishing norm")]
    DegenerateFallback { experiment: String, value: String },

    #[error("not an effect: {0}")]
    NotAnEffect(String),

    #[error("effect sample does not span the Hermitian matrices: rank {rank} < {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("bad prior: {0}")]
    BadPrior(String),

    #[error("outcome `{value}` of `{experiment}` has probability {probability:e}")]
    ZeroProbabilityOutcome {
        experiment: String,
        value: String,
        probability: f64,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid statistical model: {0}")]
    InvalidStatisticalModel(String),

    #[error("no orbit selected")]
    NoOrbitSelected,

    #[error("restriction set is empty")]
    EmptyRestriction,

    #[error("action mismatch: {0}")]
    ActionMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
