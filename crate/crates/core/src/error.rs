use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("dimension mismatch at {path}: expected {expected}, found {found}")]
    DimensionMismatch { path: String, expected: usize, found: usize },
    #[error("alphabet `{0}` must have at least one symbol")]
    EmptyAlphabet(&'static str),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("negative entry at {path}: {value}")]
    NegativeEntry { path: String, value: String },
    #[error("row not stochastic at {path}: sums to {sum}")]
    NotStochastic { path: String, sum: String },
    #[error("distortion out of range at {path}: {value} exceeds rho_max {rho_max}")]
    DistortionOutOfRange { path: String, value: String, rho_max: String },
    #[error("observation has zero probability under the current belief and encoder")]
    ZeroProbabilityObservation,
    #[error("no encoder rule for a belief atom reached at stage {stage}")]
    UnknownAtom { stage: usize },
    #[error("distinct beliefs collided on one float key (distance {distance})")]
    AtomKeyCollision { distance: String },
    #[error("{what} cap exceeded: {count} > {cap}")]
    CapExceeded { what: &'static str, count: String, cap: u128 },
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
