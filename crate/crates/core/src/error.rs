use thiserror::Error;

/// Errors raised by the speed-limit library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("matrix has a negative eigenvalue {value:e}")]
    NegativeEigenvalue { value: f64 },

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("bad subsystem partition: {0}")]
    BadPartition(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("extrapolation did not converge: {0}")]
    NonConvergent(String),

    #[error("time {t} is closer than {margin:e} to the edge of the trajectory domain")]
    DomainEdge { t: f64, margin: f64 },

    #[error("negative evolution time {0}")]
    NegativeTime(f64),

    #[error("argument out of domain: {0}")]
    DomainError(String),

    #[error("initial state carries no excitation, the requested distance is unreachable")]
    ZeroExcitation,

    #[error("state is an eigenstate of the collective Z operator, q is undefined")]
    DegenerateState,

    #[error("quadrature did not reach tolerance (estimate {estimate}, error {error:e})")]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("target distance is unreachable, the bound saturates at {limit}")]
    Unreachable { limit: f64 },

    #[error("environment generator is not Hermitian")]
    NonHermitianGenerator,

    #[error("{family} bound violated by {excess:e}")]
    BoundViolation { family: String, excess: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
