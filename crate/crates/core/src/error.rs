use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit count {0} outside supported range 1..=4")]
    QubitCount(usize),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("observable is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("partial trace needs at least one kept qubit")]
    EmptyKeepSet,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("covariance rejected: {0}")]
    NotPositiveDefinite(String),

    #[error("Heisenberg bound violated for atom {atom}: Var(x)Var(p) = {product:.6} < 0.25")]
    HeisenbergViolation { atom: usize, product: f64 },

    #[error("empty target set")]
    EmptyTargets,

    #[error("site {site} out of range for {site_count} sites")]
    SiteOutOfRange { site: usize, site_count: usize },

    #[error("malformed ramp nesting: {0}")]
    RampNesting(String),

    #[error("site model for site {site} disagrees with schedule: {reason}")]
    SiteModelMismatch { site: usize, reason: String },

    #[error("worker pool: {0}")]
    Workers(String),
}

impl Error {
    /// True for failures that signal a violated physical invariant rather than
    /// a malformed request (non-PSD covariance, Heisenberg violation, invalid state).
    pub fn is_physics_failure(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite(_)
                | Error::HeisenbergViolation { .. }
                | Error::InvalidState(_)
        )
    }
}
