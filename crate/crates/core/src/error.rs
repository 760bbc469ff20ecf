use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (relative asymmetry {0:e})")]
    NonHermitian(f64),

    #[error("density is not positive definite (min eigenvalue {min:e}, max eigenvalue {max:e})")]
    SingularDensity { min: f64, max: f64 },

    #[error("density is not even under the grading (relative defect {0:e})")]
    OddDensity(f64),

    #[error("functional is not self-adjoint (relative defect {0:e})")]
    NotSelfAdjoint(f64),

    #[error("functional is not faithful: support projections do not sum to the identity")]
    NotFaithful,

    #[error("kernel is not positive semidefinite (most negative eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("smoothing width must be positive, got {0}")]
    NonpositiveSigma(f64),

    #[error("condition number {0:e} exceeds the guard; use an unguarded flow to override")]
    IllConditioned(f64),

    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),

    #[error("flow density does not match the GNS kernel (relative difference {0:e})")]
    FlowMismatch(f64),

    #[error("operator is not unitary (defect {0:e})")]
    NonUnitary(f64),

    #[error("representations violate the equivalence hypotheses (mismatch {0:e})")]
    HypothesisViolation(f64),

    #[error("region {k} out of range for a chain of {m} sites")]
    RegionOutOfRange { k: usize, m: usize },

    #[error("sample budget must be positive")]
    BudgetZero,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
