use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("{what} contains a non-finite entry at ({row}, {col})")]
    NonFinite {
        what: &'static str,
        row: usize,
        col: usize,
    },

    #[error(
        "{what} is not symmetric: entry ({row}, {col}) = {value} but ({col}, {row}) = {mirror}"
    )]
    Asymmetric {
        what: &'static str,
        row: usize,
        col: usize,
        value: f64,
        mirror: f64,
    },

    #[error("{what} is not antisymmetric at ({row}, {col})")]
    NotAntisymmetric {
        what: &'static str,
        row: usize,
        col: usize,
    },

    #[error("Lyapunov equation has no unique solution: eigenvalues {0} and {1} of the drift sum to zero")]
    NoUniqueSolution(String, String),

    #[error("Lyapunov solve residual {residual:.3e} exceeds bound {bound:.3e}")]
    InaccurateSolution { residual: f64, bound: f64 },

    #[error("{0} failed to converge")]
    NoConvergence(&'static str),

    #[error("determinant {0:e} is not positive")]
    NonPositiveDeterminant(f64),

    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    #[error("Gram matrix Re(K†K) is numerically singular (condition number {condition:.3e})")]
    SingularGram { condition: f64 },

    #[error("condition KΣCᵀ = 0 violated (residual {residual:.3e})")]
    ConditionViolated { residual: f64 },

    #[error("closed-form steady covariance failed its purity check (residual {residual:.3e})")]
    FormulaNotPure { residual: f64 },

    #[error("Y must be positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NonPositiveY { min_eigenvalue: f64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("rate must be positive, got {0}")]
    NonPositiveRate(f64),

    #[error("adjacency matrix is not symmetric at ({0}, {1})")]
    AsymmetricAdjacency(usize, usize),

    #[error("graph matrix W is not symmetric at ({0}, {1})")]
    AsymmetricW(usize, usize),

    #[error("need at least {min} modes, got {got}")]
    TooFewModes { min: usize, got: usize },

    #[error("cascade requires single-channel components, got m = {0}")]
    NotSingleChannel(usize),

    #[error("covariance diverged at t = {t} (largest eigenvalue {eigenvalue:e})")]
    UnstableStep { t: f64, eigenvalue: f64 },

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("tolerance {0} must be strictly positive")]
    InvalidTolerance(&'static str),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("catalog entry `{entry}` has no parameter `{param}`")]
    UnknownParameter { entry: String, param: String },

    #[error("parameter `{param}` = {value} is out of range: {reason}")]
    InvalidParameter {
        param: String,
        value: f64,
        reason: &'static str,
    },
}

impl Error {
    pub(crate) fn dims(
        context: &'static str,
        expected: impl std::fmt::Display,
        found: impl std::fmt::Display,
    ) -> Self {
        Error::DimensionMismatch {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
