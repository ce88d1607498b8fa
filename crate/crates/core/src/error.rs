use thiserror::Error;

/// Failures of the numerical routines.
///
/// Every variant is a violated precondition or a numerical breakdown that the
/// caller can act on; none of them indicate a bug.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("orthogonal matrix has determinant -1")]
    NegativeDeterminant,
    #[error("matrix logarithm is ambiguous: eigenvalue within {distance:e} of -1")]
    LogBranchAmbiguous { distance: f64 },
    #[error("matrix has complex eigenvalues (largest imaginary part {imag:e})")]
    ComplexEigenvalues { imag: f64 },
    #[error("eigenvalues are not separated (gap {gap:e})")]
    NearDefective { gap: f64 },
    #[error("no separating combination found after {tries} tries")]
    NoSeparatingBeta { tries: usize },
    #[error("line search stalled at iteration {iteration} (gradient norm {grad_norm:e})")]
    LineSearchStalled { iteration: usize, grad_norm: f64 },
    #[error("operator is singular (smallest singular value {sigma_min:e})")]
    SingularOperator { sigma_min: f64 },
    #[error("joint spectrum is degenerate (gamma = {gamma:e})")]
    DegenerateSpectrum { gamma: f64 },
    #[error("combination vector must have unit norm (norm {norm})")]
    NonUnitBeta { norm: f64 },
    #[error("pencil is rank deficient (relative singular value {ratio:e})")]
    RankDeficient { ratio: f64 },
    #[error("component matrix is singular")]
    SingularZ,
    #[error("column sum of component matrix vanishes at column {column}")]
    ZeroColumnSum { column: usize },
    #[error("ratio matrix is singular")]
    SingularY,
    #[error("dimension {d} too large for exhaustive enumeration (limit {limit})")]
    TooLarge { d: usize, limit: usize },
    #[error("no frame in the family lies in the same connected component")]
    NoComparableFrame,
}

impl Error {
    /// Stable identifier of the failure, used on diagnostic streams.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::InvalidInput(_) => "InvalidInput",
            Error::NegativeDeterminant => "NegativeDeterminant",
            Error::LogBranchAmbiguous { .. } => "LogBranchAmbiguous",
            Error::ComplexEigenvalues { .. } => "ComplexEigenvalues",
            Error::NearDefective { .. } => "NearDefective",
            Error::NoSeparatingBeta { .. } => "NoSeparatingBeta",
            Error::LineSearchStalled { .. } => "LineSearchStalled",
            Error::SingularOperator { .. } => "SingularOperator",
            Error::DegenerateSpectrum { .. } => "DegenerateSpectrum",
            Error::NonUnitBeta { .. } => "NonUnitBeta",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::SingularZ => "SingularZ",
            Error::ZeroColumnSum { .. } => "ZeroColumnSum",
            Error::SingularY => "SingularY",
            Error::TooLarge { .. } => "TooLarge",
            Error::NoComparableFrame => "NoComparableFrame",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_mismatch(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
