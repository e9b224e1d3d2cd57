use num_complex::Complex64;

/// Errors raised by the backward-error library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point {0} is a pole of the rational matrix polynomial")]
    PoleAtPoint(Complex64),
    #[error("weight w_{index} vanishes at {point}")]
    ZeroWeight { index: usize, point: Complex64 },
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("mapping constraint violated: {what} (residual {residual:e})")]
    ConstraintViolated { what: &'static str, residual: f64 },
    #[error("weight w_{0} has no definite parity")]
    NoDefiniteParity(usize),
    #[error("coefficients do not carry the {tag} structure: {detail}")]
    StructureMismatch { tag: String, detail: String },
    #[error("lambda is real; the unstructured closed form applies")]
    RealLambdaShortcut,
    #[error("|lambda| = 1 lies in the unit-circle exclusion zone")]
    UnitCircleLambda,
    #[error("lambda = {0} lies in the critical set {{0, 1, -1}}")]
    CriticalLambda(Complex64),
    #[error("lambda = 0 is excluded for this structure")]
    ZeroLambda,
    #[error("G(lambda) is singular at {0}")]
    SingularAtLambda(Complex64),
    #[error("objective unbounded below; constraint family is not indefinite")]
    Unbounded,
    #[error("iteration budget of {0} exhausted")]
    MaxIterations(usize),
    #[error("constraint family is rank deficient (sigma_2 = {0:e})")]
    RankDeficientConstraints(f64),
    #[error("certificate gives v_lambda = 0")]
    ZeroCertificate,
    #[error("rational matrix polynomial is numerically singular")]
    SingularRmp,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("problem too large for the brute-force oracle (N = {0})")]
    TooLarge(usize),
}

impl Error {
    /// Short machine-readable name of the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::PoleAtPoint(_) => "pole",
            Error::ZeroWeight { .. } => "zero_weight",
            Error::ZeroVector => "zero_vector",
            Error::ConstraintViolated { .. } => "constraint_violated",
            Error::NoDefiniteParity(_) => "no_definite_parity",
            Error::StructureMismatch { .. } => "structure_mismatch",
            Error::RealLambdaShortcut => "real_lambda",
            Error::UnitCircleLambda => "unit_circle_lambda",
            Error::CriticalLambda(_) => "critical_lambda",
            Error::ZeroLambda => "zero_lambda",
            Error::SingularAtLambda(_) => "singular_at_lambda",
            Error::Unbounded => "unbounded",
            Error::MaxIterations(_) => "max_iterations",
            Error::RankDeficientConstraints(_) => "rank_deficient_constraints",
            Error::ZeroCertificate => "zero_certificate",
            Error::SingularRmp => "singular_rmp",
            Error::Dimension(_) => "dimension",
            Error::Invalid(_) => "invalid",
            Error::TooLarge(_) => "too_large",
        }
    }

    /// True when the input itself is unusable, as opposed to a solver failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::PoleAtPoint(_)
                | Error::ZeroWeight { .. }
                | Error::NoDefiniteParity(_)
                | Error::StructureMismatch { .. }
                | Error::RealLambdaShortcut
                | Error::UnitCircleLambda
                | Error::CriticalLambda(_)
                | Error::ZeroLambda
                | Error::SingularAtLambda(_)
                | Error::Dimension(_)
                | Error::Invalid(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
