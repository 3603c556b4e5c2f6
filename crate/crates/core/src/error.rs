use alloc::string::String;

/// Broad failure class, used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// The caller supplied malformed or inconsistent input.
    Data,
    /// The inputs were well formed but the estimator could not proceed.
    Estimation,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    #[error("column {index} is constant and cannot be standardized")]
    ConstantColumn { index: usize },

    #[error("design matrix has no columns")]
    EmptyDesign,

    #[error("cholesky factorization failed at pivot {pivot}: matrix is not positive definite")]
    NotPositiveDefinite { pivot: usize },

    #[error("least-squares design is rank deficient (estimated rank {rank} of {cols} columns)")]
    Singular { rank: usize, cols: usize },

    #[error("too many selected controls: {selected} selected with n = {n}")]
    TooManySelected { selected: usize, n: usize },

    #[error("treatment is perfectly explained by the selected controls")]
    IdentificationFailure,

    #[error("first-stage boosting selected no instruments")]
    WeakInstrument,

    #[error("predicted instrument is degenerate (Q = {q:e})")]
    DegenerateInstrument { q: f64 },

    #[error("infeasible simulation design: {0}")]
    InfeasibleSpec(String),

    #[error("estimator {estimator} cannot be applied to this design")]
    UnsupportedEstimator { estimator: &'static str },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidInput(_)
            | Error::NonFinite { .. }
            | Error::ConstantColumn { .. }
            | Error::EmptyDesign
            | Error::InfeasibleSpec(_)
            | Error::UnsupportedEstimator { .. } => ErrorCategory::Data,
            Error::NotPositiveDefinite { .. }
            | Error::Singular { .. }
            | Error::TooManySelected { .. }
            | Error::IdentificationFailure
            | Error::WeakInstrument
            | Error::DegenerateInstrument { .. } => ErrorCategory::Estimation,
        }
    }

    /// Short stable identifier, suitable for machine-parsable output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::NonFinite { .. } => "non_finite",
            Error::ConstantColumn { .. } => "constant_column",
            Error::EmptyDesign => "empty_design",
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::Singular { .. } => "singular",
            Error::TooManySelected { .. } => "too_many_selected",
            Error::IdentificationFailure => "identification_failure",
            Error::WeakInstrument => "weak_instrument",
            Error::DegenerateInstrument { .. } => "degenerate_instrument",
            Error::InfeasibleSpec(_) => "infeasible_spec",
            Error::UnsupportedEstimator { .. } => "unsupported_estimator",
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
