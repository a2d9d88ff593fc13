use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("bidegree mismatch: ({0}, {1}) vs ({2}, {3})")]
    BidegreeMismatch(usize, usize, usize, usize),

    #[error("{what} = {value} is out of range (allowed {min}..={max})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("reference volume form has zero top coefficient")]
    ZeroVolume,

    #[error("expected a top-degree ({m}, {m}) form, got ({p}, {q})")]
    NotTopDegree { m: usize, p: usize, q: usize },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("matrix is not hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("direction vector is zero")]
    ZeroVector,

    #[error(
        "tensor is not Hermite-Einstein within {tol:e} (max |T - lambda Id| = {deviation:e}); \
         use the general identity instead"
    )]
    NotHermiteEinstein { deviation: f64, tol: f64 },

    #[error("tensor is not projectively flat within {tol:e} (deviation {deviation:e})")]
    NotProjectivelyFlat { deviation: f64, tol: f64 },

    #[error("form is not primitive: gamma_1 = {trace:e} exceeds {tol:e}")]
    NotPrimitive { trace: f64, tol: f64 },

    #[error("first Chern form entry c_0 is not the unit")]
    NonUnitLeading,

    #[error("invalid curvature tensor: {0}")]
    InvalidTensor(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Stable machine-readable tag used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::BidegreeMismatch(..) => "bidegree_mismatch",
            Error::OutOfRange { .. } => "out_of_range",
            Error::ZeroVolume => "zero_volume",
            Error::NotTopDegree { .. } => "not_top_degree",
            Error::NotPositiveDefinite => "not_positive_definite",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::ZeroVector => "zero_vector",
            Error::NotHermiteEinstein { .. } => "not_hermite_einstein",
            Error::NotProjectivelyFlat { .. } => "not_projectively_flat",
            Error::NotPrimitive { .. } => "not_primitive",
            Error::NonUnitLeading => "non_unit_leading",
            Error::InvalidTensor(_) => "invalid_tensor",
            Error::Invalid(_) => "invalid_input",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
