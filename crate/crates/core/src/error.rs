use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(
        "structure constants are not antisymmetric: c[{i}][{j}][{k}] = {a}, c[{j}][{i}][{k}] = {b}"
    )]
    NotAntisymmetric {
        i: usize,
        j: usize,
        k: usize,
        a: f64,
        b: f64,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("Jacobi identity fails: residual {residual:e} exceeds {tolerance:e}")]
    Jacobi { residual: f64, tolerance: f64 },

    #[error("distribution generators are linearly dependent")]
    DependentGenerators,

    #[error(
        "Gram matrix is not symmetric positive definite (smallest eigenvalue {min_eigenvalue:e})"
    )]
    DegenerateGram { min_eigenvalue: f64 },

    #[error("distribution is a subalgebra, not bracket generating")]
    NotContact,

    #[error("frame invariant violated: {0}")]
    InvalidFrame(String),

    #[error("canonical frame requires chi > 0 (got chi = {chi:e})")]
    ChiZero { chi: f64 },

    #[error("unclassifiable structure: {0}")]
    Unclassifiable(String),

    #[error("ratio check undefined: {0}")]
    RatioUndefined(String),

    #[error("integration produced a non-finite state at step {step}")]
    BlowUp { step: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point left the coordinate chart: {0}")]
    ChartExit(String),
}
