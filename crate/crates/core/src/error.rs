use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("gram matrix is not symmetric (entry {row},{col})")]
    GramNotSymmetric { row: usize, col: usize },

    #[error("gram matrix is not positive definite (leading minor {order} is {minor})")]
    GramNotPositiveDefinite { order: usize, minor: BigInt },

    #[error("automorphism does not square to -1")]
    AutSquareNotMinusOne,

    #[error("automorphism does not preserve the gram matrix")]
    AutNotIsometry,

    #[error("automorphism is not integral in the chosen basis")]
    AutNotIntegral,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("lattice is not unimodular (elementary divisor {0})")]
    NotUnimodular(BigInt),

    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("bilinear form is not symmetric")]
    NotSymmetric,

    #[error("bilinear form is degenerate")]
    Degenerate,

    #[error("symplectic form has no orthonormal basis")]
    NoOrthonormalBasis,

    #[error("bilinear form is not alternating")]
    NotAlternating,

    #[error("quadratic form value {value} on basis vector {index} does not reduce to b(x,x)")]
    DiagonalParity { index: usize, value: u8 },

    #[error("vector length {got} does not match dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("dimension {dim} exceeds enumeration bound {bound}")]
    EnumerationBound { dim: usize, bound: usize },

    #[error("inconsistent Gauss sum {re}{im:+}i for dimension {dim}")]
    InconsistentGaussSum { re: i128, im: i128, dim: usize },

    #[error("point is not in the i-invariant subspace")]
    NotInvariantPoint,

    #[error("theta truncation needs radius {radius:.3} (about {terms:.3e} terms), above the budget of {budget} terms")]
    ThetaBudget { radius: f64, terms: f64, budget: u64 },

    #[error("period matrix invalid: {0}")]
    PeriodMatrix(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad input rather than by a failed
    /// mathematical check.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Internal(_) | Error::InconsistentGaussSum { .. })
    }
}
