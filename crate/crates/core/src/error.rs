use alloc::string::String;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Block dimensions or trace weights are not admissible.
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    /// An element or matrix does not have the shape its algebra requires.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("kraus set is empty")]
    EmptyKraus,

    #[error("channel is not unital: |Σ q q* - I| = {residual:e}")]
    UnitalViolation { residual: f64 },

    #[error("channel is not trace-preserving: |Σ q* q - I| = {residual:e}")]
    TpViolation { residual: f64 },

    #[error("map is not completely positive: Choi eigenvalue {min_eigenvalue:e}")]
    CpViolation { min_eigenvalue: f64 },

    #[error("channels act on different algebras")]
    DomainMismatch,

    /// Two Kraus sets implement different channels.
    #[error("kraus sets are not equivalent: Choi residual {choi_residual:e}")]
    NotEquivalent { choi_residual: f64 },

    #[error("matrix is not unitary: |U*U - I| = {residual:e}")]
    NotUnitary { residual: f64 },

    /// The partial trace of `Ad_U` does not reproduce the channel.
    #[error("factorization mismatch: partial-trace residual {residual:e}")]
    FactorizationMismatch { residual: f64 },

    #[error("not a correlation matrix: {0}")]
    NotCorrelation(String),

    #[error("correlation matrix has imaginary entries (max {max_imag:e})")]
    NotReal { max_imag: f64 },

    #[error("probability vector invalid: {0}")]
    InvalidProbabilities(String),

    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },

    #[error("operator is not a contraction: norm {norm}")]
    NotContraction { norm: f64 },

    /// Spectral and direct multiplicative-domain computations disagree.
    #[error("multiplicative domain mismatch: spectral dim {spectral}, direct dim {direct}, angle {angle:e}")]
    MultiplicativeDomainMismatch {
        spectral: usize,
        direct: usize,
        angle: f64,
    },

    /// Matrix units only span full-block algebras' Kronecker formulas.
    #[error("operation requires a single full matrix block")]
    RequiresFullBlock,
}

pub type Result<T> = core::result::Result<T, Error>;
