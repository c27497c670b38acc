use thiserror::Error;

/// Errors raised by the numerical and data-handling routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PceError {
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("expected {expected} values for a {rows}x{cols} matrix, got {found}")]
    BadBufferLength {
        rows: usize,
        cols: usize,
        expected: usize,
        found: usize,
    },

    #[error("matrix is numerically zero")]
    ZeroMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix `{which}` is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { which: &'static str, asymmetry: f64 },

    #[error("metric matrix is not positive definite after adding ridge {ridge:e}")]
    NotPositiveDefinite { ridge: f64 },

    #[error("ridge must be finite and nonnegative, got {0}")]
    BadRidge(f64),

    #[error("symmetric eigensolver did not converge")]
    NotConverged,

    #[error("singular value spectrum is empty")]
    EmptySpectrum,

    #[error("singular values must be finite, nonnegative and nonincreasing (violated at index {index})")]
    NotSorted { index: usize },

    #[error("lambda must be positive and finite, got {0}")]
    InvalidLambda(f64),

    #[error("estimated dimension is 0 for lambda = {lambda}; use lambda > {min_lambda:e}")]
    DegenerateDimension { lambda: f64, min_lambda: f64 },

    #[error("k = {k} outside the valid range 1..={rank}")]
    BadK { k: usize, rank: usize },

    #[error("requested dimension {dim} exceeds the admissible maximum {max}")]
    BadDim { dim: usize, max: usize },

    #[error("refusing to materialize a {n}x{n} matrix (cap is {cap})")]
    TooLarge { n: usize, cap: usize },

    #[error("local Gram system of column {column} is singular; increase the regularizer")]
    DegenerateNeighborhood { column: usize },

    #[error("infeasible subspace spec: {0}")]
    InfeasibleSpec(String),

    #[error("class {class} has {count} samples; at least 2 are required to split")]
    TooFewSamples { class: usize, count: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("trial {trial} failed: {source}")]
    TrialFailed {
        trial: usize,
        #[source]
        source: Box<PceError>,
    },
}

pub type Result<T, E = PceError> = std::result::Result<T, E>;
