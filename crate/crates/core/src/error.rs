use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("not J-dissipative: smallest eigenvalue of the dissipativity form is {margin:e}")]
    NotDissipative { margin: f64 },

    #[error("subspace is not a graph over H-: condition number {cond:e}")]
    NotAGraph { cond: f64 },

    #[error("basis is rank deficient: smallest singular value {sigma_min:e}")]
    RankDeficient { sigma_min: f64 },

    #[error("spectrum touches real axis (|Im λ| = {distance:e}); increase regularization")]
    SpectrumOnAxis { distance: f64 },

    #[error("spectral subspace has dimension {found}, expected {expected}")]
    SplitDimension { expected: usize, found: usize },

    #[error("point is not in the open unit ball: norm {norm}")]
    OutsideBall { norm: f64 },

    #[error("map undefined at W: denominator condition number {cond:e}")]
    SingularDenominator { cond: f64 },

    #[error("expected a norm C >= 1, got {0}")]
    NormBelowOne(f64),

    #[error("degenerate form: pencil eigenvalue {eigenvalue:e} is numerically zero")]
    DegeneratePencil { eigenvalue: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("matrix is not invertible: {0}")]
    NotInvertible(String),

    #[error("function is not positive definite: {negatives} negative squares")]
    NotPd { negatives: usize },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}
