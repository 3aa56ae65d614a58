use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("invalid measure space: {0}")]
    InvalidMeasure(String),
    #[error("requested measure {requested} outside [0, {available}]")]
    OutOfRange { requested: f64, available: f64 },
    #[error("invalid rank policy: threshold must be positive")]
    InvalidPolicy,
    #[error("family is not a frame (lower bound {lower:e}, upper bound {upper:e})")]
    NotAFrame { lower: f64, upper: f64 },
    #[error("families live on different discretized spaces")]
    SpaceMismatch,
    #[error("resolution operator is not invertible (condition {condition:e})")]
    NotInvertible { condition: f64 },
    #[error("analysis operator is not injective (rank {rank} < dimension {dim})")]
    NotInjective { rank: usize, dim: usize },
    #[error("synthesis operator is not surjective (rank {rank} < dimension {dim})")]
    NotSurjective { rank: usize, dim: usize },
    #[error("basis is not orthonormal (max Gram deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },
    #[error("pair is degenerate on its span: {0}")]
    PairDegenerate(String),
    #[error("the two kernel expansions disagree (max deviation {deviation:e})")]
    SumsDisagree { deviation: f64 },
    #[error("invalid gallery spec: {0}")]
    InvalidSpec(String),
}

impl Error {
    /// True for errors where the input was well formed but a numerical
    /// precondition (frame, invertibility, rank) failed.
    pub fn is_numerical_refusal(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. }
                | Error::NotAFrame { .. }
                | Error::NotInvertible { .. }
                | Error::NotInjective { .. }
                | Error::NotSurjective { .. }
                | Error::NotOrthonormal { .. }
                | Error::PairDegenerate(_)
                | Error::SumsDisagree { .. }
        )
    }
}
