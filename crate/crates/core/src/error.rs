use thiserror::Error;

/// Which side of a block full rank pencil a condition refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `K1` / `N1` (right dual basis).
    First,
    /// `K2` / `N2` (left dual basis).
    Second,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::First => write!(f, "K1/N1"),
            Side::Second => write!(f, "K2/N2"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("not defined at {0}")]
    NotDefinedAt(String),
    #[error("all entries are zero")]
    AllZeroMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("state matrix is singular (det A = 0)")]
    SingularStateMatrix,
    #[error("state matrix is not regular")]
    StateNotRegular,
    #[error("roots are not rational; irreducible factors: {}", .0.join(", "))]
    RootsNotRational(Vec<String>),
    #[error("system matrix is not minimal at {witness}")]
    PreconditionNotMinimal { witness: String },
    #[error("dual basis {side} is not of full row rank in the region (at {witness})")]
    DualBasisNotFullRankInRegion { side: Side, witness: String },
    #[error("row degrees of {0} are not uniform")]
    NonUniformRowDegrees(Side),
    #[error("reversed basis {0} is rank-deficient at 0")]
    ReversedBasisRankDeficient(Side),
    #[error("degree is not sharp: deg D = {deg_d}, deg N2 + deg N1 + 1 = {expected}")]
    NotSharpDegree { deg_d: i64, expected: i64 },
    #[error("realization is not minimal")]
    RealizationNotMinimal,
    #[error("unimodular completion failed for {0}")]
    UnimodularCompletionFailed(Side),
    #[error("tolerance not reached with {max_m} support points (error {error:.3e})")]
    ToleranceNotReached { max_m: usize, error: f64 },
    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),
    #[error("term {0}: coefficient pencil C - λD is singular")]
    SingularTermPencil(usize),
    #[error("pencil is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("function {name} not evaluable at {point}")]
    FunctionNotEvaluable { name: String, point: String },
    #[error("unknown function {0}")]
    UnknownFunction(String),
    #[error("invalid basis relation: {0}")]
    InvalidRelation(String),
    #[error("invalid barycentric approximant: {0}")]
    InvalidApprox(String),
    #[error("value is not exactly representable: {0}")]
    NotRepresentable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
