use serde::{Deserialize, Serialize};

use crate::exact::Subspace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Data carried by the "recurse on a smaller pair" failures. The toolkit does
/// not run the recursion itself; the payload names the smaller pair so the
/// caller can.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecursionPayload {
    /// Which reduction applies, e.g. `"h meets n0 trivially"`.
    pub reason: String,
    /// Ambient subalgebra of the smaller pair (for example l0).
    pub ambient: Subspace,
    /// The smaller subalgebra (for example the image of h in l0).
    pub sub: Subspace,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),
    #[error("basis vectors are linearly dependent")]
    LinearlyDependent,
    #[error("subspace is not closed under the bracket: {0}")]
    NotClosed(String),
    #[error(
        "Lie algebra is not reductive (radical dimension {radical}, center dimension {center})"
    )]
    NotReductive { radical: usize, center: usize },
    #[error("ad x is not semisimple (minimal polynomial {minpoly} is not squarefree)")]
    NotSemisimple { minpoly: String },
    #[error("ad x has eigenvalues outside Q (residual subspace of dimension {residual_dim})")]
    IrrationalSpectrum { residual_dim: usize },
    #[error("element is not ad-nilpotent")]
    NotNilpotent,
    #[error("element is zero")]
    ZeroElement,
    #[error("linear system has no solution: {0}")]
    Unsolvable(String),
    #[error("no normalizing semisimple element: {0}")]
    NoNormalizer(String),
    #[error("gamma is not positive ({}): recurse on the smaller pair", .0.reason)]
    GammaNotPositive(Box<RecursionPayload>),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("beta series diverges (term norm {0:e})")]
    SeriesDivergenceGuard(f64),
    #[error("chart is singular at the origin (det {0})")]
    SingularChart(f64),
    #[error("subalgebra is not theta-stable")]
    NotThetaStable,
    #[error("pair is not symmetric")]
    NotSymmetric,
    #[error("pair is not of reductive type")]
    NotReductiveType,
    #[error("invalid Cartan involution: {0}")]
    InvalidCartan(String),
    #[error("degenerate sampling box at {0:?}")]
    EmptyBox([f64; 2]),
    #[error("need at least {needed} positive estimates, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{context}: {message}")]
    Parse { context: String, message: String },
}

impl Error {
    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::InvariantViolation(msg.into())
    }
}
