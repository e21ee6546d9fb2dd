use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("sphere dimension must be at least 2 (ambient 3), got ambient {0}")]
    DimensionTooSmall(usize),

    #[error("zero or non-finite vector cannot be normalized")]
    Degenerate,

    #[error("antipodal points have no canonical geodesic")]
    Antipodal,

    #[error("a cycle needs at least 2 control points, got {0}")]
    TooFewPoints(usize),

    #[error("cycle has zero total length")]
    ZeroLength,

    #[error("quadrature did not converge: last two estimates {previous:e} and {current:e}")]
    QuadratureNonConvergence { previous: f64, current: f64 },

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("missing acceleration map, curvature is unavailable")]
    MissingAcceleration,

    #[error("curve is not a {required}-design (max residual {residual:e})")]
    NotADesign { required: usize, residual: f64 },

    #[error("no sign change found: {0}")]
    NoBracket(String),

    #[error("solver failed: {0}")]
    SolverFailure(String),

    #[error("graph error: {0}")]
    Graph(String),

    #[error("parse error: {0}")]
    Parse(String),
}
