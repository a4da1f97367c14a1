use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("variable {0} has no assigned value")]
    MissingVariable(String),
    #[error("variable {0} is not declared for this polynomial")]
    UnknownVariable(String),
    #[error("variable {0} has no declared conjugate")]
    MissingConjugateDeclaration(String),
    #[error("non-finite coefficient")]
    NonFiniteCoefficient,
    #[error("cannot parse variable name {0:?}")]
    BadVariableName(String),

    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is singular (|det| = {det_abs:e})")]
    SingularMatrix { det_abs: f64 },
    #[error("index coincidence: {0}")]
    IndexCoincidence(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("expected length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("frame vectors and their conjugates do not span C^{dim}")]
    DegenerateFrame { dim: usize },

    #[error("singular Jacobian K at q = {q}: |det K| = {det_abs:e}")]
    SingularJacobian { det_abs: f64, q: String },
    #[error("Newton did not converge at q = {q}: residual {residual:e} after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        q: String,
    },
    #[error("seed residual {0:e} exceeds 1e-8")]
    InvalidSeed(f64),
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("finite-difference stencil could not be evaluated: {0}")]
    StencilFailure(String),
    #[error("J field could not be evaluated at a stencil point: {0}")]
    StepTooLarge(String),
    #[error("symbolic mode requested for a map that is not closed-form")]
    NonPolynomial,
    #[error("map is not holomorphic at this point (residual {0:e})")]
    NotHolomorphic(f64),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("formula not applicable: {0}")]
    FormulaInapplicable(String),
    #[error("f is not affine in w")]
    NotAffineInW,
    #[error("the w-linear part of f depends on z")]
    NonConstantWJacobian,
    #[error("df/dw is singular")]
    SingularWJacobian,

    #[error("gradient vanishes at the start point (|grad| = {0:e})")]
    CriticalPoint(f64),
    #[error("projection back onto the fibre failed: {0}")]
    ProjectionFailure(String),
    #[error("empty sample")]
    EmptySample,

    #[error("unknown example {0:?}")]
    UnknownExample(String),
    #[error("point lies outside the domain of the closed form (|denominator| = {0:e})")]
    DomainExcluded(f64),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the Newton solver or of the Jacobian.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::SingularJacobian { .. }
                | Error::NoConvergence { .. }
                | Error::DomainExcluded(_)
                | Error::StencilFailure(_)
                | Error::StepTooLarge(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
