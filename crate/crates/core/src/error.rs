use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain ({a},{b})x({c},{d}): need a < b and c < d")]
    InvalidDomain { a: f64, b: f64, c: f64, d: f64 },

    #[error("malformed mesh: {0}")]
    MalformedMesh(String),

    #[error("polynomial degree {0} not supported (need 1..=4)")]
    UnsupportedDegree(usize),

    #[error("no quadrature rule of degree {0}")]
    UnsupportedQuadrature(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in iteration {iteration} (matrix indefinite or corrupted)")]
    NonFinite { iteration: usize },

    #[error("CG did not converge: relative residual {residual:e} after {iterations} iterations")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("operator is singular: constants lie in its kernel")]
    SingularOperator,

    #[error("singular local mass block on element {0}")]
    SingularMass(usize),

    #[error("t_final / dt = {0} is not an integer")]
    NonIntegralSteps(f64),

    #[error("time step must be positive, got {0}")]
    InvalidTimeStep(f64),

    #[error("solve failed at step {step}: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("operation requires dirichlet_lateral boundary mode")]
    NotDirichletMode,

    #[error("errors must be positive to compute a rate, got {0:e} and {1:e}")]
    InvalidRate(f64, f64),

    #[error("energy increased at step {step}: {before:e} -> {after:e}")]
    StabilityViolation { step: usize, before: f64, after: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
