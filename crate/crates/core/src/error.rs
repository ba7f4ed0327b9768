use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("temperature {theta} outside validity range [{min}, {max}]")]
    OutOfRange { theta: f64, min: f64, max: f64 },

    #[error("invalid material model: {0}")]
    InvalidModel(String),

    #[error("no equilibrium: free-energy jump {jump} is not positive")]
    NoEquilibrium { jump: f64 },

    #[error("geometry violation: {0}")]
    GeometryViolation(String),

    #[error("degenerate equilibrium: {0}")]
    Degenerate(String),

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("singular problem: {0}")]
    SingularProblem(String),

    #[error("ill-conditioned collocation system (condition estimate {estimate:.3e})")]
    IllConditioned { estimate: f64 },

    #[error("incompatible Neumann data (compatibility residual {residual:.3e})")]
    IncompatibleData { residual: f64 },

    #[error("unsupported mode l = {l}")]
    UnsupportedMode { l: usize },

    #[error("quadrature grid mismatch: {0}")]
    GridMismatch(String),

    #[error("Gibbs-Thomson constraint drift {drift:.3e} exceeds tolerance")]
    ConstraintDrift { drift: f64 },

    #[error("time step rejected: {0}")]
    StepRejected(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable name of the error variant, used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::OutOfRange { .. } => "OutOfRange",
            Error::InvalidModel(_) => "InvalidModel",
            Error::NoEquilibrium { .. } => "NoEquilibrium",
            Error::GeometryViolation(_) => "GeometryViolation",
            Error::Degenerate(_) => "Degenerate",
            Error::NoRoot(_) => "NoRoot",
            Error::SingularProblem(_) => "SingularProblem",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::IncompatibleData { .. } => "IncompatibleData",
            Error::UnsupportedMode { .. } => "UnsupportedMode",
            Error::GridMismatch(_) => "GridMismatch",
            Error::ConstraintDrift { .. } => "ConstraintDrift",
            Error::StepRejected(_) => "StepRejected",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
