use thiserror::Error;

/// Errors raised by the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid physical setup: {0}")]
    InvalidSetup(String),

    #[error("negative discriminant: A(A+1) = {rhs} has no real root")]
    NegativeDiscriminant { rhs: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("no bound state: {0}")]
    NoBoundState(String),

    #[error("degenerate energy quadratic (leading coefficient {0})")]
    DegenerateQuadratic(f64),

    #[error("jet order {available} exhausted, depth {requested} needs order {required}")]
    OrderExhausted {
        requested: usize,
        available: usize,
        required: usize,
    },

    #[error("division by an identically zero rational function")]
    DivisionByZeroFn,

    #[error("evaluation point r = {0} sits on a pole of the generator")]
    PoleAtR(f64),

    #[error("termination determinant keeps one sign over the search window")]
    NoRootInWindow,

    #[error("unstable root: {0}")]
    Unstable(String),

    #[error("bad Kummer parameter: {0}")]
    BadParameter(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureFail(String),

    #[error("self-consistent loop did not converge after {iterations} iterations (last step {last_step:e})")]
    NotConverged { iterations: usize, last_step: f64 },

    #[error("eigenvalue {0} is not negative: no bound state on this grid")]
    PositiveEigenvalue(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    /// Short machine-readable name, used in status columns.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSetup(_) => "InvalidSetup",
            Error::NegativeDiscriminant { .. } => "NegativeDiscriminant",
            Error::DomainError(_) => "DomainError",
            Error::NoBoundState(_) => "NoBoundState",
            Error::DegenerateQuadratic(_) => "DegenerateQuadratic",
            Error::OrderExhausted { .. } => "OrderExhausted",
            Error::DivisionByZeroFn => "DivisionByZeroFn",
            Error::PoleAtR(_) => "PoleAtR",
            Error::NoRootInWindow => "NoRootInWindow",
            Error::Unstable(_) => "Unstable",
            Error::BadParameter(_) => "BadParameter",
            Error::QuadratureFail(_) => "QuadratureFail",
            Error::NotConverged { .. } => "NotConverged",
            Error::PositiveEigenvalue(_) => "PositiveEigenvalue",
            Error::InvalidGrid(_) => "InvalidGrid",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
