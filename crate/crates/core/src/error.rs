use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty stationary set")]
    EmptyStationarySet,

    #[error("no global Lipschitz bound for the {0} loss; supply a box")]
    NoGlobalLipschitz(&'static str),

    #[error("not prox-bounded at this step size (gamma = {gamma}, threshold = {threshold})")]
    NotProxBounded { gamma: f64, threshold: f64 },

    #[error("operation requires a separable penalty")]
    NotSeparable,

    #[error("penalty family has no planar subdifferential graph")]
    NoGraph,

    #[error("Hessian is not available for the {0} loss")]
    UnsupportedHessian(&'static str),

    #[error("point not on graph")]
    PointNotOnGraph,

    #[error("{n} coordinates exceed the combinatorial limit of {limit}; use empirical estimation")]
    TooManyCoordinates { n: usize, limit: usize },

    #[error("point is not proximal-stationary (residual {residual:e})")]
    NotStationary { residual: f64 },

    #[error("subdifferential graph is not closed near the point")]
    GraphNotClosed,

    #[error("theory mode requires gamma < 1/L (gamma = {gamma}, 1/L = {limit})")]
    StepSizeTooLarge { gamma: f64, limit: f64 },

    #[error("step condition tau*sigma*||K||^2 < 1 violated (value {0})")]
    StepCondition(f64),

    #[error("numeric abort at iteration {k}: {detail}")]
    NumericAbort { k: usize, detail: String },

    #[error("oracle window exhausted: {0}")]
    OracleWindow(String),

    #[error("oracle found no solution in the search window")]
    OracleNoSolution,

    #[error("unsolvable subproblem: {0}")]
    UnsolvableSubproblem(String),

    #[error("no informative steps")]
    NoInformativeSteps,

    #[error("too few usable points for a rate fit ({got} < {need})")]
    TooFewPoints { got: usize, need: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
