use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("degenerate set: every band is narrower than the width floor")]
    Degenerate,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty real preimage")]
    EmptyPreimage,

    #[error("unbounded preimage: the function stays inside the target near infinity")]
    UnboundedPreimage,

    #[error("root finding did not converge near x = {0}")]
    RootNotConverged(f64),

    #[error("singular linear system (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("Frostman cross-check disagreement {spread:e} exceeds {limit:e}")]
    FrostmanMismatch { spread: f64, limit: f64 },

    #[error("quadrature did not converge: last estimate {estimate}, change {change:e}")]
    QuadratureNotConverged { estimate: f64, change: f64 },

    #[error("integrand returned NaN at x = {0}")]
    NanIntegrand(f64),

    #[error("pole at {0} lies inside the set")]
    PoleInSet(f64),

    #[error("tolerance unreachable: bracket [{lo:e}, {hi:e}]")]
    ToleranceUnreachable { lo: f64, hi: f64 },

    #[error("product weight hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("weight is not in the Szego class: {0}")]
    NotSzegoClass(String),

    #[error("Darboux refinement exceeded budget of {0} subcells")]
    RefinementBudget(usize),

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("linear program is unbounded")]
    LpUnbounded,

    #[error("iteration cap of {0} reached")]
    IterationCap(usize),

    #[error("non-positive recurrence coefficient beta_{index} = {value:e}")]
    NonPositiveBeta { index: usize, value: f64 },

    #[error("moments did not stabilize within the node budget")]
    MomentsNotConverged,

    #[error("gamma value {value} at index {index} is outside (0, 1/4)")]
    GammaOutOfRange { index: usize, value: f64 },

    #[error("tail of the gamma sequence is unknown beyond index {0}")]
    DivergentTail(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
