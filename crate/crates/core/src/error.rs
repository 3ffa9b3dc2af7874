use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ground set of size {n} exceeds the enumeration cap {cap}")]
    GroundSetTooLarge { n: usize, cap: usize },

    #[error("set function is not grounded: value of the empty set is {0}")]
    NotGrounded(f64),

    #[error("element {0} is already in the set")]
    ElementInSet(usize),

    #[error("element {v} is outside the ground set of size {n}")]
    ElementOutOfRange { v: usize, n: usize },

    #[error("degenerate objective: every singleton has zero value")]
    DegenerateObjective,

    #[error("set function produced a non-finite value on {0}")]
    NonFinite(String),

    #[error("empty after preprocessing: every element alone exceeds the budget {theta}")]
    EmptyAfterPreprocessing { theta: f64 },

    #[error("no admissible epsilon in (0, 2] for k = {k}, gamma = {gamma}")]
    NoAdmissibleEpsilon { k: usize, gamma: f64 },

    #[error("infeasible: target {tau} exceeds the objective of the full ground set ({max})")]
    Infeasible { tau: f64, max: f64 },

    #[error("target unreachable: f(V) = {max} is below alpha * tau = {needed}")]
    TargetUnreachable { needed: f64, max: f64 },

    #[error("primal failure at full budget {budget}: f = {value} < alpha * tau = {needed}")]
    PrimalFailure {
        budget: f64,
        value: f64,
        needed: f64,
    },

    #[error("agent-0 is always a participant and cannot be selected")]
    AgentZeroSelected,

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
