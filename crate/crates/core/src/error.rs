use thiserror::Error;

use crate::model::ConditionReport;
use crate::solver::SolveReport;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: need N >= 3")]
    InvalidDimension(usize),
    #[error("invalid grid size: {0}")]
    InvalidSize(String),
    #[error("non-finite value at node {0}")]
    NonFinite(usize),
    #[error("radial functions live on different grids")]
    GridMismatch,
    #[error("dilation factor must be positive, got {0}")]
    NonpositiveDilation(f64),
    #[error("g(t) is defined for t >= 0, got {0}")]
    NegativeT(f64),
    #[error("function is identically zero")]
    ZeroFunction,
    #[error("function is not in the admissible set (q = {q:.6e})")]
    NotInLambda { q: f64 },
    #[error("P(u_t) has no sign change on the bracket [{lo:.3e}, {hi:.3e}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("P(u_t) changes sign {count} times on the bracket; refine the grid")]
    MultipleSignChanges { count: usize },
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        report: Box<SolveReport>,
    },
    #[error("descent step left the admissible set and could not be rescued")]
    LeftLambda,
    #[error("constraint value 1 is unreachable: {0}")]
    ConstraintInfeasible(String),
    #[error("shooting bracket not found: {0}")]
    BracketNotFound(String),
    #[error("shooting integration failed: {0}")]
    StiffFailure(String),
    #[error("no ball on which V_inf - V > 0 and u != 0")]
    NoPositivityBall,
    #[error("preconditions failed: {}", failed_names(.0))]
    PreconditionFailed(Vec<ConditionReport>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn failed_names(reports: &[ConditionReport]) -> String {
    reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.condition.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
