//! Error types for configuration, evaluation, and the optimization loop.

use thiserror::Error;

/// A configuration or parameter-space invariant was violated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("dimension must be at least 1")]
    EmptySpace,
    #[error("bounds mismatch: {lower} lower bounds vs {upper} upper bounds")]
    BoundsLengthMismatch { lower: usize, upper: usize },
    #[error("component {index}: lower bound {lower} is not below upper bound {upper}")]
    InvertedBounds {
        index: usize,
        lower: f64,
        upper: f64,
    },
    #[error("{name} = {value} outside the legal range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("population size {0} is below the minimum of 4")]
    PopulationTooSmall(usize),
    #[error("elite subset holds {size} individuals (ceil({elite} * {population})); at least 3 are required for mutation")]
    EliteTooSmall {
        elite: f64,
        population: usize,
        size: usize,
    },
    #[error("lifetime must be at least 1 generation")]
    ZeroLifetime,
    #[error("evaluation budget must be positive")]
    ZeroBudget,
    #[error("evaluation budget {budget} cannot cover the initial generation ({required} evaluations)")]
    BudgetBelowInitialGeneration { budget: u64, required: u64 },
    #[error("objective dimension {objective} does not match parameter space dimension {space}")]
    DimensionMismatch { objective: usize, space: usize },
}

/// A single objective evaluation failed.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("objective returned a non-finite value {value} for a point in the search box")]
    NonFinite { value: f64 },
    #[error("point outside the objective's domain: {0}")]
    Domain(String),
    #[error("evaluator fault (after one retry): {0}")]
    Fault(String),
    #[error("evaluator timed out after {0:?}")]
    Timeout(std::time::Duration),
    #[error("evaluator process is no longer running")]
    ProcessExited,
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("evaluator i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// A line on the external-evaluator wire did not follow the protocol.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("cannot encode an empty parameter vector")]
    EmptyVector,
    #[error("cannot encode non-finite component {index}")]
    NonFiniteComponent { index: usize },
    #[error("malformed protocol line: {line:?}")]
    Malformed { line: String },
    #[error("response id {got} does not match outstanding request id {expected}")]
    IdMismatch { expected: u64, got: u64 },
    #[error("expected READY handshake, got {line:?}")]
    BadHandshake { line: String },
}

/// One generation step could not complete. The population is left untouched
/// at the previous generation boundary in either case.
#[derive(Debug, Error)]
pub enum StepError {
    #[error("budget exhausted: generation needs {required} evaluations, {remaining} remain")]
    BudgetExhausted { required: u64, remaining: u64 },
    #[error("evaluation failed after spending {evaluations_spent} evaluations this generation: {source}")]
    Evaluation {
        #[source]
        source: EvalError,
        evaluations_spent: u64,
    },
}

/// A full optimization run aborted. Budget exhaustion is not an error; it
/// terminates the run with a [`TerminationReason`](crate::stats::TerminationReason).
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("evaluation failed in generation {generation}: {source}")]
    Evaluation {
        generation: u32,
        #[source]
        source: EvalError,
    },
}
