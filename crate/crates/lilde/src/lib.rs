//! Derivative-free global optimization for noisy, drifting experiments.
//!
//! `lilde` implements differential evolution with two additions aimed at
//! objectives measured on real apparatus: every individual's measured
//! fitness expires after a configurable number of generations and is then
//! re-measured (so noise-inflated outliers cannot accumulate and the
//! population follows slow environmental drift), and runs terminate once
//! the generation's fitness spread, std divided by mean, falls below a
//! threshold.
//!
//! The crate ships the optimization engine, benchmark objectives with
//! noise/drift/resampling wrappers, a line-oriented subprocess protocol
//! for external evaluators (lab control software in any language), and a
//! sweep harness that reproduces the scaling and noise-robustness
//! behavior of the algorithm on Ackley's function.
//!
//! ```
//! use lilde::objectives::AckleyMax;
//! use lilde::{run, OptimizerConfig};
//!
//! let objective = AckleyMax::new(2);
//! let space = objective.space();
//! let config = OptimizerConfig::new(20).with_seed(1);
//! let trace = run(&space, config, &objective).unwrap();
//! assert!(trace.final_best.fitness() > 27.0);
//! ```

pub mod config;
pub mod engine;
pub mod error;
pub mod harness;
pub mod objective;
pub mod objectives;
pub mod population;
pub mod protocol;
pub mod space;
pub mod stats;

pub use config::{Lifetime, OptimizerConfig};
pub use engine::{
    check_termination, elite_indices, init_population, mutate, recombine, refresh_expired, run,
    select, Engine, EvalDispatcher, Execution,
};
pub use error::{ConfigError, EvalError, ProtocolError, RunError, StepError};
pub use objective::{EvalContext, FnObjective, Negated, Objective};
pub use population::{Individual, Population};
pub use space::ParameterSpace;
pub use stats::{GenerationStats, OptimizationTrace, TerminationDecision, TerminationReason};
