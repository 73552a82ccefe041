//! The objective contract and evaluation contexts.
//!
//! The engine maximizes. Every evaluation receives an [`EvalContext`]
//! carrying the run-wide evaluation index and a random stream derived from
//! `(run seed, index)`. Stochastic objectives (noise, simulated shot
//! scatter) draw from that stream only, so a batch of evaluations gives the
//! same results no matter how it is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::EvalError;

/// Per-evaluation context: the logical evaluation index within the run and
/// an independent random sub-stream reserved for this evaluation.
#[derive(Debug, Clone)]
pub struct EvalContext {
    pub index: u64,
    pub rng: ChaCha8Rng,
}

impl EvalContext {
    /// Context for the `index`-th evaluation of a run seeded with `seed`.
    ///
    /// Stream 0 of the keyed generator belongs to the engine's own draws;
    /// evaluation `i` gets stream `i + 1`.
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index + 1);
        Self { index, rng }
    }
}

/// A black-box objective function to maximize.
pub trait Objective: Send + Sync {
    fn dimension(&self) -> usize;

    /// Measures one point. Must return a finite value or an error.
    fn evaluate(&self, x: &[f64], ctx: &mut EvalContext) -> Result<f64, EvalError>;

    /// Budget units one call to [`evaluate`](Self::evaluate) consumes.
    /// Wrappers that internally average several measurements report the
    /// true total here.
    fn cost_per_evaluation(&self) -> u64 {
        1
    }

    /// Whether concurrent calls are allowed. Serial evaluators (a single
    /// lab instrument, one subprocess session) return false and the engine
    /// evaluates them one at a time even when workers are available.
    fn parallel_safe(&self) -> bool {
        true
    }
}

impl<O: Objective + ?Sized> Objective for &O {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn evaluate(&self, x: &[f64], ctx: &mut EvalContext) -> Result<f64, EvalError> {
        (**self).evaluate(x, ctx)
    }
    fn cost_per_evaluation(&self) -> u64 {
        (**self).cost_per_evaluation()
    }
    fn parallel_safe(&self) -> bool {
        (**self).parallel_safe()
    }
}

impl<O: Objective + ?Sized> Objective for Box<O> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn evaluate(&self, x: &[f64], ctx: &mut EvalContext) -> Result<f64, EvalError> {
        (**self).evaluate(x, ctx)
    }
    fn cost_per_evaluation(&self) -> u64 {
        (**self).cost_per_evaluation()
    }
    fn parallel_safe(&self) -> bool {
        (**self).parallel_safe()
    }
}

/// A deterministic objective from a plain function.
#[derive(Clone)]
pub struct FnObjective<F> {
    dimension: usize,
    function: F,
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> FnObjective<F> {
    pub fn new(dimension: usize, function: F) -> Self {
        Self {
            dimension,
            function,
        }
    }
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> Objective for FnObjective<F> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate(&self, x: &[f64], _ctx: &mut EvalContext) -> Result<f64, EvalError> {
        let value = (self.function)(x);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(EvalError::NonFinite { value })
        }
    }
}

/// Sign-flip adapter: minimizing `f` is maximizing `Negated(f)`.
///
/// Note the termination ratio std/|mean| changes meaning under negation
/// when values cross zero; the mean guard covers the pathological cases.
pub struct Negated<O>(pub O);

impl<O: Objective> Objective for Negated<O> {
    fn dimension(&self) -> usize {
        self.0.dimension()
    }
    fn evaluate(&self, x: &[f64], ctx: &mut EvalContext) -> Result<f64, EvalError> {
        self.0.evaluate(x, ctx).map(|v| -v)
    }
    fn cost_per_evaluation(&self) -> u64 {
        self.0.cost_per_evaluation()
    }
    fn parallel_safe(&self) -> bool {
        self.0.parallel_safe()
    }
}
