//! The differential-evolution generation loop with limited individual
//! lifetimes.
//!
//! One generation proceeds as: re-measure expired individuals, rank the
//! elite subset, build one trial per individual (mutation from three
//! distinct elite parents, then binomial crossover with a forced
//! component), measure all trials, and keep the better of each
//! parent/trial pair. Survivors age by one generation; fresh measurements
//! enter at age 0.
//!
//! Mutation follows DE/rand/1 restricted to the elite subset:
//! `v = x_j + F * (x_k - x_l)`, clamped onto the box
//! (Storn & Price 1997, J. Global Optimization 11).
//!
//! All random draws of a run come from one seeded generator: the engine
//! draws parents, forced indices, and crossover variates from stream 0 in
//! a fixed order, and evaluation `i` owns sub-stream `i + 1` (see
//! [`EvalContext`]). Trial measurements are applied in index order, so
//! sequential and data-parallel evaluation produce bit-identical runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Lifetime, OptimizerConfig};
use crate::error::{ConfigError, EvalError, RunError, StepError};
use crate::objective::{EvalContext, Objective};
use crate::population::{Individual, Population};
use crate::space::ParameterSpace;
use crate::stats::{
    GenerationStats, OptimizationTrace, TerminationDecision, TerminationReason,
};

/// How a batch of independent evaluations is dispatched.
///
/// `Parallel` uses rayon with the given thread count (0 = rayon's
/// default). Without the `parallel` feature it degrades to sequential
/// execution; results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel { threads: usize },
}

impl Default for Execution {
    fn default() -> Self {
        Execution::Sequential
    }
}

/// True when the crate was built with the `parallel` feature.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

/// Issues evaluation indices, dispatches batches, and keeps the budget
/// books. Results are always applied in index order.
pub struct EvalDispatcher<'a, O: Objective + ?Sized> {
    objective: &'a O,
    seed: u64,
    budget: u64,
    issued: u64,
    spent: u64,
    execution: Execution,
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl<'a, O: Objective + ?Sized> EvalDispatcher<'a, O> {
    pub fn new(objective: &'a O, seed: u64, budget: u64, execution: Execution) -> Self {
        #[cfg(feature = "parallel")]
        let pool = match execution {
            Execution::Parallel { threads } if threads > 0 => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .expect("failed to build evaluation thread pool"),
            ),
            _ => None,
        };
        Self {
            objective,
            seed,
            budget,
            issued: 0,
            spent: 0,
            execution,
            #[cfg(feature = "parallel")]
            pool,
        }
    }

    pub fn objective(&self) -> &O {
        self.objective
    }

    /// Budget units one logical evaluation consumes.
    pub fn cost(&self) -> u64 {
        self.objective.cost_per_evaluation()
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }

    pub fn remaining(&self) -> u64 {
        self.budget.saturating_sub(self.spent)
    }

    /// Evaluates a batch of points. On failure the dispatcher's books are
    /// only good for reporting; the error carries the budget units burned
    /// by the aborted batch.
    pub fn evaluate_batch(&mut self, points: &[Vec<f64>]) -> Result<Vec<f64>, StepError> {
        let cost = self.cost();
        let base = self.issued;
        let outcome = self.dispatch(points, base);
        self.issued += points.len() as u64;
        match outcome {
            Ok(values) => {
                self.spent += points.len() as u64 * cost;
                Ok(values)
            }
            Err((source, attempted)) => {
                let evaluations_spent = attempted * cost;
                self.spent += evaluations_spent;
                Err(StepError::Evaluation {
                    source,
                    evaluations_spent,
                })
            }
        }
    }

    /// Runs the batch; on error also reports how many evaluations were
    /// attempted before the batch aborted.
    fn dispatch(&self, points: &[Vec<f64>], base: u64) -> Result<Vec<f64>, (EvalError, u64)> {
        let concurrent = self.objective.parallel_safe()
            && matches!(self.execution, Execution::Parallel { .. });
        #[cfg(feature = "parallel")]
        if concurrent {
            return self.dispatch_parallel(points, base);
        }
        let _ = concurrent;
        self.dispatch_sequential(points, base)
    }

    fn dispatch_sequential(
        &self,
        points: &[Vec<f64>],
        base: u64,
    ) -> Result<Vec<f64>, (EvalError, u64)> {
        let mut values = Vec::with_capacity(points.len());
        for (offset, point) in points.iter().enumerate() {
            match self.evaluate_one(point, base + offset as u64) {
                Ok(value) => values.push(value),
                Err(err) => return Err((err, offset as u64 + 1)),
            }
        }
        Ok(values)
    }

    #[cfg(feature = "parallel")]
    fn dispatch_parallel(
        &self,
        points: &[Vec<f64>],
        base: u64,
    ) -> Result<Vec<f64>, (EvalError, u64)> {
        use rayon::prelude::*;

        let run = || {
            points
                .par_iter()
                .enumerate()
                .map(|(offset, point)| self.evaluate_one(point, base + offset as u64))
                .collect::<Vec<_>>()
        };
        let results = match &self.pool {
            Some(pool) => pool.install(run),
            None => run(),
        };
        let attempted = results.len() as u64;
        let mut values = Vec::with_capacity(results.len());
        for result in results {
            match result {
                Ok(value) => values.push(value),
                // First failure in index order wins, independent of
                // scheduling; every point was attempted.
                Err(err) => return Err((err, attempted)),
            }
        }
        Ok(values)
    }

    fn evaluate_one(&self, point: &[f64], index: u64) -> Result<f64, EvalError> {
        let mut ctx = EvalContext::new(self.seed, index);
        let value = self.objective.evaluate(point, &mut ctx)?;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(EvalError::NonFinite { value })
        }
    }
}

/// Draws the initial generation uniformly over the parameter space.
/// Individuals come back unevaluated, at generation 0.
pub fn init_population<R: Rng>(
    space: &ParameterSpace,
    config: &OptimizerConfig,
    rng: &mut R,
) -> Result<Population, ConfigError> {
    config.validate()?;
    let members = (0..config.population_size)
        .map(|_| Individual::unevaluated(space.sample(rng)))
        .collect();
    Ok(Population {
        members,
        generation: 0,
    })
}

/// Indices of the `ceil(E * N)` best individuals, ties broken by lower
/// index. Requires a fully evaluated population.
pub fn elite_indices(population: &Population, elite_fraction: f64) -> Result<Vec<usize>, ConfigError> {
    let n = population.size();
    let size = ((elite_fraction * n as f64).ceil() as usize).min(n);
    if size < 3 {
        return Err(ConfigError::EliteTooSmall {
            elite: elite_fraction,
            population: n,
            size,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        population.members[b]
            .fitness()
            .partial_cmp(&population.members[a].fitness())
            .expect("fitness values are finite")
            .then(a.cmp(&b))
    });
    order.truncate(size);
    Ok(order)
}

/// The raw mutation arithmetic: `x_j + F * (x_k - x_l)`, clamped onto the
/// box boundary component-wise.
pub fn mutant_from_parents(
    x_j: &[f64],
    x_k: &[f64],
    x_l: &[f64],
    amplification: f64,
    space: &ParameterSpace,
) -> Vec<f64> {
    let mut v: Vec<f64> = x_j
        .iter()
        .zip(x_k)
        .zip(x_l)
        .map(|((&j, &k), &l)| j + amplification * (k - l))
        .collect();
    space.clamp(&mut v);
    v
}

/// Builds one mutant from three distinct parents drawn uniformly from the
/// elite subset.
pub fn mutate<R: Rng>(
    population: &Population,
    elite: &[usize],
    amplification: f64,
    space: &ParameterSpace,
    rng: &mut R,
) -> Result<Vec<f64>, ConfigError> {
    let (j, k, l) = draw_parents(elite, rng)?;
    Ok(mutant_from_parents(
        &population.members[j].params,
        &population.members[k].params,
        &population.members[l].params,
        amplification,
        space,
    ))
}

/// Three distinct population indices drawn uniformly from the elite set.
pub fn draw_parents<R: Rng>(elite: &[usize], rng: &mut R) -> Result<(usize, usize, usize), ConfigError> {
    if elite.len() < 3 {
        return Err(ConfigError::EliteTooSmall {
            elite: f64::NAN,
            population: elite.len(),
            size: elite.len(),
        });
    }
    let mut picks = [0usize; 3];
    let mut found = 0;
    while found < 3 {
        let candidate = elite[rng.gen_range(0..elite.len())];
        if !picks[..found].contains(&candidate) {
            picks[found] = candidate;
            found += 1;
        }
    }
    Ok((picks[0], picks[1], picks[2]))
}

/// A trial vector plus the crossover bookkeeping needed to audit it.
#[derive(Debug, Clone, PartialEq)]
pub struct Recombination {
    pub trial: Vec<f64>,
    /// The always-crossed component m.
    pub forced_index: usize,
    /// Which components were taken from the mutant.
    pub from_mutant: Vec<bool>,
}

/// Binomial crossover: component `n` comes from the mutant when
/// `X_n <= CR` (X uniform over `(0, 1]`) or `n` equals the forced index
/// `m`, drawn uniformly per trial. Panics on dimension mismatch.
pub fn recombine_masked<R: Rng>(
    parent: &[f64],
    mutant: &[f64],
    crossover: f64,
    rng: &mut R,
) -> Recombination {
    assert_eq!(
        parent.len(),
        mutant.len(),
        "parent and mutant dimensions differ"
    );
    let d = parent.len();
    let forced_index = rng.gen_range(0..d);
    let mut trial = Vec::with_capacity(d);
    let mut from_mutant = Vec::with_capacity(d);
    for n in 0..d {
        let x: f64 = 1.0 - rng.gen::<f64>(); // uniform over (0, 1]
        let cross = x <= crossover || n == forced_index;
        trial.push(if cross { mutant[n] } else { parent[n] });
        from_mutant.push(cross);
    }
    Recombination {
        trial,
        forced_index,
        from_mutant,
    }
}

/// Binomial crossover returning just the trial vector.
pub fn recombine<R: Rng>(parent: &[f64], mutant: &[f64], crossover: f64, rng: &mut R) -> Vec<f64> {
    recombine_masked(parent, mutant, crossover, rng).trial
}

/// Greedy survivor selection; equal fitness keeps the trial, whose
/// measurement is fresher.
pub fn select(parent: Individual, trial: Individual) -> Individual {
    if trial.fitness() >= parent.fitness() {
        trial
    } else {
        parent
    }
}

/// Re-measures every individual whose fitness is `lifetime` generations
/// old, replacing (not averaging) the stored value and resetting its age.
/// Returns the number of evaluations spent.
pub fn refresh_expired<O: Objective + ?Sized>(
    population: &mut Population,
    lifetime: Lifetime,
    dispatcher: &mut EvalDispatcher<'_, O>,
) -> Result<u64, StepError> {
    let expired: Vec<usize> = (0..population.size())
        .filter(|&i| lifetime.is_expired(population.members[i].age))
        .collect();
    if expired.is_empty() {
        return Ok(0);
    }
    let cost = dispatcher.cost();
    let required = expired.len() as u64 * cost;
    if dispatcher.remaining() < required {
        return Err(StepError::BudgetExhausted {
            required,
            remaining: dispatcher.remaining(),
        });
    }
    let points: Vec<Vec<f64>> = expired
        .iter()
        .map(|&i| population.members[i].params.clone())
        .collect();
    let values = dispatcher.evaluate_batch(&points)?;
    for (&i, value) in expired.iter().zip(values) {
        population.members[i].fitness = Some(value);
        population.members[i].age = 0;
    }
    Ok(required)
}

/// Termination verdict for one generation's statistics: stop once
/// std / |mean| falls below `threshold`, unless |mean| is below the guard,
/// in which case the ratio is meaningless.
pub fn check_termination(
    stats: &GenerationStats,
    threshold: f64,
    mean_guard: f64,
) -> TerminationDecision {
    if stats.mean.abs() < mean_guard {
        TerminationDecision::InapplicableGuard
    } else if stats.spread_ratio() < threshold {
        TerminationDecision::Terminate
    } else {
        TerminationDecision::Continue
    }
}

/// A configured optimization in progress. Create, [`initialize`](Self::initialize),
/// then either drive [`step`](Self::step) manually or let [`run`](Self::run)
/// loop to termination.
pub struct Engine<'a, O: Objective + ?Sized> {
    space: &'a ParameterSpace,
    config: OptimizerConfig,
    dispatcher: EvalDispatcher<'a, O>,
    rng: ChaCha8Rng,
    population: Population,
    history: Vec<GenerationStats>,
}

impl<'a, O: Objective + ?Sized> Engine<'a, O> {
    pub fn new(
        space: &'a ParameterSpace,
        config: OptimizerConfig,
        objective: &'a O,
    ) -> Result<Self, ConfigError> {
        Self::with_execution(space, config, objective, Execution::Sequential)
    }

    pub fn with_execution(
        space: &'a ParameterSpace,
        config: OptimizerConfig,
        objective: &'a O,
        execution: Execution,
    ) -> Result<Self, ConfigError> {
        config.validate()?;
        if objective.dimension() != space.dimension() {
            return Err(ConfigError::DimensionMismatch {
                objective: objective.dimension(),
                space: space.dimension(),
            });
        }
        let initial_cost = config.population_size as u64 * objective.cost_per_evaluation();
        if config.max_evaluations < initial_cost {
            return Err(ConfigError::BudgetBelowInitialGeneration {
                budget: config.max_evaluations,
                required: initial_cost,
            });
        }
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        let dispatcher =
            EvalDispatcher::new(objective, config.seed, config.max_evaluations, execution);
        Ok(Self {
            space,
            config,
            dispatcher,
            rng,
            population: Population {
                members: Vec::new(),
                generation: 0,
            },
            history: Vec::new(),
        })
    }

    /// Draws and measures generation 0.
    pub fn initialize(&mut self) -> Result<&GenerationStats, RunError> {
        let population = init_population(self.space, &self.config, &mut self.rng)?;
        let points: Vec<Vec<f64>> = population
            .members
            .iter()
            .map(|m| m.params.clone())
            .collect();
        self.population = population;
        let values = self
            .dispatcher
            .evaluate_batch(&points)
            .map_err(|e| self.run_error(e))?;
        for (member, value) in self.population.members.iter_mut().zip(values) {
            member.fitness = Some(value);
            member.age = 0;
        }
        self.push_stats();
        Ok(self.history.last().expect("stats just pushed"))
    }

    /// Advances one full generation. On error the population is unchanged
    /// at the previous generation boundary.
    pub fn step(&mut self) -> Result<&GenerationStats, StepError> {
        assert!(
            !self.history.is_empty(),
            "initialize() must run before step()"
        );
        let n = self.population.size();
        let cost = self.dispatcher.cost();
        let expired = self
            .population
            .members
            .iter()
            .filter(|m| self.config.lifetime.is_expired(m.age))
            .count();
        let required = (expired + n) as u64 * cost;
        if self.dispatcher.remaining() < required {
            return Err(StepError::BudgetExhausted {
                required,
                remaining: self.dispatcher.remaining(),
            });
        }

        let refresh_spent =
            refresh_expired(&mut self.population, self.config.lifetime, &mut self.dispatcher)?;

        let elite = elite_indices(&self.population, self.config.elite_fraction)
            .expect("validated configuration");
        let trials: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mutant = mutate(
                    &self.population,
                    &elite,
                    self.config.amplification,
                    self.space,
                    &mut self.rng,
                )
                .expect("validated configuration");
                recombine(
                    &self.population.members[i].params,
                    &mutant,
                    self.config.crossover,
                    &mut self.rng,
                )
            })
            .collect();

        let values = self.dispatcher.evaluate_batch(&trials).map_err(|e| match e {
            StepError::Evaluation {
                source,
                evaluations_spent,
            } => StepError::Evaluation {
                source,
                evaluations_spent: evaluations_spent + refresh_spent,
            },
            other => other,
        })?;

        // Pairwise greedy selection in index order; ties keep the trial.
        // Surviving parents age one generation, winners enter at age 0.
        for (i, (trial, value)) in trials.into_iter().zip(values).enumerate() {
            let parent = &mut self.population.members[i];
            if value >= parent.fitness() {
                *parent = Individual {
                    params: trial,
                    fitness: Some(value),
                    age: 0,
                };
            } else {
                parent.age += 1;
            }
        }
        self.population.generation += 1;
        self.push_stats();
        Ok(self.history.last().expect("stats just pushed"))
    }

    fn push_stats(&mut self) {
        self.history.push(GenerationStats::from_population(
            &self.population,
            self.dispatcher.spent(),
        ));
    }

    fn run_error(&self, err: StepError) -> RunError {
        match err {
            StepError::Evaluation { source, .. } => RunError::Evaluation {
                generation: self.population.generation,
                source,
            },
            StepError::BudgetExhausted { .. } => {
                unreachable!("budget pre-checked before evaluation")
            }
        }
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn history(&self) -> &[GenerationStats] {
        &self.history
    }

    pub fn evaluations_spent(&self) -> u64 {
        self.dispatcher.spent()
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    /// Loops initialize/step until the termination threshold fires or the
    /// budget cannot cover another generation.
    pub fn run(mut self) -> Result<OptimizationTrace, RunError> {
        if self.history.is_empty() {
            self.initialize()?;
        }
        loop {
            let last = self.history.last().expect("initialized");
            match check_termination(last, self.config.termination_threshold, self.config.mean_guard)
            {
                TerminationDecision::Terminate => {
                    return Ok(self.into_trace(TerminationReason::ThresholdMet));
                }
                TerminationDecision::Continue | TerminationDecision::InapplicableGuard => {}
            }
            match self.step() {
                Ok(_) => {}
                Err(StepError::BudgetExhausted { .. }) => {
                    return Ok(self.into_trace(TerminationReason::BudgetExhausted));
                }
                Err(err) => return Err(self.run_error(err)),
            }
        }
    }

    fn into_trace(self, reason: TerminationReason) -> OptimizationTrace {
        OptimizationTrace {
            final_best: self.population.best().clone(),
            generations: self.history,
            reason,
        }
    }
}

/// One-call front: initialize and run to termination.
pub fn run<O: Objective + ?Sized>(
    space: &ParameterSpace,
    config: OptimizerConfig,
    objective: &O,
) -> Result<OptimizationTrace, RunError> {
    Engine::new(space, config, objective)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::FnObjective;

    fn unit_space(d: usize) -> ParameterSpace {
        ParameterSpace::symmetric(d, 0.0, 1.0).unwrap()
    }

    fn evaluated(vectors: &[&[f64]], fitnesses: &[f64]) -> Population {
        Population {
            members: vectors
                .iter()
                .zip(fitnesses)
                .map(|(v, &f)| Individual {
                    params: v.to_vec(),
                    fitness: Some(f),
                    age: 0,
                })
                .collect(),
            generation: 0,
        }
    }

    fn sphere(d: usize) -> FnObjective<impl Fn(&[f64]) -> f64> {
        FnObjective::new(d, |x: &[f64]| -x.iter().map(|v| v * v).sum::<f64>())
    }

    #[test]
    fn init_population_respects_bounds() {
        let space = ParameterSpace::new(vec![-1.0, 5.0], vec![1.0, 6.0]).unwrap();
        let mut config = OptimizerConfig::new(6);
        config.seed = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let population = init_population(&space, &config, &mut rng).unwrap();
        assert_eq!(population.size(), 6);
        assert_eq!(population.generation, 0);
        for member in &population.members {
            assert!(member.fitness.is_none());
            assert!((-1.0..=1.0).contains(&member.params[0]));
            assert!((5.0..=6.0).contains(&member.params[1]));
        }
    }

    #[test]
    fn init_population_is_deterministic() {
        let space = unit_space(1);
        let config = OptimizerConfig::new(4).with_seed(99);
        let mut rng_a = ChaCha8Rng::seed_from_u64(99);
        let mut rng_b = ChaCha8Rng::seed_from_u64(99);
        let a = init_population(&space, &config, &mut rng_a).unwrap();
        let b = init_population(&space, &config, &mut rng_b).unwrap();
        assert_eq!(a, b);
        for member in &a.members {
            assert!((0.0..=1.0).contains(&member.params[0]));
        }
    }

    #[test]
    fn init_population_rejects_invalid_config() {
        let space = unit_space(1);
        let config = OptimizerConfig::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(init_population(&space, &config, &mut rng).is_err());
    }

    #[test]
    fn elite_indices_picks_top_half() {
        let population = evaluated(&[&[0.0], &[0.0], &[0.0], &[0.0]], &[1.0, 5.0, 3.0, 2.0]);
        let elite = elite_indices(&population, 0.5).unwrap_err();
        // ceil(0.5 * 4) = 2 < 3: configuration error by contract.
        assert!(matches!(elite, ConfigError::EliteTooSmall { size: 2, .. }));
    }

    #[test]
    fn elite_indices_orders_by_fitness_then_index() {
        let population = evaluated(
            &[&[0.0]; 6],
            &[1.0, 5.0, 3.0, 2.0, 4.0, 0.5],
        );
        assert_eq!(elite_indices(&population, 0.5).unwrap(), vec![1, 4, 2]);
    }

    #[test]
    fn elite_indices_full_set_when_fraction_is_one() {
        let population = evaluated(&[&[0.0]; 4], &[1.0, 5.0, 3.0, 2.0]);
        assert_eq!(elite_indices(&population, 1.0).unwrap(), vec![1, 2, 3, 0]);
    }

    #[test]
    fn elite_indices_breaks_ties_by_lower_index() {
        let population = evaluated(&[&[0.0]; 6], &[7.0, 7.0, 7.0, 1.0, 1.0, 1.0]);
        assert_eq!(elite_indices(&population, 0.5).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn mutant_arithmetic_matches_de_rule() {
        let space = ParameterSpace::symmetric(2, -10.0, 10.0).unwrap();
        let v = mutant_from_parents(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], 0.9, &space);
        assert_eq!(v, vec![0.9, -0.9]);
    }

    #[test]
    fn mutant_is_clamped_onto_boundary() {
        let space = unit_space(2);
        let v = mutant_from_parents(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], 0.9, &space);
        assert_eq!(v, vec![0.9, 0.0]);
    }

    #[test]
    fn mutant_with_equal_valued_parents_is_x_j() {
        let space = unit_space(2);
        // Distinct indices, equal vectors: the difference vanishes.
        let v = mutant_from_parents(&[0.3, 0.4], &[0.7, 0.7], &[0.7, 0.7], 0.9, &space);
        assert_eq!(v, vec![0.3, 0.4]);
    }

    #[test]
    fn drawn_parents_are_distinct_elite_members() {
        let elite = vec![4, 1, 7, 2];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let (j, k, l) = draw_parents(&elite, &mut rng).unwrap();
            assert!(elite.contains(&j) && elite.contains(&k) && elite.contains(&l));
            assert!(j != k && k != l && j != l);
        }
    }

    #[test]
    fn mutate_requires_three_parents() {
        let population = evaluated(&[&[0.0]; 4], &[1.0, 2.0, 3.0, 4.0]);
        let space = unit_space(1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(mutate(&population, &[0, 1], 0.9, &space, &mut rng).is_err());
    }

    #[test]
    fn recombine_takes_mutant_everywhere_at_full_crossover() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trial = recombine(&[1.0, 1.0, 1.0], &[9.0, 8.0, 7.0], 1.0, &mut rng);
        assert_eq!(trial, vec![9.0, 8.0, 7.0]);
    }

    #[test]
    fn recombine_keeps_only_forced_component_in_zero_limit() {
        // CR -> 0: only the forced index m crosses over.
        for seed in 0..40 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = recombine_masked(&[1.0, 1.0, 1.0], &[9.0, 9.0, 9.0], 1e-300, &mut rng);
            let mut expected = vec![1.0, 1.0, 1.0];
            expected[r.forced_index] = 9.0;
            assert_eq!(r.trial, expected);
            assert_eq!(
                r.from_mutant.iter().filter(|&&b| b).count(),
                1,
                "exactly the forced component crosses"
            );
            assert!(r.from_mutant[r.forced_index]);
        }
    }

    #[test]
    fn recombine_forced_index_two_matches_example() {
        // Find a seed whose forced index lands on component 2.
        let r = (0..100)
            .map(|seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                recombine_masked(&[1.0, 1.0, 1.0], &[9.0, 9.0, 9.0], 1e-300, &mut rng)
            })
            .find(|r| r.forced_index == 2)
            .expect("some seed forces index 2");
        assert_eq!(r.trial, vec![1.0, 1.0, 9.0]);
    }

    #[test]
    #[should_panic(expected = "dimensions differ")]
    fn recombine_rejects_dimension_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        recombine(&[1.0, 2.0], &[1.0], 0.5, &mut rng);
    }

    #[test]
    fn select_prefers_higher_fitness_and_ties_keep_trial() {
        let ind = |f: f64| Individual {
            params: vec![f],
            fitness: Some(f),
            age: 3,
        };
        assert_eq!(select(ind(10.0), ind(12.0)).fitness(), 12.0);
        assert_eq!(select(ind(12.0), ind(10.0)).fitness(), 12.0);
        let tie = select(
            Individual {
                params: vec![1.0],
                fitness: Some(10.0),
                age: 3,
            },
            Individual {
                params: vec![2.0],
                fitness: Some(10.0),
                age: 0,
            },
        );
        assert_eq!(tie.params, vec![2.0], "tie keeps the fresher trial");
    }

    #[test]
    fn refresh_unlimited_lifetime_spends_nothing() {
        let objective = sphere(1);
        let mut population = evaluated(&[&[0.5]; 4], &[1.0, 2.0, 3.0, 4.0]);
        for m in &mut population.members {
            m.age = 50;
        }
        let before = population.clone();
        let mut dispatcher = EvalDispatcher::new(&objective, 0, 1000, Execution::Sequential);
        let spent = refresh_expired(&mut population, Lifetime::Unlimited, &mut dispatcher).unwrap();
        assert_eq!(spent, 0);
        assert_eq!(population, before);
    }

    #[test]
    fn refresh_spends_nothing_below_lifetime() {
        let objective = sphere(1);
        let mut population = evaluated(&[&[0.5]; 4], &[1.0, 2.0, 3.0, 4.0]);
        for m in &mut population.members {
            m.age = 9;
        }
        let mut dispatcher = EvalDispatcher::new(&objective, 0, 1000, Execution::Sequential);
        let spent =
            refresh_expired(&mut population, Lifetime::Limited(10), &mut dispatcher).unwrap();
        assert_eq!(spent, 0);
    }

    #[test]
    fn refresh_remeasures_expired_and_resets_age() {
        let objective = sphere(1);
        let vectors: Vec<Vec<f64>> = (0..15).map(|i| vec![i as f64 * 0.01]).collect();
        let refs: Vec<&[f64]> = vectors.iter().map(|v| v.as_slice()).collect();
        let fitnesses: Vec<f64> = vectors.iter().map(|v| -v[0] * v[0]).collect();
        let mut population = evaluated(&refs, &fitnesses);
        for i in [2, 7, 11] {
            population.members[i].age = 10;
        }
        let before = population.clone();
        let mut dispatcher = EvalDispatcher::new(&objective, 0, 1000, Execution::Sequential);
        let spent =
            refresh_expired(&mut population, Lifetime::Limited(10), &mut dispatcher).unwrap();
        assert_eq!(spent, 3);
        assert_eq!(dispatcher.spent(), 3);
        for i in 0..15 {
            // Deterministic objective: values re-measure identically.
            assert_eq!(population.members[i].fitness, before.members[i].fitness);
            assert_eq!(population.members[i].age, 0);
        }
    }

    #[test]
    fn termination_examples() {
        let stats = |values: &[f64]| {
            GenerationStats::from_population(
                &evaluated(
                    &values.iter().map(|_| [0.0].as_slice()).collect::<Vec<_>>(),
                    values,
                ),
                1,
            )
        };
        assert_eq!(
            check_termination(&stats(&[10.0, 10.0, 10.0]), 0.05, 1e-9),
            TerminationDecision::Terminate
        );
        assert_eq!(
            check_termination(&stats(&[10.0, 20.0]), 0.05, 1e-9),
            TerminationDecision::Continue
        );
        assert_eq!(
            check_termination(&stats(&[1e-12, -1e-12]), 0.05, 1e-6),
            TerminationDecision::InapplicableGuard
        );
    }

    #[test]
    fn step_spends_exactly_one_trial_evaluation_per_member() {
        let space = unit_space(2);
        let objective = sphere(2);
        let mut config = OptimizerConfig::new(6);
        config.lifetime = Lifetime::Unlimited;
        config.max_evaluations = 10_000;
        let mut engine = Engine::new(&space, config, &objective).unwrap();
        engine.initialize().unwrap();
        assert_eq!(engine.evaluations_spent(), 6);
        engine.step().unwrap();
        assert_eq!(engine.evaluations_spent(), 12);
    }

    #[test]
    fn step_is_greedy_monotone_for_deterministic_objectives() {
        let space = unit_space(3);
        let objective = sphere(3);
        let mut config = OptimizerConfig::new(8);
        config.lifetime = Lifetime::Unlimited;
        config.max_evaluations = 100_000;
        config.seed = 17;
        let mut engine = Engine::new(&space, config, &objective).unwrap();
        let mut best = engine.initialize().unwrap().best;
        for _ in 0..40 {
            let stats = engine.step().unwrap();
            assert!(stats.best >= best);
            best = stats.best;
        }
    }

    #[test]
    fn runs_with_same_seed_are_bit_identical() {
        let space = unit_space(4);
        let objective = sphere(4);
        let mut config = OptimizerConfig::new(10);
        config.seed = 42;
        config.max_evaluations = 5_000;
        config.termination_threshold = 0.0; // never fires: exhaust budget
        config.mean_guard = 0.0;
        let run_once = || {
            let mut engine = Engine::new(&space, config.clone(), &objective).unwrap();
            engine.initialize().unwrap();
            while engine.step().is_ok() {}
            engine.population().clone()
        };
        assert_eq!(run_once(), run_once());
    }

    #[test]
    fn budget_of_one_generation_yields_single_generation_trace() {
        let space = unit_space(2);
        let objective = sphere(2);
        let mut config = OptimizerConfig::new(8);
        config.max_evaluations = 8;
        config.termination_threshold = 0.0;
        config.mean_guard = 0.0;
        let trace = run(&space, config, &objective).unwrap();
        assert_eq!(trace.generations.len(), 1);
        assert_eq!(trace.reason, TerminationReason::BudgetExhausted);
        assert_eq!(trace.total_evaluations(), 8);
    }

    #[test]
    fn huge_threshold_terminates_after_generation_zero() {
        let space = unit_space(2);
        let objective = sphere(2);
        let mut config = OptimizerConfig::new(8);
        config.termination_threshold = 1e300;
        config.mean_guard = 0.0;
        config.max_evaluations = 1_000;
        let trace = run(&space, config, &objective).unwrap();
        assert_eq!(trace.generations.len(), 1);
        assert_eq!(trace.reason, TerminationReason::ThresholdMet);
    }

    #[test]
    fn budget_below_initial_generation_is_a_config_error() {
        let space = unit_space(2);
        let objective = sphere(2);
        let mut config = OptimizerConfig::new(8);
        config.max_evaluations = 7;
        assert!(matches!(
            Engine::new(&space, config, &objective),
            Err(ConfigError::BudgetBelowInitialGeneration { .. })
        ));
    }

    #[test]
    fn evaluation_error_leaves_population_at_generation_boundary() {
        use std::sync::atomic::{AtomicU64, Ordering};
        let space = unit_space(1);
        // Healthy through generation 0, then fails mid-batch.
        let calls = AtomicU64::new(0);
        let failing = FnObjective::new(1, move |x: &[f64]| {
            if calls.fetch_add(1, Ordering::Relaxed) >= 10 {
                f64::NAN
            } else {
                x[0]
            }
        });
        let mut config = OptimizerConfig::new(6);
        config.lifetime = Lifetime::Unlimited;
        config.max_evaluations = 1_000;
        let mut engine = Engine::new(&space, config, &failing).unwrap();
        engine.initialize().unwrap();
        let before = engine.population().clone();
        let err = engine.step().unwrap_err();
        match err {
            StepError::Evaluation {
                evaluations_spent, ..
            } => assert!(evaluations_spent > 0),
            other => panic!("expected evaluation error, got {other:?}"),
        }
        assert_eq!(engine.population(), &before);
    }
}
