//! Per-generation statistics and the run trace.

use serde::{Deserialize, Serialize};

use crate::population::{Individual, Population};

/// Summary of one generation's measured fitness values.
///
/// `std` is the population standard deviation (divide by N, not N-1): the
/// generation is the complete set under consideration, not a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: u32,
    pub best: f64,
    pub mean: f64,
    pub std: f64,
    /// Objective evaluations spent so far across the whole run.
    pub cumulative_evaluations: u64,
    pub best_params: Vec<f64>,
}

impl GenerationStats {
    pub fn from_population(population: &Population, cumulative_evaluations: u64) -> Self {
        let n = population.size() as f64;
        let mean = population.fitnesses().sum::<f64>() / n;
        let var = population
            .fitnesses()
            .map(|f| (f - mean) * (f - mean))
            .sum::<f64>()
            / n;
        let best = population.best();
        Self {
            generation: population.generation,
            best: best.fitness(),
            mean,
            std: var.sqrt(),
            cumulative_evaluations,
            best_params: best.params.clone(),
        }
    }

    /// Spread ratio std / |mean| used by the termination criterion.
    pub fn spread_ratio(&self) -> f64 {
        self.std / self.mean.abs()
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminationReason {
    /// The spread ratio fell below the threshold T.
    ThresholdMet,
    /// The evaluation budget could not cover another full generation.
    BudgetExhausted,
}

/// Verdict of the termination check on one generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationDecision {
    Terminate,
    Continue,
    /// |mean| sits below the guard; the ratio is meaningless, keep going.
    InapplicableGuard,
}

/// Full record of a run: every generation's statistics plus the answer,
/// the best performing vector of the last generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub generations: Vec<GenerationStats>,
    pub final_best: Individual,
    pub reason: TerminationReason,
}

impl OptimizationTrace {
    pub fn total_evaluations(&self) -> u64 {
        self.generations
            .last()
            .map_or(0, |g| g.cumulative_evaluations)
    }
}
