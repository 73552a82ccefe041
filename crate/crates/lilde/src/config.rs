//! Optimizer configuration and validation.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// How many generations a measured fitness value stays trusted.
///
/// With `Unlimited` the engine is plain differential evolution; a limited
/// lifetime forces each survivor to be re-measured once its value is
/// `lifetime` generations old, which keeps noise-inflated outliers from
/// accumulating and lets the population follow drifting conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lifetime {
    Limited(u32),
    Unlimited,
}

impl Lifetime {
    pub fn is_expired(&self, age: u32) -> bool {
        match *self {
            Lifetime::Limited(n) => age >= n,
            Lifetime::Unlimited => false,
        }
    }
}

/// The constants of one optimization run.
///
/// `amplification` (F), `crossover` (CR) and `elite_fraction` (E) are the
/// three DE constants; all must lie in `(0, 1]`. The engine maximizes: wrap
/// an objective in [`Negated`](crate::objective::Negated) to minimize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// F, scale of the difference vector in mutation.
    pub amplification: f64,
    /// CR, per-component probability of inheriting from the mutant.
    pub crossover: f64,
    /// E, fraction of the population eligible as mutation parents.
    pub elite_fraction: f64,
    /// N, individuals per generation. At least 4, and `ceil(E*N) >= 3`.
    pub population_size: usize,
    /// Fitness expiry in generations; `Unlimited` disables re-measurement.
    pub lifetime: Lifetime,
    /// T: stop once the generation's fitness std / |mean| falls below this.
    pub termination_threshold: f64,
    /// Guard below which |mean| makes the termination ratio meaningless.
    pub mean_guard: f64,
    /// Hard cap on objective evaluations for the whole run.
    pub max_evaluations: u64,
    /// Seed for every random draw of the run.
    pub seed: u64,
}

impl OptimizerConfig {
    /// Paper-recommended constants F=0.9, CR=0.9, E=0.5, lifetime 10.
    pub fn new(population_size: usize) -> Self {
        Self {
            amplification: 0.9,
            crossover: 0.9,
            elite_fraction: 0.5,
            population_size,
            lifetime: Lifetime::Limited(10),
            termination_threshold: 0.005,
            mean_guard: 1e-9,
            max_evaluations: 1_000_000,
            seed: 0,
        }
    }

    /// Size of the elite subset, `ceil(E * N)`.
    pub fn elite_size(&self) -> usize {
        ((self.elite_fraction * self.population_size as f64).ceil() as usize)
            .min(self.population_size)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("amplification", self.amplification),
            ("crossover", self.crossover),
            ("elite_fraction", self.elite_fraction),
        ] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(ConfigError::OutOfRange {
                    name,
                    value,
                    range: "(0, 1]",
                });
            }
        }
        if self.population_size < 4 {
            return Err(ConfigError::PopulationTooSmall(self.population_size));
        }
        if self.elite_size() < 3 {
            return Err(ConfigError::EliteTooSmall {
                elite: self.elite_fraction,
                population: self.population_size,
                size: self.elite_size(),
            });
        }
        if self.lifetime == Lifetime::Limited(0) {
            return Err(ConfigError::ZeroLifetime);
        }
        if !(self.termination_threshold >= 0.0) {
            return Err(ConfigError::OutOfRange {
                name: "termination_threshold",
                value: self.termination_threshold,
                range: "[0, inf)",
            });
        }
        if !(self.mean_guard >= 0.0) {
            return Err(ConfigError::OutOfRange {
                name: "mean_guard",
                value: self.mean_guard,
                range: "[0, inf)",
            });
        }
        if self.max_evaluations == 0 {
            return Err(ConfigError::ZeroBudget);
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recommended_constants_are_valid() {
        assert_eq!(OptimizerConfig::new(20).validate(), Ok(()));
    }

    #[test]
    fn elite_size_is_ceil() {
        let mut config = OptimizerConfig::new(15);
        assert_eq!(config.elite_size(), 8);
        config.elite_fraction = 1.0;
        assert_eq!(config.elite_size(), 15);
        config.elite_fraction = 0.2;
        assert_eq!(config.elite_size(), 3);
    }

    #[test]
    fn rejects_small_elite_subset() {
        // N=4 with E=0.5 only yields 2 mutation parents.
        let config = OptimizerConfig::new(4);
        assert!(matches!(
            config.validate(),
            Err(ConfigError::EliteTooSmall { size: 2, .. })
        ));
    }

    #[test]
    fn rejects_constants_outside_unit_interval() {
        let mut config = OptimizerConfig::new(10);
        config.amplification = 1.5;
        assert!(matches!(
            config.validate(),
            Err(ConfigError::OutOfRange {
                name: "amplification",
                ..
            })
        ));
        config.amplification = 0.0;
        assert!(config.validate().is_err());
    }
}
