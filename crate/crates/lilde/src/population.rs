//! Individuals and populations.

use serde::{Deserialize, Serialize};

/// One point in the parameter space with its last measured objective value.
///
/// `age` counts the generations survived since that measurement; a freshly
/// evaluated individual always has age 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub params: Vec<f64>,
    pub fitness: Option<f64>,
    pub age: u32,
}

impl Individual {
    pub fn unevaluated(params: Vec<f64>) -> Self {
        Self {
            params,
            fitness: None,
            age: 0,
        }
    }

    /// Measured fitness. Panics if the individual was never evaluated;
    /// engine operations establish that before ranking or selection.
    pub fn fitness(&self) -> f64 {
        self.fitness.expect("individual has not been evaluated")
    }
}

/// One generation: exactly N individuals plus the generation counter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: u32,
}

impl Population {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Index of the best individual by fitness, ties broken by lower index.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, member) in self.members.iter().enumerate().skip(1) {
            if member.fitness() > self.members[best].fitness() {
                best = i;
            }
        }
        best
    }

    pub fn best(&self) -> &Individual {
        &self.members[self.best_index()]
    }

    pub fn fitnesses(&self) -> impl Iterator<Item = f64> + '_ {
        self.members.iter().map(Individual::fitness)
    }
}
