//! A deterministic 21-parameter stand-in for a real experiment.
//!
//! The measured signal is a single Gaussian peak over a linearly mixed
//! coordinate frame, `S * exp(-|M (x - x*)|^2)`: the mixing couples each
//! parameter to two others, so no subset can be optimized independently,
//! and the peak value plays the role of a detector count. Wrap it in
//! [`WithNoise`](super::WithNoise) for shot-to-shot scatter.

use crate::error::EvalError;
use crate::objective::{EvalContext, Objective};
use crate::space::ParameterSpace;

/// Number of control parameters.
pub const SIMULATED_DIMENSION: usize = 21;

/// Signal at the optimum, in detector counts.
pub const SIMULATED_PEAK: f64 = 1e6;

const MIX_SCALE: f64 = 0.9;
const MIX_NEAR: f64 = 0.35;
const MIX_FAR: f64 = 0.15;
const GOLDEN: f64 = 0.618_033_988_749_895;

/// The simulated apparatus on the box `[0, 1]^21`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimulatedExperiment;

impl SimulatedExperiment {
    pub fn new() -> Self {
        Self
    }

    /// The control box `[0, 1]^21`.
    pub fn space(&self) -> ParameterSpace {
        ParameterSpace::symmetric(SIMULATED_DIMENSION, 0.0, 1.0)
            .expect("constant bounds are valid")
    }

    /// The unique optimum; a fixed low-discrepancy pattern in
    /// `[0.3, 0.7]^21`, comfortably inside the box.
    pub fn optimum(&self) -> Vec<f64> {
        (0..SIMULATED_DIMENSION)
            .map(|i| 0.3 + 0.4 * ((i as f64 + 1.0) * GOLDEN).fract())
            .collect()
    }
}

impl Objective for SimulatedExperiment {
    fn dimension(&self) -> usize {
        SIMULATED_DIMENSION
    }

    fn evaluate(&self, x: &[f64], _ctx: &mut EvalContext) -> Result<f64, EvalError> {
        if x.len() != SIMULATED_DIMENSION {
            return Err(EvalError::Domain(format!(
                "expected {SIMULATED_DIMENSION} components, got {}",
                x.len()
            )));
        }
        if let Some((n, &v)) = x.iter().enumerate().find(|(_, &v)| !(0.0..=1.0).contains(&v)) {
            return Err(EvalError::Domain(format!(
                "component {n} = {v} outside the box [0, 1]"
            )));
        }
        let optimum = self.optimum();
        let offset: Vec<f64> = x.iter().zip(&optimum).map(|(&a, &b)| a - b).collect();
        let d = SIMULATED_DIMENSION;
        let mut mixed_norm = 0.0;
        for i in 0..d {
            let y = MIX_SCALE
                * (offset[i] + MIX_NEAR * offset[(i + 1) % d] + MIX_FAR * offset[(i + 5) % d]);
            mixed_norm += y * y;
        }
        Ok(SIMULATED_PEAK * (-mixed_norm).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_value_at_the_optimum() {
        let experiment = SimulatedExperiment::new();
        let mut ctx = EvalContext::new(0, 0);
        let optimum = experiment.optimum();
        assert!(experiment.space().contains(&optimum));
        assert_eq!(
            experiment.evaluate(&optimum, &mut ctx).unwrap(),
            SIMULATED_PEAK
        );
    }

    #[test]
    fn any_other_point_measures_below_peak() {
        let experiment = SimulatedExperiment::new();
        let mut ctx = EvalContext::new(0, 0);
        let mut point = experiment.optimum();
        for i in 0..SIMULATED_DIMENSION {
            point[i] += 0.01;
            let value = experiment.evaluate(&point, &mut ctx).unwrap();
            assert!(value < SIMULATED_PEAK);
            point[i] -= 0.01;
        }
        let centre = vec![0.5; SIMULATED_DIMENSION];
        assert!(experiment.evaluate(&centre, &mut ctx).unwrap() < SIMULATED_PEAK);
    }

    #[test]
    fn parameters_are_coupled_through_the_mixing() {
        // With a diagonal response, holding all but one parameter at the
        // optimum would make the best value of that parameter independent
        // of the others. Shift a neighbour and the conditional optimum of
        // component 0 moves.
        let experiment = SimulatedExperiment::new();
        let mut ctx = EvalContext::new(0, 0);
        let optimum = experiment.optimum();
        let best_x0 = |x1_shift: f64| {
            let mut point = optimum.clone();
            point[1] += x1_shift;
            (0..=400)
                .map(|i| {
                    point[0] = 0.3 + 0.4 * i as f64 / 400.0;
                    (point[0], experiment.evaluate(&point, &mut ctx).unwrap())
                })
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap()
                .0
        };
        assert!((best_x0(0.0) - optimum[0]).abs() < 2e-3);
        assert!((best_x0(0.1) - best_x0(0.0)).abs() > 5e-3);
    }

    #[test]
    fn rejects_points_outside_the_box() {
        let experiment = SimulatedExperiment::new();
        let mut ctx = EvalContext::new(0, 0);
        let mut point = vec![0.5; SIMULATED_DIMENSION];
        point[3] = 1.2;
        assert!(matches!(
            experiment.evaluate(&point, &mut ctx),
            Err(EvalError::Domain(_))
        ));
    }
}
