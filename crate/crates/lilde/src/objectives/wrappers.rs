//! Measurement-model wrappers: shot-to-shot noise, slow drift, and
//! resample-and-average.
//!
//! Each wrapper draws only from the per-evaluation random stream in
//! [`EvalContext`], so wrapped objectives stay deterministic under
//! concurrent dispatch.

use rand::Rng;

use crate::error::EvalError;
use crate::objective::{EvalContext, Objective};

/// One standard-normal draw (Box-Muller, cosine branch).
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1], keeps the log finite
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Multiplicative Gaussian shot-to-shot noise: each measurement returns
/// `f(x) * (1 + sigma_rel * g)` with a fresh standard-normal `g`.
///
/// Negative outliers are not clipped; clipping would bias the mean.
pub struct WithNoise<O> {
    base: O,
    sigma_rel: f64,
}

impl<O: Objective> WithNoise<O> {
    pub fn new(base: O, sigma_rel: f64) -> Self {
        assert!(sigma_rel >= 0.0, "noise level must be non-negative");
        Self { base, sigma_rel }
    }
}

impl<O: Objective> Objective for WithNoise<O> {
    fn dimension(&self) -> usize {
        self.base.dimension()
    }

    fn evaluate(&self, x: &[f64], ctx: &mut EvalContext) -> Result<f64, EvalError> {
        let value = self.base.evaluate(x, ctx)?;
        if self.sigma_rel == 0.0 {
            return Ok(value);
        }
        let g = standard_normal(&mut ctx.rng);
        Ok(value * (1.0 + self.sigma_rel * g))
    }

    fn cost_per_evaluation(&self) -> u64 {
        self.base.cost_per_evaluation()
    }

    fn parallel_safe(&self) -> bool {
        self.base.parallel_safe()
    }
}

/// Linear drift of the measurement frame: evaluation `t` (the run-wide
/// evaluation index) measures `base(x - t * velocity)`, so the optimum
/// moves by `velocity` per evaluation.
///
/// Drift is indexed by evaluation count, not wall time, which keeps runs
/// reproducible. Mind the base objective's domain: after enough
/// evaluations the shifted frame can leave a hard box.
pub struct WithDrift<O> {
    base: O,
    velocity: Vec<f64>,
}

impl<O: Objective> WithDrift<O> {
    pub fn new(base: O, velocity: Vec<f64>) -> Self {
        assert_eq!(
            velocity.len(),
            base.dimension(),
            "velocity dimension must match the objective"
        );
        Self { base, velocity }
    }
}

impl<O: Objective> Objective for WithDrift<O> {
    fn dimension(&self) -> usize {
        self.base.dimension()
    }

    fn evaluate(&self, x: &[f64], ctx: &mut EvalContext) -> Result<f64, EvalError> {
        let t = ctx.index as f64;
        let shifted: Vec<f64> = x
            .iter()
            .zip(&self.velocity)
            .map(|(&v, &step)| v - t * step)
            .collect();
        self.base.evaluate(&shifted, ctx)
    }

    fn cost_per_evaluation(&self) -> u64 {
        self.base.cost_per_evaluation()
    }

    fn parallel_safe(&self) -> bool {
        self.base.parallel_safe()
    }
}

/// Resample-and-average: one logical measurement averages `count`
/// independent base measurements and costs `count` budget units.
pub struct WithResampling<O> {
    base: O,
    count: u64,
}

impl<O: Objective> WithResampling<O> {
    pub fn new(base: O, count: u64) -> Self {
        assert!(count >= 1, "resample count must be at least 1");
        Self { base, count }
    }
}

impl<O: Objective> Objective for WithResampling<O> {
    fn dimension(&self) -> usize {
        self.base.dimension()
    }

    fn evaluate(&self, x: &[f64], ctx: &mut EvalContext) -> Result<f64, EvalError> {
        let mut sum = 0.0;
        for _ in 0..self.count {
            sum += self.base.evaluate(x, ctx)?;
        }
        Ok(sum / self.count as f64)
    }

    fn cost_per_evaluation(&self) -> u64 {
        self.count * self.base.cost_per_evaluation()
    }

    fn parallel_safe(&self) -> bool {
        self.base.parallel_safe()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::FnObjective;

    fn constant(dimension: usize, value: f64) -> FnObjective<impl Fn(&[f64]) -> f64> {
        FnObjective::new(dimension, move |_: &[f64]| value)
    }

    fn sample_mean_std(values: &[f64]) -> (f64, f64) {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        (mean, var.sqrt())
    }

    #[test]
    fn zero_noise_is_the_base_function() {
        let noisy = WithNoise::new(constant(1, 28.0), 0.0);
        for index in 0..50 {
            let mut ctx = EvalContext::new(9, index);
            assert_eq!(noisy.evaluate(&[0.0], &mut ctx).unwrap(), 28.0);
        }
    }

    #[test]
    fn repeat_measurements_differ_under_noise() {
        let noisy = WithNoise::new(constant(1, 28.0), 0.1);
        let mut a = EvalContext::new(9, 0);
        let mut b = EvalContext::new(9, 1);
        assert_ne!(
            noisy.evaluate(&[0.0], &mut a).unwrap(),
            noisy.evaluate(&[0.0], &mut b).unwrap()
        );
    }

    #[test]
    fn noise_std_matches_sigma_rel() {
        // sigma_rel = 0.25 at f = 28: std of the draws is 7.
        let noisy = WithNoise::new(constant(1, 28.0), 0.25);
        let values: Vec<f64> = (0..100_000)
            .map(|i| {
                let mut ctx = EvalContext::new(5, i);
                noisy.evaluate(&[0.0], &mut ctx).unwrap()
            })
            .collect();
        let (mean, std) = sample_mean_std(&values);
        assert!(
            (std - 7.0).abs() / 7.0 < 0.02,
            "sample std {std} should be within 2% of 7.0"
        );
        // Unbiased: mean within 3 standard errors.
        let standard_error = 7.0 / (values.len() as f64).sqrt();
        assert!(
            (mean - 28.0).abs() < 3.0 * standard_error,
            "sample mean {mean} deviates from 28 by more than 3 SE"
        );
    }

    #[test]
    fn zero_velocity_drift_is_the_base_function() {
        let base = FnObjective::new(2, |x: &[f64]| x[0] + 2.0 * x[1]);
        let drifting = WithDrift::new(base, vec![0.0, 0.0]);
        let mut ctx = EvalContext::new(0, 123);
        assert_eq!(drifting.evaluate(&[1.0, 2.0], &mut ctx).unwrap(), 5.0);
    }

    #[test]
    fn drift_translates_the_frame_by_evaluation_count() {
        let base = FnObjective::new(2, |x: &[f64]| x[0] * 10.0 + x[1]);
        let drifting = WithDrift::new(base, vec![0.5, 0.0]);
        let mut ctx = EvalContext::new(0, 4);
        // Evaluation 4 sees base(x - 4 * v) = base(x0 - 2, x1).
        assert_eq!(drifting.evaluate(&[3.0, 7.0], &mut ctx).unwrap(), 17.0);
    }

    #[test]
    fn single_resample_is_the_base_function() {
        let resampled = WithResampling::new(constant(1, 3.5), 1);
        assert_eq!(resampled.cost_per_evaluation(), 1);
        let mut ctx = EvalContext::new(0, 0);
        assert_eq!(resampled.evaluate(&[0.0], &mut ctx).unwrap(), 3.5);
    }

    #[test]
    fn resampling_cost_counts_every_base_measurement() {
        let resampled = WithResampling::new(WithNoise::new(constant(1, 1.0), 0.1), 10);
        assert_eq!(resampled.cost_per_evaluation(), 10);
    }

    #[test]
    fn resampling_halves_noise_at_four_samples() {
        // k = 4 with sigma_rel = 0.2: effective std drops to 0.1 * f.
        let f = 50.0;
        let resampled = WithResampling::new(WithNoise::new(constant(1, f), 0.2), 4);
        let values: Vec<f64> = (0..100_000)
            .map(|i| {
                let mut ctx = EvalContext::new(21, i);
                resampled.evaluate(&[0.0], &mut ctx).unwrap()
            })
            .collect();
        let (_, std) = sample_mean_std(&values);
        let expected = 0.1 * f;
        assert!(
            (std - expected).abs() / expected < 0.02,
            "resampled std {std} should be within 2% of {expected}"
        );
    }

    #[test]
    fn resampling_variance_scales_inversely_with_count() {
        let f = 10.0;
        let variance_at = |k: u64, draws: u64| {
            let resampled = WithResampling::new(WithNoise::new(constant(1, f), 0.2), k);
            let values: Vec<f64> = (0..draws)
                .map(|i| {
                    let mut ctx = EvalContext::new(77, i);
                    resampled.evaluate(&[0.0], &mut ctx).unwrap()
                })
                .collect();
            let (_, std) = sample_mean_std(&values);
            std * std
        };
        let v1 = variance_at(1, 60_000);
        let v4 = variance_at(4, 60_000);
        let v16 = variance_at(16, 40_000);
        assert!((v1 / v4 - 4.0).abs() < 0.25, "v1/v4 = {}", v1 / v4);
        assert!((v1 / v16 - 16.0).abs() < 1.2, "v1/v16 = {}", v1 / v16);
    }
}
