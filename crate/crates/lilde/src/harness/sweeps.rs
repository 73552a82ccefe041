//! The three benchmark sweeps: dimension scaling, noise robustness, and
//! population-size sensitivity, all on the maximization-form Ackley
//! objective with a known optimum at the origin.

use serde::{Deserialize, Serialize};

use super::{
    aggregate_trials, collect_trials, run_until_success, trial_seed, SweepReport, SweepResult,
    SweepSettings, TrialRecord,
};
use crate::config::Lifetime;
use crate::error::ConfigError;
use crate::objectives::{AckleyMax, WithNoise, WithResampling};

/// Resample counts tried when tuning the resample-and-average baseline.
pub const RESAMPLE_CANDIDATES: [u64; 6] = [1, 4, 16, 64, 256, 1024];

/// Dimension sweep output: the population size chosen per dimension plus
/// the full report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionSweep {
    pub chosen_population: Vec<(usize, usize)>,
    pub report: SweepReport,
}

/// One algorithm variant in the noise sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseArm {
    pub label: String,
    /// Resample count per noise level (1 everywhere except the
    /// resampling arm).
    pub resample_counts: Vec<(f64, u64)>,
    pub results: Vec<SweepResult>,
    pub trials: Vec<TrialRecord>,
}

/// Noise sweep output: one arm per algorithm variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSweep {
    pub dimension: usize,
    pub population: usize,
    pub runs: usize,
    pub settings: SweepSettings,
    /// Budget used for the resampling arm, where one logical measurement
    /// costs its resample count.
    pub resample_budget: u64,
    pub arms: Vec<NoiseArm>,
    pub complete: bool,
}

/// Population-size sweep output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopsizeSweep {
    pub dimension: usize,
    pub report: SweepReport,
}

fn ackley_trial(
    dimension: usize,
    population: usize,
    settings: &SweepSettings,
    lifetime: Lifetime,
    sigma_rel: f64,
    resample: u64,
    budget: u64,
    variable: f64,
    seed: u64,
) -> TrialRecord {
    let base = AckleyMax::new(dimension);
    let space = base.space();
    let optimum = base.optimum();
    let objective = WithResampling::new(WithNoise::new(base, sigma_rel), resample);
    let mut config = settings.config(population, seed);
    config.lifetime = lifetime;
    config.max_evaluations = budget;
    let outcome = run_until_success(
        &space,
        config,
        &objective,
        &optimum,
        settings.success_fraction,
    );
    TrialRecord {
        variable,
        seed,
        outcome,
    }
}

/// Mean evaluations over a handful of runs, used by the pre-sweeps that
/// choose a population size or resample count.
#[allow(clippy::too_many_arguments)]
fn presweep_mean(
    dimension: usize,
    population: usize,
    settings: &SweepSettings,
    lifetime: Lifetime,
    sigma_rel: f64,
    resample: u64,
    budget: u64,
    salt: u64,
    runs: usize,
) -> f64 {
    let trials = collect_trials(runs, settings.parallel_trials, |i| {
        ackley_trial(
            dimension,
            population,
            settings,
            lifetime,
            sigma_rel,
            resample,
            budget,
            0.0,
            trial_seed(settings.base_seed, salt, i as u64),
        )
    });
    trials
        .iter()
        .map(|t| t.outcome.evaluations as f64)
        .sum::<f64>()
        / runs as f64
}

/// Scaling with dimension on the noiseless objective. For each dimension
/// the best-performing population size is chosen from `candidate_ns` by a
/// coarse pre-sweep (`presweep_runs` trials each, failures counted at
/// their budget-exhausted cost), then measured over `runs` seeded trials.
pub fn sweep_dimensions(
    dimensions: &[usize],
    runs: usize,
    candidate_ns: &[usize],
    presweep_runs: usize,
    settings: &SweepSettings,
) -> DimensionSweep {
    assert!(!candidate_ns.is_empty());
    let mut chosen_population = Vec::new();
    let mut trials = Vec::new();
    for &d in dimensions {
        let best_n = candidate_ns
            .iter()
            .copied()
            .map(|n| {
                let salt = 1000 + d as u64 * 31 + n as u64;
                let mean = presweep_mean(
                    d,
                    n,
                    settings,
                    settings.lifetime,
                    0.0,
                    1,
                    settings.budget,
                    salt,
                    presweep_runs,
                );
                (n, mean)
            })
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("means are finite"))
            .expect("candidate list is non-empty")
            .0;
        chosen_population.push((d, best_n));
        let mut measured = collect_trials(runs, settings.parallel_trials, |i| {
            ackley_trial(
                d,
                best_n,
                settings,
                settings.lifetime,
                0.0,
                1,
                settings.budget,
                d as f64,
                trial_seed(settings.base_seed, 2000 + d as u64, i as u64),
            )
        });
        trials.append(&mut measured);
    }
    let results = aggregate_trials(&trials);
    DimensionSweep {
        chosen_population,
        report: SweepReport {
            swept: "dimension".to_string(),
            runs,
            settings: settings.clone(),
            results,
            trials,
            complete: true,
        },
    }
}

/// Noise robustness at fixed dimension and population size: limited
/// lifetimes against unlimited-lifetime DE and against DE with
/// resample-and-average (resample count tuned per noise level by a coarse
/// pre-sweep over [`RESAMPLE_CANDIDATES`]).
pub fn sweep_noise(
    sigmas: &[f64],
    runs: usize,
    dimension: usize,
    population: usize,
    lifetimes: &[u32],
    resample_budget: u64,
    presweep_runs: usize,
    settings: &SweepSettings,
) -> NoiseSweep {
    fn measure_arm(
        label: String,
        lifetime: Lifetime,
        resample_counts: Vec<(f64, u64)>,
        budget: u64,
        arm_index: u64,
        runs: usize,
        dimension: usize,
        population: usize,
        settings: &SweepSettings,
    ) -> NoiseArm {
        let mut trials = Vec::new();
        for (si, &(sigma, k)) in resample_counts.iter().enumerate() {
            let salt = 50_000 + arm_index * 7919 + si as u64;
            let mut measured = collect_trials(runs, settings.parallel_trials, |i| {
                ackley_trial(
                    dimension,
                    population,
                    settings,
                    lifetime,
                    sigma,
                    k,
                    budget,
                    sigma,
                    trial_seed(settings.base_seed, salt, i as u64),
                )
            });
            trials.append(&mut measured);
        }
        NoiseArm {
            label,
            resample_counts,
            results: aggregate_trials(&trials),
            trials,
        }
    }

    let plain: Vec<(f64, u64)> = sigmas.iter().map(|&s| (s, 1)).collect();
    let mut arms = Vec::new();
    for &lifetime in lifetimes {
        arms.push(measure_arm(
            format!("lilde{lifetime}"),
            Lifetime::Limited(lifetime),
            plain.clone(),
            settings.budget,
            arms.len() as u64,
            runs,
            dimension,
            population,
            settings,
        ));
    }
    arms.push(measure_arm(
        "de".to_string(),
        Lifetime::Unlimited,
        plain,
        settings.budget,
        arms.len() as u64,
        runs,
        dimension,
        population,
        settings,
    ));

    // Resampling baseline: unlimited lifetime, averaging k measurements
    // per logical evaluation, k chosen per noise level by pre-sweep.
    let tuned: Vec<(f64, u64)> = sigmas
        .iter()
        .map(|&sigma| {
            if sigma == 0.0 {
                return (sigma, 1);
            }
            let k = RESAMPLE_CANDIDATES
                .iter()
                .copied()
                .map(|k| {
                    let salt = 90_000 + (sigma * 1e4) as u64 + k;
                    let mean = presweep_mean(
                        dimension,
                        population,
                        settings,
                        Lifetime::Unlimited,
                        sigma,
                        k,
                        resample_budget,
                        salt,
                        presweep_runs,
                    );
                    (k, mean)
                })
                .min_by(|a, b| a.1.partial_cmp(&b.1).expect("means are finite"))
                .expect("candidate list is non-empty")
                .0;
            (sigma, k)
        })
        .collect();
    arms.push(measure_arm(
        "resample".to_string(),
        Lifetime::Unlimited,
        tuned,
        resample_budget,
        arms.len() as u64,
        runs,
        dimension,
        population,
        settings,
    ));

    NoiseSweep {
        dimension,
        population,
        runs,
        settings: settings.clone(),
        resample_budget,
        arms,
        complete: true,
    }
}

/// Mean evaluations against population size at fixed dimension on the
/// noiseless objective. Every candidate size must yield a legal
/// configuration; an infeasible one (elite subset below 3) surfaces as a
/// configuration error before anything runs.
pub fn sweep_popsize(
    sizes: &[usize],
    dimension: usize,
    runs: usize,
    settings: &SweepSettings,
) -> Result<PopsizeSweep, ConfigError> {
    for &n in sizes {
        settings.config(n, 0).validate()?;
    }
    let mut trials = Vec::new();
    for &n in sizes {
        let mut measured = collect_trials(runs, settings.parallel_trials, |i| {
            ackley_trial(
                dimension,
                n,
                settings,
                settings.lifetime,
                0.0,
                1,
                settings.budget,
                n as f64,
                trial_seed(settings.base_seed, 70_000 + n as u64, i as u64),
            )
        });
        trials.append(&mut measured);
    }
    let results = aggregate_trials(&trials);
    Ok(PopsizeSweep {
        dimension,
        report: SweepReport {
            swept: "population".to_string(),
            runs,
            settings: settings.clone(),
            results,
            trials,
            complete: true,
        },
    })
}
