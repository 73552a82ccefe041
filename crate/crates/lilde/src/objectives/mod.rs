//! Benchmark and simulated-experiment objectives.
//!
//! All objectives here are maximized. [`AckleyMax`] is the standard
//! multimodal benchmark flipped upside down; [`SimulatedExperiment`] is a
//! correlated 21-parameter stand-in for a real apparatus; the wrappers add
//! multiplicative shot-to-shot noise, linear parameter drift, and
//! resample-and-average measurement.

mod ackley;
mod simulated;
mod wrappers;

pub use ackley::{ackley_value, AckleyMax, ACKLEY_BOX_HALF_WIDTH, ACKLEY_PEAK};
pub use simulated::{SimulatedExperiment, SIMULATED_DIMENSION, SIMULATED_PEAK};
pub use wrappers::{WithDrift, WithNoise, WithResampling};
