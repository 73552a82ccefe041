//! Ackley's function (Ackley 1987) in maximization form.
//!
//! The classic minimization surface with constants a=20, b=0.2, c=2*pi is
//! subtracted from a peak value of 28, giving a landscape whose global
//! maximum of exactly 28 sits at the origin. On the box
//! `[-1.5, 1.5]^d` the cosine ripple contributes three local maxima per
//! axis, `3^d` in total; the fully off-axis ones sit about 13% below the
//! peak, which makes the box a hard but well-understood testbed for
//! global optimizers.

use std::f64::consts::{E, PI};

use crate::error::EvalError;
use crate::objective::{EvalContext, Objective};
use crate::space::ParameterSpace;

/// Half-width of the benchmark box `[-1.5, 1.5]^d`.
pub const ACKLEY_BOX_HALF_WIDTH: f64 = 1.5;

/// Value of [`ackley_value`] at the origin, the global maximum.
pub const ACKLEY_PEAK: f64 = 28.0;

const A: f64 = 20.0;
const B: f64 = 0.2;
const C: f64 = 2.0 * PI;

/// The maximization-form Ackley surface, defined for every finite vector.
///
/// `28 - ackley(x)`; exactly 28.0 at the origin.
pub fn ackley_value(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let mean_square = x.iter().map(|&v| v * v).sum::<f64>() / d;
    let mean_cos = x.iter().map(|&v| (C * v).cos()).sum::<f64>() / d;
    // Grouped so both terms vanish exactly at the origin.
    let ackley = A * (1.0 - (-B * mean_square.sqrt()).exp()) + (E - mean_cos.exp());
    ACKLEY_PEAK - ackley
}

/// [`ackley_value`] restricted to the benchmark box.
#[derive(Debug, Clone, Copy)]
pub struct AckleyMax {
    dimension: usize,
}

impl AckleyMax {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension >= 1, "dimension must be at least 1");
        Self { dimension }
    }

    /// The benchmark box `[-1.5, 1.5]^d`.
    pub fn space(&self) -> ParameterSpace {
        ParameterSpace::symmetric(self.dimension, -ACKLEY_BOX_HALF_WIDTH, ACKLEY_BOX_HALF_WIDTH)
            .expect("constant bounds are valid")
    }

    /// Location of the global maximum.
    pub fn optimum(&self) -> Vec<f64> {
        vec![0.0; self.dimension]
    }
}

impl Objective for AckleyMax {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate(&self, x: &[f64], _ctx: &mut EvalContext) -> Result<f64, EvalError> {
        if x.len() != self.dimension {
            return Err(EvalError::Domain(format!(
                "expected {} components, got {}",
                self.dimension,
                x.len()
            )));
        }
        if let Some((n, &v)) = x
            .iter()
            .enumerate()
            .find(|(_, &v)| !(-ACKLEY_BOX_HALF_WIDTH..=ACKLEY_BOX_HALF_WIDTH).contains(&v))
        {
            return Err(EvalError::Domain(format!(
                "component {n} = {v} outside the box [-1.5, 1.5]"
            )));
        }
        Ok(ackley_value(x))
    }
}
