//! The stopping-probability cap and the metric it induces.

use crate::geometry::{Stage, WeightSchedule};
use crate::math;

/// `lambda(t) = epsilon * t^(-3/4)`: the per-stage cap on Player I's
/// stopping probability, doubling as the second-coordinate weight of the
/// auxiliary problem's stage metric (the first weight is constant 1).
///
/// Strictly decreasing with `lambda(1) = epsilon`, values in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaSchedule {
    epsilon: f64,
}

impl LambdaSchedule {
    /// Panics unless `epsilon` lies in `(0, 1]`.
    pub fn new(epsilon: f64) -> Self {
        assert!(
            epsilon > 0.0 && epsilon <= 1.0,
            "epsilon must lie in (0, 1]"
        );
        Self { epsilon }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn lambda(&self, t: Stage) -> f64 {
        assert!(t >= 1, "stages are 1-based");
        let tf = t as f64;
        // t^(3/4) = sqrt(t * sqrt(t)); sqrt is correctly rounded, so this
        // reproduces bit-for-bit across float backends, unlike powf.
        self.epsilon / math::sqrt(tf * math::sqrt(tf))
    }
}

impl WeightSchedule for LambdaSchedule {
    fn dims(&self) -> usize {
        2
    }

    fn weight(&self, t: Stage, coord: usize) -> f64 {
        match coord {
            0 => 1.0,
            1 => self.lambda(t),
            _ => panic!("coordinate out of range"),
        }
    }
}
