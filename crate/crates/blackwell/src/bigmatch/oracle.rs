//! The auxiliary outcome family and its closed-form oracle.

use alloc::vec;

use crate::approachability::{Oracle, OutcomeFunction};
use crate::bigmatch::LambdaSchedule;
use crate::geometry::{Stage, Vector};

/// Auxiliary outcome `alpha * (1 - 2j) * (x, x/lambda - 1)`.
///
/// `alpha` is the surviving probability mass, `lambda` the family
/// parameter, `x` Player I's stopping probability and `j` Player II's
/// realized bit. Panics if `lambda <= 0`.
pub fn aux_outcome(alpha: f64, lambda: f64, x: f64, j: bool) -> Vector {
    assert!(lambda > 0.0, "lambda must be positive");
    let factor = if j { -alpha } else { alpha };
    Vector::new(vec![factor * x, factor * (x / lambda - 1.0)])
}

/// One member of the auxiliary outcome family, indexed by the current
/// surviving mass and the stage's cap parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuxOutcome {
    pub alpha: f64,
    pub lambda: f64,
}

impl OutcomeFunction for AuxOutcome {
    /// Player I's stopping probability in `[0, 1]`.
    type Dm = f64;
    /// Player II's realized bit.
    type Nature = bool;

    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, a: &f64, b: &bool) -> Vector {
        aux_outcome(self.alpha, self.lambda, *a, *b)
    }
}

/// Closed-form oracle action for the family member with parameter
/// `lambda`, under the stage metric whose second weight is `lambda_t`:
///
/// ```text
/// x = lambda_t^2 * R~2 / (R~1 + lambda_t^2 * R~2 / lambda)
/// ```
///
/// where `R~ = (max(0, R1), max(0, R2))` is the orthant residual of the
/// cumulative outcome, and `x = 0` when the residual vanishes. The result
/// always lies in `[0, lambda]`, and it zeroes the stage inner product
/// `<g(x, j), R~>_(t)` for both values of `j`.
pub fn bigmatch_oracle(lambda_t: f64, lambda: f64, cumulative: &Vector) -> f64 {
    assert!(lambda_t > 0.0 && lambda > 0.0, "cap parameters must be positive");
    assert_eq!(cumulative.dim(), 2, "dimension mismatch");
    let r1 = cumulative[0].max(0.0);
    let r2 = cumulative[1].max(0.0);
    if r2 == 0.0 {
        // Covers the zero residual: the numerator below vanishes.
        return 0.0;
    }
    if r1 == 0.0 {
        // The ratio simplifies to exactly lambda.
        return lambda;
    }
    let numerator = (lambda_t * lambda_t) * r2;
    let denominator = r1 + numerator / lambda;
    if denominator < 1e-300 {
        // Underflowed denominator; hand back the limit as R~1 -> 0.
        return lambda;
    }
    // The ratio is <= lambda mathematically; min() only absorbs the last
    // rounding at the boundary.
    (numerator / denominator).min(lambda)
}

/// Oracle for the auxiliary family under the lambda-weighted metrics.
#[derive(Clone, Copy, Debug)]
pub struct BigMatchOracle {
    pub schedule: LambdaSchedule,
}

impl Oracle<AuxOutcome> for BigMatchOracle {
    fn choose(&self, t: Stage, g: &AuxOutcome, cumulative: &Vector) -> f64 {
        bigmatch_oracle(self.schedule.lambda(t), g.lambda, cumulative)
    }
}
