//! Stage-indexed weighted inner products and the negative-orthant split.
//!
//! A [`WeightSchedule`] assigns a positive weight to every stage `t >= 1`
//! and coordinate, inducing the diagonal dot product
//! `<u, v>_(t) = sum_i mu(t, i)^2 u[i] v[i]` and its norm. Schedules must
//! be nonincreasing in `t` per coordinate: every guarantee tracked by the
//! runner relies on the induced norms shrinking over time.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// 1-based stage index.
pub type Stage = u64;

/// Fixed-dimension outcome vector with finite components.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    components: Vec<f64>,
}

impl Vector {
    /// Wraps raw components.
    ///
    /// Panics if any component is non-finite.
    pub fn new(components: Vec<f64>) -> Self {
        assert!(
            components.iter().all(|c| c.is_finite()),
            "vector components must be finite"
        );
        Self { components }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            components: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.components
    }

    /// Componentwise in-place sum. Panics on dimension mismatch.
    pub fn add_assign(&mut self, rhs: &Vector) {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        for (a, b) in self.components.iter_mut().zip(&rhs.components) {
            *a += *b;
        }
    }
}

impl From<Vec<f64>> for Vector {
    fn from(components: Vec<f64>) -> Self {
        Self::new(components)
    }
}

impl core::ops::Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.components[i]
    }
}

/// Per-stage, per-coordinate weights `mu(t, i)` defining the stage-`t`
/// inner product.
///
/// Implementations must return strictly positive weights, nonincreasing in
/// `t` for every coordinate, as pure functions of `(t, coord)` — arbitrary
/// horizons then need no preallocated state.
pub trait WeightSchedule {
    fn dims(&self) -> usize;

    /// The weight `mu(t, coord)` for `t >= 1` and `coord < dims()`.
    fn weight(&self, t: Stage, coord: usize) -> f64;
}

/// All weights equal to one: plain Euclidean geometry in every stage.
#[derive(Clone, Copy, Debug)]
pub struct UniformWeights {
    pub dims: usize,
}

impl WeightSchedule for UniformWeights {
    fn dims(&self) -> usize {
        self.dims
    }

    fn weight(&self, _t: Stage, _coord: usize) -> f64 {
        1.0
    }
}

/// `mu(t, i) = coeff[i] * t^(-exponent[i])`: positive and nonincreasing
/// for positive coefficients and nonnegative exponents.
#[derive(Clone, Debug)]
pub struct PowerWeights {
    coeffs: Vec<f64>,
    exponents: Vec<f64>,
}

impl PowerWeights {
    pub fn new(coeffs: Vec<f64>, exponents: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), exponents.len(), "dimension mismatch");
        assert!(coeffs.iter().all(|&c| c > 0.0), "coefficients must be positive");
        assert!(exponents.iter().all(|&e| e >= 0.0), "exponents must be nonnegative");
        Self { coeffs, exponents }
    }
}

impl WeightSchedule for PowerWeights {
    fn dims(&self) -> usize {
        self.coeffs.len()
    }

    fn weight(&self, t: Stage, coord: usize) -> f64 {
        self.coeffs[coord] * math::pow(t as f64, -self.exponents[coord])
    }
}

/// Schedule backed by an arbitrary function of `(t, coord)`. The caller is
/// responsible for positivity and monotonicity; [`schedule_valid_prefix`]
/// spot-checks both.
#[derive(Clone, Copy)]
pub struct FnWeights<F> {
    dims: usize,
    weight_fn: F,
}

impl<F: Fn(Stage, usize) -> f64> FnWeights<F> {
    pub fn new(dims: usize, weight_fn: F) -> Self {
        Self { dims, weight_fn }
    }
}

impl<F: Fn(Stage, usize) -> f64> WeightSchedule for FnWeights<F> {
    fn dims(&self) -> usize {
        self.dims
    }

    fn weight(&self, t: Stage, coord: usize) -> f64 {
        (self.weight_fn)(t, coord)
    }
}

/// `<u, v>_(t)`: symmetric and bilinear.
///
/// Panics if `t == 0` or the dimensions disagree with the schedule.
pub fn weighted_dot<W: WeightSchedule + ?Sized>(
    schedule: &W,
    t: Stage,
    u: &Vector,
    v: &Vector,
) -> f64 {
    assert!(t >= 1, "stages are 1-based");
    assert!(
        u.dim() == schedule.dims() && v.dim() == schedule.dims(),
        "dimension mismatch"
    );
    let mut acc = 0.0;
    for i in 0..u.dim() {
        let w = schedule.weight(t, i);
        acc += (w * w) * (u[i] * v[i]);
    }
    acc
}

/// `||u||^2_(t)`.
pub fn weighted_norm_sq<W: WeightSchedule + ?Sized>(schedule: &W, t: Stage, u: &Vector) -> f64 {
    weighted_dot(schedule, t, u, u)
}

/// `||u||_(t)`; zero exactly when `u` is zero.
pub fn weighted_norm<W: WeightSchedule + ?Sized>(schedule: &W, t: Stage, u: &Vector) -> f64 {
    math::sqrt(weighted_norm_sq(schedule, t, u))
}

/// Splits `r` into its projection onto the negative orthant and the
/// residual `r - proj`.
///
/// Diagonal inner products make the projection componentwise, so the same
/// split is optimal at every stage and under every valid schedule:
/// `proj[i] = min(0, r[i])` and `residual[i] = max(0, r[i])`. The parts
/// sum back to `r` exactly and are orthogonal in every stage metric.
pub fn project_neg_orthant(r: &Vector) -> (Vector, Vector) {
    let mut proj = Vec::with_capacity(r.dim());
    let mut residual = Vec::with_capacity(r.dim());
    for i in 0..r.dim() {
        proj.push(r[i].min(0.0));
        residual.push(r[i].max(0.0));
    }
    (Vector::new(proj), Vector::new(residual))
}

/// Checks positivity and per-coordinate monotonicity of a schedule over
/// the prefix `t = 1..=t_max`.
pub fn schedule_valid_prefix<W: WeightSchedule + ?Sized>(schedule: &W, t_max: Stage) -> bool {
    for coord in 0..schedule.dims() {
        let mut prev = f64::INFINITY;
        for t in 1..=t_max {
            let w = schedule.weight(t, coord);
            if !w.is_finite() || w <= 0.0 || w > prev {
                return false;
            }
            prev = w;
        }
    }
    true
}
