//! Blackwell's algorithm for time-dependent outcome functions and norms,
//! with the negative orthant as the target set.
//!
//! Nature presents an outcome function `g_t` each stage, the Decision
//! Maker answers with an action from an [`Oracle`], Nature picks its own
//! action, and the resulting outcome vector accumulates in a [`Runner`].
//! As long as the oracle satisfies Blackwell's condition under a
//! nonincreasing [`WeightSchedule`], the distance from the average outcome
//! to the orthant is bounded by the root of the per-stage norm ledger;
//! [`Runner::distance_bound`] and [`Runner::coordinate_bound`] expose both
//! sides of that bound at any stage.
//!
//! Action types carry no structure here: the Big Match instantiates them
//! as a probability and a bit, and tests use whatever is convenient.

use alloc::vec::Vec;

use crate::geometry::{
    project_neg_orthant, weighted_dot, weighted_norm, weighted_norm_sq, Stage, Vector,
    WeightSchedule,
};
use crate::math;

/// One member of the outcome-function family Nature draws from.
pub trait OutcomeFunction {
    /// Decision Maker action type.
    type Dm;
    /// Nature action type.
    type Nature;

    fn dim(&self) -> usize;

    /// The outcome vector for a joint action pair. Must be deterministic.
    fn eval(&self, a: &Self::Dm, b: &Self::Nature) -> Vector;
}

/// Action chooser for the Decision Maker.
///
/// A valid oracle keeps `<g(choose(t, g, R), b), residual(R)>_(t)`
/// nonpositive for every Nature action `b`; [`check_blackwell_condition`]
/// spot-checks this over samples.
pub trait Oracle<G: OutcomeFunction> {
    fn choose(&self, t: Stage, g: &G, cumulative: &Vector) -> G::Dm;
}

/// A logged stage: both actions, the outcome, and its stage-norm square.
#[derive(Clone, Debug)]
pub struct Step<G: OutcomeFunction> {
    pub dm: G::Dm,
    pub nature: G::Nature,
    pub outcome: Vector,
    pub norm_sq: f64,
}

/// Plays Blackwell's algorithm: at stage `t` the action is
/// `oracle.choose(t, g_t, R_{t-1})` with `R_0 = 0`, and the cumulative
/// outcome and the ledger `sum_s ||r_s||^2_(s)` are updated online.
///
/// With logging off the runner holds O(1) state regardless of horizon.
/// Single-owner mutable; run one per trajectory.
pub struct Runner<W, G: OutcomeFunction> {
    schedule: W,
    t: Stage,
    cumulative: Vector,
    sq_ledger: f64,
    log: Option<Vec<Step<G>>>,
}

impl<W: WeightSchedule, G: OutcomeFunction> Runner<W, G> {
    pub fn new(schedule: W) -> Self {
        let dim = schedule.dims();
        Self {
            schedule,
            t: 0,
            cumulative: Vector::zeros(dim),
            sq_ledger: 0.0,
            log: None,
        }
    }

    /// Like [`Runner::new`] but keeps a per-step log, as
    /// [`Runner::coordinate_bound`] requires.
    pub fn with_log(schedule: W) -> Self {
        let mut runner = Self::new(schedule);
        runner.log = Some(Vec::new());
        runner
    }

    /// Completed stage count.
    pub fn stage(&self) -> Stage {
        self.t
    }

    pub fn schedule(&self) -> &W {
        &self.schedule
    }

    /// `R_t`, the sum of all outcomes so far.
    pub fn cumulative(&self) -> &Vector {
        &self.cumulative
    }

    /// `sum_{s<=t} ||r_s||^2_(s)`; nondecreasing.
    pub fn sq_ledger(&self) -> f64 {
        self.sq_ledger
    }

    pub fn log(&self) -> Option<&[Step<G>]> {
        self.log.as_deref()
    }

    /// Plays one stage: queries the oracle, evaluates the outcome against
    /// Nature's action, and folds it into the cumulative state. Returns
    /// the action played and the outcome.
    pub fn step(&mut self, g: &G, oracle: &impl Oracle<G>, b: G::Nature) -> (G::Dm, Vector)
    where
        G::Dm: Clone,
    {
        let t = self.t.checked_add(1).expect("stage overflow");
        let a = oracle.choose(t, g, &self.cumulative);
        let outcome = g.eval(&a, &b);
        assert_eq!(outcome.dim(), self.cumulative.dim(), "dimension mismatch");
        let norm_sq = weighted_norm_sq(&self.schedule, t, &outcome);
        self.cumulative.add_assign(&outcome);
        self.sq_ledger += norm_sq;
        self.t = t;
        if let Some(log) = &mut self.log {
            log.push(Step {
                dm: a.clone(),
                nature: b,
                outcome: outcome.clone(),
                norm_sq,
            });
        }
        (a, outcome)
    }

    /// Both sides of the distance guarantee at the current stage `T`:
    /// `lhs = ||residual(R_T)||_(T) / T` (the orthant distance of the
    /// average outcome) and `rhs = sqrt(ledger) / T`. A valid oracle under
    /// a nonincreasing schedule keeps `lhs <= rhs` at every stage.
    ///
    /// Panics before the first stage.
    pub fn distance_bound(&self) -> (f64, f64) {
        assert!(self.t >= 1, "no stages played");
        let horizon = self.t as f64;
        let (_, residual) = project_neg_orthant(&self.cumulative);
        let lhs = weighted_norm(&self.schedule, self.t, &residual) / horizon;
        let rhs = math::sqrt(self.sq_ledger) / horizon;
        (lhs, rhs)
    }

    /// Per-coordinate form of the guarantee:
    /// `lhs = (1/T) sum_t r_t[coord]` recomputed from the log, and
    /// `rhs = sqrt(ledger) / (T * mu(T, coord))`.
    ///
    /// Panics before the first stage or when logging is off.
    pub fn coordinate_bound(&self, coord: usize) -> (f64, f64) {
        assert!(self.t >= 1, "no stages played");
        assert!(coord < self.schedule.dims(), "coordinate out of range");
        let log = self.log.as_ref().expect("coordinate_bound requires logging");
        let horizon = self.t as f64;
        let sum: f64 = log.iter().map(|step| step.outcome[coord]).sum();
        let lhs = sum / horizon;
        let rhs = math::sqrt(self.sq_ledger) / (horizon * self.schedule.weight(self.t, coord));
        (lhs, rhs)
    }

    /// Second-pass ledger, resummed from the logged outcomes.
    ///
    /// Panics when logging is off.
    pub fn recomputed_sq_ledger(&self) -> f64 {
        let log = self.log.as_ref().expect("recomputed_sq_ledger requires logging");
        log.iter()
            .enumerate()
            .map(|(idx, step)| weighted_norm_sq(&self.schedule, idx as Stage + 1, &step.outcome))
            .sum()
    }
}

/// Default pass threshold for [`check_blackwell_condition`].
pub const BLACKWELL_CHECK_TOLERANCE: f64 = 1e-10;

/// Result of sampling Blackwell's condition for one oracle.
#[derive(Clone, Debug)]
pub struct BlackwellConditionReport {
    pub checked: usize,
    pub violations: usize,
    pub max_delta: f64,
    pub tolerance: f64,
}

impl BlackwellConditionReport {
    pub fn pass(&self) -> bool {
        self.max_delta <= self.tolerance
    }
}

/// For every sampled cumulative outcome `R` and Nature action `b`,
/// evaluates `delta = <g(choose(t, g, R), b), residual(R)>_(t)` and
/// reports the worst case. This is a spot check, not a certificate: the
/// condition quantifies over all `R` and `b`.
///
/// Panics on empty sample lists.
pub fn check_blackwell_condition<W, G, O>(
    oracle: &O,
    g: &G,
    schedule: &W,
    t: Stage,
    cumulative_samples: &[Vector],
    nature_samples: &[G::Nature],
) -> BlackwellConditionReport
where
    W: WeightSchedule + ?Sized,
    G: OutcomeFunction,
    O: Oracle<G> + ?Sized,
{
    assert!(
        !cumulative_samples.is_empty() && !nature_samples.is_empty(),
        "sample lists must be nonempty"
    );
    let mut checked = 0;
    let mut violations = 0;
    let mut max_delta = f64::NEG_INFINITY;
    for r in cumulative_samples {
        let (_, residual) = project_neg_orthant(r);
        let a = oracle.choose(t, g, r);
        for b in nature_samples {
            let delta = weighted_dot(schedule, t, &g.eval(&a, b), &residual);
            checked += 1;
            if delta > BLACKWELL_CHECK_TOLERANCE {
                violations += 1;
            }
            if delta > max_delta {
                max_delta = delta;
            }
        }
    }
    BlackwellConditionReport {
        checked,
        violations,
        max_delta,
        tolerance: BLACKWELL_CHECK_TOLERANCE,
    }
}

/// Witness search outcome for one `(family member, Nature action)` pair.
#[derive(Clone, Debug)]
pub struct DualConditionEntry<A> {
    pub family_index: usize,
    pub nature_index: usize,
    /// First grid action whose outcome lies in the orthant, if any.
    pub witness: Option<A>,
}

#[derive(Clone, Debug)]
pub struct DualConditionReport<A> {
    pub entries: Vec<DualConditionEntry<A>>,
    pub failures: usize,
}

impl<A> DualConditionReport<A> {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

/// Existence check for the dual form of Blackwell's condition: for each
/// `(g, b)` pair, scans `action_grid` in order for an action whose outcome
/// is componentwise `<= tolerance`, recording the first witness found.
///
/// Panics on empty grids.
pub fn check_dual_condition<G: OutcomeFunction>(
    family: &[G],
    nature_actions: &[G::Nature],
    action_grid: &[G::Dm],
    tolerance: f64,
) -> DualConditionReport<G::Dm>
where
    G::Dm: Clone,
{
    assert!(
        !family.is_empty() && !nature_actions.is_empty() && !action_grid.is_empty(),
        "grids must be nonempty"
    );
    let mut entries = Vec::with_capacity(family.len() * nature_actions.len());
    let mut failures = 0;
    for (fi, g) in family.iter().enumerate() {
        for (bi, b) in nature_actions.iter().enumerate() {
            let witness = action_grid.iter().find(|a| {
                let outcome = g.eval(a, b);
                (0..outcome.dim()).all(|i| outcome[i] <= tolerance)
            });
            if witness.is_none() {
                failures += 1;
            }
            entries.push(DualConditionEntry {
                family_index: fi,
                nature_index: bi,
                witness: witness.cloned(),
            });
        }
    }
    DualConditionReport { entries, failures }
}
