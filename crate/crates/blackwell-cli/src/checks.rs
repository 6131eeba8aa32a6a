//! Replay verification of simulated trajectories.
//!
//! Everything here recomputes from the per-stage records, independently of
//! the engine's internal accumulators, so a bookkeeping bug on either side
//! shows up as a disagreement.

use blackwell::approachability::{
    check_blackwell_condition, check_dual_condition, BlackwellConditionReport, Oracle, Runner,
};
use blackwell::bigmatch::{
    self, aux_outcome, estimators, strategy_step, AdversaryKind, AuxOutcome, BigMatchOracle,
    GameState, LambdaSchedule, Trajectory,
};
use blackwell::geometry::{project_neg_orthant, weighted_dot, weighted_norm, Vector};
use blackwell::{Stage, WeightSchedule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Worst-case slacks and functionals of one trajectory, from a single
/// replay pass. "Violation" fields are `observed - bound`, so anything
/// positive is a failure at that tolerance.
#[derive(Clone, Copy, Debug)]
pub struct TrajectoryAudit {
    pub horizon: u64,
    /// Max over stages of `||residual(R_t)||_(t)/t - sqrt(ledger_t)/t`.
    pub thm1_max_violation: f64,
    /// Max over stages and coordinates of the per-coordinate bound slack.
    pub cor1_max_violation: f64,
    /// Max over stages of `|<r_t, residual(R_{t-1})>_(t)|`.
    pub oracle_max_dot: f64,
    /// Final energy `sum_t ||r_t||^2_(t)`.
    pub energy: f64,
    /// Max over stages of `ledger_t - 9 eps^2`.
    pub energy_max_violation: f64,
    /// Max over stages of `||r_t||^2_(t) - 3 lambda_t^2`.
    pub stage_energy_max_violation: f64,
    /// Stages where `x_t` leaves `[0, lambda_t]` (exact comparison).
    pub x_cap_violations: usize,
    /// Stages where the stopping-mass necessity bound fails on its domain.
    pub necessity_violations: usize,
    /// Mass recursion `alpha_1 = 1`, `alpha_{t+1} = alpha_t (1 - x_t)`.
    pub alpha_recursion_ok: bool,
    /// Payoff and state columns match the game rules replayed bit by bit.
    pub payoff_rules_ok: bool,
    /// Logged auxiliary outcomes match `aux_outcome` recomputed.
    pub outcomes_ok: bool,
    pub eq5: f64,
    pub eq6: f64,
    /// `|lemma-form payoff - (-eq5 - eq6 + third term)|`.
    pub three_term_gap: f64,
    pub payoff_direct: f64,
    pub lemma1: f64,
    pub third_term: f64,
    pub mass: f64,
    pub absorbed: bool,
}

/// Replays a trajectory against the rules and the anytime bounds.
pub fn audit_trajectory(traj: &Trajectory, schedule: &LambdaSchedule) -> TrajectoryAudit {
    assert!(!traj.records.is_empty(), "empty trajectory");
    let eps = schedule.epsilon();
    let energy_budget = 9.0 * eps * eps;

    let mut cumulative = Vector::zeros(2);
    let mut prefix = [0.0f64; 2];
    let mut ledger = 0.0;
    let mut thm1_max_violation = f64::NEG_INFINITY;
    let mut cor1_max_violation = f64::NEG_INFINITY;
    let mut oracle_max_dot: f64 = 0.0;
    let mut energy_max_violation = f64::NEG_INFINITY;
    let mut stage_energy_max_violation = f64::NEG_INFINITY;
    let mut x_cap_violations = 0;
    let mut necessity_violations = 0;
    let mut alpha_recursion_ok = true;
    let mut payoff_rules_ok = true;
    let mut outcomes_ok = true;

    let mut expected_alpha = 1.0;
    let mut expected_state = GameState::Omega1;

    for rec in &traj.records {
        let t = rec.t;
        let lt = schedule.lambda(t);

        if !(rec.x >= 0.0 && rec.x <= lt) {
            x_cap_violations += 1;
        }
        let denom = 1.0 - (t - 1) as f64 * eps;
        if denom > 0.0 && rec.x > eps / denom + 1e-12 {
            necessity_violations += 1;
        }
        if rec.alpha != expected_alpha {
            alpha_recursion_ok = false;
        }
        expected_alpha *= 1.0 - rec.x;
        if expected_alpha < 1e-300 {
            expected_alpha = 0.0;
        }
        if rec.state != expected_state
            || rec.payoff != bigmatch::payoff(rec.i, rec.j, rec.state)
        {
            payoff_rules_ok = false;
        }
        expected_state = bigmatch::transition(rec.i, rec.j, expected_state);

        let outcome = Vector::new(vec![rec.r1, rec.r2]);
        if outcome != aux_outcome(rec.alpha, lt, rec.x, rec.j) {
            outcomes_ok = false;
        }

        let (_, residual_prev) = project_neg_orthant(&cumulative);
        let dot = weighted_dot(schedule, t, &outcome, &residual_prev).abs();
        oracle_max_dot = oracle_max_dot.max(dot);

        cumulative.add_assign(&outcome);
        prefix[0] += rec.r1;
        prefix[1] += rec.r2;
        let stage_energy = weighted_dot(schedule, t, &outcome, &outcome);
        ledger += stage_energy;

        stage_energy_max_violation =
            stage_energy_max_violation.max(stage_energy - 3.0 * lt * lt);
        energy_max_violation = energy_max_violation.max(ledger - energy_budget);

        let horizon = t as f64;
        let (_, residual_now) = project_neg_orthant(&cumulative);
        let rhs = ledger.sqrt() / horizon;
        let lhs = weighted_norm(schedule, t, &residual_now) / horizon;
        thm1_max_violation = thm1_max_violation.max(lhs - rhs);
        for (coord, p) in prefix.iter().enumerate() {
            let coord_lhs = p / horizon;
            let coord_rhs = ledger.sqrt() / (horizon * schedule.weight(t, coord));
            cor1_max_violation = cor1_max_violation.max(coord_lhs - coord_rhs);
        }
    }

    let trackers = estimators::bound_trackers(traj, schedule);
    let third_term = estimators::third_term_sample(traj, schedule);
    let lemma1 = estimators::payoff_telescoped(traj);
    let three_term_gap = (lemma1 - (-trackers.eq5 - trackers.eq6 + third_term)).abs();

    TrajectoryAudit {
        horizon: traj.horizon(),
        thm1_max_violation,
        cor1_max_violation,
        oracle_max_dot,
        energy: trackers.energy,
        energy_max_violation,
        stage_energy_max_violation,
        x_cap_violations,
        necessity_violations,
        alpha_recursion_ok,
        payoff_rules_ok,
        outcomes_ok,
        eq5: trackers.eq5,
        eq6: trackers.eq6,
        three_term_gap,
        payoff_direct: estimators::payoff_direct(traj),
        lemma1,
        third_term,
        mass: estimators::absorption_mass(traj),
        absorbed: estimators::is_absorbed(traj),
    }
}

/// Whether every logged action is reproduced by the closed-form replay
/// from the records before it. O(T^2); sample sparingly.
pub fn strategy_reconstruction_ok(traj: &Trajectory, schedule: &LambdaSchedule) -> bool {
    (0..traj.records.len())
        .all(|t| strategy_step(&traj.records[..t], schedule) == traj.records[t].x)
}

/// Oracle that ignores its inputs; stands in for a broken strategy when
/// the harness needs to prove the condition check can fail.
pub struct ZeroOracle;

impl Oracle<AuxOutcome> for ZeroOracle {
    fn choose(&self, _t: Stage, _g: &AuxOutcome, _cumulative: &Vector) -> f64 {
        0.0
    }
}

/// Spot-checks Blackwell's condition for the strategy oracle (or the
/// deliberately broken one) over random stages, family members, and
/// cumulative outcomes.
pub fn blackwell_condition_spotcheck(
    schedule: LambdaSchedule,
    break_oracle: bool,
    samples: usize,
    seed: u64,
) -> BlackwellConditionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: Option<BlackwellConditionReport> = None;
    for _ in 0..samples {
        let t = rng.gen_range(1..=100_000u64);
        let g = AuxOutcome {
            alpha: rng.gen_range(0.0..=1.0),
            lambda: rng.gen_range(1e-4..=1.0),
        };
        let scale = 10f64.powi(rng.gen_range(-3..=3));
        let cumulative = vec![Vector::new(vec![
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
        ])];
        let report = if break_oracle {
            check_blackwell_condition(&ZeroOracle, &g, &schedule, t, &cumulative, &[false, true])
        } else {
            let oracle = BigMatchOracle { schedule };
            check_blackwell_condition(&oracle, &g, &schedule, t, &cumulative, &[false, true])
        };
        worst = Some(match worst {
            Some(prev) if prev.max_delta >= report.max_delta => BlackwellConditionReport {
                checked: prev.checked + report.checked,
                violations: prev.violations + report.violations,
                ..prev
            },
            Some(prev) => BlackwellConditionReport {
                checked: prev.checked + report.checked,
                violations: prev.violations + report.violations,
                ..report
            },
            None => report,
        });
    }
    worst.expect("samples must be positive")
}

/// Grid witness search for the dual condition over random family members.
/// Returns the largest distance between the found witness and the
/// analytic one (`x = 0` against `j = 0`, `x = lambda` against `j = 1`).
pub fn dual_condition_spotcheck(cases: usize, resolution: f64, seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = (1.0 / resolution).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| k as f64 * resolution).collect();
    let mut max_gap = 0.0f64;
    for case in 0..cases {
        let g = AuxOutcome {
            alpha: rng.gen_range(0.01..=1.0),
            lambda: rng.gen_range(1e-3..=1.0),
        };
        let report = check_dual_condition(&[g], &[false, true], &grid, 1e-9);
        if !report.pass() {
            return Err(format!("case {case}: no witness for {g:?}"));
        }
        for entry in &report.entries {
            let witness = entry.witness.expect("pass implies witness");
            let analytic = if entry.nature_index == 0 { 0.0 } else { g.lambda };
            let gap = (witness - analytic).abs();
            if gap > resolution {
                return Err(format!(
                    "case {case}: witness {witness} is {gap} from analytic {analytic}"
                ));
            }
            max_gap = max_gap.max(gap);
        }
    }
    Ok(max_gap)
}

/// A short auxiliary run on the generic runner with logging on, for the
/// runner-log CSV artifact and its schema test.
pub fn sample_logged_run(
    schedule: LambdaSchedule,
    horizon: u64,
    seed: u64,
) -> Runner<LambdaSchedule, AuxOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let oracle = BigMatchOracle { schedule };
    let mut runner = Runner::with_log(schedule);
    let mut alpha = 1.0f64;
    for t in 1..=horizon {
        let g = AuxOutcome {
            alpha,
            lambda: schedule.lambda(t),
        };
        let j = rng.gen_bool(0.5);
        let (x, _) = runner.step(&g, &oracle, j);
        alpha *= 1.0 - x;
    }
    runner
}

/// Convenience wrapper: one strategy trajectory for trial `k`.
pub fn trial_trajectory(
    schedule: LambdaSchedule,
    adversary: &AdversaryKind,
    horizon: u64,
    master_seed: u64,
    trial: u64,
) -> Trajectory {
    bigmatch::play_trajectory(
        schedule,
        adversary,
        horizon,
        bigmatch::derive_seed(master_seed, trial),
    )
}

/// Sanity anchor for broken-oracle injection: the hand-computed delta for
/// the all-zero oracle against residual `(0, 1)` is `lambda_t^2` exactly.
pub fn broken_oracle_reference_delta(schedule: &LambdaSchedule, t: u64) -> f64 {
    let g = AuxOutcome {
        alpha: 1.0,
        lambda: schedule.lambda(t),
    };
    let cumulative = vec![Vector::new(vec![0.0, 1.0])];
    let report =
        check_blackwell_condition(&ZeroOracle, &g, schedule, t, &cumulative, &[true]);
    report.max_delta
}

#[cfg(test)]
mod tests {
    use super::*;
    use blackwell::bigmatch::play_trajectory;

    #[test]
    fn audit_is_clean_on_strategy_play() {
        let schedule = LambdaSchedule::new(0.5);
        for kind in [
            AdversaryKind::ConstZero,
            AdversaryKind::ConstOne,
            AdversaryKind::IidBernoulli(0.5),
            AdversaryKind::Spiteful,
        ] {
            let traj = play_trajectory(schedule, &kind, 256, 7);
            let audit = audit_trajectory(&traj, &schedule);
            assert_eq!(audit.x_cap_violations, 0);
            assert_eq!(audit.necessity_violations, 0);
            assert!(audit.alpha_recursion_ok);
            assert!(audit.payoff_rules_ok);
            assert!(audit.outcomes_ok);
            assert!(audit.thm1_max_violation <= 1e-9);
            assert!(audit.cor1_max_violation <= 1e-9);
            assert!(audit.oracle_max_dot <= 1e-12);
            assert!(audit.energy_max_violation <= 1e-9);
            assert!(audit.stage_energy_max_violation <= 1e-12);
            assert!(audit.three_term_gap <= 1e-10);
        }
    }

    #[test]
    fn audit_flags_a_tampered_log() {
        let schedule = LambdaSchedule::new(0.5);
        let mut traj = play_trajectory(schedule, &AdversaryKind::IidBernoulli(0.5), 64, 9);
        traj.records[10].payoff = -traj.records[10].payoff;
        traj.records[20].alpha += 0.125;
        let audit = audit_trajectory(&traj, &schedule);
        assert!(!audit.payoff_rules_ok);
        assert!(!audit.alpha_recursion_ok);
    }

    #[test]
    fn reconstruction_matches_logged_actions() {
        let schedule = LambdaSchedule::new(0.5);
        let traj = play_trajectory(schedule, &AdversaryKind::IidBernoulli(0.5), 128, 5);
        assert!(strategy_reconstruction_ok(&traj, &schedule));
    }

    #[test]
    fn condition_spotcheck_passes_for_the_real_oracle() {
        let schedule = LambdaSchedule::new(0.5);
        let report = blackwell_condition_spotcheck(schedule, false, 500, 11);
        assert!(report.pass(), "max delta {}", report.max_delta);
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn condition_spotcheck_fails_for_the_broken_oracle() {
        let schedule = LambdaSchedule::new(0.5);
        let report = blackwell_condition_spotcheck(schedule, true, 500, 11);
        assert!(!report.pass());
        assert!(report.violations > 0);
    }

    #[test]
    fn broken_oracle_reference_value() {
        let schedule = LambdaSchedule::new(0.5);
        let t = 4;
        let lt = schedule.lambda(t);
        assert_eq!(broken_oracle_reference_delta(&schedule, t), lt * lt);
    }

    #[test]
    fn dual_witnesses_sit_on_the_analytic_points() {
        let max_gap = dual_condition_spotcheck(50, 1e-3, 3).unwrap();
        assert!(max_gap <= 1e-3);
    }

    #[test]
    fn dual_condition_zero_mass_member_accepts_any_action() {
        // With alpha = 0 the outcome vanishes identically, so the scan
        // stops at the first grid point for both opponent bits.
        let g = AuxOutcome {
            alpha: 0.0,
            lambda: 0.5,
        };
        let report = check_dual_condition(&[g], &[false, true], &[0.0, 0.5, 1.0], 1e-9);
        assert!(report.pass());
        assert_eq!(report.entries[0].witness, Some(0.0));
        assert_eq!(report.entries[1].witness, Some(0.0));
    }

    #[test]
    fn logged_run_satisfies_the_anytime_bound() {
        let schedule = LambdaSchedule::new(0.5);
        let runner = sample_logged_run(schedule, 32, 21);
        let (lhs, rhs) = runner.distance_bound();
        assert!(lhs <= rhs + 1e-12);
        let ledger = runner.sq_ledger();
        let recomputed = runner.recomputed_sq_ledger();
        assert!((ledger - recomputed).abs() <= 1e-12 * ledger.max(1.0));
    }
}
