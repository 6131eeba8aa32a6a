//! Per-trajectory payoff functionals and Monte Carlo identities.
//!
//! [`payoff_direct`] averages the realized payoff column; the remaining
//! functionals evaluate the telescoped forms of the same quantity on the
//! mixed-action log. Their Monte Carlo means agree, which
//! [`absorption_check`] and the statistical harness checks exploit.

use alloc::vec::Vec;

use crate::bigmatch::{GameState, LambdaSchedule, Trajectory};
use crate::math;
use crate::stats;

/// Average realized stage payoff: one Monte Carlo sample of the
/// `T`-stage game value.
pub fn payoff_direct(traj: &Trajectory) -> f64 {
    assert!(!traj.records.is_empty(), "empty trajectory");
    let total: f64 = traj.records.iter().map(|rec| rec.payoff).sum();
    total / traj.horizon() as f64
}

/// The telescoped payoff functional of the same play: the averaged prefix
/// double sum of `alpha_s x_s (2 j_s - 1)` plus the averaged current-stage
/// term `alpha_t (2 x_t - 1)(2 j_t - 1)`. Estimates the same expectation
/// as [`payoff_direct`].
pub fn payoff_telescoped(traj: &Trajectory) -> f64 {
    assert!(!traj.records.is_empty(), "empty trajectory");
    let horizon = traj.horizon() as f64;
    let mut prefix = 0.0;
    let mut double_sum = 0.0;
    let mut single_sum = 0.0;
    for rec in &traj.records {
        double_sum += prefix;
        let j_sign = if rec.j { 1.0 } else { -1.0 };
        prefix += rec.alpha * rec.x * j_sign;
        single_sum += rec.alpha * (2.0 * rec.x - 1.0) * j_sign;
    }
    double_sum / horizon + single_sum / horizon
}

/// Per-trajectory functionals of the convergence analysis.
#[derive(Clone, Copy, Debug)]
pub struct BoundTrackers {
    /// `(1/T) sum_t sum_{s<t} r1_s`, the averaged prefix stopping-mass
    /// sum; at most `3 * epsilon` under the cap-following strategy.
    pub eq5: f64,
    /// `(1/T) sum_t r2_t`; at most `3 * T^(-1/4)`.
    pub eq6: f64,
    /// Metric energy `sum_t ||r_t||^2_(t)`; at most `9 * epsilon^2`.
    pub energy: f64,
    /// `(2 + 1/lambda_T) / T`, the a-priori bound on the magnitude of the
    /// discarded third term's expectation.
    pub eq10_bound: f64,
}

pub fn bound_trackers(traj: &Trajectory, schedule: &LambdaSchedule) -> BoundTrackers {
    assert!(!traj.records.is_empty(), "empty trajectory");
    let horizon = traj.horizon() as f64;
    let mut prefix = 0.0;
    let mut eq5_sum = 0.0;
    let mut eq6_sum = 0.0;
    let mut energy = 0.0;
    for rec in &traj.records {
        eq5_sum += prefix;
        prefix += rec.r1;
        eq6_sum += rec.r2;
        let lt = schedule.lambda(rec.t);
        energy += rec.r1 * rec.r1 + (lt * lt) * (rec.r2 * rec.r2);
    }
    BoundTrackers {
        eq5: eq5_sum / horizon,
        eq6: eq6_sum / horizon,
        energy,
        eq10_bound: (2.0 + 1.0 / schedule.lambda(traj.horizon())) / horizon,
    }
}

/// The third term of the three-way payoff split:
/// `(1/T) sum_t alpha_t x_t (2 - 1/lambda_t)(2 j_t - 1)`. Its expectation
/// magnitude is bounded by [`BoundTrackers::eq10_bound`].
pub fn third_term_sample(traj: &Trajectory, schedule: &LambdaSchedule) -> f64 {
    assert!(!traj.records.is_empty(), "empty trajectory");
    let horizon = traj.horizon() as f64;
    let mut sum = 0.0;
    for rec in &traj.records {
        let j_sign = if rec.j { 1.0 } else { -1.0 };
        sum += rec.alpha * rec.x * (2.0 - 1.0 / schedule.lambda(rec.t)) * j_sign;
    }
    sum / horizon
}

/// `sum_t alpha_t x_t`: in expectation, the probability that the game
/// absorbs by the horizon.
pub fn absorption_mass(traj: &Trajectory) -> f64 {
    traj.records.iter().map(|rec| rec.alpha * rec.x).sum()
}

/// Whether the play left the live state by the end of the horizon.
pub fn is_absorbed(traj: &Trajectory) -> bool {
    traj.records
        .iter()
        .any(|rec| rec.state == GameState::Omega1 && rec.i)
}

/// Returned when a statistical check has too few trials to mean anything.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Underpowered {
    pub trials: usize,
}

impl core::fmt::Display for Underpowered {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "underpowered statistical check: {} trials (need 100)", self.trials)
    }
}

impl core::error::Error for Underpowered {}

/// Agreement report for the stopping-mass/absorption identity.
#[derive(Clone, Copy, Debug)]
pub struct AbsorptionReport {
    pub trials: usize,
    /// Mean of `sum_t alpha_t x_t` across trials.
    pub mean_mass: f64,
    /// Fraction of trials absorbed by the horizon.
    pub absorbed_freq: f64,
    /// `|mean_mass - absorbed_freq|`.
    pub gap: f64,
    /// Four combined standard errors.
    pub tolerance: f64,
}

impl AbsorptionReport {
    pub fn pass(&self) -> bool {
        self.gap <= self.tolerance
    }
}

/// Compares the mean stopping mass against the empirical absorption
/// frequency over independent trials; the two estimate the same
/// probability. Refuses fewer than 100 trials.
pub fn absorption_check(trials: &[Trajectory]) -> Result<AbsorptionReport, Underpowered> {
    let samples: Vec<(f64, bool)> = trials
        .iter()
        .map(|traj| (absorption_mass(traj), is_absorbed(traj)))
        .collect();
    absorption_check_samples(&samples)
}

/// Sample-level form of [`absorption_check`] for streaming callers that
/// do not retain whole trajectories.
pub fn absorption_check_samples(samples: &[(f64, bool)]) -> Result<AbsorptionReport, Underpowered> {
    if samples.len() < 100 {
        return Err(Underpowered {
            trials: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let masses: Vec<f64> = samples.iter().map(|(m, _)| *m).collect();
    let mean_mass = stats::mean(&masses);
    let absorbed = samples.iter().filter(|(_, a)| *a).count() as f64;
    let absorbed_freq = absorbed / n;
    // Summing the two variances is conservative: the estimators are
    // positively correlated, which only shrinks the true variance of the
    // difference.
    let var = stats::sample_variance(&masses) + absorbed_freq * (1.0 - absorbed_freq);
    let tolerance = 4.0 * math::sqrt(var / n);
    Ok(AbsorptionReport {
        trials: samples.len(),
        mean_mass,
        absorbed_freq,
        gap: math::abs(mean_mass - absorbed_freq),
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmatch::{play_trajectory, play_trajectory_with, AdversaryKind, LambdaSchedule};
    use alloc::vec;

    fn schedule() -> LambdaSchedule {
        LambdaSchedule::new(0.5)
    }

    #[test]
    fn cooperative_play_pays_one() {
        let traj = play_trajectory(schedule(), &AdversaryKind::ConstZero, 64, 3);
        assert_eq!(payoff_direct(&traj), 1.0);
        // Telescoped form: zero double sum, all-ones single sum.
        assert!((payoff_telescoped(&traj) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn immediate_absorption_pays_minus_one() {
        let traj = play_trajectory_with(
            |_, _| 1.0,
            LambdaSchedule::new(1.0),
            &AdversaryKind::ConstZero,
            16,
            9,
        );
        assert_eq!(payoff_direct(&traj), -1.0);
        assert!(is_absorbed(&traj));
        assert_eq!(absorption_mass(&traj), 1.0);
    }

    #[test]
    fn single_stage_lemma1_form() {
        let traj = play_trajectory(LambdaSchedule::new(1.0), &AdversaryKind::IidBernoulli(0.5), 1, 7);
        let rec = &traj.records[0];
        let j_sign = if rec.j { 1.0 } else { -1.0 };
        let expected = rec.alpha * (2.0 * rec.x - 1.0) * j_sign;
        assert_eq!(payoff_telescoped(&traj), expected);
    }

    #[test]
    fn three_term_split_is_an_identity() {
        let s = schedule();
        for seed in 0..20u64 {
            let traj = play_trajectory(s, &AdversaryKind::IidBernoulli(0.5), 256, seed);
            let trackers = bound_trackers(&traj, &s);
            let third = third_term_sample(&traj, &s);
            // Lemma-form payoff = -(eq5 term) - (eq6 term) + third term,
            // with the sign flip from (1-2j) to (2j-1).
            let lemma = payoff_telescoped(&traj);
            let recombined = -trackers.eq5 - trackers.eq6 + third;
            assert!(
                (lemma - recombined).abs() <= 1e-10,
                "seed {seed}: {lemma} vs {recombined}"
            );
        }
    }

    #[test]
    fn cooperative_trackers_match_closed_forms() {
        let s = schedule();
        let horizon = 128u64;
        let traj = play_trajectory(s, &AdversaryKind::ConstZero, horizon, 11);
        let trackers = bound_trackers(&traj, &s);
        assert_eq!(trackers.eq5, 0.0);
        // x = 0 throughout: each stage contributes lambda_t^2 to the energy.
        let expected: f64 = (1..=horizon).map(|t| s.lambda(t) * s.lambda(t)).sum();
        assert!((trackers.energy - expected).abs() < 1e-12);
        assert!(trackers.energy <= 9.0 * s.epsilon() * s.epsilon());
        let bound = (2.0 + 1.0 / s.lambda(horizon)) / horizon as f64;
        assert_eq!(trackers.eq10_bound, bound);
    }

    #[test]
    fn per_stage_energy_cap() {
        let s = LambdaSchedule::new(1.0);
        for seed in 0..10u64 {
            let traj = play_trajectory(s, &AdversaryKind::IidBernoulli(0.5), 200, seed);
            for rec in &traj.records {
                let lt = s.lambda(rec.t);
                let stage_energy = rec.r1 * rec.r1 + (lt * lt) * (rec.r2 * rec.r2);
                assert!(stage_energy <= 3.0 * lt * lt + 1e-12, "stage {}", rec.t);
            }
        }
    }

    #[test]
    fn absorption_check_agrees_on_degenerate_cases() {
        let s = schedule();
        // Cooperative: mass and frequency are both exactly zero.
        let trials: Vec<Trajectory> = (0..120)
            .map(|k| play_trajectory(s, &AdversaryKind::ConstZero, 32, k))
            .collect();
        let report = absorption_check(&trials).unwrap();
        assert_eq!(report.mean_mass, 0.0);
        assert_eq!(report.absorbed_freq, 0.0);
        assert!(report.pass());

        // Forced immediate stop: both are exactly one.
        let trials: Vec<Trajectory> = (0..120)
            .map(|k| {
                play_trajectory_with(
                    |_, _| 1.0,
                    LambdaSchedule::new(1.0),
                    &AdversaryKind::IidBernoulli(0.5),
                    8,
                    k,
                )
            })
            .collect();
        let report = absorption_check(&trials).unwrap();
        assert_eq!(report.mean_mass, 1.0);
        assert_eq!(report.absorbed_freq, 1.0);
        assert!(report.pass());
    }

    #[test]
    fn absorption_check_refuses_underpowered_input() {
        let s = schedule();
        let trials: Vec<Trajectory> = (0..99)
            .map(|k| play_trajectory(s, &AdversaryKind::ConstZero, 8, k))
            .collect();
        assert_eq!(
            absorption_check(&trials).unwrap_err(),
            Underpowered { trials: 99 }
        );
    }

    #[test]
    fn absorption_identity_on_real_play() {
        let s = schedule();
        let samples: Vec<(f64, bool)> = (0..4000u64)
            .map(|k| {
                let traj = play_trajectory(s, &AdversaryKind::IidBernoulli(0.5), 64, 1000 + k);
                (absorption_mass(&traj), is_absorbed(&traj))
            })
            .collect();
        let report = absorption_check_samples(&samples).unwrap();
        assert!(report.pass(), "gap {} > tol {}", report.gap, report.tolerance);
    }

    #[test]
    #[should_panic(expected = "empty trajectory")]
    fn estimators_reject_empty_trajectories() {
        payoff_direct(&Trajectory { records: vec![] });
    }
}
