//! Seeded simulation of full plays.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bigmatch::{payoff, transition, AdversaryKind, GameState, LambdaSchedule, StrategyState};
use crate::geometry::Stage;

/// Everything recorded about one stage of play.
#[derive(Clone, Debug, PartialEq)]
pub struct StageRecord {
    pub t: Stage,
    /// Player I's mixed action (stopping probability).
    pub x: f64,
    /// Player II's mixed action.
    pub y: f64,
    /// Realized actions.
    pub i: bool,
    pub j: bool,
    /// Position at the start of the stage.
    pub state: GameState,
    /// Surviving mass `prod_{s<t} (1 - x_s)`.
    pub alpha: f64,
    /// Auxiliary outcome coordinates.
    pub r1: f64,
    pub r2: f64,
    /// Realized stage payoff, `+1` or `-1`.
    pub payoff: f64,
}

/// Full record of one simulated play-through.
///
/// The auxiliary stream `(alpha, x, r1, r2)` is driven by mixed actions
/// and keeps evolving after physical absorption; the payoff column alone
/// freezes at the absorbed sign.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub records: Vec<StageRecord>,
}

impl Trajectory {
    pub fn horizon(&self) -> Stage {
        self.records.len() as Stage
    }
}

/// Per-trial seed: splitmix64 finalizer over the master seed xor the
/// golden-ratio multiple of the trial index. Trials are independent and
/// reproducible under any execution order.
pub fn derive_seed(master: u64, trial: u64) -> u64 {
    let mut z = master ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Simulates `horizon` stages of the cap-following strategy against the
/// given adversary.
///
/// Per stage, in order: the adversary's mixed action from past realized
/// pairs, the Bernoulli draw of `j`, the strategy action and auxiliary
/// outcome, the Bernoulli draw of `i`, the realized payoff, and the state
/// transition. Both draws come from a ChaCha8 stream seeded with `seed`,
/// `j` first, so equal seeds give bit-identical trajectories.
pub fn play_trajectory(
    schedule: LambdaSchedule,
    adversary: &AdversaryKind,
    horizon: Stage,
    seed: u64,
) -> Trajectory {
    let mut strategy = StrategyState::new(schedule);
    play(
        |_, strategy| strategy.next_action(),
        &mut strategy,
        adversary,
        horizon,
        seed,
    )
}

/// Same protocol with an arbitrary Player I policy in place of the
/// strategy oracle. The policy sees the records so far; the auxiliary
/// stream and the mass recursion use its actions.
pub fn play_trajectory_with<F>(
    mut policy: F,
    schedule: LambdaSchedule,
    adversary: &AdversaryKind,
    horizon: Stage,
    seed: u64,
) -> Trajectory
where
    F: FnMut(Stage, &[StageRecord]) -> f64,
{
    let mut strategy = StrategyState::new(schedule);
    play(
        move |records, _strategy: &StrategyState| policy(records.len() as Stage + 1, records),
        &mut strategy,
        adversary,
        horizon,
        seed,
    )
}

fn play<F>(
    mut action: F,
    strategy: &mut StrategyState,
    adversary: &AdversaryKind,
    horizon: Stage,
    seed: u64,
) -> Trajectory
where
    F: FnMut(&[StageRecord], &StrategyState) -> f64,
{
    assert!(horizon >= 1, "horizon must be at least 1");
    let schedule = *strategy.schedule();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adv = adversary.spawn(schedule);
    let mut state = GameState::Omega1;
    let mut past: Vec<(bool, bool)> = Vec::with_capacity(horizon as usize);
    let mut records: Vec<StageRecord> = Vec::with_capacity(horizon as usize);

    for t in 1..=horizon {
        let y = adv.mixed_action(t, &past);
        let j = rng.gen::<f64>() < y;
        let alpha = strategy.alpha();
        let x = action(&records, strategy);
        let r = strategy.observe_forced(x, j);
        let i = rng.gen::<f64>() < x;
        let stage_payoff = payoff(i, j, state);
        records.push(StageRecord {
            t,
            x,
            y,
            i,
            j,
            state,
            alpha,
            r1: r[0],
            r2: r[1],
            payoff: stage_payoff,
        });
        state = transition(i, j, state);
        past.push((i, j));
    }
    Trajectory { records }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cooperative_adversary_never_triggers_stopping() {
        let schedule = LambdaSchedule::new(0.5);
        let traj = play_trajectory(schedule, &AdversaryKind::ConstZero, 200, 17);
        for rec in &traj.records {
            assert_eq!(rec.x, 0.0);
            assert!(!rec.i);
            assert_eq!(rec.state, GameState::Omega1);
            assert_eq!(rec.payoff, 1.0);
            assert_eq!(rec.alpha, 1.0);
        }
    }

    #[test]
    fn single_stage_trajectory() {
        let schedule = LambdaSchedule::new(1.0);
        let traj = play_trajectory(schedule, &AdversaryKind::IidBernoulli(0.5), 1, 99);
        assert_eq!(traj.horizon(), 1);
        let rec = &traj.records[0];
        assert_eq!(rec.t, 1);
        assert_eq!(rec.x, 0.0);
        assert_eq!(rec.alpha, 1.0);
        assert_eq!(rec.state, GameState::Omega1);
    }

    #[test]
    fn equal_seeds_give_identical_trajectories() {
        let schedule = LambdaSchedule::new(0.5);
        let a = play_trajectory(schedule, &AdversaryKind::IidBernoulli(0.5), 300, 4242);
        let b = play_trajectory(schedule, &AdversaryKind::IidBernoulli(0.5), 300, 4242);
        assert_eq!(a, b);
        let c = play_trajectory(schedule, &AdversaryKind::IidBernoulli(0.5), 300, 4243);
        assert_ne!(a, c);
    }

    #[test]
    fn derived_seeds_spread() {
        let s0 = derive_seed(7, 0);
        let s1 = derive_seed(7, 1);
        let s2 = derive_seed(8, 0);
        assert_ne!(s0, s1);
        assert_ne!(s0, s2);
        assert_eq!(s0, derive_seed(7, 0));
    }

    #[test]
    fn alpha_follows_the_product_recursion() {
        let schedule = LambdaSchedule::new(1.0);
        let traj = play_trajectory(schedule, &AdversaryKind::ConstOne, 100, 5);
        let mut expected = 1.0;
        for rec in &traj.records {
            assert_eq!(rec.alpha, expected);
            expected *= 1.0 - rec.x;
            if expected < 1e-300 {
                expected = 0.0;
            }
        }
    }

    #[test]
    fn absorption_freezes_payoff_but_not_the_aux_stream() {
        // Forced immediate stop: the payoff column locks at the absorbed
        // sign while x keeps being produced by the policy.
        let schedule = LambdaSchedule::new(1.0);
        let traj = play_trajectory_with(
            |t, _| if t == 1 { 1.0 } else { 0.5 },
            schedule,
            &AdversaryKind::ConstZero,
            10,
            3,
        );
        assert_eq!(traj.records[0].payoff, -1.0); // i=1, j=0 mismatch
        for rec in &traj.records[1..] {
            assert_eq!(rec.state, GameState::StarMinus);
            assert_eq!(rec.payoff, -1.0);
            assert_eq!(rec.x, 0.5);
            assert_eq!(rec.alpha, 0.0);
        }
    }

    #[test]
    #[should_panic(expected = "horizon")]
    fn zero_horizon_rejected() {
        play_trajectory(LambdaSchedule::new(0.5), &AdversaryKind::ConstZero, 0, 1);
    }
}
