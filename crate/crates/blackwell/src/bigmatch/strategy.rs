//! Player I's strategy: the Blackwell runner on the auxiliary problem.

use crate::approachability::{Oracle, Runner};
use crate::bigmatch::{aux_outcome, AuxOutcome, BigMatchOracle, LambdaSchedule, StageRecord};
use crate::geometry::{Stage, Vector};

/// Incremental strategy state; O(1) work per stage.
///
/// Holds the runner accumulating the auxiliary outcomes and the surviving
/// mass `alpha = prod_{s<t} (1 - x_s)`. The stopping probability for the
/// stage about to be played is [`StrategyState::next_action`]; feeding the
/// realized Player II bit to [`StrategyState::observe`] advances both.
pub struct StrategyState {
    runner: Runner<LambdaSchedule, AuxOutcome>,
    oracle: BigMatchOracle,
    alpha: f64,
}

impl StrategyState {
    pub fn new(schedule: LambdaSchedule) -> Self {
        Self {
            runner: Runner::new(schedule),
            oracle: BigMatchOracle { schedule },
            alpha: 1.0,
        }
    }

    pub fn schedule(&self) -> &LambdaSchedule {
        self.runner.schedule()
    }

    /// The stage about to be played (1-based).
    pub fn stage(&self) -> Stage {
        self.runner.stage() + 1
    }

    /// `alpha_t` for the upcoming stage.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Energy spent so far: `sum_{s<t} ||r_s||^2_(s)`.
    pub fn sq_ledger(&self) -> f64 {
        self.runner.sq_ledger()
    }

    /// Cumulative auxiliary outcome `R_{t-1}`.
    pub fn cumulative(&self) -> &Vector {
        self.runner.cumulative()
    }

    /// The outcome function Nature presents this stage.
    pub fn outcome_fn(&self) -> AuxOutcome {
        AuxOutcome {
            alpha: self.alpha,
            lambda: self.schedule().lambda(self.stage()),
        }
    }

    /// The strategy's stopping probability `x_t`; always in
    /// `[0, lambda(t)]`.
    pub fn next_action(&self) -> f64 {
        self.oracle
            .choose(self.stage(), &self.outcome_fn(), self.runner.cumulative())
    }

    /// Plays the stage against realized bit `j`, returning `(x_t, r_t)`.
    pub fn observe(&mut self, j: bool) -> (f64, Vector) {
        let g = self.outcome_fn();
        let (x, r) = self.runner.step(&g, &self.oracle, j);
        self.advance_alpha(x);
        (x, r)
    }

    /// Plays the stage with an externally forced action instead of the
    /// oracle's choice (test doubles); the auxiliary outcome and the mass
    /// recursion still use the forced action.
    pub fn observe_forced(&mut self, x: f64, j: bool) -> Vector {
        assert!((0.0..=1.0).contains(&x), "actions live in [0, 1]");
        let g = self.outcome_fn();
        let (_, r) = self.runner.step(&g, &Forced(x), j);
        self.advance_alpha(x);
        r
    }

    fn advance_alpha(&mut self, x: f64) {
        self.alpha *= 1.0 - x;
        // Flush ahead of the subnormal range; the mass is dead weight there.
        if self.alpha < 1e-300 {
            self.alpha = 0.0;
        }
    }
}

struct Forced(f64);

impl Oracle<AuxOutcome> for Forced {
    fn choose(&self, _t: Stage, _g: &AuxOutcome, _cumulative: &Vector) -> f64 {
        self.0
    }
}

/// Recomputes the strategy action for stage `history.len() + 1` from the
/// logged records alone, resumming the auxiliary outcomes in stage order.
/// For records produced by [`StrategyState`] this reproduces its actions
/// bit for bit.
pub fn strategy_step(history: &[StageRecord], schedule: &LambdaSchedule) -> f64 {
    let mut cumulative = Vector::zeros(2);
    for rec in history {
        cumulative.add_assign(&aux_outcome(rec.alpha, schedule.lambda(rec.t), rec.x, rec.j));
    }
    let t = history.len() as Stage + 1;
    bigmatch_oracle_at(schedule, t, &cumulative)
}

fn bigmatch_oracle_at(schedule: &LambdaSchedule, t: Stage, cumulative: &Vector) -> f64 {
    let lambda_t = schedule.lambda(t);
    crate::bigmatch::bigmatch_oracle(lambda_t, lambda_t, cumulative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmatch::GameState;
    use alloc::vec::Vec;

    fn record(t: Stage, x: f64, j: bool, alpha: f64, schedule: &LambdaSchedule) -> StageRecord {
        let r = aux_outcome(alpha, schedule.lambda(t), x, j);
        StageRecord {
            t,
            x,
            y: if j { 1.0 } else { 0.0 },
            i: false,
            j,
            state: GameState::Omega1,
            alpha,
            r1: r[0],
            r2: r[1],
            payoff: 0.0,
        }
    }

    #[test]
    fn first_stage_plays_zero() {
        let schedule = LambdaSchedule::new(0.5);
        assert_eq!(strategy_step(&[], &schedule), 0.0);
        assert_eq!(StrategyState::new(schedule).next_action(), 0.0);
    }

    #[test]
    fn second_stage_after_adverse_bit_plays_the_cap() {
        // x_1 = 0 and j_1 = 1 give r_1 = (0, 1): the residual sits on the
        // second axis and the oracle answers lambda(2).
        let schedule = LambdaSchedule::new(0.5);
        let history = [record(1, 0.0, true, 1.0, &schedule)];
        assert_eq!(strategy_step(&history, &schedule), schedule.lambda(2));
    }

    #[test]
    fn second_stage_after_favorable_bit_stays_at_zero() {
        // x_1 = 0 and j_1 = 0 give r_1 = (0, -1): zero residual.
        let schedule = LambdaSchedule::new(0.5);
        let history = [record(1, 0.0, false, 1.0, &schedule)];
        assert_eq!(strategy_step(&history, &schedule), 0.0);
    }

    #[test]
    fn incremental_state_matches_batch_replay() {
        let schedule = LambdaSchedule::new(0.8);
        let bits = [true, false, true, true, false, true, false, false, true, true];
        let mut state = StrategyState::new(schedule);
        let mut history: Vec<StageRecord> = Vec::new();
        for (idx, &j) in bits.iter().enumerate() {
            let t = idx as Stage + 1;
            let replayed = strategy_step(&history, &schedule);
            let alpha = state.alpha();
            let (x, r) = state.observe(j);
            assert_eq!(x, replayed, "stage {t}");
            history.push(StageRecord {
                t,
                x,
                y: 1.0,
                i: false,
                j,
                state: GameState::Omega1,
                alpha,
                r1: r[0],
                r2: r[1],
                payoff: 0.0,
            });
        }
    }

    #[test]
    fn actions_respect_the_cap() {
        let schedule = LambdaSchedule::new(1.0);
        let mut state = StrategyState::new(schedule);
        for t in 1..=500u64 {
            let x = state.next_action();
            assert!(x >= 0.0 && x <= schedule.lambda(t), "stage {t}: x = {x}");
            // Adversarial bit pattern: defect twice, cooperate once.
            state.observe(t % 3 != 0);
        }
    }

    #[test]
    fn forced_actions_drive_the_mass_to_zero() {
        let schedule = LambdaSchedule::new(0.5);
        let mut state = StrategyState::new(schedule);
        state.observe_forced(1.0, false);
        assert_eq!(state.alpha(), 0.0);
        let r = state.observe_forced(0.3, true);
        assert_eq!(r, Vector::zeros(2));
    }
}
