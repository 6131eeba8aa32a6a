//! The Big Match: a two-player zero-sum absorbing game.
//!
//! Both players pick a bit each stage. While the game is live, matching
//! bits pay Player I `+1` and mismatches `-1`; the moment Player I plays
//! `1` the game absorbs, into the all-`+1` state if Player II also played
//! `1` and into the all-`-1` state otherwise.
//!
//! Player I's strategy here is Blackwell's algorithm on an auxiliary
//! two-dimensional approachability problem: the first outcome coordinate
//! tracks the stopping mass committed so far, the second the
//! current-stage exposure, and driving both averages into the negative
//! orthant under the shrinking [`LambdaSchedule`] metric controls the
//! game payoff. [`play_trajectory`] simulates the whole loop against a
//! chosen [`AdversaryKind`] and records everything needed by the
//! estimators in [`estimators`].

mod adversary;
pub mod estimators;
mod oracle;
mod schedule;
mod simulate;
mod strategy;

pub use adversary::{Adversary, AdversaryKind};
pub use oracle::{aux_outcome, bigmatch_oracle, AuxOutcome, BigMatchOracle};
pub use schedule::LambdaSchedule;
pub use simulate::{derive_seed, play_trajectory, play_trajectory_with, StageRecord, Trajectory};
pub use strategy::{strategy_step, StrategyState};

/// Game position: the live state and the two absorbing states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameState {
    /// Live state; play still matters.
    Omega1,
    /// Absorbed with permanent payoff `+1`.
    StarPlus,
    /// Absorbed with permanent payoff `-1`.
    StarMinus,
}

impl GameState {
    pub fn is_absorbing(self) -> bool {
        self != GameState::Omega1
    }
}

impl core::fmt::Display for GameState {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            GameState::Omega1 => "omega1",
            GameState::StarPlus => "1*",
            GameState::StarMinus => "-1*",
        })
    }
}

/// Stage payoff to Player I: the absorbed sign if absorbed, otherwise
/// `+1` on matching bits and `-1` on a mismatch.
pub fn payoff(i: bool, j: bool, state: GameState) -> f64 {
    match state {
        GameState::StarPlus => 1.0,
        GameState::StarMinus => -1.0,
        GameState::Omega1 => {
            if i == j {
                1.0
            } else {
                -1.0
            }
        }
    }
}

/// State update. Absorbing states persist; from the live state Player I's
/// `1` absorbs — to `1*` when Player II also plays `1`, else to `-1*`.
pub fn transition(i: bool, j: bool, state: GameState) -> GameState {
    match state {
        GameState::StarPlus => GameState::StarPlus,
        GameState::StarMinus => GameState::StarMinus,
        GameState::Omega1 => {
            if i {
                if j {
                    GameState::StarPlus
                } else {
                    GameState::StarMinus
                }
            } else {
                GameState::Omega1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payoff_table_live_state() {
        assert_eq!(payoff(false, false, GameState::Omega1), 1.0);
        assert_eq!(payoff(true, true, GameState::Omega1), 1.0);
        assert_eq!(payoff(true, false, GameState::Omega1), -1.0);
        assert_eq!(payoff(false, true, GameState::Omega1), -1.0);
    }

    #[test]
    fn payoff_absorbed_ignores_actions() {
        for i in [false, true] {
            for j in [false, true] {
                assert_eq!(payoff(i, j, GameState::StarPlus), 1.0);
                assert_eq!(payoff(i, j, GameState::StarMinus), -1.0);
            }
        }
    }

    #[test]
    fn transition_from_live_state() {
        assert_eq!(transition(true, true, GameState::Omega1), GameState::StarPlus);
        assert_eq!(transition(true, false, GameState::Omega1), GameState::StarMinus);
        assert_eq!(transition(false, false, GameState::Omega1), GameState::Omega1);
        assert_eq!(transition(false, true, GameState::Omega1), GameState::Omega1);
    }

    #[test]
    fn absorbing_states_persist() {
        for i in [false, true] {
            for j in [false, true] {
                assert_eq!(transition(i, j, GameState::StarPlus), GameState::StarPlus);
                assert_eq!(transition(i, j, GameState::StarMinus), GameState::StarMinus);
            }
        }
    }

    #[test]
    fn state_labels() {
        use alloc::string::ToString;
        assert_eq!(GameState::Omega1.to_string(), "omega1");
        assert_eq!(GameState::StarPlus.to_string(), "1*");
        assert_eq!(GameState::StarMinus.to_string(), "-1*");
    }
}
