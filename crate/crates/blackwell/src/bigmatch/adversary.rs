//! Player II strategies for the simulator.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::bigmatch::{LambdaSchedule, StrategyState};
use crate::geometry::Stage;

/// Player II strategy kinds understood by the simulator and the CLI.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AdversaryKind {
    /// Always plays 0.
    ConstZero,
    /// Always plays 1.
    ConstOne,
    /// Plays 1 with a fixed probability each stage.
    IidBernoulli(f64),
    /// Cycles through a fixed pattern of mixed actions.
    Periodic(Vec<f64>),
    /// Cooperates until Player I's cumulative stopping mass crosses
    /// `epsilon / 2`, then defects forever.
    Spiteful,
}

impl AdversaryKind {
    pub fn validate(&self) -> Result<(), &'static str> {
        match self {
            AdversaryKind::IidBernoulli(q) => {
                if !(0.0..=1.0).contains(q) {
                    return Err("bernoulli parameter must lie in [0, 1]");
                }
            }
            AdversaryKind::Periodic(pattern) => {
                if pattern.is_empty() {
                    return Err("periodic pattern must be nonempty");
                }
                if !pattern.iter().all(|p| (0.0..=1.0).contains(p)) {
                    return Err("periodic pattern entries must lie in [0, 1]");
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Fresh per-trajectory strategy instance.
    ///
    /// Panics on an invalid kind; validate first when the kind comes from
    /// user input.
    pub fn spawn(&self, schedule: LambdaSchedule) -> Box<dyn Adversary> {
        self.validate().expect("invalid adversary");
        match self {
            AdversaryKind::ConstZero => Box::new(Fixed(0.0)),
            AdversaryKind::ConstOne => Box::new(Fixed(1.0)),
            AdversaryKind::IidBernoulli(q) => Box::new(Fixed(*q)),
            AdversaryKind::Periodic(pattern) => Box::new(Cycle {
                pattern: pattern.clone(),
            }),
            AdversaryKind::Spiteful => Box::new(Spiteful {
                mirror: StrategyState::new(schedule),
                mass: 0.0,
                threshold: schedule.epsilon() / 2.0,
            }),
        }
    }
}

/// A behavioral strategy for Player II.
///
/// `mixed_action` sees only the realized action pairs of past stages, in
/// keeping with simultaneous play: Player I's current mixed action is
/// never visible.
pub trait Adversary {
    /// The probability of playing 1 at stage `t`, given the realized
    /// `(i, j)` pairs of stages `1..t`.
    fn mixed_action(&mut self, t: Stage, past: &[(bool, bool)]) -> f64;
}

struct Fixed(f64);

impl Adversary for Fixed {
    fn mixed_action(&mut self, _t: Stage, _past: &[(bool, bool)]) -> f64 {
        self.0
    }
}

struct Cycle {
    pattern: Vec<f64>,
}

impl Adversary for Cycle {
    fn mixed_action(&mut self, t: Stage, _past: &[(bool, bool)]) -> f64 {
        self.pattern[((t - 1) % self.pattern.len() as u64) as usize]
    }
}

/// Stress adversary calibrated against the cap-following strategy: it
/// mirrors Player I's deterministic actions from the realized `j` stream,
/// watches the cumulative stopping mass `sum alpha_s x_s`, and flips to
/// permanent defection once the mass crosses the threshold.
struct Spiteful {
    mirror: StrategyState,
    mass: f64,
    threshold: f64,
}

impl Adversary for Spiteful {
    fn mixed_action(&mut self, t: Stage, past: &[(bool, bool)]) -> f64 {
        while self.mirror.stage() < t {
            let (_, j) = past[(self.mirror.stage() - 1) as usize];
            let x = self.mirror.next_action();
            self.mass += self.mirror.alpha() * x;
            self.mirror.observe(j);
        }
        if self.mass > self.threshold {
            1.0
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn fixed_kinds() {
        let s = LambdaSchedule::new(0.5);
        assert_eq!(AdversaryKind::ConstZero.spawn(s).mixed_action(1, &[]), 0.0);
        assert_eq!(AdversaryKind::ConstOne.spawn(s).mixed_action(1, &[]), 1.0);
        assert_eq!(
            AdversaryKind::IidBernoulli(0.3).spawn(s).mixed_action(5, &[]),
            0.3
        );
    }

    #[test]
    fn periodic_cycles_by_stage() {
        let s = LambdaSchedule::new(0.5);
        let mut adv = AdversaryKind::Periodic(vec![0.0, 1.0, 0.25]).spawn(s);
        assert_eq!(adv.mixed_action(1, &[]), 0.0);
        assert_eq!(adv.mixed_action(2, &[]), 1.0);
        assert_eq!(adv.mixed_action(3, &[]), 0.25);
        assert_eq!(adv.mixed_action(4, &[]), 0.0);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(AdversaryKind::IidBernoulli(1.5).validate().is_err());
        assert!(AdversaryKind::Periodic(vec![]).validate().is_err());
        assert!(AdversaryKind::Periodic(vec![0.5, -0.1]).validate().is_err());
        assert!(AdversaryKind::Spiteful.validate().is_ok());
    }

    #[test]
    fn spiteful_cooperates_against_cooperation() {
        // Against all-zero bits the strategy never stops, the mass stays
        // zero, and the spiteful adversary never defects.
        let s = LambdaSchedule::new(0.5);
        let mut adv = AdversaryKind::Spiteful.spawn(s);
        let mut past: Vec<(bool, bool)> = Vec::new();
        for t in 1..=50u64 {
            let y = adv.mixed_action(t, &past);
            assert_eq!(y, 0.0, "stage {t}");
            past.push((false, false));
        }
    }

    #[test]
    fn spiteful_defects_once_mass_crosses() {
        // Feed defection bits so the mirrored strategy ramps its stopping
        // probability; the threshold must eventually trip and latch.
        let s = LambdaSchedule::new(1.0);
        let mut adv = AdversaryKind::Spiteful.spawn(s);
        let mut past: Vec<(bool, bool)> = Vec::new();
        let mut defected_at = None;
        for t in 1..=2000u64 {
            let y = adv.mixed_action(t, &past);
            if y == 1.0 {
                defected_at = Some(t);
                break;
            }
            past.push((false, true));
        }
        let start = defected_at.expect("spiteful never defected");
        // Latched: still defecting later regardless of further bits.
        past.push((false, true));
        assert_eq!(adv.mixed_action(start + 1, &past), 1.0);
    }
}
