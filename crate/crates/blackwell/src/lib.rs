//! Blackwell approachability with time-dependent outcome functions and
//! inner products, and its application to the Big Match stochastic game.
//!
//! The crate is organized in three layers:
//!
//! - [`geometry`]: stage-indexed diagonal inner products, the norms they
//!   induce, and exact projection onto the negative orthant;
//! - [`approachability`]: outcome functions, oracles, the Blackwell runner
//!   that plays one, and online trackers for the distance guarantee;
//! - [`bigmatch`]: the Big Match game, the auxiliary outcome family whose
//!   Blackwell algorithm yields Player I's strategy, adversaries for
//!   Player II, and Monte Carlo payoff estimators.
//!
//! Everything here is deterministic given a seed. The library is
//! `no_std`-compatible (it requires `alloc`); disable the default `std`
//! feature and enable `libm` for float math on bare targets.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod math;

pub mod approachability;
pub mod bigmatch;
pub mod geometry;
pub mod stats;

pub use geometry::{Stage, Vector, WeightSchedule};
