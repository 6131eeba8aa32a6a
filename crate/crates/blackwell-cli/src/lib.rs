//! Experiment harness around the `blackwell` library: configuration,
//! simulate/verify/sweep runs, and the CSV/JSON surfaces they emit.

pub mod checks;
pub mod config;
pub mod io;
pub mod runs;
