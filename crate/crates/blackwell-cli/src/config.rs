//! Experiment configuration and CLI-facing parsers.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use blackwell::bigmatch::AdversaryKind;
use serde::{Deserialize, Serialize};

/// What a run should do.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Monte Carlo payoff estimation with per-trial and summary outputs.
    Simulate,
    /// Run the full invariant and identity suite; nonzero exit on failure.
    Verify,
    /// Evaluate a grid of `(epsilon, horizon)` points.
    Sweep,
}

/// Primary stdout rendering when no output directory is given.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// All knobs of one run. Round-trips losslessly through JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Cap scale in `(0, 1]`.
    pub epsilon: f64,
    /// Stages per trajectory.
    pub horizon: u64,
    /// Monte Carlo trial count.
    pub trials: u64,
    /// Master seed; trial `k` runs on `derive_seed(master_seed, k)`.
    pub master_seed: u64,
    pub adversary: AdversaryKind,
    pub mode: Mode,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(ConfigError(format!(
                "epsilon must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        if self.horizon == 0 {
            return Err(ConfigError("horizon must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(ConfigError("trials must be at least 1".into()));
        }
        self.adversary
            .validate()
            .map_err(|msg| ConfigError(msg.into()))
    }
}

/// Adversary spellings accepted on the command line:
/// `const0`, `const1`, `bernoulli:Q`, `periodic:P,P,...`, `spiteful`.
pub fn parse_adversary(s: &str) -> Result<AdversaryKind, ConfigError> {
    let kind = match s {
        "const0" => AdversaryKind::ConstZero,
        "const1" => AdversaryKind::ConstOne,
        "spiteful" => AdversaryKind::Spiteful,
        _ => {
            if let Some(q) = s.strip_prefix("bernoulli:") {
                let q = f64::from_str(q)
                    .map_err(|_| ConfigError(format!("bad bernoulli parameter in '{s}'")))?;
                AdversaryKind::IidBernoulli(q)
            } else if let Some(pattern) = s.strip_prefix("periodic:") {
                let entries: Result<Vec<f64>, _> =
                    pattern.split(',').map(f64::from_str).collect();
                let entries =
                    entries.map_err(|_| ConfigError(format!("bad periodic pattern in '{s}'")))?;
                AdversaryKind::Periodic(entries)
            } else {
                return Err(ConfigError(format!(
                    "unknown adversary '{s}' (want const0 | const1 | bernoulli:Q | periodic:P,... | spiteful)"
                )));
            }
        }
    };
    kind.validate().map_err(|msg| ConfigError(msg.into()))?;
    Ok(kind)
}

/// Grid spellings for sweep mode: comma-separated `epsilon:horizon` pairs,
/// e.g. `0.6:64,0.5:512`.
pub fn parse_grid(s: &str) -> Result<Vec<(f64, u64)>, ConfigError> {
    let mut grid = Vec::new();
    for part in s.split(',') {
        let (eps, horizon) = part
            .split_once(':')
            .ok_or_else(|| ConfigError(format!("grid entry '{part}' is not eps:horizon")))?;
        let eps = f64::from_str(eps)
            .map_err(|_| ConfigError(format!("bad epsilon in grid entry '{part}'")))?;
        let horizon = u64::from_str(horizon)
            .map_err(|_| ConfigError(format!("bad horizon in grid entry '{part}'")))?;
        grid.push((eps, horizon));
    }
    if grid.is_empty() {
        return Err(ConfigError("grid must be nonempty".into()));
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig {
            epsilon: 0.5,
            horizon: 512,
            trials: 1000,
            master_seed: 0x5EED,
            adversary: AdversaryKind::IidBernoulli(0.5),
            mode: Mode::Verify,
            output_path: None,
            output_format: OutputFormat::Csv,
        }
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut config = base();
        config.output_path = Some(PathBuf::from("/tmp/out"));
        config.adversary = AdversaryKind::Periodic(vec![0.0, 1.0, 0.25]);
        let text = serde_json::to_string(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn validation_catches_bad_fields() {
        let mut c = base();
        c.epsilon = 0.0;
        assert!(c.validate().is_err());
        let mut c = base();
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = base();
        c.horizon = 0;
        assert!(c.validate().is_err());
        let mut c = base();
        c.adversary = AdversaryKind::IidBernoulli(2.0);
        assert!(c.validate().is_err());
        assert!(base().validate().is_ok());
    }

    #[test]
    fn adversary_spellings() {
        assert_eq!(parse_adversary("const0").unwrap(), AdversaryKind::ConstZero);
        assert_eq!(parse_adversary("const1").unwrap(), AdversaryKind::ConstOne);
        assert_eq!(parse_adversary("spiteful").unwrap(), AdversaryKind::Spiteful);
        assert_eq!(
            parse_adversary("bernoulli:0.25").unwrap(),
            AdversaryKind::IidBernoulli(0.25)
        );
        assert_eq!(
            parse_adversary("periodic:0,1,0.5").unwrap(),
            AdversaryKind::Periodic(vec![0.0, 1.0, 0.5])
        );
        assert!(parse_adversary("bernoulli:1.5").is_err());
        assert!(parse_adversary("coinflip").is_err());
    }

    #[test]
    fn grid_spellings() {
        assert_eq!(
            parse_grid("0.6:64,0.05:100000").unwrap(),
            vec![(0.6, 64), (0.05, 100_000)]
        );
        assert!(parse_grid("0.6").is_err());
        assert!(parse_grid("x:64").is_err());
    }
}
