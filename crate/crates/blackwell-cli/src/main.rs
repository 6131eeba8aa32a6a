//! Command-line front end: simulate, verify, and sweep runs over the Big
//! Match strategy, with CSV/JSON outputs.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on
//! configuration or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use blackwell_cli::config::{
    parse_adversary, parse_grid, ExperimentConfig, Mode, OutputFormat,
};
use blackwell_cli::io;
use blackwell_cli::runs::{self, failures};

#[derive(Parser, Debug)]
#[command(
    name = "blackwell",
    about = "Big Match strategy simulator and verifier built on time-dependent Blackwell approachability"
)]
struct Cli {
    /// Cap scale epsilon in (0, 1]; the stage cap is epsilon * t^(-3/4)
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,

    /// Stages per trajectory
    #[arg(long, default_value_t = 512)]
    horizon: u64,

    /// Monte Carlo trial count
    #[arg(long, default_value_t = 1000)]
    trials: u64,

    /// Master seed; trial k runs on a seed derived from (seed, k)
    #[arg(long, default_value_t = 24150)]
    seed: u64,

    /// Player II: const0 | const1 | bernoulli:Q | periodic:P,P,... | spiteful
    #[arg(long, default_value = "bernoulli:0.5")]
    adversary: String,

    #[arg(long, value_enum, default_value_t = Mode::Verify)]
    mode: Mode,

    /// Output directory (created if missing); artifacts depend on the mode
    #[arg(long)]
    out: Option<PathBuf>,

    /// Stdout rendering when --out is absent
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    /// Swap a deliberately broken oracle into the condition check
    #[arg(long)]
    break_oracle: bool,

    /// Sweep grid as comma-separated eps:horizon pairs, e.g. 0.6:64,0.5:512
    #[arg(long)]
    grid: Option<String>,

    /// Trajectories to dump as per-stage CSVs in simulate mode
    #[arg(long, default_value_t = 1)]
    dump_trajectories: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let adversary = parse_adversary(&cli.adversary)?;
    let config = ExperimentConfig {
        epsilon: cli.epsilon,
        horizon: cli.horizon,
        trials: cli.trials,
        master_seed: cli.seed,
        adversary,
        mode: cli.mode,
        output_path: cli.out.clone(),
        output_format: cli.format,
    };
    config.validate()?;

    match cli.mode {
        Mode::Simulate => {
            let summary = runs::run_simulate(&config, cli.dump_trajectories)?;
            match cli.format {
                OutputFormat::Json => io::write_summary_json(std::io::stdout().lock(), &summary)?,
                OutputFormat::Csv => {
                    println!(
                        "gamma_hat = {} +- {} ({} trials, horizon {})",
                        summary.gamma_hat, summary.stderr, summary.n_trials, config.horizon
                    );
                    if let Some(dir) = &config.output_path {
                        println!("artifacts under {}", dir.display());
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Mode::Verify => {
            let results = runs::run_verify(&config, cli.break_oracle)?;
            match cli.format {
                OutputFormat::Json => io::write_checks_json(std::io::stdout().lock(), &results)?,
                OutputFormat::Csv => {
                    for result in &results {
                        println!("{}", result.line());
                    }
                }
            }
            let failed = failures(&results);
            if failed == 0 {
                println!("verify: all {} checks passed", results.len());
                Ok(ExitCode::SUCCESS)
            } else {
                println!("verify: {failed} of {} checks FAILED", results.len());
                Ok(ExitCode::from(1))
            }
        }
        Mode::Sweep => {
            let grid_text = cli
                .grid
                .as_deref()
                .ok_or_else(|| anyhow::anyhow!("sweep mode needs --grid"))?;
            let grid = parse_grid(grid_text)?;
            let rows = runs::run_sweep(&config, &grid)?;
            match cli.format {
                OutputFormat::Json => {
                    println!("{}", serde_json::to_string_pretty(&rows)?);
                }
                OutputFormat::Csv => {
                    io::write_sweep_csv(std::io::stdout().lock(), &rows)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
