//! File formats: trajectory and trial CSVs, the generic runner-log CSV,
//! and the summary JSON.
//!
//! Column orders are part of the interface; the golden-file tests pin
//! them. Floats print with Rust's shortest round-trip formatting, so
//! equal runs produce byte-identical files.

use std::io::{self, Write};

use blackwell::approachability::{OutcomeFunction, Step};
use blackwell::bigmatch::Trajectory;
use blackwell::geometry::Vector;

use crate::runs::{CheckResult, Summary, SweepRow, TrialRow};

fn bit(b: bool) -> u8 {
    u8::from(b)
}

/// Per-stage trajectory log. Columns:
/// `t,x_t,y_t,i_t,j_t,omega_t,alpha_t,r1,r2,payoff_t`.
pub fn write_trajectory_csv<W: Write>(mut out: W, traj: &Trajectory) -> io::Result<()> {
    writeln!(out, "t,x_t,y_t,i_t,j_t,omega_t,alpha_t,r1,r2,payoff_t")?;
    for rec in &traj.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            rec.t,
            rec.x,
            rec.y,
            bit(rec.i),
            bit(rec.j),
            rec.state,
            rec.alpha,
            rec.r1,
            rec.r2,
            rec.payoff
        )?;
    }
    Ok(())
}

/// One row per trial with the audited functionals.
pub fn write_trials_csv<W: Write>(mut out: W, rows: &[TrialRow]) -> io::Result<()> {
    writeln!(
        out,
        "trial,seed,payoff_direct,lemma1_sample,third_term,mass,absorbed,eq5,eq6,energy"
    )?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.trial,
            row.seed,
            row.payoff_direct,
            row.lemma1,
            row.third_term,
            row.mass,
            bit(row.absorbed),
            row.eq5,
            row.eq6,
            row.energy
        )?;
    }
    Ok(())
}

/// Generic runner log. Columns:
/// `t,a_t,b_t,r_1..r_d,norm_sq_t,cum_R_1..cum_R_d`, with the cumulative
/// outcome resummed while writing.
pub fn write_runner_log_csv<W, G, FA, FB>(
    mut out: W,
    log: &[Step<G>],
    fmt_dm: FA,
    fmt_nature: FB,
) -> io::Result<()>
where
    W: Write,
    G: OutcomeFunction,
    FA: Fn(&G::Dm) -> String,
    FB: Fn(&G::Nature) -> String,
{
    let dim = log.first().map_or(0, |step| step.outcome.dim());
    let mut header = String::from("t,a_t,b_t");
    for coord in 1..=dim {
        header.push_str(&format!(",r_{coord}"));
    }
    header.push_str(",norm_sq_t");
    for coord in 1..=dim {
        header.push_str(&format!(",cum_R_{coord}"));
    }
    writeln!(out, "{header}")?;

    let mut cumulative = Vector::zeros(dim);
    for (idx, step) in log.iter().enumerate() {
        cumulative.add_assign(&step.outcome);
        let mut line = format!(
            "{},{},{}",
            idx + 1,
            fmt_dm(&step.dm),
            fmt_nature(&step.nature)
        );
        for coord in 0..dim {
            line.push_str(&format!(",{}", step.outcome[coord]));
        }
        line.push_str(&format!(",{}", step.norm_sq));
        for coord in 0..dim {
            line.push_str(&format!(",{}", cumulative[coord]));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Sweep table sorted by `(epsilon, horizon)`. Columns:
/// `epsilon,horizon,trials,gamma_hat,stderr,eq5_max,eq6_max,energy_max,bound_neg9eps`.
pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(
        out,
        "epsilon,horizon,trials,gamma_hat,stderr,eq5_max,eq6_max,energy_max,bound_neg9eps"
    )?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.epsilon,
            row.horizon,
            row.trials,
            row.gamma_hat,
            row.stderr,
            row.eq5_max,
            row.eq6_max,
            row.energy_max,
            row.bound_neg9eps
        )?;
    }
    Ok(())
}

pub fn write_summary_json<W: Write>(mut out: W, summary: &Summary) -> io::Result<()> {
    let text = serde_json::to_string_pretty(summary)?;
    writeln!(out, "{text}")
}

pub fn write_checks_json<W: Write>(mut out: W, results: &[CheckResult]) -> io::Result<()> {
    let text = serde_json::to_string_pretty(results)?;
    writeln!(out, "{text}")
}
