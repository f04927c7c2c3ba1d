//! CSV tables, JSON summaries and gnuplot scripts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::campaign::{ConvergeSummary, PathFailure};
use crate::analysis::{ErrorReport, IncrementTable, LevelSummary, MomentRow, ProbabilityEstimate};
use crate::scheme::TrajectoryStats;
use crate::{Error, Result};

fn write(path: &Path, text: String) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Checkpoint(e.to_string()))?;
    text.push('\n');
    write(path, text)
}

/// One row per (seed, N, t_j); `grad_err_sum` is the running sum up to `t_j`.
pub fn write_errors(out: &Path, reports: &[ErrorReport]) -> Result<()> {
    let mut s = String::from("seed,N,t_j,err_u_sq,err_theta_sq,grad_err_sum,localized\n");
    #[allow(clippy::needless_range_loop)]
    for r in reports {
        let grad = r.cumulative_gradient_sum();
        for j in 0..=r.steps {
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.seed,
                r.steps,
                r.time(j),
                r.err_u_sq[j],
                r.err_theta_sq[j],
                grad[j],
                r.localized
            )
            .unwrap();
        }
    }
    write(&out.join("errors.csv"), s)
}

pub fn write_rates(out: &Path, levels: &[LevelSummary]) -> Result<()> {
    let mut s = String::from("N,mean_sq_err,ci_lo,ci_hi\n");
    for l in levels {
        writeln!(s, "{},{},{},{}", l.steps, l.mean_sq_err, l.ci_lo, l.ci_hi).unwrap();
    }
    write(&out.join("rates.csv"), s)
}

/// `ci` is the half-width of the 95% Wilson interval; the bounds are in
/// `summary.json`.
pub fn write_probabilities(out: &Path, rows: &[ProbabilityEstimate]) -> Result<()> {
    let mut s = String::from("N,eta,p_hat,ci\n");
    for p in rows {
        writeln!(s, "{},{},{},{}", p.steps, p.eta, p.p_hat, p.half_width()).unwrap();
    }
    write(&out.join("proba.csv"), s)
}

pub fn write_failures(out: &Path, failures: &[&PathFailure]) -> Result<()> {
    let mut s = String::from("seed,N,step\n");
    for f in failures {
        writeln!(s, "{},{},{}", f.seed, f.steps, f.step).unwrap();
    }
    write(&out.join("failures.csv"), s)
}

pub fn write_moments(out: &Path, rows: &[MomentRow]) -> Result<()> {
    let mut s = String::from("N,order,functional,estimate,stderr\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{}",
            r.steps,
            r.order,
            r.functional.name(),
            r.estimate,
            r.stderr
        )
        .unwrap();
    }
    write(&out.join("moments.csv"), s)
}

pub fn write_increments(out: &Path, table: &IncrementTable) -> Result<()> {
    let mut s = String::from("delta,mean_sq_increment_u,mean_sq_increment_theta\n");
    for i in 0..table.delta.len() {
        writeln!(
            s,
            "{},{},{}",
            table.delta[i], table.mean_sq_increment_u[i], table.mean_sq_increment_theta[i]
        )
        .unwrap();
    }
    write(&out.join("increments.csv"), s)
}

pub fn write_trajectory_log(out: &Path, stats: &TrajectoryStats, h: f64) -> Result<()> {
    let mut s = String::from("step,t,picard_u,picard_theta,energy_residual_u,energy_residual_theta\n");
    for (l, ((iu, it), (ru, rt))) in stats.picard_iters.iter().zip(&stats.energy_residuals).enumerate() {
        writeln!(s, "{},{},{},{},{},{}", l + 1, (l + 1) as f64 * h, iu, it, ru, rt).unwrap();
    }
    write(&out.join("trajectory.csv"), s)
}

pub fn write_converge_plot(out: &Path, summary: &ConvergeSummary) -> Result<()> {
    let mut s = String::from(
        "# gnuplot -p plot.gp\n\
         set datafile separator ','\n\
         set key autotitle columnhead top left\n\
         set logscale xy\n\
         set xlabel 'N'\n\
         set ylabel 'mean max squared error'\n",
    );
    if let Some(fit) = &summary.strong_rate {
        writeln!(
            s,
            "fit_line(n) = exp({}) * ({} / n)**{}",
            fit.intercept,
            summary.levels.first().map_or(1.0, |l| l.step_size * l.steps as f64),
            fit.slope
        )
        .unwrap();
        s.push_str("plot 'rates.csv' using 1:2:3:4 with yerrorbars title 'localized mean', fit_line(x) title 'least squares'\n");
    } else {
        s.push_str("plot 'rates.csv' using 1:2:3:4 with yerrorbars title 'localized mean'\n");
    }
    s.push_str(
        "pause -1\n\
         unset logscale y\n\
         set ylabel 'P[error >= N^-eta]'\n\
         plot 'proba.csv' using 1:3:4 with yerrorbars title 'exceedance probability'\n",
    );
    write(&out.join("plot.gp"), s)
}

pub fn write_increment_plot(out: &Path) -> Result<()> {
    write(
        &out.join("plot.gp"),
        "# gnuplot -p plot.gp\n\
         set datafile separator ','\n\
         set key autotitle columnhead top left\n\
         set logscale xy\n\
         set xlabel 'delta'\n\
         set ylabel 'mean squared increment'\n\
         plot 'increments.csv' using 1:2 with linespoints, '' using 1:3 with linespoints\n"
            .to_string(),
    )
}
