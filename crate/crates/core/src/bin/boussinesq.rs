use std::path::PathBuf;
use std::process::ExitCode;

use boussinesq::experiment::{
    report, run_converge, run_increments, run_moments, run_selftest, run_simulate, sup_energy_means, ExperimentConfig,
    Outcome, RunOptions,
};
use boussinesq::Error;
use clap::{Args, Parser, Subcommand};

/// Stochastic Boussinesq solver and convergence laboratory.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trajectory on the reference mesh, writing checkpoints.
    Simulate(CampaignArgs),
    /// Coupled-ladder errors, strong and in-probability rates.
    Converge(CampaignArgs),
    /// Sup and dissipation moments across the ladder.
    Moments(CampaignArgs),
    /// Mean squared time increments on the reference mesh.
    Increments(CampaignArgs),
    /// Identity suite on a small grid.
    Selftest {
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Also write selftest.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CampaignArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the configuration).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Reuse finished paths or checkpoints found in the output directory.
    #[arg(long)]
    resume: bool,
}

impl CampaignArgs {
    fn load(&self) -> Result<(ExperimentConfig, RunOptions), Error> {
        let cfg = ExperimentConfig::load(&self.config)?;
        let out = self.out.clone().unwrap_or_else(|| cfg.output.clone());
        let opts = RunOptions {
            out,
            workers: self.workers,
            resume: self.resume,
        };
        Ok((cfg, opts))
    }
}

fn outcome_code(o: &Outcome) -> ExitCode {
    if o.failures > 0 {
        eprintln!("{} of {} paths diverged", o.failures, o.paths);
    }
    if o.exceeded() {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Simulate(args) => {
            let (cfg, opts) = args.load()?;
            let s = run_simulate(&cfg, &opts)?;
            let (ru, rt) = s.stats.max_energy_residual();
            println!("seed {} ran {} steps into {}", s.seed, s.steps, opts.out.display());
            println!(
                "max ||u||^2 {:.6e}  max ||theta||^2 {:.6e}",
                s.stats.sup_v0_u, s.stats.sup_h0_theta
            );
            println!("largest energy residuals {ru:.3e} (u) {rt:.3e} (theta)");
            Ok(ExitCode::SUCCESS)
        }
        Command::Converge(args) => {
            let (cfg, opts) = args.load()?;
            let s = run_converge(&cfg, &opts)?;
            for l in &s.levels {
                println!(
                    "N = {:>6}  mean max sq error {:.6e}  ({} of {} paths)",
                    l.steps, l.mean_sq_err, l.used, l.samples
                );
            }
            if let Some(f) = &s.strong_rate {
                println!("localized squared-error slope {:.4} (R^2 {:.4})", f.slope, f.r_squared);
            }
            Ok(outcome_code(&s.outcome))
        }
        Command::Moments(args) => {
            let (cfg, opts) = args.load()?;
            let s = run_moments(&cfg, &opts)?;
            for (n, e) in sup_energy_means(&s.rows) {
                println!("N = {n:>6}  E[max ||u||^2 + max ||theta||^2] = {e:.6e}");
            }
            println!("spread across the ladder {:.4}", s.sup_energy_spread);
            Ok(outcome_code(&s.outcome))
        }
        Command::Increments(args) => {
            let (cfg, opts) = args.load()?;
            let s = run_increments(&cfg, &opts)?;
            if let Some(e) = &s.exponents {
                println!(
                    "velocity increment slope {:.4}, temperature {:.4}",
                    e.velocity.slope, e.temperature.slope
                );
            }
            Ok(outcome_code(&s.outcome))
        }
        Command::Selftest { grid, samples, out } => {
            let r = run_selftest(grid, samples)?;
            for c in &r.checks {
                let verdict = if c.passed { "pass" } else { "FAIL" };
                println!(
                    "{verdict}  {:<45} {:.3e} (tolerance {:.1e})",
                    c.name, c.value, c.tolerance
                );
            }
            println!("{:.2} s", r.elapsed_seconds);
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                report::write_json(&dir.join("selftest.json"), &r)?;
            }
            Ok(if r.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
