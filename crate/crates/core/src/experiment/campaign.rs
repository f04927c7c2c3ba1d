//! Monte-Carlo campaigns over coupled mesh ladders.
//!
//! Path `p` uses seed `base_seed + p` for its Wiener paths (and its
//! initial data, unless fixed), so results do not depend on scheduling.
//! Every finished path is saved under `<out>/paths/` and reused by
//! `--resume`.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::report;
use crate::analysis::{
    estimate_gn_constant, estimate_probability_rate, estimate_strong_rate, fit_log_rate_constant, moment_table,
    summarize_levels, ErrorAccumulator, ErrorReport, Functional, IncrementExponents, IncrementRecorder, IncrementSums,
    IncrementTable, LevelSummary, LocalizationConfig, ProbabilityEstimate, RateConstants, RateFit,
};
use crate::checkpoint::{self, TrajectoryCheckpoint};
use crate::noise::NoisePair;
use crate::scheme::{SchemeState, Solver, TrajectoryStats};
use crate::{Error, Result};

/// Where and how to run a campaign.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub workers: usize,
    pub resume: bool,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self {
            out: out.into(),
            workers: 1,
            resume: false,
        }
    }
}

/// A path whose Picard iteration failed; it is excluded from every table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathFailure {
    pub seed: u64,
    /// Mesh on which the solve diverged.
    pub steps: usize,
    /// Step index of the failed solve.
    pub step: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub paths: usize,
    pub failures: usize,
    pub failure_tolerance: f64,
}

impl Outcome {
    /// More than the tolerated fraction of paths diverged.
    pub fn exceeded(&self) -> bool {
        self.failures as f64 > self.failure_tolerance * self.paths as f64
    }
}

fn seeds(cfg: &ExperimentConfig) -> Vec<u64> {
    (0..cfg.campaign.paths as u64)
        .map(|p| cfg.campaign.base_seed + p)
        .collect()
}

fn sample_noise(cfg: &ExperimentConfig, steps: usize, seed: u64) -> Result<NoisePair> {
    NoisePair::sample(
        &cfg.velocity_noise.covariance,
        &cfg.temperature_noise.covariance,
        steps,
        cfg.scheme.horizon,
        seed,
    )
}

fn initial_state(cfg: &ExperimentConfig, seed: u64) -> Result<SchemeState> {
    cfg.initial.state(cfg.grid()?, seed)
}

/// Converts a Picard failure into a recorded path failure; other errors
/// abort the campaign.
fn diverged<T>(r: Result<T>, seed: u64, steps: usize) -> Result<std::result::Result<T, PathFailure>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(Error::PicardDiverged { step, trace }) => Ok(Err(PathFailure {
            seed,
            steps,
            step,
            message: Error::PicardDiverged { step, trace }.to_string(),
        })),
        Err(e) => Err(e),
    }
}

fn prepare_output(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<()> {
    fs::create_dir_all(opts.out.join("paths"))?;
    let echo = cfg.to_toml()?;
    let file = opts.out.join("config.toml");
    if opts.resume {
        if let Ok(previous) = fs::read_to_string(&file) {
            if previous != echo {
                return Err(Error::Config(format!(
                    "--resume: {} was produced by a different configuration",
                    opts.out.display()
                )));
            }
        }
    }
    fs::write(file, echo)?;
    Ok(())
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
}

/// Runs `job` for every seed on the worker pool, reusing saved per-path
/// results under `--resume`. Results come back in seed order.
fn for_each_path<T>(
    cfg: &ExperimentConfig,
    opts: &RunOptions,
    tag: &str,
    job: impl Fn(u64) -> Result<T> + Sync,
) -> Result<Vec<T>>
where
    T: Serialize + DeserializeOwned + Send,
{
    prepare_output(cfg, opts)?;
    let dir = opts.out.join("paths");
    let run = |seed: u64| -> Result<T> {
        let file = dir.join(format!("{tag}-{seed}.json"));
        if opts.resume {
            if let Ok(text) = fs::read_to_string(&file) {
                if let Ok(saved) = serde_json::from_str(&text) {
                    return Ok(saved);
                }
            }
        }
        let result = job(seed)?;
        let text = serde_json::to_string(&result).map_err(|e| Error::Checkpoint(e.to_string()))?;
        let partial = file.with_extension("json.part");
        fs::write(&partial, text)?;
        fs::rename(&partial, &file)?;
        Ok(result)
    };
    let seeds = seeds(cfg);
    pool(opts.workers)?.install(|| seeds.par_iter().map(|&s| run(s)).collect())
}

// ---- converge ---------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergePath {
    pub seed: u64,
    pub reference: Option<TrajectoryStats>,
    /// Reports with localization not yet applied.
    pub reports: Vec<ErrorReport>,
    pub failure: Option<PathFailure>,
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

fn converge_path(cfg: &ExperimentConfig, seed: u64) -> Result<ConvergePath> {
    let n_ref = cfg.campaign.reference;
    let noise = sample_noise(cfg, n_ref, seed)?;
    let init = initial_state(cfg, seed)?;
    let mut solver = Solver::new(cfg.model(n_ref)?);
    let stride = n_ref / cfg.campaign.ladder.iter().fold(1, |a, &b| lcm(a, b));
    let failed = |failure| ConvergePath {
        seed,
        reference: None,
        reports: Vec::new(),
        failure: Some(failure),
    };
    let reference = match diverged(
        solver.run_trajectory(init.clone(), &noise, n_ref, Some(stride)),
        seed,
        n_ref,
    )? {
        Ok(t) => t,
        Err(f) => return Ok(failed(f)),
    };
    let mut reports = Vec::new();
    for &n in &cfg.campaign.ladder {
        let mut acc = ErrorAccumulator::new(&reference, n, LocalizationConfig::unbounded())?;
        let mut observed = Ok(());
        let run = solver.run_observed(init.clone(), &noise, n, None, |j, s| {
            if observed.is_ok() {
                observed = acc.observe(j, s);
            }
        });
        if let Err(f) = diverged(run, seed, n)? {
            return Ok(failed(f));
        }
        observed?;
        reports.push(acc.finish()?);
    }
    Ok(ConvergePath {
        seed,
        reference: Some(reference.stats),
        reports,
        failure: None,
    })
}

/// Result of [`run_converge`], also written to `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergeSummary {
    pub outcome: Outcome,
    /// Localization threshold `M` used (`None`: unbounded).
    pub threshold: Option<f64>,
    pub localized_paths: usize,
    pub levels: Vec<LevelSummary>,
    /// Fit of the localized mean squared error against `h`.
    pub strong_rate: Option<RateFit>,
    pub unlocalized_levels: Vec<LevelSummary>,
    pub unlocalized_rate: Option<RateFit>,
    /// Least-squares constant of the `(ln N)^{-5}` envelope against the
    /// unlocalized means.
    pub log_rate_constant: Option<f64>,
    pub probability: Vec<ProbabilityEstimate>,
    pub gn_constant: f64,
    /// `9(1+gamma)C^2/8 max(5/nu, 1/kappa) M` and `exp` of it times `T`.
    pub coupling: Option<f64>,
    pub growth_factor: Option<f64>,
    pub note: &'static str,
}

/// Localization threshold from the configuration: fixed, a quantile of the
/// reference functionals, or unbounded.
pub fn localization_threshold(cfg: &ExperimentConfig, references: &[&TrajectoryStats]) -> Option<f64> {
    if let Some(m) = cfg.campaign.threshold {
        return Some(m);
    }
    let f = cfg.campaign.localize_fraction?;
    let mut sups: Vec<f64> = references.iter().map(|s| s.sup_v1_u.max(s.sup_h1_theta)).collect();
    if sups.is_empty() {
        return None;
    }
    sups.sort_by(f64::total_cmp);
    let k = ((f * sups.len() as f64).ceil() as usize).clamp(1, sups.len());
    Some(sups[k - 1])
}

pub fn run_converge(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ConvergeSummary> {
    if cfg.campaign.ladder.is_empty() {
        return Err(Error::Config(
            "campaign.ladder: converge needs at least one mesh".into(),
        ));
    }
    let paths = for_each_path(cfg, opts, "converge", |seed| converge_path(cfg, seed))?;
    let failures: Vec<&PathFailure> = paths.iter().filter_map(|p| p.failure.as_ref()).collect();
    let ok: Vec<&ConvergePath> = paths.iter().filter(|p| p.failure.is_none()).collect();
    let refs: Vec<&TrajectoryStats> = ok.iter().filter_map(|p| p.reference.as_ref()).collect();
    let threshold = localization_threshold(cfg, &refs);
    let loc = threshold.map_or(LocalizationConfig::unbounded(), |m| LocalizationConfig { threshold: m });

    let mut reports = Vec::new();
    let mut localized_paths = 0;
    for p in &ok {
        let inside = loc.contains(p.reference.as_ref().expect("successful path has a reference"));
        localized_paths += inside as usize;
        for r in &p.reports {
            let mut r = r.clone();
            r.localized = inside;
            r.threshold = loc.threshold;
            reports.push(r);
        }
    }
    reports.sort_by_key(|r| (r.seed, r.steps));

    let horizon = cfg.scheme.horizon;
    let levels = summarize_levels(&reports, true).unwrap_or_default();
    let unlocalized_levels = summarize_levels(&reports, false).unwrap_or_default();
    let strong_rate = estimate_strong_rate(&reports, true).ok().map(|s| s.fit);
    let unlocalized_rate = estimate_strong_rate(&reports, false).ok().map(|s| s.fit);
    let meshes: Vec<f64> = unlocalized_levels.iter().map(|l| l.steps as f64).collect();
    let means: Vec<f64> = unlocalized_levels.iter().map(|l| l.mean_sq_err).collect();
    let log_rate_constant = if meshes.iter().all(|&n| n > 1.0) && !meshes.is_empty() {
        fit_log_rate_constant(3, &meshes, &means).ok()
    } else {
        None
    };
    let probability = estimate_probability_rate(&reports, cfg.campaign.eta)?;
    let gn = estimate_gn_constant(cfg.grid()?, 1000, cfg.campaign.base_seed)?;
    let constants = RateConstants::new(
        cfg.campaign.eta,
        cfg.campaign.gamma,
        gn.constant,
        cfg.scheme.nu,
        cfg.scheme.kappa,
    )?;

    let summary = ConvergeSummary {
        outcome: Outcome {
            paths: paths.len(),
            failures: failures.len(),
            failure_tolerance: cfg.campaign.failure_tolerance,
        },
        threshold,
        localized_paths,
        levels,
        strong_rate,
        unlocalized_levels,
        unlocalized_rate,
        log_rate_constant,
        probability,
        gn_constant: gn.constant,
        coupling: threshold.map(|m| constants.coupling(m)),
        growth_factor: threshold.map(|m| constants.growth_factor(m, horizon)),
        note: "errors are measured against the same scheme on the reference mesh; the reference bias is at most the finest-level error",
    };
    report::write_errors(&opts.out, &reports)?;
    report::write_rates(&opts.out, &summary.levels)?;
    report::write_probabilities(&opts.out, &summary.probability)?;
    report::write_failures(&opts.out, &failures)?;
    report::write_json(&opts.out.join("summary.json"), &summary)?;
    report::write_converge_plot(&opts.out, &summary)?;
    Ok(summary)
}

// ---- moments ----------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentPath {
    pub seed: u64,
    pub stats: Vec<(usize, TrajectoryStats)>,
    pub failure: Option<PathFailure>,
}

fn moment_meshes(cfg: &ExperimentConfig) -> Vec<usize> {
    if cfg.campaign.ladder.is_empty() {
        vec![cfg.campaign.reference]
    } else {
        cfg.campaign.ladder.clone()
    }
}

fn moment_path(cfg: &ExperimentConfig, seed: u64) -> Result<MomentPath> {
    let n_ref = cfg.campaign.reference;
    let noise = sample_noise(cfg, n_ref, seed)?;
    let init = initial_state(cfg, seed)?;
    let mut solver = Solver::new(cfg.model(n_ref)?);
    let mut stats = Vec::new();
    for n in moment_meshes(cfg) {
        match diverged(solver.run_trajectory(init.clone(), &noise, n, None), seed, n)? {
            Ok(t) => stats.push((n, t.stats)),
            Err(f) => {
                return Ok(MomentPath {
                    seed,
                    stats: Vec::new(),
                    failure: Some(f),
                })
            }
        }
    }
    Ok(MomentPath {
        seed,
        stats,
        failure: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentSummary {
    pub outcome: Outcome,
    pub rows: Vec<crate::analysis::MomentRow>,
    /// Largest over smallest estimate of `E[max ||u||^2 + max ||theta||^2]`
    /// across the ladder.
    pub sup_energy_spread: f64,
}

pub fn run_moments(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<MomentSummary> {
    let paths = for_each_path(cfg, opts, "moments", |seed| moment_path(cfg, seed))?;
    let failures: Vec<&PathFailure> = paths.iter().filter_map(|p| p.failure.as_ref()).collect();
    let ensembles: Vec<(usize, Vec<TrajectoryStats>)> = moment_meshes(cfg)
        .into_iter()
        .map(|n| {
            let stats = paths
                .iter()
                .filter(|p| p.failure.is_none())
                .flat_map(|p| p.stats.iter().filter(|(m, _)| *m == n).map(|(_, s)| s.clone()))
                .collect();
            (n, stats)
        })
        .collect();
    let rows = moment_table(&ensembles, &cfg.campaign.moment_orders);
    let energy: Vec<f64> = ensembles
        .iter()
        .filter(|(_, s)| !s.is_empty())
        .map(|(_, s)| s.iter().map(TrajectoryStats::sup_energy).sum::<f64>() / s.len() as f64)
        .collect();
    let spread =
        energy.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / energy.iter().cloned().fold(f64::INFINITY, f64::min);
    let summary = MomentSummary {
        outcome: Outcome {
            paths: paths.len(),
            failures: failures.len(),
            failure_tolerance: cfg.campaign.failure_tolerance,
        },
        rows,
        sup_energy_spread: spread,
    };
    report::write_moments(&opts.out, &summary.rows)?;
    report::write_failures(&opts.out, &failures)?;
    report::write_json(&opts.out.join("summary.json"), &summary)?;
    Ok(summary)
}

/// `E[max_l ||u^l||^2 + max_l ||theta^l||^2]` per mesh, from a moment table.
pub fn sup_energy_means(rows: &[crate::analysis::MomentRow]) -> Vec<(usize, f64)> {
    rows.iter()
        .filter(|r| r.order == 2 && r.functional == Functional::SupEnergy)
        .map(|r| (r.steps, r.estimate))
        .collect()
}

// ---- increments -------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncrementPath {
    pub seed: u64,
    pub sums: Option<IncrementSums>,
    pub failure: Option<PathFailure>,
}

fn increment_path(cfg: &ExperimentConfig, seed: u64) -> Result<IncrementPath> {
    let n = cfg.campaign.reference;
    let noise = sample_noise(cfg, n, seed)?;
    let init = initial_state(cfg, seed)?;
    let mut solver = Solver::new(cfg.model(n)?);
    let mut rec = IncrementRecorder::new(cfg.lags())?;
    let run = solver.run_observed(init, &noise, n, None, |_, s| rec.push(s));
    Ok(match diverged(run, seed, n)? {
        Ok(_) => IncrementPath {
            seed,
            sums: Some(rec.finish()),
            failure: None,
        },
        Err(f) => IncrementPath {
            seed,
            sums: None,
            failure: Some(f),
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IncrementSummary {
    pub outcome: Outcome,
    pub table: IncrementTable,
    pub exponents: Option<IncrementExponents>,
}

pub fn run_increments(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<IncrementSummary> {
    let paths = for_each_path(cfg, opts, "increments", |seed| increment_path(cfg, seed))?;
    let failures: Vec<&PathFailure> = paths.iter().filter_map(|p| p.failure.as_ref()).collect();
    let mut total = IncrementSums::new(cfg.lags());
    for p in &paths {
        if let Some(s) = &p.sums {
            total.merge(s)?;
        }
    }
    let h = cfg.scheme.horizon / cfg.campaign.reference as f64;
    let table = IncrementTable::from_sums(&total, h)?;
    let exponents = IncrementExponents::fit(table.clone(), h, cfg.scheme.horizon).ok();
    let summary = IncrementSummary {
        outcome: Outcome {
            paths: paths.len(),
            failures: failures.len(),
            failure_tolerance: cfg.campaign.failure_tolerance,
        },
        table,
        exponents,
    };
    report::write_increments(&opts.out, &summary.table)?;
    report::write_failures(&opts.out, &failures)?;
    report::write_json(&opts.out.join("summary.json"), &summary)?;
    report::write_increment_plot(&opts.out)?;
    Ok(summary)
}

// ---- simulate ---------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub seed: u64,
    pub steps: usize,
    pub stats: TrajectoryStats,
    pub resumed_from: Option<usize>,
}

fn checkpoint_file(out: &Path, step: usize) -> PathBuf {
    out.join(format!("checkpoint-{step:08}.bin"))
}

fn latest_checkpoint(out: &Path) -> Option<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(out)
        .ok()?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("checkpoint-") && n.ends_with(".bin"))
        })
        .collect();
    files.sort();
    files.pop()
}

/// One trajectory on the reference mesh with seed `base_seed`: writes the
/// driving paths, a per-step log and trajectory checkpoints.
pub fn run_simulate(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<SimulateSummary> {
    prepare_output(cfg, opts)?;
    let n = cfg.campaign.reference;
    let seed = cfg.campaign.base_seed;
    let noise = sample_noise(cfg, n, seed)?;
    checkpoint::save_paths(opts.out.join("paths.bin"), &noise.velocity, &noise.temperature)?;
    let model = cfg.model(n)?;
    let mut solver = Solver::new(model.clone());

    let (start, stats) = match latest_checkpoint(&opts.out).filter(|_| opts.resume) {
        Some(file) => {
            let cp = checkpoint::load_trajectory(&file)?;
            if cp.config != model.scheme || cp.seed != seed || cp.steps != n {
                return Err(Error::Config(format!(
                    "--resume: {} belongs to a different run",
                    file.display()
                )));
            }
            (cp.state, cp.stats)
        }
        None => (initial_state(cfg, seed)?, TrajectoryStats::default()),
    };
    let resumed_from = (start.step > 0).then_some(start.step);
    let every = cfg.campaign.checkpoint_every.unwrap_or(n);
    let mut state = start;
    let mut stats = stats;
    while state.step < n {
        let until = ((state.step / every + 1) * every).min(n);
        let t = solver.advance(state, stats, &noise, n, until, None, |_, _| {})?;
        state = t.final_state;
        stats = t.stats;
        checkpoint::save_trajectory(
            checkpoint_file(&opts.out, state.step),
            &TrajectoryCheckpoint {
                config: model.scheme.clone(),
                seed,
                steps: n,
                state: state.clone(),
                stats: stats.clone(),
            },
        )?;
    }
    checkpoint::save_field(opts.out.join("final_u.bin"), &state.u)?;
    checkpoint::save_field(opts.out.join("final_theta.bin"), &state.theta)?;
    report::write_trajectory_log(&opts.out, &stats, cfg.scheme.horizon / n as f64)?;
    let summary = SimulateSummary {
        seed,
        steps: n,
        stats,
        resumed_from,
    };
    report::write_json(&opts.out.join("summary.json"), &summary)?;
    Ok(summary)
}
