//! C ABI for the `boussinesq` solver.
//!
//! Every fallible function returns a [`BsqStatus`]; on anything but
//! `BSQ_STATUS_OK` a description is available from [`bsq_last_error`]
//! on the calling thread. Handles are opaque and owned by the caller,
//! who releases them with the matching `_free` function. Panics never
//! cross the boundary; they surface as `BSQ_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use boussinesq::experiment::{
    run_converge, run_increments, run_moments, run_selftest, run_simulate, ExperimentConfig, RunOptions,
};
use boussinesq::noise::NoisePair;
use boussinesq::scheme::{SchemeState, Solver, TrajectoryStats};
use boussinesq::spectral::{norm_sq, to_physical, vector_to_physical};
use boussinesq::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Config = 4,
    Io = 5,
    /// The implicit step did not converge.
    Diverged = 6,
    /// A campaign finished but more paths failed than tolerated.
    ToleranceExceeded = 7,
    /// Any other library error.
    Failed = 8,
    Panic = 9,
}

/// Experiment kinds for [`bsq_run_campaign`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsqCampaign {
    Simulate = 0,
    Converge = 1,
    Moments = 2,
    Increments = 3,
}

/// A parsed and validated experiment configuration.
pub struct BsqConfig {
    inner: ExperimentConfig,
}

/// One trajectory on the reference mesh, advanced on demand.
pub struct BsqSimulation {
    solver: Solver,
    noise: NoisePair,
    state: SchemeState,
    stats: TrajectoryStats,
    steps: usize,
    horizon: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: BsqStatus, message: impl AsRef<str>) -> BsqStatus {
    set_last_error(message.as_ref());
    status
}

fn from_error(e: Error) -> BsqStatus {
    let status = match &e {
        Error::Config(_) => BsqStatus::Config,
        Error::Io(_) => BsqStatus::Io,
        Error::PicardDiverged { .. } => BsqStatus::Diverged,
        Error::InvalidArgument(_) | Error::InvalidGrid(_) | Error::ShapeMismatch { .. } => BsqStatus::InvalidArgument,
        _ => BsqStatus::Failed,
    };
    fail(status, e.to_string())
}

/// Runs `body`, turning panics into `BSQ_STATUS_PANIC`.
fn guard(body: impl FnOnce() -> BsqStatus) -> BsqStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == BsqStatus::Ok {
                set_last_error("");
            }
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(BsqStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, BsqStatus> {
    if s.is_null() {
        return Err(fail(BsqStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(BsqStatus::InvalidUtf8, "string argument is not valid UTF-8"))
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(BsqStatus::NullPointer, concat!("argument '", stringify!($p), "' is null"));
        })+
    };
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return from_error(e),
        }
    };
}

/// Message for the last failing call on this thread, or an empty
/// string. Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn bsq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bsq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a TOML experiment document.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bsq_config_parse(toml: *const c_char, out: *mut *mut BsqConfig) -> BsqStatus {
    guard(|| {
        non_null!(out);
        *out = ptr::null_mut();
        let text = match read_str(toml) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let inner = attempt!(ExperimentConfig::parse(text));
        *out = Box::into_raw(Box::new(BsqConfig { inner }));
        BsqStatus::Ok
    })
}

/// Loads a TOML experiment file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bsq_config_load(path: *const c_char, out: *mut *mut BsqConfig) -> BsqStatus {
    guard(|| {
        non_null!(out);
        *out = ptr::null_mut();
        let path = match read_str(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let inner = attempt!(ExperimentConfig::load(path));
        *out = Box::into_raw(Box::new(BsqConfig { inner }));
        BsqStatus::Ok
    })
}

/// Grid points per dimension `K` and the reference step count.
///
/// # Safety
/// All pointers must be valid; `config` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn bsq_config_shape(
    config: *const BsqConfig,
    modes: *mut usize,
    reference_steps: *mut usize,
) -> BsqStatus {
    guard(|| {
        non_null!(config, modes, reference_steps);
        let c = &(*config).inner;
        *modes = c.scheme.modes;
        *reference_steps = c.campaign.reference;
        BsqStatus::Ok
    })
}

/// Releases a configuration. Null is ignored.
///
/// # Safety
/// `config` must be null or come from `bsq_config_parse`/`bsq_config_load`
/// and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bsq_config_free(config: *mut BsqConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Starts a trajectory on the reference mesh driven by path `seed`.
///
/// # Safety
/// `config` must be a live configuration and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bsq_simulation_new(
    config: *const BsqConfig,
    seed: u64,
    out: *mut *mut BsqSimulation,
) -> BsqStatus {
    guard(|| {
        non_null!(config, out);
        *out = ptr::null_mut();
        let c = &(*config).inner;
        let steps = c.campaign.reference;
        let noise = attempt!(NoisePair::sample(
            &c.velocity_noise.covariance,
            &c.temperature_noise.covariance,
            steps,
            c.scheme.horizon,
            seed,
        ));
        let grid = attempt!(c.grid());
        let state = attempt!(c.initial.state(grid, seed));
        let model = attempt!(c.model(steps));
        *out = Box::into_raw(Box::new(BsqSimulation {
            solver: Solver::new(model),
            noise,
            state,
            stats: TrajectoryStats::default(),
            steps,
            horizon: c.scheme.horizon,
        }));
        BsqStatus::Ok
    })
}

/// Advances by `count` steps. Fails without moving if that would pass
/// the horizon; on a Picard failure the state stays at the last
/// converged step.
///
/// # Safety
/// `sim` must be a live simulation.
#[no_mangle]
pub unsafe extern "C" fn bsq_simulation_advance(sim: *mut BsqSimulation, count: usize) -> BsqStatus {
    guard(|| {
        non_null!(sim);
        let s = &mut *sim;
        let until = match s.state.step.checked_add(count).filter(|&u| u <= s.steps) {
            Some(u) => u,
            None => {
                return fail(
                    BsqStatus::InvalidArgument,
                    format!("cannot advance {count} steps from step {} of {}", s.state.step, s.steps),
                )
            }
        };
        if count == 0 {
            return BsqStatus::Ok;
        }
        let t = attempt!(s.solver.advance(
            s.state.clone(),
            s.stats.clone(),
            &s.noise,
            s.steps,
            until,
            None,
            |_, _| {}
        ));
        s.state = t.final_state;
        s.stats = t.stats;
        BsqStatus::Ok
    })
}

/// Current step, total steps and time `t = step * T / steps`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bsq_simulation_progress(
    sim: *const BsqSimulation,
    step: *mut usize,
    total: *mut usize,
    time: *mut f64,
) -> BsqStatus {
    guard(|| {
        non_null!(sim, step, total, time);
        let s = &*sim;
        *step = s.state.step;
        *total = s.steps;
        *time = s.horizon * s.state.step as f64 / s.steps as f64;
        BsqStatus::Ok
    })
}

/// `||u||^2` and `||theta||^2` in L^2 of the current state.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bsq_simulation_energy(
    sim: *const BsqSimulation,
    velocity: *mut f64,
    temperature: *mut f64,
) -> BsqStatus {
    guard(|| {
        non_null!(sim, velocity, temperature);
        let s = &*sim;
        *velocity = norm_sq(&s.state.u);
        *temperature = norm_sq(&s.state.theta);
        BsqStatus::Ok
    })
}

/// Grid values of the two velocity components, row-major `K x K` each;
/// `len` is the capacity of each buffer and must be at least `K^2`.
///
/// # Safety
/// `first` and `second` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bsq_simulation_velocity(
    sim: *const BsqSimulation,
    first: *mut f64,
    second: *mut f64,
    len: usize,
) -> BsqStatus {
    guard(|| {
        non_null!(sim, first, second);
        let s = &*sim;
        let [a, b] = attempt!(vector_to_physical(&s.state.u));
        if len < a.len() {
            return fail(
                BsqStatus::InvalidArgument,
                format!("buffer holds {len} values, need {}", a.len()),
            );
        }
        ptr::copy_nonoverlapping(a.as_ptr(), first, a.len());
        ptr::copy_nonoverlapping(b.as_ptr(), second, b.len());
        BsqStatus::Ok
    })
}

/// Grid values of the temperature, row-major `K x K`.
///
/// # Safety
/// `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bsq_simulation_temperature(sim: *const BsqSimulation, out: *mut f64, len: usize) -> BsqStatus {
    guard(|| {
        non_null!(sim, out);
        let s = &*sim;
        let v = attempt!(to_physical(&s.state.theta));
        if len < v.len() {
            return fail(
                BsqStatus::InvalidArgument,
                format!("buffer holds {len} values, need {}", v.len()),
            );
        }
        ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
        BsqStatus::Ok
    })
}

/// Releases a simulation. Null is ignored.
///
/// # Safety
/// `sim` must be null or a live simulation.
#[no_mangle]
pub unsafe extern "C" fn bsq_simulation_free(sim: *mut BsqSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Runs a whole experiment, writing its tables under `out_dir`.
/// `workers` is the number of threads; 0 is treated as 1.
///
/// # Safety
/// `config` must be live and `out_dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bsq_run_campaign(
    config: *const BsqConfig,
    kind: BsqCampaign,
    out_dir: *const c_char,
    workers: usize,
    resume: bool,
) -> BsqStatus {
    guard(|| {
        non_null!(config);
        let out = match read_str(out_dir) {
            Ok(o) => PathBuf::from(o),
            Err(s) => return s,
        };
        let cfg = &(*config).inner;
        let mut opts = RunOptions::new(out);
        opts.workers = workers;
        opts.resume = resume;
        let outcome = match kind {
            BsqCampaign::Simulate => {
                attempt!(run_simulate(cfg, &opts));
                None
            }
            BsqCampaign::Converge => Some(attempt!(run_converge(cfg, &opts)).outcome),
            BsqCampaign::Moments => Some(attempt!(run_moments(cfg, &opts)).outcome),
            BsqCampaign::Increments => Some(attempt!(run_increments(cfg, &opts)).outcome),
        };
        match outcome {
            Some(o) if o.exceeded() => fail(
                BsqStatus::ToleranceExceeded,
                format!("{} of {} paths failed", o.failures, o.paths),
            ),
            _ => BsqStatus::Ok,
        }
    })
}

/// Runs the identity suite on a `grid x grid` mesh with `samples`
/// random fields and stores whether every check passed.
///
/// # Safety
/// `passed` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bsq_selftest(grid: usize, samples: usize, passed: *mut bool) -> BsqStatus {
    guard(|| {
        non_null!(passed);
        let r = attempt!(run_selftest(grid, samples));
        *passed = r.passed();
        BsqStatus::Ok
    })
}
