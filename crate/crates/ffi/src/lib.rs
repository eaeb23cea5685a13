//! C ABI over the `bvsweep` run pipeline.
//!
//! Two opaque handles cross the boundary: [`BvConfig`] (what to run) and
//! [`BvRun`] (a finished sweep). Every function returns a [`BvStatus`]; the
//! message of the last failure on the calling thread is available from
//! [`bv_last_error`]. Strings handed out by the library are released with
//! [`bv_string_free`], handles with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use bvsweep::run::{self, config, RunConfig, RunOutcome};
use bvsweep::Error;

/// Status codes. Values 0 to 6 coincide with the exit codes of the
/// `bvsweep` command line tool.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvStatus {
    Ok = 0,
    /// The sweep finished but a gating check failed; the run handle is valid.
    CheckFailed = 1,
    BadConfig = 2,
    SolverStall = 3,
    /// The sweep finished without Cauchy convergence; the run handle is valid.
    NotConverged = 4,
    Io = 5,
    Numerical = 6,
    NullPointer = 7,
    InvalidUtf8 = 8,
    OutOfRange = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

impl BvStatus {
    fn from_exit(code: i32) -> Self {
        match code {
            run::EXIT_OK => BvStatus::Ok,
            run::EXIT_CHECK_FAILED => BvStatus::CheckFailed,
            run::EXIT_BAD_CONFIG => BvStatus::BadConfig,
            run::EXIT_SOLVER_STALL => BvStatus::SolverStall,
            run::EXIT_NOT_CONVERGED => BvStatus::NotConverged,
            run::EXIT_IO => BvStatus::Io,
            _ => BvStatus::Numerical,
        }
    }
}

/// Opaque run configuration.
pub struct BvConfig(RunConfig);

/// Opaque result of a finished sweep.
pub struct BvRun(RunOutcome);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    // Interior NULs cannot cross as C strings.
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: BvStatus, msg: impl Into<String>) -> BvStatus {
    set_error(msg);
    status
}

fn fail_with(e: &Error) -> BvStatus {
    fail(BvStatus::from_exit(run::exit_code(e)), e.to_string())
}

/// Runs `f`, turning a panic into [`BvStatus::Panic`].
fn guard(f: impl FnOnce() -> BvStatus) -> BvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(BvStatus::Panic, msg)
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, BvStatus> {
    if p.is_null() {
        return Err(fail(BvStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(BvStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

macro_rules! handle {
    ($p:expr, $what:literal) => {
        match $p.as_ref() {
            Some(h) => h,
            None => return fail(BvStatus::NullPointer, concat!($what, " is null")),
        }
    };
}

macro_rules! handle_mut {
    ($p:expr, $what:literal) => {
        match $p.as_mut() {
            Some(h) => h,
            None => return fail(BvStatus::NullPointer, concat!($what, " is null")),
        }
    };
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Configuration for a built-in scenario with its default ladder and mesh.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bv_config_scenario(
    name: *const c_char,
    out: *mut *mut BvConfig,
) -> BvStatus {
    guard(|| {
        let out = handle_mut!(out, "out");
        *out = ptr::null_mut();
        let name = match str_arg(name, "name") {
            Ok(n) => n,
            Err(s) => return s,
        };
        let cfg = RunConfig::for_scenario(name);
        if let Err(e) = cfg.problem() {
            return fail_with(&e);
        }
        *out = Box::into_raw(Box::new(BvConfig(cfg)));
        BvStatus::Ok
    })
}

/// Parses configuration text (grammar in `docs/config.ebnf`).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bv_config_parse(text: *const c_char, out: *mut *mut BvConfig) -> BvStatus {
    guard(|| {
        let out = handle_mut!(out, "out");
        *out = ptr::null_mut();
        let text = match str_arg(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match config::parse(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(BvConfig(cfg)));
                BvStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Replaces the viscosity ladder. Validated when the run starts.
///
/// # Safety
/// `cfg` must be a live handle and `eps` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bv_config_set_eps(
    cfg: *mut BvConfig,
    eps: *const f64,
    len: usize,
) -> BvStatus {
    guard(|| {
        let cfg = handle_mut!(cfg, "config");
        if eps.is_null() || len == 0 {
            return fail(BvStatus::NullPointer, "empty viscosity ladder");
        }
        cfg.0.set_eps(std::slice::from_raw_parts(eps, len).to_vec());
        BvStatus::Ok
    })
}

/// Uses a uniform partition with `steps` steps at every viscosity.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bv_config_set_steps(cfg: *mut BvConfig, steps: usize) -> BvStatus {
    guard(|| {
        let cfg = handle_mut!(cfg, "config");
        if steps == 0 {
            return fail(BvStatus::OutOfRange, "steps must be positive");
        }
        cfg.0.set_steps(steps);
        BvStatus::Ok
    })
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bv_config_set_seed(cfg: *mut BvConfig, seed: u64) -> BvStatus {
    guard(|| {
        handle_mut!(cfg, "config").0.seed = seed;
        BvStatus::Ok
    })
}

/// Directory that receives the CSV and JSON artifacts.
///
/// # Safety
/// `cfg` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bv_config_set_out(cfg: *mut BvConfig, dir: *const c_char) -> BvStatus {
    guard(|| {
        let cfg = handle_mut!(cfg, "config");
        match str_arg(dir, "dir") {
            Ok(d) => {
                cfg.0.out = PathBuf::from(d);
                BvStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// # Safety
/// `cfg` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bv_config_free(cfg: *mut BvConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Solves, sweeps and certifies, writing artifacts to the configured
/// directory. On `Ok`, `CheckFailed` and `NotConverged` `*out` receives a run
/// handle; on any other status it is null.
///
/// # Safety
/// `cfg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bv_run(cfg: *const BvConfig, out: *mut *mut BvRun) -> BvStatus {
    guard(|| {
        let out = handle_mut!(out, "out");
        *out = ptr::null_mut();
        let cfg = handle!(cfg, "config");
        match run::run(&cfg.0) {
            Ok(outcome) => {
                let status = BvStatus::from_exit(outcome.exit_code());
                if let Some(e) = &outcome.error {
                    set_error(e.message.clone());
                } else if status == BvStatus::CheckFailed {
                    let ids: Vec<&str> = outcome
                        .report
                        .failures()
                        .iter()
                        .map(|e| e.id.as_str())
                        .collect();
                    set_error(format!("failed checks: {}", ids.join(", ")));
                }
                *out = Box::into_raw(Box::new(BvRun(outcome)));
                status
            }
            Err(e) => {
                run::record_error(&cfg.0.out, &e);
                fail_with(&e)
            }
        }
    })
}

/// State dimension of the solved problem.
///
/// # Safety
/// `run` must be a live handle and `dim` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bv_run_dim(run: *const BvRun, dim: *mut usize) -> BvStatus {
    guard(|| {
        let run = handle!(run, "run");
        *handle_mut!(dim, "dim") = run.0.report.dim;
        BvStatus::Ok
    })
}

/// Number of viscosity levels; the last one is the limit candidate.
///
/// # Safety
/// `run` must be a live handle and `levels` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bv_run_levels(run: *const BvRun, levels: *mut usize) -> BvStatus {
    guard(|| {
        let run = handle!(run, "run");
        *handle_mut!(levels, "levels") = run.0.report.levels.len();
        BvStatus::Ok
    })
}

/// Viscosity of level `level`.
///
/// # Safety
/// `run` must be a live handle and `eps` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bv_run_eps(run: *const BvRun, level: usize, eps: *mut f64) -> BvStatus {
    guard(|| {
        let run = handle!(run, "run");
        let Some(l) = run.0.report.levels.get(level) else {
            return fail(BvStatus::OutOfRange, format!("level {level} out of range"));
        };
        *handle_mut!(eps, "eps") = l.eps;
        BvStatus::Ok
    })
}

/// Copies the final discrete state of level `level` into `buf`, which must
/// hold at least `bv_run_dim` doubles.
///
/// # Safety
/// `run` must be a live handle and `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bv_run_final_state(
    run: *const BvRun,
    level: usize,
    buf: *mut f64,
    len: usize,
) -> BvStatus {
    guard(|| {
        let run = handle!(run, "run");
        let Some(l) = run.0.report.levels.get(level) else {
            return fail(BvStatus::OutOfRange, format!("level {level} out of range"));
        };
        if buf.is_null() {
            return fail(BvStatus::NullPointer, "buf is null");
        }
        if len < l.final_state.len() {
            return fail(
                BvStatus::BufferTooSmall,
                format!("buffer holds {len}, state has {}", l.final_state.len()),
            );
        }
        std::slice::from_raw_parts_mut(buf, l.final_state.len()).copy_from_slice(&l.final_state);
        BvStatus::Ok
    })
}

/// Whether every gating check passed.
///
/// # Safety
/// `run` must be a live handle and `pass` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bv_run_pass(run: *const BvRun, pass: *mut bool) -> BvStatus {
    guard(|| {
        let run = handle!(run, "run");
        *handle_mut!(pass, "pass") = run.0.report.pass;
        BvStatus::Ok
    })
}

/// The full report as JSON; release with [`bv_string_free`].
///
/// # Safety
/// `run` must be a live handle and `json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bv_run_report_json(run: *const BvRun, json: *mut *mut c_char) -> BvStatus {
    guard(|| {
        let json = handle_mut!(json, "json");
        *json = ptr::null_mut();
        let run = handle!(run, "run");
        let text = match serde_json::to_string(&run.0.report) {
            Ok(t) => t,
            Err(e) => return fail(BvStatus::Io, e.to_string()),
        };
        match CString::new(text) {
            Ok(s) => {
                *json = s.into_raw();
                BvStatus::Ok
            }
            Err(e) => fail(BvStatus::Io, e.to_string()),
        }
    })
}

/// # Safety
/// `run` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bv_run_free(run: *mut BvRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}
