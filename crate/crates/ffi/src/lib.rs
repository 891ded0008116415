//! C interface to the planner and experiment runner.
//!
//! Objects are opaque handles created by `tdm_*_new`/`tdm_*_from_*` functions
//! and released with the matching `tdm_*_free`. Fallible calls return a
//! [`TdmStatus`]; on failure `tdm_last_error` describes the cause. Strings
//! returned through out-parameters are owned by the caller and released with
//! `tdm_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use tdm_core::harness::{run_agent, write_run, ExperimentConfig, Setup};
use tdm_core::planner::{solve, GainTable, Plan};
use tdm_core::symlang::{ground, initial_state, parse_domain, TransitionSystem};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdmStatus {
    Ok = 0,
    /// No plan beats the quality bound.
    NoPlan = 1,
    NullPointer = 2,
    InvalidUtf8 = 3,
    Parse = 4,
    Ground = 5,
    InvalidArgument = 6,
    OutOfRange = 7,
    Run = 8,
    Panic = 9,
}

/// A grounded transition system.
pub struct TdmSystem(TransitionSystem);

/// Gain values per (state, action); missing entries read as the INF value.
pub struct TdmGains(GainTable);

/// A plan returned by `tdm_solve`.
pub struct TdmPlan(Plan);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (TdmStatus, String);

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<TdmStatus, Failure>) -> TdmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside tdm".into());
            TdmStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    (TdmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (TdmStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn obj<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("interior NULs removed")
        .into_raw()
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tdm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed only once.
#[no_mangle]
pub unsafe extern "C" fn tdm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a domain description and ground it from its initial state.
///
/// # Safety
/// `domain` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdm_system_from_domain(
    domain: *const c_char,
    out: *mut *mut TdmSystem,
) -> TdmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let d =
            parse_domain(text(domain, "domain")?).map_err(|e| (TdmStatus::Parse, e.to_string()))?;
        let init = initial_state(&d).map_err(|e| (TdmStatus::Ground, e.to_string()))?;
        let ts = ground(&d, &init).map_err(|e| (TdmStatus::Ground, e.to_string()))?;
        put(out, TdmSystem(ts));
        Ok(TdmStatus::Ok)
    })
}

/// # Safety
/// `sys` must be NULL or a handle from `tdm_system_from_domain`, freed only once.
#[no_mangle]
pub unsafe extern "C" fn tdm_system_free(sys: *mut TdmSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Number of grounded states; 0 for NULL.
///
/// # Safety
/// `sys` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdm_system_state_count(sys: *const TdmSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.state_count())
}

/// Number of grounded transitions; 0 for NULL.
///
/// # Safety
/// `sys` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdm_system_transition_count(sys: *const TdmSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.transitions().len())
}

/// Comma-separated true fluents of state `index`.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdm_system_state_text(
    sys: *const TdmSystem,
    index: usize,
    out: *mut *mut c_char,
) -> TdmStatus {
    guard(|| {
        let ts = &obj(sys, "sys")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        if index >= ts.state_count() {
            return Err((
                TdmStatus::OutOfRange,
                format!("state {index} of {}", ts.state_count()),
            ));
        }
        *out = owned(ts.state(index).render_true(ts.fluents()));
        Ok(TdmStatus::Ok)
    })
}

/// Empty gain table whose missing entries read as `inf_value`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdm_gains_new(inf_value: f64, out: *mut *mut TdmGains) -> TdmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g =
            GainTable::new(inf_value).map_err(|e| (TdmStatus::InvalidArgument, e.to_string()))?;
        put(out, TdmGains(g));
        Ok(TdmStatus::Ok)
    })
}

/// # Safety
/// `gains` must be NULL or a handle from `tdm_gains_new`, freed only once.
#[no_mangle]
pub unsafe extern "C" fn tdm_gains_free(gains: *mut TdmGains) {
    if !gains.is_null() {
        drop(Box::from_raw(gains));
    }
}

/// Set the gain of `action` at state `state`; the value must be finite.
///
/// # Safety
/// `gains` must be a live handle; `action` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tdm_gains_set(
    gains: *mut TdmGains,
    state: usize,
    action: *const c_char,
    value: f64,
) -> TdmStatus {
    guard(|| {
        let g = gains.as_mut().ok_or_else(|| null("gains"))?;
        let a = text(action, "action")?;
        g.0.set(state, a, value)
            .map_err(|e| (TdmStatus::InvalidArgument, e.to_string()))?;
        Ok(TdmStatus::Ok)
    })
}

/// Best simple path of at most `max_len` steps whose quality exceeds
/// `quality_bound`. Returns `NoPlan` and leaves `out` untouched when none does.
///
/// # Safety
/// `sys` and `gains` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdm_solve(
    sys: *const TdmSystem,
    gains: *const TdmGains,
    quality_bound: f64,
    max_len: usize,
    out: *mut *mut TdmPlan,
) -> TdmStatus {
    guard(|| {
        let ts = &obj(sys, "sys")?.0;
        let g = &obj(gains, "gains")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        if max_len == 0 || quality_bound.is_nan() {
            return Err((
                TdmStatus::InvalidArgument,
                "max_len must be positive and the bound not NaN".into(),
            ));
        }
        match solve(ts, g, quality_bound, max_len) {
            Some(p) => {
                put(out, TdmPlan(p));
                Ok(TdmStatus::Ok)
            }
            None => Ok(TdmStatus::NoPlan),
        }
    })
}

/// # Safety
/// `plan` must be NULL or a handle from `tdm_solve`, freed only once.
#[no_mangle]
pub unsafe extern "C" fn tdm_plan_free(plan: *mut TdmPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Number of steps; 0 for NULL.
///
/// # Safety
/// `plan` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdm_plan_len(plan: *const TdmPlan) -> usize {
    plan.as_ref().map_or(0, |p| p.0.len())
}

/// Quality at solve time; NaN for NULL.
///
/// # Safety
/// `plan` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdm_plan_quality(plan: *const TdmPlan) -> f64 {
    plan.as_ref().map_or(f64::NAN, |p| p.0.quality)
}

/// Source state, target state and action name of step `index`. Any of the
/// out-parameters may be NULL.
///
/// # Safety
/// `plan` must be a live handle; non-NULL out-parameters must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdm_plan_step(
    plan: *const TdmPlan,
    index: usize,
    from: *mut usize,
    to: *mut usize,
    action: *mut *mut c_char,
) -> TdmStatus {
    guard(|| {
        let p = &obj(plan, "plan")?.0;
        let st = p.steps.get(index).ok_or_else(|| {
            (
                TdmStatus::OutOfRange,
                format!("step {index} of {}", p.len()),
            )
        })?;
        if !from.is_null() {
            *from = st.from;
        }
        if !to.is_null() {
            *to = st.to;
        }
        if !action.is_null() {
            *action = owned(st.action.0.clone());
        }
        Ok(TdmStatus::Ok)
    })
}

/// One line per step with its gain, then the plan quality.
///
/// # Safety
/// `plan` and `gains` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdm_plan_trace(
    plan: *const TdmPlan,
    gains: *const TdmGains,
    out: *mut *mut c_char,
) -> TdmStatus {
    guard(|| {
        let p = &obj(plan, "plan")?.0;
        let g = &obj(gains, "gains")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = owned(p.trace(g));
        Ok(TdmStatus::Ok)
    })
}

/// Run every agent of an experiment config file and write its CSV logs.
/// `out_dir` may be NULL to use the config's output directory.
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `out_dir` NULL or one.
#[no_mangle]
pub unsafe extern "C" fn tdm_run_config(
    config_path: *const c_char,
    out_dir: *const c_char,
) -> TdmStatus {
    guard(|| {
        let path = PathBuf::from(text(config_path, "config_path")?);
        let run = |e: tdm_core::harness::HarnessError| (TdmStatus::Run, e.to_string());
        let mut cfg = ExperimentConfig::from_file(&path).map_err(run)?;
        if !out_dir.is_null() {
            cfg.output_dir = PathBuf::from(text(out_dir, "out_dir")?);
        }
        let setup = Setup::new(cfg).map_err(run)?;
        for &agent in &setup.cfg.agents {
            let logs = run_agent(&setup, agent).map_err(run)?;
            write_run(&logs, &setup.cfg.output_dir).map_err(run)?;
        }
        Ok(TdmStatus::Ok)
    })
}
