//! C ABI for the sensor-collab solvers.
//!
//! All entry points return a `CollabStatus` code; outputs are written
//! through out-pointers. Scenario state lives behind an opaque handle that
//! must be released with `collab_scenario_free`. Strings returned through
//! `char **` out-pointers are owned by the caller and must be released with
//! `collab_string_free`. A per-thread message for the most recent failure
//! is available via `collab_last_error`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sensor_collab::model::{build_forms, dnorm_to_j, Scenario, ScenarioParams};
use sensor_collab::spectral::{info_bound_j0, min_distortion_d0};
use sensor_collab::strategies::{
    solve_energy_constrained, solve_info_constrained, solve_joint, SolverConfig,
};
use sensor_collab::{Error, QuadForms};

/// Status codes returned by every FFI entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Infeasible = 3,
    SolverFailure = 4,
    Serialization = 5,
    Panic = 6,
}

/// Opaque scenario handle: deployment plus precomputed quadratic forms.
pub struct CollabScenario {
    scenario: Scenario,
    forms: QuadForms,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CollabStatus {
    match e {
        Error::Infeasible(_) => CollabStatus::Infeasible,
        Error::InvalidParameter(_)
        | Error::DimensionMismatch { .. }
        | Error::NotPositiveDefinite(_)
        | Error::Domain(_) => CollabStatus::InvalidParameter,
        Error::Serialization(_) | Error::Io(_) => CollabStatus::Serialization,
        _ => CollabStatus::SolverFailure,
    }
}

fn guard<F: FnOnce() -> CollabStatus>(f: F) -> CollabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_last_error("internal panic");
            CollabStatus::Panic
        }
    }
}

fn fail(e: &Error) -> CollabStatus {
    set_last_error(&e.to_string());
    status_of(e)
}

fn out_string(s: String, out: *mut *mut c_char) -> CollabStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            CollabStatus::Ok
        }
        Err(_) => {
            set_last_error("interior NUL in output string");
            CollabStatus::Serialization
        }
    }
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn collab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a randomly deployed scenario with default statistical parameters.
#[no_mangle]
pub extern "C" fn collab_scenario_build(
    n: usize,
    seed: u64,
    out: *mut *mut CollabScenario,
) -> CollabStatus {
    guard(|| {
        if out.is_null() {
            return CollabStatus::NullPointer;
        }
        let params = ScenarioParams {
            n,
            ..Default::default()
        };
        match Scenario::build(params, seed).and_then(|s| {
            let forms = build_forms(&s)?;
            Ok(CollabScenario { scenario: s, forms })
        }) {
            Ok(h) => {
                unsafe { *out = Box::into_raw(Box::new(h)) };
                CollabStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Restores a scenario from its JSON form.
#[no_mangle]
pub extern "C" fn collab_scenario_from_json(
    json: *const c_char,
    out: *mut *mut CollabScenario,
) -> CollabStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return CollabStatus::NullPointer;
        }
        let s = match unsafe { CStr::from_ptr(json) }.to_str() {
            Ok(s) => s,
            Err(_) => {
                set_last_error("scenario JSON is not valid UTF-8");
                return CollabStatus::Serialization;
            }
        };
        match Scenario::from_json(s).and_then(|sc| {
            let forms = build_forms(&sc)?;
            Ok(CollabScenario {
                scenario: sc,
                forms,
            })
        }) {
            Ok(h) => {
                unsafe { *out = Box::into_raw(Box::new(h)) };
                CollabStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Serializes the scenario to JSON (caller frees via collab_string_free).
#[no_mangle]
pub extern "C" fn collab_scenario_to_json(
    handle: *const CollabScenario,
    out: *mut *mut c_char,
) -> CollabStatus {
    guard(|| {
        if handle.is_null() || out.is_null() {
            return CollabStatus::NullPointer;
        }
        let h = unsafe { &*handle };
        match h.scenario.to_json() {
            Ok(j) => out_string(j, out),
            Err(e) => fail(&e),
        }
    })
}

#[no_mangle]
pub extern "C" fn collab_scenario_free(handle: *mut CollabScenario) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

#[no_mangle]
pub extern "C" fn collab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Information ceiling J0 of the network.
#[no_mangle]
pub extern "C" fn collab_info_bound(
    handle: *const CollabScenario,
    out: *mut f64,
) -> CollabStatus {
    scalar_query(handle, out, |h| info_bound_j0(&h.forms))
}

/// Distortion floor D0 of the network.
#[no_mangle]
pub extern "C" fn collab_distortion_floor(
    handle: *const CollabScenario,
    out: *mut f64,
) -> CollabStatus {
    scalar_query(handle, out, |h| min_distortion_d0(&h.forms))
}

/// Converts a normalized-distortion target to an information threshold.
#[no_mangle]
pub extern "C" fn collab_dnorm_to_j(
    handle: *const CollabScenario,
    dnorm: f64,
    out: *mut f64,
) -> CollabStatus {
    scalar_query(handle, out, |h| {
        let d0 = min_distortion_d0(&h.forms)?;
        dnorm_to_j(dnorm, d0, h.forms.eta2)
    })
}

fn scalar_query<F>(handle: *const CollabScenario, out: *mut f64, f: F) -> CollabStatus
where
    F: FnOnce(&CollabScenario) -> sensor_collab::Result<f64>,
{
    guard(|| {
        if handle.is_null() || out.is_null() {
            return CollabStatus::NullPointer;
        }
        match f(unsafe { &*handle }) {
            Ok(v) => {
                unsafe { *out = v };
                CollabStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

fn solve_common<F>(
    handle: *const CollabScenario,
    report_json: *mut *mut c_char,
    f: F,
) -> CollabStatus
where
    F: FnOnce(&CollabScenario, &SolverConfig) -> sensor_collab::Result<String>,
{
    guard(|| {
        if handle.is_null() || report_json.is_null() {
            return CollabStatus::NullPointer;
        }
        let cfg = SolverConfig::default();
        match f(unsafe { &*handle }, &cfg) {
            Ok(j) => out_string(j, report_json),
            Err(e) => fail(&e),
        }
    })
}

/// Information-constrained collaboration solve; writes a report JSON.
#[no_mangle]
pub extern "C" fn collab_solve_info(
    handle: *const CollabScenario,
    j_check: f64,
    report_json: *mut *mut c_char,
) -> CollabStatus {
    solve_common(handle, report_json, |h, cfg| {
        solve_info_constrained(&h.forms, j_check, cfg)?.to_json()
    })
}

/// Energy-constrained collaboration solve; writes a report JSON.
#[no_mangle]
pub extern "C" fn collab_solve_energy(
    handle: *const CollabScenario,
    p_hat: f64,
    report_json: *mut *mut c_char,
) -> CollabStatus {
    solve_common(handle, report_json, |h, cfg| {
        solve_energy_constrained(&h.forms, p_hat, cfg)?.to_json()
    })
}

/// Joint selection-and-collaboration solve; writes a report JSON.
#[no_mangle]
pub extern "C" fn collab_solve_joint(
    handle: *const CollabScenario,
    j_check: f64,
    report_json: *mut *mut c_char,
) -> CollabStatus {
    solve_common(handle, report_json, |h, cfg| {
        solve_joint(&h.forms, j_check, cfg)?.to_json()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(n: usize, seed: u64) -> *mut CollabScenario {
        let mut h: *mut CollabScenario = ptr::null_mut();
        assert_eq!(collab_scenario_build(n, seed, &mut h), CollabStatus::Ok);
        assert!(!h.is_null());
        h
    }

    #[test]
    fn null_arguments_rejected() {
        assert_eq!(
            collab_scenario_build(2, 0, ptr::null_mut()),
            CollabStatus::NullPointer
        );
        let mut v = 0.0;
        assert_eq!(
            collab_info_bound(ptr::null(), &mut v),
            CollabStatus::NullPointer
        );
        collab_scenario_free(ptr::null_mut());
        collab_string_free(ptr::null_mut());
    }

    #[test]
    fn invalid_scenario_reports_error() {
        let mut h: *mut CollabScenario = ptr::null_mut();
        assert_eq!(
            collab_scenario_build(0, 0, &mut h),
            CollabStatus::InvalidParameter
        );
        let msg = unsafe { CStr::from_ptr(collab_last_error()) };
        assert!(!msg.to_bytes().is_empty());
    }

    #[test]
    fn scenario_json_round_trip() {
        let h = build(2, 7);
        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(collab_scenario_to_json(h, &mut json), CollabStatus::Ok);
        let s = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
        let mut h2: *mut CollabScenario = ptr::null_mut();
        let c = CString::new(s).unwrap();
        assert_eq!(
            collab_scenario_from_json(c.as_ptr(), &mut h2),
            CollabStatus::Ok
        );
        collab_string_free(json);
        collab_scenario_free(h);
        collab_scenario_free(h2);
    }

    #[test]
    fn info_solve_round_trip() {
        let h = build(2, 3);
        let mut j0 = 0.0;
        assert_eq!(collab_info_bound(h, &mut j0), CollabStatus::Ok);
        assert!(j0 > 0.0);

        let mut report: *mut c_char = ptr::null_mut();
        assert_eq!(
            collab_solve_info(h, 0.5 * j0, &mut report),
            CollabStatus::Ok
        );
        let body = unsafe { CStr::from_ptr(report) }.to_str().unwrap();
        let parsed: serde_json::Value = serde_json::from_str(body).unwrap();
        assert!(parsed["metrics"]["j"].as_f64().unwrap() >= 0.5 * j0 - 1e-6);
        collab_string_free(report);

        // Above the ceiling: infeasible status, message populated.
        let mut report: *mut c_char = ptr::null_mut();
        assert_eq!(
            collab_solve_info(h, 2.0 * j0, &mut report),
            CollabStatus::Infeasible
        );
        collab_scenario_free(h);
    }

    #[test]
    fn energy_and_joint_solves() {
        let h = build(2, 11);
        let mut report: *mut c_char = ptr::null_mut();
        assert_eq!(collab_solve_energy(h, 1.0, &mut report), CollabStatus::Ok);
        let parsed: serde_json::Value =
            serde_json::from_str(unsafe { CStr::from_ptr(report) }.to_str().unwrap()).unwrap();
        assert!(parsed["metrics"]["p"].as_f64().unwrap() <= 1.0 + 1e-6);
        collab_string_free(report);

        let mut j = 0.0;
        assert_eq!(collab_dnorm_to_j(h, 0.4, &mut j), CollabStatus::Ok);
        let mut report: *mut c_char = ptr::null_mut();
        assert_eq!(collab_solve_joint(h, j, &mut report), CollabStatus::Ok);
        collab_string_free(report);
        collab_scenario_free(h);
    }
}
