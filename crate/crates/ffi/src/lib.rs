//! C interface to the probe-response solver.
//!
//! A solver is an opaque handle holding one validated parameter set and its
//! cached pump-only steady state. Every fallible call returns an
//! [`SgcStatus`]; on failure a description is available from
//! [`sgc_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use sgc_core::dressed::pump_coherence_analytic;
use sgc_core::floquet::{group_velocity_ratio, ProbeResponse};
use sgc_core::params::{interference_parameter, SystemParams};
use sgc_core::presets::preset;
use sgc_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Validation = 3,
    Json = 4,
    UnknownPreset = 5,
    Singular = 6,
    WrongSystemKind = 7,
    BufferTooSmall = 8,
    Internal = 99,
}

/// Opaque solver handle.
pub struct SgcSolver {
    response: ProbeResponse,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> SgcStatus {
    match err {
        Error::Validation { .. } | Error::LockViolation { .. } | Error::DimensionMismatch { .. } => SgcStatus::Validation,
        Error::Json(_) => SgcStatus::Json,
        Error::UnknownPreset(_) => SgcStatus::UnknownPreset,
        Error::Singular { .. } => SgcStatus::Singular,
        Error::WrongSystemKind { .. } => SgcStatus::WrongSystemKind,
        _ => SgcStatus::Internal,
    }
}

fn fail(status: SgcStatus, msg: impl Into<String>) -> SgcStatus {
    set_error(msg);
    status
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), SgcStatus>) -> SgcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SgcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(SgcStatus::Internal, "panic inside sgc"),
    }
}

fn core<T>(r: sgc_core::Result<T>) -> Result<T, SgcStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, SgcStatus> {
    if s.is_null() {
        return Err(fail(SgcStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(SgcStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn out_ptr<T>(p: *mut T, name: &str) -> Result<(), SgcStatus> {
    if p.is_null() {
        Err(fail(SgcStatus::NullPointer, format!("output `{name}` is null")))
    } else {
        Ok(())
    }
}

unsafe fn handle<'a>(s: *const SgcSolver) -> Result<&'a SgcSolver, SgcStatus> {
    s.as_ref().ok_or_else(|| fail(SgcStatus::NullPointer, "solver handle is null"))
}

unsafe fn install(params: SystemParams, out: *mut *mut SgcSolver) -> Result<(), SgcStatus> {
    let response = core(ProbeResponse::new(&params))?;
    *out = Box::into_raw(Box::new(SgcSolver { response }));
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sgc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Builds a solver from a JSON parameter record.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sgc_solver_new_from_json(json: *const c_char, out: *mut *mut SgcSolver) -> SgcStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let text = c_str(json)?;
        install(core(SystemParams::from_json(text))?, out)
    })
}

/// Builds a solver from a bundled preset such as `"fig2b"`.
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sgc_solver_new_from_preset(name: *const c_char, out: *mut *mut SgcSolver) -> SgcStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let name = c_str(name)?;
        install(core(preset(name))?.params, out)
    })
}

/// Releases a solver. Null is ignored.
///
/// # Safety
/// `solver` must come from one of the constructors and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sgc_solver_free(solver: *mut SgcSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Length of the state vector (15 for the four-level system, 8 for the
/// three-level one), or 0 for a null handle.
///
/// # Safety
/// `solver` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sgc_solver_dim(solver: *const SgcSolver) -> usize {
    solver.as_ref().map_or(0, |s| s.response.liouvillian().dim())
}

/// Susceptibility χ at probe detuning `delta1`.
///
/// # Safety
/// `solver` must be a live handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sgc_susceptibility(solver: *const SgcSolver, delta1: f64, re: *mut f64, im: *mut f64) -> SgcStatus {
    guard(|| {
        let s = handle(solver)?;
        out_ptr(re, "re")?;
        out_ptr(im, "im")?;
        let chi = core(s.response.chi(delta1))?;
        *re = chi.re;
        *im = chi.im;
        Ok(())
    })
}

/// Central-difference slope `d Re χ / dΔ1` with step `h`.
///
/// # Safety
/// `solver` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sgc_dispersion_slope(solver: *const SgcSolver, delta1: f64, h: f64, out: *mut f64) -> SgcStatus {
    guard(|| {
        let s = handle(solver)?;
        out_ptr(out, "out")?;
        *out = core(s.response.slope(delta1, h))?;
        Ok(())
    })
}

/// `c / vg = 1 + K·slope`.
#[no_mangle]
pub extern "C" fn sgc_group_velocity_ratio(slope: f64, k: f64) -> f64 {
    group_velocity_ratio(slope, k)
}

/// Copies the pump-only steady state into `re[0..len]`, `im[0..len]`.
/// `len` must be at least [`sgc_solver_dim`].
///
/// # Safety
/// `solver` must be a live handle; `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sgc_steady_state(solver: *const SgcSolver, re: *mut f64, im: *mut f64, len: usize) -> SgcStatus {
    guard(|| {
        let s = handle(solver)?;
        out_ptr(re, "re")?;
        out_ptr(im, "im")?;
        let r0 = s.response.r0();
        if len < r0.len() {
            return Err(fail(SgcStatus::BufferTooSmall, format!("need {} entries, got {len}", r0.len())));
        }
        let re = std::slice::from_raw_parts_mut(re, r0.len());
        let im = std::slice::from_raw_parts_mut(im, r0.len());
        for (k, z) in r0.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// Cross-damping `γ12 = √(γ1γ2)·cos θ` for the dipole angle `theta_deg`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sgc_interference_parameter(gamma1: f64, gamma2: f64, theta_deg: f64, out: *mut f64) -> SgcStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = core(interference_parameter(gamma1, gamma2, theta_deg))?;
        Ok(())
    })
}

/// Closed-form steady pump coherence `Re ρ23` under full interference.
#[no_mangle]
pub extern "C" fn sgc_pump_coherence_analytic(gamma1: f64, gamma3: f64) -> f64 {
    pump_coherence_analytic(gamma1, gamma3)
}
