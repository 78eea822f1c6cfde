//! C ABI for `akdq`.
//!
//! Charts are opaque handles. Every query returns a status code and, when the
//! query ran, a JSON report owned by the caller and released with
//! [`akdq_string_free`]. The message behind the most recent non-OK status on
//! the calling thread is available from [`akdq_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use akdq::cli::{evaluate, GeometrySpec, Query, Report};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AkdqStatus {
    Ok = 0,
    /// The query ran and some identity check failed, or the chart is not
    /// almost-Kähler.
    CheckFailed = 1,
    /// Malformed JSON, expressions, shapes or jet orders.
    InputError = 2,
    /// An internal consistency check tripped.
    Internal = 3,
    NullPointer = 4,
    Panic = 5,
}

impl AkdqStatus {
    fn from_exit_code(code: i32) -> Self {
        match code {
            0 => AkdqStatus::Ok,
            1 => AkdqStatus::CheckFailed,
            2 => AkdqStatus::InputError,
            _ => AkdqStatus::Internal,
        }
    }
}

/// A parsed chart description.
pub struct AkdqChart {
    spec: GeometrySpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(body: impl FnOnce() -> AkdqStatus) -> AkdqStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {what}"));
            AkdqStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, AkdqStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(AkdqStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        AkdqStatus::InputError
    })
}

unsafe fn emit_chart(spec: GeometrySpec, out: *mut *mut AkdqChart) -> AkdqStatus {
    *out = Box::into_raw(Box::new(AkdqChart { spec }));
    AkdqStatus::Ok
}

/// Parse a chart from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn akdq_chart_from_json(json: *const c_char, out: *mut *mut AkdqChart) -> AkdqStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return AkdqStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match GeometrySpec::from_json(text) {
            Ok(spec) => emit_chart(spec, out),
            Err(e) => {
                set_error(e.to_string());
                AkdqStatus::from_exit_code(e.exit_code())
            }
        }
    })
}

/// Load one of the bundled charts: `flat2d`, `flat_c2`, `kahler2d` or
/// `nonintegrable4d`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn akdq_chart_bundled(name: *const c_char, out: *mut *mut AkdqChart) -> AkdqStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return AkdqStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let name = match read_str(name) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match GeometrySpec::bundled(name) {
            Some(spec) => emit_chart(spec, out),
            None => {
                set_error(format!("no bundled chart named {name}"));
                AkdqStatus::InputError
            }
        }
    })
}

/// # Safety
/// `chart` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn akdq_chart_free(chart: *mut AkdqChart) {
    if !chart.is_null() {
        drop(Box::from_raw(chart));
    }
}

/// # Safety
/// `chart` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn akdq_chart_dimension(chart: *const AkdqChart, out: *mut u32) -> AkdqStatus {
    guard(|| {
        if chart.is_null() || out.is_null() {
            set_error("null argument");
            return AkdqStatus::NullPointer;
        }
        *out = (*chart).spec.dimension as u32;
        AkdqStatus::Ok
    })
}

unsafe fn run(chart: *const AkdqChart, query: Query, jet_order: u32, report: *mut *mut c_char) -> AkdqStatus {
    if chart.is_null() || report.is_null() {
        set_error("null argument");
        return AkdqStatus::NullPointer;
    }
    *report = ptr::null_mut();
    let order = (jet_order > 0).then_some(jet_order);
    let result: Report = evaluate(&(*chart).spec, &query, order);
    if let Some(e) = &result.error {
        set_error(e.message.clone());
    } else if !result.passed {
        set_error("an identity check failed");
    }
    match CString::new(result.to_json()) {
        Ok(json) => *report = json.into_raw(),
        Err(_) => {
            set_error("report contains a NUL byte");
            return AkdqStatus::Internal;
        }
    }
    AkdqStatus::from_exit_code(result.exit_code())
}

/// Validate the chart and verify its derived tensors. `jet_order` 0 keeps the
/// chart's own order.
///
/// # Safety
/// `chart` must be a live handle and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn akdq_check(chart: *const AkdqChart, jet_order: u32, report: *mut *mut c_char) -> AkdqStatus {
    guard(|| run(chart, Query::Check, jet_order, report))
}

/// Christoffel symbols, torsion, Nijenhuis tensor, curvature, γ and μ.
///
/// # Safety
/// `chart` must be a live handle and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn akdq_connection(
    chart: *const AkdqChart,
    jet_order: u32,
    report: *mut *mut c_char,
) -> AkdqStatus {
    guard(|| run(chart, Query::Connection, jet_order, report))
}

/// `C_r(f, g)` at the base point for `r <= order`; `f` and `g` are polynomial
/// expressions in `x1..xn`.
///
/// # Safety
/// `chart` must be a live handle, `f` and `g` NUL-terminated strings and
/// `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn akdq_star(
    chart: *const AkdqChart,
    f: *const c_char,
    g: *const c_char,
    order: u32,
    normalized: bool,
    jet_order: u32,
    report: *mut *mut c_char,
) -> AkdqStatus {
    guard(|| {
        let (f, g) = match (read_str(f), read_str(g)) {
            (Ok(f), Ok(g)) => (f.to_string(), g.to_string()),
            (Err(status), _) | (_, Err(status)) => return status,
        };
        let query = Query::Star { order, f, g, normalized };
        run(chart, query, jet_order, report)
    })
}

/// κ by every route and the class witness.
///
/// # Safety
/// `chart` must be a live handle and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn akdq_class(chart: *const AkdqChart, jet_order: u32, report: *mut *mut c_char) -> AkdqStatus {
    guard(|| run(chart, Query::Class, jet_order, report))
}

/// Message for the last non-OK status on this thread, or null. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn akdq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// # Safety
/// `s` must be a string returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn akdq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn akdq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes_follow_the_cli_exit_codes() {
        assert_eq!(AkdqStatus::from_exit_code(0), AkdqStatus::Ok);
        assert_eq!(AkdqStatus::from_exit_code(1), AkdqStatus::CheckFailed);
        assert_eq!(AkdqStatus::from_exit_code(2), AkdqStatus::InputError);
        assert_eq!(AkdqStatus::from_exit_code(3), AkdqStatus::Internal);
    }

    #[test]
    fn panics_become_a_status() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, AkdqStatus::Panic);
        let msg = unsafe { CStr::from_ptr(akdq_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "panic: boom");
    }
}
