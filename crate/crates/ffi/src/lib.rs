//! C interface to the ellipsis engine.
//!
//! Problems are parsed into opaque handles and run to JSON reports. Every
//! call returns an [`EllStatus`]; on failure, [`ell_last_error`] describes
//! what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ellipsis_core::report::{run, CorpusReport, RunOptions, Status};
use ellipsis_core::syntax::{parse_problem, ProblemFile};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EllStatus {
    Ok = 0,
    /// The readings differ from the problem's expectations.
    Mismatch = 1,
    EngineError = 2,
    ParseError = 3,
    InvalidArgument = 4,
}

/// Linking setting of the problem file itself.
pub const ELL_LINKING_DEFAULT: c_int = -1;
pub const ELL_LINKING_OFF: c_int = 0;
pub const ELL_LINKING_ON: c_int = 1;

/// A parsed problem file.
pub struct EllProblem {
    file: ProblemFile,
    path: String,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guarded(f: impl FnOnce() -> EllStatus) -> EllStatus {
    clear_error();
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic");
        EllStatus::EngineError
    })
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, EllStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(EllStatus::InvalidArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        EllStatus::InvalidArgument
    })
}

fn status_of(s: Status) -> EllStatus {
    match s {
        Status::Pass | Status::Unchecked | Status::Exploratory => EllStatus::Ok,
        Status::Mismatch => EllStatus::Mismatch,
        Status::EngineError => EllStatus::EngineError,
        Status::ParseError => EllStatus::ParseError,
    }
}

/// Parses problem text. `name` labels the problem in reports and may be null.
/// On success `*out` owns a handle to release with [`ell_problem_free`].
///
/// # Safety
/// `text` and `name` must be null or NUL-terminated strings; `out` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ell_problem_parse(
    text: *const c_char,
    name: *const c_char,
    out: *mut *mut EllProblem,
) -> EllStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out is null");
            return EllStatus::InvalidArgument;
        }
        *out = ptr::null_mut();
        let text = match str_arg(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let path = if name.is_null() {
            "problem".to_string()
        } else {
            match str_arg(name, "name") {
                Ok(n) => n.to_string(),
                Err(s) => return s,
            }
        };
        match parse_problem(text, &path) {
            Ok(file) => {
                *out = Box::into_raw(Box::new(EllProblem { file, path }));
                EllStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                EllStatus::ParseError
            }
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `problem` must be null or come from [`ell_problem_parse`], and not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ell_problem_free(problem: *mut EllProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Resolves the problem and writes its JSON report to `*json_out`, which the
/// caller releases with [`ell_string_free`]. The report is written for every
/// status except `INVALID_ARGUMENT`. `linking` is one of the
/// `ELL_LINKING_*` constants.
///
/// # Safety
/// `problem` must be a live handle; `json_out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ell_problem_run(
    problem: *const EllProblem,
    linking: c_int,
    json_out: *mut *mut c_char,
) -> EllStatus {
    guarded(|| {
        if problem.is_null() || json_out.is_null() {
            set_error("null argument");
            return EllStatus::InvalidArgument;
        }
        *json_out = ptr::null_mut();
        let linking = match linking {
            ELL_LINKING_DEFAULT => None,
            ELL_LINKING_OFF => Some(false),
            ELL_LINKING_ON => Some(true),
            other => {
                set_error(format!("bad linking setting {other}"));
                return EllStatus::InvalidArgument;
            }
        };
        let p = &*problem;
        let opts = RunOptions {
            linking,
            ..RunOptions::default()
        };
        let report = run(&p.file, &p.path, &opts);
        if let Some(e) = &report.error {
            set_error(e.clone());
        }
        let status = status_of(report.status);
        let json = CorpusReport::new(vec![report]).to_json();
        *json_out = CString::new(json).expect("JSON has no NUL").into_raw();
        status
    })
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn ell_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ell_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn ell_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
