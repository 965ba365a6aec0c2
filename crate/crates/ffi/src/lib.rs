//! C ABI over the ustpa core: opaque model handles, status codes, and
//! UTF-8 string exchange.
//!
//! Conventions:
//! - Every function is panic-safe; a caught panic reports
//!   [`UstpaStatus::Internal`].
//! - Functions that can fail return a [`UstpaStatus`]; the most recent
//!   failure message for the calling thread is available via
//!   [`ustpa_last_error`].
//! - Strings returned through out-parameters are NUL-terminated UTF-8
//!   owned by the caller and must be released with [`ustpa_string_free`].
//!   The pointer returned by [`ustpa_version`] is static and must not be
//!   freed.
//! - A parsed model is an opaque `UstpaModel*`, released with
//!   [`ustpa_model_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ustpa::guard::{format_decision_log, parse_policy, parse_trace, simulate_trace, GuardPolicy};
use ustpa::report::{build_bundle, export_graph, export_structured, render_tables};
use ustpa::{build_model, parse_document, SafetyModel};

/// Status codes returned by the fallible entry points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UstpaStatus {
    /// The call succeeded.
    Ok = 0,
    /// The input text could not be parsed; see `ustpa_last_error`.
    ParseError = 1,
    /// The parsed input violated a model invariant; see `ustpa_last_error`.
    ValidationError = 2,
    /// A pointer argument was NULL or text was not valid UTF-8.
    InvalidArgument = 3,
    /// An internal panic was caught; see `ustpa_last_error`.
    Internal = 4,
}

/// Opaque handle to a validated safety model.
pub struct UstpaModel {
    inner: SafetyModel,
}

/// Element counts of a model, filled by `ustpa_model_counts`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UstpaCounts {
    pub losses: usize,
    pub hazards: usize,
    pub nodes: usize,
    pub edges: usize,
    pub actions: usize,
    pub ucas: usize,
    pub scenarios: usize,
    pub requirements: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(sanitized).expect("NULs were stripped"));
    });
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
}

/// The most recent error message on this thread, or NULL if the last call
/// succeeded. The pointer stays valid until the next failing ustpa call on
/// the same thread; do not free it.
#[no_mangle]
pub extern "C" fn ustpa_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow().as_ref().map(|s| s.as_ptr()).unwrap_or(ptr::null())
    })
}

/// The crate version as a static NUL-terminated string. Never freed.
#[no_mangle]
pub extern "C" fn ustpa_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Guards an FFI body against panics, translating them to `Internal`.
fn guarded(body: impl FnOnce() -> UstpaStatus) -> UstpaStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| (*s).to_owned())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unidentified panic".to_owned());
            set_last_error(format!("internal error: {message}"));
            UstpaStatus::Internal
        }
    }
}

/// Reads a required UTF-8 argument, reporting `InvalidArgument` on NULL or
/// bad encoding.
unsafe fn read_utf8<'a>(text: *const c_char, what: &str) -> Result<&'a str, UstpaStatus> {
    if text.is_null() {
        set_last_error(format!("{what} must not be NULL"));
        return Err(UstpaStatus::InvalidArgument);
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_last_error(format!("{what} is not valid UTF-8"));
        UstpaStatus::InvalidArgument
    })
}

/// Hands a Rust string to the caller as an owned C string.
fn give_string(out: *mut *mut c_char, text: String) -> UstpaStatus {
    let sanitized = text.replace('\0', " ");
    let cstring = CString::new(sanitized).expect("NULs were stripped");
    unsafe { *out = cstring.into_raw() };
    clear_last_error();
    UstpaStatus::Ok
}

/// Parses and validates DSL text into a model handle.
///
/// On success writes the handle to `out_model` and returns `Ok`; the
/// handle must be released with `ustpa_model_free`. On failure the handle
/// is untouched and `ustpa_last_error` describes the first problem.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out_model` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn ustpa_model_parse(
    text: *const c_char,
    out_model: *mut *mut UstpaModel,
) -> UstpaStatus {
    guarded(|| {
        if out_model.is_null() {
            set_last_error("out_model must not be NULL".to_owned());
            return UstpaStatus::InvalidArgument;
        }
        let source = match read_utf8(text, "text") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let document = parse_document(source);
        if document.has_errors() {
            let summary = document
                .diagnostics
                .iter()
                .map(|d| format!("{}: {}: {}", d.span, d.severity, d.message))
                .collect::<Vec<_>>()
                .join("\n");
            set_last_error(summary);
            return UstpaStatus::ParseError;
        }
        match build_model(document.declarations) {
            Ok(model) => {
                *out_model = Box::into_raw(Box::new(UstpaModel { inner: model }));
                clear_last_error();
                UstpaStatus::Ok
            }
            Err(failure) => {
                set_last_error(failure.to_string());
                UstpaStatus::ValidationError
            }
        }
    })
}

/// Releases a model handle. NULL is a no-op.
///
/// # Safety
/// `model` must be NULL or a pointer from `ustpa_model_parse` not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn ustpa_model_free(model: *mut UstpaModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Releases a string returned by any ustpa function. NULL is a no-op.
///
/// # Safety
/// `text` must be NULL or an owned string pointer from this library not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn ustpa_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

unsafe fn borrow_model<'a>(model: *const UstpaModel) -> Result<&'a SafetyModel, UstpaStatus> {
    match model.as_ref() {
        Some(handle) => Ok(&handle.inner),
        None => {
            set_last_error("model must not be NULL".to_owned());
            Err(UstpaStatus::InvalidArgument)
        }
    }
}

/// Fills `out_counts` with the model's element counts.
///
/// # Safety
/// `model` must be a live handle and `out_counts` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ustpa_model_counts(
    model: *const UstpaModel,
    out_counts: *mut UstpaCounts,
) -> UstpaStatus {
    guarded(|| {
        let inner = match borrow_model(model) {
            Ok(m) => m,
            Err(status) => return status,
        };
        if out_counts.is_null() {
            set_last_error("out_counts must not be NULL".to_owned());
            return UstpaStatus::InvalidArgument;
        }
        *out_counts = UstpaCounts {
            losses: inner.losses().len(),
            hazards: inner.hazards().len(),
            nodes: inner.nodes().len(),
            edges: inner.edges().len(),
            actions: inner.actions().len(),
            ucas: inner.ucas().len(),
            scenarios: inner.scenarios().len(),
            requirements: inner.requirements().len(),
        };
        clear_last_error();
        UstpaStatus::Ok
    })
}

/// Renders the model back to canonical DSL text.
///
/// # Safety
/// `model` must be a live handle and `out_text` a valid pointer; the
/// result is released with `ustpa_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ustpa_model_render(
    model: *const UstpaModel,
    out_text: *mut *mut c_char,
) -> UstpaStatus {
    model_string(model, out_text, |m| ustpa::dsl::render_canonical(m))
}

/// Exports the full analysis report as deterministic JSON.
///
/// # Safety
/// Same contract as `ustpa_model_render`.
#[no_mangle]
pub unsafe extern "C" fn ustpa_model_report_json(
    model: *const UstpaModel,
    out_text: *mut *mut c_char,
) -> UstpaStatus {
    model_string(model, out_text, |m| export_structured(&build_bundle(m)))
}

/// Exports the full analysis report as markdown tables.
///
/// # Safety
/// Same contract as `ustpa_model_render`.
#[no_mangle]
pub unsafe extern "C" fn ustpa_model_report_markdown(
    model: *const UstpaModel,
    out_text: *mut *mut c_char,
) -> UstpaStatus {
    model_string(model, out_text, |m| render_tables(&build_bundle(m)))
}

/// Exports the control structure as Graphviz DOT.
///
/// # Safety
/// Same contract as `ustpa_model_render`.
#[no_mangle]
pub unsafe extern "C" fn ustpa_model_graph_dot(
    model: *const UstpaModel,
    out_text: *mut *mut c_char,
) -> UstpaStatus {
    model_string(model, out_text, |m| export_graph(m))
}

unsafe fn model_string(
    model: *const UstpaModel,
    out_text: *mut *mut c_char,
    produce: impl Fn(&SafetyModel) -> String,
) -> UstpaStatus {
    guarded(|| {
        let inner = match borrow_model(model) {
            Ok(m) => m,
            Err(status) => return status,
        };
        if out_text.is_null() {
            set_last_error("out_text must not be NULL".to_owned());
            return UstpaStatus::InvalidArgument;
        }
        give_string(out_text, produce(inner))
    })
}

/// Replays a monitor trace through the runtime guard and returns the
/// decision log (one line per step).
///
/// `policy_text` may be NULL to use the default policy.
///
/// # Safety
/// `trace_text` must be a valid NUL-terminated string, `policy_text` NULL
/// or likewise, and `out_log` a valid pointer; the result is released with
/// `ustpa_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ustpa_simulate_trace(
    trace_text: *const c_char,
    policy_text: *const c_char,
    out_log: *mut *mut c_char,
) -> UstpaStatus {
    guarded(|| {
        if out_log.is_null() {
            set_last_error("out_log must not be NULL".to_owned());
            return UstpaStatus::InvalidArgument;
        }
        let trace = match read_utf8(trace_text, "trace_text") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let policy = if policy_text.is_null() {
            GuardPolicy::default()
        } else {
            let text = match read_utf8(policy_text, "policy_text") {
                Ok(s) => s,
                Err(status) => return status,
            };
            match parse_policy(text) {
                Ok(p) => p,
                Err(e) => {
                    set_last_error(e.to_string());
                    return UstpaStatus::ParseError;
                }
            }
        };
        let readings = match parse_trace(trace) {
            Ok(r) => r,
            Err(e) => {
                set_last_error(e.to_string());
                return UstpaStatus::ParseError;
            }
        };
        match simulate_trace(&readings, &policy) {
            Ok(decisions) => give_string(out_log, format_decision_log(&decisions)),
            Err(e) => {
                set_last_error(e.to_string());
                UstpaStatus::ParseError
            }
        }
    })
}
