//! C ABI over `torus_hms`.
//!
//! Tori live behind the opaque [`FhmsTorus`] handle. Structured results are
//! returned as JSON strings owned by the library; release them with
//! [`fhms_string_free`]. Every function returns an [`FhmsStatus`]; on failure
//! [`fhms_last_error`] describes what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use torus_hms::abranes::{check_abrane, AffineBrane};
use torus_hms::cohomology::{hodge_diamond, lefschetz_kernel_dim};
use torus_hms::equivalence::{search_relation, RelationKind, SearchOptions, SearchOutcome};
use torus_hms::tduality::{mirror_via_tduality, LagrangianSplitting};
use torus_hms::torus::TorusData;
use torus_hms::HmsError;

/// Result code of every exported function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FhmsStatus {
    Ok = 0,
    /// A check ran and came out negative, or a search found nothing within
    /// its bound.
    Refuted = 1,
    NullPointer = 2,
    InvalidUtf8 = 3,
    Parse = 4,
    InvalidTorus = 5,
    Precondition = 6,
    BudgetExceeded = 7,
    Internal = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FhmsRelation {
    Iso = 0,
    Mirror = 1,
    DerivedEq = 2,
}

impl From<FhmsRelation> for RelationKind {
    fn from(r: FhmsRelation) -> Self {
        match r {
            FhmsRelation::Iso => RelationKind::Iso,
            FhmsRelation::Mirror => RelationKind::Mirror,
            FhmsRelation::DerivedEq => RelationKind::DerivedEq,
        }
    }
}

/// Opaque validated torus.
pub struct FhmsTorus {
    inner: TorusData,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("no interior nul")));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &HmsError) -> FhmsStatus {
    match err {
        HmsError::Parse(_) => FhmsStatus::Parse,
        HmsError::InvalidTorus(_) => FhmsStatus::InvalidTorus,
        HmsError::Dimension(_) | HmsError::Grade(_) | HmsError::Precondition(_) | HmsError::Truncation(_) => {
            FhmsStatus::Precondition
        }
        HmsError::BudgetExceeded { .. } => FhmsStatus::BudgetExceeded,
        HmsError::Recovery { .. } => FhmsStatus::Refuted,
        HmsError::Inconsistency(_) | HmsError::Io(_) => FhmsStatus::Internal,
    }
}

struct Failure(FhmsStatus, String);

impl From<HmsError> for Failure {
    fn from(e: HmsError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(FhmsStatus::Parse, e.to_string())
    }
}

/// Run `f`, translating errors and panics into a status and the thread's
/// last-error message.
fn guard(f: impl FnOnce() -> Result<FhmsStatus, Failure>) -> FhmsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Failure(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside torus-hms");
            FhmsStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(FhmsStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(FhmsStatus::InvalidUtf8, e.to_string()))
}

unsafe fn torus_ref<'a>(p: *const FhmsTorus) -> Result<&'a TorusData, Failure> {
    p.as_ref()
        .map(|t| &t.inner)
        .ok_or_else(|| Failure(FhmsStatus::NullPointer, "null torus handle".into()))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(FhmsStatus::NullPointer, "null output pointer".into()));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_json(out: *mut *mut c_char, v: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string(v)?;
    let c = CString::new(text).map_err(|e| Failure(FhmsStatus::Internal, e.to_string()))?;
    write_out(out, c.into_raw())
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn fhms_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fhms_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse and validate a torus from its JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fhms_torus_from_json(json: *const c_char, out: *mut *mut FhmsTorus) -> FhmsStatus {
    guard(|| {
        let text = read_str(json)?;
        let t: TorusData = serde_json::from_str(text)?;
        t.ensure_valid()?;
        write_out(out, Box::into_raw(Box::new(FhmsTorus { inner: t })))?;
        Ok(FhmsStatus::Ok)
    })
}

/// # Safety
/// `t` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn fhms_torus_free(t: *mut FhmsTorus) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Complex dimension `d` of the torus, or 0 for NULL.
///
/// # Safety
/// `t` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fhms_torus_dim(t: *const FhmsTorus) -> usize {
    t.as_ref().map_or(0, |t| t.inner.d)
}

/// # Safety
/// `t` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fhms_torus_to_json(t: *const FhmsTorus, out: *mut *mut c_char) -> FhmsStatus {
    guard(|| {
        write_json(out, torus_ref(t)?)?;
        Ok(FhmsStatus::Ok)
    })
}

/// Bounded search for a relation certificate. Writes the search outcome as
/// JSON; returns `FHMS_STATUS_REFUTED` when nothing was found within the bound.
///
/// # Safety
/// Handles must be live and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn fhms_search_relation(
    source: *const FhmsTorus,
    target: *const FhmsTorus,
    kind: FhmsRelation,
    bound: u32,
    node_budget: u64,
    out_json: *mut *mut c_char,
) -> FhmsStatus {
    guard(|| {
        let (s, t) = (torus_ref(source)?, torus_ref(target)?);
        let outcome = search_relation(s, t, kind.into(), SearchOptions { bound, node_budget })?;
        write_json(out_json, &outcome)?;
        Ok(match outcome {
            SearchOutcome::Found { .. } => FhmsStatus::Ok,
            SearchOutcome::NoneWithinBound { .. } => FhmsStatus::Refuted,
        })
    })
}

/// T-dual partner along `A` for the splitting `"a1;a2|b1;b2"`. The mirror is
/// returned as a new handle and the duality certificate as JSON.
///
/// # Safety
/// `t` must be live, `split` NUL-terminated, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn fhms_mirror(
    t: *const FhmsTorus,
    split: *const c_char,
    out_mirror: *mut *mut FhmsTorus,
    out_certificate_json: *mut *mut c_char,
) -> FhmsStatus {
    guard(|| {
        let t = torus_ref(t)?;
        let s = LagrangianSplitting::parse(read_str(split)?)?;
        let m = mirror_via_tduality(t, &s)?;
        write_json(out_certificate_json, &m.duality_map)?;
        write_out(out_mirror, Box::into_raw(Box::new(FhmsTorus { inner: m.mirror })))?;
        Ok(FhmsStatus::Ok)
    })
}

/// Hodge numbers as JSON `{"d", "h"}`.
///
/// # Safety
/// `t` must be live and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn fhms_hodge(t: *const FhmsTorus, out_json: *mut *mut c_char) -> FhmsStatus {
    guard(|| {
        write_json(out_json, &hodge_diamond(torus_ref(t)?)?)?;
        Ok(FhmsStatus::Ok)
    })
}

/// Dimension of the kernel of `∧ω` on middle-degree classes.
///
/// # Safety
/// `t` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fhms_lefschetz_kernel_dim(t: *const FhmsTorus, out: *mut usize) -> FhmsStatus {
    guard(|| {
        write_out(out, lefschetz_kernel_dim(torus_ref(t)?)?)?;
        Ok(FhmsStatus::Ok)
    })
}

/// Coisotropic brane check on the brane JSON; `FHMS_STATUS_REFUTED` for a rejection.
///
/// # Safety
/// `t` must be live, `brane_json` NUL-terminated, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn fhms_abrane_check(
    t: *const FhmsTorus,
    brane_json: *const c_char,
    out_json: *mut *mut c_char,
) -> FhmsStatus {
    guard(|| {
        let t = torus_ref(t)?;
        let b: AffineBrane = serde_json::from_str(read_str(brane_json)?)?;
        let report = check_abrane(t, &b)?;
        write_json(out_json, &report)?;
        Ok(if report.accepted { FhmsStatus::Ok } else { FhmsStatus::Refuted })
    })
}

/// Run a command-line invocation (`argv[0]` is the program name). Writes the
/// JSON report and the process exit code the binary would use.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn fhms_cli_run(
    argv: *const *const c_char,
    argc: usize,
    out_report: *mut *mut c_char,
    out_exit_code: *mut i32,
) -> FhmsStatus {
    guard(|| {
        if argv.is_null() && argc > 0 {
            return Err(Failure(FhmsStatus::NullPointer, "null argv".into()));
        }
        let mut args = Vec::with_capacity(argc);
        for k in 0..argc {
            args.push(read_str(*argv.add(k))?.to_owned());
        }
        let (code, text) = torus_hms::cli::run(args);
        let c = CString::new(text).map_err(|e| Failure(FhmsStatus::Internal, e.to_string()))?;
        write_out(out_exit_code, code)?;
        write_out(out_report, c.into_raw())?;
        Ok(FhmsStatus::Ok)
    })
}
