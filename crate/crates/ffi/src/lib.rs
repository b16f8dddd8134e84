//! C interface to wittop.
//!
//! Witt vectors and operators are passed as opaque handles that the caller
//! frees with the matching `*_free` function. Every fallible call returns a
//! `WittopStatus`; on failure a message is available from
//! `wittop_last_error` until the next call on the same thread. Strings
//! returned through out-parameters are owned by the caller and released with
//! `wittop_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use wittop::embed::embed;
use wittop::verify::{run_suite, SuiteConfig};
use wittop::wdo::{compose, format_normal_form, parse_operator, WdoNormalForm, WittOperator, WorkingContext};
use wittop::{WittError, WittVec};

/// Status codes. Codes 1-8 match the library error kinds.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WittopStatus {
    Ok = 0,
    InvalidInput = 1,
    NotAPthPower = 2,
    NotInImage = 3,
    NotAnOperator = 4,
    ContextOverflow = 5,
    NoFit = 6,
    ConvergenceFailure = 7,
    Parse = 8,
    NullPointer = 9,
    InvalidUtf8 = 10,
    Panic = 11,
}

impl From<&WittError> for WittopStatus {
    fn from(e: &WittError) -> Self {
        match e.code() {
            1 => WittopStatus::InvalidInput,
            2 => WittopStatus::NotAPthPower,
            3 => WittopStatus::NotInImage,
            4 => WittopStatus::NotAnOperator,
            5 => WittopStatus::ContextOverflow,
            6 => WittopStatus::NoFit,
            7 => WittopStatus::ConvergenceFailure,
            _ => WittopStatus::Parse,
        }
    }
}

/// A truncated Witt vector over F_p[T1..Tn].
pub struct WittopWitt(WittVec);

/// A Witt differential operator in normal form, with its working context.
pub struct WittopOperator(WdoNormalForm);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(WittopStatus, String);

impl From<WittError> for Fail {
    fn from(e: WittError) -> Self {
        Fail(WittopStatus::from(&e), e.to_string())
    }
}

/// Runs `f`, records any error and converts panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> WittopStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WittopStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            WittopStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail(WittopStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail(WittopStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn get<'a, T>(h: *const T) -> Result<&'a T, Fail> {
    h.as_ref().ok_or_else(|| Fail(WittopStatus::NullPointer, "null handle".into()))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(WittopStatus::NullPointer, "null output pointer".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(WittopStatus::NullPointer, "null output pointer".into()));
    }
    *out = CString::new(s).unwrap_or_default().into_raw();
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn wittop_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn wittop_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn wittop_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `[f0;f1;...]` as a Witt vector of length `len`.
///
/// # Safety
/// `s` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wittop_witt_parse(
    s: *const c_char,
    p: u64,
    nvars: usize,
    len: usize,
    out: *mut *mut WittopWitt,
) -> WittopStatus {
    guard(|| put(out, WittopWitt(WittVec::parse(text(s)?, p, nvars, len)?)))
}

/// # Safety
/// `w` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn wittop_witt_free(w: *mut WittopWitt) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// # Safety
/// Handles must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wittop_witt_add(
    a: *const WittopWitt,
    b: *const WittopWitt,
    out: *mut *mut WittopWitt,
) -> WittopStatus {
    guard(|| put(out, WittopWitt(get(a)?.0.add(&get(b)?.0)?)))
}

/// # Safety
/// Handles must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wittop_witt_sub(
    a: *const WittopWitt,
    b: *const WittopWitt,
    out: *mut *mut WittopWitt,
) -> WittopStatus {
    guard(|| put(out, WittopWitt(get(a)?.0.sub(&get(b)?.0)?)))
}

/// # Safety
/// Handles must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wittop_witt_mul(
    a: *const WittopWitt,
    b: *const WittopWitt,
    out: *mut *mut WittopWitt,
) -> WittopStatus {
    guard(|| put(out, WittopWitt(get(a)?.0.mul(&get(b)?.0)?)))
}

/// F^k.
///
/// # Safety
/// `a` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wittop_witt_frobenius(a: *const WittopWitt, k: u32, out: *mut *mut WittopWitt) -> WittopStatus {
    guard(|| put(out, WittopWitt(get(a)?.0.frobenius_pow(k))))
}

/// V^k at the same length.
///
/// # Safety
/// `a` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wittop_witt_verschiebung(
    a: *const WittopWitt,
    k: usize,
    out: *mut *mut WittopWitt,
) -> WittopStatus {
    guard(|| put(out, WittopWitt(get(a)?.0.verschiebung(k))))
}

/// Restriction to length `len`.
///
/// # Safety
/// `a` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wittop_witt_restrict(
    a: *const WittopWitt,
    len: usize,
    out: *mut *mut WittopWitt,
) -> WittopStatus {
    guard(|| put(out, WittopWitt(get(a)?.0.restrict(len)?)))
}

/// # Safety
/// Handles must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wittop_witt_equal(a: *const WittopWitt, b: *const WittopWitt, out: *mut bool) -> WittopStatus {
    guard(|| {
        let eq = get(a)?.0 == get(b)?.0;
        *out.as_mut().ok_or(Fail(WittopStatus::NullPointer, "null output pointer".into()))? = eq;
        Ok(())
    })
}

/// Text form `[f0;f1;...]`.
///
/// # Safety
/// `a` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wittop_witt_to_string(a: *const WittopWitt, out: *mut *mut c_char) -> WittopStatus {
    guard(|| put_string(out, get(a)?.0.to_string()))
}

/// Image in (Z/p^L)[T] as text.
///
/// # Safety
/// `a` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wittop_witt_embed(a: *const WittopWitt, out: *mut *mut c_char) -> WittopStatus {
    guard(|| put_string(out, embed(&get(a)?.0).to_string()))
}

/// Parses an operator such as `{d1}_{1/2}` in the working context with
/// the given prime, variables, length, degree bound and level.
///
/// # Safety
/// `s` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wittop_operator_parse(
    s: *const c_char,
    p: u64,
    nvars: usize,
    len: usize,
    max_deg: u32,
    level: u32,
    out: *mut *mut WittopOperator,
) -> WittopStatus {
    guard(|| {
        let ctx = WorkingContext::new(p, nvars, len, max_deg, level)?;
        put(out, WittopOperator(parse_operator(text(s)?, &ctx)?))
    })
}

/// # Safety
/// `q` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn wittop_operator_free(q: *mut WittopOperator) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// # Safety
/// Handles must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wittop_operator_apply(
    q: *const WittopOperator,
    w: *const WittopWitt,
    out: *mut *mut WittopWitt,
) -> WittopStatus {
    guard(|| put(out, WittopWitt(get(q)?.0.apply(&get(w)?.0)?)))
}

/// q1 after q2.
///
/// # Safety
/// Handles must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wittop_operator_compose(
    q1: *const WittopOperator,
    q2: *const WittopOperator,
    out: *mut *mut WittopOperator,
) -> WittopStatus {
    guard(|| put(out, WittopOperator(compose(&get(q1)?.0, &get(q2)?.0)?)))
}

/// Normal form as text.
///
/// # Safety
/// `q` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wittop_operator_to_string(q: *const WittopOperator, out: *mut *mut c_char) -> WittopStatus {
    guard(|| put_string(out, format_normal_form(&get(q)?.0)))
}

/// Runs a verification suite (or "all") with the default grid and the
/// given seed; `samples` overrides the per-check sample counts when
/// nonzero. Writes the JSON report and whether every check passed.
///
/// # Safety
/// `suite` must be a NUL-terminated string; `passed` and `report` valid
/// pointers.
#[no_mangle]
pub unsafe extern "C" fn wittop_verify(
    suite: *const c_char,
    seed: u64,
    samples: usize,
    passed: *mut bool,
    report: *mut *mut c_char,
) -> WittopStatus {
    guard(|| {
        let cfg = SuiteConfig {
            seed,
            samples: (samples > 0).then_some(samples),
            ..SuiteConfig::default()
        };
        let r = run_suite(&cfg, text(suite)?)?;
        *passed.as_mut().ok_or(Fail(WittopStatus::NullPointer, "null output pointer".into()))? = r.passed;
        put_string(report, r.to_json())
    })
}
