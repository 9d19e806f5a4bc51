//! C interface to the stop-loss aggregation engine.
//!
//! Every function returns an [`SlStatus`]; results go through out-pointers.
//! On failure a message is kept per thread and can be read with
//! [`sl_last_error_message`]. Handles are opaque, created by `*_new`
//! functions and released by the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stoploss_core::erlang::MixedErlang;
use stoploss_core::error::Error;
use stoploss_core::model_file::parse_model_str;
use stoploss_core::reinsurance::Aggregation;
use stoploss_core::sarmanov::ValidationStatus;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    /// Argument outside the domain of the function.
    Domain = 2,
    /// Malformed model text or invalid parameters.
    InvalidModel = 3,
    /// Dependence parameters fail the admissibility check.
    Inadmissible = 4,
    /// A probability strayed outside `[0, 1]` beyond round-off.
    Numerical = 5,
    Unsupported = 6,
    Panic = 7,
}

/// Admissibility verdict, mirrors the engine's validation status.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlValidation {
    Ok = 0,
    Violation = 1,
    Conditional = 2,
    Unchecked = 3,
}

/// A mixed Erlang distribution.
pub struct SlMixedErlang(MixedErlang);

/// A model together with its reinsurance program, ready for evaluation.
pub struct SlEngine {
    agg: Aggregation,
    validation: ValidationStatus,
    min_bracket: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> SlStatus {
    match e {
        Error::Domain(_) | Error::ScaleMismatch { .. } | Error::RescaleDirection { .. } | Error::EmptyBatch => {
            SlStatus::Domain
        }
        Error::Parse(_) | Error::InvalidModel(_) | Error::InvalidProgram(_) => SlStatus::InvalidModel,
        Error::Inadmissible(_) => SlStatus::Inadmissible,
        Error::NumericalQuality { .. } | Error::TruncationCap { .. } => SlStatus::Numerical,
        Error::Unsupported(_) => SlStatus::Unsupported,
    }
}

enum Fail {
    Null(&'static str),
    Engine(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Engine(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_error();
            SlStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer passed for `{what}`"));
            SlStatus::NullPointer
        }
        Ok(Err(Fail::Engine(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            SlStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    unsafe { p.as_ref() }.ok_or(Fail::Null(what))
}

unsafe fn write<T>(p: *mut T, what: &'static str, v: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    unsafe { p.write(v) };
    Ok(())
}

/// Length in bytes of the last error message on this thread, without the
/// terminating NUL; 0 when the last call succeeded.
#[no_mangle]
pub extern "C" fn sl_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |c| c.as_bytes().len()))
}

/// Copy the last error message into `buf` (NUL-terminated, truncated to
/// `len - 1` bytes). Returns the full message length.
///
/// # Safety
/// `buf` must be valid for `len` bytes, or null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn sl_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&[][..], |c| c.as_bytes());
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `weights` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_mixed_erlang_new(
    scale: f64,
    weights: *const f64,
    len: usize,
    out: *mut *mut SlMixedErlang,
) -> SlStatus {
    guard(|| {
        if weights.is_null() {
            return Err(Fail::Null("weights"));
        }
        let w = unsafe { std::slice::from_raw_parts(weights, len) }.to_vec();
        let m = MixedErlang::new(scale, w)?;
        unsafe { write(out, "out", Box::into_raw(Box::new(SlMixedErlang(m)))) }
    })
}

/// # Safety
/// `h` must come from [`sl_mixed_erlang_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sl_mixed_erlang_free(h: *mut SlMixedErlang) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Distribution function at `x`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_mixed_erlang_cdf(h: *const SlMixedErlang, x: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let m = &unsafe { deref(h, "h") }?.0;
        let v = m.cdf(x);
        unsafe { write(out, "out", v) }
    })
}

/// Survival function at `x`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_mixed_erlang_sf(h: *const SlMixedErlang, x: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let m = &unsafe { deref(h, "h") }?.0;
        let v = m.sf(x);
        unsafe { write(out, "out", v) }
    })
}

/// Density at `x`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_mixed_erlang_pdf(h: *const SlMixedErlang, x: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let m = &unsafe { deref(h, "h") }?.0;
        let v = m.pdf(x);
        unsafe { write(out, "out", v) }
    })
}

/// Quantile at level `x` in `(0, 1)`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_mixed_erlang_quantile(h: *const SlMixedErlang, x: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let m = &unsafe { deref(h, "h") }?.0;
        let v = m.quantile(x)?;
        unsafe { write(out, "out", v) }
    })
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_mixed_erlang_mean(h: *const SlMixedErlang, out: *mut f64) -> SlStatus {
    guard(|| {
        let m = &unsafe { deref(h, "h") }?.0;
        unsafe { write(out, "out", m.mean()) }
    })
}

/// Build an engine from model JSON. Admissibility failures are refused
/// with [`SlStatus::Inadmissible`] unless `force` is non-zero.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_engine_new(json: *const c_char, force: c_int, out: *mut *mut SlEngine) -> SlStatus {
    guard(|| {
        if json.is_null() {
            return Err(Fail::Null("json"));
        }
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|e| Error::Parse(format!("model text is not UTF-8: {e}")))?;
        let l = parse_model_str(text)?;
        if l.validation.status == ValidationStatus::Violation && force == 0 {
            return Err(Error::Inadmissible(format!("bracket reaches {:e}", l.validation.min_bracket)).into());
        }
        let agg = Aggregation::new(&l.model, &l.program)?;
        let e = SlEngine { agg, validation: l.validation.status, min_bracket: l.validation.min_bracket };
        unsafe { write(out, "out", Box::into_raw(Box::new(e))) }
    })
}

/// # Safety
/// `h` must come from [`sl_engine_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sl_engine_free(h: *mut SlEngine) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Admissibility verdict and the smallest bracket value found.
///
/// # Safety
/// `h` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_engine_validation(
    h: *const SlEngine,
    status: *mut SlValidation,
    min_bracket: *mut f64,
) -> SlStatus {
    guard(|| {
        let e = unsafe { deref(h, "h") }?;
        let s = match e.validation {
            ValidationStatus::Ok => SlValidation::Ok,
            ValidationStatus::Violation => SlValidation::Violation,
            ValidationStatus::Conditional => SlValidation::Conditional,
            ValidationStatus::Unchecked => SlValidation::Unchecked,
        };
        unsafe {
            write(status, "status", s)?;
            write(min_bracket, "min_bracket", e.min_bracket)
        }
    })
}

/// `P(S1 > u1, S2 > u2)`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_joint_tail(h: *const SlEngine, u1: f64, u2: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let e = unsafe { deref(h, "h") }?;
        let v = e.agg.joint_tail(u1, u2)?;
        unsafe { write(out, "out", v) }
    })
}

/// Distribution function of the aggregate reinsurance payment.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_aggregate_cdf(h: *const SlEngine, s: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let e = unsafe { deref(h, "h") }?;
        let v = e.agg.aggregate_df(s)?;
        unsafe { write(out, "out", v) }
    })
}

/// # Safety
/// `h` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_var_tvar(h: *const SlEngine, p: f64, var: *mut f64, tvar: *mut f64) -> SlStatus {
    guard(|| {
        let e = unsafe { deref(h, "h") }?;
        let v = e.agg.var_tvar(p)?;
        unsafe {
            write(var, "var", v.var)?;
            write(tvar, "tvar", v.tvar)
        }
    })
}

/// TVaR at level `p` and its split between the two treaties.
///
/// # Safety
/// `h` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_tvar_allocate(
    h: *const SlEngine,
    p: f64,
    tvar: *mut f64,
    k1: *mut f64,
    k2: *mut f64,
) -> SlStatus {
    guard(|| {
        let e = unsafe { deref(h, "h") }?;
        let a = e.agg.tvar_allocate(p)?;
        unsafe {
            write(tvar, "tvar", a.tvar)?;
            write(k1, "k1", a.k1)?;
            write(k2, "k2", a.k2)
        }
    })
}

/// Default probability `P(R > K)` and default option value `E[(R − K)+]`.
///
/// # Safety
/// `h` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_default(h: *const SlEngine, capital: f64, prob: *mut f64, value: *mut f64) -> SlStatus {
    guard(|| {
        let e = unsafe { deref(h, "h") }?;
        let (pr, v) = (e.agg.default_prob(capital)?, e.agg.default_value(capital)?);
        unsafe {
            write(prob, "prob", pr)?;
            write(value, "value", v)
        }
    })
}

/// Unpaid losses of each treaty when capitals `k1`, `k2` are held.
///
/// # Safety
/// `h` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_unpaid(h: *const SlEngine, k1: f64, k2: f64, u1: *mut f64, u2: *mut f64) -> SlStatus {
    guard(|| {
        let e = unsafe { deref(h, "h") }?;
        let (a, b) = e.agg.unpaid_losses(k1, k2)?;
        unsafe {
            write(u1, "u1", a)?;
            write(u2, "u2", b)
        }
    })
}

/// Diversification benefit `1 − TVaR(R) / (TVaR(T1) + TVaR(T2))` as a fraction.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_diversification(h: *const SlEngine, p: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let e = unsafe { deref(h, "h") }?;
        let d = e.agg.diversification(p)?;
        unsafe { write(out, "out", d.benefit) }
    })
}
