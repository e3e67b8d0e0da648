//! C ABI over the `stacky` library.
//!
//! Stacky fans cross the boundary as opaque handles; every other result is
//! returned as a JSON string in the same schema the CLI prints under
//! `outputs`. Functions return a [`StackyStatus`]; on failure the message is
//! available from [`stacky_last_error`] until the next call on the same
//! thread. Strings returned through out-parameters belong to the caller and
//! must be released with [`stacky_string_free`], handles with
//! [`stacky_fan_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigInt;
use serde_json::{json, Value};
use stacky::exactla::smith_normal_form;
use stacky::gerbe::{gerbe_stacky_fan, rigidify};
use stacky::json as js;
use stacky::momentangle::verify_lemma;
use stacky::stackyfan::{quotient_presentation, validate_stacky_fan, StackyFan};
use stacky::{gale_dual, verify_gale_sequences, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StackyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidFan = 4,
    InvalidExtension = 5,
    SizeBound = 6,
    /// a check ran and came out negative (e.g. the lemma failed)
    CheckFailed = 7,
    Internal = 8,
    Panic = 9,
}

/// Opaque handle to a stacky fan.
pub struct StackyFanHandle {
    inner: StackyFan,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: StackyStatus, msg: impl Into<String>) -> StackyStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> StackyStatus {
    match e {
        Error::Input(_) | Error::DimensionMismatch(_) => StackyStatus::Parse,
        Error::InvalidFan(_) => StackyStatus::InvalidFan,
        Error::InvalidExtension(_) => StackyStatus::InvalidExtension,
        Error::SizeBound { .. } => StackyStatus::SizeBound,
        Error::Internal(_) => StackyStatus::Internal,
        _ => StackyStatus::CheckFailed,
    }
}

fn from_error(e: Error) -> StackyStatus {
    fail(status_of(&e), e.to_string())
}

/// Runs `f` with panics turned into [`StackyStatus::Panic`].
fn guarded(f: impl FnOnce() -> StackyStatus) -> StackyStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(StackyStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, StackyStatus> {
    if p.is_null() {
        return Err(fail(StackyStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(StackyStatus::InvalidUtf8, "argument is not UTF-8"))
}

unsafe fn read_json(p: *const c_char) -> Result<Value, StackyStatus> {
    let s = read_str(p)?;
    serde_json::from_str(s).map_err(|e| fail(StackyStatus::Parse, e.to_string()))
}

unsafe fn handle<'a>(h: *const StackyFanHandle) -> Result<&'a StackyFan, StackyStatus> {
    if h.is_null() {
        return Err(fail(StackyStatus::NullPointer, "null stacky fan handle"));
    }
    Ok(&(*h).inner)
}

unsafe fn write_json(out: *mut *mut c_char, v: &Value) -> StackyStatus {
    let s = CString::new(js::to_canonical_string(v)).expect("JSON has no nul bytes");
    *out = s.into_raw();
    StackyStatus::Ok
}

unsafe fn write_handle(out: *mut *mut StackyFanHandle, x: StackyFan) {
    *out = Box::into_raw(Box::new(StackyFanHandle { inner: x }));
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! check_out {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            return fail(StackyStatus::NullPointer, "null output pointer");
        })+
    };
}

/// Message for the last failing call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn stacky_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static version string; do not free.
#[no_mangle]
pub extern "C" fn stacky_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn stacky_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `h` must be null or a handle returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn stacky_fan_free(h: *mut StackyFanHandle) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Parses a stacky fan file's JSON. The fan is not validated; see
/// [`stacky_fan_validate`].
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stacky_fan_from_json(json: *const c_char, out: *mut *mut StackyFanHandle) -> StackyStatus {
    guarded(|| {
        check_out!(out);
        let v = try_ffi!(read_json(json));
        let x = try_ffi!(js::stacky_fan_from_json(&v).map_err(|e| fail(StackyStatus::Parse, e.to_string())));
        write_handle(out, x);
        StackyStatus::Ok
    })
}

/// Canonical JSON of the fan as stored.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stacky_fan_to_json(h: *const StackyFanHandle, out: *mut *mut c_char) -> StackyStatus {
    guarded(|| {
        check_out!(out);
        let x = try_ffi!(handle(h));
        write_json(out, &js::stacky_fan_to_json(x))
    })
}

/// Writes `{"valid": bool, "diagnostics": [...]}` and returns
/// [`StackyStatus::InvalidFan`] when the fan is invalid.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stacky_fan_validate(
    h: *const StackyFanHandle,
    strict: bool,
    out: *mut *mut c_char,
) -> StackyStatus {
    guarded(|| {
        check_out!(out);
        let x = try_ffi!(handle(h));
        let r = validate_stacky_fan(x, strict);
        let diags: Vec<Value> = r.diagnostics.iter().map(js::diagnostic_to_json).collect();
        write_json(out, &json!({ "valid": r.is_valid(), "diagnostics": diags }));
        if r.is_valid() {
            StackyStatus::Ok
        } else {
            fail(StackyStatus::InvalidFan, stacky::Error::InvalidFan(r.diagnostics).to_string())
        }
    })
}

/// Quotient presentation `[Z/G]`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stacky_present(h: *const StackyFanHandle, out: *mut *mut c_char) -> StackyStatus {
    guarded(|| {
        check_out!(out);
        let x = try_ffi!(handle(h));
        let q = try_ffi!(quotient_presentation(x).map_err(from_error));
        write_json(out, &js::presentation_to_json(&q))
    })
}

/// Gale dual of `β` with the exact-sequence report.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stacky_gale_dual(h: *const StackyFanHandle, out: *mut *mut c_char) -> StackyStatus {
    guarded(|| {
        check_out!(out);
        let x = try_ffi!(handle(h));
        let gd = try_ffi!(gale_dual(x.beta()).map_err(from_error));
        let report = try_ffi!(verify_gale_sequences(x.beta(), &gd).map_err(from_error));
        write_json(out, &js::gale_dual_to_json(&gd, &report))
    })
}

/// Gerbe of `h` along the extension given as JSON. On success `out_fan`
/// receives the new stacky fan and `out` the full result.
///
/// # Safety
/// `h` must be a live handle, `extension_json` a nul-terminated string and
/// both out-parameters writable.
#[no_mangle]
pub unsafe extern "C" fn stacky_gerbe(
    h: *const StackyFanHandle,
    extension_json: *const c_char,
    out_fan: *mut *mut StackyFanHandle,
    out: *mut *mut c_char,
) -> StackyStatus {
    guarded(|| {
        check_out!(out_fan, out);
        let x = try_ffi!(handle(h));
        let v = try_ffi!(read_json(extension_json));
        let spec = try_ffi!(js::extension_from_json(&v, x).map_err(from_error));
        let r = try_ffi!(gerbe_stacky_fan(x, &spec).map_err(from_error));
        write_json(out, &js::gerbe_to_json(&r));
        write_handle(out_fan, r.stacky_fan);
        StackyStatus::Ok
    })
}

/// Underlying orbifold, in canonical form.
///
/// # Safety
/// `h` must be a live handle; `out_fan` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stacky_rigidify(h: *const StackyFanHandle, out_fan: *mut *mut StackyFanHandle) -> StackyStatus {
    guarded(|| {
        check_out!(out_fan);
        let x = try_ffi!(handle(h));
        let r = try_ffi!(rigidify(x).map_err(from_error));
        write_handle(out_fan, r.canonical());
        StackyStatus::Ok
    })
}

/// Vanishing of `H^1` and `H^2` of the arrangement complement with `Z/modulus`
/// coefficients. Returns [`StackyStatus::CheckFailed`] (with the report
/// still written) when they do not vanish.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stacky_lemma(
    h: *const StackyFanHandle,
    modulus: u64,
    max_vertices: usize,
    out: *mut *mut c_char,
) -> StackyStatus {
    guarded(|| {
        check_out!(out);
        let x = try_ffi!(handle(h));
        if let Err(e) = validate_stacky_fan(x, false).into_result() {
            return from_error(e);
        }
        let r = try_ffi!(verify_lemma(x.fan(), &BigInt::from(modulus), max_vertices).map_err(from_error));
        write_json(out, &js::lemma_to_json(&r));
        if r.pass {
            StackyStatus::Ok
        } else {
            fail(StackyStatus::CheckFailed, "cohomology does not vanish")
        }
    })
}

/// Smith normal form of a JSON matrix (array of rows).
///
/// # Safety
/// `matrix_json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stacky_snf(matrix_json: *const c_char, out: *mut *mut c_char) -> StackyStatus {
    guarded(|| {
        check_out!(out);
        let v = try_ffi!(read_json(matrix_json));
        let a = try_ffi!(js::matrix_from_json(&v).map_err(from_error));
        write_json(out, &js::smith_to_json(&smith_normal_form(&a)))
    })
}
