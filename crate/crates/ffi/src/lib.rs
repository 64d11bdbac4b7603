//! C ABI over `cps_windows`: window construction, exact measure, word
//! complexity, coding words and certificate checking.
//!
//! Every fallible call returns a [`CpswStatus`]; on failure the message is
//! kept per thread and can be fetched with [`cpsw_last_error`]. Handles and
//! strings handed out here must be released with the matching free function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cps_windows::arith::{OrbitNumber, Rotation};
use cps_windows::cantor::{CantorApprox, ConstructionPlan};
use cps_windows::certificate::verify_certificate;
use cps_windows::complexity::patch_complexity;
use cps_windows::cps::coding_word;
use cps_windows::error::Error;
use cps_windows::window::{Genericity, WindowSpec};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpswStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    RationalRotation = 4,
    DepthOverflow = 5,
    SearchExhausted = 6,
    EmptyWindow = 7,
    GermUndecidable = 8,
    Io = 9,
    Panic = 10,
}

impl From<&Error> for CpswStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::RationalRotation => CpswStatus::RationalRotation,
            Error::DepthOverflow(_) => CpswStatus::DepthOverflow,
            Error::SearchExhausted(_) => CpswStatus::SearchExhausted,
            Error::EmptyWindow => CpswStatus::EmptyWindow,
            Error::GermUndecidable { .. } => CpswStatus::GermUndecidable,
            Error::Parse(_) | Error::Json(_) => CpswStatus::Parse,
            Error::Io(_) | Error::Csv(_) => CpswStatus::Io,
            Error::ZeroDenominator | Error::Precondition(_) => CpswStatus::InvalidArgument,
        }
    }
}

/// ω = (p + q√D)/r.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct CpswRotation {
    pub d: i64,
    pub p: i64,
    pub q: i64,
    pub r: i64,
}

/// num/den.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct CpswRational {
    pub num: i64,
    pub den: i64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpswWindowKind {
    /// Cantor body plus even-level gaps.
    W = 0,
    /// Full circle minus one chosen gap per level.
    V = 1,
    /// Gaps filled by a seeded random bit string.
    Random = 2,
}

/// Opaque window handle.
pub struct CpswWindow {
    inner: WindowSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CpswStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CpswStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(msg);
            CpswStatus::Panic
        }
    }
}

struct Failure(CpswStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure((&e).into(), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CpswStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(CpswStatus::InvalidArgument, msg.into())
}

fn rotation(r: CpswRotation) -> Result<Rotation, Failure> {
    Ok(Rotation::new(r.d, r.p, r.q, r.r)?)
}

fn rational(x: CpswRational) -> Result<OrbitNumber, Failure> {
    if x.den == 0 {
        return Err(Error::ZeroDenominator.into());
    }
    Ok(OrbitNumber::rational(x.num.into(), x.den.into()))
}

fn boxed(w: WindowSpec, out: *mut *mut CpswWindow) {
    // SAFETY: callers check `out` before building
    unsafe { *out = Box::into_raw(Box::new(CpswWindow { inner: w })) };
}

unsafe fn window<'a>(w: *const CpswWindow) -> Result<&'a WindowSpec, Failure> {
    w.as_ref().map(|w| &w.inner).ok_or_else(|| null("window"))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(CpswStatus::Parse, format!("{what}: {e}")))
}

fn to_c(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure(CpswStatus::Parse, e.to_string()))
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn cpsw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Free with
/// [`cpsw_string_free`].
#[no_mangle]
pub extern "C" fn cpsw_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |s| s.clone().into_raw()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cpsw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds window_W, window_V or a random filling over the depth-`depth`
/// Cantor approximation with parameter `eps`. `seed` is used by `Random`
/// only; `exact` keeps raw endpoints instead of orbit-separated ones.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cpsw_window_build(
    kind: CpswWindowKind,
    omega: CpswRotation,
    eps: CpswRational,
    depth: u32,
    seed: u64,
    exact: bool,
    out: *mut *mut CpswWindow,
) -> CpswStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let plan = ConstructionPlan::new(rotation(omega)?, rational(eps)?, depth as usize)?;
        let c = CantorApprox::build(&plan)?;
        let g = if exact { Genericity::Exact } else { Genericity::Separated };
        let w = match kind {
            CpswWindowKind::W => WindowSpec::w(&c, g),
            CpswWindowKind::V => WindowSpec::v(&c, g),
            CpswWindowKind::Random => WindowSpec::random(&c, "", seed, g)?,
        };
        boxed(w, out);
        Ok(())
    })
}

/// The closed arc [lo, hi] on the circle.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cpsw_window_interval(
    omega: CpswRotation,
    lo: CpswRational,
    hi: CpswRational,
    out: *mut *mut CpswWindow,
) -> CpswStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let w = WindowSpec::interval(rotation(omega)?, rational(lo)?, rational(hi)?, false, false)?;
        boxed(w, out);
        Ok(())
    })
}

/// Parses a window from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 string; `out` must be valid for one
/// handle write.
#[no_mangle]
pub unsafe extern "C" fn cpsw_window_from_json(json: *const c_char, out: *mut *mut CpswWindow) -> CpswStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let w: WindowSpec = serde_json::from_str(text(json, "json")?).map_err(Error::from)?;
        boxed(w, out);
        Ok(())
    })
}

/// Serializes a window; free the string with [`cpsw_string_free`].
///
/// # Safety
/// `w` must be a live handle and `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn cpsw_window_to_json(w: *const CpswWindow, out: *mut *mut c_char) -> CpswStatus {
    guard(|| {
        let w = window(w)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = serde_json::to_string(w).map_err(Error::from)?;
        *out = to_c(s)?;
        Ok(())
    })
}

/// # Safety
/// `w` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn cpsw_window_free(w: *mut CpswWindow) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Haar measure of the window, rounded to double.
///
/// # Safety
/// `w` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cpsw_window_measure(w: *const CpswWindow, out: *mut f64) -> CpswStatus {
    guard(|| {
        let w = window(w)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = w.rotation.to_f64(&w.set.measure());
        Ok(())
    })
}

/// Number of boundary points of the window.
///
/// # Safety
/// `w` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cpsw_window_boundary_count(w: *const CpswWindow, out: *mut usize) -> CpswStatus {
    guard(|| {
        let w = window(w)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = w.boundary().len();
        Ok(())
    })
}

/// Writes p(1), …, p(nmax) of the coding k ↦ [{kω} ∈ W + t] into `out`.
///
/// # Safety
/// `w` must be a live handle and `out` must have room for `nmax` values.
#[no_mangle]
pub unsafe extern "C" fn cpsw_complexity(w: *const CpswWindow, nmax: usize, out: *mut u64) -> CpswStatus {
    guard(|| {
        let w = window(w)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let t = patch_complexity(w, nmax)?;
        std::slice::from_raw_parts_mut(out, nmax).copy_from_slice(&t.p);
        Ok(())
    })
}

/// Writes the bits [{kω} ∈ W + t] for k0 ≤ k ≤ k1 into `out`, one byte each.
///
/// # Safety
/// `w` must be a live handle and `out` must have room for `k1 − k0 + 1` bytes.
#[no_mangle]
pub unsafe extern "C" fn cpsw_coding_word(
    w: *const CpswWindow,
    t: CpswRational,
    k0: i64,
    k1: i64,
    out: *mut u8,
) -> CpswStatus {
    guard(|| {
        let w = window(w)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if k1 < k0 {
            return Err(invalid(format!("empty range {k0}..={k1}")));
        }
        let bits = coding_word(w, &rational(t)?, k0.into(), k1.into())?;
        std::slice::from_raw_parts_mut(out, bits.len()).copy_from_slice(&bits);
        Ok(())
    })
}

/// Checks an independence certificate exhaustively; `ok` receives the
/// verdict, and a malformed certificate is reported as an error.
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 string and `ok` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cpsw_verify_certificate(json: *const c_char, ok: *mut bool) -> CpswStatus {
    guard(|| {
        let ok = ok.as_mut().ok_or_else(|| null("ok"))?;
        let rep = verify_certificate(text(json, "certificate")?)?;
        *ok = rep.ok;
        Ok(())
    })
}
