//! C ABI over the exact-rational core.
//!
//! Inputs and reports travel as UTF-8 JSON in the same layouts the command
//! line tool reads and writes. Handles are opaque; every handle and every
//! returned string must be released with its matching `*_free` function.
//! Failing calls return a nonzero [`PmStatus`] and leave a message readable
//! through [`pm_last_error_message`] on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde_json::json;

use polymoment::certify::{bounded_certificate, certify_weakly_bounded};
use polymoment::io::{
    moment_tensor_to_json, parse_moment_tensor, parse_polymeasure, to_json_string, CertificateJson, HankelJson,
    MonotoneJson, SemivariationJson, StrongSolutionJson,
};
use polymoment::moment::check_completely_monotone;
use polymoment::scalar::parse_rational;
use polymoment::strong::{check_hankel, solve_strong, StrongOptions, StrongRefusal};
use polymoment::{DiscretePolymeasure, MomentError, MomentTensor, MultiIndex, Rational};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Schema = 4,
    OutOfBounds = 5,
    Dimension = 6,
    BudgetExceeded = 7,
    InvalidInput = 8,
    /// The strong solver declined; the output string holds the refusal report.
    Refused = 9,
    Panic = 10,
}

/// Moment tensor with exact rational entries.
pub struct PmTensor(MomentTensor<Rational>);

/// Atomic polymeasure with exact rational coefficients.
pub struct PmPolymeasure(DiscretePolymeasure<Rational>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(PmStatus, String);

impl From<MomentError> for Failure {
    fn from(e: MomentError) -> Self {
        let status = match &e {
            MomentError::OutOfBounds { .. } => PmStatus::OutOfBounds,
            MomentError::Dimension { .. } => PmStatus::Dimension,
            MomentError::BudgetExceeded { .. } => PmStatus::BudgetExceeded,
            MomentError::Schema { .. } => PmStatus::Schema,
            MomentError::Parse { .. } => PmStatus::Parse,
            MomentError::Refused(_) => PmStatus::Refused,
            MomentError::DiagonalInconsistent { .. } | MomentError::Input(_) => PmStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PmStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PmStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(PmStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(PmStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn read_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(PmStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(PmStatus::NullPointer, "output pointer is null".into()));
    }
    *out = value;
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(PmStatus::InvalidInput, e.to_string()))?;
    write_out(out, c.into_raw())
}

unsafe fn read_claim(p: *const c_char) -> Result<Option<Rational>, Failure> {
    if p.is_null() {
        return Ok(None);
    }
    let s = read_str(p, "claimed constant")?;
    parse_rational(s)
        .map(Some)
        .map_err(|m| Failure(PmStatus::InvalidInput, format!("claimed constant: {m}")))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a moment tensor from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pm_tensor_from_json(json: *const c_char, out: *mut *mut PmTensor) -> PmStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let mu = parse_moment_tensor::<Rational>(text)?;
        write_out(out, Box::into_raw(Box::new(PmTensor(mu))))
    })
}

/// Serializes a tensor back to JSON.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pm_tensor_to_json(t: *const PmTensor, out: *mut *mut c_char) -> PmStatus {
    guard(|| {
        let t = read_ref(t, "tensor")?;
        write_string(out, moment_tensor_to_json(&t.0))
    })
}

/// Number of axes, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pm_tensor_arity(t: *const PmTensor) -> usize {
    t.as_ref().map_or(0, |t| t.0.arity())
}

/// # Safety
/// `t` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pm_tensor_free(t: *mut PmTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Bounded certificate over every order in the tensor. `claimed` is an
/// optional rational such as `"7/3"`; pass null for none.
///
/// # Safety
/// `t` must be a live handle, `claimed` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_bounded_constant(
    t: *const PmTensor,
    claimed: *const c_char,
    out: *mut *mut c_char,
) -> PmStatus {
    guard(|| {
        let t = read_ref(t, "tensor")?;
        let claim = read_claim(claimed)?;
        let r = bounded_certificate(&t.0, t.0.bounds(), claim.as_ref())?;
        write_string(out, to_json_string(&CertificateJson::from_report(&r)))
    })
}

/// Weak-bound certificate over every order in the tensor.
///
/// # Safety
/// As for [`pm_bounded_constant`].
#[no_mangle]
pub unsafe extern "C" fn pm_certify_weak(
    t: *const PmTensor,
    claimed: *const c_char,
    out: *mut *mut c_char,
) -> PmStatus {
    guard(|| {
        let t = read_ref(t, "tensor")?;
        let claim = read_claim(claimed)?;
        let r = certify_weakly_bounded(&t.0, t.0.bounds(), claim.as_ref())?;
        write_string(out, to_json_string(&CertificateJson::from_report(&r)))
    })
}

/// Complete-monotonicity verdict over every order in the tensor.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pm_check_monotone(t: *const PmTensor, out: *mut *mut c_char) -> PmStatus {
    guard(|| {
        let t = read_ref(t, "tensor")?;
        let v = check_completely_monotone(&t.0, t.0.bounds())?;
        write_string(out, to_json_string(&MonotoneJson::from_verdict(&v)))
    })
}

/// Hankel verdict with the first failing pair, if any.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pm_check_hankel(t: *const PmTensor, out: *mut *mut c_char) -> PmStatus {
    guard(|| {
        let t = read_ref(t, "tensor")?;
        let h = check_hankel(&t.0, t.0.bounds())?;
        write_string(out, to_json_string(&HankelJson::from_report(&h)))
    })
}

/// Strong solver with reconstruction order `n_recon` and residuals up to
/// total degree `max_degree`. Returns [`PmStatus::Refused`] with the refusal
/// report in `out` when the tensor is not Hankel or not bounded.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pm_solve_strong(
    t: *const PmTensor,
    n_recon: usize,
    max_degree: usize,
    out: *mut *mut c_char,
) -> PmStatus {
    guard(|| {
        let t = read_ref(t, "tensor")?;
        let opts = StrongOptions {
            max_degree,
            n_recon,
            ..Default::default()
        };
        let (body, refused) = match solve_strong(&t.0, &opts) {
            Ok(s) => (to_json_string(&StrongSolutionJson::from_solution(&s)), None),
            Err(StrongRefusal::Invalid(e)) => return Err(e.into()),
            Err(StrongRefusal::NotHankel(h)) => (
                to_json_string(&json!({ "refused": "not-hankel", "hankel": HankelJson::from_report(&h) })),
                Some("not Hankel"),
            ),
            Err(StrongRefusal::BoundViolated(c)) => (
                to_json_string(&json!({ "refused": "bound-violated", "bounded": CertificateJson::from_report(&c) })),
                Some("bounded certificate violated"),
            ),
        };
        write_string(out, body)?;
        match refused {
            None => Ok(()),
            Some(why) => Err(Failure(PmStatus::Refused, format!("strong solver refused: {why}"))),
        }
    })
}

/// Parses an atomic polymeasure from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pm_polymeasure_from_json(json: *const c_char, out: *mut *mut PmPolymeasure) -> PmStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let g = parse_polymeasure::<Rational>(text)?;
        write_out(out, Box::into_raw(Box::new(PmPolymeasure(g))))
    })
}

/// # Safety
/// `g` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pm_polymeasure_free(g: *mut PmPolymeasure) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Moment tensor of `g` with bound `order` on every axis.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pm_polymeasure_moments(
    g: *const PmPolymeasure,
    order: usize,
    out: *mut *mut PmTensor,
) -> PmStatus {
    guard(|| {
        let g = read_ref(g, "polymeasure")?;
        let mu = g.0.moments(&MultiIndex::splat(g.0.arity(), order))?;
        write_out(out, Box::into_raw(Box::new(PmTensor(mu))))
    })
}

/// Variation and semivariation report.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pm_semivariation(g: *const PmPolymeasure, out: *mut *mut c_char) -> PmStatus {
    guard(|| {
        let g = read_ref(g, "polymeasure")?;
        let s = g.0.semivariation();
        write_string(out, to_json_string(&SemivariationJson::new(&g.0.variation(), &s)))
    })
}
