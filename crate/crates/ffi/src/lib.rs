//! C ABI for `leakshare`.
//!
//! Every fallible function returns an [`LsStatus`] and writes its result
//! through an out-pointer. On failure a message is available from
//! [`ls_last_error_message`] on the same thread. Handles are opaque and must
//! be released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use leakshare::bitexpand::n_tilde_of;
use leakshare::bounds::{bound_bitwise, delta_from_eps};
use leakshare::channels::{bsc, per_bit_channel};
use leakshare::config::ExperimentConfig;
use leakshare::infotheory::{binary_entropy, binary_entropy_inv, DiscreteDistribution};
use leakshare::oracle::Oracle;
use leakshare::{Error, FieldElement, FieldSpec, LinearScheme, ShamirParams};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidField = 2,
    DivisionByZero = 3,
    InvalidParameter = 4,
    ThresholdNotMet = 5,
    Domain = 6,
    StateSpaceTooLarge = 7,
    NotConverged = 8,
    Config = 9,
    BufferTooSmall = 10,
    Internal = 11,
    Panic = 12,
}

/// A field GF(2^l).
pub struct LsField {
    spec: FieldSpec,
}

/// ShamirSS(N, t) parameters over a field.
pub struct LsShamir {
    params: ShamirParams,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LsStatus {
    match e {
        Error::InvalidField(_) => LsStatus::InvalidField,
        Error::DivisionByZero => LsStatus::DivisionByZero,
        Error::Parameter(_) | Error::ColludersCanReconstruct { .. } => LsStatus::InvalidParameter,
        Error::Threshold { .. } => LsStatus::ThresholdNotMet,
        Error::Domain(_) => LsStatus::Domain,
        Error::StateSpaceTooLarge { .. } => LsStatus::StateSpaceTooLarge,
        Error::NotConverged { .. } => LsStatus::NotConverged,
        Error::Config(_) | Error::Parse { .. } => LsStatus::Config,
        Error::Internal(_) | Error::Io(_) => LsStatus::Internal,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Buffer { needed: usize, got: usize },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type FfiResult = Result<(), Failure>;

fn guard<F: FnOnce() -> FfiResult>(f: F) -> LsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LsStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer: {name}"));
            LsStatus::NullPointer
        }
        Ok(Err(Failure::Buffer { needed, got })) => {
            set_error(format!("buffer too small: need {needed}, got {got}"));
            LsStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("panic inside leakshare".to_string());
            LsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn input<'a, T>(p: *const T, len: usize, name: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(Failure::Null(name))
    } else {
        Ok(slice::from_raw_parts(p, len))
    }
}

unsafe fn output<'a, T>(p: *mut T, len: usize, needed: usize, name: &'static str) -> Result<&'a mut [T], Failure> {
    if len < needed {
        return Err(Failure::Buffer { needed, got: len });
    }
    if needed == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(slice::from_raw_parts_mut(p, needed))
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ls_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates GF(2^l). `poly = 0` selects the built-in irreducible polynomial.
///
/// # Safety
/// `out_field` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn ls_field_new(l: u32, poly: u32, out_field: *mut *mut LsField) -> LsStatus {
    guard(|| {
        let slot = out(out_field, "out_field")?;
        let spec = if poly == 0 { FieldSpec::with_default_poly(l)? } else { FieldSpec::new(l, poly)? };
        *slot = Box::into_raw(Box::new(LsField { spec }));
        Ok(())
    })
}

/// Releases a field handle. NULL is ignored.
///
/// # Safety
/// `field` must come from [`ls_field_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ls_field_free(field: *mut LsField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Extension degree and modulus of a field.
///
/// # Safety
/// `field` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ls_field_info(field: *const LsField, out_l: *mut u32, out_poly: *mut u32) -> LsStatus {
    guard(|| {
        let f = deref(field, "field")?;
        *out(out_l, "out_l")? = f.spec.bits();
        *out(out_poly, "out_poly")? = f.spec.poly();
        Ok(())
    })
}

/// Product of two elements.
///
/// # Safety
/// `field` must be a live handle and `out_value` valid.
#[no_mangle]
pub unsafe extern "C" fn ls_field_mul(field: *const LsField, a: u32, b: u32, out_value: *mut u32) -> LsStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let (a, b) = (f.spec.element(a)?, f.spec.element(b)?);
        *out(out_value, "out_value")? = f.spec.mul(a, b).value();
        Ok(())
    })
}

/// Multiplicative inverse; zero gives `LS_STATUS_DIVISION_BY_ZERO`.
///
/// # Safety
/// `field` must be a live handle and `out_value` valid.
#[no_mangle]
pub unsafe extern "C" fn ls_field_inv(field: *const LsField, a: u32, out_value: *mut u32) -> LsStatus {
    guard(|| {
        let f = deref(field, "field")?;
        *out(out_value, "out_value")? = f.spec.inv(f.spec.element(a)?)?.value();
        Ok(())
    })
}

/// Creates ShamirSS(n, t). `gammas` may be NULL for the points 1..n;
/// otherwise it holds `n` distinct nonzero elements.
///
/// # Safety
/// `field` must be a live handle, `gammas` NULL or readable for `n`
/// elements, and `out_scheme` valid.
#[no_mangle]
pub unsafe extern "C" fn ls_shamir_new(
    field: *const LsField,
    n: usize,
    t: usize,
    gammas: *const u32,
    out_scheme: *mut *mut LsShamir,
) -> LsStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let slot = out(out_scheme, "out_scheme")?;
        let params = if gammas.is_null() {
            ShamirParams::with_default_points(f.spec, n, t)?
        } else {
            let pts = input(gammas, n, "gammas")?.iter().map(|&g| FieldElement::new(g)).collect();
            ShamirParams::new(f.spec, n, t, pts)?
        };
        *slot = Box::into_raw(Box::new(LsShamir { params }));
        Ok(())
    })
}

/// Releases a scheme handle. NULL is ignored.
///
/// # Safety
/// `scheme` must come from [`ls_shamir_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ls_shamir_free(scheme: *mut LsShamir) {
    if !scheme.is_null() {
        drop(Box::from_raw(scheme));
    }
}

/// Shares `secret` with explicit coefficients `a_1..a_{t-1}`.
/// `shares` must have room for `n` values.
///
/// # Safety
/// `scheme` must be a live handle; `coeffs` readable for `coeffs_len`
/// values; `shares` writable for `shares_len` values.
#[no_mangle]
pub unsafe extern "C" fn ls_shamir_share(
    scheme: *const LsShamir,
    secret: u32,
    coeffs: *const u32,
    coeffs_len: usize,
    shares: *mut u32,
    shares_len: usize,
) -> LsStatus {
    guard(|| {
        let s = deref(scheme, "scheme")?;
        let spec = s.params.spec();
        let dst = output(shares, shares_len, s.params.n(), "shares")?;
        let coeffs = input(coeffs, coeffs_len, "coeffs")?
            .iter()
            .map(|&c| spec.element(c))
            .collect::<leakshare::Result<Vec<_>>>()?;
        let v = s.params.share(spec.element(secret)?, &coeffs)?;
        for (d, x) in dst.iter_mut().zip(v.as_slice()) {
            *d = x.value();
        }
        Ok(())
    })
}

/// Shares `secret` with coefficients drawn from a seeded generator.
///
/// # Safety
/// `scheme` must be a live handle and `shares` writable for `shares_len` values.
#[no_mangle]
pub unsafe extern "C" fn ls_shamir_share_seeded(
    scheme: *const LsShamir,
    secret: u32,
    seed: u64,
    shares: *mut u32,
    shares_len: usize,
) -> LsStatus {
    guard(|| {
        let s = deref(scheme, "scheme")?;
        let dst = output(shares, shares_len, s.params.n(), "shares")?;
        let v = s.params.share_seeded(s.params.spec().element(secret)?, seed)?;
        for (d, x) in dst.iter_mut().zip(v.as_slice()) {
            *d = x.value();
        }
        Ok(())
    })
}

/// Recovers the secret from `count` (point, share) pairs; needs `count >= t`.
///
/// # Safety
/// `scheme` must be a live handle; `points` and `values` readable for
/// `count` values; `out_secret` valid.
#[no_mangle]
pub unsafe extern "C" fn ls_shamir_reconstruct(
    scheme: *const LsShamir,
    points: *const u32,
    values: *const u32,
    count: usize,
    out_secret: *mut u32,
) -> LsStatus {
    guard(|| {
        let s = deref(scheme, "scheme")?;
        let slot = out(out_secret, "out_secret")?;
        let spec = s.params.spec();
        let pairs = input(points, count, "points")?
            .iter()
            .zip(input(values, count, "values")?)
            .map(|(&p, &v)| Ok((spec.element(p)?, spec.element(v)?)))
            .collect::<leakshare::Result<Vec<_>>>()?;
        *slot = s.params.reconstruct(&pairs)?.value();
        Ok(())
    })
}

/// Ñ of the scheme's full-set recovery equation.
///
/// # Safety
/// `scheme` must be a live handle and `out_n_tilde` valid.
#[no_mangle]
pub unsafe extern "C" fn ls_shamir_n_tilde(scheme: *const LsShamir, out_n_tilde: *mut usize) -> LsStatus {
    guard(|| {
        let s = deref(scheme, "scheme")?;
        let slot = out(out_n_tilde, "out_n_tilde")?;
        *slot = n_tilde_of(&LinearScheme::shamir(s.params.clone())?);
        Ok(())
    })
}

/// Exact `I(S; Z)` and `I(S^i; Z)` when every share bit passes through a
/// BSC with crossover `q`. `prior` holds `2^l` probabilities; NULL means
/// uniform. `per_bit` receives `l` values and may be NULL.
///
/// # Safety
/// `scheme` must be a live handle; `prior` NULL or readable for `prior_len`
/// values; `per_bit` NULL or writable for `per_bit_len` values.
#[no_mangle]
pub unsafe extern "C" fn ls_shamir_exact_mi_bsc(
    scheme: *const LsShamir,
    q: f64,
    prior: *const f64,
    prior_len: usize,
    out_total: *mut f64,
    per_bit: *mut f64,
    per_bit_len: usize,
) -> LsStatus {
    guard(|| {
        let s = deref(scheme, "scheme")?;
        let spec = s.params.spec();
        let l = spec.bits();
        let dist = if prior.is_null() {
            DiscreteDistribution::uniform(spec.order())
        } else {
            if prior_len != spec.order() {
                return Err(Error::Parameter(format!("prior has {prior_len} entries, field has {}", spec.order())).into());
            }
            DiscreteDistribution::new(input(prior, prior_len, "prior")?.to_vec())?
        };
        let total = out(out_total, "out_total")?;
        let bits = if per_bit.is_null() { None } else { Some(output(per_bit, per_bit_len, l as usize, "per_bit")?) };
        let ch = per_bit_channel(&bsc(q)?, l)?;
        let channels = vec![ch; s.params.n()];
        let res = Oracle::default().exact_mi(&s.params, &channels, &dist)?;
        *total = res.total_mi;
        if let Some(b) = bits {
            b.copy_from_slice(&res.per_bit_mi);
        }
        Ok(())
    })
}

/// Binary entropy `h(p)` in bits.
///
/// # Safety
/// `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ls_binary_entropy(p: f64, out_value: *mut f64) -> LsStatus {
    guard(|| {
        *out(out_value, "out_value")? = binary_entropy(p)?;
        Ok(())
    })
}

/// Inverse of `h` on `[0, 1/2]`.
///
/// # Safety
/// `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ls_binary_entropy_inv(y: f64, out_value: *mut f64) -> LsStatus {
    guard(|| {
        *out(out_value, "out_value")? = binary_entropy_inv(y)?;
        Ok(())
    })
}

/// `δ = 1 − 2 h⁻¹(1 − ε)`.
///
/// # Safety
/// `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ls_delta_from_eps(eps: f64, out_value: *mut f64) -> LsStatus {
    guard(|| {
        *out(out_value, "out_value")? = delta_from_eps(eps)?;
        Ok(())
    })
}

/// Per-bit bound `δ^{2(Ñ − t')}`.
///
/// # Safety
/// `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ls_bound_bitwise(n_tilde: usize, t_prime: usize, eps: f64, out_value: *mut f64) -> LsStatus {
    guard(|| {
        *out(out_value, "out_value")? = bound_bitwise(n_tilde, t_prime, eps)?;
        Ok(())
    })
}

/// Parses a TOML experiment description and writes the bound report as a
/// JSON string. Free the result with [`ls_string_free`].
///
/// # Safety
/// `config_toml` must be a NUL-terminated string and `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn ls_analyze_toml(config_toml: *const c_char, out_json: *mut *mut c_char) -> LsStatus {
    guard(|| {
        let text = CStr::from_ptr(deref(config_toml, "config_toml")?)
            .to_str()
            .map_err(|e| Error::Config(format!("config is not UTF-8: {e}")))?;
        let slot = out(out_json, "out_json")?;
        let rep = ExperimentConfig::from_toml(text)?.build()?.report()?;
        let json = serde_json::to_string(&rep).map_err(|e| Error::Internal(e.to_string()))?;
        *slot = CString::new(json).map_err(|e| Error::Internal(e.to_string()))?.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ls_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
