//! C ABI for cyclofermat.
//!
//! Conventions: every fallible function returns a [`CfStatus`]; on failure
//! a message is available from [`cf_last_error`] on the same thread.
//! Strings returned through `char **out` are owned by the caller and must be
//! released with [`cf_string_free`]. Field handles come from
//! `cf_field_new` / `cf_field_from_spec` / `cf_layer_field` and are released
//! with [`cf_field_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use cyclofermat::arith::{is_prime_u64, wieferich_scan, wieferich_test_u64};
use cyclofermat::cyclotomic::build_layer;
use cyclofermat::fieldspec::FieldSpec;
use cyclofermat::hypothesis::{
    check_prop_bound, check_theorem_aflt_layers, check_theorem_gfe_k_2d, check_theorem_gfe_layers,
    check_theorem_gfe_q_layers_2d, CoeffDescriptor, HPlus, Scenario,
};
use cyclofermat::numberfield::{make_field_i64, split_prime, Classification, NumberField};
use cyclofermat::sunit::{solve_sunit_equation, SUnitConfig, SUnitReport};
use cyclofermat::Error;
use num_traits::ToPrimitive;
use serde_json::Value;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Precondition = 4,
    Parse = 5,
    MissingInput = 6,
    WrongTheorem = 7,
    Reducible = 8,
    DegreeCap = 9,
    Io = 10,
    Internal = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfClassification {
    Inert = 0,
    TotallyRamified = 1,
    Other = 2,
}

/// Summary of `split_prime`. `ramified_root` is meaningful only when
/// `has_ramified_root` is set.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CfSplit {
    pub classification: CfClassification,
    pub index_caveat: bool,
    pub has_ramified_root: bool,
    pub ramified_root: u64,
}

/// Opaque number field handle.
pub struct CfField {
    inner: Arc<NumberField>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CfStatus {
    match e {
        Error::Domain(_)
        | Error::ModulusMismatch(..)
        | Error::FieldMismatch
        | Error::DivisionByZero => CfStatus::Domain,
        Error::NonMonic => CfStatus::Domain,
        Error::Precondition(_) => CfStatus::Precondition,
        Error::Parse { .. } => CfStatus::Parse,
        Error::MissingInput(_) => CfStatus::MissingInput,
        Error::WrongTheorem(_) => CfStatus::WrongTheorem,
        Error::Reducible { .. } => CfStatus::Reducible,
        Error::DegreeCap { .. } => CfStatus::DegreeCap,
        Error::Io(_) => CfStatus::Io,
        Error::Internal(_) => CfStatus::Internal,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (CfStatus, String)>) -> CfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CfStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("panic inside cyclofermat");
            CfStatus::Panic
        }
    }
}

fn lift(e: Error) -> (CfStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (CfStatus, String) {
    (CfStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, (CfStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CfStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (CfStatus, String)> {
    let c = CString::new(s).map_err(|_| (CfStatus::Internal, "output contains NUL".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn field_ref<'a>(f: *const CfField) -> Result<&'a CfField, (CfStatus, String)> {
    f.as_ref().ok_or_else(null)
}

/// Last error message on this thread; empty after a successful call. The
/// pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn cf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_is_prime(n: u64, out: *mut bool) -> CfStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null)?;
        *out = is_prime_u64(n);
        Ok(())
    })
}

/// Tests `base^(l-1) = 1 mod l^2` for an odd prime `l < 2^32`.
///
/// # Safety
/// `is_pair` and `residue` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_wieferich_test(
    base: u64,
    l: u64,
    is_pair: *mut bool,
    residue: *mut u64,
) -> CfStatus {
    guard(|| {
        if is_pair.is_null() || residue.is_null() {
            return Err(null());
        }
        if l >= 1 << 32 {
            return Err((
                CfStatus::Domain,
                "l must be below 2^32 for a 64-bit residue".into(),
            ));
        }
        let rep = wieferich_test_u64(base, l).map_err(lift)?;
        *is_pair = rep.is_wieferich_pair;
        *residue = rep
            .residue
            .to_u64()
            .ok_or_else(|| (CfStatus::Internal, "residue overflow".to_string()))?;
        Ok(())
    })
}

/// JSON array of the Wieferich primes for `base` in `[min, max]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_wieferich_scan_json(
    base: u64,
    min: u64,
    max: u64,
    out: *mut *mut c_char,
) -> CfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        if min > max || base < 2 {
            return Err((
                CfStatus::Domain,
                format!("bad scan base {base} or range [{min}, {max}]"),
            ));
        }
        let primes: Vec<u64> = wieferich_scan(base, min, max)
            .iter()
            .filter_map(|r| r.prime.to_u64())
            .collect();
        write_string(out, serde_json::to_string(&primes).expect("serializes"))
    })
}

unsafe fn emit_field(out: *mut *mut CfField, k: Arc<NumberField>) {
    *out = Box::into_raw(Box::new(CfField { inner: k }));
}

/// Field `Q[x]/(f)` from `len` integer coefficients, constant term first.
///
/// # Safety
/// `coeffs` must point to `len` values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_field_new(
    coeffs: *const i64,
    len: usize,
    out: *mut *mut CfField,
) -> CfStatus {
    guard(|| {
        if coeffs.is_null() || out.is_null() {
            return Err(null());
        }
        let c = std::slice::from_raw_parts(coeffs, len);
        let k = make_field_i64(c).map_err(lift)?;
        emit_field(out, k);
        Ok(())
    })
}

/// Field from field-spec text (`coeffs = ...`, `#` comments), or `Q`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_field_from_spec(
    text: *const c_char,
    out: *mut *mut CfField,
) -> CfStatus {
    guard(|| {
        let t = read_str(text)?;
        if out.is_null() {
            return Err(null());
        }
        let k = if t.trim() == "Q" {
            NumberField::rationals()
        } else {
            FieldSpec::parse(t).and_then(|s| s.field()).map_err(lift)?
        };
        emit_field(out, k);
        Ok(())
    })
}

/// # Safety
/// `f` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cf_field_free(f: *mut CfField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_field_degree(f: *const CfField, out: *mut usize) -> CfStatus {
    guard(|| {
        let k = field_ref(f)?;
        *out.as_mut().ok_or_else(null)? = k.inner.degree();
        Ok(())
    })
}

/// Defining polynomial as a JSON array of decimal strings.
///
/// # Safety
/// `f` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_field_poly_json(f: *const CfField, out: *mut *mut c_char) -> CfStatus {
    guard(|| {
        let k = field_ref(f)?;
        if out.is_null() {
            return Err(null());
        }
        let c: Vec<String> = k.inner.poly().iter().map(|c| c.to_string()).collect();
        write_string(out, serde_json::to_string(&c).expect("serializes"))
    })
}

/// # Safety
/// `f` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_split_prime(f: *const CfField, p: u64, out: *mut CfSplit) -> CfStatus {
    guard(|| {
        let k = field_ref(f)?;
        let out = out.as_mut().ok_or_else(null)?;
        let rep = split_prime(&k.inner, p).map_err(lift)?;
        *out = CfSplit {
            classification: match rep.classification {
                Classification::Inert => CfClassification::Inert,
                Classification::TotallyRamified => CfClassification::TotallyRamified,
                Classification::Other => CfClassification::Other,
            },
            index_caveat: rep.index_caveat,
            has_ramified_root: rep.ramified_root.is_some(),
            ramified_root: rep.ramified_root.unwrap_or(0),
        };
        Ok(())
    })
}

/// Full splitting report as JSON.
///
/// # Safety
/// `f` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_split_prime_json(
    f: *const CfField,
    p: u64,
    out: *mut *mut c_char,
) -> CfStatus {
    guard(|| {
        let k = field_ref(f)?;
        if out.is_null() {
            return Err(null());
        }
        let rep = split_prime(&k.inner, p).map_err(lift)?;
        write_string(out, serde_json::to_string(&rep).expect("serializes"))
    })
}

/// Layer report of `Q_{n,l}` as JSON; `cap` bounds the degree `l^n`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_layer_json(
    l: u64,
    n: u32,
    cap: usize,
    out: *mut *mut c_char,
) -> CfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let layer = build_layer(l, n, cap).map_err(lift)?;
        write_string(
            out,
            serde_json::to_string(&layer.report()).expect("serializes"),
        )
    })
}

/// Handle on the field `Q_{n,l}`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_layer_field(
    l: u64,
    n: u32,
    cap: usize,
    out: *mut *mut CfField,
) -> CfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let layer = build_layer(l, n, cap).map_err(lift)?;
        emit_field(out, layer.field.clone());
        Ok(())
    })
}

/// S-unit equation report (JSON) over the box `[-height, height]^m`.
///
/// # Safety
/// `f` must be a live handle; `s` must point to `s_len` primes (or be null
/// with `s_len = 0`); `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_sunit_json(
    f: *const CfField,
    s: *const u64,
    s_len: usize,
    height: u32,
    out: *mut *mut c_char,
) -> CfStatus {
    guard(|| {
        let k = field_ref(f)?;
        if out.is_null() || (s.is_null() && s_len > 0) {
            return Err(null());
        }
        let primes = if s_len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(s, s_len)
        };
        let cfg = SUnitConfig::new(&k.inner, primes, height).map_err(lift)?;
        let sols = solve_sunit_equation(&cfg).map_err(lift)?;
        write_string(out, SUnitReport::new(&cfg, &sols).to_json())
    })
}

fn req_err(msg: impl Into<String>) -> (CfStatus, String) {
    (CfStatus::Parse, msg.into())
}

fn scenario_from_json(v: &Value) -> Result<Scenario, (CfStatus, String)> {
    let mut sc = Scenario::new();
    match v.get("field") {
        None | Some(Value::Null) => {}
        Some(Value::String(s)) if s == "Q" => sc = sc.with_field(&NumberField::rationals()),
        Some(Value::Array(a)) => {
            let c: Option<Vec<i64>> = a.iter().map(Value::as_i64).collect();
            let c = c.ok_or_else(|| req_err("field must be an array of integers"))?;
            sc = sc.with_field(&make_field_i64(&c).map_err(lift)?);
        }
        Some(_) => return Err(req_err("field must be \"Q\" or an array of integers")),
    }
    let uint = |key: &str| -> Result<Option<u64>, (CfStatus, String)> {
        match v.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(x) => x
                .as_u64()
                .map(Some)
                .ok_or_else(|| req_err(format!("{key} must be a nonnegative integer"))),
        }
    };
    sc.l = uint("l")?;
    sc.n = uint("n")?.map(|n| n as u32);
    sc.d = uint("d")?;
    let desc = |key: &str| -> Result<Option<CoeffDescriptor>, (CfStatus, String)> {
        match v.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => s.parse().map(Some).map_err(lift),
            Some(_) => Err(req_err(format!("{key} must be a \"u,r,s\" string"))),
        }
    };
    match (desc("A")?, desc("B")?, desc("C")?) {
        (Some(a), Some(b), Some(c)) => sc = sc.with_coeffs(a, b, c),
        (None, None, None) => {}
        _ => return Err((CfStatus::MissingInput, "give all of A, B, C or none".into())),
    }
    if let Some(h) = v.get("h_plus").and_then(Value::as_str) {
        sc = sc.with_h_plus(h.parse::<HPlus>().map_err(lift)?);
    }
    Ok(sc)
}

/// Evaluates a checklist described by a JSON request and returns the
/// certificate JSON. Request keys: `theorem` (`aflt-layers`, `gfe-layers`,
/// `gfe-K-2d`, `gfe-Q-2d`, `prop-bound`), optional `field` (`"Q"` or an
/// integer array), `l`, `n`, `d`, `A`, `B`, `C` (`"u,r,s"`), `h_plus`
/// (`"odd:<source>"` or `"even:<source>"`).
///
/// # Safety
/// `request` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_verify_json(request: *const c_char, out: *mut *mut c_char) -> CfStatus {
    guard(|| {
        let text = read_str(request)?;
        if out.is_null() {
            return Err(null());
        }
        let v: Value = serde_json::from_str(text).map_err(|e| req_err(e.to_string()))?;
        let sc = scenario_from_json(&v)?;
        let theorem = v
            .get("theorem")
            .and_then(Value::as_str)
            .ok_or_else(|| req_err("missing theorem"))?;
        let cert = match theorem {
            "aflt-layers" => check_theorem_aflt_layers(&sc),
            "gfe-layers" => check_theorem_gfe_layers(&sc),
            "gfe-K-2d" => check_theorem_gfe_k_2d(&sc),
            "gfe-Q-2d" => check_theorem_gfe_q_layers_2d(&sc),
            "prop-bound" => check_prop_bound(&sc),
            other => return Err(req_err(format!("unknown theorem {other:?}"))),
        }
        .map_err(lift)?;
        write_string(out, cert.to_json())
    })
}
