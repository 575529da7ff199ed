use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::Path;
use std::process::Command;
use std::ptr;

use cyclofermat_ffi::*;

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    cf_string_free(s);
    out
}

fn last_error() -> String {
    unsafe {
        CStr::from_ptr(cf_last_error())
            .to_str()
            .unwrap()
            .to_string()
    }
}

#[test]
fn version_and_primes() {
    let v = unsafe { CStr::from_ptr(cf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let mut b = false;
    unsafe {
        assert_eq!(cf_is_prime(1093, &mut b), CfStatus::Ok);
        assert!(b);
        assert_eq!(cf_is_prime(1001, &mut b), CfStatus::Ok);
        assert!(!b);
        assert_eq!(cf_is_prime(7, ptr::null_mut()), CfStatus::NullPointer);
    }
    assert!(!last_error().is_empty());
}

#[test]
fn wieferich() {
    let (mut pair, mut res) = (false, 0u64);
    unsafe {
        assert_eq!(
            cf_wieferich_test(2, 1093, &mut pair, &mut res),
            CfStatus::Ok
        );
        assert!(pair);
        assert_eq!(res, 1);
        assert_eq!(cf_wieferich_test(2, 7, &mut pair, &mut res), CfStatus::Ok);
        assert!(!pair);
        assert_eq!(res, 15);
        assert_eq!(
            cf_wieferich_test(2, 9, &mut pair, &mut res),
            CfStatus::Domain
        );
        let mut s = ptr::null_mut();
        assert_eq!(cf_wieferich_scan_json(2, 3, 100_000, &mut s), CfStatus::Ok);
        assert_eq!(take(s), "[1093,3511]");
        assert_eq!(cf_wieferich_scan_json(2, 10, 5, &mut s), CfStatus::Domain);
    }
}

#[test]
fn field_handles_and_splitting() {
    unsafe {
        let mut k = ptr::null_mut();
        let c = [1i64, -2, -1, 1];
        assert_eq!(cf_field_new(c.as_ptr(), c.len(), &mut k), CfStatus::Ok);
        let mut m = 0usize;
        assert_eq!(cf_field_degree(k, &mut m), CfStatus::Ok);
        assert_eq!(m, 3);
        let mut sp = CfSplit {
            classification: CfClassification::Other,
            index_caveat: true,
            has_ramified_root: false,
            ramified_root: 0,
        };
        assert_eq!(cf_split_prime(k, 2, &mut sp), CfStatus::Ok);
        assert_eq!(sp.classification, CfClassification::Inert);
        assert!(!sp.index_caveat);
        assert_eq!(cf_split_prime(k, 7, &mut sp), CfStatus::Ok);
        assert_eq!(sp.classification, CfClassification::TotallyRamified);
        assert!(sp.has_ramified_root);
        assert_eq!(sp.ramified_root, 5);
        let mut s = ptr::null_mut();
        assert_eq!(cf_split_prime_json(k, 7, &mut s), CfStatus::Ok);
        assert!(take(s).contains("totally_ramified"));
        assert_eq!(cf_split_prime(k, 4, &mut sp), CfStatus::Domain);
        assert_eq!(cf_field_poly_json(k, &mut s), CfStatus::Ok);
        assert_eq!(take(s), r#"["1","-2","-1","1"]"#);
        cf_field_free(k);

        let bad = [-1i64, 0, 1];
        let mut k2 = ptr::null_mut();
        assert_eq!(
            cf_field_new(bad.as_ptr(), bad.len(), &mut k2),
            CfStatus::Reducible
        );
        assert!(k2.is_null());
        assert!(last_error().contains("reducible"));

        let spec = CString::new("# cubic\ncoeffs = 1, -2, -1, 1\n").unwrap();
        assert_eq!(cf_field_from_spec(spec.as_ptr(), &mut k2), CfStatus::Ok);
        assert_eq!(cf_field_degree(k2, &mut m), CfStatus::Ok);
        assert_eq!(m, 3);
        cf_field_free(k2);
        let q = CString::new("Q").unwrap();
        assert_eq!(cf_field_from_spec(q.as_ptr(), &mut k2), CfStatus::Ok);
        assert_eq!(cf_field_degree(k2, &mut m), CfStatus::Ok);
        assert_eq!(m, 1);
        cf_field_free(k2);
        let junk = CString::new("coeffs = 1, x").unwrap();
        assert_eq!(cf_field_from_spec(junk.as_ptr(), &mut k2), CfStatus::Parse);
        cf_field_free(ptr::null_mut());
        assert_eq!(cf_field_degree(ptr::null(), &mut m), CfStatus::NullPointer);
    }
}

#[test]
fn layers() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(cf_layer_json(3, 1, 25, &mut s), CfStatus::Ok);
        let text = take(s);
        assert!(text.contains(r#""minpoly":["1","-3","0","1"]"#), "{text}");
        assert_eq!(cf_layer_json(7, 2, 25, &mut s), CfStatus::DegreeCap);
        assert_eq!(cf_layer_json(4, 1, 25, &mut s), CfStatus::Domain);
        let mut k = ptr::null_mut();
        assert_eq!(cf_layer_field(5, 1, 25, &mut k), CfStatus::Ok);
        let mut m = 0;
        assert_eq!(cf_field_degree(k, &mut m), CfStatus::Ok);
        assert_eq!(m, 5);
        cf_field_free(k);
    }
}

#[test]
fn sunit_report() {
    unsafe {
        let q = CString::new("Q").unwrap();
        let mut k = ptr::null_mut();
        assert_eq!(cf_field_from_spec(q.as_ptr(), &mut k), CfStatus::Ok);
        let s = [2u64];
        let mut out = ptr::null_mut();
        assert_eq!(cf_sunit_json(k, s.as_ptr(), 1, 8, &mut out), CfStatus::Ok);
        let text = take(out);
        assert!(text.contains(r#""count": 3"#), "{text}");
        assert_eq!(cf_sunit_json(k, ptr::null(), 0, 8, &mut out), CfStatus::Ok);
        assert!(take(out).contains(r#""count": 0"#));
        let four = [4u64];
        assert_eq!(
            cf_sunit_json(k, four.as_ptr(), 1, 8, &mut out),
            CfStatus::Domain
        );
        cf_field_free(k);
    }
}

#[test]
fn verify_requests() {
    let req = CString::new(
        r#"{"theorem":"gfe-Q-2d","l":7,"n":1,"d":5,"A":"1,0,0","B":"-1,1,1","C":"1,4,2","h_plus":"odd:table"}"#,
    )
    .unwrap();
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(cf_verify_json(req.as_ptr(), &mut out), CfStatus::Ok);
        let cert = take(out);
        assert!(cert.contains("\"T_GFE_Q_layers_2d\""));
        assert!(!cert.contains("\"conclusion\": \"not applicable\""));

        let no_h = CString::new(
            r#"{"theorem":"gfe-Q-2d","l":7,"n":1,"d":5,"A":"1,0,0","B":"-1,1,1","C":"1,4,2"}"#,
        )
        .unwrap();
        assert_eq!(
            cf_verify_json(no_h.as_ptr(), &mut out),
            CfStatus::MissingInput
        );
        assert!(last_error().contains("h-plus"));

        let wrong = CString::new(
            r#"{"theorem":"gfe-layers","field":"Q","l":5,"n":1,"A":"1,0,1","B":"1,0,0","C":"1,0,0"}"#,
        )
        .unwrap();
        assert_eq!(
            cf_verify_json(wrong.as_ptr(), &mut out),
            CfStatus::WrongTheorem
        );

        let aflt =
            CString::new(r#"{"theorem":"aflt-layers","field":[1,-2,-1,1],"l":5,"n":1}"#).unwrap();
        assert_eq!(cf_verify_json(aflt.as_ptr(), &mut out), CfStatus::Ok);
        assert!(take(out).contains("\"conclusion\": \"not applicable\""));

        let junk = CString::new("{not json").unwrap();
        assert_eq!(cf_verify_json(junk.as_ptr(), &mut out), CfStatus::Parse);
        assert_eq!(cf_verify_json(ptr::null(), &mut out), CfStatus::NullPointer);
    }
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cyclofermat.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build.rs");
    for name in [
        "cf_field_new",
        "cf_verify_json",
        "cf_string_free",
        "CF_STATUS_OK",
        "typedef struct CfField CfField",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-std=c99", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler found; syntax check skipped");
        return;
    };
    assert!(status.success());
}
