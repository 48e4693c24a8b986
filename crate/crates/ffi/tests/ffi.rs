//! Exercises the C ABI through the exported symbols, including status
//! codes, JSON payloads, and handle lifecycle.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use padic_irred_ffi::*;

fn take(out: *mut c_char) -> serde_json::Value {
    assert!(!out.is_null());
    let v = serde_json::from_str(unsafe { CStr::from_ptr(out) }.to_str().unwrap()).unwrap();
    padic_string_free(out);
    v
}

#[test]
fn density_prime_degree_ok() {
    let kind = CString::new("prime-degree").unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    let status = padic_density(kind.as_ptr(), 5, 2, &mut out);
    assert_eq!(status, PADIC_OK);
    let v = take(out);
    assert_eq!(v["result"]["value"], "7/12");
    assert_eq!(v["command"], "density");
}

#[test]
fn density_error_codes() {
    let kind = CString::new("prime-degree").unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    // r = p is outside the theorem
    assert_eq!(padic_density(kind.as_ptr(), 3, 3, &mut out), PADIC_HYPOTHESIS);
    // composite degree
    assert_eq!(padic_density(kind.as_ptr(), 5, 6, &mut out), PADIC_USAGE);
    // unknown kind
    let bad = CString::new("septic").unwrap();
    assert_eq!(padic_density(bad.as_ptr(), 5, 0, &mut out), PADIC_USAGE);
    // null kind
    assert_eq!(padic_density(ptr::null(), 5, 2, &mut out), PADIC_USAGE);
}

#[test]
fn table_matches_known_rows() {
    let mut out: *mut c_char = ptr::null_mut();
    let status = padic_table(5, 3, ptr::null(), 3, 0, &mut out);
    assert_eq!(status, PADIC_OK);
    let v = take(out);
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows[0]["irreducible"], "8");
    assert_eq!(rows[0]["ambiguous"], "1");
    assert_eq!(rows[0]["hensel"], "16");
    assert_eq!(rows[2]["hensel"], "100");
}

#[test]
fn table_class_and_resource_limit() {
    let class = CString::new("(x^2+2)^2").unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    let status = padic_table(5, 0, class.as_ptr(), 2, 0, &mut out);
    assert_eq!(status, PADIC_OK);
    let v = take(out);
    assert_eq!(v["result"]["rows"][1]["irreducible"], "120");

    assert_eq!(
        padic_table(5, 4, ptr::null(), 7, 10, &mut out),
        PADIC_RESOURCE
    );
    // degree conflicting with the class is a usage error
    assert_eq!(
        padic_table(5, 3, class.as_ptr(), 2, 0, &mut out),
        PADIC_USAGE
    );
}

#[test]
fn bracket_contains_closed_form() {
    let mut out: *mut c_char = ptr::null_mut();
    let status = padic_bracket(5, 2, ptr::null(), 4, false, 0, &mut out);
    assert_eq!(status, PADIC_OK);
    let v = take(out);
    assert_eq!(v["result"]["lower"], "364/625");
    assert_eq!(v["result"]["upper"], "73/125");
}

#[test]
fn verify_claims_named() {
    let claim = CString::new("claim-2").unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    let status = padic_verify_claims(3, claim.as_ptr(), &mut out);
    assert_eq!(status, PADIC_OK);
    let v = take(out);
    assert_eq!(v["result"][0]["passed"], true);

    let bogus = CString::new("claim-9").unwrap();
    assert_eq!(padic_verify_claims(3, bogus.as_ptr(), &mut out), PADIC_USAGE);
}

#[test]
fn mc_runs() {
    let mut out: *mut c_char = ptr::null_mut();
    let status = padic_mc(5, 2, ptr::null(), 1000, 7, 8, &mut out);
    assert_eq!(status, PADIC_OK);
    let v = take(out);
    assert_eq!(v["result"]["samples"], "1000");
    // N = 0 is rejected
    assert_eq!(padic_mc(5, 2, ptr::null(), 0, 7, 8, &mut out), PADIC_USAGE);
}

#[test]
fn poly_handle_lifecycle() {
    // x^3 + x + 1 mod 5^2: irreducible mod 5
    let coeffs = [1u64, 1, 0, 1];
    let h = padic_poly_new(5, 2, coeffs.as_ptr(), coeffs.len());
    assert!(!h.is_null());
    let mut out: *mut c_char = ptr::null_mut();
    assert_eq!(padic_poly_classify(h, &mut out), PADIC_OK);
    let v = take(out);
    assert_eq!(v["result"]["label"], "CertIrreducible");
    padic_poly_free(h);

    // x^2 - 1 mod 3: splits, witness recorded
    let coeffs = [2u64, 0, 1];
    let h = padic_poly_new(3, 1, coeffs.as_ptr(), coeffs.len());
    assert!(!h.is_null());
    assert_eq!(padic_poly_classify(h, &mut out), PADIC_OK);
    let v = take(out);
    assert_eq!(v["result"]["label"], "CertReducible");
    assert!(v["result"]["witness"].is_array());
    padic_poly_free(h);

    // invalid handles: non-monic, nonzero trace, p = 2, null coeffs
    assert!(padic_poly_new(5, 2, [1u64, 0, 2].as_ptr(), 3).is_null());
    assert!(padic_poly_new(5, 2, [1u64, 1, 1].as_ptr(), 3).is_null());
    assert!(padic_poly_new(2, 2, [1u64, 0, 1].as_ptr(), 3).is_null());
    assert!(padic_poly_new(5, 2, ptr::null(), 3).is_null());
    // frees tolerate null
    padic_poly_free(ptr::null_mut());
    padic_string_free(ptr::null_mut());
}
