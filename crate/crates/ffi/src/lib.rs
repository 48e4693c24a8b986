//! C ABI over the classification and density library. Every result-
//! bearing call writes a heap-allocated JSON document (the same envelope
//! the CLI prints) to `out_json`; release it with `padic_string_free`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use padic_irred::claims::{run_named_claim, ALL_CLAIM_NAMES};
use padic_irred::classify::{
    classify_residue, density_bracket, lift_table, mc_estimate, parse_class, ClassSpec,
    ClassifyError, Restriction, DEFAULT_WORK_LIMIT,
};
use padic_irred::closedform::{
    density_double_quadratic, density_prime_degree, density_quartic, density_slope_half,
};
use padic_irred::newton::ResiduePoly;
use padic_irred::report::{envelope, rational_to_string, BracketJson, ClaimReportJson, McJson, TableJson};
use padic_irred::ring::{Modulus, PrimeModulus};

/// Success.
pub const PADIC_OK: i32 = 0;
/// Malformed arguments (bad prime, class expression, null pointer).
pub const PADIC_USAGE: i32 = 1;
/// Parameters outside a theorem's hypotheses.
pub const PADIC_HYPOTHESIS: i32 = 2;
/// Work limit reached before the requested level.
pub const PADIC_RESOURCE: i32 = 3;
/// A verifier found a counterexample (the JSON is still written).
pub const PADIC_COUNTEREXAMPLE: i32 = 4;
/// Internal panic; no output was written.
pub const PADIC_INTERNAL: i32 = 5;

fn write_out(out_json: *mut *mut c_char, payload: String) -> i32 {
    if out_json.is_null() {
        return PADIC_USAGE;
    }
    match CString::new(payload) {
        Ok(s) => {
            unsafe { *out_json = s.into_raw() };
            PADIC_OK
        }
        Err(_) => PADIC_INTERNAL,
    }
}

fn opt_str(s: *const c_char) -> Result<Option<String>, i32> {
    if s.is_null() {
        return Ok(None);
    }
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map(|v| Some(v.to_owned()))
        .map_err(|_| PADIC_USAGE)
}

fn build_spec(p: u64, degree: u32, class: &Option<String>) -> Result<ClassSpec, i32> {
    let (class_degree, restriction) = match class {
        Some(s) => {
            let (d, r) = parse_class(s, p).map_err(|_| PADIC_USAGE)?;
            (Some(d), r)
        }
        None => (None, Restriction::All),
    };
    let degree = match (degree, class_degree) {
        (0, Some(cd)) => cd,
        (0, None) => return Err(PADIC_USAGE),
        (d, Some(cd)) if d != cd => return Err(PADIC_USAGE),
        (d, _) => d,
    };
    let spec = ClassSpec {
        p,
        degree,
        restriction,
    };
    spec.validate().map_err(|_| PADIC_USAGE)?;
    Ok(spec)
}

fn spec_params(spec: &ClassSpec, class: &Option<String>) -> serde_json::Value {
    serde_json::json!({
        "p": spec.p.to_string(),
        "degree": spec.degree,
        "class": class,
    })
}

fn guarded(out_json: *mut *mut c_char, f: impl FnOnce() -> Result<(String, i32), i32>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok((payload, status))) => {
            let w = write_out(out_json, payload);
            if w == PADIC_OK {
                status
            } else {
                w
            }
        }
        Ok(Err(code)) => code,
        Err(_) => PADIC_INTERNAL,
    }
}

/// Exact closed-form density. `kind` is one of "prime-degree" (degree
/// taken from `r`), "quartic", "double-quadratic", "slope-half".
#[no_mangle]
pub extern "C" fn padic_density(
    kind: *const c_char,
    p: u64,
    r: u64,
    out_json: *mut *mut c_char,
) -> i32 {
    guarded(out_json, || {
        let kind = opt_str(kind)?.ok_or(PADIC_USAGE)?;
        let value = match kind.as_str() {
            "prime-degree" => density_prime_degree(r, p),
            "quartic" => density_quartic(p),
            "double-quadratic" => density_double_quadratic(p),
            "slope-half" => density_slope_half(p),
            _ => return Err(PADIC_USAGE),
        }
        .map_err(|e| {
            use padic_irred::closedform::ClosedFormError::*;
            match e {
                CompositeDegree { .. } | PTwo => PADIC_USAGE,
                DegreeEqualsP { .. } => PADIC_HYPOTHESIS,
            }
        })?;
        let params = serde_json::json!({
            "p": p.to_string(),
            "kind": kind,
            "r": r.to_string(),
        });
        let result = serde_json::json!({
            "numerator": value.numer().to_string(),
            "denominator": value.denom().to_string(),
            "value": rational_to_string(&value),
        });
        let doc = serde_json::to_string_pretty(&envelope("density", params, result)).unwrap();
        Ok((doc, PADIC_OK))
    })
}

/// Level-by-level classification table. Pass `degree = 0` to take the
/// degree from `class_expr`; pass `work_limit = 0` for the default.
#[no_mangle]
pub extern "C" fn padic_table(
    p: u64,
    degree: u32,
    class_expr: *const c_char,
    kmax: u32,
    work_limit: u64,
    out_json: *mut *mut c_char,
) -> i32 {
    guarded(out_json, || {
        let class = opt_str(class_expr)?;
        let spec = build_spec(p, degree, &class)?;
        let limit = if work_limit == 0 {
            DEFAULT_WORK_LIMIT
        } else {
            work_limit
        };
        let table = lift_table(&spec, kmax, limit).map_err(|e| match e {
            ClassifyError::ResourceLimit { .. } => PADIC_RESOURCE,
            _ => PADIC_USAGE,
        })?;
        let result = serde_json::to_value(TableJson::from(&table)).unwrap();
        let doc = serde_json::to_string_pretty(&envelope(
            "table",
            spec_params(&spec, &class),
            result,
        ))
        .unwrap();
        Ok((doc, PADIC_OK))
    })
}

/// Exact density bracket from finite-level certificates.
#[no_mangle]
pub extern "C" fn padic_bracket(
    p: u64,
    degree: u32,
    class_expr: *const c_char,
    kmax: u32,
    quotient_by_s: bool,
    work_limit: u64,
    out_json: *mut *mut c_char,
) -> i32 {
    guarded(out_json, || {
        let class = opt_str(class_expr)?;
        let spec = build_spec(p, degree, &class)?;
        let limit = if work_limit == 0 {
            DEFAULT_WORK_LIMIT
        } else {
            work_limit
        };
        let bracket = density_bracket(&spec, kmax, quotient_by_s, limit).map_err(|e| match e {
            ClassifyError::ResourceLimit { .. } => PADIC_RESOURCE,
            _ => PADIC_USAGE,
        })?;
        let mut params = spec_params(&spec, &class);
        params["quotient_by_s"] = serde_json::json!(quotient_by_s);
        let result = serde_json::to_value(BracketJson::from(&bracket)).unwrap();
        let doc =
            serde_json::to_string_pretty(&envelope("bracket", params, result)).unwrap();
        Ok((doc, PADIC_OK))
    })
}

/// Runs one named verifier (`claim-1` .. `claim-6`, `case-counts`,
/// `table-2`) or, with a null `claim`, the whole desk-scale grid.
/// Returns PADIC_COUNTEREXAMPLE if any check fails; the JSON report is
/// written either way.
#[no_mangle]
pub extern "C" fn padic_verify_claims(
    p: u64,
    claim: *const c_char,
    out_json: *mut *mut c_char,
) -> i32 {
    guarded(out_json, || {
        let claim = opt_str(claim)?;
        let names: Vec<&str> = match &claim {
            Some(c) => vec![c.as_str()],
            None => ALL_CLAIM_NAMES.to_vec(),
        };
        let mut reports = Vec::new();
        for name in names {
            reports.append(&mut run_named_claim(name, p).map_err(|_| PADIC_USAGE)?);
        }
        let failed = reports.iter().any(|r| !r.passed());
        let params = serde_json::json!({
            "p": p.to_string(),
            "claim": claim,
            "all": claim.is_none(),
        });
        let result =
            serde_json::to_value(reports.iter().map(ClaimReportJson::from).collect::<Vec<_>>())
                .unwrap();
        let doc =
            serde_json::to_string_pretty(&envelope("verify-claims", params, result)).unwrap();
        Ok((doc, if failed { PADIC_COUNTEREXAMPLE } else { PADIC_OK }))
    })
}

/// Monte Carlo density diagnostic (statistical, non-certifying).
#[no_mangle]
pub extern "C" fn padic_mc(
    p: u64,
    degree: u32,
    class_expr: *const c_char,
    samples: u64,
    seed: u64,
    precision: u32,
    out_json: *mut *mut c_char,
) -> i32 {
    guarded(out_json, || {
        let class = opt_str(class_expr)?;
        let spec = build_spec(p, degree, &class)?;
        let mc = mc_estimate(&spec, precision, samples, seed).map_err(|_| PADIC_USAGE)?;
        let mut params = spec_params(&spec, &class);
        params["samples"] = serde_json::json!(samples.to_string());
        params["seed"] = serde_json::json!(seed.to_string());
        params["precision"] = serde_json::json!(precision);
        let result = serde_json::to_value(McJson::from(&mc)).unwrap();
        let doc = serde_json::to_string_pretty(&envelope("mc", params, result)).unwrap();
        Ok((doc, PADIC_OK))
    })
}

/// Opaque handle to one residue class of monic trace-zero polynomials.
pub struct PadicPoly {
    inner: ResiduePoly,
}

/// Builds a residue-class handle from the full ascending coefficient
/// vector (constant term first, leading 1 last) reduced mod p^level.
/// The x^{n-1} coefficient must be 0. Returns null on invalid input.
#[no_mangle]
pub extern "C" fn padic_poly_new(
    p: u64,
    level: u32,
    coeffs: *const u64,
    len: usize,
) -> *mut PadicPoly {
    let build = || -> Option<PadicPoly> {
        if coeffs.is_null() || len < 3 {
            return None;
        }
        let prime = PrimeModulus::new(p).ok()?;
        let m = Modulus::new(prime, level).ok()?;
        let c = unsafe { std::slice::from_raw_parts(coeffs, len) };
        let n = len - 1;
        if c[n] != 1 || c[n - 1] % m.pk() != 0 {
            return None;
        }
        let reduced: Vec<u64> = c[..n].iter().map(|&x| x % m.pk()).collect();
        Some(PadicPoly {
            inner: ResiduePoly::new(m, reduced, true),
        })
    };
    match catch_unwind(build) {
        Ok(Some(poly)) => Box::into_raw(Box::new(poly)),
        _ => ptr::null_mut(),
    }
}

/// Classifies the residue class; writes a JSON certificate with the
/// label, reason, and witness factor pair when one exists.
#[no_mangle]
pub extern "C" fn padic_poly_classify(poly: *const PadicPoly, out_json: *mut *mut c_char) -> i32 {
    guarded(out_json, || {
        if poly.is_null() {
            return Err(PADIC_USAGE);
        }
        let f = &unsafe { &*poly }.inner;
        let cert = classify_residue(f);
        let params = serde_json::json!({
            "p": f.modulus.p().to_string(),
            "level": f.modulus.level(),
            "coeffs": f.full_coeffs().iter().map(u64::to_string).collect::<Vec<_>>(),
        });
        let result = serde_json::json!({
            "label": format!("{:?}", cert.label),
            "reason": format!("{:?}", cert.reason),
            "witness": cert.witness.map(|(g, h)| {
                serde_json::json!([
                    g.iter().map(u64::to_string).collect::<Vec<_>>(),
                    h.iter().map(u64::to_string).collect::<Vec<_>>(),
                ])
            }),
        });
        let doc = serde_json::to_string_pretty(&envelope("classify", params, result)).unwrap();
        Ok((doc, PADIC_OK))
    })
}

/// Releases a handle from `padic_poly_new`. Null is a no-op.
#[no_mangle]
pub extern "C" fn padic_poly_free(poly: *mut PadicPoly) {
    if !poly.is_null() {
        drop(unsafe { Box::from_raw(poly) });
    }
}

/// Releases a string written by any `out_json` parameter. Null is a no-op.
#[no_mangle]
pub extern "C" fn padic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
