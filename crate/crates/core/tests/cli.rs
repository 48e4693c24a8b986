//! End-to-end checks of the `padic` binary: output formats, exit codes,
//! and cache byte-identity.

use std::process::{Command, Output};

fn padic(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_padic"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn padic")
}

#[test]
fn table_1_csv() {
    let out = padic(
        &[
            "table", "--p", "5", "--degree", "3", "--trace-zero", "--kmax", "3", "--format", "csv",
            "--no-cache",
        ],
        &[],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,irreducible,ambiguous,hensel");
    assert_eq!(lines[1], "1,8,1,16");
    assert_eq!(lines[2], "2,20,5,0");
    assert_eq!(lines[3], "3,20,5,100");
}

#[test]
fn class_table_per_parent_csv() {
    let out = padic(
        &[
            "table",
            "--p",
            "5",
            "--class",
            "(x^2+2)^2",
            "--kmax",
            "3",
            "--format",
            "csv",
            "--no-cache",
        ],
        &[],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "k,irreducible,ambiguous,hensel,per_parent_irreducible,per_parent_ambiguous,per_parent_hensel"
    );
    assert_eq!(lines[1], "1,0,1,0,0,1,0");
    assert_eq!(lines[2], "2,120,5,0,120,5,0");
    assert_eq!(lines[3], "3,300,25,300,60,5,60");
}

#[test]
fn density_json_value() {
    let out = padic(
        &[
            "density",
            "--p",
            "5",
            "--prime-degree",
            "2",
            "--no-cache",
        ],
        &[],
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["value"], "7/12");
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn cache_byte_identity() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = [
        "bracket", "--p", "5", "--degree", "2", "--kmax", "4",
    ];
    let cold = padic(&args, &[("PADIC_CACHE_DIR", cache)]);
    assert!(cold.status.success());
    let warm = padic(&args, &[("PADIC_CACHE_DIR", cache)]);
    assert!(warm.status.success());
    assert_eq!(cold.stdout, warm.stdout, "cache replay must be byte-identical");
    let mut nocache_args = args.to_vec();
    nocache_args.push("--no-cache");
    let fresh = padic(&nocache_args, &[("PADIC_CACHE_DIR", cache)]);
    assert!(fresh.status.success());
    assert_eq!(cold.stdout, fresh.stdout, "cached and fresh output must agree");
    // something was actually written to the cache directory
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_some());
}

#[test]
fn exit_codes() {
    // usage error: p must be an odd prime
    let out = padic(
        &["table", "--p", "2", "--degree", "3", "--kmax", "2", "--no-cache"],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));

    // hypothesis violation: r = p is outside the theorem
    let out = padic(&["density", "--p", "3", "--prime-degree", "3", "--no-cache"], &[]);
    assert_eq!(out.status.code(), Some(2));

    // resource limit
    let out = padic(
        &[
            "table",
            "--p",
            "5",
            "--degree",
            "4",
            "--kmax",
            "7",
            "--work-limit",
            "10",
            "--no-cache",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(3));

    // malformed class expression
    let out = padic(
        &["table", "--p", "5", "--class", "x^2+bogus", "--kmax", "2", "--no-cache"],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));

    // help is not an error
    let out = padic(&["--help"], &[]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_claims_single() {
    let out = padic(&["verify-claims", "--p", "3", "--claim", "claim-2", "--no-cache"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"][0]["passed"], true);
    assert_eq!(v["result"][0]["counterexamples"], serde_json::json!([]));
}
