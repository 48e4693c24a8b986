//! Rendering, parsing, and result caching. All numbers cross the JSON
//! boundary as decimal strings so arbitrary-precision values survive
//! interchange; rationals are rendered as reduced "num/den" (or "num"
//! for integers).

use crate::claims::ClaimReport;
use crate::classify::{DensityBracket, LevelRow, LevelTable, McResult};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::PathBuf;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed number: {0}")]
    BadNumber(String),
    #[error("malformed csv: {0}")]
    BadCsv(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_from_string(s: &str) -> Result<BigRational, ReportError> {
    let bad = || ReportError::BadNumber(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

// ---------------------------------------------------------------------------
// JSON mirrors with string numbers

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RowJson {
    pub k: u32,
    pub irreducible: String,
    pub ambiguous: String,
    pub hensel: String,
    pub parents: String,
    pub irreducible_reasons: [String; 3],
    pub hensel_reasons: [String; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TableJson {
    pub p: String,
    pub degree: u32,
    pub truncated: bool,
    pub rows: Vec<RowJson>,
}

fn u64s(v: u64) -> String {
    v.to_string()
}

fn u64p(s: &str) -> Result<u64, ReportError> {
    s.parse().map_err(|_| ReportError::BadNumber(s.to_string()))
}

impl From<&LevelTable> for TableJson {
    fn from(t: &LevelTable) -> Self {
        TableJson {
            p: u64s(t.p),
            degree: t.degree,
            truncated: t.truncated,
            rows: t
                .rows
                .iter()
                .map(|r| RowJson {
                    k: r.k,
                    irreducible: u64s(r.irreducible),
                    ambiguous: u64s(r.ambiguous),
                    hensel: u64s(r.hensel),
                    parents: u64s(r.parents),
                    irreducible_reasons: r.irreducible_reasons.map(u64s),
                    hensel_reasons: r.hensel_reasons.map(u64s),
                })
                .collect(),
        }
    }
}

impl TryFrom<&TableJson> for LevelTable {
    type Error = ReportError;
    fn try_from(t: &TableJson) -> Result<Self, ReportError> {
        let arr = |a: &[String; 3]| -> Result<[u64; 3], ReportError> {
            Ok([u64p(&a[0])?, u64p(&a[1])?, u64p(&a[2])?])
        };
        Ok(LevelTable {
            p: u64p(&t.p)?,
            degree: t.degree,
            truncated: t.truncated,
            rows: t
                .rows
                .iter()
                .map(|r| {
                    Ok(LevelRow {
                        k: r.k,
                        irreducible: u64p(&r.irreducible)?,
                        ambiguous: u64p(&r.ambiguous)?,
                        hensel: u64p(&r.hensel)?,
                        parents: u64p(&r.parents)?,
                        irreducible_reasons: arr(&r.irreducible_reasons)?,
                        hensel_reasons: arr(&r.hensel_reasons)?,
                    })
                })
                .collect::<Result<_, ReportError>>()?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BracketJson {
    pub lower: String,
    pub upper: String,
    pub width: String,
    pub level_reached: u32,
    pub dropped: String,
}

impl From<&DensityBracket> for BracketJson {
    fn from(b: &DensityBracket) -> Self {
        BracketJson {
            lower: rational_to_string(&b.lower),
            upper: rational_to_string(&b.upper),
            width: rational_to_string(&b.width()),
            level_reached: b.level_reached,
            dropped: rational_to_string(&b.dropped),
        }
    }
}

impl TryFrom<&BracketJson> for DensityBracket {
    type Error = ReportError;
    fn try_from(b: &BracketJson) -> Result<Self, ReportError> {
        Ok(DensityBracket {
            lower: rational_from_string(&b.lower)?,
            upper: rational_from_string(&b.upper)?,
            level_reached: b.level_reached,
            dropped: rational_from_string(&b.dropped)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CountJson {
    pub label: String,
    pub expected: String,
    pub enumerated: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ClaimReportJson {
    pub claim: String,
    pub grid: String,
    pub checks: String,
    pub counts: Vec<CountJson>,
    pub counterexamples: Vec<String>,
    pub passed: bool,
}

impl From<&ClaimReport> for ClaimReportJson {
    fn from(r: &ClaimReport) -> Self {
        ClaimReportJson {
            claim: r.claim.clone(),
            grid: r.grid.clone(),
            checks: u64s(r.checks),
            counts: r
                .counts
                .iter()
                .map(|c| CountJson {
                    label: c.label.clone(),
                    expected: u64s(c.expected),
                    enumerated: u64s(c.enumerated),
                })
                .collect(),
            counterexamples: r.counterexamples.clone(),
            passed: r.passed(),
        }
    }
}

impl TryFrom<&ClaimReportJson> for ClaimReport {
    type Error = ReportError;
    fn try_from(r: &ClaimReportJson) -> Result<Self, ReportError> {
        Ok(ClaimReport {
            claim: r.claim.clone(),
            grid: r.grid.clone(),
            checks: u64p(&r.checks)?,
            counts: r
                .counts
                .iter()
                .map(|c| {
                    Ok(crate::claims::CountComparison {
                        label: c.label.clone(),
                        expected: u64p(&c.expected)?,
                        enumerated: u64p(&c.enumerated)?,
                    })
                })
                .collect::<Result<_, ReportError>>()?,
            counterexamples: r.counterexamples.clone(),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct McJson {
    pub samples: String,
    pub decided: String,
    pub irreducible: String,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub undecided_fraction: f64,
}

impl From<&McResult> for McJson {
    fn from(r: &McResult) -> Self {
        McJson {
            samples: u64s(r.samples),
            decided: u64s(r.decided),
            irreducible: u64s(r.irreducible),
            estimate: r.estimate,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
            undecided_fraction: r.undecided_fraction,
        }
    }
}

/// Top-level payload: `{schema_version, command, params, result, provenance}`.
/// Deliberately free of timestamps so identical runs are byte-identical.
pub fn envelope(
    command: &str,
    params: serde_json::Value,
    result: serde_json::Value,
) -> serde_json::Value {
    serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params": params,
        "result": result,
        "provenance": {
            "artifact": "padic-irred",
            "artifact_version": ARTIFACT_VERSION,
        },
    })
}

// ---------------------------------------------------------------------------
// CSV

pub const CSV_HEADER: &str = "k,irreducible,ambiguous,hensel";
pub const CSV_HEADER_PER_PARENT: &str =
    "k,irreducible,ambiguous,hensel,per_parent_irreducible,per_parent_ambiguous,per_parent_hensel";

/// One parsed CSV row; the per-parent triple is present only when the
/// extended header was used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvRow {
    pub k: u32,
    pub irreducible: u64,
    pub ambiguous: u64,
    pub hensel: u64,
    pub per_parent: Option<(u64, u64, u64)>,
}

/// Renders the table; emits the per-parent columns when requested and
/// every row normalizes exactly.
pub fn render_table_csv(t: &LevelTable, per_parent: bool) -> String {
    let pp = if per_parent { t.per_parent() } else { None };
    let mut out = String::new();
    match &pp {
        Some(_) => out.push_str(CSV_HEADER_PER_PARENT),
        None => out.push_str(CSV_HEADER),
    }
    out.push('\n');
    for (i, r) in t.rows.iter().enumerate() {
        write!(out, "{},{},{},{}", r.k, r.irreducible, r.ambiguous, r.hensel).unwrap();
        if let Some(pp) = &pp {
            let (_, a, b, c) = pp[i];
            write!(out, ",{a},{b},{c}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_table_csv(s: &str) -> Result<Vec<CsvRow>, ReportError> {
    let mut lines = s.lines();
    let header = lines.next().ok_or_else(|| ReportError::BadCsv("empty".into()))?;
    let per_parent = match header {
        CSV_HEADER => false,
        CSV_HEADER_PER_PARENT => true,
        other => return Err(ReportError::BadCsv(format!("unknown header {other:?}"))),
    };
    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != if per_parent { 7 } else { 4 } {
            return Err(ReportError::BadCsv(format!("bad row {line:?}")));
        }
        rows.push(CsvRow {
            k: f[0].parse().map_err(|_| ReportError::BadCsv(line.into()))?,
            irreducible: u64p(f[1])?,
            ambiguous: u64p(f[2])?,
            hensel: u64p(f[3])?,
            per_parent: if per_parent {
                Some((u64p(f[4])?, u64p(f[5])?, u64p(f[6])?))
            } else {
                None
            },
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// result cache

/// Content-addressed cache of rendered payloads, one file per key, in
/// `PADIC_CACHE_DIR` (default `.padic-cache`). Writes go through a
/// temporary file and an atomic rename.
pub struct Cache {
    dir: PathBuf,
    enabled: bool,
}

impl Cache {
    pub fn new(no_cache: bool) -> Self {
        let dir = std::env::var_os("PADIC_CACHE_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".padic-cache"));
        Cache {
            dir,
            enabled: !no_cache,
        }
    }

    pub fn key(command: &str, params: &serde_json::Value, format: &str) -> String {
        let mut h = Sha256::new();
        h.update(ARTIFACT_VERSION.as_bytes());
        h.update([0]);
        h.update(command.as_bytes());
        h.update([0]);
        h.update(params.to_string().as_bytes());
        h.update([0]);
        h.update(format.as_bytes());
        let digest = h.finalize();
        let mut key = String::with_capacity(64);
        for b in digest {
            write!(key, "{b:02x}").unwrap();
        }
        key
    }

    pub fn get(&self, key: &str) -> Option<String> {
        if !self.enabled {
            return None;
        }
        std::fs::read_to_string(self.dir.join(key)).ok()
    }

    pub fn put(&self, key: &str, payload: &str) {
        if !self.enabled {
            return;
        }
        // cache writes are best-effort; failures never fail the command
        let _ = std::fs::create_dir_all(&self.dir);
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        if std::fs::write(&tmp, payload).is_ok() {
            let _ = std::fs::rename(&tmp, self.dir.join(key));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qrat::rat;

    #[test]
    fn rational_strings_round_trip() {
        for r in [rat(7, 12), rat(-3, 5), rat(4, 1), rat(0, 9)] {
            assert_eq!(rational_from_string(&rational_to_string(&r)).unwrap(), r);
        }
        assert!(rational_from_string("1/0").is_err());
        assert!(rational_from_string("x").is_err());
    }

    fn sample_table() -> LevelTable {
        LevelTable {
            p: 5,
            degree: 3,
            truncated: false,
            rows: vec![LevelRow {
                k: 1,
                irreducible: 8,
                ambiguous: 1,
                hensel: 16,
                parents: 1,
                irreducible_reasons: [8, 0, 0],
                hensel_reasons: [16, 0, 0],
            }],
        }
    }

    #[test]
    fn table_json_round_trip() {
        let t = sample_table();
        let j = serde_json::to_string(&TableJson::from(&t)).unwrap();
        let back: TableJson = serde_json::from_str(&j).unwrap();
        assert_eq!(LevelTable::try_from(&back).unwrap(), t);
    }

    #[test]
    fn table_csv_round_trip() {
        let t = sample_table();
        for pp in [false, true] {
            let csv = render_table_csv(&t, pp);
            let rows = parse_table_csv(&csv).unwrap();
            assert_eq!(rows.len(), 1);
            assert_eq!(
                (rows[0].k, rows[0].irreducible, rows[0].ambiguous, rows[0].hensel),
                (1, 8, 1, 16)
            );
            assert_eq!(rows[0].per_parent.is_some(), pp);
        }
        assert!(parse_table_csv("nope\n1,2,3,4\n").is_err());
    }

    #[test]
    fn bracket_json_round_trip() {
        let b = DensityBracket {
            lower: rat(1, 3),
            upper: rat(2, 3),
            level_reached: 7,
            dropped: rat(0, 1),
        };
        let j = serde_json::to_string(&BracketJson::from(&b)).unwrap();
        let back: BracketJson = serde_json::from_str(&j).unwrap();
        assert_eq!(DensityBracket::try_from(&back).unwrap(), b);
    }

    #[test]
    fn claim_report_json_round_trip() {
        let r = ClaimReport {
            claim: "demo".into(),
            grid: "p=3".into(),
            checks: 10,
            counts: vec![crate::claims::CountComparison {
                label: "x".into(),
                expected: 9,
                enumerated: 9,
            }],
            counterexamples: vec![],
        };
        let j = serde_json::to_string(&ClaimReportJson::from(&r)).unwrap();
        let back: ClaimReportJson = serde_json::from_str(&j).unwrap();
        assert_eq!(ClaimReport::try_from(&back).unwrap(), r);
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("padic-cache-test-{}", std::process::id()));
        std::env::set_var("PADIC_CACHE_DIR", &dir);
        let cache = Cache::new(false);
        let key = Cache::key("table", &serde_json::json!({"p": "5"}), "csv");
        assert_eq!(key.len(), 64);
        assert!(cache.get(&key).is_none());
        cache.put(&key, "payload");
        assert_eq!(cache.get(&key).as_deref(), Some("payload"));
        let disabled = Cache::new(true);
        assert!(disabled.get(&key).is_none());
        std::env::remove_var("PADIC_CACHE_DIR");
        let _ = std::fs::remove_dir_all(&dir);
    }
}
