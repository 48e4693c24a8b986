//! Certificate engine: three-way classification of residue classes, the
//! factorization search at finite precision, the lifting enumerator behind
//! the level tables, and exact density brackets.

use crate::ffpoly::{factor_mod_p, FFPoly};
use crate::newton::{in_set_s, newton_polygon, polygon_classify, ClassLabel, ResiduePoly, Ternary};
use crate::qrat::p_pow;
use crate::ring::{ext_eval, sqrt_mod, Modulus, PrimeModulus, TruncatedValuation};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("work estimate exceeded the resource limit at level {level}")]
    ResourceLimit { level: u32, partial: LevelTable },
    #[error("invalid class spec: {0}")]
    BadSpec(String),
    #[error("mc_estimate requires at least one sample")]
    EmptySample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    ModPIrreducible,
    NoFactorizationAtPrecision,
    PolygonTwoPoint,
    CoprimeModP,
    RootHensel,
    PolygonMultiSlope,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub label: ClassLabel,
    pub reason: Reason,
    /// monic factor pair (ascending coefficients, leading 1 included)
    pub witness: Option<(Vec<u64>, Vec<u64>)>,
}

pub type FactorPair = (Vec<u64>, Vec<u64>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Naive,
    Structured,
}

// ---------------------------------------------------------------------------
// polynomial helpers mod p^k (coefficients ascending, dense)

pub fn poly_mul(m: &Modulus, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = m.add(out[i + j], m.mul(x, y));
        }
    }
    out
}

/// Division by a monic divisor is exact over Z/p^k.
pub fn poly_divmod_monic(m: &Modulus, f: &[u64], g: &[u64]) -> (Vec<u64>, Vec<u64>) {
    debug_assert_eq!(*g.last().unwrap(), 1);
    if f.len() < g.len() {
        return (vec![], f.to_vec());
    }
    let mut rem = f.to_vec();
    let mut quo = vec![0u64; f.len() - g.len() + 1];
    for i in (0..quo.len()).rev() {
        let q = rem[i + g.len() - 1];
        quo[i] = q;
        if q == 0 {
            continue;
        }
        for (j, &gc) in g.iter().enumerate() {
            rem[i + j] = m.sub(rem[i + j], m.mul(q, gc));
        }
    }
    rem.truncate(g.len() - 1);
    (quo, rem)
}

fn poly_eval(m: &Modulus, f: &[u64], x: u64) -> u64 {
    f.iter().rev().fold(0, |acc, &c| m.add(m.mul(acc, x), c))
}

/// Compose f with (x + t).
fn poly_shift(m: &Modulus, f: &[u64], t: u64) -> Vec<u64> {
    let mut acc: Vec<u64> = vec![];
    for &c in f.iter().rev() {
        // acc = acc * (x + t) + c
        let mut next = vec![0u64; acc.len() + 1];
        for (i, &a) in acc.iter().enumerate() {
            next[i + 1] = m.add(next[i + 1], a);
            next[i] = m.add(next[i], m.mul(a, t));
        }
        if next.is_empty() {
            next.push(0);
        }
        next[0] = m.add(next[0], c);
        acc = next;
    }
    acc
}

// ---------------------------------------------------------------------------
// factorization search

/// All roots of a polynomial modulo p^k, by lifting from mod p.
fn poly_roots_mod(m: &Modulus, coeffs: &[u64]) -> Vec<u64> {
    let p = m.p();
    let k = m.level();
    let m1 = m.at_level(1);
    let mut roots: Vec<u64> = (0..p).filter(|&r| poly_eval(&m1, coeffs, r) == 0).collect();
    for j in 2..=k {
        let mj = m.at_level(j);
        let step = p.pow(j - 1);
        let mut next = Vec::new();
        for &r in &roots {
            for t in 0..p {
                let rr = r + step * t;
                if poly_eval(&mj, coeffs, rr) == 0 {
                    next.push(rr);
                }
            }
        }
        roots = next;
    }
    roots
}

/// All roots of f modulo p^k.
pub fn roots_mod_pk(f: &ResiduePoly) -> Vec<u64> {
    poly_roots_mod(&f.modulus, &f.full_coeffs())
}

fn normalize_pair(g: Vec<u64>, h: Vec<u64>) -> FactorPair {
    if (g.len(), &g) <= (h.len(), &h) {
        (g, h)
    } else {
        (h, g)
    }
}

/// Every monic factorization f = g*h mod p^k with deg g <= deg h, both >= 1.
pub fn find_factorizations(f: &ResiduePoly, strategy: Strategy) -> Vec<FactorPair> {
    match strategy {
        Strategy::Naive => find_factorizations_naive(f),
        Strategy::Structured => find_factorizations_structured(f),
    }
}

fn find_factorizations_naive(f: &ResiduePoly) -> Vec<FactorPair> {
    let m = f.modulus;
    let n = f.degree();
    let fc = f.full_coeffs();
    let mut out = BTreeSet::new();
    for d in 1..=n / 2 {
        let count = m.pk().pow(d as u32);
        for mut idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            for _ in 0..d {
                g.push(idx % m.pk());
                idx /= m.pk();
            }
            g.push(1);
            let (q, r) = poly_divmod_monic(&m, &fc, &g);
            if r.iter().all(|&x| x == 0) {
                out.insert(normalize_pair(g, q));
            }
        }
    }
    out.into_iter().collect()
}

fn find_factorizations_structured(f: &ResiduePoly) -> Vec<FactorPair> {
    let n = f.degree();
    assert!(n <= 4, "structured search implemented for degree <= 4");
    let m = f.modulus;
    let fc = f.full_coeffs();
    let mut out = BTreeSet::new();
    // 1 + (n-1) splits via root lifting
    for r in roots_mod_pk(f) {
        let g = vec![m.neg(r), 1];
        let (q, rem) = poly_divmod_monic(&m, &fc, &g);
        debug_assert!(rem.iter().all(|&x| x == 0));
        out.insert(normalize_pair(g, q));
    }
    if n == 4 {
        let c3 = fc[3];
        if c3 == 0 {
            two_two_trace_zero(&m, fc[2], fc[1], fc[0], &mut out, |g, h| (g, h));
        } else {
            // translate x -> x - c3/4 to kill the cubic term; p odd
            let s = m.mul(c3, m.inv(4));
            let ft = poly_shift(&m, &fc, m.neg(s));
            debug_assert_eq!(ft[3], 0);
            two_two_trace_zero(&m, ft[2], ft[1], ft[0], &mut out, |g, h| {
                (poly_shift(&m, &g, s), poly_shift(&m, &h, s))
            });
        }
    }
    out.into_iter().collect()
}

/// 2+2 factorizations of the trace-zero quartic x^4 + c2 x^2 + c1 x + c0.
///
/// The cubic coefficient forces (x^2+ax+b)(x^2+cx+d) to have c = -a exactly
/// mod p^k, so every such factorization is (x^2+w)^2 - (ax+m)^2 with
/// w = (b+d)/2, m = (b-d)/2, where a^2 = 2w - c2, m^2 = w^2 - c0 and
/// c1 = -2am. Eliminating a and m gives the necessary cubic congruence
/// 4(2w - c2)(w^2 - c0) = c1^2 mod p^k, whose roots are found by lifting;
/// sqrt_mod then recovers every (a, m) candidate per root.
fn two_two_trace_zero<F>(
    m: &Modulus,
    c2: u64,
    c1: u64,
    c0: u64,
    out: &mut BTreeSet<FactorPair>,
    back: F,
) where
    F: Fn(Vec<u64>, Vec<u64>) -> (Vec<u64>, Vec<u64>),
{
    // 8w^3 - 4 c2 w^2 - 8 c0 w + (4 c2 c0 - c1^2)
    let cubic = [
        m.sub(m.mul(4, m.mul(c2, c0)), m.mul(c1, c1)),
        m.neg(m.mul(8, c0)),
        m.neg(m.mul(4, c2)),
        8 % m.pk(),
    ];
    for w in poly_roots_mod(m, &cubic) {
        let a2 = m.sub(m.mul(2, w), c2);
        let avs = match sqrt_mod(a2, m) {
            Ok(v) if !v.is_empty() => v,
            _ => continue,
        };
        let m2 = m.sub(m.mul(w, w), c0);
        let ms = match sqrt_mod(m2, m) {
            Ok(v) if !v.is_empty() => v,
            _ => continue,
        };
        for &a in &avs {
            for &mm in &ms {
                // cross term: c1 = -2am
                if m.add(c1, m.mul(2, m.mul(a, mm))) != 0 {
                    continue;
                }
                let g = vec![m.add(w, mm), a, 1];
                let h = vec![m.sub(w, mm), m.neg(a), 1];
                let (g, h) = back(g, h);
                out.insert(normalize_pair(g, h));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// certificates

pub fn coprime_certificate(g: &FFPoly, h: &FFPoly) -> bool {
    g.gcd(h).degree() == 0 && !g.gcd(h).is_zero()
}

/// Hensel form (1) on a monic factor g (degree <= 2) of f mod p^k:
/// divisibility gives v(f(alpha)) >= k, so the certificate holds when
/// v(f'(alpha)) is exactly known and k exceeds it (strictly, half-units).
pub fn root_certificate(f: &ResiduePoly, g: &[u64]) -> Option<u32> {
    let m = &f.modulus;
    let k = m.level();
    let df = f.derivative_coeffs();
    let val = match g.len() {
        2 => {
            let alpha = m.neg(g[0]);
            m.valuation(poly_eval(m, &df, alpha))
        }
        3 => ext_eval(&df, g[1], g[0], m).valuation()?,
        _ => return None,
    };
    match val {
        TruncatedValuation::Exact { half } if k > half => Some(half),
        _ => None,
    }
}

/// Outcome of the streaming 2+2 scan used by the classifier.
struct TwoTwoScan {
    /// at least one 2+2 factorization exists
    exists: bool,
    /// the scan visited every candidate (required for emptiness claims)
    complete: bool,
    cert: Option<FactorPair>,
}

/// Streaming version of the 2+2 search for classification: stops at the
/// first successful certificate, dedups certificate attempts by the factor
/// mod p^{floor(k/2)+1} (the certificate outcome only depends on that much
/// of g), and gives up completeness under an iteration budget rather than
/// enumerating the enormous pair sets of near-square classes. Giving up is
/// sound: the caller then reports Undecided.
fn two_two_scan(f: &ResiduePoly) -> TwoTwoScan {
    let m = f.modulus;
    let fc = f.full_coeffs();
    let c3 = fc[3];
    let (ft, shift) = if c3 == 0 {
        (fc.clone(), 0)
    } else {
        let s = m.mul(c3, m.inv(4));
        (poly_shift(&m, &fc, m.neg(s)), s)
    };
    let f_search = ResiduePoly::new(m, ft[..4].to_vec(), false);
    let (c2, c1, c0) = (ft[2], ft[1], ft[0]);
    let k = m.level();
    let p = m.p();
    let j0 = k / 2 + 1;
    let pj0 = p.pow(j0);
    let cubic = [
        m.sub(m.mul(4, m.mul(c2, c0)), m.mul(c1, c1)),
        m.neg(m.mul(8, c0)),
        m.neg(m.mul(4, c2)),
        8 % m.pk(),
    ];
    let mut out = TwoTwoScan {
        exists: false,
        complete: true,
        cert: None,
    };
    let mut tried: std::collections::HashSet<(u64, u64)> = Default::default();
    let mut iter_budget: i64 = 400_000;
    let mut cert_budget: i64 = 1024;
    let mut consider = |a: u64, mm: u64, w: u64, out: &mut TwoTwoScan| -> bool {
        // valid pair (a, m) for this w; returns true to stop the scan
        out.exists = true;
        let key = (a % pj0, m.add(w, mm) % pj0);
        if tried.insert(key) && cert_budget > 0 {
            cert_budget -= 1;
            let g = vec![m.add(w, mm), a, 1];
            let h = vec![m.sub(w, mm), m.neg(a), 1];
            for cand in [&g, &h] {
                if root_certificate(&f_search, cand).is_some() {
                    let (g, h) = if shift == 0 {
                        (g.clone(), h.clone())
                    } else {
                        (poly_shift(&m, &g, shift), poly_shift(&m, &h, shift))
                    };
                    out.cert = Some(normalize_pair(g, h));
                    return true;
                }
            }
        }
        false
    };
    // cheap per-w rejection: x has a square root mod p^k (p odd, x != 0)
    // iff v(x) is even and the unit part is a QR mod p
    let is_square = |x: u64| -> Option<bool> {
        match m.valuation(x) {
            TruncatedValuation::Exact { half } => {
                let v = half / 2;
                if v % 2 != 0 {
                    return Some(false);
                }
                let u = (x / p.pow(v)) % p;
                Some(m.at_level(1).pow(u, (p - 1) / 2) == 1)
            }
            // x = 0 mod p^k: sqrt set nonempty but valuations vary
            TruncatedValuation::AtLeastK { .. } => None,
        }
    };
    'outer: for w in poly_roots_mod(&m, &cubic) {
        let a2 = m.sub(m.mul(2, w), c2);
        let m2 = m.sub(m.mul(w, w), c0);
        if is_square(a2) == Some(false) || is_square(m2) == Some(false) {
            continue;
        }
        // cross term 2am = -c1 pins v(a) + v(m) when both are exact
        if let (
            TruncatedValuation::Exact { half: ha },
            TruncatedValuation::Exact { half: hm },
        ) = (m.valuation(a2), m.valuation(m2))
        {
            let s = ha / 4 + hm / 4;
            let ok = if s >= k {
                c1 == 0
            } else {
                matches!(m.valuation(c1), TruncatedValuation::Exact { half } if half == 2 * s)
            };
            if !ok {
                continue;
            }
        }
        let avs = match sqrt_mod(a2, &m) {
            Ok(v) if !v.is_empty() => v,
            _ => continue,
        };
        let vm2 = m.valuation(m2);
        let mut ms_cache: Option<Vec<u64>> = None;
        for a in avs {
            if a == 0 {
                // 2am = -c1 forces c1 = 0; every square root of m2 pairs up
                if c1 != 0 {
                    continue;
                }
                let ms = ms_cache
                    .get_or_insert_with(|| sqrt_mod(m2, &m).unwrap_or_default())
                    .clone();
                for mm in ms {
                    iter_budget -= 1;
                    if iter_budget < 0 {
                        out.complete = false;
                        break 'outer;
                    }
                    if consider(0, mm, w, &mut out) {
                        break 'outer;
                    }
                }
                continue;
            }
            // 2a*m = -c1 pins m to the progression m0 + p^{k-va}*t; intersect
            // that with the square roots of m2
            let va = match m.valuation(a) {
                TruncatedValuation::Exact { half } => half / 2,
                TruncatedValuation::AtLeastK { .. } => unreachable!(),
            };
            let pva = p.pow(va);
            if c1 % pva != 0 {
                continue;
            }
            let sub = m.at_level(k - va);
            let unit = m.mul(2, a) / pva;
            let m0 = sub.mul(sub.neg(c1 / pva % sub.pk()), sub.inv(unit % sub.pk()));
            let step = sub.pk();
            // every valid m in the progression is pinned mod a power of p at
            // least p^{floor(k/2)}, so a handful of representatives covers
            // every certificate key
            let mut reps: Vec<u64> = Vec::new();
            match vm2 {
                TruncatedValuation::AtLeastK { .. } => {
                    // m valid iff v(m) >= ceil(k/2)
                    let ceil = k.div_ceil(2);
                    let pc = p.pow(ceil);
                    if k - va >= ceil {
                        if m0 % pc == 0 {
                            for t in 0..p.min(pva) {
                                reps.push(m.add(m0, m.mul(step % m.pk(), t)));
                            }
                        }
                    } else if m0 == 0 {
                        // m = p^{k-va} t, need v(t) >= ceil-(k-va)
                        let tstep = p.pow(ceil - (k - va));
                        for j in 0..p.min(pva / tstep) {
                            reps.push(m.mul(step % m.pk(), tstep * j));
                        }
                    }
                }
                TruncatedValuation::Exact { half } => {
                    let sm = half / 4; // v(m2) = 2*sm, even by is_square above
                    if k - va > sm && va <= sm {
                        // m^2 is constant on the progression: all or nothing
                        if m.mul(m0, m0) == m2 {
                            reps.push(m0);
                        }
                    } else {
                        // the sqrt set is smaller than the progression here;
                        // filter it by the congruence instead
                        let ms = ms_cache
                            .get_or_insert_with(|| sqrt_mod(m2, &m).unwrap_or_default());
                        for &mm in ms.iter() {
                            iter_budget -= 1;
                            if iter_budget < 0 {
                                out.complete = false;
                                break 'outer;
                            }
                            if mm % step == m0 {
                                reps.push(mm);
                            }
                        }
                    }
                }
            }
            for mm in reps {
                iter_budget -= 1;
                if iter_budget < 0 {
                    out.complete = false;
                    break 'outer;
                }
                debug_assert_eq!(m.mul(mm, mm), m2);
                debug_assert_eq!(m.add(c1, m.mul(2, m.mul(a, mm))), 0);
                if consider(a, mm, w, &mut out) {
                    break 'outer;
                }
            }
        }
    }
    out
}

/// Decision cascade for one residue class.
pub fn classify_residue(f: &ResiduePoly) -> Certificate {
    let factors = factor_mod_p(&f.mod_p());
    if factors.len() == 1 && factors[0].1 == 1 {
        return Certificate {
            label: ClassLabel::CertIrreducible,
            reason: Reason::ModPIrreducible,
            witness: None,
        };
    }
    if factors.len() >= 2 {
        // two distinct irreducible factors: Hensel form (2) splits the
        // whole class at any precision
        let p = f.modulus.p();
        let mut g = FFPoly::one(p);
        for _ in 0..factors[0].1 {
            g = g.mul(&factors[0].0);
        }
        let mut h = FFPoly::one(p);
        for (q, e) in &factors[1..] {
            for _ in 0..*e {
                h = h.mul(q);
            }
        }
        debug_assert!(coprime_certificate(&g, &h));
        return Certificate {
            label: ClassLabel::CertReducible,
            reason: Reason::CoprimeModP,
            witness: Some((g.c, h.c)),
        };
    }
    // single irreducible factor with multiplicity >= 2 from here on
    let np = newton_polygon(f);
    let polygon = polygon_classify(&np);
    if polygon == ClassLabel::CertIrreducible {
        return Certificate {
            label: ClassLabel::CertIrreducible,
            reason: Reason::PolygonTwoPoint,
            witness: None,
        };
    }
    // try root certificates before settling for the multi-slope verdict, so
    // classes with both get the (stronger) Hensel reason
    let m = f.modulus;
    let fc = f.full_coeffs();
    let roots = roots_mod_pk(f);
    for r in &roots {
        let g = vec![m.neg(*r), 1];
        if root_certificate(f, &g).is_some() {
            let (q, rem) = poly_divmod_monic(&m, &fc, &g);
            debug_assert!(rem.iter().all(|&x| x == 0));
            return Certificate {
                label: ClassLabel::CertReducible,
                reason: Reason::RootHensel,
                witness: Some(normalize_pair(g, q)),
            };
        }
    }
    let scan = if f.degree() == 4 {
        two_two_scan(f)
    } else {
        TwoTwoScan {
            exists: false,
            complete: true,
            cert: None,
        }
    };
    if let Some((g, h)) = scan.cert {
        return Certificate {
            label: ClassLabel::CertReducible,
            reason: Reason::RootHensel,
            witness: Some((g, h)),
        };
    }
    if polygon == ClassLabel::CertReducible {
        return Certificate {
            label: ClassLabel::CertReducible,
            reason: Reason::PolygonMultiSlope,
            witness: None,
        };
    }
    if roots.is_empty() && !scan.exists && scan.complete {
        // any factorization of a lift would reduce to one mod p^k
        return Certificate {
            label: ClassLabel::CertIrreducible,
            reason: Reason::NoFactorizationAtPrecision,
            witness: None,
        };
    }
    Certificate {
        label: ClassLabel::Undecided,
        reason: Reason::None,
        witness: None,
    }
}

// ---------------------------------------------------------------------------
// class specs and the lifting enumerator

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Restriction {
    All,
    CongruentModP(FFPoly),
    /// Lemma 4.4's set: trace-zero quartics whose polygon is the single
    /// segment (0,2)-(4,0); enumeration starts at level 3.
    SlopeHalfSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSpec {
    pub p: u64,
    pub degree: u32,
    pub restriction: Restriction,
}

/// Parses a class expression — `(x^2+c)^2`, `x^n`, or `slope-half` — into
/// the implied degree and restriction.
pub fn parse_class(s: &str, p: u64) -> Result<(u32, Restriction), String> {
    let s = s.trim();
    if s == "slope-half" {
        return Ok((4, Restriction::SlopeHalfSet));
    }
    if let Some(rest) = s.strip_prefix("(x^2+") {
        let inner = rest
            .strip_suffix(")^2")
            .ok_or_else(|| format!("malformed class {s:?}: expected (x^2+c)^2"))?;
        let c: u64 = inner
            .parse()
            .map_err(|_| format!("malformed class {s:?}: shift must be a nonnegative integer"))?;
        let c = c % p;
        let g = FFPoly::new(p, vec![c, 0, 1]);
        return Ok((4, Restriction::CongruentModP(g.mul(&g))));
    }
    if let Some(n) = s.strip_prefix("x^") {
        let n: u32 = n
            .parse()
            .map_err(|_| format!("malformed class {s:?}: exponent must be an integer"))?;
        if n < 2 {
            return Err("class x^n needs n >= 2".into());
        }
        let mut c = vec![0u64; n as usize];
        c.push(1);
        return Ok((n, Restriction::CongruentModP(FFPoly::new(p, c))));
    }
    Err(format!(
        "unrecognized class {s:?}; grammar: (x^2+c)^2 | x^n | slope-half"
    ))
}

impl ClassSpec {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        PrimeModulus::new(self.p).map_err(|e| ClassifyError::BadSpec(e.to_string()))?;
        if self.degree < 2 {
            return Err(ClassifyError::BadSpec("degree must be at least 2".into()));
        }
        match &self.restriction {
            Restriction::All => Ok(()),
            Restriction::CongruentModP(g) => {
                if g.p != self.p || !g.is_monic() || g.degree() != self.degree as usize {
                    return Err(ClassifyError::BadSpec(
                        "class target must be monic of the spec degree over F_p".into(),
                    ));
                }
                if g.coeff(self.degree as usize - 1) != 0 {
                    return Err(ClassifyError::BadSpec(
                        "class target must be trace-zero".into(),
                    ));
                }
                Ok(())
            }
            Restriction::SlopeHalfSet => {
                if self.degree != 4 {
                    return Err(ClassifyError::BadSpec(
                        "slope-half set is a quartic family".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn start_level(&self) -> u32 {
        match self.restriction {
            Restriction::SlopeHalfSet => 3,
            _ => 1,
        }
    }

    /// Haar measure of the spec within the trace-zero monic space.
    pub fn measure(&self) -> BigRational {
        match &self.restriction {
            Restriction::All => BigRational::one(),
            Restriction::CongruentModP(_) => p_pow(self.p, -(self.degree as i64 - 1)),
            Restriction::SlopeHalfSet => {
                BigRational::from(BigInt::from(self.p - 1)) * p_pow(self.p, -6)
            }
        }
    }

    pub fn start_classes(&self) -> Vec<ResiduePoly> {
        let n = self.degree as usize;
        let prime = PrimeModulus::new(self.p).unwrap();
        match &self.restriction {
            Restriction::All => {
                let m = Modulus::new(prime, 1).unwrap();
                let total = self.p.pow(self.degree - 1);
                (0..total)
                    .map(|mut idx| {
                        let mut c = Vec::with_capacity(n);
                        for _ in 0..n - 1 {
                            c.push(idx % self.p);
                            idx /= self.p;
                        }
                        c.push(0);
                        ResiduePoly::new(m, c, true)
                    })
                    .collect()
            }
            Restriction::CongruentModP(g) => {
                let m = Modulus::new(prime, 1).unwrap();
                let c = (0..n).map(|i| g.coeff(i)).collect();
                vec![ResiduePoly::new(m, c, true)]
            }
            Restriction::SlopeHalfSet => {
                let p = self.p;
                let m = Modulus::new(prime, 3).unwrap();
                let mut out = Vec::new();
                // v(c2) >= 1, v(c1) >= 2, v(c0) = 2 exactly, c3 = 0
                for u2 in 0..p * p {
                    for u1 in 0..p {
                        for u0 in 1..p {
                            out.push(ResiduePoly::new(
                                m,
                                vec![u0 * p * p, u1 * p * p, u2 * p, 0],
                                true,
                            ));
                        }
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelRow {
    pub k: u32,
    pub irreducible: u64,
    pub ambiguous: u64,
    pub hensel: u64,
    /// number of undecided classes at the previous level (1 at the start)
    pub parents: u64,
    /// per-reason subtotals for diagnostics: (mod-p irreducible, polygon
    /// two-point, no-factorization) and (coprime, polygon multi-slope,
    /// root-Hensel)
    pub irreducible_reasons: [u64; 3],
    pub hensel_reasons: [u64; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelTable {
    pub p: u64,
    pub degree: u32,
    pub rows: Vec<LevelRow>,
    pub truncated: bool,
}

impl LevelTable {
    /// Per-parent normalization of a row; exact only when divisible.
    pub fn per_parent(&self) -> Option<Vec<(u32, u64, u64, u64)>> {
        self.rows
            .iter()
            .map(|r| {
                if r.parents == 0
                    || r.irreducible % r.parents != 0
                    || r.ambiguous % r.parents != 0
                    || r.hensel % r.parents != 0
                {
                    None
                } else {
                    Some((
                        r.k,
                        r.irreducible / r.parents,
                        r.ambiguous / r.parents,
                        r.hensel / r.parents,
                    ))
                }
            })
            .collect()
    }
}

fn lifts_of(f: &ResiduePoly) -> Vec<ResiduePoly> {
    let k = f.modulus.level();
    let p = f.modulus.p();
    let m = Modulus::new(f.modulus.prime(), k + 1).unwrap();
    let step = p.pow(k);
    let n = f.degree();
    let free = n - 1; // trace stays fixed
    let total = p.pow(free as u32);
    (0..total)
        .map(|mut idx| {
            let mut c = f.c.clone();
            for ci in c.iter_mut().take(free) {
                *ci += step * (idx % p);
                idx /= p;
            }
            ResiduePoly::new(m, c, f.trace_zero)
        })
        .collect()
}

fn classify_label(f: &ResiduePoly) -> (ClassLabel, Reason) {
    let c = classify_residue(f);
    (c.label, c.reason)
}

fn reason_slot_irr(r: Reason) -> usize {
    match r {
        Reason::ModPIrreducible => 0,
        Reason::PolygonTwoPoint => 1,
        Reason::NoFactorizationAtPrecision => 2,
        _ => unreachable!(),
    }
}

fn reason_slot_red(r: Reason) -> usize {
    match r {
        Reason::CoprimeModP => 0,
        Reason::PolygonMultiSlope => 1,
        Reason::RootHensel => 2,
        _ => unreachable!(),
    }
}

pub const DEFAULT_WORK_LIMIT: u64 = 200_000_000;

pub fn lift_table(
    spec: &ClassSpec,
    k_max: u32,
    work_limit: u64,
) -> Result<LevelTable, ClassifyError> {
    spec.validate()?;
    let mut table = LevelTable {
        p: spec.p,
        degree: spec.degree,
        rows: vec![],
        truncated: false,
    };
    let mut undecided = spec.start_classes();
    let mut parents = 1u64;
    let mut work = undecided.len() as u64;
    for k in spec.start_level()..=k_max {
        if k > spec.start_level() {
            parents = undecided.len() as u64;
            work += parents * (spec.p.pow(spec.degree - 1));
            if work > work_limit {
                table.truncated = true;
                return Err(ClassifyError::ResourceLimit {
                    level: k,
                    partial: table,
                });
            }
            undecided = undecided.iter().flat_map(lifts_of).collect();
        }
        let results: Vec<(ClassLabel, Reason)> =
            undecided.par_iter().map(classify_label).collect();
        let mut row = LevelRow {
            k,
            irreducible: 0,
            ambiguous: 0,
            hensel: 0,
            parents,
            irreducible_reasons: [0; 3],
            hensel_reasons: [0; 3],
        };
        let mut next = Vec::new();
        for (f, (label, reason)) in undecided.iter().zip(&results) {
            match label {
                ClassLabel::CertIrreducible => {
                    row.irreducible += 1;
                    row.irreducible_reasons[reason_slot_irr(*reason)] += 1;
                }
                // The hensel column counts Hensel certificates only.
                // Multi-slope polygon classes are reducible, but stay in the
                // ambiguous column and keep lifting; their lifts pick up root
                // certificates a level or two later.
                ClassLabel::CertReducible if *reason == Reason::PolygonMultiSlope => {
                    row.ambiguous += 1;
                    next.push(f.clone());
                }
                ClassLabel::CertReducible => {
                    row.hensel += 1;
                    row.hensel_reasons[reason_slot_red(*reason)] += 1;
                }
                ClassLabel::Undecided => {
                    row.ambiguous += 1;
                    next.push(f.clone());
                }
            }
        }
        // conservation: each undecided parent contributes p^{n-1} lifts
        if k > spec.start_level() {
            debug_assert_eq!(
                row.irreducible + row.ambiguous + row.hensel,
                row.parents * spec.p.pow(spec.degree - 1)
            );
        }
        table.rows.push(row);
        undecided = next;
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityBracket {
    pub lower: BigRational,
    pub upper: BigRational,
    pub level_reached: u32,
    /// measure excluded by the S-quotient, within the spec
    pub dropped: BigRational,
}

impl DensityBracket {
    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }
}

pub fn density_bracket(
    spec: &ClassSpec,
    k_max: u32,
    quotient_by_s: bool,
    work_limit: u64,
) -> Result<DensityBracket, ClassifyError> {
    spec.validate()?;
    let n = spec.degree;
    let class_measure = |k: u32| p_pow(spec.p, -((n as i64 - 1) * k as i64));
    let mut irr = BigRational::zero();
    let mut red = BigRational::zero();
    let mut dropped = BigRational::zero();
    let mut undecided = spec.start_classes();
    let mut work = undecided.len() as u64;
    for k in spec.start_level()..=k_max {
        if k > spec.start_level() {
            work += undecided.len() as u64 * spec.p.pow(n - 1);
            if work > work_limit {
                return Err(ClassifyError::ResourceLimit {
                    level: k,
                    partial: LevelTable {
                        p: spec.p,
                        degree: n,
                        rows: vec![],
                        truncated: true,
                    },
                });
            }
            undecided = undecided.iter().flat_map(lifts_of).collect();
        }
        if quotient_by_s {
            // classes entirely inside S leave the quotient space; they are
            // never classified and never lifted
            let (inside, rest): (Vec<_>, Vec<_>) = undecided
                .into_iter()
                .partition(|f| in_set_s(f) == Ternary::Yes);
            dropped += BigRational::from(BigInt::from(inside.len() as u64)) * class_measure(k);
            undecided = rest;
        }
        let results: Vec<ClassLabel> = undecided
            .par_iter()
            .map(|f| classify_residue(f).label)
            .collect();
        let mut next = Vec::new();
        let mut n_irr = 0u64;
        let mut n_red = 0u64;
        for (f, label) in undecided.iter().zip(&results) {
            match label {
                ClassLabel::CertIrreducible => n_irr += 1,
                ClassLabel::CertReducible => n_red += 1,
                ClassLabel::Undecided => next.push(f.clone()),
            }
        }
        irr += BigRational::from(BigInt::from(n_irr)) * class_measure(k);
        red += BigRational::from(BigInt::from(n_red)) * class_measure(k);
        undecided = next;
    }
    let denom = spec.measure() - &dropped;
    Ok(DensityBracket {
        lower: &irr / &denom,
        upper: BigRational::one() - &red / &denom,
        level_reached: k_max,
        dropped,
    })
}

// ---------------------------------------------------------------------------
// Monte Carlo diagnostic

#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    pub samples: u64,
    pub decided: u64,
    pub irreducible: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub undecided_fraction: f64,
}

/// Deterministic per-sample seeding: sample i uses a ChaCha stream derived
/// from (seed, i), so results are schedule-independent.
pub fn mc_estimate(
    spec: &ClassSpec,
    precision: u32,
    samples: u64,
    seed: u64,
) -> Result<McResult, ClassifyError> {
    spec.validate()?;
    if samples == 0 {
        return Err(ClassifyError::EmptySample);
    }
    let n = spec.degree as usize;
    let prime = PrimeModulus::new(spec.p).unwrap();
    let m = Modulus::new(prime, precision)
        .map_err(|e| ClassifyError::BadSpec(e.to_string()))?;
    let start = spec.start_level();
    let outcomes: Vec<Option<ClassLabel>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9e3779b97f4a7c15));
            let mut c = vec![0u64; n];
            match &spec.restriction {
                Restriction::All => {
                    for ci in c.iter_mut().take(n - 1) {
                        *ci = rng.gen_range(0..m.pk());
                    }
                }
                Restriction::CongruentModP(g) => {
                    for (i, ci) in c.iter_mut().enumerate().take(n - 1) {
                        *ci = g.coeff(i) + spec.p * rng.gen_range(0..m.pk() / spec.p);
                    }
                }
                Restriction::SlopeHalfSet => {
                    let p = spec.p;
                    c[2] = p * rng.gen_range(0..m.pk() / p);
                    c[1] = p * p * rng.gen_range(0..m.pk() / (p * p));
                    let unit = loop {
                        let u = rng.gen_range(0..m.pk() / (p * p));
                        if u % p != 0 {
                            break u;
                        }
                    };
                    c[0] = p * p * unit;
                }
            }
            let f = ResiduePoly::new(m, c, true);
            for j in start..=precision {
                let label = classify_residue(&f.at_level(j)).label;
                if label != ClassLabel::Undecided {
                    return Some(label);
                }
            }
            None
        })
        .collect();
    let decided = outcomes.iter().filter(|o| o.is_some()).count() as u64;
    let irr = outcomes
        .iter()
        .filter(|o| **o == Some(ClassLabel::CertIrreducible))
        .count() as u64;
    let est = if decided > 0 {
        irr as f64 / decided as f64
    } else {
        f64::NAN
    };
    let half_width = if decided > 0 {
        2.576 * (est * (1.0 - est) / decided as f64).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(McResult {
        samples,
        decided,
        irreducible: irr,
        estimate: est,
        ci_low: est - half_width,
        ci_high: est + half_width,
        undecided_fraction: (samples - decided) as f64 / samples as f64,
    })
}
