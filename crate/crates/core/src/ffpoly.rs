//! Polynomials over the prime field F_p: arithmetic, factorization, and the
//! irreducible-count formulas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FFError {
    #[error("nu_no_trace requires gcd(n, p) = 1, got n={n}, p={p}")]
    TraceFormulaHypothesis { n: u32, p: u64 },
}

/// Polynomial over F_p, coefficients ascending, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FFPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

impl FFPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in &mut c {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FFPoly { p, c }
    }

    pub fn zero(p: u64) -> Self {
        FFPoly { p, c: vec![] }
    }

    pub fn one(p: u64) -> Self {
        FFPoly { p, c: vec![1] }
    }

    pub fn x(p: u64) -> Self {
        FFPoly { p, c: vec![0, 1] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.c.last() == Some(&1)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        self.c.iter().rev().fold(0u64, |acc, &ci| {
            ((acc as u128 * x as u128 + ci as u128) % p as u128) as u64
        })
    }

    pub fn add(&self, rhs: &FFPoly) -> FFPoly {
        let n = self.c.len().max(rhs.c.len());
        let c = (0..n)
            .map(|i| (self.coeff(i) + rhs.coeff(i)) % self.p)
            .collect();
        FFPoly::new(self.p, c)
    }

    pub fn sub(&self, rhs: &FFPoly) -> FFPoly {
        let n = self.c.len().max(rhs.c.len());
        let c = (0..n)
            .map(|i| (self.p + self.coeff(i) - rhs.coeff(i)) % self.p)
            .collect();
        FFPoly::new(self.p, c)
    }

    pub fn mul(&self, rhs: &FFPoly) -> FFPoly {
        if self.is_zero() || rhs.is_zero() {
            return FFPoly::zero(self.p);
        }
        let mut c = vec![0u128; self.c.len() + rhs.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in rhs.c.iter().enumerate() {
                c[i + j] = (c[i + j] + a as u128 * b as u128) % self.p as u128;
            }
        }
        FFPoly::new(self.p, c.into_iter().map(|x| x as u64).collect())
    }

    pub fn scale(&self, s: u64) -> FFPoly {
        FFPoly::new(
            self.p,
            self.c
                .iter()
                .map(|&a| ((a as u128 * s as u128) % self.p as u128) as u64)
                .collect(),
        )
    }

    fn inv_mod_p(&self, a: u64) -> u64 {
        // Fermat
        let p = self.p;
        let mut e = p - 2;
        let mut base = a % p;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = (acc as u128 * base as u128 % p as u128) as u64;
            }
            base = (base as u128 * base as u128 % p as u128) as u64;
            e >>= 1;
        }
        acc
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn divmod(&self, d: &FFPoly) -> (FFPoly, FFPoly) {
        assert!(!d.is_zero());
        let p = self.p;
        if self.c.len() < d.c.len() {
            return (FFPoly::zero(p), self.clone());
        }
        let lead_inv = self.inv_mod_p(*d.c.last().unwrap());
        let mut rem = self.c.clone();
        let mut quo = vec![0u64; self.c.len() - d.c.len() + 1];
        for i in (0..quo.len()).rev() {
            let q = (rem[i + d.c.len() - 1] as u128 * lead_inv as u128 % p as u128) as u64;
            quo[i] = q;
            for (j, &dc) in d.c.iter().enumerate() {
                let sub = (q as u128 * dc as u128 % p as u128) as u64;
                rem[i + j] = (rem[i + j] + p - sub) % p;
            }
        }
        (FFPoly::new(p, quo), FFPoly::new(p, rem))
    }

    pub fn rem(&self, d: &FFPoly) -> FFPoly {
        self.divmod(d).1
    }

    pub fn divides(&self, f: &FFPoly) -> bool {
        f.rem(self).is_zero()
    }

    pub fn derivative(&self) -> FFPoly {
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| ((i as u128 % self.p as u128) * a as u128 % self.p as u128) as u64)
            .collect();
        FFPoly::new(self.p, c)
    }

    pub fn monic(&self) -> FFPoly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(self.inv_mod_p(*self.c.last().unwrap()))
    }

    pub fn gcd(&self, rhs: &FFPoly) -> FFPoly {
        let (mut a, mut b) = (self.clone(), rhs.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod f` by repeated squaring.
    pub fn pow_mod(&self, mut e: u64, f: &FFPoly) -> FFPoly {
        let mut base = self.rem(f);
        let mut acc = FFPoly::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(f);
            }
            base = base.mul(&base).rem(f);
            e >>= 1;
        }
        acc
    }

    pub fn shift(&self, a: u64) -> FFPoly {
        // f(x + a) by Horner on the coefficient sequence
        let xa = FFPoly::new(self.p, vec![a, 1]);
        let mut acc = FFPoly::zero(self.p);
        for &ci in self.c.iter().rev() {
            acc = acc.mul(&xa).add(&FFPoly::new(self.p, vec![ci]));
        }
        acc
    }
}

/// Complete factorization of a monic polynomial into monic irreducibles with
/// multiplicities, sorted for determinism.
pub fn factor_mod_p(f: &FFPoly) -> Vec<(FFPoly, u32)> {
    assert!(f.is_monic() && f.degree() >= 1);
    let mut out: Vec<(FFPoly, u32)> = Vec::new();
    factor_into(f.clone(), 1, &mut out);
    out.sort_by(|a, b| (a.0.degree(), &a.0.c).cmp(&(b.0.degree(), &b.0.c)));
    out
}

pub fn is_irreducible(f: &FFPoly) -> bool {
    let fs = factor_mod_p(f);
    fs.len() == 1 && fs[0].1 == 1
}

fn factor_into(mut f: FFPoly, scale: u32, out: &mut Vec<(FFPoly, u32)>) {
    if f.degree() == 0 {
        return;
    }
    let df = f.derivative();
    if df.is_zero() {
        // f = g(x)^p with g carrying the same coefficients (a^p = a in F_p)
        let p = f.p as usize;
        let c: Vec<u64> = f.c.iter().step_by(p).copied().collect();
        factor_into(FFPoly::new(f.p, c), scale * f.p as u32, out);
        return;
    }
    let squarefree = f.divmod(&f.gcd(&df)).0;
    for q in distinct_irreducibles(squarefree) {
        let mut e = 0u32;
        while q.divides(&f) {
            f = f.divmod(&q).0;
            e += 1;
        }
        out.push((q, e * scale));
    }
    // anything left has only multiplicity-divisible-by-p factors
    factor_into(f, scale, out);
}

/// Distinct-degree splitting followed by equal-degree splitting.
fn distinct_irreducibles(mut s: FFPoly) -> Vec<FFPoly> {
    let p = s.p;
    let mut out = Vec::new();
    let mut h = FFPoly::x(p);
    let mut d = 0u32;
    while s.degree() >= 1 {
        d += 1;
        if 2 * d as usize > s.degree() {
            out.push(s);
            break;
        }
        h = h.pow_mod(p, &s); // h = x^{p^d} mod s
        let g = h.sub(&FFPoly::x(p)).gcd(&s);
        if g.degree() >= 1 {
            s = s.divmod(&g).0;
            equal_degree_split(g, d as usize, &mut out);
            h = h.rem(&s);
        }
    }
    out
}

/// Cantor-Zassenhaus with a deterministic seed (p odd).
fn equal_degree_split(g: FFPoly, d: usize, out: &mut Vec<FFPoly>) {
    if g.degree() == d {
        out.push(g);
        return;
    }
    let p = g.p;
    let mut rng = ChaCha8Rng::seed_from_u64(0x70_1d_5eed ^ g.degree() as u64);
    let exp = (p.pow(d as u32) - 1) / 2;
    loop {
        let a = FFPoly::new(p, (0..g.degree()).map(|_| rng.gen_range(0..p)).collect());
        if a.degree() < 1 && a.is_zero() {
            continue;
        }
        let b = a.pow_mod(exp, &g).sub(&FFPoly::one(p));
        let t = b.gcd(&g);
        if t.degree() >= 1 && t.degree() < g.degree() {
            equal_degree_split(t.clone(), d, out);
            equal_degree_split(g.divmod(&t).0, d, out);
            return;
        }
    }
}

pub fn mobius(m: u64) -> i64 {
    assert!(m >= 1);
    let mut m = m;
    let mut count = 0;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return 0;
            }
            count += 1;
        }
        d += 1;
    }
    if m > 1 {
        count += 1;
    }
    if count % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Number of monic irreducibles of degree n over F_p: (1/n) sum mu(n/d) p^d.
pub fn nu(n: u32, p: u64) -> u64 {
    assert!(n >= 1);
    let mut total: i128 = 0;
    for d in 1..=n {
        if n % d == 0 {
            total += mobius((n / d) as u64) as i128 * (p as i128).pow(d);
        }
    }
    (total / n as i128) as u64
}

/// Monic irreducibles of degree n with zero x^{n-1} coefficient: nu(n)/p,
/// valid only when p does not divide n.
pub fn nu_no_trace(n: u32, p: u64) -> Result<u64, FFError> {
    if n as u64 % p == 0 {
        return Err(FFError::TraceFormulaHypothesis { n, p });
    }
    Ok(nu(n, p) / p)
}

/// All monic polynomials of the given degree, for census-style oracles.
pub fn all_monic(p: u64, degree: usize) -> impl Iterator<Item = FFPoly> {
    let count = p.pow(degree as u32);
    (0..count).map(move |mut idx| {
        let mut c = Vec::with_capacity(degree + 1);
        for _ in 0..degree {
            c.push(idx % p);
            idx /= p;
        }
        c.push(1);
        FFPoly { p, c }
    })
}
