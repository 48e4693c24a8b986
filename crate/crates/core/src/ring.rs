//! Exact arithmetic in `Z/p^k` together with truncation-aware valuations.
//!
//! Valuations are stored in half-units (an integer `h` stands for the
//! valuation `h/2`) so that elements of ramified quadratic extensions never
//! need fractional types. A valuation is either known exactly or only known
//! to be at least the truncation level; certificates must never rely on an
//! `AtLeastK` bound being attained.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("{0} is not an odd prime >= 3")]
    NotOddPrime(u64),
    #[error("p^k overflows the fixed-width residue representation (p={p}, k={k})")]
    ModulusOverflow { p: u64, k: u32 },
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("square root of an element with odd exact valuation {half_val} (half-units) below level {level}")]
    OddValuation { half_val: u32, level: u32 },
}

/// An odd prime `p >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self, RingError> {
        if p < 3 || p % 2 == 0 || !is_prime(p) {
            return Err(RingError::NotOddPrime(p));
        }
        Ok(PrimeModulus(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Working modulus `p^k`. Residues are `u64`; construction rejects any
/// `p^k` whose squares would not fit in `u128` intermediates. The spec's
/// required range (up to `13^12`) is far inside the representable range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    p: PrimeModulus,
    k: u32,
    pk: u64,
}

impl Modulus {
    pub fn new(p: PrimeModulus, k: u32) -> Result<Self, RingError> {
        if k == 0 {
            return Err(RingError::ZeroLevel);
        }
        let mut pk: u64 = 1;
        for _ in 0..k {
            pk = pk
                .checked_mul(p.get())
                .filter(|&v| v < (1u64 << 63))
                .ok_or(RingError::ModulusOverflow { p: p.get(), k })?;
        }
        Ok(Modulus { p, k, pk })
    }

    pub fn prime(&self) -> PrimeModulus {
        self.p
    }

    pub fn p(&self) -> u64 {
        self.p.get()
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    pub fn pk(&self) -> u64 {
        self.pk
    }

    /// The modulus `p^j` for `1 <= j <= k`.
    pub fn at_level(&self, j: u32) -> Modulus {
        assert!(j >= 1 && j <= self.k);
        Modulus::new(self.p, j).expect("sub-level of a valid modulus")
    }

    pub fn reduce_i128(&self, x: i128) -> u64 {
        let m = self.pk as i128;
        (((x % m) + m) % m) as u64
    }

    pub fn reduce(&self, x: u64) -> u64 {
        x % self.pk
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.pk as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.pk - (b - a)
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.pk - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.pk as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64 % self.pk;
        base %= self.pk;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a unit mod `p^k`.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p() != 0, "inverse of a non-unit");
        // extended Euclid on (a, p^k)
        let (mut r0, mut r1) = (self.pk as i128, (a % self.pk) as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        self.reduce_i128(t0)
    }

    /// `p`-adic valuation of the residue `x` (reduced mod `p^k`).
    pub fn valuation(&self, x: u64) -> TruncatedValuation {
        debug_assert!(x < self.pk);
        if x == 0 {
            return TruncatedValuation::AtLeastK { bound: self.k };
        }
        let p = self.p();
        let mut v = 0u32;
        let mut x = x;
        while x % p == 0 {
            x /= p;
            v += 1;
        }
        debug_assert!(v < self.k);
        TruncatedValuation::Exact { half: 2 * v }
    }
}

/// A valuation in half-units, either exact or truncated.
///
/// `Exact { half: h }` means the valuation is exactly `h/2` and `h/2` is
/// strictly below the truncation level of the producing computation.
/// `AtLeastK { bound: k }` means only `v >= k` is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TruncatedValuation {
    Exact { half: u32 },
    AtLeastK { bound: u32 },
}

impl TruncatedValuation {
    pub fn exact_half(self) -> Option<u32> {
        match self {
            TruncatedValuation::Exact { half } => Some(half),
            TruncatedValuation::AtLeastK { .. } => None,
        }
    }

    /// Exact integer valuation, when known.
    pub fn exact_int(self) -> Option<u32> {
        match self {
            TruncatedValuation::Exact { half } if half % 2 == 0 => Some(half / 2),
            _ => None,
        }
    }

    /// Is the valuation certainly `>= v` (in half-units)?
    pub fn at_least_half(self, h: u32) -> bool {
        match self {
            TruncatedValuation::Exact { half } => half >= h,
            TruncatedValuation::AtLeastK { bound } => 2 * bound >= h,
        }
    }

    /// Demote an exact claim that reaches the truncation ceiling `level`.
    /// Truncation could hide lower-order terms there, so the value is only
    /// a bound.
    pub fn capped(self, level: u32) -> TruncatedValuation {
        match self {
            TruncatedValuation::Exact { half } if half >= 2 * level => {
                TruncatedValuation::AtLeastK { bound: level }
            }
            other => other,
        }
    }

    /// Minimum of two valuations when that minimum is certain.
    ///
    /// Returns `Exact` only when one side is exactly known and certainly
    /// strictly smaller than the other (or tied with it under the caller's
    /// no-cancellation guarantee, which the extension rules provide).
    pub fn min_known(self, other: TruncatedValuation) -> TruncatedValuation {
        use TruncatedValuation::*;
        match (self, other) {
            (Exact { half: a }, Exact { half: b }) => Exact { half: a.min(b) },
            (Exact { half: a }, AtLeastK { bound }) | (AtLeastK { bound }, Exact { half: a }) => {
                if a < 2 * bound {
                    Exact { half: a }
                } else {
                    AtLeastK { bound }
                }
            }
            (AtLeastK { bound: a }, AtLeastK { bound: b }) => AtLeastK { bound: a.min(b) },
        }
    }
}

/// All square roots of `a` modulo `p^k`.
///
/// A residue with positive even valuation `2s` is handled by stripping
/// `p^{2s}`; the root set is then `p^s * (unit roots lifted to p^{k-s})`.
/// A truncated zero (`a == 0`) has every multiple of `p^{ceil(k/2)}` as a
/// root. An odd exact valuation is an error, distinct from the empty set
/// returned for non-residue units.
pub fn sqrt_mod(a: u64, m: &Modulus) -> Result<Vec<u64>, RingError> {
    let p = m.p();
    let k = m.level();
    if a == 0 {
        let s = k.div_ceil(2);
        let step = p.pow(s);
        let count = m.pk() / step;
        return Ok((0..count).map(|t| t * step).collect());
    }
    let v = match m.valuation(a) {
        TruncatedValuation::Exact { half } => half / 2,
        TruncatedValuation::AtLeastK { .. } => unreachable!("a != 0"),
    };
    if v % 2 != 0 {
        return Err(RingError::OddValuation {
            half_val: 2 * v,
            level: k,
        });
    }
    let s = v / 2;
    let sub = m.at_level(k - 2 * s);
    let unit = a / p.pow(2 * s);
    let Some(r) = sqrt_unit(unit % sub.pk(), &sub) else {
        return Ok(Vec::new());
    };
    // roots are p^s * w with w ≡ ±r (mod p^{k-2s}), w taken mod p^{k-s}
    let lift_count = p.pow(s);
    let wmod = m.at_level(k - s);
    let ps = p.pow(s);
    let mut out = Vec::with_capacity(2 * lift_count as usize);
    for base in [r, sub.neg(r)] {
        for t in 0..lift_count {
            let w = wmod.add(base, wmod.mul(t, sub.pk() % wmod.pk()));
            out.push(m.mul(ps, w));
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// One square root of the unit `u` mod `p^k`, or `None` for a non-residue.
fn sqrt_unit(u: u64, m: &Modulus) -> Option<u64> {
    let p = m.p();
    let r0 = tonelli_shanks(u % p, p)?;
    // Newton lifting: r <- r - (r^2 - u) / (2r), quadratic convergence.
    let mut r = r0;
    let iters = 32 - m.level().leading_zeros() + 1;
    for _ in 0..iters {
        let fr = m.sub(m.mul(r, r), u % m.pk());
        let step = m.mul(fr, m.inv(m.mul(2, r)));
        r = m.sub(r, step);
    }
    debug_assert_eq!(m.mul(r, r), u % m.pk());
    Some(r)
}

/// Square root of `a` modulo an odd prime `p`, if it exists.
pub fn tonelli_shanks(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    let pow = |mut b: u64, mut e: u64| -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = (acc as u128 * b as u128 % p as u128) as u64;
            }
            b = (b as u128 * b as u128 % p as u128) as u64;
            e >>= 1;
        }
        acc
    };
    if pow(a, (p - 1) / 2) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow(a, (p + 1) / 4));
    }
    // p ≡ 1 (mod 4): full Tonelli-Shanks
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow(z, (p - 1) / 2) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow(z, q);
    let mut t = pow(a, q);
    let mut r = pow(a, (q + 1) / 2);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = (t2 as u128 * t2 as u128 % p as u128) as u64;
            i += 1;
        }
        let b = pow(c, 1u64 << (m - i - 1));
        m = i;
        c = (b as u128 * b as u128 % p as u128) as u64;
        t = (t as u128 * c as u128 % p as u128) as u64;
        r = (r as u128 * b as u128 % p as u128) as u64;
    }
    Some(r)
}

/// Splitting behaviour of a monic quadratic mod `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ramification {
    /// irreducible mod p
    Unramified,
    /// square of a linear mod p
    Ramified,
    /// two distinct roots mod p
    Split,
}

/// An element `a1*y + a0` of `(Z/p^k)[y] / (y^2 + g1*y + g0)`.
#[derive(Debug, Clone, Copy)]
pub struct QuadExtElem {
    pub a1: u64,
    pub a0: u64,
    pub g1: u64,
    pub g0: u64,
    pub modulus: Modulus,
    pub ramification: Ramification,
}

pub fn ramification_of(g1: u64, g0: u64, m: &Modulus) -> Ramification {
    let p = m.p();
    let disc = ((g1 as u128 * g1 as u128 + 4u128 * p as u128 * p as u128
        - 4u128 * (g0 % p) as u128)
        % p as u128) as u64;
    if disc == 0 {
        Ramification::Ramified
    } else if tonelli_shanks(disc, p).is_some() {
        Ramification::Split
    } else {
        Ramification::Unramified
    }
}

/// Evaluate `f` (coefficients ascending, leading included) at a root `y` of
/// the monic quadratic `y^2 + g1*y + g0`, by polynomial remainder.
pub fn ext_eval(coeffs: &[u64], g1: u64, g0: u64, m: &Modulus) -> QuadExtElem {
    let mut b1 = 0u64;
    let mut b0 = 0u64;
    for &c in coeffs.iter().rev() {
        // (b1*y + b0) * y = (b0 - b1*g1)*y - b1*g0
        let n1 = m.sub(b0, m.mul(b1, g1));
        let n0 = m.neg(m.mul(b1, g0));
        b1 = n1;
        b0 = m.add(n0, c % m.pk());
    }
    QuadExtElem {
        a1: b1,
        a0: b0,
        g1,
        g0,
        modulus: *m,
        ramification: ramification_of(g1, g0, m),
    }
}

impl QuadExtElem {
    pub fn is_zero(&self) -> bool {
        self.a1 == 0 && self.a0 == 0
    }

    /// Valuation of the element in half-units, when the extension's
    /// valuation rules determine it. `None` means the rules do not apply
    /// (split quadratic, or a ramified quadratic whose root valuation is
    /// not a genuine half-integer at this precision).
    pub fn valuation(&self) -> Option<TruncatedValuation> {
        let m = &self.modulus;
        let k = m.level();
        match self.ramification {
            Ramification::Unramified => {
                // v(a1*y + a0) = min(v(a1), v(a0)): y is a unit and no
                // cancellation is possible since y generates the residue
                // field extension.
                Some(m.valuation(self.a1).min_known(m.valuation(self.a0)).capped(k))
            }
            Ramification::Ramified => {
                // center at the repeated root: y = yhat + abar with
                // abar = -g1/2, so  a1*y + a0 = a1*yhat + (a1*abar + a0).
                let abar = m.neg(m.mul(self.g1, m.inv(2)));
                let t = m.sub(self.g0, m.mul(abar, abar)); // g(abar) up to sign
                let hv = match m.valuation(m.neg(t)) {
                    TruncatedValuation::Exact { half } => half / 2,
                    TruncatedValuation::AtLeastK { .. } => return None,
                };
                if hv % 2 == 0 {
                    // even root valuation: not genuinely ramified at this
                    // precision, no sound rule
                    return None;
                }
                // h(yhat) = hv (half-units, odd): odd/even parity split
                // between the two summands rules out cancellation.
                let a0c = m.add(self.a0, m.mul(self.a1, abar));
                let cand1 = match m.valuation(self.a1) {
                    TruncatedValuation::Exact { half } => TruncatedValuation::Exact { half: half + hv },
                    TruncatedValuation::AtLeastK { bound } => TruncatedValuation::AtLeastK { bound },
                };
                let cand0 = m.valuation(a0c);
                Some(cand1.min_known(cand0).capped(k))
            }
            Ramification::Split => None,
        }
    }
}
