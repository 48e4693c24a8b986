//! Exact rationals extended by `q = sqrt(p)`.
//!
//! Values are `a + b*q` with `a`, `b` in `Q` and `q^2 = p`. Half-integer
//! powers of `p` (Theorem-style exponents like `p^{-(r+1)/2}`) stay exact;
//! any final density must be invariant under `q -> -q`, i.e. have `b = 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

/// `p^e` for a signed exponent.
pub fn p_pow(p: u64, e: i64) -> BigRational {
    let mag = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QRat {
    pub p: u64,
    pub a: BigRational,
    pub b: BigRational,
}

impl QRat {
    pub fn from_rational(p: u64, a: BigRational) -> Self {
        QRat { p, a, b: BigRational::zero() }
    }

    pub fn from_int(p: u64, n: i64) -> Self {
        Self::from_rational(p, rat_int(n))
    }

    pub fn zero(p: u64) -> Self {
        Self::from_int(p, 0)
    }

    pub fn one(p: u64) -> Self {
        Self::from_int(p, 1)
    }

    /// `q = sqrt(p)` itself.
    pub fn q(p: u64) -> Self {
        QRat { p, a: BigRational::zero(), b: BigRational::one() }
    }

    /// `p^{half/2}` for a signed half-unit exponent.
    pub fn p_pow_half(p: u64, half: i64) -> Self {
        let whole = half.div_euclid(2);
        let rem = half.rem_euclid(2);
        let base = p_pow(p, whole);
        if rem == 0 {
            Self::from_rational(p, base)
        } else {
            QRat { p, a: BigRational::zero(), b: base }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn inv(&self) -> Self {
        // 1/(a + b q) = (a - b q) / (a^2 - b^2 p)
        assert!(!self.is_zero(), "division by zero");
        let pr = BigRational::from(BigInt::from(self.p));
        let denom = &self.a * &self.a - &self.b * &self.b * pr;
        assert!(!denom.is_zero(), "q-norm vanishes: p would be a rational square");
        QRat {
            p: self.p,
            a: &self.a / &denom,
            b: -(&self.b / &denom),
        }
    }

    /// The rational part, asserting the `q`-part cancelled.
    pub fn into_rational(self) -> Result<BigRational, QRat> {
        if self.b.is_zero() {
            Ok(self.a)
        } else {
            Err(self)
        }
    }

    pub fn abs(&self) -> Self {
        // valid for values whose sign is determined by the rational part
        // together with a same-sign q part; callers only use it on values
        // that are real numbers via q = +sqrt(p)
        let val_sign = self.numeric_sign();
        if val_sign < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Sign of the real number `a + b*sqrt(p)`.
    pub fn numeric_sign(&self) -> i32 {
        if self.b.is_zero() {
            return if self.a.is_zero() { 0 } else if self.a.is_positive() { 1 } else { -1 };
        }
        if self.a.is_zero() {
            return if self.b.is_positive() { 1 } else { -1 };
        }
        if self.a.is_positive() && self.b.is_positive() {
            return 1;
        }
        if self.a.is_negative() && self.b.is_negative() {
            return -1;
        }
        // mixed signs: compare a^2 vs b^2 p; sign follows the larger magnitude
        let pr = BigRational::from(BigInt::from(self.p));
        let a2 = &self.a * &self.a;
        let b2p = &self.b * &self.b * pr;
        let a_wins = a2 > b2p;
        let a_pos = self.a.is_positive();
        match (a_wins, a_pos) {
            (true, true) => 1,
            (true, false) => -1,
            (false, true) => -1,
            (false, false) => 1,
        }
    }

    fn check(&self, other: &QRat) {
        assert_eq!(self.p, other.p, "mixed base primes in QRat arithmetic");
    }
}

impl Add for &QRat {
    type Output = QRat;
    fn add(self, rhs: &QRat) -> QRat {
        self.check(rhs);
        QRat { p: self.p, a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
}

impl Sub for &QRat {
    type Output = QRat;
    fn sub(self, rhs: &QRat) -> QRat {
        self.check(rhs);
        QRat { p: self.p, a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
}

impl Mul for &QRat {
    type Output = QRat;
    fn mul(self, rhs: &QRat) -> QRat {
        self.check(rhs);
        let pr = BigRational::from(BigInt::from(self.p));
        QRat {
            p: self.p,
            a: &self.a * &rhs.a + &self.b * &rhs.b * pr,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Div for &QRat {
    type Output = QRat;
    fn div(self, rhs: &QRat) -> QRat {
        self * &rhs.inv()
    }
}

impl Neg for &QRat {
    type Output = QRat;
    fn neg(self) -> QRat {
        QRat { p: self.p, a: -&self.a, b: -&self.b }
    }
}

impl Neg for QRat {
    type Output = QRat;
    fn neg(self) -> QRat {
        -&self
    }
}

impl fmt::Display for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + ({})*sqrt({})", self.a, self.b, self.p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_squares_to_p() {
        let q = QRat::q(5);
        assert_eq!(&q * &q, QRat::from_int(5, 5));
    }

    #[test]
    fn half_powers() {
        assert_eq!(QRat::p_pow_half(5, 4), QRat::from_int(5, 25));
        assert_eq!(QRat::p_pow_half(5, 1), QRat::q(5));
        let v = QRat::p_pow_half(5, -3); // p^{-3/2} = q / p^2
        assert_eq!(&v * &QRat::p_pow_half(5, 3), QRat::one(5));
    }

    #[test]
    fn inverse_roundtrip() {
        let x = QRat { p: 7, a: rat(3, 4), b: rat(-2, 5) };
        assert_eq!(&x * &x.inv(), QRat::one(7));
    }

    #[test]
    fn randomized_algebraic_identities() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let mut v = || QRat {
                p: 5,
                a: rat(rng.gen_range(-20..20), rng.gen_range(1..9)),
                b: rat(rng.gen_range(-20..20), rng.gen_range(1..9)),
            };
            let (x, y, z) = (v(), v(), v());
            assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            assert_eq!(&x * &y, &y * &x);
            assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            if !x.is_zero() {
                assert_eq!(&(&y / &x) * &x, y);
            }
        }
    }

    #[test]
    fn numeric_sign_mixed() {
        // 9/4 - sqrt(5) > 0 (sqrt 5 ~ 2.236 > 2.25? no: 2.25^2 = 5.0625 > 5)
        let x = QRat { p: 5, a: rat(9, 4), b: rat(-1, 1) };
        assert_eq!(x.numeric_sign(), 1);
        // 2 - sqrt(5) < 0
        let y = QRat { p: 5, a: rat(2, 1), b: rat(-1, 1) };
        assert_eq!(y.numeric_sign(), -1);
        assert_eq!(y.abs(), -&y);
    }
}
