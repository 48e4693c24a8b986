//! Truncation-aware Newton polygons and the polygon classification rules.

use crate::ffpoly::FFPoly;
use crate::ring::{Modulus, TruncatedValuation};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NewtonError {
    #[error("polygon_class_measure requires prime degree and 0 < e < n (n={n}, e={e})")]
    MeasureHypothesis { n: u32, e: u32 },
    #[error("scale_phi requires membership in S and level > degree")]
    ScaleHypothesis,
    #[error("coefficient of x^{i} is not divisible by p^{need}")]
    ScaleDivisibility { i: usize, need: u32 },
}

/// Three-way classification of a residue class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    CertIrreducible,
    CertReducible,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ternary {
    Yes,
    No,
    Unknown,
}

/// Monic degree-n polynomial with coefficients known mod p^k. The leading 1
/// is implicit; `c` holds c_0..c_{n-1}. `trace_zero` asserts c_{n-1} is
/// identically zero (not merely zero mod p^k).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResiduePoly {
    pub modulus: Modulus,
    pub c: Vec<u64>,
    pub trace_zero: bool,
}

impl ResiduePoly {
    pub fn new(modulus: Modulus, c: Vec<u64>, trace_zero: bool) -> Self {
        let c: Vec<u64> = c.into_iter().map(|x| modulus.reduce(x)).collect();
        if trace_zero {
            assert_eq!(c.last(), Some(&0), "trace_zero with nonzero x^{{n-1}} term");
        }
        ResiduePoly { modulus, c, trace_zero }
    }

    pub fn degree(&self) -> usize {
        self.c.len()
    }

    /// Coefficients ascending including the leading 1.
    pub fn full_coeffs(&self) -> Vec<u64> {
        let mut v = self.c.clone();
        v.push(1);
        v
    }

    pub fn mod_p(&self) -> FFPoly {
        FFPoly::new(self.modulus.p(), self.full_coeffs())
    }

    pub fn eval(&self, x: u64) -> u64 {
        let m = &self.modulus;
        self.full_coeffs()
            .iter()
            .rev()
            .fold(0u64, |acc, &ci| m.add(m.mul(acc, x), ci))
    }

    /// Coefficients of the derivative, ascending (length n).
    pub fn derivative_coeffs(&self) -> Vec<u64> {
        let m = &self.modulus;
        self.full_coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &ci)| m.mul(i as u64 % m.pk(), ci))
            .collect()
    }

    pub fn at_level(&self, j: u32) -> ResiduePoly {
        let sub = self.modulus.at_level(j);
        ResiduePoly {
            modulus: sub,
            c: self.c.iter().map(|&x| sub.reduce(x)).collect(),
            trace_zero: self.trace_zero,
        }
    }
}

/// Lower convex hull of the valuation points, with a determinedness flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub determined: bool,
    /// Hull vertices left to right, ending at (n, 0). Built from exactly
    /// known points only.
    pub vertices: Vec<(u32, u32)>,
    pub lattice_points_on_hull: u32,
}

impl NewtonPolygon {
    pub fn slopes(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }
}

pub fn newton_polygon(f: &ResiduePoly) -> NewtonPolygon {
    let n = f.degree();
    let k = f.modulus.level();
    let mut exact: Vec<(u32, u32)> = Vec::new();
    let mut unknown: Vec<u32> = Vec::new();
    for (i, &ci) in f.c.iter().enumerate() {
        if f.trace_zero && i == n - 1 {
            continue; // structurally zero: no point at all
        }
        match f.modulus.valuation(ci) {
            TruncatedValuation::Exact { half } => exact.push((i as u32, half / 2)),
            TruncatedValuation::AtLeastK { .. } => unknown.push(i as u32),
        }
    }
    exact.push((n as u32, 0));

    // lower convex hull, left to right (Andrew's monotone chain, lower part)
    let mut hull: Vec<(u32, u32)> = Vec::new();
    for &pt in &exact {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b if it is on or above segment a-pt
            let cross = (b.0 as i64 - a.0 as i64) * (pt.1 as i64 - a.1 as i64)
                - (b.1 as i64 - a.1 as i64) * (pt.0 as i64 - a.0 as i64);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    // hull value at abscissa i, compared against k: the hull is only
    // trustworthy if every unknown point (valuation >= k) lies strictly
    // above it
    let mut determined = true;
    for &i in &unknown {
        if i < hull[0].0 {
            // left of the leftmost exact point: always on the hull
            determined = false;
            break;
        }
        for w in hull.windows(2) {
            let (x1, y1) = (w[0].0 as i64, w[0].1 as i64);
            let (x2, y2) = (w[1].0 as i64, w[1].1 as i64);
            if (i as i64) < x1 || (i as i64) > x2 {
                continue;
            }
            // k <= line(i) on segment: k*(x2-x1) <= y1*(x2-x1) + (y2-y1)*(i-x1)
            if (k as i64) * (x2 - x1) <= y1 * (x2 - x1) + (y2 - y1) * (i as i64 - x1) {
                determined = false;
            }
        }
        if !determined {
            break;
        }
    }

    let lattice = hull
        .windows(2)
        .map(|w| {
            let dx = w[1].0 - w[0].0;
            let dy = w[0].1.abs_diff(w[1].1);
            num_integer::gcd(dx, dy)
        })
        .sum::<u32>()
        + 1;

    NewtonPolygon {
        determined,
        vertices: hull,
        lattice_points_on_hull: lattice,
    }
}

pub fn polygon_classify(np: &NewtonPolygon) -> ClassLabel {
    if !np.determined {
        return ClassLabel::Undecided;
    }
    if np.slopes() >= 2 {
        ClassLabel::CertReducible
    } else if np.slopes() == 1 && np.lattice_points_on_hull == 2 {
        ClassLabel::CertIrreducible
    } else {
        ClassLabel::Undecided
    }
}

/// Membership in S: every coefficient satisfies v(c_i) >= n - i.
pub fn in_set_s(f: &ResiduePoly) -> Ternary {
    let n = f.degree();
    let k = f.modulus.level();
    let mut unknown = false;
    for (i, &ci) in f.c.iter().enumerate() {
        if f.trace_zero && i == n - 1 {
            continue;
        }
        let need = (n - i) as u32;
        match f.modulus.valuation(ci) {
            TruncatedValuation::Exact { half } => {
                if half / 2 < need {
                    return Ternary::No;
                }
            }
            TruncatedValuation::AtLeastK { .. } => {
                if k < need {
                    unknown = true;
                }
            }
        }
    }
    if unknown {
        Ternary::Unknown
    } else {
        Ternary::Yes
    }
}

/// The scaling map f(x) -> f(px)/p^n, defined on S, dropping n levels.
pub fn scale_phi(f: &ResiduePoly) -> Result<ResiduePoly, NewtonError> {
    let n = f.degree();
    let k = f.modulus.level();
    if in_set_s(f) != Ternary::Yes || k <= n as u32 {
        return Err(NewtonError::ScaleHypothesis);
    }
    let p = f.modulus.p();
    let sub = f.modulus.at_level(k - n as u32);
    let mut c = Vec::with_capacity(n);
    for (i, &ci) in f.c.iter().enumerate() {
        let need = (n - i) as u32;
        let div = p.pow(need);
        if ci % div != 0 {
            return Err(NewtonError::ScaleDivisibility { i, need });
        }
        c.push(sub.reduce(ci / div));
    }
    Ok(ResiduePoly {
        modulus: sub,
        c,
        trace_zero: f.trace_zero,
    })
}

/// Haar measure (within the trace-zero monic space) of the class whose
/// polygon is the single segment from (0, e) to (n, 0), for prime n.
pub fn polygon_class_measure(n: u32, e: u32, p: u64) -> Result<BigRational, NewtonError> {
    if e == 0 || e >= n || !is_prime_u32(n) {
        return Err(NewtonError::MeasureHypothesis { n, e });
    }
    let exp = (n * e + n + e - 1) / 2;
    debug_assert_eq!((n * e + n + e - 1) % 2, 0);
    Ok(BigRational::new(
        BigInt::from(p - 1),
        BigInt::from(p).pow(exp),
    ))
}

fn is_prime_u32(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Measure of S within the trace-zero monic space of degree n.
pub fn measure_of_s(n: u32, p: u64) -> BigRational {
    // coefficients c_0..c_{n-2} need v(c_i) >= n - i; c_{n-1} is free (zero)
    let exp: u32 = (2..=n).sum(); // sum of (n - i) for i = 0..n-2
    BigRational::new(BigInt::one(), BigInt::from(p).pow(exp))
}
