//! Shared oracle machinery: forward-enumerated censuses of reducible
//! trace-zero classes, used to audit certificates from the outside.

use padic_irred::newton::ResiduePoly;
use padic_irred::ring::{Modulus, PrimeModulus};

/// Index of a trace-zero class by its coefficient digits base p^level.
#[allow(dead_code)] // each test binary uses its own subset of this module
pub fn class_code(f: &ResiduePoly) -> usize {
    let pk = f.modulus.pk();
    f.c[..f.degree() - 1]
        .iter()
        .rev()
        .fold(0u64, |acc, &c| acc * pk + c) as usize
}

/// Bitset over all trace-zero monic classes mod p^level marking the ones
/// that admit a monic factorization, built by enumerating every factor
/// pair product (the certificates never see this construction).
pub fn reducible_census(p: u64, n: usize, level: u32) -> Vec<bool> {
    let m = Modulus::new(PrimeModulus::new(p).unwrap(), level).unwrap();
    let pk = m.pk();
    let size = pk.pow(n as u32 - 1);
    let mut bits = vec![false; size as usize];
    let idx = |c: &[u64]| -> usize { c.iter().rev().fold(0u64, |acc, &x| acc * pk + x) as usize };
    match n {
        2 => {
            // (x+a)(x-a)
            for a in 0..pk {
                bits[idx(&[m.neg(m.mul(a, a))])] = true;
            }
        }
        3 => {
            // (x+a)(x^2-ax+c) = x^3 + (c-a^2)x + ac
            for a in 0..pk {
                let a2 = m.mul(a, a);
                for c in 0..pk {
                    bits[idx(&[m.mul(a, c), m.sub(c, a2)])] = true;
                }
            }
        }
        4 => {
            // (x+a)(x^3-ax^2+bx+c) = x^4 + (b-a^2)x^2 + (c+ab)x + ac
            for a in 0..pk {
                let a2 = m.mul(a, a);
                for b in 0..pk {
                    let c2 = m.sub(b, a2);
                    let ab = m.mul(a, b);
                    for c in 0..pk {
                        bits[idx(&[m.mul(a, c), m.add(c, ab), c2])] = true;
                    }
                }
            }
            // (x^2+ax+b)(x^2-ax+c) = x^4 + (b+c-a^2)x^2 + a(c-b)x + bc
            for a in 0..pk {
                let a2 = m.mul(a, a);
                for b in 0..pk {
                    for c in 0..pk {
                        bits[idx(&[
                            m.mul(b, c),
                            m.mul(a, m.sub(c, b)),
                            m.sub(m.add(b, c), a2),
                        ])] = true;
                    }
                }
            }
        }
        _ => unimplemented!("census implemented for degrees 2..4"),
    }
    bits
}

/// All trace-zero monic classes of the given degree mod p^level.
pub fn all_classes(p: u64, n: usize, level: u32) -> Vec<ResiduePoly> {
    let m = Modulus::new(PrimeModulus::new(p).unwrap(), level).unwrap();
    let pk = m.pk();
    let total = pk.pow(n as u32 - 1);
    (0..total)
        .map(|mut i| {
            let mut c = Vec::with_capacity(n);
            for _ in 0..n - 1 {
                c.push(i % pk);
                i /= pk;
            }
            c.push(0);
            ResiduePoly::new(m, c, true)
        })
        .collect()
}

/// Visits every lift of `f` to `level` (trace stays zero) and reports
/// whether `pred` holds for the lift's class code.
pub fn all_lifts_satisfy(f: &ResiduePoly, level: u32, pred: impl Fn(usize) -> bool) -> bool {
    let m = Modulus::new(f.modulus.prime(), level).unwrap();
    let pk = m.pk();
    let step = f.modulus.pk();
    let span = pk / step;
    let free = f.degree() - 1;
    let total = span.pow(free as u32);
    (0..total).all(|mut i| {
        let mut c = f.c.clone();
        for ci in c.iter_mut().take(free) {
            *ci += step * (i % span);
            i /= span;
        }
        let code = c[..free].iter().rev().fold(0u64, |acc, &x| acc * pk + x) as usize;
        pred(code)
    })
}
