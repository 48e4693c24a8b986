//! Exact closed-form densities and the assembly identities tying them to
//! their proof-level series. Formulas are transcribed twice — once from the
//! theorem statements and once from the series in the proofs — and equality
//! is asserted at call time, since transcription errors are the dominant
//! risk. Square roots of p are handled exactly in `QRat`.

use crate::qrat::{p_pow, rat_int, QRat};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClosedFormError {
    #[error("degree r = {0} must be prime")]
    CompositeDegree(u64),
    #[error("the case r = p = {0} is open; the formula requires r != p")]
    DegreeEqualsP(u64),
    #[error("p = 2 is excluded by hypothesis")]
    PTwo,
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Density of irreducible monic polynomials of prime degree r over Z_p
/// (r != p). Evaluates the closed form in Q(sqrt p) and checks it against
/// the unsimplified proof series before returning the rational value.
pub fn density_prime_degree(r: u64, p: u64) -> Result<BigRational, ClosedFormError> {
    if !is_prime(r) {
        return Err(ClosedFormError::CompositeDegree(r));
    }
    if r == p {
        return Err(ClosedFormError::DegreeEqualsP(r));
    }
    let qr = |x: BigRational| QRat::from_rational(p, x);
    let one = QRat::one(p);
    let pr = qr(p_pow(p, r as i64));
    let pq = qr(p_pow(p, 1));
    // half-unit exponents; integral whenever r is odd, half-integral at r=2
    let e1 = QRat::p_pow_half(p, -((r + 1) as i64));
    let e2 = QRat::p_pow_half(p, -(((r + 1) * (r - 1)) as i64));
    let e3 = qr(p_pow(p, -((r * (r + 1) / 2 - 1) as i64)));
    let rq = QRat::from_int(p, r as i64);
    let num = &(&(&pr - &pq) * &(&one - &e1)) + &(&(&rq * &(&pq - &one)) * &(&one - &e2));
    let den = &(&(&rq * &pr) * &(&one - &e3)) * &(&one - &e1);
    let closed = (&num / &den)
        .into_rational()
        .expect("sqrt(p) terms must cancel in the prime-degree density");

    // independent transcription: measure series divided by the S-quotient
    let mut series = p_pow(p, -(r as i64)) * (p_pow(p, r as i64) - p_pow(p, 1)) / rat_int(r as i64);
    let mut tail = QRat::zero(p);
    for e in 1..r {
        tail = &tail + &QRat::p_pow_half(p, -((r * e + r + e - 1) as i64));
    }
    let tail = &QRat::from_int(p, (p - 1) as i64) * &tail;
    series += tail
        .into_rational()
        .expect("polygon-measure series must be rational");
    let series = series / (BigRational::one() - p_pow(p, -((r * (r + 1) / 2 - 1) as i64)));
    assert_eq!(closed, series, "closed form vs proof series (r={r}, p={p})");
    Ok(closed)
}

/// Density of irreducible monic quartics over Z_p, p odd. Checks the
/// closed form against the M1..M4 measure assembly.
pub fn density_quartic(p: u64) -> Result<BigRational, ClosedFormError> {
    if p == 2 {
        return Err(ClosedFormError::PTwo);
    }
    let pp = |e: i64| p_pow(p, e);
    let num = pp(12) + pp(11) + rat_int(2) * pp(10) + rat_int(4) * pp(9) - rat_int(2) * pp(8)
        + pp(7)
        + rat_int(3) * pp(6)
        - rat_int(6) * pp(5)
        + rat_int(6) * pp(4)
        - rat_int(4) * pp(3)
        - rat_int(2) * pp(2)
        - rat_int(4);
    let den = rat_int(4) * (pp(1) + rat_int(1)) * (pp(2) + rat_int(1)) * (pp(9) - rat_int(1));
    let closed = num / den;

    let (m1, m2, m3, m4) = quartic_measure_components(p)?;
    let assembled = (m1 + m2 + m3 + m4) / (BigRational::one() - pp(-9));
    assert_eq!(closed, assembled, "quartic closed form vs M-assembly (p={p})");
    Ok(closed)
}

/// The four measures of irreducible quartics below the (0,4)-(4,0) line:
/// mod-p irreducibles, the double-quadratic family, the slope -1/2 family,
/// and the fully-determined polygons e = 1, 3.
pub fn quartic_measure_components(
    p: u64,
) -> Result<(BigRational, BigRational, BigRational, BigRational), ClosedFormError> {
    if p == 2 {
        return Err(ClosedFormError::PTwo);
    }
    let pp = |e: i64| p_pow(p, e);
    let pm1 = rat_int((p - 1) as i64);
    let m1 = (pp(4) - pp(2)) / (rat_int(4) * pp(4));
    let m2 = &pm1 * (rat_int(2) * pp(2) + rat_int(1)) / (rat_int(4) * pp(3) * (pp(2) + rat_int(1)));
    let m3 = &pm1 * (pp(2) + rat_int(3) * pp(1) + rat_int(1))
        / (rat_int(2) * pp(6) * (pp(2) + pp(1)));
    let m4 = &pm1 * pp(-4) + &pm1 * pp(-9);
    // the per-family densities must reassemble the measures exactly
    let zeta_count = &pm1 / rat_int(2); // non-residues -zeta mod p
    assert_eq!(
        &m2 / (&zeta_count * pp(-3)),
        density_double_quadratic(p)?,
        "M2 vs double-quadratic density (p={p})"
    );
    assert_eq!(
        &m3 / (&pm1 * pp(-6)),
        density_slope_half(p)?,
        "M3 vs slope-half density (p={p})"
    );
    Ok((m1, m2, m3, m4))
}

/// Density of irreducibles among monic quartics congruent to (x^2+zeta)^2
/// mod p, -zeta a non-residue: (2p^2+1)/(2(p^2+1)).
pub fn density_double_quadratic(p: u64) -> Result<BigRational, ClosedFormError> {
    if p == 2 {
        return Err(ClosedFormError::PTwo);
    }
    let closed = (rat_int(2) * p_pow(p, 2) + rat_int(1))
        / (rat_int(2) * (p_pow(p, 2) + rat_int(1)));
    // series check: sum the level-j contributions with an exact tail.
    // Even and odd j pair up into a geometric series with ratio p^{-4}.
    let even = p_pow(p, 2) * (p_pow(p, 2) - rat_int(1)) * p_pow(p, -4);
    let odd = p_pow(p, 2) * (p_pow(p, 2) - rat_int(1)) / rat_int(2) * p_pow(p, -6);
    let series = (even + odd) / (BigRational::one() - p_pow(p, -4));
    assert_eq!(closed, series, "double-quadratic closed form vs series (p={p})");
    Ok(closed)
}

/// Partial sums of the double-quadratic level series through level j_max:
/// level j contributes p^{j-2} (p^3-p) p^{-3j+3}, halved for odd j.
pub fn double_quadratic_partial_sums(p: u64, j_max: u32) -> Vec<BigRational> {
    let mut out = Vec::new();
    let mut acc = BigRational::zero();
    for j in 2..=i64::from(j_max) {
        let mut term = p_pow(p, j - 2) * (p_pow(p, 3) - p_pow(p, 1)) * p_pow(p, -3 * j + 3);
        if j % 2 == 1 {
            term /= rat_int(2);
        }
        acc += term;
        out.push(acc.clone());
    }
    out
}

/// Density of irreducibles in the slope -1/2 quartic family:
/// (p^2+3p+1)/(2p(p+1)) = 1/(2p) + (p+2)/(2(p+1)).
pub fn density_slope_half(p: u64) -> Result<BigRational, ClosedFormError> {
    if p == 2 {
        return Err(ClosedFormError::PTwo);
    }
    let pp = |e: i64| p_pow(p, e);
    let closed = (pp(2) + rat_int(3) * pp(1) + rat_int(1))
        / (rat_int(2) * pp(1) * (pp(1) + rat_int(1)));
    let split = rat_int(1) / (rat_int(2) * pp(1))
        + (pp(1) + rat_int(2)) / (rat_int(2) * (pp(1) + rat_int(1)));
    assert_eq!(closed, split, "slope-half closed form vs split form (p={p})");
    // the measure series M, divided back by the family measure (p-1)p^{-6}
    let pm1 = rat_int((p - 1) as i64);
    let mu_factor = BigRational::one() - pp(-2) - pp(-1) * &pm1 / rat_int(2);
    let m = pp(-7) * &pm1 / rat_int(2)
        + &pm1 * mu_factor * pp(-6) / (BigRational::one() - pp(-2));
    assert_eq!(
        closed,
        &m / (&pm1 * pp(-6)),
        "slope-half closed form vs M-series (p={p})"
    );
    Ok(closed)
}

/// |I - 1/n|, the residual of the 1/n approximation; callers compare it
/// against p^{-n/2} on their grids (squaring both sides when n is odd).
pub fn approx_residual(n: u64, i: &BigRational) -> BigRational {
    let diff = i - rat_int(1) / rat_int(n as i64);
    if diff < BigRational::zero() {
        -diff
    } else {
        diff
    }
}

/// The grid diagnostic |I - 1/n| <= p^{-n/2}, compared exactly (via squares
/// when n is odd so no irrational arithmetic is needed).
pub fn residual_within_bound(n: u64, p: u64, i: &BigRational) -> bool {
    let r = approx_residual(n, i);
    if n % 2 == 0 {
        r <= p_pow(p, -((n / 2) as i64))
    } else {
        &r * &r <= p_pow(p, -(n as i64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qrat::rat;

    #[test]
    fn quadratic_closed_form() {
        for p in [3u64, 5, 7, 11, 13] {
            let i = density_prime_degree(2, p).unwrap();
            // sqrt(p) cancels down to (p+2)/(2(p+1))
            let expect = rat_int((p + 2) as i64) / rat_int(2 * (p + 1) as i64);
            assert_eq!(i, expect, "p={p}");
        }
        assert_eq!(density_prime_degree(2, 5).unwrap(), rat(7, 12));
    }

    #[test]
    fn prime_degree_grid() {
        for r in [3u64, 5, 7] {
            for p in [3u64, 5, 7, 11] {
                if p == r {
                    assert_eq!(
                        density_prime_degree(r, p),
                        Err(ClosedFormError::DegreeEqualsP(r))
                    );
                    continue;
                }
                let i = density_prime_degree(r, p).unwrap();
                assert!(i > BigRational::zero() && i < BigRational::one());
            }
        }
        assert_eq!(density_prime_degree(3, 5).unwrap(), rat(276, 781));
        assert_eq!(
            density_prime_degree(4, 5),
            Err(ClosedFormError::CompositeDegree(4))
        );
    }

    #[test]
    fn quartic_assembly() {
        for p in [3u64, 5, 7, 11] {
            let i = density_quartic(p).unwrap();
            assert!(i > BigRational::zero() && i < BigRational::one());
        }
        assert_eq!(density_quartic(2), Err(ClosedFormError::PTwo));
    }

    #[test]
    fn measure_component_examples() {
        let (m1, _, _, _) = quartic_measure_components(5).unwrap();
        assert_eq!(m1, rat(6, 25));
        let (_, _, _, m4) = quartic_measure_components(3).unwrap();
        assert_eq!(m4, rat(2, 81) + rat(2, 19683));
    }

    #[test]
    fn double_quadratic_values_and_partial_sums() {
        assert_eq!(density_double_quadratic(5).unwrap(), rat(51, 52));
        assert_eq!(density_double_quadratic(3).unwrap(), rat(19, 20));
        let sums = double_quadratic_partial_sums(5, 3);
        assert_eq!(*sums.last().unwrap(), rat(24, 25) + rat(12, 625));
        for p in [3u64, 5, 7] {
            let closed = density_double_quadratic(p).unwrap();
            let sums = double_quadratic_partial_sums(p, 9);
            for w in sums.windows(2) {
                assert!(w[0] < w[1], "partial sums strictly increasing");
            }
            for (idx, s) in sums.iter().enumerate() {
                let j = idx as i64 + 2;
                assert!(s < &closed);
                // tail after the level-j term is below p^{-2j+2}
                assert!(&closed - s < p_pow(p, -2 * j + 2), "tail at j={j}, p={p}");
            }
        }
    }

    #[test]
    fn slope_half_values() {
        assert_eq!(density_slope_half(5).unwrap(), rat(41, 60));
        assert_eq!(density_slope_half(3).unwrap(), rat(19, 24));
        assert_eq!(rat(41, 60), rat(1, 10) + rat(7, 12));
    }

    #[test]
    fn residual_diagnostic() {
        let i2 = density_prime_degree(2, 5).unwrap();
        assert_eq!(approx_residual(2, &i2), rat(1, 12));
        assert!(residual_within_bound(2, 5, &i2));
        let i4 = density_quartic(3).unwrap();
        assert!(residual_within_bound(4, 3, &i4));
        let i3 = density_prime_degree(3, 5).unwrap();
        assert!(residual_within_bound(3, 5, &i3));
        // grid check of the constant-1 diagnostic
        for (n, p) in [(2u64, 3u64), (2, 7), (2, 11), (3, 7), (5, 3), (7, 3)] {
            let i = density_prime_degree(n, p).unwrap();
            assert!(residual_within_bound(n, p, &i), "n={n}, p={p}");
        }
    }
}
