//! Acceptance gate: one pass/fail line per criterion.

mod common;

use common::{all_classes, all_lifts_satisfy, reducible_census};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use padic_irred::claims::{
    canonical_zeta, verify_case_counts, verify_hensel_moduli, verify_table2_pattern,
    verify_uniqueness, Family,
};
use padic_irred::classify::{
    classify_residue, density_bracket, lift_table, mc_estimate, ClassSpec, Restriction,
    DEFAULT_WORK_LIMIT,
};
use padic_irred::closedform::{
    density_double_quadratic, density_prime_degree, density_quartic, density_slope_half,
    quartic_measure_components,
};
use padic_irred::ffpoly::{all_monic, is_irreducible, nu, nu_no_trace, FFPoly};
use padic_irred::newton::ClassLabel;
use padic_irred::qrat::{p_pow, rat};

fn report(criterion: &str, pass: bool) {
    println!(
        "acceptance {criterion}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance {criterion} failed");
}

#[test]
fn criterion_1_table_1_reproduction() {
    let spec = ClassSpec {
        p: 5,
        degree: 3,
        restriction: Restriction::All,
    };
    let t = lift_table(&spec, 7, DEFAULT_WORK_LIMIT).unwrap();
    let got: Vec<_> = t
        .rows
        .iter()
        .map(|r| (r.irreducible, r.ambiguous, r.hensel))
        .collect();
    let want = vec![
        (8, 1, 16),
        (20, 5, 0),
        (20, 5, 100),
        (40, 85, 0),
        (100, 25, 2000),
        (100, 525, 0),
        (200, 425, 12500),
    ];
    report("criterion 1 (Table 1, trace-zero cubics mod 5^k)", got == want);
}

#[test]
fn criterion_2_table_2_reproduction() {
    let spec = ClassSpec {
        p: 5,
        degree: 4,
        restriction: Restriction::CongruentModP(FFPoly::new(5, vec![4, 0, 4, 0, 1])),
    };
    let t = lift_table(&spec, 7, DEFAULT_WORK_LIMIT).unwrap();
    let per_parent = t.per_parent();
    let want_pp: Vec<(u32, u64, u64, u64)> = vec![
        (1, 0, 1, 0),
        (2, 120, 5, 0),
        (3, 60, 5, 60),
        (4, 120, 5, 0),
        (5, 60, 5, 60),
        (6, 120, 5, 0),
        (7, 60, 5, 60),
    ];
    let absolute_consistent = t.rows.iter().enumerate().all(|(i, r)| {
        let pp = &want_pp[i];
        r.irreducible == pp.1 * r.parents
            && r.ambiguous == pp.2 * r.parents
            && r.hensel == pp.3 * r.parents
    });
    report(
        "criterion 2 (Table 2, (x^2+2)^2 family mod 5^k, per-parent)",
        per_parent == Some(want_pp.clone()) && absolute_consistent,
    );
}

#[test]
fn criterion_3_closed_form_identities() {
    // the closed-form functions assert agreement with their series /
    // assembly forms internally; catch_unwind turns any violation into
    // a FAIL line instead of a bare panic
    let pass = std::panic::catch_unwind(|| {
        for r in [3u64, 5, 7] {
            for p in [3u64, 5, 7, 11] {
                if p == r {
                    continue;
                }
                let v = density_prime_degree(r, p).unwrap();
                assert!(v > BigRational::zero() && v < BigRational::one());
            }
        }
        for p in [3u64, 5, 7, 11] {
            let q = density_prime_degree(2, p).unwrap();
            assert_eq!(q, rat(p as i64 + 2, 2 * (p as i64 + 1)));
            let (m1, m2, m3, m4) = quartic_measure_components(p).unwrap();
            let assembled = (m1 + m2 + m3 + m4) / (BigRational::one() - p_pow(p, -9));
            assert_eq!(density_quartic(p).unwrap(), assembled);
        }
        for p in [3u64, 5, 7] {
            let split = rat(1, 2 * p as i64) + rat(p as i64 + 2, 2 * (p as i64 + 1));
            assert_eq!(density_slope_half(p).unwrap(), split);
        }
    })
    .is_ok();
    report("criterion 3 (closed-form identities)", pass);
}

#[test]
fn criterion_4_bracket_containment() {
    let mut pass = true;
    let contains = |b: &padic_irred::classify::DensityBracket, v: &BigRational| {
        b.lower <= *v && *v <= b.upper
    };
    for (degree, ps) in [(3u32, vec![5u64, 7]), (2, vec![3, 5, 7])] {
        for p in ps {
            let spec = ClassSpec {
                p,
                degree,
                restriction: Restriction::All,
            };
            let b = density_bracket(&spec, 7, true, DEFAULT_WORK_LIMIT).unwrap();
            let target = density_prime_degree(degree as u64, p).unwrap();
            pass &= contains(&b, &target) && b.width() <= p_pow(p, -4);
        }
    }
    for p in [3u64, 5] {
        let z = canonical_zeta(p);
        let spec = ClassSpec {
            p,
            degree: 4,
            restriction: Restriction::CongruentModP(FFPoly::new(
                p,
                vec![(z * z) % p, 0, (2 * z) % p, 0, 1],
            )),
        };
        let b = density_bracket(&spec, 7, false, DEFAULT_WORK_LIMIT).unwrap();
        let target = density_double_quadratic(p).unwrap();
        pass &= contains(&b, &target) && b.width() <= p_pow(p, -11);
    }
    {
        let spec = ClassSpec {
            p: 3,
            degree: 4,
            restriction: Restriction::SlopeHalfSet,
        };
        let b = density_bracket(&spec, 7, false, DEFAULT_WORK_LIMIT).unwrap();
        let target = density_slope_half(3).unwrap();
        pass &= contains(&b, &target);
    }
    report("criterion 4 (bracket containment and shrinkage)", pass);
}

#[test]
fn criterion_5_full_quartic_bracket() {
    let spec = ClassSpec {
        p: 3,
        degree: 4,
        restriction: Restriction::All,
    };
    let b = density_bracket(&spec, 9, true, DEFAULT_WORK_LIMIT * 10).unwrap();
    let target = density_quartic(3).unwrap();
    let pass = b.lower <= target && target <= b.upper && b.width() <= p_pow(3, -6);
    report("criterion 5 (full quartic bracket, p=3, kmax=9)", pass);
}

#[test]
fn criterion_6_appendix_verification() {
    let mut pass = true;
    for p in [3u64, 5] {
        let zeta = canonical_zeta(p);
        pass &= verify_hensel_moduli(Family::DoubleQuadratic { zeta }, p, 0..=1)
            .unwrap()
            .passed();
        pass &= verify_hensel_moduli(Family::SlopeHalf, p, 0..=1)
            .unwrap()
            .passed();
        for claim in [2u8, 4, 5, 6] {
            for k in 0..=1u32 {
                pass &= verify_uniqueness(claim, p, k).unwrap().passed();
            }
        }
        for i in 3..=7u32 {
            pass &= verify_case_counts(p, i).unwrap().passed();
        }
        pass &= verify_table2_pattern(zeta, p, 5).unwrap().passed();
    }
    report("criterion 6 (appendix claims 1-6, counts, table 2 pattern)", pass);
}

#[test]
fn criterion_7_counting_oracles() {
    let mut pass = true;
    let mut grid: Vec<(u32, u64)> = Vec::new();
    for n in 2..=4u32 {
        for p in [3u64, 5, 7] {
            grid.push((n, p));
        }
    }
    grid.push((5, 3));
    for (n, p) in grid {
        let mut irr = 0u64;
        let mut irr_tz = 0u64;
        for f in all_monic(p, n as usize) {
            if is_irreducible(&f) {
                irr += 1;
                if f.coeff(n as usize - 1) == 0 {
                    irr_tz += 1;
                }
            }
        }
        pass &= nu(n, p) == irr;
        match nu_no_trace(n, p) {
            // the trace-zero formula requires p coprime to n
            Ok(v) => pass &= n as u64 % p != 0 && v == irr_tz,
            Err(_) => pass &= n as u64 % p == 0,
        }
    }
    report("criterion 7 (nu / nu' vs exhaustive censuses)", pass);
}

#[test]
fn criterion_8_soundness_suite() {
    let p = 3;
    let mut pass = true;
    for n in [2usize, 3, 4] {
        for k in 1..=3u32 {
            let census = reducible_census(p, n, k + 2);
            for f in all_classes(p, n, k) {
                match classify_residue(&f).label {
                    ClassLabel::CertIrreducible => {
                        pass &= all_lifts_satisfy(&f, k + 2, |code| !census[code]);
                    }
                    ClassLabel::CertReducible => {
                        pass &= all_lifts_satisfy(&f, k + 2, |code| census[code]);
                    }
                    ClassLabel::Undecided => {}
                }
            }
        }
    }
    report("criterion 8 (soundness suite, p=3, n<=4, k<=3)", pass);
}

#[test]
fn criterion_9_mc_diagnostic() {
    // statistical, non-gating in spirit: a 99% CI may miss; on a miss the
    // check reruns once with the next seed (policy documented in README)
    let check = |spec: &ClassSpec, precision: u32, target: f64| -> bool {
        (1..=2u64).any(|seed| {
            let r = mc_estimate(spec, precision, 100_000, seed).unwrap();
            r.ci_low <= target && target <= r.ci_high
        })
    };
    let mut pass = true;
    let deg2 = ClassSpec {
        p: 5,
        degree: 2,
        restriction: Restriction::All,
    };
    pass &= check(&deg2, 8, density_prime_degree(2, 5).unwrap().to_f64().unwrap());
    let deg4 = ClassSpec {
        p: 3,
        degree: 4,
        restriction: Restriction::All,
    };
    pass &= check(&deg4, 9, density_quartic(3).unwrap().to_f64().unwrap());
    let fam = ClassSpec {
        p: 5,
        degree: 4,
        restriction: Restriction::CongruentModP(FFPoly::new(5, vec![4, 0, 4, 0, 1])),
    };
    pass &= check(&fam, 8, density_double_quadratic(5).unwrap().to_f64().unwrap());
    report("criterion 9 (Monte Carlo diagnostic, N=1e5)", pass);
}
