//! Cross-checks between independent implementations: the structured
//! factorization search against the naive oracle, and the polygon
//! classifier against a forward-enumerated reducibility census.

mod common;

use common::{all_classes, all_lifts_satisfy, class_code, reducible_census};
use padic_irred::classify::{find_factorizations, Strategy};
use padic_irred::newton::{newton_polygon, polygon_classify, ClassLabel};

#[test]
fn strategy_agreement_exhaustive() {
    for p in [3u64, 5] {
        for n in [2usize, 3, 4] {
            for k in 1..=2u32 {
                for f in all_classes(p, n, k) {
                    let naive = find_factorizations(&f, Strategy::Naive);
                    let structured = find_factorizations(&f, Strategy::Structured);
                    assert_eq!(
                        naive, structured,
                        "strategy mismatch at p={p}, n={n}, k={k}, f={:?}",
                        f.c
                    );
                }
            }
        }
    }
}

#[test]
fn polygon_agrees_with_census() {
    let p = 3;
    for n in [2usize, 3] {
        for k in 1..=4u32 {
            let census = reducible_census(p, n, k + 2);
            for f in all_classes(p, n, k) {
                match polygon_classify(&newton_polygon(&f)) {
                    ClassLabel::CertIrreducible => {
                        assert!(
                            all_lifts_satisfy(&f, k + 2, |code| !census[code]),
                            "polygon-irreducible class with a factorable lift: \
                             n={n}, k={k}, f={:?}",
                            f.c
                        );
                    }
                    ClassLabel::CertReducible => {
                        assert!(
                            all_lifts_satisfy(&f, k + 2, |code| census[code]),
                            "polygon-reducible class with an unfactorable lift: \
                             n={n}, k={k}, f={:?}",
                            f.c
                        );
                    }
                    ClassLabel::Undecided => {}
                }
            }
        }
    }
}

#[test]
fn census_sanity() {
    // the degree-2 census mod 3 marks exactly the classes with a root:
    // x^2, x^2 - 1 are products, x^2 + 1 is irreducible mod 3
    let census = reducible_census(3, 2, 1);
    assert_eq!(census, vec![true, false, true]);
    // census indices line up with class codes
    let f = &all_classes(3, 2, 1)[2];
    assert_eq!(class_code(f), 2);
}
