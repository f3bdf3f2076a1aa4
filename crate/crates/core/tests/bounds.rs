//! Reference bounds checked against exact rational evaluation.

use auctionlab::harness::bounds::{
    greedy_chain_mean, kcopy_asymptotic_fraction, kcopy_ranking_bound, random_construction_bound,
    ranking_simulate_bound, ranking_simulate_ratio,
};
use num_bigint::BigInt;
use num_rational::BigRational;

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn frac(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn close(approx: f64, exact: &BigRational, tol: f64) -> bool {
    let a = BigRational::from_float(approx).unwrap();
    let diff = if &a > exact { &a - exact } else { exact - &a };
    diff <= BigRational::from_float(tol).unwrap()
}

/// `sum_{s=1}^n (kn/(kn+1))^s` term by term.
fn kcopy_sum(n: i64, k: i64) -> BigRational {
    let q = frac(k * n, k * n + 1);
    let mut term = int(1);
    let mut total = int(0);
    for _ in 0..n {
        term *= &q;
        total += &term;
    }
    total
}

/// `e^x` by its Taylor series, enough terms for |x| <= 1.
fn exp_series(x: &BigRational) -> BigRational {
    let mut term = int(1);
    let mut total = int(1);
    for i in 1..40 {
        term = term * x / int(i);
        total += &term;
    }
    total
}

#[test]
fn kcopy_bound_matches_exact_sum() {
    for n in 1..=30 {
        for k in 1..=4 {
            let exact = kcopy_sum(n, k);
            assert!(
                close(kcopy_ranking_bound(n as usize, k as usize), &exact, 1e-9),
                "n={n} k={k}"
            );
        }
    }
    // the value the k-copy suite compares against: sum_{s=1}^6 (12/13)^s
    assert!(close(kcopy_ranking_bound(6, 2), &kcopy_sum(6, 2), 1e-12));
}

#[test]
fn ranking_simulate_bound_is_a_quarter_of_the_two_copy_sum() {
    for n in 1..=30 {
        let exact = kcopy_sum(n, 2) / int(4);
        assert!(close(ranking_simulate_bound(n as usize), &exact, 1e-9), "n={n}");
    }
}

#[test]
fn asymptotic_constants() {
    for k in 1..=5 {
        let exact = int(1) - exp_series(&frac(-1, k));
        assert!(close(kcopy_asymptotic_fraction(k as usize), &exact, 1e-12));
    }
    let r = exp_series(&frac(1, 2));
    let ratio = int(2) * &r / (&r - int(1));
    assert!(close(ranking_simulate_ratio(), &ratio, 1e-12));
    assert!((ranking_simulate_ratio() - 5.083).abs() < 1e-3);
}

#[test]
fn simple_references() {
    assert_eq!(greedy_chain_mean(9), 5.0);
    assert_eq!(greedy_chain_mean(4), 2.5);
    assert_eq!(random_construction_bound(28), 3.5);
}
