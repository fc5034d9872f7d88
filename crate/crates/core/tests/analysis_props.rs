use gp_lab::analysis::{
    classify_leaves, classify_leaves_naive, lemma3_bounds, potential_g, variable_balance,
};
use gp_lab::{GpTree, Literal, Problem};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn tree_strategy() -> impl Strategy<Value = (Problem, u32, Vec<Literal>)> {
    (
        prop_oneof![Just(Problem::Majority), Just(Problem::Order)],
        1u32..8,
    )
        .prop_flat_map(|(problem, n)| {
            prop::collection::vec(0..2 * u64::from(n), 1..60).prop_map(move |codes| {
                (
                    problem,
                    n,
                    codes.into_iter().map(Literal::from_code).collect(),
                )
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn partition_and_counting_bounds((problem, n, leaves) in tree_strategy()) {
        let c = classify_leaves_naive(problem, n, &leaves);
        let v = problem.evaluate(&leaves, n) as usize;
        prop_assert_eq!(c.redundant + c.critical_pos + c.critical_neg, leaves.len());
        prop_assert!(c.critical_pos <= c.redundant + v);
        prop_assert!(c.critical_neg <= 2 * c.redundant);
        if problem == Problem::Order {
            prop_assert!(c.critical_neg <= c.redundant);
        }
    }

    #[test]
    fn fast_classification_matches_definition((problem, n, leaves) in tree_strategy()) {
        let tree = GpTree::new(problem, n, &leaves).unwrap();
        prop_assert_eq!(classify_leaves(&tree), classify_leaves_naive(problem, n, &leaves));
    }

    #[test]
    fn potential_zero_exactly_at_minimal_optimum((problem, n, leaves) in tree_strategy(), m in 1u64..12) {
        let tree = GpTree::new(problem, n, &leaves).unwrap();
        let optimum = tree.expressed() == n && tree.size() == n as usize;
        prop_assert_eq!(potential_g(&tree, m) == 0, optimum);
    }

    #[test]
    fn balance_sign_matches_majority((_, n, leaves) in tree_strategy()) {
        let tree = GpTree::new(Problem::Majority, n, &leaves).unwrap();
        for var in 1..=n {
            prop_assert_eq!(variable_balance(&tree, var) >= 0, tree.is_expressed(var));
        }
    }
}

fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// e as Σ_{k ≤ 60} 1/k!, exact to far beyond f64.
fn e_rational() -> BigRational {
    (0..=60).fold(BigRational::zero(), |acc, k| {
        acc + BigRational::new(BigInt::one(), factorial(k))
    })
}

fn to_f64(x: &BigRational) -> f64 {
    // Scale to an integer with 40 digits of headroom before converting.
    let scale = BigInt::from(10u32).pow(60);
    let scaled = (x * BigRational::from_integer(scale)).to_integer();
    scaled.to_string().parse::<f64>().unwrap() * 1e-60
}

/// The finite closed forms, evaluated exactly:
/// Σ_{i>m} (i−m)/(i−1)! = 2e − me + Σ_{i≤m} (m−i)/(i−1)!
/// Σ_{i>m} i(i−m)/(i−1)! = 5e − 2me + Σ_{i≤m} i(m−i)/(i−1)!
fn closed_forms(m: u64) -> (f64, f64) {
    let e = e_rational();
    let mr = BigRational::from_integer(BigInt::from(m));
    let frac = |num: i64, i: u64| BigRational::new(BigInt::from(num), factorial(i - 1));
    let mut s1 = e.clone() * BigRational::from_integer(BigInt::from(2)) - mr.clone() * e.clone();
    let mut s2 = e.clone() * BigRational::from_integer(BigInt::from(5))
        - mr.clone() * e.clone() * BigRational::from_integer(BigInt::from(2));
    for i in 1..=m {
        let d = m as i64 - i as i64;
        s1 += frac(d, i);
        s2 += frac(i as i64 * d, i);
    }
    let c = BigRational::new(BigInt::one(), BigInt::from(6 * m))
        + BigRational::new(BigInt::from(2), BigInt::from(3));
    (to_f64(&(s1 / e.clone())), to_f64(&(c * s2 / e)))
}

#[test]
fn series_bounds_match_exact_closed_forms() {
    for m in [1u64, 2, 3, 5, 10, 15, 20] {
        let b = lemma3_bounds(m).unwrap();
        let (b1, b2) = closed_forms(m);
        assert!((b.b1 - b1).abs() <= 1e-12 * b1, "m={m}: {} vs {b1}", b.b1);
        assert!(
            (b.b2_coefficient - b2).abs() <= 1e-12 * b2,
            "m={m}: {} vs {b2}",
            b.b2_coefficient
        );
    }
}
