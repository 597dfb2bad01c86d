//! Property tests for the scalar field laws and the combinatorial
//! identities.

use proptest::prelude::*;

use ruin_core::combinatorics::{choose, enumerate_jsets, fib_sum, fib_sum_direct, fibonacci};
use ruin_core::Scalar;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-2000i64..2000, 1i64..2000).prop_map(|(n, d)| Scalar::from_fraction(n, d).unwrap())
}

fn small_ratio() -> impl Strategy<Value = Scalar> {
    (0i64..40, 1i64..8).prop_map(|(n, d)| Scalar::from_fraction(n, d).unwrap())
}

proptest! {
    #[test]
    fn scalar_arithmetic_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(a.checked_div(&b).unwrap() * &b, a.clone());
        }
    }

    #[test]
    fn scalar_display_round_trips(a in scalar()) {
        prop_assert_eq!(Scalar::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn scalar_stays_reduced(a in scalar()) {
        let g = num_integer::gcd(a.numer().clone(), a.denom().clone());
        prop_assert!(g == 1u32.into() || a.is_zero());
        prop_assert!(a.denom().sign() != num_bigint::Sign::Minus);
    }

    #[test]
    fn gap_two_census(n in 0usize..8, extra in 0usize..11, k in 0usize..6) {
        let m = n + extra;
        let got = enumerate_jsets(n, m, k).len();
        let expect = choose((m + 1 - n) as i64 - k as i64, k as u32);
        prop_assert_eq!(num_bigint::BigInt::from(got), expect);
    }

    #[test]
    fn binomial_sum_identity(n in 0u32..31, r in small_ratio()) {
        prop_assert_eq!(fib_sum(n, &r).unwrap(), fib_sum_direct(n, &r).unwrap());
    }

    #[test]
    fn plain_binomial_census_is_fibonacci(n in 0u32..26) {
        let total: num_bigint::BigInt = (0..=n).map(|k| choose((n - k) as i64, k)).sum();
        prop_assert_eq!(total, fibonacci(n + 1));
    }
}
