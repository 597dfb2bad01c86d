//! Index-set combinatorics behind the conditional-duration closed form.
//!
//! The coefficients of the closed form are signed sums over "gap-2" index
//! sets: subsets `{j_1 < ... < j_k}` of a window whose consecutive elements
//! differ by at least two. Their census is a binomial coefficient and their
//! signed sums collapse, for a constant ratio, to the binomial identity in
//! [`fib_sum`], whose `c = -1` specialisation produces the Fibonacci numbers.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A strictly increasing index set with gaps of at least two between
/// consecutive elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JSet {
    indices: Vec<usize>,
}

impl JSet {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        for w in indices.windows(2) {
            if w[1] < w[0] + 2 {
                return Err(Error::BadIndices(
                    "index set must increase with gaps of at least two".into(),
                ));
            }
        }
        Ok(JSet { indices })
    }

    pub fn empty() -> Self {
        JSet { indices: Vec::new() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// All gap-2 sets of size `k` drawn from the window `{n+1, ..., m}`.
///
/// For `k = 0` this is the single empty set (also when `n > m`, where the
/// window itself is empty); when the constraints cannot be met the list is
/// empty. The census is `C(m+1-n-k, k)`.
pub fn enumerate_jsets(n: usize, m: usize, k: usize) -> Vec<JSet> {
    if k == 0 {
        return vec![JSet::empty()];
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    if m > n {
        fill_jsets(n + 1, m, k, &mut current, &mut out);
    }
    out
}

fn fill_jsets(lo: usize, m: usize, remaining: usize, current: &mut Vec<usize>, out: &mut Vec<JSet>) {
    if remaining == 0 {
        out.push(JSet { indices: current.clone() });
        return;
    }
    // leave room for the remaining-1 further elements, two apart each
    let needed_tail = 2 * (remaining - 1);
    let mut j = lo;
    while j + needed_tail <= m {
        current.push(j);
        fill_jsets(j + 2, m, remaining - 1, current, out);
        current.pop();
        j += 1;
    }
}

/// Binomial coefficient `C(n, k)` with `C(n, 0) = 1` for every integer `n`
/// and zero whenever `0 <= n < k`.
pub fn choose(n: i64, k: u32) -> BigInt {
    if k == 0 {
        return BigInt::one();
    }
    if n < k as i64 {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for t in 0..k as i64 {
        acc = acc * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    acc
}

pub fn fibonacci(n: u32) -> BigInt {
    let mut a = BigInt::zero();
    let mut b = BigInt::one();
    for _ in 0..n {
        let next = &a + &b;
        a = b;
        b = next;
    }
    a
}

/// Closed form of `sum_{k=0}^{n} C(n-k, k) (-r/(1+r)^2)^k` for `r >= 0`:
/// `(1 - r^{n+1}) / ((1+r)^n (1-r))` when `r != 1` and `(n+1)/2^n` when
/// `r = 1`. The summation itself is [`fib_sum_direct`]; the two are kept as
/// separate routes so each can check the other.
pub fn fib_sum(n: u32, r: &Scalar) -> Result<Scalar> {
    if r.is_negative() {
        return Err(Error::BadIndices("ratio must be non-negative".into()));
    }
    let one = Scalar::one();
    if r.is_one() {
        let num = Scalar::from_integer(n as i64 + 1);
        let den = Scalar::from_integer(2).pow(n as i32)?;
        return num.checked_div(&den);
    }
    let num = &one - &r.pow(n as i32 + 1)?;
    let den = &(&one + r).pow(n as i32)? * &(&one - r);
    num.checked_div(&den)
}

/// Term-by-term evaluation of the same sum.
pub fn fib_sum_direct(n: u32, r: &Scalar) -> Result<Scalar> {
    if r.is_negative() {
        return Err(Error::BadIndices("ratio must be non-negative".into()));
    }
    let one_plus = &Scalar::one() + r;
    let c = -(r.checked_div(&(&one_plus * &one_plus))?);
    let mut acc = Scalar::zero();
    let mut c_pow = Scalar::one();
    for k in 0..=n {
        let coeff = Scalar::from_big(choose((n - k) as i64, k), BigInt::one())?;
        acc += &(&coeff * &c_pow);
        c_pow *= &c;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn sc(text: &str) -> Scalar {
        Scalar::parse(text).unwrap()
    }

    /// Independent census: filter all k-subsets of the window for the gap
    /// condition.
    fn brute_force_count(n: usize, m: usize, k: usize) -> usize {
        if k == 0 {
            return 1;
        }
        if m < n + 1 {
            return 0;
        }
        let window: Vec<usize> = (n + 1..=m).collect();
        let mut count = 0;
        let mut pick = vec![0usize; k];
        fn rec(window: &[usize], k: usize, start: usize, pick: &mut [usize], depth: usize, count: &mut usize) {
            if depth == k {
                if pick.windows(2).all(|w| w[1] >= w[0] + 2) {
                    *count += 1;
                }
                return;
            }
            for idx in start..window.len() {
                pick[depth] = window[idx];
                rec(window, k, idx + 1, pick, depth + 1, count);
            }
        }
        rec(&window, k, 0, &mut pick, 0, &mut count);
        count
    }

    #[test]
    fn empty_window_has_only_the_empty_set() {
        assert_eq!(enumerate_jsets(2, 2, 0), vec![JSet::empty()]);
        assert_eq!(enumerate_jsets(3, 2, 0), vec![JSet::empty()]);
        assert!(enumerate_jsets(3, 2, 1).is_empty());
    }

    #[test]
    fn brute_force_confirms_single_set() {
        // all 2-subsets of {2,3,4} with gap >= 2: only {2,4}
        let sets = enumerate_jsets(1, 4, 2);
        assert_eq!(sets, vec![JSet::new(vec![2, 4]).unwrap()]);
        assert_eq!(brute_force_count(1, 4, 2), 1);
        assert_eq!(choose(2, 2), BigInt::from(1));
    }

    #[test]
    fn census_matches_binomial() {
        for n in 0..6usize {
            for m in n..=n + 8 {
                for k in 0..=(m + 1 - n) / 2 {
                    let got = enumerate_jsets(n, m, k).len();
                    let expect = choose((m + 1 - n) as i64 - k as i64, k as u32);
                    assert_eq!(BigInt::from(got), expect, "census n={n} m={m} k={k}");
                    assert_eq!(got, brute_force_count(n, m, k), "brute n={n} m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn jset_rejects_adjacent_indices() {
        assert!(JSet::new(vec![2, 3]).is_err());
        assert!(JSet::new(vec![5, 4]).is_err());
        assert!(JSet::new(vec![2, 4, 7]).is_ok());
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(fib_sum(3, &Scalar::one()).unwrap(), sc("1/2"));
        assert_eq!(fib_sum(2, &sc("2")).unwrap(), sc("7/9"));
        assert_eq!(fib_sum_direct(2, &sc("2")).unwrap(), sc("7/9"));
        assert_eq!(fib_sum(5, &Scalar::zero()).unwrap(), Scalar::one());
    }

    #[test]
    fn closed_form_equals_direct_sum() {
        let ratios = ["0", "1", "2", "1/2", "3/7", "5", "13/4"];
        for n in 0..=30u32 {
            for r in ratios {
                let r = sc(r);
                assert_eq!(fib_sum(n, &r).unwrap(), fib_sum_direct(n, &r).unwrap(), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn plain_census_gives_fibonacci() {
        for n in 0..=25u32 {
            let total: BigInt = (0..=n).map(|k| choose((n - k) as i64, k)).sum();
            assert_eq!(total, fibonacci(n + 1), "n={n}");
        }
        // n = 5: 8 = F(6)
        let total: BigInt = (0..=5u32).map(|k| choose((5 - k) as i64, k)).sum();
        assert_eq!(total, BigInt::from(8));
    }
}
