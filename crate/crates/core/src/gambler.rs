//! Closed forms for the absorbing birth-death game: winning probability,
//! expected duration, and the expected duration conditioned on which barrier
//! absorbs.
//!
//! The conditional expectation is computed along three algebraically equal
//! routes that the tests hold against each other and against the linear
//! system solvers in [`crate::oracle`]:
//!
//! * [`ew_01`] - the explicit sum over signed gap-2 index sets,
//! * [`ew_recurrence`] - the three-term recurrence `A_{M+1} = b A_M + c A_{M-1} + a`
//!   in `O(N)` arithmetic operations,
//! * [`matrix_product_path`] - the literal product of the 3x3 companion
//!   matrices of that recurrence.
//!
//! General windows `(j, i, k)` are handled by restricting the chain to the
//! window and re-indexing, since the conditional durations depend only on the
//! rates strictly between the two barriers.

use alloc::format;
use alloc::vec::Vec;

use crate::chain::GamblerChain;
use crate::combinatorics::{enumerate_jsets, JSet};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Window size above which [`ew_01`] switches from index-set enumeration
/// (whose cost grows like a Fibonacci number in the window span) to the
/// recurrence route, which is algebraically identical and linear time.
pub const XI_SPAN_LIMIT: usize = 24;

/// Selects the computation route for conditional durations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionalPath {
    /// Index-set enumeration (subject to [`XI_SPAN_LIMIT`]).
    Closed,
    /// Three-term recurrence.
    Recurrence,
}

/// Partial sums `D_n = sum_{t=j+1}^{n} prod_{s=j+1}^{t-1} r(s)` for
/// `n = j..=upto`. Every hitting probability on the window is a ratio of two
/// of these, so they are computed once per call with running products.
fn ladder_sums(chain: &GamblerChain, j: usize, upto: usize) -> Vec<Scalar> {
    debug_assert!(upto <= chain.pot());
    let mut out = Vec::with_capacity(upto + 1 - j);
    out.push(Scalar::zero());
    let mut prod = Scalar::one();
    let mut acc = Scalar::zero();
    for n in j + 1..=upto {
        if n > j + 1 {
            prod *= &chain.ratio(n - 1);
        }
        acc += &prod;
        out.push(acc.clone());
    }
    out
}

fn check_window(chain: &GamblerChain, j: usize, i: usize, k: usize) -> Result<()> {
    if j <= i && i <= k && j < k && k <= chain.pot() {
        Ok(())
    } else {
        Err(Error::BadIndices(format!(
            "need j <= i <= k, j < k, k <= {}; got ({j}, {i}, {k})",
            chain.pot()
        )))
    }
}

/// Probability of reaching `k` before `j` from `i`.
pub fn rho(chain: &GamblerChain, j: usize, i: usize, k: usize) -> Result<Scalar> {
    check_window(chain, j, i, k)?;
    let d = ladder_sums(chain, j, k);
    d[i - j].checked_div(&d[k - j])
}

/// The same rational expression as [`rho`] evaluated literally for `k < i`
/// as well (`j < k` still required). Only meaningful as an ingredient of the
/// recurrence coefficients.
pub fn rho_extended(chain: &GamblerChain, j: usize, i: usize, k: usize) -> Result<Scalar> {
    if j >= k || i < j || i > chain.pot() || k > chain.pot() {
        return Err(Error::BadIndices(format!(
            "need j < k and j <= i <= {}; got ({j}, {i}, {k})",
            chain.pot()
        )));
    }
    let d = ladder_sums(chain, j, i.max(k));
    d[i - j].checked_div(&d[k - j])
}

/// Running products `d_s = prod_{t=j+1}^{s} r(t)` for `s = j..=upto`, with
/// `d_j = 1` by convention. `upto` may reach at most `N - 1`, the last state
/// with a defined ratio.
pub fn d_products(chain: &GamblerChain, j: usize, upto: usize) -> Result<Vec<Scalar>> {
    if j > upto || upto >= chain.pot() {
        return Err(Error::BadIndices(format!(
            "need j <= upto <= {}; got ({j}, {upto})",
            chain.pot() - 1
        )));
    }
    let mut out = Vec::with_capacity(upto + 1 - j);
    let mut prod = Scalar::one();
    out.push(prod.clone());
    for s in j + 1..=upto {
        prod *= &chain.ratio(s);
        out.push(prod.clone());
    }
    Ok(out)
}

/// Expected number of steps until either barrier of the window `(j, k)` is
/// hit, starting from `i`. Zero at both barriers.
pub fn expected_duration(chain: &GamblerChain, j: usize, i: usize, k: usize) -> Result<Scalar> {
    check_window(chain, j, i, k)?;
    if i == j || k == j + 1 {
        return Ok(Scalar::zero());
    }
    let d = d_products(chain, j, k - 1)?;
    // g[n-j] = sum_{s=j+1}^{n} 1/(p(s) d_s)
    let mut weighted_all = Scalar::zero();
    let mut weighted_to_i = Scalar::zero();
    let mut d_all = Scalar::zero();
    let mut d_to_i = Scalar::zero();
    let mut g = Scalar::zero();
    for n in j..k {
        if n > j {
            g += &(d[n - j].recip()?.checked_div(chain.p(n))?);
            let term = &d[n - j] * &g;
            weighted_all += &term;
            if n < i {
                weighted_to_i += &term;
            }
        }
        d_all += &d[n - j];
        if n < i {
            d_to_i += &d[n - j];
        }
    }
    let scaled = (&weighted_all * &d_to_i).checked_div(&d_all)?;
    Ok(&scaled - &weighted_to_i)
}

/// Signed product associated with one gap-2 index set over the window
/// `{n, ..., m}`: `(-1)^k prod_{s in j} r(s) prod (1 + r(s))`, the second
/// product running over the window with the set and its shift by one removed.
pub fn delta(chain: &GamblerChain, n: usize, m: usize, js: &JSet) -> Result<Scalar> {
    if n > m {
        if !js.is_empty() {
            return Err(Error::BadIndices("empty window admits only the empty set".into()));
        }
        return Ok(Scalar::one());
    }
    if n < 1 || m > chain.pot() - 1 {
        return Err(Error::BadIndices(format!(
            "window {n}..{m} leaves the interior 1..{}",
            chain.pot() - 1
        )));
    }
    if let (Some(&first), Some(&last)) = (js.indices().first(), js.indices().last()) {
        if first < n + 1 || last > m {
            return Err(Error::BadIndices(format!("index set escapes the window {n}..{m}")));
        }
    }
    let mut acc = if js.len().is_multiple_of(2) { Scalar::one() } else { -Scalar::one() };
    for &s in js.indices() {
        acc *= &chain.ratio(s);
    }
    let one = Scalar::one();
    for s in n..=m {
        let excluded = js.indices().binary_search(&s).is_ok()
            || js.indices().binary_search(&(s + 1)).is_ok();
        if !excluded {
            acc *= &(&one + &chain.ratio(s));
        }
    }
    Ok(acc)
}

/// `xi^{n,m}_k`: the sum of [`delta`] over every gap-2 set of size `k` in the
/// window. Zero when no such set exists.
pub fn xi(chain: &GamblerChain, n: usize, m: usize, k: usize) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for js in enumerate_jsets(n, m, k) {
        acc += &delta(chain, n, m, &js)?;
    }
    Ok(acc)
}

/// Expected winning time from state 1, `EW_{0:1:i}`, by the explicit
/// index-set sum. Windows wider than [`XI_SPAN_LIMIT`] fall back to the
/// recurrence route, which is exactly equal.
pub fn ew_01(chain: &GamblerChain, i: usize) -> Result<Scalar> {
    ew_01_with_span_limit(chain, i, XI_SPAN_LIMIT)
}

/// [`ew_01`] with an explicit enumeration span cap.
pub fn ew_01_with_span_limit(chain: &GamblerChain, i: usize, limit: usize) -> Result<Scalar> {
    if i == 0 {
        return Err(Error::UndefinedConditional(
            "the game cannot be won starting from the losing barrier".into(),
        ));
    }
    if i > chain.pot() {
        return Err(Error::BadIndices(format!("i = {i} exceeds pot {}", chain.pot())));
    }
    if i == 1 {
        return Ok(Scalar::zero());
    }
    if i - 2 > limit {
        let v = ew_recurrence(chain, i)?;
        return Ok(v[i - 2].clone());
    }
    let d = ladder_sums(chain, 0, i);
    let mut acc = Scalar::zero();
    for n in 1..i {
        let mut xis = Scalar::zero();
        for s in 0..=(i - 1 - n) / 2 {
            xis += &xi(chain, n + 1, i - 1, s)?;
        }
        let rho_n = d[n].checked_div(&d[i])?;
        acc += &(&rho_n.checked_div(chain.p(n))? * &xis);
    }
    Ok(acc)
}

/// Coefficients of the three-term recurrence
/// `EW_{0:i+1:N} = a_i + b_i EW_{0:i:N} + c_i EW_{0:i-1:N}`.
///
/// `b_i + c_i = 1` for every `i`, and the formulas give `b_1 = 1, c_1 = 0`
/// without a special case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceCoefficients {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

impl RecurrenceCoefficients {
    fn from_ladder(chain: &GamblerChain, d: &[Scalar], i: usize) -> Result<Self> {
        let rho_short = d[i].checked_div(&d[i + 1])?;
        let over_p = rho_short.checked_div(chain.p(i))?;
        let a = -over_p.clone();
        let b = &(chain.p(i) + chain.q(i)) * &over_p;
        let c = -&(&chain.ratio(i) * &d[i - 1].checked_div(&d[i + 1])?);
        Ok(RecurrenceCoefficients { a, b, c })
    }
}

/// Coefficients at state `i`, `1 <= i <= N-1`.
pub fn recurrence_coefficients(chain: &GamblerChain, i: usize) -> Result<RecurrenceCoefficients> {
    if i < 1 || i + 1 > chain.pot() {
        return Err(Error::BadIndices(format!(
            "coefficient index must lie in 1..={}; got {i}",
            chain.pot() - 1
        )));
    }
    let d = ladder_sums(chain, 0, i + 1);
    RecurrenceCoefficients::from_ladder(chain, &d, i)
}

/// Runs the recurrence `A_{M+1} = b_{M+1} A_M + c_{M+1} A_{M-1} + a_{M+1}`
/// from `A_0 = 0, A_1 = a_1` and returns `EW_{0:1:M+1} = -A_M` for
/// `M = 1..upto-1` (so the last entry is `EW_{0:1:upto}`).
pub fn ew_recurrence(chain: &GamblerChain, upto: usize) -> Result<Vec<Scalar>> {
    if upto < 2 || upto > chain.pot() {
        return Err(Error::BadIndices(format!(
            "need 2 <= upto <= {}; got {upto}",
            chain.pot()
        )));
    }
    let d = ladder_sums(chain, 0, upto);
    let mut out = Vec::with_capacity(upto - 1);
    let mut a_prev2 = Scalar::zero();
    let mut a_prev = RecurrenceCoefficients::from_ladder(chain, &d, 1)?.a;
    out.push(-a_prev.clone());
    for m in 2..upto {
        let coeff = RecurrenceCoefficients::from_ladder(chain, &d, m)?;
        let a_cur = &(&(&coeff.b * &a_prev) + &(&coeff.c * &a_prev2)) + &coeff.a;
        out.push(-a_cur.clone());
        a_prev2 = a_prev;
        a_prev = a_cur;
    }
    Ok(out)
}

/// Left product of the companion matrices of the recurrence, with the
/// special first factor `[[1, 0, a_1], [1, 0, 0], [0, 0, 1]]`. The result is
/// `[[1, 0, A_upto], [1, 0, A_{upto-1}], [0, 0, 1]]`.
pub fn matrix_product_path(chain: &GamblerChain, upto: usize) -> Result<[[Scalar; 3]; 3]> {
    if upto < 1 || upto + 1 > chain.pot() {
        return Err(Error::BadIndices(format!(
            "need 1 <= upto <= {}; got {upto}",
            chain.pot() - 1
        )));
    }
    let d = ladder_sums(chain, 0, upto + 1);
    let zero = Scalar::zero;
    let one = Scalar::one;
    let a1 = RecurrenceCoefficients::from_ladder(chain, &d, 1)?.a;
    let mut acc = [
        [one(), zero(), a1],
        [one(), zero(), zero()],
        [zero(), zero(), one()],
    ];
    for m in 2..=upto {
        let coeff = RecurrenceCoefficients::from_ladder(chain, &d, m)?;
        let factor = [
            [coeff.b, coeff.c, coeff.a],
            [one(), zero(), zero()],
            [zero(), zero(), one()],
        ];
        acc = mat_mul(&factor, &acc);
    }
    Ok(acc)
}

fn mat_mul(a: &[[Scalar; 3]; 3], b: &[[Scalar; 3]; 3]) -> [[Scalar; 3]; 3] {
    core::array::from_fn(|r| {
        core::array::from_fn(|c| {
            let mut acc = Scalar::zero();
            for t in 0..3 {
                acc += &(&a[r][t] * &b[t][c]);
            }
            acc
        })
    })
}

/// Expected game duration conditioned on absorption at `k` (winning),
/// starting from `i` in the window `(j, k)`. Undefined from `i = j`.
pub fn ew(chain: &GamblerChain, j: usize, i: usize, k: usize) -> Result<Scalar> {
    ew_with(chain, j, i, k, ConditionalPath::Recurrence)
}

pub fn ew_with(
    chain: &GamblerChain,
    j: usize,
    i: usize,
    k: usize,
    path: ConditionalPath,
) -> Result<Scalar> {
    check_window(chain, j, i, k)?;
    if i == j {
        return Err(Error::UndefinedConditional(
            "winning time does not exist from the losing barrier".into(),
        ));
    }
    if i == k {
        return Ok(Scalar::zero());
    }
    let sub_holder;
    let sub = if j == 0 && k == chain.pot() {
        chain
    } else {
        sub_holder = chain.restrict(j, k)?;
        &sub_holder
    };
    let (len, start) = (k - j, i - j);
    match path {
        ConditionalPath::Recurrence => {
            let v = ew_recurrence(sub, len)?;
            let from_one_to_len = v[len - 2].clone();
            let from_one_to_start = if start == 1 {
                Scalar::zero()
            } else {
                v[start - 2].clone()
            };
            Ok(&from_one_to_len - &from_one_to_start)
        }
        ConditionalPath::Closed => {
            Ok(&ew_01(sub, len)? - &ew_01(sub, start)?)
        }
    }
}

/// Expected game duration conditioned on absorption at `j` (losing). It is
/// the winning time of the reversed window. Undefined from `i = k`.
pub fn eb(chain: &GamblerChain, j: usize, i: usize, k: usize) -> Result<Scalar> {
    eb_with(chain, j, i, k, ConditionalPath::Recurrence)
}

pub fn eb_with(
    chain: &GamblerChain,
    j: usize,
    i: usize,
    k: usize,
    path: ConditionalPath,
) -> Result<Scalar> {
    check_window(chain, j, i, k)?;
    if i == k {
        return Err(Error::UndefinedConditional(
            "losing time does not exist from the winning barrier".into(),
        ));
    }
    if i == j {
        return Ok(Scalar::zero());
    }
    let sub_holder;
    let sub = if j == 0 && k == chain.pot() {
        chain
    } else {
        sub_holder = chain.restrict(j, k)?;
        &sub_holder
    };
    let len = k - j;
    ew_with(&reverse_chain(sub), 0, len - (i - j), len, path)
}

/// Index-mirrored chain with the roles of the rates exchanged:
/// `p'(i) = q(N-i)`, `q'(i) = p(N-i)`. An involution; losing times of the
/// original are winning times of the mirror.
pub fn reverse_chain(chain: &GamblerChain) -> GamblerChain {
    let n = chain.pot();
    let p = (0..=n).map(|i| chain.q(n - i).clone()).collect();
    let q = (0..=n).map(|i| chain.p(n - i).clone()).collect();
    GamblerChain::new(p, q).expect("mirror of a valid chain is valid")
}

/// Pointwise exchange `p'(i) = q(i)`, `q'(i) = p(i)`.
pub fn swap_pq(chain: &GamblerChain) -> GamblerChain {
    GamblerChain::new(chain.q_rates().to_vec(), chain.p_rates().to_vec())
        .expect("swap of a valid chain is valid")
}

/// `EW_{0:1:i}` specialised to a constant ratio `r(n) = r`:
/// `sum (n/i)(i-n)/p(n)` for `r = 1`, and
/// `sum (1-r^n)(1-r^{i-n}) / (p(n)(1-r^i)(1-r))` otherwise.
pub fn ew_const_r(chain: &GamblerChain, i: usize) -> Result<Scalar> {
    if !chain.has_constant_ratio() {
        return Err(Error::NonConstantRatio);
    }
    if i == 0 {
        return Err(Error::UndefinedConditional(
            "the game cannot be won starting from the losing barrier".into(),
        ));
    }
    if i > chain.pot() {
        return Err(Error::BadIndices(format!("i = {i} exceeds pot {}", chain.pot())));
    }
    if i == 1 {
        return Ok(Scalar::zero());
    }
    let r = chain.ratio(1);
    let one = Scalar::one();
    let mut acc = Scalar::zero();
    if r.is_one() {
        let i_scalar = Scalar::from_integer(i as i64);
        for n in 1..i {
            let weight = Scalar::from_integer(n as i64 * (i as i64 - n as i64));
            acc += &weight.checked_div(&(&i_scalar * chain.p(n)))?;
        }
    } else {
        let denom = &(&one - &r.pow(i as i32)?) * &(&one - &r);
        let mut r_lo = r.clone(); // r^n
        let mut r_hi = r.pow(i as i32 - 1)?; // r^{i-n}
        let r_inv = r.recip()?;
        for n in 1..i {
            let num = &(&one - &r_lo) * &(&one - &r_hi);
            acc += &num.checked_div(&(&denom * chain.p(n)))?;
            r_lo *= &r;
            r_hi *= &r_inv;
        }
    }
    Ok(acc)
}

/// `ET_{j:i:k}` specialised to a constant ratio, as nested prefix sums.
pub fn et_const_r(chain: &GamblerChain, j: usize, i: usize, k: usize) -> Result<Scalar> {
    if !chain.has_constant_ratio() {
        return Err(Error::NonConstantRatio);
    }
    check_window(chain, j, i, k)?;
    if i == j || k == j + 1 {
        return Ok(Scalar::zero());
    }
    let r = chain.ratio(1);
    let mut inner = Scalar::zero();
    let mut sum_all = Scalar::zero();
    let mut sum_to_i = Scalar::zero();
    if r.is_one() {
        for n in j + 1..k {
            inner += &chain.p(n).recip()?;
            sum_all += &inner;
            if n < i {
                sum_to_i += &inner;
            }
        }
        let frac = Scalar::from_fraction((i - j) as i64, (k - j) as i64)?;
        Ok(&(&frac * &sum_all) - &sum_to_i)
    } else {
        let r_inv = r.recip()?;
        let mut r_pow = r.pow((j + 1) as i32)?; // r^n
        let mut r_inv_pow = r_inv.pow((j + 1) as i32)?; // r^{-s}
        for n in j + 1..k {
            inner += &r_inv_pow.checked_div(chain.p(n))?;
            let weighted = &r_pow * &inner;
            sum_all += &weighted;
            if n < i {
                sum_to_i += &weighted;
            }
            r_pow *= &r;
            r_inv_pow *= &r_inv;
        }
        let one = Scalar::one();
        let frac = (&one - &r.pow((i - j) as i32)?).checked_div(&(&one - &r.pow((k - j) as i32)?))?;
        Ok(&(&frac * &sum_all) - &sum_to_i)
    }
}

/// Spatially slowed chain `p(n) = p/(2cn+1)`, `q(n) = q/(2cn+1)` on
/// `{0, ..., n_states}`. The ratio is constant while the holding time grows
/// with the state.
pub fn make_spatial_chain(p: &Scalar, q: &Scalar, c: &Scalar, n_states: usize) -> Result<GamblerChain> {
    if c.is_negative() {
        return Err(Error::InvalidChain("slowdown coefficient must be non-negative".into()));
    }
    make_affine_chain(p, q, &Scalar::zero(), &Scalar::zero(), c, n_states)
}

/// Chain with affinely growing rates `p(i) = p(1 + a1 i)/(2ci+1)`,
/// `q(i) = q(1 + a2 i)/(2ci+1)`. Every resulting state must satisfy the
/// chain invariants or construction fails.
pub fn make_affine_chain(
    p: &Scalar,
    q: &Scalar,
    alpha1: &Scalar,
    alpha2: &Scalar,
    c: &Scalar,
    n_states: usize,
) -> Result<GamblerChain> {
    if n_states < 1 {
        return Err(Error::InvalidChain("need at least one edge".into()));
    }
    let one = Scalar::one();
    let two_c = &Scalar::from_integer(2) * c;
    let mut pv = Vec::with_capacity(n_states + 1);
    let mut qv = Vec::with_capacity(n_states + 1);
    pv.push(Scalar::zero());
    qv.push(Scalar::zero());
    for i in 1..n_states {
        let i_scalar = Scalar::from_integer(i as i64);
        let denom = &(&two_c * &i_scalar) + &one;
        if !denom.is_positive() {
            return Err(Error::InvalidChain(format!("slowdown 2c*{i}+1 is not positive")));
        }
        pv.push((&(&one + &(alpha1 * &i_scalar)) * p).checked_div(&denom)?);
        qv.push((&(&one + &(alpha2 * &i_scalar)) * q).checked_div(&denom)?);
    }
    pv.push(Scalar::zero());
    qv.push(Scalar::zero());
    GamblerChain::new(pv, qv)
}
