//! Last-vertex and cover statistics of the walk on a cycle.
//!
//! Until the walk pins down a vertex pair, an arc of the cycle behaves as an
//! absorbing birth-death game, so every quantity here decomposes into gambler
//! sub-games obtained by cutting the cycle at a vertex and unrolling
//! ([`unroll_subgame`]). Cutting at the same vertex on both sides gives the
//! full-circle game whose two barriers are that vertex.
//!
//! Sums and products over cyclic index ranges follow a dedicated convention:
//! a range wraps through `m -> 0`, and the range from `t+1` to `t` (one step
//! "backwards") is empty, giving the empty sum and product.

use alloc::format;

use crate::chain::{GamblerChain, PolygonChain};
use crate::error::{Error, Result};
use crate::gambler::{eb, ew, expected_duration, rho};
use crate::scalar::Scalar;

/// A vertex label reduced modulo the number of vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclicIndex {
    value: usize,
    modulus: usize,
}

impl CyclicIndex {
    pub fn new(value: usize, modulus: usize) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        CyclicIndex { value: value % modulus, modulus }
    }

    pub fn value(&self) -> usize {
        self.value
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    /// Label shifted by `offset`, wrapping in both directions.
    pub fn shifted(&self, offset: isize) -> Self {
        let m = self.modulus as isize;
        let v = (self.value as isize + offset).rem_euclid(m);
        CyclicIndex { value: v as usize, modulus: self.modulus }
    }

    pub fn next(&self) -> Self {
        self.shifted(1)
    }

    pub fn prev(&self) -> Self {
        self.shifted(-1)
    }

    /// Steps from `other` to `self` moving forwards.
    pub fn distance_from(&self, other: CyclicIndex) -> usize {
        debug_assert_eq!(self.modulus, other.modulus);
        (self.value + self.modulus - other.value) % self.modulus
    }
}

/// Inclusive cyclic range from `s` to `t`; empty exactly when `s = t + 1`.
fn cyc_range(s: CyclicIndex, t: CyclicIndex) -> impl Iterator<Item = usize> {
    debug_assert_eq!(s.modulus(), t.modulus());
    let count = if s == t.next() { 0 } else { t.distance_from(s) + 1 };
    (0..count).map(move |offset| s.shifted(offset as isize).value())
}

/// Sum of `term` over the cyclic range; zero for the empty range.
pub fn cyc_sum(s: CyclicIndex, t: CyclicIndex, term: impl Fn(usize) -> Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    for idx in cyc_range(s, t) {
        acc += &term(idx);
    }
    acc
}

/// Product of `term` over the cyclic range; one for the empty range.
pub fn cyc_prod(s: CyclicIndex, t: CyclicIndex, term: impl Fn(usize) -> Scalar) -> Scalar {
    let mut acc = Scalar::one();
    for idx in cyc_range(s, t) {
        acc *= &term(idx);
    }
    acc
}

/// Cuts the cycle at `lose` and unrolls `length` edges clockwise into an
/// absorbing game on `{0, ..., length}`: interior state `s` carries the rates
/// of vertex `lose + s`. With `length = m + 1` both barriers represent the
/// cut vertex itself (the full-circle game).
pub fn unroll_subgame(poly: &PolygonChain, lose: usize, length: usize) -> Result<GamblerChain> {
    let vertices = poly.vertices();
    if length < 1 || length > vertices {
        return Err(Error::BadIndices(format!(
            "unrolled length must lie in 1..={vertices}; got {length}"
        )));
    }
    let lose = lose % vertices;
    let mut p = alloc::vec::Vec::with_capacity(length + 1);
    let mut q = alloc::vec::Vec::with_capacity(length + 1);
    p.push(Scalar::zero());
    q.push(Scalar::zero());
    for s in 1..length {
        p.push(poly.p((lose + s) % vertices).clone());
        q.push(poly.q((lose + s) % vertices).clone());
    }
    p.push(Scalar::zero());
    q.push(Scalar::zero());
    GamblerChain::new(p, q)
}

/// Probability that every vertex is visited before the walk first returns to
/// its start `i`.
pub fn prob_all_before_return(poly: &PolygonChain, i: usize) -> Result<Scalar> {
    let m = poly.vertices();
    let at = |v: usize| CyclicIndex::new(v, m);
    let i = i % m;
    let r = |s: usize| poly.ratio(s);
    // clockwise first step: win the arc game towards i - 1
    let clockwise = cyc_sum(at(i + 1), at(i + m - 1), |n| {
        cyc_prod(at(i + 1), at(n + m - 1), r)
    });
    // counterclockwise first step: reach i + 1 before i, odds inverted
    let counter = cyc_sum(at(i + 2), at(i), |n| {
        cyc_prod(at(n), at(i), |s| r(s).recip().expect("positive ratio"))
    });
    let split = (&Scalar::one() + &r(i)).recip()?;
    Ok(&split * &(&clockwise.recip()? + &counter.recip()?))
}

/// Probability that `j` is the last new vertex visited by the walk started
/// at `i`.
pub fn prob_last_vertex(poly: &PolygonChain, i: usize, j: usize) -> Result<Scalar> {
    let m = poly.vertices();
    let i = i % m;
    let j = j % m;
    if i == j {
        return Err(Error::BadIndices(
            "the start cannot be the last vertex visited".into(),
        ));
    }
    let at = |v: usize| CyclicIndex::new(v, m);
    let r = |s: usize| poly.ratio(s);
    let outer = cyc_sum(at(j + 2), at(j + m - 1), |n| {
        cyc_prod(at(j + 2), at(n + m - 1), r)
    });
    // reach j - 1 first, then close the circle towards j + 1
    let near_num = cyc_sum(at(i + 1), at(j + m - 1), |n| {
        cyc_prod(at(j + 2), at(n + m - 1), r)
    });
    let near_den = cyc_sum(at(j + 1), at(j + m - 1), |n| {
        cyc_prod(at(j + 1), at(n + m - 1), r)
    });
    // reach j + 1 first, then close the circle towards j - 1
    let far_num = cyc_sum(at(j + 2), at(i), |n| {
        cyc_prod(at(j + 2), at(n + m - 1), r)
    });
    let far_den = cyc_sum(at(j + 2), at(j), |n| {
        cyc_prod(at(n), at(j + m - 1), |s| r(s).recip().expect("positive ratio"))
    });
    let inner = &near_num.checked_div(&near_den)? + &far_num.checked_div(&far_den)?;
    inner.checked_div(&outer)
}

/// Expected number of steps to visit every vertex, given that `j` is visited
/// last, starting from `i`.
///
/// Decomposes over which neighbour of `j` the walk reaches first. A route is
/// consistent with "`j` last" only if the walk then closes the circle away
/// from `j`, so each branch carries the probability of its *whole* route
/// (arc outcome times the closing leg), normalised by their total, which is
/// exactly `P(L_{i,j})`. Every duration is a conditional time of an unrolled
/// sub-game; the final lap is played on the full-circle game at `j`.
pub fn ev_last(poly: &PolygonChain, i: usize, j: usize) -> Result<Scalar> {
    let vertices = poly.vertices();
    let m = vertices - 1;
    let i = i % vertices;
    let j = j % vertices;
    if i == j {
        return Err(Error::BadIndices(
            "the start cannot be the last vertex visited".into(),
        ));
    }
    let arc_lose = (j + 1) % vertices;
    let arc = unroll_subgame(poly, arc_lose, m - 1)?;
    let start = (i + vertices - arc_lose) % vertices;
    let reach_near = rho(&arc, 0, start, m - 1)?;
    // after touching j - 1 first: close the circle to j + 1 avoiding j
    let back_game = unroll_subgame(poly, arc_lose, m)?;
    let close_back = &Scalar::one() - &rho(&back_game, 0, m - 1, m)?;
    // after touching j + 1 first: close the circle to j - 1 avoiding j
    let forward_game = unroll_subgame(poly, j, m)?;
    let close_forward = rho(&forward_game, 0, 1, m)?;
    let weight_near = &reach_near * &close_back;
    let weight_far = &(&Scalar::one() - &reach_near) * &close_forward;
    let full_circle = unroll_subgame(poly, j, vertices)?;
    let mut mixed = Scalar::zero();
    if !weight_near.is_zero() {
        let win_arc = ew(&arc, 0, start, m - 1)?;
        let back = eb(&back_game, 0, m - 1, m)?;
        let last_lap = expected_duration(&full_circle, 0, 1, vertices)?;
        mixed += &(&weight_near * &(&(&win_arc + &back) + &last_lap));
    }
    if !weight_far.is_zero() {
        let lose_arc = eb(&arc, 0, start, m - 1)?;
        let forward = ew(&forward_game, 0, 1, m)?;
        let last_lap = expected_duration(&full_circle, 0, m, vertices)?;
        mixed += &(&weight_far * &(&(&lose_arc + &forward) + &last_lap));
    }
    mixed.checked_div(&(&weight_near + &weight_far))
}

/// Expected cover time from `i`: mixture of [`ev_last`] over the last-vertex
/// events.
pub fn ev_cover(poly: &PolygonChain, i: usize) -> Result<Scalar> {
    let vertices = poly.vertices();
    let i = i % vertices;
    let mut acc = Scalar::zero();
    for j in 1..vertices {
        let j = (i + j) % vertices;
        acc += &(&prob_last_vertex(poly, i, j)? * &ev_last(poly, i, j)?);
    }
    Ok(acc)
}

/// Expected number of extra steps needed to return to `i` after covering the
/// cycle: from the last vertex `k`, one full-circle game back to `i`.
pub fn er_return(poly: &PolygonChain, i: usize) -> Result<Scalar> {
    let vertices = poly.vertices();
    let i = i % vertices;
    let full_circle = unroll_subgame(poly, i, vertices)?;
    let mut acc = Scalar::zero();
    for k in 1..vertices {
        let vertex = (i + k) % vertices;
        let back_home = expected_duration(&full_circle, 0, k, vertices)?;
        acc += &(&prob_last_vertex(poly, i, vertex)? * &back_home);
    }
    Ok(acc)
}
