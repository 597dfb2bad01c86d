//! Chain data types: the absorbing birth-death game and the walk on a cycle.
//!
//! Both carry per-state clockwise (`p`) and counterclockwise (`q`) rates with
//! ties allowed (`p(i) + q(i) <= 1`). All types are immutable after
//! construction, so they can be shared freely between threads.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Birth-death chain on `{0, ..., N}` with absorbing endpoints: reaching `N`
/// wins the game, reaching `0` loses it.
///
/// Interior states must have `p(i) > 0`, `q(i) > 0` and `p(i) + q(i) <= 1`;
/// the boundary rates are zero. `N >= 1` is accepted so that degenerate
/// single-edge windows (which arise when a cycle arc between two adjacent
/// vertices is unrolled) are representable; such games are decided at once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GamblerChain {
    p: Vec<Scalar>,
    q: Vec<Scalar>,
}

impl GamblerChain {
    pub fn new(p: Vec<Scalar>, q: Vec<Scalar>) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::InvalidChain(format!(
                "rate vectors differ in length: {} vs {}",
                p.len(),
                q.len()
            )));
        }
        if p.len() < 2 {
            return Err(Error::InvalidChain("need at least the two absorbing states".into()));
        }
        let n = p.len() - 1;
        for (name, v) in [("p", &p), ("q", &q)] {
            if !v[0].is_zero() || !v[n].is_zero() {
                return Err(Error::InvalidChain(format!(
                    "{name} must vanish at the absorbing states 0 and {n}"
                )));
            }
        }
        for i in 1..n {
            validate_interior_rates(&p[i], &q[i], i)?;
        }
        Ok(GamblerChain { p, q })
    }

    /// Pot size `N` (the winning state).
    pub fn pot(&self) -> usize {
        self.p.len() - 1
    }

    pub fn p(&self, i: usize) -> &Scalar {
        &self.p[i]
    }

    pub fn q(&self, i: usize) -> &Scalar {
        &self.q[i]
    }

    pub fn p_rates(&self) -> &[Scalar] {
        &self.p
    }

    pub fn q_rates(&self) -> &[Scalar] {
        &self.q
    }

    /// Lose/win odds `r(i) = q(i)/p(i)` at an interior state.
    pub fn ratio(&self, i: usize) -> Scalar {
        debug_assert!(i >= 1 && i < self.pot());
        self.q[i].checked_div(&self.p[i]).expect("interior p(i) > 0")
    }

    /// Whether `r(i)` takes the same value at every interior state.
    pub fn has_constant_ratio(&self) -> bool {
        if self.pot() < 3 {
            return true;
        }
        let r = self.ratio(1);
        (2..self.pot()).all(|i| self.ratio(i) == r)
    }

    /// Sub-game on the window `{j, ..., k}`, re-indexed to `{0, ..., k-j}`
    /// with both window ends absorbing.
    pub fn restrict(&self, j: usize, k: usize) -> Result<Self> {
        if j >= k || k > self.pot() {
            return Err(Error::BadIndices(format!(
                "window {j}..{k} invalid for pot {}",
                self.pot()
            )));
        }
        let len = k - j + 1;
        let mut p = Vec::with_capacity(len);
        let mut q = Vec::with_capacity(len);
        p.push(Scalar::zero());
        q.push(Scalar::zero());
        for s in 1..len - 1 {
            p.push(self.p[j + s].clone());
            q.push(self.q[j + s].clone());
        }
        p.push(Scalar::zero());
        q.push(Scalar::zero());
        GamblerChain::new(p, q)
    }

    /// Multiplies every rate by `lambda`, re-validating the result. The walk
    /// becomes lazier; hitting probabilities are unchanged and every expected
    /// duration scales by `1/lambda`.
    pub fn scale_rates(&self, lambda: &Scalar) -> Result<Self> {
        let p = self.p.iter().map(|x| x * lambda).collect();
        let q = self.q.iter().map(|x| x * lambda).collect();
        GamblerChain::new(p, q)
    }
}

/// Nearest-neighbour walk on the cycle `Z_{m+1}` with ties allowed and no
/// absorbing states. Indices wrap modulo `m + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolygonChain {
    p: Vec<Scalar>,
    q: Vec<Scalar>,
}

impl PolygonChain {
    pub fn new(p: Vec<Scalar>, q: Vec<Scalar>) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::InvalidChain(format!(
                "rate vectors differ in length: {} vs {}",
                p.len(),
                q.len()
            )));
        }
        if p.len() < 3 {
            return Err(Error::InvalidChain("a polygon needs at least 3 vertices".into()));
        }
        for i in 0..p.len() {
            validate_interior_rates(&p[i], &q[i], i)?;
        }
        Ok(PolygonChain { p, q })
    }

    /// Largest vertex label `m`; the polygon has `m + 1` vertices.
    pub fn size(&self) -> usize {
        self.p.len() - 1
    }

    /// Number of vertices, `m + 1`.
    pub fn vertices(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self, i: usize) -> &Scalar {
        &self.p[i % self.vertices()]
    }

    pub fn q(&self, i: usize) -> &Scalar {
        &self.q[i % self.vertices()]
    }

    pub fn p_rates(&self) -> &[Scalar] {
        &self.p
    }

    pub fn q_rates(&self) -> &[Scalar] {
        &self.q
    }

    pub fn ratio(&self, i: usize) -> Scalar {
        let i = i % self.vertices();
        self.q[i].checked_div(&self.p[i]).expect("p(i) > 0")
    }

    /// Rotates vertex labels by `shift`: vertex `i` of the result carries the
    /// rates of vertex `i + shift` of the original.
    pub fn rotate(&self, shift: usize) -> Self {
        let n = self.vertices();
        let p = (0..n).map(|i| self.p[(i + shift) % n].clone()).collect();
        let q = (0..n).map(|i| self.q[(i + shift) % n].clone()).collect();
        PolygonChain { p, q }
    }

    pub fn scale_rates(&self, lambda: &Scalar) -> Result<Self> {
        let p = self.p.iter().map(|x| x * lambda).collect();
        let q = self.q.iter().map(|x| x * lambda).collect();
        PolygonChain::new(p, q)
    }
}

fn validate_interior_rates(p: &Scalar, q: &Scalar, i: usize) -> Result<()> {
    if !p.is_positive() || !q.is_positive() {
        return Err(Error::InvalidChain(format!("rates at state {i} must be positive")));
    }
    if (p + q) > Scalar::one() {
        return Err(Error::InvalidChain(format!("p({i}) + q({i}) exceeds 1")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sc(text: &str) -> Scalar {
        Scalar::parse(text).unwrap()
    }

    fn rates(texts: &[&str]) -> Vec<Scalar> {
        texts.iter().map(|t| sc(t)).collect()
    }

    #[test]
    fn accepts_classical_chain() {
        let chain = GamblerChain::new(
            rates(&["0", "1/2", "1/2", "0"]),
            rates(&["0", "1/2", "1/2", "0"]),
        )
        .unwrap();
        assert_eq!(chain.pot(), 3);
        assert!(chain.has_constant_ratio());
        assert_eq!(chain.ratio(1), Scalar::one());
    }

    #[test]
    fn rejects_invalid_chains() {
        // p(1) + q(1) = 2
        assert!(GamblerChain::new(rates(&["0", "1", "0"]), rates(&["0", "1", "0"])).is_err());
        // nonzero boundary rate
        assert!(GamblerChain::new(rates(&["1/2", "1/2", "0"]), rates(&["0", "1/4", "0"])).is_err());
        // length mismatch
        assert!(GamblerChain::new(rates(&["0", "1/2", "0"]), rates(&["0", "0"])).is_err());
        // zero interior rate
        assert!(GamblerChain::new(rates(&["0", "0", "0"]), rates(&["0", "1/2", "0"])).is_err());
        // too short
        assert!(GamblerChain::new(rates(&["0"]), rates(&["0"])).is_err());
    }

    #[test]
    fn single_edge_window_is_representable() {
        let chain = GamblerChain::new(rates(&["0", "0"]), rates(&["0", "0"])).unwrap();
        assert_eq!(chain.pot(), 1);
        assert!(chain.has_constant_ratio());
    }

    #[test]
    fn restrict_reindexes_the_window() {
        let chain = GamblerChain::new(
            rates(&["0", "1/3", "1/4", "1/5", "0"]),
            rates(&["0", "1/6", "1/2", "1/5", "0"]),
        )
        .unwrap();
        let sub = chain.restrict(1, 3).unwrap();
        assert_eq!(sub.pot(), 2);
        assert_eq!(sub.p(1), &sc("1/4"));
        assert_eq!(sub.q(1), &sc("1/2"));
        assert!(chain.restrict(2, 2).is_err());
        assert!(chain.restrict(0, 9).is_err());
    }

    #[test]
    fn polygon_validation_and_rotation() {
        let poly = PolygonChain::new(
            rates(&["1/4", "1/3", "1/2"]),
            rates(&["1/4", "1/3", "1/4"]),
        )
        .unwrap();
        assert_eq!(poly.size(), 2);
        let rot = poly.rotate(1);
        assert_eq!(rot.p(0), poly.p(1));
        assert_eq!(rot.q(2), poly.q(0));
        assert!(PolygonChain::new(rates(&["1/2", "1/2"]), rates(&["1/4", "1/4"])).is_err());
        assert!(PolygonChain::new(
            rates(&["3/4", "1/3", "1/2"]),
            rates(&["1/2", "1/3", "1/4"])
        )
        .is_err());
    }

    #[test]
    fn scaling_preserves_validity() {
        let chain = GamblerChain::new(
            rates(&["0", "1/2", "1/2", "0"]),
            rates(&["0", "1/2", "1/2", "0"]),
        )
        .unwrap();
        let lazy = chain.scale_rates(&sc("1/3")).unwrap();
        assert_eq!(lazy.p(1), &sc("1/6"));
        assert!(chain.scale_rates(&sc("3")).is_err());
    }
}
