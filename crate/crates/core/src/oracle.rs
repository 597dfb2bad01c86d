//! Independent ground truth for the closed forms: exact solutions of the
//! first-step linear systems.
//!
//! Each quantity satisfies a tridiagonal system over the interior of the
//! window, solved here by forward elimination and back substitution in exact
//! rationals. The conditioned systems are assembled from the hitting
//! probabilities *as computed by this module*, so the oracle never touches
//! the closed-form code it is meant to check.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::chain::GamblerChain;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A tridiagonal linear system `A x = rhs` with `sub`, `main` and `sup`
/// diagonals of a square matrix.
#[derive(Debug, Clone)]
pub struct TridiagonalSystem {
    sub: Vec<Scalar>,
    main: Vec<Scalar>,
    sup: Vec<Scalar>,
    rhs: Vec<Scalar>,
}

impl TridiagonalSystem {
    /// `sub` and `sup` must be one shorter than `main`, which must match
    /// `rhs`. An empty system is allowed and has the empty solution.
    pub fn new(sub: Vec<Scalar>, main: Vec<Scalar>, sup: Vec<Scalar>, rhs: Vec<Scalar>) -> Result<Self> {
        let n = main.len();
        if rhs.len() != n || (n > 0 && (sub.len() != n - 1 || sup.len() != n - 1)) {
            return Err(Error::BadIndices(format!(
                "inconsistent tridiagonal dimensions: sub {}, main {}, sup {}, rhs {}",
                sub.len(),
                main.len(),
                sup.len(),
                rhs.len()
            )));
        }
        Ok(TridiagonalSystem { sub, main, sup, rhs })
    }

    /// Thomas elimination in exact arithmetic. The systems built from valid
    /// chains are uniquely solvable; a vanishing pivot therefore signals a
    /// malformed system and is reported as an error.
    pub fn solve(mut self) -> Result<Vec<Scalar>> {
        let n = self.main.len();
        if n == 0 {
            return Ok(Vec::new());
        }
        for i in 1..n {
            if self.main[i - 1].is_zero() {
                return Err(Error::DivisionByZero);
            }
            let factor = self.sub[i - 1].checked_div(&self.main[i - 1])?;
            let adjust_main = &factor * &self.sup[i - 1];
            self.main[i] -= &adjust_main;
            let adjust_rhs = &factor * &self.rhs[i - 1];
            self.rhs[i] -= &adjust_rhs;
        }
        let mut x = vec![Scalar::zero(); n];
        x[n - 1] = self.rhs[n - 1].checked_div(&self.main[n - 1])?;
        for i in (0..n - 1).rev() {
            let carried = &self.sup[i] * &x[i + 1];
            x[i] = (&self.rhs[i] - &carried).checked_div(&self.main[i])?;
        }
        Ok(x)
    }
}

fn check_window(chain: &GamblerChain, j: usize, k: usize) -> Result<()> {
    if j < k && k <= chain.pot() {
        Ok(())
    } else {
        Err(Error::BadIndices(format!(
            "need j < k <= {}; got ({j}, {k})",
            chain.pot()
        )))
    }
}

/// Hitting probabilities `h(i) = P(reach k before j | start i)` for
/// `i = j..=k`, from the harmonic system
/// `p(i) h(i+1) + q(i) h(i-1) - (p(i)+q(i)) h(i) = 0`, `h(j) = 0, h(k) = 1`.
pub fn solve_hitting_prob(chain: &GamblerChain, j: usize, k: usize) -> Result<Vec<Scalar>> {
    check_window(chain, j, k)?;
    let n = k - j - 1;
    let mut sub = Vec::new();
    let mut main = Vec::new();
    let mut sup = Vec::new();
    let mut rhs = vec![Scalar::zero(); n];
    for t in 0..n {
        let i = j + 1 + t;
        main.push(-(chain.p(i) + chain.q(i)));
        if t > 0 {
            sub.push(chain.q(i).clone());
        }
        if t < n.saturating_sub(1) {
            sup.push(chain.p(i).clone());
        }
    }
    if n > 0 {
        rhs[n - 1] = -chain.p(k - 1).clone();
    }
    let interior = TridiagonalSystem::new(sub, main, sup, rhs)?.solve()?;
    let mut h = Vec::with_capacity(k - j + 1);
    h.push(Scalar::zero());
    h.extend(interior);
    h.push(Scalar::one());
    Ok(h)
}

/// Expected absorption times `ET(i)` for `i = j..=k`, from
/// `p ET(i+1) + q ET(i-1) - (p+q) ET(i) = -1` with zero boundaries.
pub fn solve_expected_time(chain: &GamblerChain, j: usize, k: usize) -> Result<Vec<Scalar>> {
    check_window(chain, j, k)?;
    let n = k - j - 1;
    let mut sub = Vec::new();
    let mut main = Vec::new();
    let mut sup = Vec::new();
    let rhs = vec![-Scalar::one(); n];
    for t in 0..n {
        let i = j + 1 + t;
        main.push(-(chain.p(i) + chain.q(i)));
        if t > 0 {
            sub.push(chain.q(i).clone());
        }
        if t < n.saturating_sub(1) {
            sup.push(chain.p(i).clone());
        }
    }
    let interior = TridiagonalSystem::new(sub, main, sup, rhs)?.solve()?;
    let mut et = Vec::with_capacity(k - j + 1);
    et.push(Scalar::zero());
    et.extend(interior);
    et.push(Scalar::zero());
    Ok(et)
}

/// Which absorption event the duration is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Win,
    Lose,
}

/// Expected durations conditioned on the absorbing barrier, for `i = j..=k`.
///
/// The walk conditioned on winning is again a Markov chain whose transition
/// probabilities are reweighted by the hitting probabilities
/// (`q~(i) = q(i) h(i-1)/h(i)`, `p~(i) = p(i) h(i+1)/h(i)`, staying put
/// unchanged); its expected absorption time solves the same kind of
/// tridiagonal system. The entry at the barrier where the conditioning event
/// is impossible is `None`.
pub fn solve_conditional_time(
    chain: &GamblerChain,
    j: usize,
    k: usize,
    condition: Condition,
) -> Result<Vec<Option<Scalar>>> {
    check_window(chain, j, k)?;
    let h = solve_hitting_prob(chain, j, k)?;
    // weight(i) = probability of the conditioning event from i
    let weight = |t: usize| -> Scalar {
        match condition {
            Condition::Win => h[t].clone(),
            Condition::Lose => &Scalar::one() - &h[t],
        }
    };
    let n = k - j - 1;
    let mut sub = Vec::new();
    let mut main = Vec::new();
    let mut sup = Vec::new();
    let rhs = vec![-Scalar::one(); n];
    for t in 0..n {
        let i = j + 1 + t;
        let w = weight(t + 1);
        let up = (chain.p(i) * &weight(t + 2)).checked_div(&w)?;
        let down = (chain.q(i) * &weight(t)).checked_div(&w)?;
        main.push(-(&up + &down));
        if t > 0 {
            sub.push(down);
        }
        if t < n.saturating_sub(1) {
            sup.push(up);
        }
    }
    let interior = TridiagonalSystem::new(sub, main, sup, rhs)?.solve()?;
    let mut out = Vec::with_capacity(k - j + 1);
    out.push(match condition {
        Condition::Win => None,
        Condition::Lose => Some(Scalar::zero()),
    });
    out.extend(interior.into_iter().map(Some));
    out.push(match condition {
        Condition::Win => Some(Scalar::zero()),
        Condition::Lose => None,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sc(text: &str) -> Scalar {
        Scalar::parse(text).unwrap()
    }

    fn chain(p: &[&str], q: &[&str]) -> GamblerChain {
        GamblerChain::new(
            p.iter().map(|t| sc(t)).collect(),
            q.iter().map(|t| sc(t)).collect(),
        )
        .unwrap()
    }

    fn classical(n: usize) -> GamblerChain {
        let mut p = vec!["1/2"; n + 1];
        p[0] = "0";
        p[n] = "0";
        chain(&p, &p.clone())
    }

    #[test]
    fn hitting_probabilities_are_harmonic() {
        let h = solve_hitting_prob(&classical(5), 0, 5).unwrap();
        for (i, value) in h.iter().enumerate() {
            assert_eq!(value, &Scalar::from_fraction(i as i64, 5).unwrap());
        }
        // windowed: h(i) = (i - j)/(k - j)
        let h = solve_hitting_prob(&classical(5), 1, 4).unwrap();
        assert_eq!(h, vec![sc("0"), sc("1/3"), sc("2/3"), sc("1")]);
    }

    #[test]
    fn expected_times_classical() {
        let et = solve_expected_time(&classical(5), 0, 5).unwrap();
        assert_eq!(et[2], sc("6"));
        assert_eq!(et[0], Scalar::zero());
        assert_eq!(et[5], Scalar::zero());
    }

    #[test]
    fn conditional_time_classical() {
        let ew = solve_conditional_time(&classical(3), 0, 3, Condition::Win).unwrap();
        assert_eq!(ew[1], Some(sc("8/3")));
        assert_eq!(ew[3], Some(Scalar::zero()));
        assert_eq!(ew[0], None);
        let eb = solve_conditional_time(&classical(3), 0, 3, Condition::Lose).unwrap();
        assert_eq!(eb[1], Some(sc("5/3")));
        assert_eq!(eb[0], Some(Scalar::zero()));
        assert_eq!(eb[3], None);
    }

    #[test]
    fn two_state_window_is_geometric() {
        let c = chain(&["0", "1/3", "1/4", "0"], &["0", "1/5", "1/2", "0"]);
        let ew = solve_conditional_time(&c, 0, 2, Condition::Win).unwrap();
        let expect = (&sc("1/3") + &sc("1/5")).recip().unwrap();
        assert_eq!(ew[1], Some(expect));
    }

    #[test]
    fn conditioned_rows_sum_to_one() {
        let c = chain(
            &["0", "2/5", "1/3", "1/7", "1/2", "0"],
            &["0", "1/5", "1/3", "2/7", "1/4", "0"],
        );
        for (j, k) in [(0, 5), (1, 4), (0, 3)] {
            let h = solve_hitting_prob(&c, j, k).unwrap();
            for i in j + 1..k {
                let up = (c.p(i) * &h[i + 1 - j]).checked_div(&h[i - j]).unwrap();
                let down = (c.q(i) * &h[i - 1 - j]).checked_div(&h[i - j]).unwrap();
                let stay = &Scalar::one() - &(c.p(i) + c.q(i));
                assert_eq!(&(&up + &down) + &stay, Scalar::one(), "win row i={i}");
                let g = |t: usize| &Scalar::one() - &h[t];
                let up = (c.p(i) * &g(i + 1 - j)).checked_div(&g(i - j)).unwrap();
                let down = (c.q(i) * &g(i - 1 - j)).checked_div(&g(i - j)).unwrap();
                assert_eq!(&(&up + &down) + &stay, Scalar::one(), "lose row i={i}");
            }
        }
    }

    #[test]
    fn empty_interior_windows() {
        let c = classical(3);
        let h = solve_hitting_prob(&c, 1, 2).unwrap();
        assert_eq!(h, vec![Scalar::zero(), Scalar::one()]);
        let ew = solve_conditional_time(&c, 1, 2, Condition::Win).unwrap();
        assert_eq!(ew, vec![None, Some(Scalar::zero())]);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        assert!(TridiagonalSystem::new(vec![], vec![sc("1"), sc("1")], vec![], vec![sc("1")]).is_err());
    }
}
