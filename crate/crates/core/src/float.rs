//! Opt-in 64-bit float mode.
//!
//! Exact rationals are the default everywhere; this module exists for
//! large-pot benchmarking where the ladder products would grow huge exact
//! representations. Where both modes run, the float results are expected to
//! agree with the exact values to about 1e-10 relative error (beyond that
//! the products over- or underflow and the exact path is the only option).

use alloc::format;
use alloc::vec::Vec;

use crate::chain::GamblerChain;
use crate::error::{Error, Result};

/// Chain rates converted once to doubles.
#[derive(Debug, Clone)]
pub struct FloatGambler {
    p: Vec<f64>,
    q: Vec<f64>,
}

impl FloatGambler {
    pub fn new(chain: &GamblerChain) -> Self {
        FloatGambler {
            p: chain.p_rates().iter().map(|x| x.to_f64()).collect(),
            q: chain.q_rates().iter().map(|x| x.to_f64()).collect(),
        }
    }

    pub fn pot(&self) -> usize {
        self.p.len() - 1
    }

    pub fn p(&self, i: usize) -> f64 {
        self.p[i]
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q[i]
    }

    pub fn ratio(&self, i: usize) -> f64 {
        self.q[i] / self.p[i]
    }

    fn restrict(&self, j: usize, k: usize) -> FloatGambler {
        let mut p = Vec::with_capacity(k - j + 1);
        let mut q = Vec::with_capacity(k - j + 1);
        p.push(0.0);
        q.push(0.0);
        for s in 1..k - j {
            p.push(self.p[j + s]);
            q.push(self.q[j + s]);
        }
        p.push(0.0);
        q.push(0.0);
        FloatGambler { p, q }
    }
}

fn check_window(chain: &FloatGambler, j: usize, i: usize, k: usize) -> Result<()> {
    if j <= i && i <= k && j < k && k <= chain.pot() {
        Ok(())
    } else {
        Err(Error::BadIndices(format!(
            "need j <= i <= k, j < k, k <= {}; got ({j}, {i}, {k})",
            chain.pot()
        )))
    }
}

fn ladder_sums(chain: &FloatGambler, j: usize, upto: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(upto + 1 - j);
    out.push(0.0);
    let mut prod = 1.0;
    let mut acc = 0.0;
    for n in j + 1..=upto {
        if n > j + 1 {
            prod *= chain.ratio(n - 1);
        }
        acc += prod;
        out.push(acc);
    }
    out
}

pub fn rho_f64(chain: &FloatGambler, j: usize, i: usize, k: usize) -> Result<f64> {
    check_window(chain, j, i, k)?;
    let d = ladder_sums(chain, j, k);
    Ok(d[i - j] / d[k - j])
}

pub fn expected_duration_f64(chain: &FloatGambler, j: usize, i: usize, k: usize) -> Result<f64> {
    check_window(chain, j, i, k)?;
    if i == j || k == j + 1 {
        return Ok(0.0);
    }
    let mut d = 1.0; // d_n
    let mut g = 0.0; // sum 1/(p(s) d_s)
    let mut weighted_all = 0.0;
    let mut weighted_to_i = 0.0;
    let mut d_all = 1.0; // includes d_j = 1
    let mut d_to_i = 1.0;
    for n in j + 1..k {
        d *= chain.ratio(n);
        g += 1.0 / (chain.p(n) * d);
        let term = d * g;
        weighted_all += term;
        d_all += d;
        if n < i {
            weighted_to_i += term;
            d_to_i += d;
        }
    }
    Ok(weighted_all * d_to_i / d_all - weighted_to_i)
}

/// Conditional winning time along the recurrence route, in doubles.
pub fn ew_f64(chain: &FloatGambler, j: usize, i: usize, k: usize) -> Result<f64> {
    check_window(chain, j, i, k)?;
    if i == j {
        return Err(Error::UndefinedConditional(
            "winning time does not exist from the losing barrier".into(),
        ));
    }
    if i == k {
        return Ok(0.0);
    }
    let sub = if j == 0 && k == chain.pot() {
        chain.clone()
    } else {
        chain.restrict(j, k)
    };
    let (len, start) = (k - j, i - j);
    let d = ladder_sums(&sub, 0, len);
    let mut a_prev2 = 0.0;
    let mut a_prev = -(d[1] / d[2]) / sub.p(1);
    let mut from_one_to_start = match start {
        1 => 0.0,
        2 => -a_prev,
        _ => f64::NAN,
    };
    let mut from_one_to_len = if len == 2 { -a_prev } else { f64::NAN };
    for m in 2..len {
        let rho_short = d[m] / d[m + 1];
        let a = -rho_short / sub.p(m);
        let b = (sub.p(m) + sub.q(m)) * rho_short / sub.p(m);
        let c = -sub.ratio(m) * d[m - 1] / d[m + 1];
        let a_cur = b * a_prev + c * a_prev2 + a;
        if m + 1 == start {
            from_one_to_start = -a_cur;
        }
        if m + 1 == len {
            from_one_to_len = -a_cur;
        }
        a_prev2 = a_prev;
        a_prev = a_cur;
    }
    Ok(from_one_to_len - from_one_to_start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gambler;
    use crate::montecarlo::random_gambler_chain;
    use crate::scalar::Scalar;
    use alloc::vec;
    use rand_core::SeedableRng;

    fn rel_close(a: f64, b: f64) {
        let scale = b.abs().max(1.0);
        assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
    }

    #[test]
    fn float_mode_tracks_exact_values() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let chain = random_gambler_chain(12, &mut rng);
            let fg = FloatGambler::new(&chain);
            let n = chain.pot();
            for i in 0..=n {
                rel_close(
                    rho_f64(&fg, 0, i, n).unwrap(),
                    gambler::rho(&chain, 0, i, n).unwrap().to_f64(),
                );
                rel_close(
                    expected_duration_f64(&fg, 0, i, n).unwrap(),
                    gambler::expected_duration(&chain, 0, i, n).unwrap().to_f64(),
                );
                if i > 0 {
                    rel_close(
                        ew_f64(&fg, 0, i, n).unwrap(),
                        gambler::ew(&chain, 0, i, n).unwrap().to_f64(),
                    );
                }
            }
            rel_close(
                ew_f64(&fg, 2, 3, 7).unwrap(),
                gambler::ew(&chain, 2, 3, 7).unwrap().to_f64(),
            );
        }
    }

    #[test]
    fn float_mode_reaches_large_pots() {
        // symmetric chain: EW_{0:1:N} = (N-1)(N+1)/(6p)
        let n = 400;
        let mut p = vec![Scalar::parse("1/2").unwrap(); n + 1];
        p[0] = Scalar::zero();
        p[n] = Scalar::zero();
        let chain = GamblerChain::new(p.clone(), p).unwrap();
        let fg = FloatGambler::new(&chain);
        let expect = ((n * n - 1) as f64) / 3.0;
        rel_close(ew_f64(&fg, 0, 1, n).unwrap(), expect);
    }
}
