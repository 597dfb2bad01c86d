//! Seeded Monte-Carlo verification of the closed forms.
//!
//! Every trial draws from its own ChaCha8 stream derived from
//! `(seed, trial index)`, so a trial's outcome does not depend on how trials
//! are scheduled. Accumulation is integer-exact (counts and power sums in
//! wide integers), which makes merging associative and commutative down to
//! the bit: the same `(seed, trials)` pair produces byte-identical reports
//! no matter how many workers split the range.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::chain::{GamblerChain, PolygonChain};
use crate::error::{Error, Result};
use crate::gambler::swap_pq;
use crate::scalar::Scalar;

/// Trials per accumulation batch. The batch partition is part of the output
/// contract only through the integer accumulators, which make any regrouping
/// produce identical results; the constant exists so parallel drivers can
/// split work the same way the sequential one does.
pub const SIM_BATCH: u64 = 16_384;

/// Defensive cap on a single trajectory; valid chains absorb almost surely
/// long before this.
pub const STEP_CAP: u64 = 1_000_000_000;

/// Fixed-size batch ranges `(start, len)` covering `0..trials`.
pub fn batch_ranges(trials: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < trials {
        let len = SIM_BATCH.min(trials - start);
        out.push((start, len));
        start += len;
    }
    out
}

fn base_key(seed: u64) -> [u8; 32] {
    // SplitMix64 expansion of the user seed into a full ChaCha key
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    key
}

fn trial_rng(key: &[u8; 32], trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(*key);
    rng.set_stream(trial);
    rng
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Integer-exact accumulator of a sample of non-negative integers: count,
/// sum and sum of squares. Merging is plain addition, so it is associative,
/// commutative and lossless.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    count: u64,
    sum: u128,
    sum_sq: u128,
}

impl Tally {
    pub fn push(&mut self, value: u64) {
        self.count += 1;
        self.sum += value as u128;
        self.sum_sq += (value as u128) * (value as u128);
    }

    pub fn merge(&mut self, other: &Tally) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    /// Synthesises the tally of a 0/1 sample with `hits` ones among `total`.
    pub fn bernoulli(hits: u64, total: u64) -> Tally {
        Tally { count: total, sum: hits as u128, sum_sq: hits as u128 }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> Option<f64> {
        if self.count == 0 {
            None
        } else {
            Some(self.sum as f64 / self.count as f64)
        }
    }

    /// Sample standard deviation over the square root of the count.
    pub fn stderr(&self) -> Option<f64> {
        if self.count < 2 {
            return None;
        }
        let n = self.count as u128;
        // n * sum_sq - sum^2 = n(n-1) * sample variance
        let var_num = (n * self.sum_sq) as i128 - (self.sum * self.sum) as i128;
        let var = var_num.max(0) as f64 / (n * (n - 1)) as f64;
        Some(libm::sqrt(var / self.count as f64))
    }
}

/// One estimated quantity with its uncertainty and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub quantity: String,
    /// Absent when no trial realised the conditioning event.
    pub estimate: Option<f64>,
    pub stderr: Option<f64>,
    pub trials: u64,
    pub conditioned_trials: u64,
    pub seed: u64,
}

impl SimReport {
    fn from_tally(quantity: &str, tally: &Tally, trials: u64, seed: u64) -> SimReport {
        SimReport {
            quantity: quantity.into(),
            estimate: tally.mean(),
            stderr: tally.stderr(),
            trials,
            conditioned_trials: tally.count(),
            seed,
        }
    }
}

/// Simulator of one absorbing game `(j, i, k)`.
pub struct GamblerGameSim {
    up: Vec<f64>,
    move_any: Vec<f64>,
    j: usize,
    start: usize,
    k: usize,
    seed: u64,
    key: [u8; 32],
}

/// Accumulated outcomes of gambler trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GamblerTallies {
    pub wins: Tally,
    pub duration: Tally,
    pub win_duration: Tally,
    pub lose_duration: Tally,
}

impl GamblerTallies {
    pub fn merge(&mut self, other: &GamblerTallies) {
        self.wins.merge(&other.wins);
        self.duration.merge(&other.duration);
        self.win_duration.merge(&other.win_duration);
        self.lose_duration.merge(&other.lose_duration);
    }
}

impl GamblerGameSim {
    pub fn new(chain: &GamblerChain, j: usize, i: usize, k: usize, seed: u64) -> Result<Self> {
        if !(j <= i && i <= k && j < k && k <= chain.pot()) {
            return Err(Error::BadIndices(format!(
                "need j <= i <= k, j < k, k <= {}; got ({j}, {i}, {k})",
                chain.pot()
            )));
        }
        let up: Vec<f64> = chain.p_rates().iter().map(|x| x.to_f64()).collect();
        let move_any = chain
            .p_rates()
            .iter()
            .zip(chain.q_rates())
            .map(|(p, q)| (p + q).to_f64())
            .collect();
        Ok(GamblerGameSim { up, move_any, j, start: i, k, seed, key: base_key(seed) })
    }

    /// Runs trials `start..start+len`, each on its own stream.
    pub fn run_batch(&self, first_trial: u64, len: u64) -> Result<GamblerTallies> {
        let mut out = GamblerTallies::default();
        for trial in first_trial..first_trial + len {
            let mut rng = trial_rng(&self.key, trial);
            let mut state = self.start;
            let mut steps = 0u64;
            while state != self.j && state != self.k {
                let u = unit_f64(&mut rng);
                if u < self.up[state] {
                    state += 1;
                } else if u < self.move_any[state] {
                    state -= 1;
                }
                steps += 1;
                if steps > STEP_CAP {
                    return Err(Error::StepLimitExceeded);
                }
            }
            let won = state == self.k;
            out.wins.push(won as u64);
            out.duration.push(steps);
            if won {
                out.win_duration.push(steps);
            } else {
                out.lose_duration.push(steps);
            }
        }
        Ok(out)
    }

    pub fn reports(&self, tallies: &GamblerTallies, trials: u64) -> Vec<SimReport> {
        let s = self.seed;
        alloc::vec![
            SimReport::from_tally("rho", &tallies.wins, trials, s),
            SimReport::from_tally("et", &tallies.duration, trials, s),
            SimReport::from_tally("ew", &tallies.win_duration, trials, s),
            SimReport::from_tally("eb", &tallies.lose_duration, trials, s),
        ]
    }
}

/// Estimates rho, ET, EW and EB for one game with `trials` seeded trials.
pub fn run_gambler_trials(
    chain: &GamblerChain,
    j: usize,
    i: usize,
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<SimReport>> {
    if trials == 0 {
        return Err(Error::BadIndices("need at least one trial".into()));
    }
    let sim = GamblerGameSim::new(chain, j, i, k, seed)?;
    let mut total = GamblerTallies::default();
    for (start, len) in batch_ranges(trials) {
        total.merge(&sim.run_batch(start, len)?);
    }
    Ok(sim.reports(&total, trials))
}

/// Simulator of the covering walk on a polygon.
pub struct PolygonWalkSim {
    up: Vec<f64>,
    move_any: Vec<f64>,
    start: usize,
    vertices: usize,
    seed: u64,
    key: [u8; 32],
}

/// Accumulated outcomes of polygon trials.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PolygonTallies {
    pub trials: u64,
    pub all_before_return: u64,
    pub cover: Tally,
    pub extra_return: Tally,
    pub last_hits: Vec<u64>,
    pub cover_by_last: Vec<Tally>,
}

impl PolygonTallies {
    pub fn new(vertices: usize) -> Self {
        PolygonTallies {
            trials: 0,
            all_before_return: 0,
            cover: Tally::default(),
            extra_return: Tally::default(),
            last_hits: alloc::vec![0; vertices],
            cover_by_last: alloc::vec![Tally::default(); vertices],
        }
    }

    pub fn merge(&mut self, other: &PolygonTallies) {
        self.trials += other.trials;
        self.all_before_return += other.all_before_return;
        self.cover.merge(&other.cover);
        self.extra_return.merge(&other.extra_return);
        for (a, b) in self.last_hits.iter_mut().zip(&other.last_hits) {
            *a += b;
        }
        for (a, b) in self.cover_by_last.iter_mut().zip(&other.cover_by_last) {
            a.merge(b);
        }
    }
}

impl PolygonWalkSim {
    pub fn new(poly: &PolygonChain, start: usize, seed: u64) -> Result<Self> {
        let vertices = poly.vertices();
        if vertices > 64 {
            return Err(Error::BadIndices(
                "simulation tracks visits in a 64-bit mask; at most 64 vertices".into(),
            ));
        }
        let up: Vec<f64> = poly.p_rates().iter().map(|x| x.to_f64()).collect();
        let move_any = poly
            .p_rates()
            .iter()
            .zip(poly.q_rates())
            .map(|(p, q)| (p + q).to_f64())
            .collect();
        Ok(PolygonWalkSim { up, move_any, start: start % vertices, vertices, seed, key: base_key(seed) })
    }

    pub fn run_batch(&self, first_trial: u64, len: u64) -> Result<PolygonTallies> {
        let mut out = PolygonTallies::new(self.vertices);
        let full_mask: u64 = if self.vertices == 64 { u64::MAX } else { (1 << self.vertices) - 1 };
        for trial in first_trial..first_trial + len {
            let mut rng = trial_rng(&self.key, trial);
            let mut state = self.start;
            let mut visited: u64 = 1 << state;
            let mut steps = 0u64;
            let mut returned_early = false;
            let last_vertex;
            loop {
                let u = unit_f64(&mut rng);
                if u < self.up[state] {
                    state = if state + 1 == self.vertices { 0 } else { state + 1 };
                } else if u < self.move_any[state] {
                    state = if state == 0 { self.vertices - 1 } else { state - 1 };
                }
                steps += 1;
                if steps > STEP_CAP {
                    return Err(Error::StepLimitExceeded);
                }
                let bit = 1u64 << state;
                if visited & bit == 0 {
                    visited |= bit;
                    if visited == full_mask {
                        last_vertex = state;
                        break;
                    }
                } else if state == self.start {
                    returned_early = true;
                }
            }
            let mut extra = 0u64;
            while state != self.start {
                let u = unit_f64(&mut rng);
                if u < self.up[state] {
                    state = if state + 1 == self.vertices { 0 } else { state + 1 };
                } else if u < self.move_any[state] {
                    state = if state == 0 { self.vertices - 1 } else { state - 1 };
                }
                extra += 1;
                if extra > STEP_CAP {
                    return Err(Error::StepLimitExceeded);
                }
            }
            out.trials += 1;
            out.all_before_return += (!returned_early) as u64;
            out.cover.push(steps);
            out.extra_return.push(extra);
            out.last_hits[last_vertex] += 1;
            out.cover_by_last[last_vertex].push(steps);
        }
        Ok(out)
    }

    /// One report per quantity: the return-before-cover probability `ai`, the
    /// cover time `vi`, the extra return time `ri`, and per last vertex `j`
    /// the probability `lij:j` and conditional cover time `evij:j`.
    pub fn reports(&self, tallies: &PolygonTallies) -> Vec<SimReport> {
        let trials = tallies.trials;
        let s = self.seed;
        let mut out = alloc::vec![
            SimReport::from_tally("ai", &Tally::bernoulli(tallies.all_before_return, trials), trials, s),
            SimReport::from_tally("vi", &tallies.cover, trials, s),
            SimReport::from_tally("ri", &tallies.extra_return, trials, s),
        ];
        for offset in 1..self.vertices {
            let j = (self.start + offset) % self.vertices;
            out.push(SimReport::from_tally(
                &format!("lij:{j}"),
                &Tally::bernoulli(tallies.last_hits[j], trials),
                trials,
                s,
            ));
        }
        for offset in 1..self.vertices {
            let j = (self.start + offset) % self.vertices;
            out.push(SimReport::from_tally(
                &format!("evij:{j}"),
                &tallies.cover_by_last[j],
                trials,
                s,
            ));
        }
        out
    }
}

/// Estimates every cover statistic of the walk started at `start`.
pub fn run_polygon_trials(
    poly: &PolygonChain,
    start: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<SimReport>> {
    if trials == 0 {
        return Err(Error::BadIndices("need at least one trial".into()));
    }
    let sim = PolygonWalkSim::new(poly, start, seed)?;
    let mut total = PolygonTallies::new(poly.vertices());
    for (first, len) in batch_ranges(trials) {
        total.merge(&sim.run_batch(first, len)?);
    }
    Ok(sim.reports(&total))
}

/// Summary of one simulated sample of conditional winning times.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSummary {
    pub conditioned_trials: u64,
    pub estimate: Option<f64>,
    pub stderr: Option<f64>,
}

impl SampleSummary {
    fn from_tally(tally: &Tally) -> Self {
        SampleSummary {
            conditioned_trials: tally.count(),
            estimate: tally.mean(),
            stderr: tally.stderr(),
        }
    }
}

/// Empirical comparison of the winning-time distribution under `(p, q)` and
/// under the swapped rates `(q, p)` for a constant-ratio chain. Reports the
/// two sample means and a two-sample Kolmogorov-Smirnov distance; it asserts
/// nothing (the distributional symmetry is an open question, only the
/// equality of expectations is settled).
#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureReport {
    pub trials: u64,
    pub seed: u64,
    pub base: SampleSummary,
    pub swapped: SampleSummary,
    pub ks_distance: f64,
}

pub fn conjecture_probe(
    chain: &GamblerChain,
    i: usize,
    trials: u64,
    seed: u64,
) -> Result<ConjectureReport> {
    if !chain.has_constant_ratio() {
        return Err(Error::NonConstantRatio);
    }
    if trials == 0 {
        return Err(Error::BadIndices("need at least one trial".into()));
    }
    let swapped_chain = swap_pq(chain);
    let (base_tally, base_hist) = winning_time_histogram(chain, i, trials, seed)?;
    let (swap_tally, swap_hist) = winning_time_histogram(&swapped_chain, i, trials, seed)?;
    Ok(ConjectureReport {
        trials,
        seed,
        base: SampleSummary::from_tally(&base_tally),
        swapped: SampleSummary::from_tally(&swap_tally),
        ks_distance: ks_distance(&base_hist, &swap_hist),
    })
}

fn winning_time_histogram(
    chain: &GamblerChain,
    i: usize,
    trials: u64,
    seed: u64,
) -> Result<(Tally, BTreeMap<u64, u64>)> {
    let n = chain.pot();
    let sim = GamblerGameSim::new(chain, 0, i, n, seed)?;
    let mut tally = Tally::default();
    let mut hist = BTreeMap::new();
    for (first, len) in batch_ranges(trials) {
        for trial in first..first + len {
            let mut rng = trial_rng(&sim.key, trial);
            let mut state = i;
            let mut steps = 0u64;
            while state != 0 && state != n {
                let u = unit_f64(&mut rng);
                if u < sim.up[state] {
                    state += 1;
                } else if u < sim.move_any[state] {
                    state -= 1;
                }
                steps += 1;
                if steps > STEP_CAP {
                    return Err(Error::StepLimitExceeded);
                }
            }
            if state == n {
                tally.push(steps);
                *hist.entry(steps).or_insert(0) += 1;
            }
        }
    }
    Ok((tally, hist))
}

/// Largest absolute difference of the two empirical CDFs.
fn ks_distance(a: &BTreeMap<u64, u64>, b: &BTreeMap<u64, u64>) -> f64 {
    let total_a: u64 = a.values().sum();
    let total_b: u64 = b.values().sum();
    if total_a == 0 || total_b == 0 {
        return f64::NAN;
    }
    let mut keys: Vec<u64> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let mut cum_a = 0u64;
    let mut cum_b = 0u64;
    let mut worst = 0.0f64;
    for key in keys {
        cum_a += a.get(&key).copied().unwrap_or(0);
        cum_b += b.get(&key).copied().unwrap_or(0);
        let gap = (cum_a as f64 / total_a as f64 - cum_b as f64 / total_b as f64).abs();
        worst = worst.max(gap);
    }
    worst
}

/// Random valid gambler chain with small rational rates, for randomized
/// verification sweeps.
pub fn random_gambler_chain(n: usize, rng: &mut ChaCha8Rng) -> GamblerChain {
    assert!(n >= 2);
    let mut p = Vec::with_capacity(n + 1);
    let mut q = Vec::with_capacity(n + 1);
    p.push(Scalar::zero());
    q.push(Scalar::zero());
    for _ in 1..n {
        let denom = 2 + rand_below(rng, 11) as i64;
        let a = 1 + rand_below(rng, denom as u64 - 1) as i64;
        let b = 1 + rand_below(rng, (denom - a) as u64) as i64;
        p.push(Scalar::from_fraction(a, denom).expect("denom > 0"));
        q.push(Scalar::from_fraction(b, denom).expect("denom > 0"));
    }
    p.push(Scalar::zero());
    q.push(Scalar::zero());
    GamblerChain::new(p, q).expect("construction is valid by choice of rates")
}

/// Random chain with the prescribed constant ratio `q(i)/p(i)` and varying
/// activity p(i) + q(i).
pub fn random_constant_ratio_chain(n: usize, ratio: &Scalar, rng: &mut ChaCha8Rng) -> GamblerChain {
    assert!(n >= 2);
    assert!(ratio.is_positive());
    let one_plus = &Scalar::one() + ratio;
    let mut p = Vec::with_capacity(n + 1);
    let mut q = Vec::with_capacity(n + 1);
    p.push(Scalar::zero());
    q.push(Scalar::zero());
    for _ in 1..n {
        let denom = 2 + rand_below(rng, 11) as i64;
        let a = 1 + rand_below(rng, denom as u64) as i64;
        let activity = Scalar::from_fraction(a, denom).expect("denom > 0");
        let pi = activity.checked_div(&one_plus).expect("1 + r > 0");
        q.push(&pi * ratio);
        p.push(pi);
    }
    p.push(Scalar::zero());
    q.push(Scalar::zero());
    GamblerChain::new(p, q).expect("construction is valid by choice of rates")
}

/// Random valid polygon rates.
pub fn random_polygon_chain(m: usize, rng: &mut ChaCha8Rng) -> PolygonChain {
    assert!(m >= 2);
    let mut p = Vec::with_capacity(m + 1);
    let mut q = Vec::with_capacity(m + 1);
    for _ in 0..=m {
        let denom = 2 + rand_below(rng, 11) as i64;
        let a = 1 + rand_below(rng, denom as u64 - 1) as i64;
        let b = 1 + rand_below(rng, (denom - a) as u64) as i64;
        p.push(Scalar::from_fraction(a, denom).expect("denom > 0"));
        q.push(Scalar::from_fraction(b, denom).expect("denom > 0"));
    }
    PolygonChain::new(p, q).expect("construction is valid by choice of rates")
}

fn rand_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    rng.next_u64() % bound
}
