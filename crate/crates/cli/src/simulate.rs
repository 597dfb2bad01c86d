//! Parallel simulation driver.
//!
//! Work is split into the same fixed batch ranges the sequential runner
//! uses; each batch is simulated on its own trial streams and the integer
//! accumulators are merged in batch order. Both facts together make the
//! output byte-identical for any worker count.

use rayon::prelude::*;

use ruin_core::montecarlo::{
    batch_ranges, ConjectureReport, GamblerGameSim, GamblerTallies, PolygonTallies,
    PolygonWalkSim, SimReport,
};
use ruin_core::{GamblerChain, PolygonChain};
use serde::Serialize;

fn pool(workers: usize) -> anyhow::Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers).build()?)
}

pub fn run_gambler_parallel(
    chain: &GamblerChain,
    j: usize,
    i: usize,
    k: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> anyhow::Result<Vec<SimReport>> {
    let sim = GamblerGameSim::new(chain, j, i, k, seed)?;
    let batches: Vec<Result<GamblerTallies, ruin_core::Error>> = pool(workers)?.install(|| {
        batch_ranges(trials)
            .par_iter()
            .map(|&(start, len)| sim.run_batch(start, len))
            .collect()
    });
    let mut total = GamblerTallies::default();
    for b in batches {
        total.merge(&b?);
    }
    Ok(sim.reports(&total, trials))
}

pub fn run_polygon_parallel(
    poly: &PolygonChain,
    start: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> anyhow::Result<Vec<SimReport>> {
    let sim = PolygonWalkSim::new(poly, start, seed)?;
    let batches: Vec<Result<PolygonTallies, ruin_core::Error>> = pool(workers)?.install(|| {
        batch_ranges(trials)
            .par_iter()
            .map(|&(first, len)| sim.run_batch(first, len))
            .collect()
    });
    let mut total = PolygonTallies::new(poly.vertices());
    for b in batches {
        total.merge(&b?);
    }
    Ok(sim.reports(&total))
}

#[derive(Serialize)]
struct SimReportDto<'a> {
    quantity: &'a str,
    estimate: Option<f64>,
    stderr: Option<f64>,
    trials: u64,
    conditioned_trials: u64,
    seed: u64,
}

pub fn report_to_json(report: &SimReport) -> String {
    serde_json::to_string(&SimReportDto {
        quantity: &report.quantity,
        estimate: report.estimate,
        stderr: report.stderr,
        trials: report.trials,
        conditioned_trials: report.conditioned_trials,
        seed: report.seed,
    })
    .expect("report serializes")
}

#[derive(Serialize)]
struct SampleDto {
    conditioned_trials: u64,
    estimate: Option<f64>,
    stderr: Option<f64>,
}

#[derive(Serialize)]
struct ConjectureDto {
    quantity: &'static str,
    trials: u64,
    seed: u64,
    base: SampleDto,
    swapped: SampleDto,
    ks_distance: f64,
}

pub fn conjecture_to_json(report: &ConjectureReport) -> String {
    serde_json::to_string(&ConjectureDto {
        quantity: "conjecture_probe",
        trials: report.trials,
        seed: report.seed,
        base: SampleDto {
            conditioned_trials: report.base.conditioned_trials,
            estimate: report.base.estimate,
            stderr: report.base.stderr,
        },
        swapped: SampleDto {
            conditioned_trials: report.swapped.conditioned_trials,
            estimate: report.swapped.estimate,
            stderr: report.swapped.stderr,
        },
        ks_distance: report.ks_distance,
    })
    .expect("report serializes")
}
