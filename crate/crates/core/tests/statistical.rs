//! Statistical acceptance of the simulator: across many independent seeds,
//! the estimates cover the exact values at the 4-sigma level almost always.

use ruin_core::montecarlo::{run_gambler_trials, run_polygon_trials, SimReport};
use ruin_core::{GamblerChain, PolygonChain, Scalar};

fn sc(text: &str) -> Scalar {
    Scalar::parse(text).unwrap()
}

fn classical(n: usize) -> GamblerChain {
    let mut p = vec![sc("1/2"); n + 1];
    p[0] = Scalar::zero();
    p[n] = Scalar::zero();
    GamblerChain::new(p.clone(), p).unwrap()
}

fn covered(reports: &[SimReport], name: &str, exact: f64) -> bool {
    let r = reports.iter().find(|r| r.quantity == name).unwrap();
    (r.estimate.unwrap() - exact).abs() <= 4.0 * r.stderr.unwrap()
}

#[test]
fn gambler_coverage_over_forty_seeds() {
    let chain = classical(3);
    let mut hits = 0;
    for seed in 0..40u64 {
        let reports = run_gambler_trials(&chain, 0, 1, 3, 20_000, 1000 + seed).unwrap();
        let ok = covered(&reports, "rho", 1.0 / 3.0)
            && covered(&reports, "et", 2.0)
            && covered(&reports, "ew", 8.0 / 3.0)
            && covered(&reports, "eb", 5.0 / 3.0);
        hits += ok as u32;
    }
    assert!(hits >= 38, "only {hits}/40 seeds covered every quantity");
}

#[test]
fn polygon_coverage_over_forty_seeds() {
    let poly = PolygonChain::new(vec![sc("1/2"); 3], vec![sc("1/2"); 3]).unwrap();
    let mut hits = 0;
    for seed in 0..40u64 {
        let reports = run_polygon_trials(&poly, 0, 20_000, 7000 + seed).unwrap();
        let ok = covered(&reports, "ai", 0.5)
            && covered(&reports, "vi", 3.0)
            && covered(&reports, "ri", 2.0)
            && covered(&reports, "lij:1", 0.5)
            && covered(&reports, "lij:2", 0.5);
        hits += ok as u32;
    }
    assert!(hits >= 38, "only {hits}/40 seeds covered every quantity");
}
