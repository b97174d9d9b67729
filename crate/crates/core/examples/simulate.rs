//! Forward simulation of the isotropic model and comparison of the pooled
//! single-site histogram with the exact marginal.
//!
//! cargo run --release --example simulate -- [steps]

use bslab::one_site::{marginal_cdf_one, marginal_one};
use bslab::sim::{run_chain, stats_to_density, RunSpec};
use bslab::stats::ks_binned_distance;
use bslab::ReplacementPattern;

fn main() -> bslab::Result<()> {
    let steps: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2_000_000);
    let n = 4;
    let spec = RunSpec::new(ReplacementPattern::isotropic(n)?, steps)
        .bins(20)
        .seed(1)
        .workers(2);
    let stats = run_chain(&spec)?;
    let d = stats_to_density(&stats)?;

    println!("{:>6} {:>10} {:>10}", "x", "empirical", "exact");
    for (l, r, v) in d.marginal_rows() {
        let x = 0.5 * (l + r);
        println!("{x:>6.3} {v:>10.4} {:>10.4}", marginal_one(n, x)?);
    }
    let ks = ks_binned_distance(&stats.histograms.pooled, |x| marginal_cdf_one(n, x).unwrap());
    println!("recorded {} configurations, KS distance {ks:.2e}", stats.totals.recorded);
    Ok(())
}
