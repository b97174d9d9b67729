//! Density estimated from a simulation, used as a provider for the
//! stationarity check. Binning bias of the piecewise-constant estimate shows
//! up as residuals well above the Monte Carlo noise.

use bslab::functional::residual_sweep;
use bslab::sim::{run_chain, stats_to_density, RunSpec};
use bslab::ReplacementPattern;

fn main() -> bslab::Result<()> {
    let p = ReplacementPattern::complement(5, &[3])?;
    let stats = run_chain(&RunSpec::new(p.clone(), 4_000_000).bins(25).seed(8).workers(2))?;
    let d = stats_to_density(&stats)?;
    println!(
        "assembly {:?}: marginal mass {:.3e}, pair mass {:.3e}, total mass {:.3e}",
        d.assembly(),
        d.marginal_integral() - 1.0,
        d.pair_integral() - 1.0,
        d.total_mass() - 1.0
    );
    let s = residual_sweep(&d, &p, 30, 100_000, 4)?;
    println!(
        "stationarity residuals: max |z| = {:.2}, fraction |z| < 3 = {:.2}",
        s.max_abs_z, s.fraction_within_3
    );
    Ok(())
}
