//! Monte Carlo residuals of the stationarity identity for several candidate
//! densities.

use bslab::density::DensityProvider;
use bslab::functional::residual_sweep;
use bslab::one_site::OneSiteDensity;
use bslab::two_site::FixedPointTwo;
use bslab::{ReplacementPattern, UniformDensity};

fn report(name: &str, d: &dyn DensityProvider, p: &ReplacementPattern) -> bslab::Result<()> {
    let s = residual_sweep(d, p, 40, 200_000, 5)?;
    println!(
        "{name:<28} max |z| = {:>8.2}, fraction |z| < 3 = {:.2}",
        s.max_abs_z, s.fraction_within_3
    );
    Ok(())
}

fn main() -> bslab::Result<()> {
    let iso4 = ReplacementPattern::isotropic(4)?;
    report("closed form, N=4", &OneSiteDensity::new(4)?, &iso4)?;
    report("uniform, N=4", &UniformDensity::new(4), &iso4)?;

    let all = ReplacementPattern::all_replaced(4)?;
    report("uniform, all replaced", &UniformDensity::new(4), &all)?;

    let iso5 = ReplacementPattern::isotropic(5)?;
    let q = FixedPointTwo::new(5, 2, 200).tol(1e-11).solve()?.density;
    report("two-site grid, N=5", &q, &iso5)?;
    Ok(())
}
