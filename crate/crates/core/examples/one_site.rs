//! Stationary density when every species but one is replaced: the closed
//! form against a grid fixed point of the integral equation.

use bslab::one_site::{q_one, FixedPointOne, OneSiteDensity};

fn main() -> bslab::Result<()> {
    for n in [3, 4, 6, 10] {
        let out = FixedPointOne::new(n, 1000).tol(1e-10).solve()?;
        let sup = out
            .grid
            .nodes()
            .zip(out.grid.values())
            .map(|(x, q)| (q - q_one(n, x).unwrap()).abs())
            .fold(0.0, f64::max);
        println!(
            "N={n:>2}: fixed point after {:>3} sweeps, sup distance to closed form {sup:.2e}",
            out.iterations
        );
    }

    let d = OneSiteDensity::new(4)?;
    println!("\nN=4 marginal density and its CDF");
    for k in 0..=10 {
        let x = k as f64 / 10.0;
        println!("{x:.1}  {:.6}  {:.6}", d.marginal(x), d.marginal_cdf(x));
    }

    println!("\nN q_N(x) approaches 1 away from x = 0");
    for n in [10, 100, 1000] {
        let sup = (0..=90)
            .map(|k| 0.1 + k as f64 / 100.0)
            .map(|x| (n as f64 * q_one(n, x).unwrap() - 1.0).abs())
            .fold(0.0, f64::max);
        println!("N={n:>4}: sup over [0.1, 1] of |N q - 1| = {sup:.3e}");
    }
    Ok(())
}
