//! Two-site kernel for five species with the two species opposite the
//! minimum left alone: fixed point of the integral equation versus the
//! separable ansatz, plus the hypergeometric form of the `G` equation.

use bslab::two_site::{
    assemble_ansatz, hypergeometric_residual, separability_check, solve_g, AbSolver, FixedPointTwo,
};

fn main() -> bslab::Result<()> {
    let m = 200;
    let fp = FixedPointTwo::new(5, 2, m).tol(1e-12).solve()?;
    println!("fixed point: {} sweeps, mass {:.12}", fp.iterations, fp.density.integral());

    let g = solve_g(5, m, 1e-8)?;
    let sol = AbSolver::default().tol(1e-12).solve(&g)?;
    let an = assemble_ansatz(&sol)?;
    println!("ansatz: {} iterations, mass {:.12}", sol.iterations, an.integral());

    let d = fp.density.grid().sup_distance(an.grid())?;
    println!("sup |q_fixed_point - q_ansatz| = {d:.2e}");
    println!("separability deviation of the fixed point = {:.2e}", separability_check(&fp.density));

    println!("\n{:>5} {:>10} {:>10} {:>10}", "x", "G", "A", "B");
    for i in (0..=m).step_by(m / 10) {
        println!(
            "{:>5.2} {:>10.5} {:>10.5} {:>10.5}",
            sol.g.node(i),
            sol.g.values()[i],
            sol.a.values()[i],
            sol.b.values()[i]
        );
    }

    let fine = solve_g(5, 2000, 1e-8)?;
    println!("\nhypergeometric residual at M=2000: {:.2e}", hypergeometric_residual(&fine.g));

    println!("\nmarginal of one site");
    for k in 0..=5 {
        let x = k as f64 / 5.0;
        println!("{x:.1}  {:.5}", fp.density.marginal(x));
    }
    Ok(())
}
