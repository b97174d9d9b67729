//! The reversed chain for four species: selection probabilities at a fixed
//! state, a short backward trajectory, and the forward/backward comparison
//! with the exact density and with a wrong one.

use bslab::one_site::OneSiteDensity;
use bslab::reverse::{backward_trajectory, reversal_test, selection_distribution, ReversalConfig};
use bslab::{FitnessConfig, ReplacementPattern, RngStream, UniformDensity};

fn main() -> bslab::Result<()> {
    let p = ReplacementPattern::isotropic(4)?;
    let d = OneSiteDensity::new(4)?;
    let x = FitnessConfig::new(vec![0.2, 0.9, 0.5, 0.7])?;

    let sel = selection_distribution(&d, &p, &x, 1_000_000, &mut RngStream::new(1, 0))?;
    println!("previous minimum at x = {:?}", x.values());
    for (i, (pr, se)) in sel.probabilities.iter().zip(&sel.std_errors).enumerate() {
        println!("  species {i}: {pr:.4} ± {se:.4}");
    }
    println!("  sum before normalization {:.4}", sel.pre_normalization_sum);

    let (end, steps) = backward_trajectory(&d, &p, &x, 5, &mut RngStream::new(2, 0))?;
    println!("\nfive backward steps");
    for s in &steps {
        println!("  species {} redrawn block {:?} ({} proposals)", s.species, s.block, s.proposals);
    }
    println!("  end state {:?}", end.values());

    let cfg = ReversalConfig::new(50_000, 3);
    for (name, r) in [
        ("exact density", reversal_test(&d, &p, &cfg)?),
        ("uniform density", reversal_test(&UniformDensity::new(4), &p, &cfg)?),
    ] {
        println!(
            "\n{name}: offsets chi2 p = {:.3e}, minima KS p = {:.3e}, pass = {}",
            r.chi2.p_value, r.ks.p_value, r.passed
        );
    }
    Ok(())
}
