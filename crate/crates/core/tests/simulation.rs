use bslab::sim::{run_chain, stats_to_density, RunSpec};
use bslab::stats::{chi2_homogeneity, chi2_uniform, mean_se};
use bslab::ReplacementPattern;

#[test]
fn all_replaced_chain_is_iid_uniform() {
    let p = ReplacementPattern::all_replaced(4).unwrap();
    let s = run_chain(&RunSpec::new(p, 260_000).burn_in(10_000).bins(20).seed(1)).unwrap();
    // 250k recorded configurations × 4 sites = 10^6 samples
    assert_eq!(s.histograms.pooled.iter().sum::<u64>(), 1_000_000);
    assert!(chi2_uniform(&s.histograms.pooled).p_value > 0.01);
}

#[test]
fn selected_species_uniform() {
    for p in [
        ReplacementPattern::isotropic(5).unwrap(),
        ReplacementPattern::anisotropic(4).unwrap(),
        ReplacementPattern::complement(6, &[3, 4]).unwrap(),
    ] {
        let s = run_chain(&RunSpec::new(p, 400_000).burn_in(10_000).thinning(5).seed(2)).unwrap();
        assert!(chi2_uniform(&s.histograms.selected).p_value > 0.01);
    }
}

#[test]
fn worker_split_conserves_counts() {
    let p = ReplacementPattern::isotropic(4).unwrap();
    let spec = RunSpec::new(p, 100_001).burn_in(1_000).bins(16).seed(3).workers(3);
    let s = run_chain(&spec).unwrap();
    assert_eq!(s.totals.steps, 100_001);
    assert_eq!(s.totals.recorded, 100_001 - 3 * 1_000);
    let recorded = s.totals.recorded;
    assert_eq!(s.histograms.pooled.iter().sum::<u64>(), 4 * recorded);
    assert_eq!(s.histograms.pair.iter().sum::<u64>(), 4 * recorded);
    assert_eq!(s.histograms.min_fitness.iter().sum::<u64>(), recorded);
    for site in &s.histograms.per_site {
        assert_eq!(site.iter().sum::<u64>(), recorded);
    }
    // same law as a single worker
    let one = run_chain(&RunSpec::new(ReplacementPattern::isotropic(4).unwrap(), 100_001)
        .burn_in(1_000)
        .bins(16)
        .seed(4))
    .unwrap();
    let t = chi2_homogeneity(&s.histograms.min_fitness, &one.histograms.min_fitness);
    assert!(t.p_value > 1e-3);
}

#[test]
fn same_seed_same_stats() {
    let spec = RunSpec::new(ReplacementPattern::anisotropic(5).unwrap(), 50_000).burn_in(1_000).seed(5).workers(2);
    assert_eq!(run_chain(&spec).unwrap(), run_chain(&spec).unwrap());
}

#[test]
fn thinning_keeps_the_mean() {
    let mean_of = |thin: u64, seed: u64| {
        let p = ReplacementPattern::isotropic(4).unwrap();
        let s = run_chain(&RunSpec::new(p, 60_000).burn_in(5_000).thinning(thin).bins(50).seed(seed)).unwrap();
        let d = stats_to_density(&s).unwrap();
        d.marginal_rows().iter().map(|(l, r, v)| 0.5 * (l + r) * v * (r - l)).sum::<f64>()
    };
    let a: Vec<f64> = (0..8).map(|s| mean_of(1, 100 + s)).collect();
    let b: Vec<f64> = (0..8).map(|s| mean_of(7, 200 + s)).collect();
    let ((ma, sa), (mb, sb)) = (mean_se(&a), mean_se(&b));
    assert!((ma - mb).abs() < 3.0 * (sa * sa + sb * sb).sqrt() + 1e-4);
}

#[test]
fn empirical_densities_are_normalized() {
    let p = ReplacementPattern::isotropic(4).unwrap();
    let s = run_chain(&RunSpec::new(p, 100_000).burn_in(1_000).bins(40).seed(6)).unwrap();
    let d = stats_to_density(&s).unwrap();
    assert!((d.marginal_integral() - 1.0).abs() < 1e-12);
    assert!((d.pair_integral() - 1.0).abs() < 1e-12);
    assert!((d.total_mass() - 1.0).abs() < 1e-12);
}
