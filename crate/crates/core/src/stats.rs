//! Goodness-of-fit statistics: Kolmogorov-Smirnov and chi-square.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Degrees of freedom for chi-square tests, effective sample size for KS.
    pub dof: f64,
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2 k² λ²)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-18 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let sn = n_eff.sqrt();
    kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)
}

/// Two-sample KS test. Sorts both inputs.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> TestResult {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = a[i].min(b[j]);
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let n_eff = (na * nb) as f64 / (na + nb) as f64;
    TestResult {
        statistic: d,
        p_value: ks_p_value(d, n_eff),
        dof: n_eff,
    }
}

/// One-sample KS test against a continuous CDF. Sorts the input.
pub fn ks_one_sample(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> TestResult {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sample.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    TestResult {
        statistic: d,
        p_value: ks_p_value(d, n),
        dof: n,
    }
}

/// KS distance between equal-width bin counts on [0,1] and a CDF, taken at
/// the bin edges.
pub fn ks_binned_distance(counts: &[u64], cdf: impl Fn(f64) -> f64) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return f64::NAN;
    }
    let b = counts.len();
    let mut acc = 0u64;
    let mut d: f64 = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        acc += c;
        let edge = (k + 1) as f64 / b as f64;
        d = d.max((acc as f64 / total as f64 - cdf(edge)).abs());
    }
    d
}

pub fn chi2_survival(statistic: f64, dof: f64) -> f64 {
    if dof <= 0.0 {
        return 1.0;
    }
    match ChiSquared::new(dof) {
        Ok(dist) => dist.sf(statistic),
        Err(_) => f64::NAN,
    }
}

/// Pearson chi-square against the uniform distribution over categories.
pub fn chi2_uniform(counts: &[u64]) -> TestResult {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let statistic = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let dof = (counts.len() - 1) as f64;
    TestResult {
        statistic,
        p_value: chi2_survival(statistic, dof),
        dof,
    }
}

/// Chi-square test that two count vectors come from the same categorical
/// law. Categories empty in both samples are dropped.
pub fn chi2_homogeneity(a: &[u64], b: &[u64]) -> TestResult {
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let n = (na + nb) as f64;
    let mut statistic = 0.0;
    let mut used = 0usize;
    for (&ca, &cb) in a.iter().zip(b) {
        let col = (ca + cb) as f64;
        if col == 0.0 {
            continue;
        }
        used += 1;
        for (c, row) in [(ca, na), (cb, nb)] {
            let e = row as f64 * col / n;
            statistic += (c as f64 - e).powi(2) / e;
        }
    }
    let dof = used.saturating_sub(1) as f64;
    TestResult {
        statistic,
        p_value: chi2_survival(statistic, dof),
        dof,
    }
}

/// Mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn kolmogorov_known_values() {
        // Q(1.36) ≈ 0.049, Q(1.63) ≈ 0.010
        assert!((kolmogorov_survival(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_survival(1.628) - 0.01).abs() < 5e-4);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
    }

    #[test]
    fn ks_two_sample_same_law() {
        let mut r = RngStream::new(11, 0);
        let mut a: Vec<f64> = (0..5000).map(|_| r.uniform()).collect();
        let mut b: Vec<f64> = (0..5000).map(|_| r.uniform()).collect();
        let t = ks_two_sample(&mut a, &mut b);
        assert!(t.p_value > 0.01, "{t:?}");
        let mut c: Vec<f64> = (0..5000).map(|_| r.uniform().powf(1.3)).collect();
        let t = ks_two_sample(&mut a, &mut c);
        assert!(t.p_value < 1e-3, "{t:?}");
    }

    #[test]
    fn ks_two_sample_identical_is_zero() {
        let mut a = vec![0.1, 0.4, 0.4, 0.9];
        let mut b = a.clone();
        assert_eq!(ks_two_sample(&mut a, &mut b).statistic, 0.0);
    }

    #[test]
    fn ks_one_sample_uniform() {
        let mut r = RngStream::new(2, 0);
        let mut a: Vec<f64> = (0..20_000).map(|_| r.uniform()).collect();
        let t = ks_one_sample(&mut a, |x| x);
        assert!(t.p_value > 0.01);
        assert!(t.statistic < 0.02);
    }

    #[test]
    fn binned_distance_exact() {
        assert_eq!(ks_binned_distance(&[1, 1, 1, 1], |x| x), 0.0);
        assert!((ks_binned_distance(&[0, 2], |x| x) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn chi2_tests() {
        let t = chi2_uniform(&[100, 100, 100, 100]);
        assert_eq!(t.statistic, 0.0);
        assert!((t.p_value - 1.0).abs() < 1e-12);
        let t = chi2_uniform(&[150, 50, 100, 100]);
        assert!((t.statistic - 50.0).abs() < 1e-12);
        assert!(t.p_value < 1e-9);
        let t = chi2_homogeneity(&[10, 20, 0], &[20, 40, 0]);
        assert!(t.statistic.abs() < 1e-12);
        assert_eq!(t.dof, 1.0);
        // 3.841 is the 95% point of chi2(1)
        assert!((chi2_survival(3.841459, 1.0) - 0.05).abs() < 1e-6);
    }

    #[test]
    fn mean_se_basic() {
        let (m, se) = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (1.6666666666666667f64 / 4.0).sqrt()).abs() < 1e-15);
    }
}
