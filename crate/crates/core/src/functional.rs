//! Monte Carlo check of the stationarity identity
//! `π(x) = Σ_i ∫ 1{a(L_i y + L_i^c x) = i} π(L_i y + L_i^c x) dy`.

use rayon::prelude::*;
use serde::Serialize;

use crate::density::DensityProvider;
use crate::error::{Error, Result};
use crate::model::{argmin_slice, FitnessConfig, ReplacementPattern};
use crate::rng::RngStream;

pub const MIN_SAMPLES: usize = 1_000;

/// Monte Carlo estimate of one species term.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TermEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// `∫_{[0,1]^{E_i}} 1{a(z) = i} π(z) dy` with `z = L_i y + L_i^c x`, using
/// `n_mc / 2` antithetic pairs `(y, 1 − y)`.
pub fn species_term<D: DensityProvider + ?Sized>(
    d: &D,
    p: &ReplacementPattern,
    x: &[f64],
    i: usize,
    n_mc: usize,
    rng: &mut RngStream,
) -> TermEstimate {
    let block = p.replacement_set(i);
    let mut z = x.to_vec();
    let mut w = x.to_vec();
    let pairs = (n_mc / 2).max(1);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..pairs {
        for &b in &block {
            let u = rng.uniform();
            z[b] = u;
            w[b] = 1.0 - u;
        }
        let fz = if argmin_slice(&z) == i { d.density(&z) } else { 0.0 };
        let fw = if argmin_slice(&w) == i { d.density(&w) } else { 0.0 };
        let v = 0.5 * (fz + fw);
        s += v;
        s2 += v * v;
    }
    let k = pairs as f64;
    let mean = s / k;
    let var = if pairs > 1 {
        ((s2 - k * mean * mean) / (k - 1.0)).max(0.0)
    } else {
        0.0
    };
    TermEstimate {
        estimate: mean,
        std_error: (var / k).sqrt(),
    }
}

pub(crate) fn check_shapes<D: DensityProvider + ?Sized>(
    d: &D,
    p: &ReplacementPattern,
    x: &[f64],
) -> Result<()> {
    let n = p.n_species();
    if d.n_species() != n {
        return Err(Error::Dimension {
            expected: n,
            got: d.n_species(),
        });
    }
    if x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x.len(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub x: Vec<f64>,
    pub lhs: f64,
    pub terms: Vec<TermEstimate>,
    pub rhs: f64,
    pub residual: f64,
    pub std_error: f64,
    pub z: f64,
}

/// Residual `π(x) − Σ_i term_i` and its z-score.
pub fn residual_at<D: DensityProvider + ?Sized>(
    d: &D,
    p: &ReplacementPattern,
    x: &FitnessConfig,
    n_mc: usize,
    rng: &mut RngStream,
) -> Result<ResidualReport> {
    check_shapes(d, p, x.values())?;
    if n_mc < MIN_SAMPLES {
        return Err(Error::InsufficientSamples(format!(
            "need at least {MIN_SAMPLES} Monte Carlo samples, got {n_mc}"
        )));
    }
    let lhs = d.density(x.values());
    if !lhs.is_finite() {
        return Err(Error::Degenerate(format!("density evaluates to {lhs}")));
    }
    let terms: Vec<TermEstimate> = (0..p.n_species())
        .map(|i| species_term(d, p, x.values(), i, n_mc, rng))
        .collect();
    let rhs: f64 = terms.iter().map(|t| t.estimate).sum();
    let se = terms.iter().map(|t| t.std_error * t.std_error).sum::<f64>().sqrt();
    let residual = lhs - rhs;
    let z = if se > 0.0 {
        residual / se
    } else if residual.abs() < 1e-12 {
        0.0
    } else {
        residual.signum() * f64::INFINITY
    };
    Ok(ResidualReport {
        x: x.values().to_vec(),
        lhs,
        terms,
        rhs,
        residual,
        std_error: se,
        z,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub n_points: usize,
    pub n_mc: usize,
    pub seed: u64,
    pub max_abs_z: f64,
    pub fraction_within_3: f64,
    pub reports: Vec<ResidualReport>,
}

/// Residuals at `n_points` uniform test points. Points come from stream 0 of
/// `seed`; point `k` integrates with stream `k + 1`.
pub fn residual_sweep<D: DensityProvider + ?Sized>(
    d: &D,
    p: &ReplacementPattern,
    n_points: usize,
    n_mc: usize,
    seed: u64,
) -> Result<SweepSummary> {
    if n_points == 0 {
        return Err(Error::InsufficientSamples("no test points requested".into()));
    }
    let n = p.n_species();
    let mut draw = RngStream::new(seed, 0);
    let points: Vec<FitnessConfig> = (0..n_points).map(|_| FitnessConfig::uniform(n, &mut draw)).collect();
    let reports = points
        .par_iter()
        .enumerate()
        .map(|(k, x)| residual_at(d, p, x, n_mc, &mut RngStream::new(seed, k as u64 + 1)))
        .collect::<Result<Vec<_>>>()?;
    let max_abs_z = reports.iter().map(|r| r.z.abs()).fold(0.0, f64::max);
    let within = reports.iter().filter(|r| r.z.abs() < 3.0).count();
    Ok(SweepSummary {
        n_points,
        n_mc,
        seed,
        max_abs_z,
        fraction_within_3: within as f64 / n_points as f64,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::UniformDensity;

    #[test]
    fn all_replaced_uniform_terms() {
        let p = ReplacementPattern::all_replaced(4).unwrap();
        let d = UniformDensity::new(4);
        let x = FitnessConfig::new(vec![0.3, 0.1, 0.9, 0.5]).unwrap();
        let r = residual_at(&d, &p, &x, 20_000, &mut RngStream::new(1, 0)).unwrap();
        for t in &r.terms {
            assert!((t.estimate - 0.25).abs() < 4.0 * t.std_error);
        }
        assert!(r.z.abs() < 4.0);
        let total: f64 = r.terms.iter().map(|t| t.estimate).sum();
        assert_eq!(total, r.rhs);
    }

    #[test]
    fn rejects_small_inputs() {
        let p = ReplacementPattern::isotropic(4).unwrap();
        let d = UniformDensity::new(4);
        let x = FitnessConfig::new(vec![0.3; 4]).unwrap();
        assert!(residual_at(&d, &p, &x, 10, &mut RngStream::new(1, 0)).is_err());
        assert!(residual_sweep(&d, &p, 0, 1000, 1).is_err());
        let d5 = UniformDensity::new(5);
        assert!(residual_at(&d5, &p, &x, 1000, &mut RngStream::new(1, 0)).is_err());
    }

    #[test]
    fn sweep_is_reproducible() {
        let p = ReplacementPattern::isotropic(4).unwrap();
        let d = UniformDensity::new(4);
        let a = residual_sweep(&d, &p, 3, 2000, 9).unwrap();
        let b = residual_sweep(&d, &p, 3, 2000, 9).unwrap();
        for (x, y) in a.reports.iter().zip(&b.reports) {
            assert_eq!(x.z, y.z);
        }
    }
}
