use crate::density::{DensityProvider, Provenance};
use crate::error::{Error, Result};
use crate::model::PatternLiteral;

use super::stats::{bin_index, SimStats};

/// How the N-dimensional density is assembled from the histograms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assembly {
    /// `Σ_i k(x_i)` with `k = m − (N−1)/N`, for one non-replaced species.
    SingleSiteKernel,
    /// `Σ_i k(x_i, x_{i+1})` with `k(u,v) = p(u,v) − (m(u)+m(v))/2 + 1/N`,
    /// for two adjacent non-replaced species.
    PairKernel,
    /// `Π_i m(x_i)`, used for every other pattern.
    Product,
}

/// Piecewise-constant densities estimated from forward-run histograms.
#[derive(Clone, Debug)]
pub struct EmpiricalDensity {
    n: usize,
    bins: usize,
    marginal: Vec<f64>,
    pair: Vec<f64>,
    assembly: Assembly,
    /// Kernel used by `density`: length `bins` or `bins²`.
    kernel: Vec<f64>,
}

/// Normalizes histogram counts into densities on [0,1] and [0,1]².
pub fn stats_to_density(s: &SimStats) -> Result<EmpiricalDensity> {
    let b = s.bins();
    let n = s.n_species();
    let pooled_total: u64 = s.histograms.pooled.iter().sum();
    let pair_total: u64 = s.histograms.pair.iter().sum();
    if pooled_total == 0 || pair_total == 0 {
        return Err(Error::EmptyStats);
    }
    let marginal = normalize(&s.histograms.pooled, b as f64);
    let pair = normalize(&s.histograms.pair, (b * b) as f64);

    let pattern = s
        .spec
        .pattern
        .parse::<PatternLiteral>()
        .and_then(|lit| lit.build(n))
        .ok();
    let assembly = match &pattern {
        Some(p) if p.one_non_replaced().is_some() => Assembly::SingleSiteKernel,
        Some(p) if p.two_non_replaced().is_some() => Assembly::PairKernel,
        _ => Assembly::Product,
    };
    let nf = n as f64;
    let kernel = match assembly {
        Assembly::SingleSiteKernel => {
            let k: Vec<f64> = marginal.iter().map(|m| (m - (nf - 1.0) / nf).max(0.0)).collect();
            rescale(k, 1.0 / nf, 1.0 / b as f64)?
        }
        Assembly::PairKernel => {
            let mut k = vec![0.0; b * b];
            for i in 0..b {
                for j in 0..b {
                    let v = pair[i * b + j] - 0.5 * (marginal[i] + marginal[j]) + 1.0 / nf;
                    k[i * b + j] = v.max(0.0);
                }
            }
            rescale(k, 1.0 / nf, 1.0 / (b * b) as f64)?
        }
        Assembly::Product => marginal.clone(),
    };
    Ok(EmpiricalDensity {
        n,
        bins: b,
        marginal,
        pair,
        assembly,
        kernel,
    })
}

fn normalize(counts: &[u64], cells: f64) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts
        .iter()
        .map(|&c| c as f64 / total as f64 * cells)
        .collect()
}

fn rescale(k: Vec<f64>, target: f64, cell: f64) -> Result<Vec<f64>> {
    let mass: f64 = k.iter().sum::<f64>() * cell;
    if mass <= 0.0 {
        return Err(Error::Degenerate("empirical kernel has no mass".into()));
    }
    Ok(k.into_iter().map(|v| v * target / mass).collect())
}

impl EmpiricalDensity {
    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn assembly(&self) -> Assembly {
        self.assembly
    }

    /// Single-site marginal density values per bin.
    pub fn marginal(&self) -> &[f64] {
        &self.marginal
    }

    /// Adjacent-pair density, row-major.
    pub fn pair(&self) -> &[f64] {
        &self.pair
    }

    pub fn marginal_at(&self, x: f64) -> f64 {
        self.marginal[bin_index(x, self.bins)]
    }

    pub fn pair_at(&self, u: f64, v: f64) -> f64 {
        self.pair[bin_index(u, self.bins) * self.bins + bin_index(v, self.bins)]
    }

    pub fn marginal_integral(&self) -> f64 {
        self.marginal.iter().sum::<f64>() / self.bins as f64
    }

    pub fn pair_integral(&self) -> f64 {
        self.pair.iter().sum::<f64>() / (self.bins * self.bins) as f64
    }

    /// `∫ π` over the hypercube implied by the assembled kernel.
    pub fn total_mass(&self) -> f64 {
        let b = self.bins as f64;
        let n = self.n as f64;
        let s: f64 = self.kernel.iter().sum();
        match self.assembly {
            Assembly::SingleSiteKernel => n * s / b,
            Assembly::PairKernel => n * s / (b * b),
            Assembly::Product => (s / b).powi(self.n as i32),
        }
    }

    /// `(bin_left, bin_right, density)` rows of the marginal.
    pub fn marginal_rows(&self) -> Vec<(f64, f64, f64)> {
        let b = self.bins as f64;
        self.marginal
            .iter()
            .enumerate()
            .map(|(k, &d)| (k as f64 / b, (k + 1) as f64 / b, d))
            .collect()
    }
}

impl DensityProvider for EmpiricalDensity {
    fn n_species(&self) -> usize {
        self.n
    }

    fn density(&self, x: &[f64]) -> f64 {
        let b = self.bins;
        let n = x.len();
        match self.assembly {
            Assembly::SingleSiteKernel => x.iter().map(|&v| self.kernel[bin_index(v, b)]).sum(),
            Assembly::PairKernel => (0..n)
                .map(|i| self.kernel[bin_index(x[i], b) * b + bin_index(x[(i + 1) % n], b)])
                .sum(),
            Assembly::Product => x.iter().map(|&v| self.kernel[bin_index(v, b)]).product(),
        }
    }

    fn upper_bound(&self) -> Option<f64> {
        let max = self.kernel.iter().cloned().fold(0.0, f64::max);
        let n = self.n as f64;
        Some(match self.assembly {
            Assembly::SingleSiteKernel | Assembly::PairKernel => n * max,
            Assembly::Product => max.powi(self.n as i32),
        })
    }

    fn provenance(&self) -> Provenance {
        Provenance::Empirical
    }
}

#[cfg(test)]
mod tests {
    use super::super::stats::SpecRecord;
    use super::*;

    fn stats_with(pooled: Vec<u64>, n: usize) -> SimStats {
        let b = pooled.len();
        let mut s = SimStats::empty(SpecRecord {
            pattern: "base_set:[0,1,2]".into(),
            n_species: n,
            steps: 0,
            burn_in: 0,
            thinning: 1,
            bins: b,
            seed: 0,
            workers: 1,
        });
        s.histograms.pooled = pooled;
        s.histograms.pair = vec![1; b * b];
        s
    }

    #[test]
    fn flat_histogram_is_constant_one() {
        let d = stats_to_density(&stats_with(vec![1, 1, 1, 1], 3)).unwrap();
        assert_eq!(d.marginal(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(d.marginal_integral(), 1.0);
    }

    #[test]
    fn half_histogram() {
        let d = stats_with(vec![0, 2], 3);
        let d = stats_to_density(&d).unwrap();
        assert_eq!(d.marginal_at(0.25), 0.0);
        assert_eq!(d.marginal_at(0.5), 2.0);
        assert_eq!(d.marginal_at(1.0), 2.0);
        let rows = d.marginal_rows();
        assert_eq!(rows[1], (0.5, 1.0, 2.0));
    }

    #[test]
    fn empty_fails() {
        assert!(matches!(
            stats_to_density(&stats_with(vec![0, 0], 3)),
            Err(Error::EmptyStats)
        ));
    }
}
