use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Equal-width bin index on [0,1]; 1.0 lands in the last bin.
#[inline]
pub fn bin_index(x: f64, bins: usize) -> usize {
    ((x * bins as f64) as usize).min(bins - 1)
}

/// Parameters echoed into the statistics file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecRecord {
    pub pattern: String,
    pub n_species: usize,
    pub steps: u64,
    pub burn_in: u64,
    pub thinning: u64,
    pub bins: usize,
    pub seed: u64,
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histograms {
    /// One histogram per species.
    pub per_site: Vec<Vec<u64>>,
    /// All species pooled.
    pub pooled: Vec<u64>,
    /// `(x_i, x_{i+1})` pooled over `i`, row-major `bins × bins`.
    pub pair: Vec<u64>,
    pub min_fitness: Vec<u64>,
    /// Species holding the minimum in each recorded configuration.
    pub selected: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub steps: u64,
    pub burn_in: u64,
    pub recorded: u64,
}

/// Streaming statistics of a forward run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub spec: SpecRecord,
    pub histograms: Histograms,
    pub totals: Totals,
}

impl SimStats {
    pub(crate) fn empty(spec: SpecRecord) -> Self {
        let (n, b) = (spec.n_species, spec.bins);
        Self {
            histograms: Histograms {
                per_site: vec![vec![0; b]; n],
                pooled: vec![0; b],
                pair: vec![0; b * b],
                min_fitness: vec![0; b],
                selected: vec![0; n],
            },
            totals: Totals {
                steps: 0,
                burn_in: 0,
                recorded: 0,
            },
            spec,
        }
    }

    pub fn n_species(&self) -> usize {
        self.spec.n_species
    }

    pub fn bins(&self) -> usize {
        self.spec.bins
    }

    #[inline]
    pub(crate) fn record(&mut self, x: &[f64], selected: usize, min: f64) {
        let n = x.len();
        if n > 64 {
            return self.record_slow(x, selected, min);
        }
        let b = self.spec.bins;
        let h = &mut self.histograms;
        let mut idx = [0usize; 64];
        for (i, &v) in x.iter().enumerate() {
            let k = bin_index(v, b);
            idx[i] = k;
            h.per_site[i][k] += 1;
            h.pooled[k] += 1;
        }
        for i in 0..n {
            h.pair[idx[i] * b + idx[(i + 1) % n]] += 1;
        }
        h.min_fitness[bin_index(min, b)] += 1;
        h.selected[selected] += 1;
        self.totals.recorded += 1;
    }

    fn record_slow(&mut self, x: &[f64], selected: usize, min: f64) {
        let b = self.spec.bins;
        let n = x.len();
        let idx: Vec<usize> = x.iter().map(|&v| bin_index(v, b)).collect();
        let h = &mut self.histograms;
        for i in 0..n {
            h.per_site[i][idx[i]] += 1;
            h.pooled[idx[i]] += 1;
            h.pair[idx[i] * b + idx[(i + 1) % n]] += 1;
        }
        h.min_fitness[bin_index(min, b)] += 1;
        h.selected[selected] += 1;
        self.totals.recorded += 1;
    }

    /// Adds another run's counts. Associative and commutative.
    pub fn merge(&mut self, other: &SimStats) -> Result<()> {
        if other.spec.bins != self.spec.bins || other.spec.n_species != self.spec.n_species {
            return Err(Error::GridMismatch {
                left: format!("N={} bins={}", self.spec.n_species, self.spec.bins),
                right: format!("N={} bins={}", other.spec.n_species, other.spec.bins),
            });
        }
        let add = |a: &mut Vec<u64>, b: &Vec<u64>| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        let (h, o) = (&mut self.histograms, &other.histograms);
        for (a, b) in h.per_site.iter_mut().zip(&o.per_site) {
            add(a, b);
        }
        add(&mut h.pooled, &o.pooled);
        add(&mut h.pair, &o.pair);
        add(&mut h.min_fitness, &o.min_fitness);
        add(&mut h.selected, &o.selected);
        self.totals.steps += other.totals.steps;
        self.totals.burn_in += other.totals.burn_in;
        self.totals.recorded += other.totals.recorded;
        Ok(())
    }

    /// Checks that every histogram carries `recorded × sites` counts.
    pub fn check_mass(&self) -> Result<()> {
        let r = self.totals.recorded;
        let n = self.spec.n_species as u64;
        let h = &self.histograms;
        let sum = |v: &[u64]| v.iter().sum::<u64>();
        let checks = [
            ("pooled", sum(&h.pooled), r * n),
            ("pair", sum(&h.pair), r * n),
            ("min_fitness", sum(&h.min_fitness), r),
            ("selected", sum(&h.selected), r),
        ];
        for (name, got, want) in checks {
            if got != want {
                return Err(Error::Degenerate(format!("{name} mass {got} != {want}")));
            }
        }
        for (i, site) in h.per_site.iter().enumerate() {
            if sum(site) != r {
                return Err(Error::Degenerate(format!("site {i} mass {} != {r}", sum(site))));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, bins: usize) -> SpecRecord {
        SpecRecord {
            pattern: "isotropic".into(),
            n_species: n,
            steps: 0,
            burn_in: 0,
            thinning: 1,
            bins,
            seed: 0,
            workers: 1,
        }
    }

    #[test]
    fn binning_edges() {
        assert_eq!(bin_index(0.0, 10), 0);
        assert_eq!(bin_index(0.0999, 10), 0);
        assert_eq!(bin_index(0.1, 10), 1);
        assert_eq!(bin_index(1.0, 10), 9);
    }

    #[test]
    fn record_and_merge() {
        let mut a = SimStats::empty(spec(3, 4));
        a.record(&[0.1, 0.6, 1.0], 0, 0.1);
        let mut b = SimStats::empty(spec(3, 4));
        b.record(&[0.3, 0.2, 0.9], 1, 0.2);
        a.merge(&b).unwrap();
        assert_eq!(a.totals.recorded, 2);
        assert_eq!(a.histograms.pooled, vec![2, 1, 1, 2]);
        assert_eq!(a.histograms.selected, vec![1, 1, 0]);
        // pair (0.1,0.6) -> (0,2)
        assert_eq!(a.histograms.pair[2], 1);
        // wrap pair (1.0, 0.1) -> (3,0)
        assert_eq!(a.histograms.pair[12], 1);
        a.check_mass().unwrap();
        let c = SimStats::empty(spec(4, 4));
        assert!(a.merge(&c).is_err());
    }
}
