//! Long-run forward simulation with streaming histograms.

mod empirical;
mod stats;

pub use empirical::{stats_to_density, EmpiricalDensity};
pub use stats::{bin_index, Histograms, SimStats, SpecRecord, Totals};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{argmin_slice, step_in_place, ReplacementPattern};
use crate::rng::RngStream;

pub const DEFAULT_BURN_IN: u64 = 100_000;

#[derive(Clone, Debug)]
pub struct RunSpec {
    pub pattern: ReplacementPattern,
    pub steps: u64,
    pub burn_in: u64,
    pub thinning: u64,
    pub bins: usize,
    pub seed: u64,
    pub workers: usize,
}

impl RunSpec {
    pub fn new(pattern: ReplacementPattern, steps: u64) -> Self {
        Self {
            pattern,
            steps,
            burn_in: DEFAULT_BURN_IN.min(steps / 2),
            thinning: 1,
            bins: 100,
            seed: 0,
            workers: 1,
        }
    }

    pub fn burn_in(mut self, burn_in: u64) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn thinning(mut self, thinning: u64) -> Self {
        self.thinning = thinning;
        self
    }

    pub fn bins(mut self, bins: usize) -> Self {
        self.bins = bins;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps <= self.burn_in {
            return Err(Error::Parameter(format!(
                "burn-in ({}) must be smaller than steps ({})",
                self.burn_in, self.steps
            )));
        }
        if self.bins < 2 {
            return Err(Error::Parameter("need at least 2 bins".into()));
        }
        if self.thinning == 0 {
            return Err(Error::Parameter("thinning must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Parameter("need at least one worker".into()));
        }
        Ok(())
    }

    fn record(&self) -> SpecRecord {
        SpecRecord {
            pattern: self.pattern.to_string(),
            n_species: self.pattern.n_species(),
            steps: self.steps,
            burn_in: self.burn_in,
            thinning: self.thinning,
            bins: self.bins,
            seed: self.seed,
            workers: self.workers,
        }
    }

    /// Step budget of each worker; the first `steps % workers` get one extra.
    pub fn worker_budgets(&self) -> Vec<u64> {
        let w = self.workers as u64;
        (0..w)
            .map(|i| self.steps / w + u64::from(i < self.steps % w))
            .collect()
    }
}

/// Runs the forward chain from an iid uniform start.
///
/// With several workers, each runs an independent chain on its own RNG
/// stream (stream id = worker index) with its own burn-in, and the
/// histograms are summed. The step budget is split across workers.
pub fn run_chain(spec: &RunSpec) -> Result<SimStats> {
    spec.validate()?;
    let budgets = spec.worker_budgets();
    if let Some(b) = budgets.iter().find(|&&b| b <= spec.burn_in) {
        return Err(Error::Parameter(format!(
            "per-worker budget {b} does not exceed burn-in {}",
            spec.burn_in
        )));
    }
    let parts: Vec<SimStats> = budgets
        .par_iter()
        .enumerate()
        .map(|(w, &steps)| run_single(spec, steps, w as u64))
        .collect();
    let mut total = SimStats::empty(spec.record());
    for p in &parts {
        total.merge(p)?;
    }
    Ok(total)
}

fn run_single(spec: &RunSpec, steps: u64, stream: u64) -> SimStats {
    let mut rng = RngStream::new(spec.seed, stream);
    let n = spec.pattern.n_species();
    let mut x: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
    let mut stats = SimStats::empty(spec.record());
    let mut draw = |_: usize| rng.uniform();
    for t in 1..=steps {
        step_in_place(&spec.pattern, &mut x, &mut draw);
        if t > spec.burn_in && (t - spec.burn_in - 1).is_multiple_of(spec.thinning) {
            let i = argmin_slice(&x);
            stats.record(&x, i, x[i]);
        }
    }
    stats.totals.steps = steps;
    stats.totals.burn_in = spec.burn_in;
    stats
}
