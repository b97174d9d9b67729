//! The time-reversed chain: given the current state `x`, choose the species
//! `i` that was the minimum one step earlier and resample its replacement
//! block so that `i` is again the minimum.

use serde::Serialize;

use crate::density::DensityProvider;
use crate::error::{Error, Result};
use crate::functional::{check_shapes, species_term, MIN_SAMPLES};
use crate::model::{argmin_slice, step_in_place, FitnessConfig, ReplacementPattern};
use crate::rng::RngStream;
use crate::stats::{chi2_homogeneity, ks_two_sample, TestResult};

/// Proposals tried before a backward step gives up (acceptance below `1e-6`).
pub const MAX_PROPOSALS: u64 = 1_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct SelectionEstimate {
    pub probabilities: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Sum before normalization; 1 for a stationary density.
    pub pre_normalization_sum: f64,
    pub density_at_x: f64,
}

/// Probabilities that each species was the previous minimum, by Monte Carlo
/// over the replacement block.
pub fn selection_distribution<D: DensityProvider + ?Sized>(
    d: &D,
    p: &ReplacementPattern,
    x: &FitnessConfig,
    n_mc: usize,
    rng: &mut RngStream,
) -> Result<SelectionEstimate> {
    check_shapes(d, p, x.values())?;
    if n_mc < MIN_SAMPLES {
        return Err(Error::InsufficientSamples(format!(
            "need at least {MIN_SAMPLES} Monte Carlo samples, got {n_mc}"
        )));
    }
    let px = d.density(x.values());
    if !(px > 0.0) {
        return Err(Error::ZeroDensity);
    }
    let terms: Vec<_> = (0..p.n_species())
        .map(|i| species_term(d, p, x.values(), i, n_mc, rng))
        .collect();
    let raw: Vec<f64> = terms.iter().map(|t| t.estimate / px).collect();
    let sum: f64 = raw.iter().sum();
    if !(sum > 0.0) {
        return Err(Error::Degenerate("all selection estimates are zero".into()));
    }
    Ok(SelectionEstimate {
        probabilities: raw.iter().map(|r| r / sum).collect(),
        std_errors: terms.iter().map(|t| t.std_error / px / sum).collect(),
        pre_normalization_sum: sum,
        density_at_x: px,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReverseStepRecord {
    pub species: usize,
    /// New values on the replacement block, in the order of `E_i`.
    pub block: Vec<f64>,
    pub proposals: u64,
}

/// One step of the reversed chain.
///
/// Draws `(i, y)` jointly by rejection from the uniform proposal on
/// `Z_N × [0,1]^{E_i}` against `1{a(z) = i} π(z)`, so `i` follows the
/// selection law and `y` its conditional law exactly.
pub fn backward_step<D: DensityProvider + ?Sized>(
    d: &D,
    p: &ReplacementPattern,
    x: &FitnessConfig,
    rng: &mut RngStream,
) -> Result<(FitnessConfig, ReverseStepRecord)> {
    check_shapes(d, p, x.values())?;
    if !(d.density(x.values()) > 0.0) {
        return Err(Error::ZeroDensity);
    }
    let bound = d.upper_bound().ok_or(Error::MissingBound)?;
    let mut z = x.values().to_vec();
    let rec = backward_in_place(d, p, &mut z, bound, rng)?;
    Ok((FitnessConfig::new(z)?, rec))
}

fn backward_in_place<D: DensityProvider + ?Sized>(
    d: &D,
    p: &ReplacementPattern,
    x: &mut [f64],
    bound: f64,
    rng: &mut RngStream,
) -> Result<ReverseStepRecord> {
    let n = x.len();
    let mut z = x.to_vec();
    for proposals in 1..=MAX_PROPOSALS {
        let i = rng.below(n);
        let block = p.replacement_set(i);
        z.copy_from_slice(x);
        for &b in &block {
            z[b] = rng.uniform();
        }
        if argmin_slice(&z) != i {
            continue;
        }
        let v = d.density(&z);
        if v > bound {
            return Err(Error::EnvelopeViolated { bound, value: v });
        }
        if rng.uniform() * bound < v {
            x.copy_from_slice(&z);
            return Ok(ReverseStepRecord {
                species: i,
                block: block.iter().map(|&b| z[b]).collect(),
                proposals,
            });
        }
    }
    Err(Error::Rejection {
        proposals: MAX_PROPOSALS,
    })
}

/// Runs `steps` backward steps from `start`, returning the final state and
/// the step records.
pub fn backward_trajectory<D: DensityProvider + ?Sized>(
    d: &D,
    p: &ReplacementPattern,
    start: &FitnessConfig,
    steps: usize,
    rng: &mut RngStream,
) -> Result<(FitnessConfig, Vec<ReverseStepRecord>)> {
    check_shapes(d, p, start.values())?;
    let bound = d.upper_bound().ok_or(Error::MissingBound)?;
    let mut x = start.values().to_vec();
    let mut records = Vec::with_capacity(steps);
    for _ in 0..steps {
        if !(d.density(&x) > 0.0) {
            return Err(Error::ZeroDensity);
        }
        records.push(backward_in_place(d, p, &mut x, bound, rng)?);
    }
    Ok((FitnessConfig::new(x)?, records))
}

#[derive(Clone, Debug)]
pub struct ReversalConfig {
    /// Recorded transitions per direction.
    pub steps: usize,
    pub seed: u64,
    pub burn_in: usize,
    /// Transitions between recorded ones.
    pub thinning: usize,
    /// States at which the selection sum is reported.
    pub diagnostic_states: usize,
}

impl ReversalConfig {
    pub fn new(steps: usize, seed: u64) -> Self {
        Self {
            steps,
            seed,
            burn_in: 10_000,
            thinning: 5,
            diagnostic_states: 5,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReversalReport {
    pub steps: usize,
    pub chi2: TestResult,
    pub ks: TestResult,
    pub forward_offsets: Vec<u64>,
    pub backward_offsets: Vec<u64>,
    pub pre_normalization_sums: Vec<f64>,
    pub passed: bool,
}

/// Compares forward transitions `x → x'` with backward transitions
/// `x' → x`: the offset `a(x') − a(x) mod N` by a chi-square test and the
/// earlier minimum `min x` by a two-sample KS test. Both tests pass when
/// their p-values exceed 0.01.
pub fn reversal_test<D: DensityProvider + ?Sized>(
    d: &D,
    p: &ReplacementPattern,
    cfg: &ReversalConfig,
) -> Result<ReversalReport> {
    let n = p.n_species();
    if cfg.steps < 2 {
        return Err(Error::InsufficientSamples(format!(
            "reversal test needs at least 2 steps, got {}",
            cfg.steps
        )));
    }
    if d.n_species() != n {
        return Err(Error::Dimension {
            expected: n,
            got: d.n_species(),
        });
    }
    let thin = cfg.thinning.max(1);
    let bound = d.upper_bound().ok_or(Error::MissingBound)?;

    let mut fwd_rng = RngStream::new(cfg.seed, 0);
    let mut x: Vec<f64> = (0..n).map(|_| fwd_rng.uniform()).collect();
    for _ in 0..cfg.burn_in {
        step_in_place(p, &mut x, &mut |_| fwd_rng.uniform());
    }
    let mut f_offsets = vec![0u64; n];
    let mut f_minima = Vec::with_capacity(cfg.steps);
    let mut diag_states = Vec::new();
    let every = (cfg.steps / cfg.diagnostic_states.max(1)).max(1);
    for t in 0..cfg.steps {
        for _ in 1..thin {
            step_in_place(p, &mut x, &mut |_| fwd_rng.uniform());
        }
        let before = argmin_slice(&x);
        let min_before = x[before];
        step_in_place(p, &mut x, &mut |_| fwd_rng.uniform());
        let after = argmin_slice(&x);
        f_offsets[(after + n - before) % n] += 1;
        f_minima.push(min_before);
        if t % every == 0 && diag_states.len() < cfg.diagnostic_states {
            diag_states.push(x.clone());
        }
    }

    let mut bwd = RngStream::new(cfg.seed, 1);
    let mut b_offsets = vec![0u64; n];
    let mut b_minima = Vec::with_capacity(cfg.steps);
    for _ in 0..cfg.steps {
        for _ in 1..thin {
            check_positive(d, &x)?;
            backward_in_place(d, p, &mut x, bound, &mut bwd)?;
        }
        check_positive(d, &x)?;
        let current = argmin_slice(&x);
        let rec = backward_in_place(d, p, &mut x, bound, &mut bwd)?;
        b_offsets[(current + n - rec.species) % n] += 1;
        b_minima.push(x[rec.species]);
    }

    let mut diag_rng = RngStream::new(cfg.seed, 2);
    let pre_normalization_sums = diag_states
        .into_iter()
        .map(|s| {
            selection_distribution(d, p, &FitnessConfig::new(s)?, 20_000, &mut diag_rng)
                .map(|e| e.pre_normalization_sum)
        })
        .collect::<Result<Vec<_>>>()?;

    let chi2 = chi2_homogeneity(&f_offsets, &b_offsets);
    let ks = ks_two_sample(&mut f_minima, &mut b_minima);
    Ok(ReversalReport {
        steps: cfg.steps,
        passed: chi2.p_value > 0.01 && ks.p_value > 0.01,
        chi2,
        ks,
        forward_offsets: f_offsets,
        backward_offsets: b_offsets,
        pre_normalization_sums,
    })
}

fn check_positive<D: DensityProvider + ?Sized>(d: &D, x: &[f64]) -> Result<()> {
    if d.density(x) > 0.0 {
        Ok(())
    } else {
        Err(Error::ZeroDensity)
    }
}
