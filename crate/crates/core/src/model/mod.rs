//! Configuration space, replacement sets and the forward transition.

mod config;
mod pattern;

pub use config::{argmin_slice, FitnessConfig};
pub use pattern::{two_site_k_valid, PatternLiteral, ReplacementPattern};

use crate::rng::RngStream;

pub fn argmin_species(x: &FitnessConfig) -> usize {
    x.argmin()
}

/// One forward step: the species in `E_{a(x)}` get fresh uniform fitnesses.
pub fn forward_step(p: &ReplacementPattern, x: &FitnessConfig, rng: &mut RngStream) -> FitnessConfig {
    forward_step_with(p, x, |_| rng.uniform())
}

/// Forward step with caller-supplied draws; `draw(j)` is the new fitness of
/// species `j`.
pub fn forward_step_with<F>(p: &ReplacementPattern, x: &FitnessConfig, mut draw: F) -> FitnessConfig
where
    F: FnMut(usize) -> f64,
{
    let mut out = x.clone();
    step_in_place(p, out.values_mut(), &mut draw);
    out
}

/// In-place variant used by the long-run drivers. Returns the selected species.
#[inline]
pub(crate) fn step_in_place<F>(p: &ReplacementPattern, x: &mut [f64], draw: &mut F) -> usize
where
    F: FnMut(usize) -> f64,
{
    let n = x.len();
    let i = argmin_slice(x);
    for &j in p.base_set() {
        let s = (i + j) % n;
        x[s] = draw(s);
    }
    i
}
