//! Candidate stationary densities on the hypercube.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Where a density came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedFormOne,
    AnsatzTwo,
    FixedPointGrid,
    Empirical,
    Uniform,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::ClosedFormOne => "closed-form-one",
            Self::AnsatzTwo => "ansatz-two",
            Self::FixedPointGrid => "fixed-point-grid",
            Self::Empirical => "empirical",
            Self::Uniform => "uniform",
        };
        f.write_str(s)
    }
}

/// Evaluator for a density `π(x)` on `[0,1]^N`.
///
/// Implementations must be pure and shareable across threads; the reverse
/// sampler and the stationarity verifier call `density` from many workers.
pub trait DensityProvider: Send + Sync {
    fn n_species(&self) -> usize;

    fn density(&self, x: &[f64]) -> f64;

    /// An upper bound on `density` over the whole cube, used as the
    /// rejection envelope.
    fn upper_bound(&self) -> Option<f64>;

    fn provenance(&self) -> Provenance;

    /// How far `∫ π` may drift from 1.
    fn mass_tolerance(&self) -> f64 {
        1e-12
    }
}

/// `π ≡ 1`. Stationary only when every species is replaced.
#[derive(Clone, Copy, Debug)]
pub struct UniformDensity {
    n: usize,
}

impl UniformDensity {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl DensityProvider for UniformDensity {
    fn n_species(&self) -> usize {
        self.n
    }

    fn density(&self, _x: &[f64]) -> f64 {
        1.0
    }

    fn upper_bound(&self) -> Option<f64> {
        Some(1.0)
    }

    fn provenance(&self) -> Provenance {
        Provenance::Uniform
    }

    fn mass_tolerance(&self) -> f64 {
        0.0
    }
}

impl<T: DensityProvider + ?Sized> DensityProvider for Box<T> {
    fn n_species(&self) -> usize {
        (**self).n_species()
    }
    fn density(&self, x: &[f64]) -> f64 {
        (**self).density(x)
    }
    fn upper_bound(&self) -> Option<f64> {
        (**self).upper_bound()
    }
    fn provenance(&self) -> Provenance {
        (**self).provenance()
    }
    fn mass_tolerance(&self) -> f64 {
        (**self).mass_tolerance()
    }
}
