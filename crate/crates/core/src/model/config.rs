use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Fitness vector in `[0,1]^N`, indexed by species.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FitnessConfig(Vec<f64>);

impl FitnessConfig {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("empty configuration".into()));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::Config(format!("x[{i}] = {v} not in [0,1]")));
        }
        Ok(Self(values))
    }

    pub fn uniform(n: usize, rng: &mut RngStream) -> Self {
        Self((0..n).map(|_| rng.uniform()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn argmin(&self) -> usize {
        argmin_slice(&self.0)
    }

    pub fn min(&self) -> f64 {
        self.0[self.argmin()]
    }

    /// Cyclic relabeling `y_j = x_{j - shift}`.
    pub fn rotated(&self, shift: usize) -> Self {
        let n = self.0.len();
        Self((0..n).map(|j| self.0[(j + n - shift % n) % n]).collect())
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl TryFrom<Vec<f64>> for FitnessConfig {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FitnessConfig> for Vec<f64> {
    fn from(c: FitnessConfig) -> Self {
        c.0
    }
}

/// Index of the smallest entry; ties go to the lowest index.
#[inline]
pub fn argmin_slice(x: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in x.iter().enumerate().skip(1) {
        if v < x[best] {
            best = i;
        }
    }
    best
}
