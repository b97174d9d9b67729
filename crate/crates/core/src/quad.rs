//! Uniform grids on [0,1] and composite trapezoid quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadRule {
    Trapezoid,
}

/// Node values at `x_i = i / M`, `i = 0..=M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    values: Vec<f64>,
    rule: QuadRule,
}

impl Grid1D {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Parameter("a grid needs at least two nodes".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("non-finite grid value at node {i}")));
        }
        Ok(Self {
            values,
            rule: QuadRule::Trapezoid,
        })
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..=m).map(|i| f(node(m, i))).collect())
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        1.0 / self.intervals() as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        node(self.intervals(), i)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|i| self.node(i))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rule(&self) -> QuadRule {
        self.rule
    }

    /// Piecewise-linear interpolation, clamped to [0,1].
    pub fn interp(&self, x: f64) -> f64 {
        interp_linear(&self.values, x)
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.step())
    }

    /// `∫_0^{x_i}` at every node.
    pub fn cumulative(&self) -> Vec<f64> {
        cumulative_trapezoid(&self.values, self.step())
    }

    pub fn max_abs_diff(&self, other: &Grid1D) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(Error::GridMismatch {
                left: format!("{} intervals", self.intervals()),
                right: format!("{} intervals", other.intervals()),
            });
        }
        Ok(sup_diff(&self.values, &other.values))
    }
}

#[inline]
pub fn node(m: usize, i: usize) -> f64 {
    if i == m {
        1.0
    } else {
        i as f64 / m as f64
    }
}

pub fn trapezoid(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = f[1..n - 1].iter().sum();
    h * (inner + 0.5 * (f[0] + f[n - 1]))
}

/// Running trapezoid integral from the left endpoint.
pub fn cumulative_trapezoid(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in f.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Running trapezoid integral from each node to the right endpoint.
pub fn tail_trapezoid(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    let mut acc = 0.0;
    for i in (0..f.len().saturating_sub(1)).rev() {
        acc += 0.5 * h * (f[i] + f[i + 1]);
        out[i] = acc;
    }
    out
}

/// Trapezoid weights on `m` intervals of width `h`.
pub fn trapezoid_weights(m: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; m + 1];
    w[0] = 0.5 * h;
    w[m] = 0.5 * h;
    w
}

pub fn interp_linear(values: &[f64], x: f64) -> f64 {
    let m = values.len() - 1;
    let t = x.clamp(0.0, 1.0) * m as f64;
    let i = (t.floor() as usize).min(m - 1);
    let frac = t - i as f64;
    values[i] + frac * (values[i + 1] - values[i])
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_exact_for_linear() {
        let g = Grid1D::from_fn(7, |x| 3.0 * x + 1.0).unwrap();
        assert!((g.integral() - 2.5).abs() < 1e-14);
        let c = g.cumulative();
        for (i, x) in g.nodes().enumerate() {
            assert!((c[i] - (1.5 * x * x + x)).abs() < 1e-14);
        }
    }

    #[test]
    fn trapezoid_second_order() {
        let err = |m| (Grid1D::from_fn(m, |x: f64| x.exp()).unwrap().integral() - (1f64.exp() - 1.0)).abs();
        let ratio = err(50) / err(100);
        assert!((ratio - 4.0).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn head_and_tail_sum_to_total() {
        let f: Vec<f64> = (0..=20).map(|i| (i as f64 * 0.3).sin()).collect();
        let h = 0.05;
        let head = cumulative_trapezoid(&f, h);
        let tail = tail_trapezoid(&f, h);
        let total = trapezoid(&f, h);
        for i in 0..f.len() {
            assert!((head[i] + tail[i] - total).abs() < 1e-14);
        }
        let w = trapezoid_weights(20, h);
        let dot: f64 = w.iter().zip(&f).map(|(a, b)| a * b).sum();
        assert!((dot - total).abs() < 1e-14);
    }

    #[test]
    fn interp_hits_nodes() {
        let g = Grid1D::from_fn(4, |x| x * x).unwrap();
        assert_eq!(g.interp(0.5), 0.25);
        assert_eq!(g.interp(1.0), 1.0);
        assert!((g.interp(0.125) - 0.03125).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Grid1D::new(vec![0.0, f64::NAN]).is_err());
        assert!(Grid1D::new(vec![0.0]).is_err());
    }
}
