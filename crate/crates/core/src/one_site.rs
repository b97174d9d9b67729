//! Stationary density when all but one species is replaced.
//!
//! With `E_0 = Z_N \ {k}` the stationary density is additive,
//! `π(x) = Σ_i q(x_i)`, with
//!
//! ```text
//! q(x) = (N−1)(N−2)/N · (1 − (1−x)^{N−1}) / ((1−x)^{N−1} + N − 2)²
//! Q(x) = ((N−1)x + (1−x)^{N−1} − 1) / (N((1−x)^{N−1} + N − 2))
//! ```
//!
//! The same `q` solves the one-dimensional integral equation
//! `q = c(x) q + (1 − (1−x)^{N−2}) Q(1) + (1−x)^{N−2} Q(x)` with
//! `c(x) = (1 − (1−x)^{N−1}) / (N−1)`; [`FixedPointOne`] solves it on a grid
//! without using the closed form.

use crate::density::{DensityProvider, Provenance};
use crate::error::{Error, Result};
use crate::model::FitnessConfig;
use crate::quad::{cumulative_trapezoid, node, trapezoid, Grid1D};

/// `(1 − x)^p` through `exp(p · log1p(−x))`, exactly 0 at `x = 1`.
#[inline]
pub fn pow_one_minus(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if x >= 1.0 {
        0.0
    } else {
        (p * (-x).ln_1p()).exp()
    }
}

/// `(1 − x)^p − 1` without cancellation near 0.
#[inline]
pub(crate) fn pow_one_minus_m1(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else if x >= 1.0 {
        -1.0
    } else {
        (p * (-x).ln_1p()).exp_m1()
    }
}

fn check(n: usize, x: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::Domain {
            what: "N",
            value: n as f64,
            domain: "N >= 3",
        });
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            domain: "[0, 1]",
        });
    }
    Ok(())
}

#[inline]
fn q_unchecked(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    let p = pow_one_minus(x, nf - 1.0);
    let num = -pow_one_minus_m1(x, nf - 1.0);
    let den = p + nf - 2.0;
    (nf - 1.0) * (nf - 2.0) / nf * num / (den * den)
}

#[inline]
fn cdf_unchecked(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    let p = pow_one_minus(x, nf - 1.0);
    ((nf - 1.0) * x + pow_one_minus_m1(x, nf - 1.0)) / (nf * (p + nf - 2.0))
}

/// Kernel `q_N(x)` of the additive stationary density.
pub fn q_one(n: usize, x: f64) -> Result<f64> {
    check(n, x)?;
    Ok(q_unchecked(n, x))
}

/// `Q_N(x) = ∫_0^x q_N`.
pub fn cdf_one(n: usize, x: f64) -> Result<f64> {
    check(n, x)?;
    Ok(cdf_unchecked(n, x))
}

/// `π_N(x) = Σ_i q_N(x_i)`.
pub fn pi_one(n: usize, x: &FitnessConfig) -> Result<f64> {
    if x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x.len(),
        });
    }
    check(n, 0.0)?;
    Ok(x.values().iter().map(|&v| q_unchecked(n, v)).sum())
}

/// Single-site marginal `q_N(x) + (N−1)/N`.
pub fn marginal_one(n: usize, x: f64) -> Result<f64> {
    Ok(q_one(n, x)? + (n as f64 - 1.0) / n as f64)
}

/// CDF of the single-site marginal, `Q_N(x) + (N−1)x/N`.
pub fn marginal_cdf_one(n: usize, x: f64) -> Result<f64> {
    Ok(cdf_one(n, x)? + (n as f64 - 1.0) / n as f64 * x)
}

/// `N · q_N(x)`, which tends to 1 as `N → ∞` for fixed `x > 0`.
pub fn uniform_limit_check(n: usize, x: f64) -> Result<f64> {
    Ok(n as f64 * q_one(n, x)?)
}

/// Right-hand side of the one-site integral equation at `x`, given the
/// current `q(x)`, `Q(x)` and the total mass `Q(1)`.
#[inline]
pub fn integral_equation_rhs(n: usize, x: f64, q: f64, cdf: f64, total: f64) -> f64 {
    let nf = n as f64;
    let self_weight = -pow_one_minus_m1(x, nf - 1.0) / (nf - 1.0);
    let tail = pow_one_minus(x, nf - 2.0);
    self_weight * q + (1.0 - tail) * total + tail * cdf
}

/// Closed-form density for one non-replaced species.
#[derive(Clone, Copy, Debug)]
pub struct OneSiteDensity {
    n: usize,
}

impl OneSiteDensity {
    pub fn new(n: usize) -> Result<Self> {
        check(n, 0.0)?;
        Ok(Self { n })
    }

    pub fn q(&self, x: f64) -> f64 {
        q_unchecked(self.n, x.clamp(0.0, 1.0))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        cdf_unchecked(self.n, x.clamp(0.0, 1.0))
    }

    pub fn marginal(&self, x: f64) -> f64 {
        self.q(x) + (self.n as f64 - 1.0) / self.n as f64
    }

    pub fn marginal_cdf(&self, x: f64) -> f64 {
        self.cdf(x) + (self.n as f64 - 1.0) / self.n as f64 * x.clamp(0.0, 1.0)
    }
}

impl DensityProvider for OneSiteDensity {
    fn n_species(&self) -> usize {
        self.n
    }

    fn density(&self, x: &[f64]) -> f64 {
        x.iter().map(|&v| q_unchecked(self.n, v)).sum()
    }

    /// `q` is increasing, so `π ≤ N q(1) = (N−1)/(N−2)`.
    fn upper_bound(&self) -> Option<f64> {
        let nf = self.n as f64;
        Some((nf - 1.0) / (nf - 2.0) * (1.0 + 1e-9))
    }

    fn provenance(&self) -> Provenance {
        Provenance::ClosedFormOne
    }
}

/// A one-site kernel tabulated on a grid, e.g. the fixed-point output.
#[derive(Clone, Debug)]
pub struct GridOneSiteDensity {
    n: usize,
    grid: Grid1D,
    max: f64,
}

impl GridOneSiteDensity {
    pub fn new(n: usize, grid: Grid1D) -> Self {
        let max = grid.values().iter().cloned().fold(0.0, f64::max);
        Self { n, grid, max }
    }
}

impl DensityProvider for GridOneSiteDensity {
    fn n_species(&self) -> usize {
        self.n
    }

    fn density(&self, x: &[f64]) -> f64 {
        x.iter().map(|&v| self.grid.interp(v)).sum()
    }

    fn upper_bound(&self) -> Option<f64> {
        Some(self.n as f64 * self.max * 1.1)
    }

    fn provenance(&self) -> Provenance {
        Provenance::FixedPointGrid
    }

    fn mass_tolerance(&self) -> f64 {
        1e-10
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialGuess {
    Constant(f64),
    Identity,
    Values(Vec<f64>),
}

/// Grid fixed-point solver for the one-site integral equation.
#[derive(Clone, Debug)]
pub struct FixedPointOne {
    n: usize,
    m: usize,
    tol: f64,
    max_iter: usize,
    initial: InitialGuess,
}

#[derive(Clone, Debug)]
pub struct FixedPointOneOutcome {
    pub grid: Grid1D,
    pub iterations: usize,
    pub last_change: f64,
}

impl FixedPointOne {
    pub fn new(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            tol: 1e-10,
            max_iter: 10_000,
            initial: InitialGuess::Constant(1.0),
        }
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn initial(mut self, initial: InitialGuess) -> Self {
        self.initial = initial;
        self
    }

    /// Iterates `q ↦ RHS(q)` with `Q` from the trapezoid rule and `q`
    /// rescaled each sweep so that `Q(1) = 1/N`.
    pub fn solve(&self) -> Result<FixedPointOneOutcome> {
        let (n, m) = (self.n, self.m);
        check(n, 0.0)?;
        if m < 64 {
            return Err(Error::Parameter(format!("grid needs at least 64 intervals, got {m}")));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Parameter("tolerance must be positive".into()));
        }
        let h = 1.0 / m as f64;
        let target = 1.0 / n as f64;
        let mut q: Vec<f64> = match &self.initial {
            InitialGuess::Constant(c) => vec![*c; m + 1],
            InitialGuess::Identity => (0..=m).map(|i| node(m, i)).collect(),
            InitialGuess::Values(v) if v.len() == m + 1 => v.clone(),
            InitialGuess::Values(v) => {
                return Err(Error::Dimension {
                    expected: m + 1,
                    got: v.len(),
                })
            }
        };
        renormalize(&mut q, h, target)?;
        let mut change = f64::INFINITY;
        for it in 1..=self.max_iter {
            let cdf = cumulative_trapezoid(&q, h);
            let mut next: Vec<f64> = (0..=m)
                .map(|i| integral_equation_rhs(n, node(m, i), q[i], cdf[i], target))
                .collect();
            renormalize(&mut next, h, target)?;
            change = next
                .iter()
                .zip(&q)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            q = next;
            if change < self.tol {
                return Ok(FixedPointOneOutcome {
                    grid: Grid1D::new(q)?,
                    iterations: it,
                    last_change: change,
                });
            }
        }
        Err(Error::NoConvergence {
            solver: "one-site fixed point",
            iterations: self.max_iter,
            last_change: change,
            tol: self.tol,
        })
    }
}

fn renormalize(q: &mut [f64], h: f64, target: f64) -> Result<()> {
    let mass = trapezoid(q, h);
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::Degenerate(format!("iterate has mass {mass}")));
    }
    let s = target / mass;
    q.iter_mut().for_each(|v| *v *= s);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn endpoint_values() {
        for n in [3, 4, 5, 17, 1000] {
            assert_eq!(q_one(n, 0.0).unwrap(), 0.0);
            assert_eq!(cdf_one(n, 0.0).unwrap(), 0.0);
        }
        assert!((q_one(4, 1.0).unwrap() - 0.375).abs() < 1e-15);
        assert!((q_one(3, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((cdf_one(4, 1.0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(q_one(2, 0.5).is_err());
        assert!(q_one(4, -0.1).is_err());
        assert!(q_one(4, 1.1).is_err());
        assert!(cdf_one(4, f64::NAN).is_err());
        let x = FitnessConfig::new(vec![0.5; 3]).unwrap();
        assert!(matches!(pi_one(4, &x), Err(Error::Dimension { .. })));
    }

    #[test]
    fn pi_examples() {
        let zeros = FitnessConfig::new(vec![0.0; 6]).unwrap();
        assert_eq!(pi_one(6, &zeros).unwrap(), 0.0);
        let ones = FitnessConfig::new(vec![1.0; 4]).unwrap();
        assert!((pi_one(4, &ones).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn cdf_derivative_is_q() {
        let h = 1e-5;
        let fd = (cdf_one(4, 0.5 + h).unwrap() - cdf_one(4, 0.5 - h).unwrap()) / (2.0 * h);
        let q = q_one(4, 0.5).unwrap();
        assert!((fd - q).abs() < 1e-8);
        assert!((q - 0.290657).abs() < 1e-6);
    }

    #[test]
    fn uniform_limit_examples() {
        assert!((uniform_limit_check(1000, 0.5).unwrap() - 1.0).abs() < 0.01);
        assert!((uniform_limit_check(3, 1.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn fixed_point_small() {
        let out = FixedPointOne::new(4, 200).tol(1e-12).solve().unwrap();
        assert!(out.grid.values()[0].abs() < 1e-12);
        let err = out
            .grid
            .nodes()
            .zip(out.grid.values())
            .map(|(x, v)| (v - q_one(4, x).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(err < 2e-4, "err {err}");
    }

    #[test]
    fn fixed_point_rejects_bad_input() {
        assert!(FixedPointOne::new(4, 10).solve().is_err());
        assert!(FixedPointOne::new(4, 100).tol(0.0).solve().is_err());
        let r = FixedPointOne::new(4, 100).tol(1e-14).max_iter(2).solve();
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }

    proptest! {
        #[test]
        fn q_nonnegative_and_increasing(n in 3usize..10_000, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let ql = q_one(n, lo).unwrap();
            let qh = q_one(n, hi).unwrap();
            prop_assert!(ql >= 0.0);
            prop_assert!(qh >= ql - 1e-15);
        }
    }
}
