//! Two-site stationary kernel for the rule that leaves two adjacent species
//! `k, k+1` untouched.
//!
//! Two independent routes produce the kernel `q(u, v)` of
//! `π(x) = Σ_i q(x_i, x_{i+1})`: a fixed point of the symmetrized integral
//! equation on a triangular grid, and the separable ansatz
//! `q(u, v) = B(u) G(v) + A(v)` for `v ≤ u`.

mod ansatz;
mod checks;
mod fixed_point;
mod grid;

pub use ansatz::{assemble_ansatz, eq6_slope, solve_ab, solve_g, AbSolver, AnsatzSolution, GSolution};
pub use checks::{hypergeometric_residual, hypergeometric_residual_of, separability_check};
pub use fixed_point::{FixedPointTwo, FixedPointTwoOutcome};
pub use grid::{Grid2D, TwoSiteDensity};

use crate::error::{Error, Result};
use crate::one_site::{pow_one_minus, pow_one_minus_m1};

/// `a_k(v) = (1 − (1 − v)^k) / k = ∫_0^v (1 − t)^{k−1} dt`.
pub fn a_k(k: usize, v: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Parameter("a_k needs k ≥ 1".into()));
    }
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain {
            what: "v",
            value: v,
            domain: "[0, 1]",
        });
    }
    Ok(ak(k, v))
}

#[inline]
pub(crate) fn ak(k: usize, v: f64) -> f64 {
    -pow_one_minus_m1(v, k as f64) / k as f64
}

/// `a_k'(v) = (1 − v)^{k−1}`.
#[inline]
pub(crate) fn ak_prime(k: usize, v: f64) -> f64 {
    pow_one_minus(v, k as f64 - 1.0)
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n < 5 {
        return Err(Error::Parameter(format!(
            "two-site kernel needs at least 5 species, got {n}"
        )));
    }
    Ok(())
}

/// Tail integrals over `[x_l, 1]` used by the `(N−5)` and `2(1−t)^{N−4}`
/// terms, from trapezoid sums.
///
/// `diag[l] = q(x_l, x_l)` and `off[l] = Σ_{b>l} v_b q(x_l, x_b)` with
/// `v_b = h` for `b < M` and `h/2` at `b = M`. Returns
/// `(C, D)` with `C_l = ∫_{x_l}^1 q(s, x_l) ds` and
/// `D_l = ∫∫_{[x_l,1]²} q`.
pub(crate) fn tail_integrals(h: f64, diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = diag.len() - 1;
    let v = |b: usize| if b == m { h / 2.0 } else { h };
    let mut c = vec![0.0; m + 1];
    let mut d = vec![0.0; m + 1];
    let mut s = 0.0;
    for l in (0..=m).rev() {
        let vl = v(l);
        let r = vl * diag[l] + off[l];
        s += 2.0 * vl * off[l] + vl * vl * diag[l];
        if l < m {
            c[l] = r - 0.5 * h * diag[l];
            d[l] = s - h * r + 0.25 * h * h * diag[l];
        }
    }
    (c, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{node, trapezoid};

    #[test]
    fn a_k_values() {
        for k in 1..8 {
            assert_eq!(a_k(k, 0.0).unwrap(), 0.0);
            assert!((a_k(k, 1.0).unwrap() - 1.0 / k as f64).abs() < 1e-15);
        }
        for v in [0.0, 0.25, 0.6, 1.0] {
            assert!((a_k(1, v).unwrap() - v).abs() < 1e-15);
        }
        assert!((a_k(2, 0.5).unwrap() - 0.375).abs() < 1e-15);
        assert!(a_k(0, 0.5).is_err());
        assert!(a_k(2, 1.5).is_err());
    }

    #[test]
    fn tail_integrals_match_direct_trapezoid() {
        let m = 12;
        let h = 1.0 / m as f64;
        let q = |a: usize, b: usize| {
            let (u, v) = (node(m, a), node(m, b));
            1.0 + u * v + (u + v).sin()
        };
        let diag: Vec<f64> = (0..=m).map(|l| q(l, l)).collect();
        let off: Vec<f64> = (0..=m)
            .map(|l| {
                ((l + 1)..=m)
                    .map(|b| if b == m { h / 2.0 } else { h } * q(l, b))
                    .sum()
            })
            .collect();
        let (c, d) = tail_integrals(h, &diag, &off);
        for l in 0..=m {
            let col: Vec<f64> = (l..=m).map(|a| q(a, l)).collect();
            let rows: Vec<f64> = (l..=m)
                .map(|a| trapezoid(&(l..=m).map(|b| q(a, b)).collect::<Vec<_>>(), h))
                .collect();
            let (ce, de) = if l == m {
                (0.0, 0.0)
            } else {
                (trapezoid(&col, h), trapezoid(&rows, h))
            };
            assert!((c[l] - ce).abs() < 1e-13, "C at {l}");
            assert!((d[l] - de).abs() < 1e-13, "D at {l}");
        }
    }
}
