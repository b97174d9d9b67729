use rayon::prelude::*;

use super::grid::{Grid2D, TwoSiteDensity};
use super::{ak, check_n, tail_integrals};
use crate::density::Provenance;
use crate::error::{Error, Result};
use crate::model::two_site_k_valid;
use crate::one_site::pow_one_minus;
use crate::quad::{cumulative_trapezoid, node, trapezoid_weights};

/// Fixed-point iteration of the symmetrized two-site integral equation
///
/// `q(u,v) = a_{N−2}(v) q(u,v) + ∫ q(u,s) a_{N−3}(min(s,v)) ds
///   + ∫ q(v,s) a_{N−3}(min(s,v)) ds + 2 ∫_0^v (1−t)^{N−4} ∫_t^1 q(s,t) ds dt
///   + (N−5) ∫_0^v (1−r)^{N−5} ∫∫_{[r,1]²} q dr`
///
/// for `v ≤ u`, renormalized to `∫∫ q = 1/N` after every sweep.
#[derive(Clone, Debug)]
pub struct FixedPointTwo {
    n: usize,
    k: usize,
    m: usize,
    tol: f64,
    max_iter: usize,
    compute_vanishing_terms: bool,
}

#[derive(Clone, Debug)]
pub struct FixedPointTwoOutcome {
    pub density: TwoSiteDensity,
    pub iterations: usize,
    pub last_change: f64,
}

impl FixedPointTwo {
    pub fn new(n: usize, k: usize, m: usize) -> Self {
        Self {
            n,
            k,
            m,
            tol: 1e-10,
            max_iter: 5_000,
            compute_vanishing_terms: false,
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

    /// Evaluate the `(N−5)` term even when its prefactor is zero.
    pub fn compute_vanishing_terms(mut self, on: bool) -> Self {
        self.compute_vanishing_terms = on;
        self
    }

    pub fn solve(&self) -> Result<FixedPointTwoOutcome> {
        let (n, m) = (self.n, self.m);
        check_n(n)?;
        if !two_site_k_valid(n, self.k) {
            return Err(Error::Pattern(format!(
                "k = {} leaves a non-replaced species adjacent to the minimum for N = {n}",
                self.k
            )));
        }
        if m < 64 {
            return Err(Error::Parameter(format!("grid needs at least 64 intervals, got {m}")));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Parameter("tolerance must be positive".into()));
        }
        let sweep = Sweep::new(n, m, self.compute_vanishing_terms || n > 5);
        let dim = m + 1;
        let mut q = vec![1.0; dim * dim];
        normalize(&mut q, &sweep.w, n)?;
        let mut change = f64::INFINITY;
        for it in 1..=self.max_iter {
            let mut next = sweep.apply(&q);
            normalize(&mut next, &sweep.w, n)?;
            change = next
                .iter()
                .zip(&q)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            q = next;
            if change < self.tol {
                let grid = Grid2D::from_dense(m, &q)?;
                return Ok(FixedPointTwoOutcome {
                    density: TwoSiteDensity::new(n, grid, Provenance::FixedPointGrid),
                    iterations: it,
                    last_change: change,
                });
            }
        }
        Err(Error::NoConvergence {
            solver: "two-site fixed point",
            iterations: self.max_iter,
            last_change: change,
            tol: self.tol,
        })
    }
}

struct Sweep {
    n: usize,
    m: usize,
    h: f64,
    w: Vec<f64>,
    a2: Vec<f64>,
    a3: Vec<f64>,
    p4: Vec<f64>,
    p5: Vec<f64>,
    with_t5: bool,
}

impl Sweep {
    fn new(n: usize, m: usize, with_t5: bool) -> Self {
        let h = 1.0 / m as f64;
        let xs: Vec<f64> = (0..=m).map(|i| node(m, i)).collect();
        Self {
            n,
            m,
            h,
            w: trapezoid_weights(m, h),
            a2: xs.iter().map(|&x| ak(n - 2, x)).collect(),
            a3: xs.iter().map(|&x| ak(n - 3, x)).collect(),
            p4: xs.iter().map(|&x| pow_one_minus(x, n as f64 - 4.0)).collect(),
            p5: xs.iter().map(|&x| pow_one_minus(x, n as f64 - 5.0)).collect(),
            with_t5,
        }
    }

    fn apply(&self, q: &[f64]) -> Vec<f64> {
        let (m, h) = (self.m, self.h);
        let dim = m + 1;
        // rows of ∫ q(u_i, s) a_{N−3}(min(s, v_j)) ds for j ≤ i
        let t2: Vec<Vec<f64>> = (0..dim)
            .into_par_iter()
            .map(|i| {
                let row = &q[i * dim..(i + 1) * dim];
                let mut tail: f64 = row.iter().zip(&self.w).map(|(a, b)| a * b).sum();
                let mut head = 0.0;
                let mut out = Vec::with_capacity(i + 1);
                for j in 0..=i {
                    head += self.w[j] * row[j] * self.a3[j];
                    tail -= self.w[j] * row[j];
                    out.push(head + self.a3[j] * tail);
                }
                out
            })
            .collect();
        let t3: Vec<f64> = (0..dim).map(|j| t2[j][j]).collect();

        let diag: Vec<f64> = (0..dim).map(|l| q[l * dim + l]).collect();
        let off: Vec<f64> = (0..dim)
            .map(|l| {
                let row = &q[l * dim..(l + 1) * dim];
                let mut s: f64 = row[l + 1..].iter().sum::<f64>() * h;
                if l < m {
                    s -= 0.5 * h * row[m];
                }
                s
            })
            .collect();
        let (c, d) = tail_integrals(h, &diag, &off);
        let f4: Vec<f64> = c.iter().zip(&self.p4).map(|(a, b)| 2.0 * a * b).collect();
        let t4 = cumulative_trapezoid(&f4, h);
        let t5 = if self.with_t5 {
            let f5: Vec<f64> = d
                .iter()
                .zip(&self.p5)
                .map(|(a, b)| (self.n as f64 - 5.0) * a * b)
                .collect();
            cumulative_trapezoid(&f5, h)
        } else {
            vec![0.0; dim]
        };

        let mut next = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let v = self.a2[j] * q[i * dim + j] + t2[i][j] + t3[j] + t4[j] + t5[j];
                next[i * dim + j] = v;
                next[j * dim + i] = v;
            }
        }
        next
    }
}

fn normalize(q: &mut [f64], w: &[f64], n: usize) -> Result<()> {
    let dim = w.len();
    let mass: f64 = (0..dim)
        .map(|i| w[i] * (0..dim).map(|j| w[j] * q[i * dim + j]).sum::<f64>())
        .sum();
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::Degenerate(format!("iterate has mass {mass}")));
    }
    let s = 1.0 / (n as f64 * mass);
    q.iter_mut().for_each(|v| *v *= s);
    Ok(())
}
