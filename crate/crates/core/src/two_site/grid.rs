use crate::density::{DensityProvider, Provenance};
use crate::error::{Error, Result};
use crate::quad::{interp_linear, node, trapezoid, trapezoid_weights};

/// Symmetric function on `[0,1]²` tabulated at `(i/M, j/M)`; only the
/// triangle `j ≤ i` is stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D {
    m: usize,
    tri: Vec<f64>,
}

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    let (a, b) = if i >= j { (i, j) } else { (j, i) };
    a * (a + 1) / 2 + b
}

impl Grid2D {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            tri: vec![0.0; (m + 1) * (m + 2) / 2],
        }
    }

    /// `f(u, v)` is called with `v ≤ u`.
    pub fn from_fn(m: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut g = Self::zeros(m);
        for i in 0..=m {
            for j in 0..=i {
                g.tri[tri_index(i, j)] = f(node(m, i), node(m, j));
            }
        }
        g
    }

    /// Takes the lower triangle of a row-major `(M+1)²` matrix.
    pub fn from_dense(m: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != (m + 1) * (m + 1) {
            return Err(Error::Dimension {
                expected: (m + 1) * (m + 1),
                got: dense.len(),
            });
        }
        let mut g = Self::zeros(m);
        for i in 0..=m {
            for j in 0..=i {
                g.tri[tri_index(i, j)] = dense[i * (m + 1) + j];
            }
        }
        Ok(g)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.m + 1;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = self.get(i, j);
            }
        }
        d
    }

    pub fn intervals(&self) -> usize {
        self.m
    }

    pub fn step(&self) -> f64 {
        1.0 / self.m as f64
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.tri[tri_index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.tri[tri_index(i, j)] = v;
    }

    /// Stored triangle values, row by row.
    pub fn triangle(&self) -> &[f64] {
        &self.tri
    }

    pub fn weights(&self) -> Vec<f64> {
        trapezoid_weights(self.m, self.step())
    }

    /// Product trapezoid integral over the square.
    pub fn integral(&self) -> f64 {
        let w = self.weights();
        let mut s = 0.0;
        for i in 0..=self.m {
            let mut row = 0.0;
            for j in 0..i {
                row += 2.0 * w[j] * self.get(i, j);
            }
            row += w[i] * self.get(i, i);
            s += w[i] * row;
        }
        s
    }

    pub fn scale(&mut self, factor: f64) {
        self.tri.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn min_value(&self) -> (f64, usize, usize) {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..=self.m {
            for j in 0..=i {
                let v = self.get(i, j);
                if v < best.0 {
                    best = (v, i, j);
                }
            }
        }
        best
    }

    pub fn max_value(&self) -> f64 {
        self.tri.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bilinear interpolation with the symmetric extension.
    pub fn interp(&self, u: f64, v: f64) -> f64 {
        let m = self.m;
        let tu = u.clamp(0.0, 1.0) * m as f64;
        let tv = v.clamp(0.0, 1.0) * m as f64;
        let i = (tu.floor() as usize).min(m - 1);
        let j = (tv.floor() as usize).min(m - 1);
        let (fu, fv) = (tu - i as f64, tv - j as f64);
        let q00 = self.get(i, j);
        let q10 = self.get(i + 1, j);
        let q01 = self.get(i, j + 1);
        let q11 = self.get(i + 1, j + 1);
        (1.0 - fu) * ((1.0 - fv) * q00 + fv * q01) + fu * ((1.0 - fv) * q10 + fv * q11)
    }

    /// Sup-norm distance on common nodes; `other` may be a refinement by an
    /// integer factor.
    pub fn sup_distance(&self, other: &Grid2D) -> Result<f64> {
        let (coarse, fine) = if self.m <= other.m { (self, other) } else { (other, self) };
        if fine.m % coarse.m != 0 {
            return Err(Error::GridMismatch {
                left: format!("{} intervals", self.m),
                right: format!("{} intervals", other.m),
            });
        }
        let r = fine.m / coarse.m;
        let mut d: f64 = 0.0;
        for i in 0..=coarse.m {
            for j in 0..=i {
                d = d.max((coarse.get(i, j) - fine.get(i * r, j * r)).abs());
            }
        }
        Ok(d)
    }
}

/// Two-site kernel `q` of `π(x) = Σ_i q(x_i, x_{i+1})`.
#[derive(Clone, Debug)]
pub struct TwoSiteDensity {
    n: usize,
    grid: Grid2D,
    provenance: Provenance,
    row_integrals: Vec<f64>,
}

impl TwoSiteDensity {
    pub fn new(n: usize, grid: Grid2D, provenance: Provenance) -> Self {
        let m = grid.intervals();
        let h = grid.step();
        let row_integrals = (0..=m)
            .map(|i| {
                let row: Vec<f64> = (0..=m).map(|j| grid.get(i, j)).collect();
                trapezoid(&row, h)
            })
            .collect();
        Self {
            n,
            grid,
            provenance,
            row_integrals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn q(&self, u: f64, v: f64) -> f64 {
        self.grid.interp(u, v)
    }

    /// `∫∫ q`, which should equal `1/N`.
    pub fn integral(&self) -> f64 {
        self.grid.integral()
    }

    /// Single-site marginal `2 ∫ q(x, s) ds + (N−2)/N`.
    pub fn marginal(&self, x: f64) -> f64 {
        2.0 * interp_linear(&self.row_integrals, x) + (self.n as f64 - 2.0) / self.n as f64
    }

    pub fn pi(&self, x: &[f64]) -> f64 {
        let n = x.len();
        (0..n).map(|i| self.q(x[i], x[(i + 1) % n])).sum()
    }
}

impl DensityProvider for TwoSiteDensity {
    fn n_species(&self) -> usize {
        self.n
    }

    fn density(&self, x: &[f64]) -> f64 {
        self.pi(x)
    }

    fn upper_bound(&self) -> Option<f64> {
        Some(self.n as f64 * self.grid.max_value() * 1.1)
    }

    fn provenance(&self) -> Provenance {
        self.provenance
    }

    fn mass_tolerance(&self) -> f64 {
        1e-10
    }
}
