use super::grid::{Grid2D, TwoSiteDensity};
use super::{ak, ak_prime, check_n, tail_integrals};
use crate::density::Provenance;
use crate::error::{Error, Result};
use crate::one_site::pow_one_minus;
use crate::quad::{cumulative_trapezoid, node, tail_trapezoid, trapezoid_weights, Grid1D};

/// `G` and its shifted antiderivative `ℋ` (with `ℋ' = G`) on a uniform grid.
///
/// `G(0) = 0` is forced by `q(u, 0) = 0`; the scale is fixed by
/// `G'(0) = −ℋ(0) = scale`.
#[derive(Clone, Debug)]
pub struct GSolution {
    pub n: usize,
    pub g: Grid1D,
    pub antiderivative: Grid1D,
    /// Sup distance to the half-step solution on common nodes, relative to
    /// the largest value.
    pub refinement_diff: f64,
}

/// Solves `(1 − a_{N−2}) ℋ'' − a_{N−2}' ℋ' + a_{N−3}' ℋ = 0` with
/// `ℋ(0) = −1`, `ℋ'(0) = 0` by fixed-step RK4, checked against step `1/(2M)`.
pub fn solve_g(n: usize, m: usize, tol: f64) -> Result<GSolution> {
    solve_g_scaled(n, m, tol, 1.0)
}

pub fn solve_g_scaled(n: usize, m: usize, tol: f64, scale: f64) -> Result<GSolution> {
    check_n(n)?;
    if m < 2 {
        return Err(Error::Parameter(format!("grid needs at least 2 intervals, got {m}")));
    }
    let (h, g) = rk4(n, m, scale);
    let (h2, g2) = rk4(n, 2 * m, scale);
    let size = h
        .iter()
        .chain(&g)
        .fold(0.0f64, |a, v| a.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let diff = (0..=m)
        .map(|i| (h[i] - h2[2 * i]).abs().max((g[i] - g2[2 * i]).abs()))
        .fold(0.0, f64::max)
        / size;
    if !(diff <= tol) {
        return Err(Error::Refinement { difference: diff, tol });
    }
    Ok(GSolution {
        n,
        g: Grid1D::new(g)?,
        antiderivative: Grid1D::new(h)?,
        refinement_diff: diff,
    })
}

fn rk4(n: usize, m: usize, scale: f64) -> (Vec<f64>, Vec<f64>) {
    let f = |t: f64, y: [f64; 2]| {
        let g2 = ak_prime(n - 2, t);
        let g3 = ak_prime(n - 3, t);
        [y[1], (g2 * y[1] - g3 * y[0]) / (1.0 - ak(n - 2, t))]
    };
    let step = 1.0 / m as f64;
    let mut y = [-scale, 0.0];
    let mut hs = Vec::with_capacity(m + 1);
    let mut gs = Vec::with_capacity(m + 1);
    hs.push(y[0]);
    gs.push(y[1]);
    for j in 0..m {
        let t = j as f64 * step;
        let add = |y: [f64; 2], k: [f64; 2], c: f64| [y[0] + c * k[0], y[1] + c * k[1]];
        let k1 = f(t, y);
        let k2 = f(t + step / 2.0, add(y, k1, step / 2.0));
        let k3 = f(t + step / 2.0, add(y, k2, step / 2.0));
        let k4 = f(t + step, add(y, k3, step));
        for c in 0..2 {
            y[c] += step / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        hs.push(y[0]);
        gs.push(y[1]);
    }
    (hs, gs)
}

/// Conventions under which an [`AnsatzSolution`] is unique.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleConvention {
    pub g_at_zero: f64,
    pub g_slope_at_zero: f64,
    pub antiderivative_at_zero: f64,
    pub a_at_zero: f64,
    pub b_at_zero: f64,
    pub mass: f64,
}

#[derive(Clone, Debug)]
pub struct AnsatzSolution {
    pub n: usize,
    pub g: Grid1D,
    pub antiderivative: Grid1D,
    pub a: Grid1D,
    pub b: Grid1D,
    pub iterations: usize,
    pub last_change: f64,
    pub convention: ScaleConvention,
}

impl AnsatzSolution {
    /// Rebuilds a solution from tabulated `G`, `A`, `B`, recovering `ℋ`
    /// from `ℋ(0) = −G'(0)`.
    pub fn from_tables(n: usize, g: Vec<f64>, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        check_n(n)?;
        if a.len() != g.len() || b.len() != g.len() {
            return Err(Error::Dimension {
                expected: g.len(),
                got: if a.len() != g.len() { a.len() } else { b.len() },
            });
        }
        let g = Grid1D::new(g)?;
        let h = g.step();
        let v = g.values();
        if v.len() < 4 {
            return Err(Error::Parameter("need at least 3 intervals".into()));
        }
        let slope = start_slope(v, h);
        let anti: Vec<f64> = cumulative_trapezoid(v, h).into_iter().map(|c| c - slope).collect();
        let a = Grid1D::new(a)?;
        let b = Grid1D::new(b)?;
        Ok(Self {
            n,
            convention: ScaleConvention {
                g_at_zero: v[0],
                g_slope_at_zero: slope,
                antiderivative_at_zero: -slope,
                a_at_zero: a.values()[0],
                b_at_zero: b.values()[0],
                mass: 1.0 / n as f64,
            },
            antiderivative: Grid1D::new(anti)?,
            g,
            a,
            b,
            iterations: 0,
            last_change: 0.0,
        })
    }

    pub fn intervals(&self) -> usize {
        self.g.intervals()
    }
}

/// Damped iteration for `A` and `B` given `G`.
///
/// `A` is updated from the `v`-equation solved for the `A(v)` term, and `B`
/// from the integrated `A'` equation, which is linear in `B` and solvable in
/// closed form with the gauge `B(0) = 0`.
#[derive(Clone, Debug)]
pub struct AbSolver {
    tol: f64,
    max_iter: usize,
    damping: f64,
}

impl Default for AbSolver {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            damping: 0.5,
        }
    }
}

impl AbSolver {
    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    /// Weight of the new iterate, in `(0, 1]`.
    pub fn damping(mut self, damping: f64) -> Self {
        self.damping = damping;
        self
    }

    pub fn solve(&self, gs: &GSolution) -> Result<AnsatzSolution> {
        let n = gs.n;
        check_n(n)?;
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Parameter(format!("damping {} outside (0, 1]", self.damping)));
        }
        let omega = self.damping;
        let m = gs.g.intervals();
        let h = 1.0 / m as f64;
        let g = gs.g.values();
        let hc = gs.antiderivative.values();
        if hc.iter().any(|v| v.abs() < 1e-300) {
            return Err(Error::Degenerate("antiderivative of G vanishes on the grid".into()));
        }
        let xs: Vec<f64> = (0..=m).map(|i| node(m, i)).collect();
        let a2: Vec<f64> = xs.iter().map(|&x| ak(n - 2, x)).collect();
        let a3: Vec<f64> = xs.iter().map(|&x| ak(n - 3, x)).collect();
        let p3: Vec<f64> = xs.iter().map(|&x| pow_one_minus(x, n as f64 - 3.0)).collect();
        let p4: Vec<f64> = xs.iter().map(|&x| pow_one_minus(x, n as f64 - 4.0)).collect();
        let p5: Vec<f64> = xs.iter().map(|&x| pow_one_minus(x, n as f64 - 5.0)).collect();
        let kappa: Vec<f64> = (0..=m).map(|i| 1.0 - a2[i] - a3[i] * (1.0 - xs[i])).collect();
        let a3g: Vec<f64> = (0..=m).map(|i| a3[i] * g[i]).collect();
        let j = cumulative_trapezoid(&a3g, h);
        let w = trapezoid_weights(m, h);
        let mul = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).collect::<Vec<f64>>();

        let update_a = |a: &[f64], b: &[f64]| -> Vec<f64> {
            let ia = cumulative_trapezoid(a, h);
            let ib = tail_trapezoid(b, h);
            let c1 = cumulative_trapezoid(&mul(&a3, a), h);
            let c2 = cumulative_trapezoid(&mul(&p3, a), h);
            let gib = mul(g, &ib);
            let c3 = cumulative_trapezoid(&mul(&p4, &gib), h);
            let t5 = if n > 5 {
                let d = square_tails(h, g, a, b);
                let f: Vec<f64> = d
                    .iter()
                    .zip(&p5)
                    .map(|(d, p)| (n as f64 - 5.0) * d * p)
                    .collect();
                cumulative_trapezoid(&f, h)
            } else {
                vec![0.0; m + 1]
            };
            (0..=m)
                .map(|i| {
                    let r = 2.0 * c1[i] - a3[i] * ia[i]
                        + 2.0 * c2[i]
                        + b[i] * j[i]
                        + a3[i] * gib[i]
                        + 2.0 * c3[i]
                        + t5[i];
                    r / kappa[i]
                })
                .collect()
        };
        let update_b = |a: &[f64]| -> Vec<f64> {
            let ia = cumulative_trapezoid(a, h);
            let s: Vec<f64> = (0..=m).map(|i| ia[i] + (1.0 - xs[i]) * a[i]).collect();
            let f: Vec<f64> = (0..=m).map(|i| s[i] / (hc[i] * hc[i])).collect();
            let tail = tail_trapezoid(&f, h);
            (0..=m).map(|i| g[i] * tail[i] - s[i] / hc[i]).collect()
        };

        let mut a = xs.clone();
        let mut b = xs.clone();
        let mut change = f64::INFINITY;
        for it in 1..=self.max_iter {
            let ua = update_a(&a, &b);
            let mut an: Vec<f64> = (0..=m).map(|i| (1.0 - omega) * a[i] + omega * ua[i]).collect();
            let ub = update_b(&an);
            let mut bn: Vec<f64> = (0..=m).map(|i| (1.0 - omega) * b[i] + omega * ub[i]).collect();
            let mass = mass_of(&w, g, &an, &bn);
            if !(mass > 0.0) || !mass.is_finite() {
                return Err(Error::Degenerate(format!("ansatz iterate has mass {mass}")));
            }
            let c = 1.0 / (n as f64 * mass);
            an.iter_mut().for_each(|v| *v *= c);
            bn.iter_mut().for_each(|v| *v *= c);
            change = (0..=m)
                .map(|i| (an[i] - a[i]).abs().max((bn[i] - b[i]).abs()))
                .fold(0.0, f64::max);
            a = an;
            b = bn;
            if change < self.tol {
                let slope = -hc[0];
                return Ok(AnsatzSolution {
                    n,
                    convention: ScaleConvention {
                        g_at_zero: g[0],
                        g_slope_at_zero: slope,
                        antiderivative_at_zero: hc[0],
                        a_at_zero: a[0],
                        b_at_zero: b[0],
                        mass: 1.0 / n as f64,
                    },
                    g: gs.g.clone(),
                    antiderivative: gs.antiderivative.clone(),
                    a: Grid1D::new(a)?,
                    b: Grid1D::new(b)?,
                    iterations: it,
                    last_change: change,
                });
            }
        }
        Err(Error::NoConvergence {
            solver: "ansatz A/B iteration",
            iterations: self.max_iter,
            last_change: change,
            tol: self.tol,
        })
    }
}

pub fn solve_ab(gs: &GSolution, tol: f64, max_iter: usize) -> Result<AnsatzSolution> {
    AbSolver::default().tol(tol).max_iter(max_iter).solve(gs)
}

/// Product trapezoid mass of `q(u,v) = B(max) G(min) + A(min)` over the square.
fn mass_of(w: &[f64], g: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut pg = 0.0;
    let mut pa = 0.0;
    let mut s = 0.0;
    for i in 0..w.len() {
        s += w[i] * w[i] * (b[i] * g[i] + a[i]) + 2.0 * w[i] * (b[i] * pg + pa);
        pg += w[i] * g[i];
        pa += w[i] * a[i];
    }
    s
}

/// `∫∫_{[x_l,1]²} q` for the ansatz form, in `O(M)`.
fn square_tails(h: f64, g: &[f64], a: &[f64], b: &[f64]) -> Vec<f64> {
    let m = g.len() - 1;
    let diag: Vec<f64> = (0..=m).map(|l| b[l] * g[l] + a[l]).collect();
    let mut off = vec![0.0; m + 1];
    let (mut vb, mut v1) = (0.0, 0.0);
    for l in (0..=m).rev() {
        off[l] = g[l] * vb + a[l] * v1;
        let vl = if l == m { h / 2.0 } else { h };
        vb += vl * b[l];
        v1 += vl;
    }
    tail_integrals(h, &diag, &off).1
}

/// Tabulates `q(u,v) = B(u) G(v) + A(v)` on `v ≤ u` and rescales to
/// `∫∫ q = 1/N`.
pub fn assemble_ansatz(sol: &AnsatzSolution) -> Result<TwoSiteDensity> {
    let m = sol.intervals();
    let (g, a, b) = (sol.g.values(), sol.a.values(), sol.b.values());
    let mut grid = Grid2D::zeros(m);
    for i in 0..=m {
        for j in 0..=i {
            grid.set(i, j, b[i] * g[j] + a[j]);
        }
    }
    let mass = grid.integral();
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::Degenerate(format!("assembled kernel has mass {mass}")));
    }
    grid.scale(1.0 / (sol.n as f64 * mass));
    let (min, i, j) = grid.min_value();
    if min < -1e-8 {
        return Err(Error::Negative { value: min, i, j });
    }
    Ok(TwoSiteDensity::new(sol.n, grid, Provenance::AnsatzTwo))
}

/// `A'` predicted by the first-order relation
/// `A'(x) = −(G'(x) ∫_x^1 B + B'(x) ℋ(x)) / (1 − x)`,
/// with `G'` taken from the `ℋ` equation and `B'` by finite differences.
/// The last node is linearly extrapolated.
pub fn eq6_slope(sol: &AnsatzSolution) -> Vec<f64> {
    let n = sol.n;
    let m = sol.intervals();
    let h = 1.0 / m as f64;
    let (g, b, hc) = (sol.g.values(), sol.b.values(), sol.antiderivative.values());
    let ib = tail_trapezoid(b, h);
    let db = derivative(b, h);
    let mut out = vec![0.0; m + 1];
    for i in 0..m {
        let x = node(m, i);
        let dg = (ak_prime(n - 2, x) * g[i] - ak_prime(n - 3, x) * hc[i]) / (1.0 - ak(n - 2, x));
        out[i] = -(dg * ib[i] + db[i] * hc[i]) / (1.0 - x);
    }
    out[m] = 2.0 * out[m - 1] - out[m - 2];
    out
}

/// Third-order one-sided derivative at the left end.
pub(crate) fn start_slope(v: &[f64], h: f64) -> f64 {
    (-11.0 * v[0] + 18.0 * v[1] - 9.0 * v[2] + 2.0 * v[3]) / (6.0 * h)
}

/// Second-order finite differences, one-sided at the ends.
pub(crate) fn derivative(f: &[f64], h: f64) -> Vec<f64> {
    let m = f.len() - 1;
    let mut d = vec![0.0; m + 1];
    for i in 1..m {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[m] = (3.0 * f[m] - 4.0 * f[m - 1] + f[m - 2]) / (2.0 * h);
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_conventions() {
        let s = solve_g(5, 200, 1e-8).unwrap();
        assert_eq!(s.g.values()[0], 0.0);
        assert_eq!(s.antiderivative.values()[0], -1.0);
        let v = s.g.values();
        let slope = (-3.0 * v[0] + 4.0 * v[1] - v[2]) * 100.0;
        assert!((slope - 1.0).abs() < 1e-3);
        assert!(s.refinement_diff < 1e-9);
    }

    #[test]
    fn g_scales_linearly() {
        let a = solve_g(6, 100, 1e-6).unwrap();
        let b = solve_g_scaled(6, 100, 1e-6, 2.5).unwrap();
        for (x, y) in a.g.values().iter().zip(b.g.values()) {
            assert!((2.5 * x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }

    #[test]
    fn mass_matches_dense_grid() {
        let m = 10;
        let g: Vec<f64> = (0..=m).map(|i| node(m, i).sin()).collect();
        let a: Vec<f64> = (0..=m).map(|i| node(m, i).powi(2)).collect();
        let b: Vec<f64> = (0..=m).map(|i| 1.0 + node(m, i)).collect();
        let grid = Grid2D::from_fn(m, |u, v| (1.0 + u) * v.sin() + v * v);
        let w = trapezoid_weights(m, 0.1);
        assert!((mass_of(&w, &g, &a, &b) - grid.integral()).abs() < 1e-14);
    }

    #[test]
    fn ansatz_five_species() {
        let gs = solve_g(5, 100, 1e-7).unwrap();
        let sol = AbSolver::default().solve(&gs).unwrap();
        assert_eq!(sol.a.values()[0], 0.0);
        assert_eq!(sol.b.values()[0], 0.0);
        let q = assemble_ansatz(&sol).unwrap();
        assert!((q.integral() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn tables_round_trip() {
        let gs = solve_g(5, 100, 1e-7).unwrap();
        let sol = AbSolver::default().solve(&gs).unwrap();
        let back = AnsatzSolution::from_tables(
            5,
            sol.g.values().to_vec(),
            sol.a.values().to_vec(),
            sol.b.values().to_vec(),
        )
        .unwrap();
        let d = back.antiderivative.max_abs_diff(&sol.antiderivative).unwrap();
        assert!(d < 2e-5, "{d}");
    }
}
