use super::ansatz::start_slope;
use super::grid::TwoSiteDensity;
use crate::quad::{cumulative_trapezoid, Grid1D};

/// Largest relative spread of `D(u; v1, v2) / D(u'; v1, v2)` over `(v1, v2)`,
/// where `D(u; v1, v2) = q(u, v1) − q(u, v2)` and `u, u' ≤ v1, v2`.
///
/// For `q(u, v) = B(max) G(min) + A(min)` the ratio is `G(u)/G(u')`
/// whatever `v1, v2` are. Nodes are sampled on a stride of about `M/16`;
/// denominators below `1e-6` are skipped.
pub fn separability_check(q: &TwoSiteDensity) -> f64 {
    let g = q.grid();
    let m = g.intervals();
    let stride = (m / 16).max(1);
    let mut idx: Vec<usize> = (0..=m).step_by(stride).collect();
    if *idx.last().unwrap() != m {
        idx.push(m);
    }
    let mut worst: f64 = 0.0;
    for &u in &idx {
        for &ur in &idx {
            if u == ur {
                continue;
            }
            let lo = u.max(ur);
            let mut ratios: Vec<(f64, f64)> = Vec::new();
            for (a, &v1) in idx.iter().enumerate() {
                if v1 < lo {
                    continue;
                }
                for &v2 in &idx[a + 1..] {
                    let den = g.get(ur, v1) - g.get(ur, v2);
                    if den.abs() < 1e-6 {
                        continue;
                    }
                    let num = g.get(u, v1) - g.get(u, v2);
                    ratios.push((num / den, den.abs()));
                }
            }
            let Some(&(reference, _)) = ratios
                .iter()
                .max_by(|x, y| x.1.total_cmp(&y.1))
            else {
                continue;
            };
            let scale = reference.abs().max(1e-12);
            for (r, _) in &ratios {
                worst = worst.max((r - reference).abs() / scale);
            }
        }
    }
    worst
}

/// Residual of `(z³ + 2) 𝒢'' + 3z² 𝒢' + 3z 𝒢 = 0` for
/// `𝒢(z) = −ℋ(1 − z)`, where `ℋ` is the antiderivative of `G` with
/// `ℋ(0) = −G'(0)`.
pub fn hypergeometric_residual(g: &Grid1D) -> f64 {
    let h = g.step();
    let v = g.values();
    let m = g.intervals();
    if v.len() < 4 {
        return f64::NAN;
    }
    let slope = start_slope(v, h);
    let anti = cumulative_trapezoid(v, h);
    let calg: Vec<f64> = (0..=m).map(|j| slope - anti[m - j]).collect();
    match Grid1D::new(calg) {
        Ok(c) => hypergeometric_residual_of(&c),
        Err(_) => f64::NAN,
    }
}

/// Max over interior nodes `z ∈ [2/M, 1 − 1/M]` of
/// `|(z³ + 2) 𝒢'' + 3z² 𝒢' + 3z 𝒢|`, divided by `max |𝒢|`.
pub fn hypergeometric_residual_of(calg: &Grid1D) -> f64 {
    let v = calg.values();
    let m = calg.intervals();
    let h = calg.step();
    let size = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if size == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for j in 2..m {
        let z = calg.node(j);
        let d1 = (v[j + 1] - v[j - 1]) / (2.0 * h);
        let d2 = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h * h);
        let r = (z * z * z + 2.0) * d2 + 3.0 * z * z * d1 + 3.0 * z * v[j];
        worst = worst.max(r.abs());
    }
    worst / size
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Provenance;
    use crate::two_site::Grid2D;

    #[test]
    fn exact_ansatz_has_zero_deviation() {
        let g = Grid2D::from_fn(64, |u, v| (1.0 + u) * v + v * v);
        let q = TwoSiteDensity::new(5, g, Provenance::AnsatzTwo);
        assert!(separability_check(&q) < 1e-12);
    }

    #[test]
    fn perturbation_is_detected() {
        let g = Grid2D::from_fn(64, |u, v| (1.0 + u * u) * v + v * v + 0.01 * u * v * v);
        let q = TwoSiteDensity::new(5, g, Provenance::AnsatzTwo);
        assert!(separability_check(&q) > 1e-3);
    }

    #[test]
    fn residual_of_linear_and_zero() {
        let lin = Grid1D::from_fn(100, |z| z).unwrap();
        assert!(hypergeometric_residual_of(&lin) > 1.0);
        let zero = Grid1D::from_fn(100, |_| 0.0).unwrap();
        assert_eq!(hypergeometric_residual_of(&zero), 0.0);
    }
}
