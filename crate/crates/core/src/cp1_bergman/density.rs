use serde::Serialize;

use super::metric::RadialMetric;
use super::profile::RadialFunction;
use super::x_of_s;
use crate::error::invalid;
use crate::exec::{try_map_range, Execution};
use crate::quadrature::{integrate, QuadOptions};
use crate::{Error, Result};

/// Bergman density samples at one tensor power.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityResult {
    pub m: u32,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub norms: Vec<f64>,
}

/// `e·ln(b)` with the convention `0·ln 0 = 0`.
fn xlogy(e: f64, b: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        e * b.ln()
    }
}

/// `ln(|z^j|²_{h^m})` at `x`: `j ln(1-x) + (m-j) ln x - m u(x)`.
fn log_pointwise(m: u32, j: u32, x: f64, u: f64) -> f64 {
    xlogy(j as f64, 1.0 - x) + xlogy((m - j) as f64, x) - m as f64 * u
}

/// `N_j = ∫ |z^j|²_{h^m} ω`, `j = 0..=m`, with the default execution mode.
pub fn section_norms(metric: &RadialMetric, m: u32, tol: f64) -> Result<Vec<f64>> {
    section_norms_with(metric, m, tol, Execution::default())
}

/// [`section_norms`] with an explicit execution mode. In `x` the integrals
/// are `∫₀¹ (1-x)^j x^{m-j} e^{-mu(x)} (1 + Δu(x)) dx`.
pub fn section_norms_with(
    metric: &RadialMetric,
    m: u32,
    tol: f64,
    mode: Execution,
) -> Result<Vec<f64>> {
    const OP: &str = "section_norms";
    if !(tol > 0.0) {
        return Err(invalid(OP, "tolerance must be positive"));
    }
    let u = metric.potential();
    // Surface derivative errors before entering the quadrature loop.
    metric.volume_density(OP, 0.5)?;
    try_map_range(mode, m as usize + 1, |j| {
        let j = j as u32;
        let f = |x: f64| {
            let v = metric.volume_density(OP, x).unwrap_or(f64::NAN);
            log_pointwise(m, j, x, u.eval(x)).exp() * v
        };
        let q = integrate(OP, f, 0.0, 1.0, QuadOptions::rel(tol))?;
        if !(q.value > 0.0) {
            return Err(Error::PositivityViolation {
                op: OP,
                what: "section norm",
                value: q.value,
                s: f64::NAN,
            });
        }
        Ok(q.value)
    })
}

/// `Π_m(x) = Σ_j |z^j|²_{h^m}/N_j`, summed in log space.
pub(crate) fn density_at_x(metric: &RadialMetric, m: u32, norms: &[f64], x: f64) -> f64 {
    let u = metric.potential().eval(x);
    norms
        .iter()
        .enumerate()
        .map(|(j, n)| (log_pointwise(m, j as u32, x, u) - n.ln()).exp())
        .sum()
}

/// Density on a grid of `s = |z|²` values, with the default execution mode
/// and relative quadrature tolerance `10⁻¹²`.
pub fn bergman_density(metric: &RadialMetric, m: u32, grid: &[f64]) -> Result<DensityResult> {
    bergman_density_with(metric, m, grid, 1e-12, Execution::default())
}

pub fn bergman_density_with(
    metric: &RadialMetric,
    m: u32,
    grid: &[f64],
    tol: f64,
    mode: Execution,
) -> Result<DensityResult> {
    if let Some(&s) = grid.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
        return Err(invalid(
            "bergman_density",
            format!("grid points must be finite and nonnegative, got {s}"),
        ));
    }
    let norms = section_norms_with(metric, m, tol, mode)?;
    let values = try_map_range(mode, grid.len(), |i| {
        Ok::<_, Error>(density_at_x(metric, m, &norms, x_of_s(grid[i])))
    })?;
    Ok(DensityResult {
        m,
        grid: grid.to_vec(),
        values,
        norms,
    })
}

/// Densities for several tensor powers, parallel over `m`.
pub fn density_sweep(
    metric: &RadialMetric,
    ms: &[u32],
    grid: &[f64],
    tol: f64,
    mode: Execution,
) -> Result<Vec<DensityResult>> {
    // Nested parallelism is left to the outer loop.
    try_map_range(mode, ms.len(), |i| {
        bergman_density_with(metric, ms[i], grid, tol, Execution::Sequential)
    })
}

/// Density of `h·e^{tφ}`, whose Kähler form is `ω - t·dd^cφ`.
pub fn density_with_potential(
    metric: &RadialMetric,
    phi: &RadialFunction,
    t: f64,
    m: u32,
    grid: &[f64],
) -> Result<DensityResult> {
    if !t.is_finite() {
        return Err(invalid("density_with_potential", "t must be finite"));
    }
    let perturbed = metric.perturbed(phi, t)?;
    bergman_density(&perturbed, m, grid)
}

impl DensityResult {
    /// Grid in `x = 1/(1+s)`.
    pub fn grid_x(&self) -> Vec<f64> {
        self.grid.iter().map(|&s| x_of_s(s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_comb::factorial;
    use num_traits::ToPrimitive;

    fn beta(m: u32, j: u32) -> f64 {
        let num = factorial(j as u64) * factorial((m - j) as u64);
        let r = crate::exact_comb::Rational::new(num, factorial(m as u64 + 1));
        r.to_f64().unwrap()
    }

    #[test]
    fn fs_norms_examples() {
        let fs = RadialMetric::fubini_study();
        let n = section_norms(&fs, 2, 1e-12).unwrap();
        for (a, b) in n.iter().zip([1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((section_norms(&fs, 0, 1e-12).unwrap()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fs_norms_match_beta_up_to_30() {
        let fs = RadialMetric::fubini_study();
        for m in [5u32, 17, 30] {
            let n = section_norms(&fs, m, 1e-12).unwrap();
            for j in 0..=m {
                let b = beta(m, j);
                assert!(((n[j as usize] - b) / b).abs() < 1e-10, "m={m} j={j}");
            }
        }
    }

    #[test]
    fn fs_density_is_m_plus_one() {
        let fs = RadialMetric::fubini_study();
        let grid = [0.0, 0.3, 1.0, 7.5, 1e3];
        for m in [0u32, 3, 12] {
            let d = bergman_density(&fs, m, &grid).unwrap();
            for v in &d.values {
                assert!((v - (m as f64 + 1.0)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn modes_agree() {
        let metric = RadialMetric::new(RadialFunction::rational_bump(0.3)).unwrap();
        let grid = [0.0, 0.5, 2.0];
        let a = bergman_density_with(&metric, 9, &grid, 1e-12, Execution::Sequential).unwrap();
        let b = bergman_density_with(&metric, 9, &grid, 1e-12, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scaling_invariance() {
        let u = RadialFunction::eigen_bump(0.1);
        let a = RadialMetric::new(u.clone()).unwrap();
        let b = RadialMetric::new(u.add_scaled(&RadialFunction::constant(1.0), 0.7)).unwrap();
        let grid = [0.0, 0.4, 3.0, 50.0];
        let da = bergman_density(&a, 11, &grid).unwrap();
        let db = bergman_density(&b, 11, &grid).unwrap();
        for (x, y) in da.values.iter().zip(&db.values) {
            assert!((x - y).abs() < 1e-12 * x.abs());
        }
    }

    #[test]
    fn chart_independence() {
        let u = RadialFunction::phi1_polynomial(vec![0.05, 0.1, -0.2, 0.08]);
        let a = RadialMetric::new(u).unwrap();
        let b = a.reflected();
        let grid = [0.0, 0.2, 1.0, 4.0, 30.0];
        let inv: Vec<f64> = grid
            .iter()
            .map(|&s: &f64| if s == 0.0 { 1e300 } else { 1.0 / s })
            .collect();
        let da = bergman_density(&a, 8, &grid).unwrap();
        let db = bergman_density(&b, 8, &inv).unwrap();
        for (x, y) in da.values.iter().zip(&db.values) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }

    #[test]
    fn constant_potential_leaves_density_unchanged() {
        let fs = RadialMetric::fubini_study();
        let d = density_with_potential(&fs, &RadialFunction::constant(2.0), 0.3, 6, &[0.0, 1.0])
            .unwrap();
        for v in &d.values {
            assert!((v - 7.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_grid() {
        let fs = RadialMetric::fubini_study();
        assert!(bergman_density(&fs, 2, &[-1.0]).is_err());
        assert!(bergman_density(&fs, 2, &[f64::NAN]).is_err());
    }

    #[test]
    fn perturbed_density_follows_expansion() {
        let metric = RadialMetric::new(RadialFunction::eigen_bump(0.1)).unwrap();
        for s in [0.0, 1.0, 5.0] {
            let c = crate::cp1_bergman::scalar_curvature(&metric, s).unwrap();
            let d = bergman_density(&metric, 20, &[s]).unwrap().values[0];
            let model = 20.0 + c.a1 + c.a2 / 20.0;
            assert!((d - model).abs() < 1e-2, "s={s}: {d} vs {model}");
        }
    }
}
