//! Centering a Kähler potential with respect to the automorphism group.
//!
//! For `A` traceless Hermitian, `f_A(Z) = e^A Z` pulls `ω₀` back to
//! `ω₀ + dd^c ρ_A` with `ρ_A = log(|e^A Z|²/|Z|²)`. The centering integrals
//! `∫(ρ_A + f_A^*φ) f_A^*θᵢ ω_{ρ_A}ⁿ` become, after the change of variables
//! `y = f_A(x)`, `rᵢ(A) = ∫(φ - ρ_{-A}) θᵢ ω₀ⁿ`. The solver iterates
//! `T(A) = A - ½ L⁻¹ r(A)` from `A = 0`, where `L` maps `A` to the
//! coordinates of `Z*AZ/|Z|²` in the orthonormal first-eigenspace basis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::cpn_geometry::{
    first_eigenbasis, hermitian_form, hermitian_inner_product, EigenBasisFunction,
};
use crate::error::invalid;
use crate::exec::Execution;
use crate::quadrature::SphereRule;
use crate::{Error, Result};

/// Tolerance for accepting a matrix as Hermitian and traceless.
const STRUCTURE_TOL: f64 = 1e-12;

/// An element of 𝔭, the traceless Hermitian `(n+1)×(n+1)` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct TracelessHermitian {
    m: DMatrix<Complex64>,
}

impl TracelessHermitian {
    pub fn zero(n: u32) -> Self {
        let d = n as usize + 1;
        TracelessHermitian {
            m: DMatrix::zeros(d, d),
        }
    }

    /// Accepts `m` if it is Hermitian and traceless to `10⁻¹²`, then
    /// projects it exactly.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        const OP: &str = "TracelessHermitian::new";
        if m.nrows() != m.ncols() || m.nrows() < 2 {
            return Err(invalid(OP, "matrix must be square of size at least 2"));
        }
        let skew = (&m - m.adjoint()).norm();
        let tr = m.trace().norm();
        if skew > STRUCTURE_TOL * (1.0 + m.norm()) || tr > STRUCTURE_TOL * (1.0 + m.norm()) {
            return Err(invalid(
                OP,
                format!("not traceless Hermitian (skew {skew:e}, trace {tr:e})"),
            ));
        }
        Ok(Self::project(m))
    }

    /// Nearest traceless Hermitian matrix: `(M + M*)/2 - tr/(n+1)·I`.
    pub fn project(m: DMatrix<Complex64>) -> Self {
        let d = m.nrows();
        let mut h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let shift = h.trace().re / d as f64;
        for i in 0..d {
            h[(i, i)] = Complex64::new(h[(i, i)].re - shift, 0.0);
        }
        TracelessHermitian { m: h }
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let d = entries.len();
        let m = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(entries[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(m)
    }

    /// From coordinates in [`p_basis`].
    pub fn from_coords(n: u32, coords: &[f64]) -> Result<Self> {
        let basis = p_basis(n);
        if coords.len() != basis.len() {
            return Err(invalid(
                "TracelessHermitian::from_coords",
                format!("expected {} coordinates, got {}", basis.len(), coords.len()),
            ));
        }
        let d = n as usize + 1;
        let mut m = DMatrix::zeros(d, d);
        for (c, b) in coords.iter().zip(&basis) {
            m += b * Complex64::new(*c, 0.0);
        }
        Ok(Self::project(m))
    }

    /// Coordinates in the Frobenius-orthonormal [`p_basis`].
    pub fn coords(&self) -> Vec<f64> {
        p_basis(self.n())
            .iter()
            .map(|b| (b.adjoint() * &self.m).trace().re)
            .collect()
    }

    pub fn n(&self) -> u32 {
        self.m.nrows() as u32 - 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        TracelessHermitian {
            m: &self.m * Complex64::new(c, 0.0),
        }
    }

    /// `exp(A)` by Hermitian eigendecomposition.
    pub fn exp(&self) -> DMatrix<Complex64> {
        let eig = self.m.clone().symmetric_eigen();
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.exp(), 0.0)));
        &eig.eigenvectors * d * eig.eigenvectors.adjoint()
    }
}

/// A Frobenius-orthonormal basis of 𝔭: for `i < j` the matrices
/// `(Eᵢⱼ + Eⱼᵢ)/√2` and `i(Eᵢⱼ - Eⱼᵢ)/√2`, then the diagonal directions
/// `Eᵢᵢ - E₀₀` orthonormalized. The order matches
/// [`first_eigenbasis`](crate::cpn_geometry::first_eigenbasis).
pub fn p_basis(n: u32) -> Vec<DMatrix<Complex64>> {
    let d = n as usize + 1;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out: Vec<DMatrix<Complex64>> = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            let mut s = DMatrix::zeros(d, d);
            s[(i, j)] = Complex64::new(r, 0.0);
            s[(j, i)] = Complex64::new(r, 0.0);
            out.push(s);
            let mut a = DMatrix::zeros(d, d);
            a[(i, j)] = Complex64::new(0.0, r);
            a[(j, i)] = Complex64::new(0.0, -r);
            out.push(a);
        }
    }
    let start = out.len();
    for i in 1..d {
        let mut h = DMatrix::zeros(d, d);
        h[(i, i)] = Complex64::new(1.0, 0.0);
        h[(0, 0)] = Complex64::new(-1.0, 0.0);
        for prev in &out[start..] {
            let c = (prev.adjoint() * &h).trace().re;
            h -= prev * Complex64::new(c, 0.0);
        }
        let norm = h.norm();
        out.push(h / Complex64::new(norm, 0.0));
    }
    out
}

/// `ρ_A` at the chart point `[1, z₁, …, zₙ]`.
pub fn rho_potential(a: &TracelessHermitian, z: &[Complex64]) -> Result<f64> {
    if z.len() != a.n() as usize {
        return Err(invalid(
            "rho_potential",
            "chart point has the wrong dimension",
        ));
    }
    let mut h = Vec::with_capacity(z.len() + 1);
    h.push(Complex64::new(1.0, 0.0));
    h.extend_from_slice(z);
    Ok(rho_homogeneous(&a.exp(), &h))
}

/// `log(|EZ|²/|Z|²)` for a precomputed `E = exp(A)`.
pub fn rho_homogeneous(exp_a: &DMatrix<Complex64>, z: &[Complex64]) -> f64 {
    let zv = DVector::from_column_slice(z);
    ((exp_a * &zv).norm_squared() / zv.norm_squared()).ln()
}

/// The matrix of `L` and its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct LMap {
    pub matrix: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub condition: f64,
}

/// `L` from the closed-form fourth moments: entry `(i, k)` is
/// `∫ (Z*B_kZ/|Z|²) θᵢ ω₀ⁿ` for the [`p_basis`] element `B_k`.
pub fn build_l(n: u32) -> Result<LMap> {
    const OP: &str = "build_L";
    if n == 0 {
        return Err(invalid(OP, "n must be at least 1"));
    }
    let theta = first_eigenbasis(n)?;
    let basis = p_basis(n);
    let s = basis.len();
    let matrix = DMatrix::from_fn(s, s, |i, k| {
        hermitian_inner_product(&basis[k], &theta[i].hermitian)
    });
    let sv = matrix.singular_values();
    let condition = sv.max() / sv.min();
    if !(sv.min() > 1e-12 * sv.max()) {
        return Err(Error::Singular { op: OP });
    }
    let inverse = matrix
        .clone()
        .try_inverse()
        .ok_or(Error::Singular { op: OP })?;
    Ok(LMap {
        matrix,
        inverse,
        condition,
    })
}

/// Quadrature and iteration settings for [`center`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenteringOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Factor in front of `L⁻¹`; the contraction argument uses ½.
    pub damping: f64,
    /// Gauss–Legendre nodes in `t = |Z₁|²/|Z|²`.
    pub radial: usize,
    /// Trapezoid nodes in the phase.
    pub angular: usize,
    /// Consecutive growing steps that count as divergence.
    pub divergence_streak: usize,
    pub mode: Execution,
}

impl Default for CenteringOptions {
    fn default() -> Self {
        CenteringOptions {
            tol: 1e-10,
            max_iter: 50,
            damping: 0.5,
            radial: 48,
            angular: 48,
            divergence_streak: 5,
            mode: Execution::default(),
        }
    }
}

/// A potential on CPⁿ, evaluated at unit homogeneous coordinates.
pub trait Potential: Sync {
    fn eval(&self, z: &[Complex64]) -> f64;
}

impl<F: Fn(&[Complex64]) -> f64 + Sync> Potential for F {
    fn eval(&self, z: &[Complex64]) -> f64 {
        self(z)
    }
}

/// Precomputed pieces shared by every step.
pub struct Centerer<'a> {
    phi: &'a dyn Potential,
    theta: Vec<EigenBasisFunction>,
    l: LMap,
    rule: SphereRule,
    opts: CenteringOptions,
}

impl<'a> Centerer<'a> {
    pub fn new(n: u32, phi: &'a dyn Potential, opts: CenteringOptions) -> Result<Self> {
        if n != 1 {
            return Err(Error::UnsupportedDimension { op: "center", n });
        }
        if !(opts.tol > 0.0) || !(opts.damping > 0.0) || opts.radial == 0 || opts.angular == 0 {
            return Err(invalid(
                "center",
                "tolerance, damping and rule sizes must be positive",
            ));
        }
        Ok(Centerer {
            phi,
            theta: first_eigenbasis(n)?,
            l: build_l(n)?,
            rule: SphereRule::new(opts.radial, opts.angular),
            opts,
        })
    }

    pub fn l_map(&self) -> &LMap {
        &self.l
    }

    /// `rᵢ(A) = ∫(φ - ρ_{-A}) θᵢ ω₀`.
    pub fn residual(&self, a: &TracelessHermitian) -> Vec<f64> {
        let e = a.scaled(-1.0).exp();
        let gauge = !a.is_zero();
        self.rule
            .integrate_vec(self.opts.mode, self.theta.len(), |z| {
                let mut f = self.phi.eval(z);
                if gauge {
                    f -= rho_homogeneous(&e, z);
                }
                // Unit vectors, so θ is just the Hermitian form.
                self.theta
                    .iter()
                    .map(|t| f * hermitian_form(&t.hermitian, z))
                    .collect()
            })
    }

    /// `T(A) = A - damping·L⁻¹ r(A)`, re-projected onto 𝔭.
    pub fn step(&self, a: &TracelessHermitian) -> TracelessHermitian {
        self.step_with_residual(a, &self.residual(a))
    }

    fn step_with_residual(&self, a: &TracelessHermitian, r: &[f64]) -> TracelessHermitian {
        let delta = &self.l.inverse * DVector::from_column_slice(r);
        let coords: Vec<f64> = a
            .coords()
            .iter()
            .zip(delta.iter())
            .map(|(c, d)| c - self.opts.damping * d)
            .collect();
        TracelessHermitian::from_coords(a.n(), &coords).expect("coordinate count matches")
    }
}

/// `T(A, φ)` for a single step.
pub fn t_step(
    a: &TracelessHermitian,
    phi: &dyn Potential,
    opts: CenteringOptions,
) -> Result<TracelessHermitian> {
    Ok(Centerer::new(a.n(), phi, opts)?.step(a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub step_norm: f64,
    pub residual_norm: f64,
    pub a_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenteringState {
    pub iteration: usize,
    pub a: TracelessHermitian,
    pub residual: Vec<f64>,
    pub step_norm: f64,
    pub trace: Vec<TraceRow>,
}

impl CenteringState {
    pub fn residual_norm(&self) -> f64 {
        self.residual.iter().map(|r| r * r).sum::<f64>().sqrt()
    }

    /// Ratios of consecutive step norms, from the second step on.
    pub fn contraction_factors(&self) -> Vec<f64> {
        self.trace
            .windows(2)
            .skip(1)
            .filter(|w| w[0].step_norm > 0.0)
            .map(|w| w[1].step_norm / w[0].step_norm)
            .collect()
    }
}

/// Iterates `A ← T(A)` from `A = 0` until both the residual norm and the
/// step norm are below `opts.tol`.
pub fn center(n: u32, phi: &dyn Potential, opts: CenteringOptions) -> Result<CenteringState> {
    let c = Centerer::new(n, phi, opts)?;
    let mut a = TracelessHermitian::zero(n);
    let mut r = c.residual(&a);
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut trace = vec![TraceRow {
        iteration: 0,
        step_norm: 0.0,
        residual_norm: norm(&r),
        a_norm: 0.0,
    }];
    if norm(&r) < opts.tol {
        return Ok(CenteringState {
            iteration: 0,
            a,
            residual: r,
            step_norm: 0.0,
            trace,
        });
    }
    let mut streak = 0;
    let mut last_step = f64::INFINITY;
    for k in 1..=opts.max_iter {
        let next = c.step_with_residual(&a, &r);
        let step = (next.matrix() - a.matrix()).norm();
        a = next;
        r = c.residual(&a);
        trace.push(TraceRow {
            iteration: k,
            step_norm: step,
            residual_norm: norm(&r),
            a_norm: a.norm(),
        });
        if !step.is_finite() {
            return Err(Error::Divergence {
                streak,
                last_step: step,
            });
        }
        if norm(&r) < opts.tol && step < opts.tol {
            return Ok(CenteringState {
                iteration: k,
                a,
                residual: r,
                step_norm: step,
                trace,
            });
        }
        streak = if step > last_step { streak + 1 } else { 0 };
        if streak >= opts.divergence_streak {
            return Err(Error::Divergence {
                streak,
                last_step: step,
            });
        }
        last_step = step;
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        last_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rho_examples() {
        let a = 0.3;
        let m = TracelessHermitian::diagonal(&[a, -a]).unwrap();
        assert_eq!(
            rho_potential(&TracelessHermitian::zero(1), &[c(0.7)]).unwrap(),
            0.0
        );
        assert!((rho_potential(&m, &[c(0.0)]).unwrap() - 2.0 * a).abs() < 1e-14);
        let eq = rho_potential(&m, &[Complex64::from_polar(1.0, 0.4)]).unwrap();
        let expect = (((2.0 * a).exp() + (-2.0 * a).exp()) / 2.0).ln();
        assert!((eq - expect).abs() < 1e-14);
    }

    #[test]
    fn structure_is_enforced() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0);
        assert!(TracelessHermitian::new(m).is_err());
        assert!(TracelessHermitian::diagonal(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn exp_matches_series() {
        let a = TracelessHermitian::from_coords(1, &[0.2, -0.1, 0.3]).unwrap();
        let mut term = DMatrix::<Complex64>::identity(2, 2);
        let mut sum = term.clone();
        for k in 1..30 {
            term = &term * a.matrix() / c(k as f64);
            sum += &term;
        }
        assert!((a.exp() - sum).norm() < 1e-14);
    }

    #[test]
    fn l_is_invertible_and_matches_quadrature() {
        let l = build_l(1).unwrap();
        assert_eq!(l.matrix.nrows(), 3);
        assert!(l.condition.is_finite() && l.condition < 10.0);
        let theta = first_eigenbasis(1).unwrap();
        let basis = p_basis(1);
        let rule = SphereRule::new(20, 20);
        for i in 0..3 {
            for k in 0..3 {
                let q = rule.integrate(Execution::Sequential, |z| {
                    hermitian_form(&basis[k], z) * theta[i].eval(z)
                });
                assert!((q - l.matrix[(i, k)]).abs() < 1e-13);
            }
        }
        // diag(1,-1)/√2 maps onto the diagonal θ alone.
        let a = TracelessHermitian::diagonal(&[1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt()]).unwrap();
        let y = &l.matrix * DVector::from_vec(a.coords());
        assert!(y[0].abs() < 1e-15 && y[1].abs() < 1e-15 && y[2].abs() > 0.1);
        assert!(build_l(2).unwrap().condition < 10.0);
    }

    #[test]
    fn zero_potential_is_fixed() {
        let zero = |_: &[Complex64]| 0.0;
        let s = center(1, &zero, CenteringOptions::default()).unwrap();
        assert_eq!(s.iteration, 0);
        assert!(s.a.is_zero());
        let t = t_step(
            &TracelessHermitian::zero(1),
            &zero,
            CenteringOptions::default(),
        )
        .unwrap();
        assert!(t.is_zero());
    }

    #[test]
    fn pure_gauge_is_undone() {
        let b = TracelessHermitian::from_coords(1, &[0.02, -0.03, 0.025]).unwrap();
        let eb = b.exp();
        let phi = move |z: &[Complex64]| rho_homogeneous(&eb, z);
        let s = center(1, &phi, CenteringOptions::default()).unwrap();
        assert!((s.a.matrix() + b.matrix()).norm() < 1e-9, "{:?}", s.a);
        assert!(s.residual_norm() < 1e-10);
    }

    #[test]
    fn diagonal_theta_potential() {
        let theta = first_eigenbasis(1).unwrap().remove(2);
        let phi = move |z: &[Complex64]| 0.05 * theta.eval(z);
        let s = center(1, &phi, CenteringOptions::default()).unwrap();
        assert!(s.residual_norm() < 1e-8);
        assert!(s.a.norm() <= 0.1);
        assert!(!s.contraction_factors().is_empty());
        for f in s.contraction_factors() {
            assert!(f <= 0.5, "{f}");
        }
    }

    #[test]
    fn contraction_on_sampled_pairs() {
        let phi = |z: &[Complex64]| 0.05 * (z[0].norm_sqr() - 0.5) + 0.03 * (z[0] * z[1].conj()).im;
        let c = Centerer::new(1, &phi, CenteringOptions::default()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut draw = || {
                let v: Vec<f64> = (0..3).map(|_| rng.random_range(-0.1..0.1)).collect();
                TracelessHermitian::from_coords(1, &v).unwrap()
            };
            let (a, b) = (draw(), draw());
            let d = (c.step(&b).matrix() - c.step(&a).matrix()).norm();
            assert!(d <= 0.5 * (b.matrix() - a.matrix()).norm());
        }
    }

    #[test]
    fn small_potentials_give_small_first_steps() {
        let theta = first_eigenbasis(1).unwrap().remove(0);
        let mut prev = f64::INFINITY;
        for eps in [0.1, 0.01, 0.001] {
            let th = theta.clone();
            let phi = move |z: &[Complex64]| eps * th.eval(z);
            let t0 = t_step(
                &TracelessHermitian::zero(1),
                &phi,
                CenteringOptions::default(),
            )
            .unwrap();
            assert!(t0.norm() < prev);
            // θ has C⁰ norm at most √3, so ‖T(0)‖/‖φ‖ stays bounded.
            assert!(t0.norm() <= 2.0 * eps * 3f64.sqrt());
            prev = t0.norm();
        }
    }

    #[test]
    fn higher_dimensions_are_rejected() {
        let zero = |_: &[Complex64]| 0.0;
        assert!(matches!(
            center(2, &zero, CenteringOptions::default()),
            Err(Error::UnsupportedDimension { n: 2, .. })
        ));
    }

    #[test]
    fn large_potential_reports_failure() {
        let phi = |z: &[Complex64]| 40.0 * (z[0].norm_sqr() - 0.5);
        let opts = CenteringOptions {
            max_iter: 8,
            ..Default::default()
        };
        let e = center(1, &phi, opts).unwrap_err();
        assert!(e.is_non_convergence(), "{e}");
    }
}
