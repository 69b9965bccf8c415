//! Closed-form Fubini–Study facts on CPⁿ.
//!
//! Conventions: the Kähler form is `ω₀ = (i/2π)∂∂̄ log(1+|z|²)`, so CPⁿ has
//! unit volume, and the Laplacian is
//! `Δ = (1+|z|²)(δᵢⱼ + zᵢz̄ⱼ)∂²/∂zᵢ∂z̄ⱼ`, whose first nonzero eigenvalue is
//! `-(n+1)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::invalid;
use crate::exact_comb::{factorial, polynomiality_criterion, InverseMSeries, MultiIndex, Rational};
use crate::quadrature::{integrate_half_line, QuadOptions};
use crate::{Error, Result};

/// `(m+n)!/m!`, the constant Bergman density of the Fubini–Study metric at
/// level `m` under the unit-volume normalization.
pub fn fs_density_exact(n: u32, m: u64) -> Rational {
    Rational::new(factorial(m + n as u64), factorial(m))
}

/// Radial Fubini–Study Laplacian of `f(s)`, `s = |z|²`, from `f'(s)` and
/// `f''(s)`: `Δf = (1+s)[s(1+s)f'' + (n+s)f']`.
pub fn radial_laplacian(n: u32, s: f64, d1: f64, d2: f64) -> f64 {
    (1.0 + s) * (s * (1.0 + s) * d2 + (n as f64 + s) * d1)
}

/// The radial function `φ_k = (1+|z|²)^{-k}` on CPⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhiK {
    pub n: u32,
    pub k: u32,
}

impl PhiK {
    pub fn new(n: u32, k: u32) -> Self {
        PhiK { n, k }
    }

    pub fn eval(&self, s: f64) -> f64 {
        (1.0 + s).powi(-(self.k as i32))
    }

    /// `Δφ_k(s)` from the symbolic derivatives of `(1+s)^{-k}`.
    pub fn laplacian(&self, s: f64) -> f64 {
        let k = self.k as f64;
        let d1 = -k * (1.0 + s).powi(-(self.k as i32) - 1);
        let d2 = k * (k + 1.0) * (1.0 + s).powi(-(self.k as i32) - 2);
        radial_laplacian(self.n, s, d1, d2)
    }

    /// `-k(k+n)φ_k + k²φ_{k-1}`.
    pub fn recursion_rhs(&self, s: f64) -> f64 {
        let k = self.k as f64;
        let prev = PhiK::new(self.n, self.k.saturating_sub(1));
        -k * (k + self.n as f64) * self.eval(s) + k * k * prev.eval(s)
    }
}

/// `Δφ_k(s) - (-k(k+n)φ_k(s) + k²φ_{k-1}(s))`.
pub fn phi_k_laplacian_residual(n: u32, k: u32, s: f64) -> Result<f64> {
    if k == 0 {
        return Err(invalid("phi_k_laplacian_residual", "k must be at least 1"));
    }
    if !(s >= 0.0) {
        return Err(invalid("phi_k_laplacian_residual", "s must be nonnegative"));
    }
    let phi = PhiK::new(n, k);
    Ok(phi.laplacian(s) - phi.recursion_rhs(s))
}

/// `k²/(k(k+n) - λ)`, the ratio `∫φφ_k / ∫φφ_{k-1}` for an eigenfunction
/// `Δφ = -λφ`.
pub fn pairing_step(n: u32, lambda: &Rational, k: u32) -> Result<Rational> {
    if k == 0 {
        return Err(invalid("pairing_step", "k must be at least 1"));
    }
    let kk = k as i64;
    let denom = Rational::from_integer((kk * (kk + n as i64)).into()) - lambda;
    if denom.is_zero() {
        return Err(Error::Pole {
            n,
            k,
            lambda: crate::exact_comb::format_rational(lambda),
        });
    }
    Ok(Rational::from_integer((kk * kk).into()) / denom)
}

/// `∫φφ_m / ∫φφ_{k₀}` for `λ = k₀(k₀+n)`, by multiplying pairing steps.
pub fn pairing_telescoped(n: u32, k0: u32, m: u32) -> Result<Rational> {
    let lambda = Rational::from_integer(((k0 * (k0 + n)) as i64).into());
    ((k0 + 1)..=m).try_fold(Rational::one(), |acc, k| {
        Ok(acc * pairing_step(n, &lambda, k)?)
    })
}

/// Closed form `((m!)²/(k₀!)²) / ((m-k₀)!(m+k₀+n)!/(2k₀+n)!)` of the
/// telescoped pairing ratio.
pub fn pairing_closed_form(n: u32, k0: u32, m: u32) -> Rational {
    let (n, k0, m) = (n as u64, k0 as u64, m as u64);
    let num = factorial(m).pow(2u32) * factorial(2 * k0 + n);
    let den = factorial(k0).pow(2u32) * factorial(m - k0) * factorial(m + k0 + n);
    Rational::new(num, den)
}

/// Expansion in `1/m`, normalized to leading coefficient one, of
/// `(m+n)···(m-k₀+1)(m+k₀(k₀+n)) / ((m+k₀+n)···(m+n+1))`.
pub fn sigma_prime_closed_form(n: u32, k0: u32, order: u32) -> Result<InverseMSeries> {
    if order == 0 {
        return Err(invalid("sigma_prime_closed_form", "J must be at least 1"));
    }
    let c = polynomiality_criterion(n, k0)?;
    let j = order as usize;
    let num = InverseMSeries::from_polynomial(&c.numerator, j);
    let den = InverseMSeries::from_polynomial(&c.denominator, j);
    (&num * &den.reciprocal()?).truncate(j).normalized()
}

/// `∫_{ℂⁿ} |z^P|² (1+|z|²)^{-(m+n+1)} d²ⁿz` by nested adaptive quadrature
/// in `sᵢ = |zᵢ|²`; the closed form is `πⁿ P!(m-|P|)!/(m+n)!`.
pub fn monomial_integral_quadrature(p: &MultiIndex, m: u32, tol: f64) -> Result<f64> {
    const OP: &str = "monomial_integral_quadrature";
    let n = p.dim();
    if n == 0 || n > 3 {
        return Err(Error::UnsupportedDimension {
            op: OP,
            n: n as u32,
        });
    }
    if p.degree() > m as u64 {
        return Err(Error::DegreeExceedsPower {
            op: OP,
            degree: p.degree(),
            m: m as u64,
        });
    }
    let exponent = (m as usize + n + 1) as i32;
    let inner = QuadOptions::rel(tol * 1e-2);
    fn nested(exps: &[u32], c: f64, exponent: i32, opts: QuadOptions) -> Result<f64> {
        match exps.split_first() {
            None => Ok(c.powi(-exponent)),
            Some((&e, rest)) => {
                let cell = std::cell::Cell::new(None);
                let q = integrate_half_line(
                    "monomial_integral_quadrature",
                    |s| match nested(rest, c + s, exponent, opts) {
                        Ok(v) => s.powi(e as i32) * v,
                        Err(err) => {
                            cell.set(Some(err));
                            f64::NAN
                        }
                    },
                    opts,
                )?;
                match cell.into_inner() {
                    Some(err) => Err(err),
                    None => Ok(q.value),
                }
            }
        }
    }
    let (first, rest) = p.exponents().split_first().expect("n >= 1");
    let q = integrate_half_line(
        OP,
        |s| {
            nested(rest, 1.0 + s, exponent, inner)
                .map(|v| s.powi(*first as i32) * v)
                .unwrap_or(f64::NAN)
        },
        QuadOptions::rel(tol),
    )?;
    if !q.value.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            op: OP,
            budget: inner.max_intervals,
            error: f64::NAN,
        });
    }
    Ok(std::f64::consts::PI.powi(n as i32) * q.value)
}

/// Fubini–Study density `Σ_P |z^P|²(1+|z|²)^{-m}/N_P` with the norms
/// `N_P = π⁻ⁿ∫|z^P|²(1+|z|²)^{-(m+n+1)}` taken from quadrature; `s` lists
/// `|zᵢ|²`.
pub fn fs_density_quadrature(m: u32, s: &[f64], tol: f64) -> Result<f64> {
    let n = s.len() as u32;
    let total: f64 = s.iter().sum();
    let mut acc = 0.0;
    for p in MultiIndex::up_to_degree(n as usize, m) {
        let norm = monomial_integral_quadrature(&p, m, tol)? / std::f64::consts::PI.powi(n as i32);
        let pointwise: f64 = p
            .exponents()
            .iter()
            .zip(s)
            .map(|(&e, &si)| si.powi(e as i32))
            .product::<f64>()
            * (1.0 + total).powi(-(m as i32));
        acc += pointwise / norm;
    }
    Ok(acc)
}

/// Which of the listed first-eigenspace functions a basis element started
/// from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenKind {
    /// `Re(Zᵢ Z̄ⱼ)/|Z|²`, `i < j`.
    RealPart(usize, usize),
    /// `Im(Zᵢ Z̄ⱼ)/|Z|²`, `i < j`.
    ImagPart(usize, usize),
    /// `(|Zᵢ|² - |Z₀|²)/|Z|²`, orthogonalized against earlier diagonals.
    Diagonal(usize),
}

/// An orthonormal first-eigenspace function `θ(Z) = Z*HZ / |Z|²` with `H`
/// Hermitian and traceless.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasisFunction {
    pub n: u32,
    pub kind: EigenKind,
    /// Squared L² norm of the unnormalized seed function.
    pub seed_norm_sq: f64,
    pub hermitian: DMatrix<Complex64>,
}

impl EigenBasisFunction {
    /// Value at homogeneous coordinates `Z` (any nonzero scaling).
    pub fn eval(&self, z: &[Complex64]) -> f64 {
        hermitian_form(&self.hermitian, z) / z.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Value at the affine chart point `[1, z₁, …, zₙ]`.
    pub fn eval_chart(&self, z: &[Complex64]) -> f64 {
        let mut h = Vec::with_capacity(z.len() + 1);
        h.push(Complex64::one());
        h.extend_from_slice(z);
        self.eval(&h)
    }
}

/// `Z*HZ` for Hermitian `H`, as a real number.
pub fn hermitian_form(h: &DMatrix<Complex64>, z: &[Complex64]) -> f64 {
    let mut acc = Complex64::zero();
    for a in 0..z.len() {
        for b in 0..z.len() {
            acc += z[a].conj() * h[(a, b)] * z[b];
        }
    }
    acc.re
}

/// `∫ (Z*HZ)(Z*GZ)/|Z|⁴ ω₀ⁿ = (tr H tr G + tr HG) / ((n+1)(n+2))`, the
/// fourth moment of the uniform measure on the unit sphere of `ℂⁿ⁺¹`.
pub fn hermitian_inner_product(h: &DMatrix<Complex64>, g: &DMatrix<Complex64>) -> f64 {
    let d = h.nrows() as f64;
    ((h.trace() * g.trace()).re + (h * g).trace().re) / (d * (d + 1.0))
}

fn seed(n: usize, kind: EigenKind) -> DMatrix<Complex64> {
    let d = n + 1;
    let mut h = DMatrix::<Complex64>::zeros(d, d);
    match kind {
        EigenKind::RealPart(i, j) => {
            h[(i, j)] = Complex64::new(0.5, 0.0);
            h[(j, i)] = Complex64::new(0.5, 0.0);
        }
        EigenKind::ImagPart(i, j) => {
            // Im(Zᵢ Z̄ⱼ) = (Z̄ⱼZᵢ - Z̄ᵢZⱼ)/2i
            h[(j, i)] = Complex64::new(0.0, -0.5);
            h[(i, j)] = Complex64::new(0.0, 0.5);
        }
        EigenKind::Diagonal(i) => {
            h[(i, i)] = Complex64::one();
            h[(0, 0)] = -Complex64::one();
        }
    }
    h
}

/// A real orthonormal basis of the first eigenspace, `(n+1)² - 1`
/// functions: real and imaginary parts of `ZᵢZ̄ⱼ/|Z|²` for `i < j`, then the
/// diagonal functions orthonormalized by Gram–Schmidt.
pub fn first_eigenbasis(n: u32) -> Result<Vec<EigenBasisFunction>> {
    if n == 0 {
        return Err(invalid("first_eigenbasis", "n must be at least 1"));
    }
    let nu = n as usize;
    let mut kinds = Vec::new();
    for i in 0..=nu {
        for j in (i + 1)..=nu {
            kinds.push(EigenKind::RealPart(i, j));
            kinds.push(EigenKind::ImagPart(i, j));
        }
    }
    kinds.extend((1..=nu).map(EigenKind::Diagonal));

    let mut out: Vec<EigenBasisFunction> = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let s = seed(nu, kind);
        let seed_norm_sq = hermitian_inner_product(&s, &s);
        let mut h = s;
        for prev in &out {
            let c = hermitian_inner_product(&h, &prev.hermitian);
            h -= &prev.hermitian * Complex64::new(c, 0.0);
        }
        let norm = hermitian_inner_product(&h, &h).sqrt();
        h /= Complex64::new(norm, 0.0);
        out.push(EigenBasisFunction {
            n,
            kind,
            seed_norm_sq,
            hermitian: h,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_comb::variation_series_eigen;
    use crate::exec::Execution;
    use crate::quadrature::SphereRule;
    use rand::{Rng, SeedableRng};

    fn rat(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn density_examples() {
        assert_eq!(fs_density_exact(1, 0), rat(1));
        assert_eq!(fs_density_exact(1, 3), rat(4));
        assert_eq!(fs_density_exact(2, 2), rat(12));
    }

    #[test]
    fn phi_k_residual_examples() {
        assert!(phi_k_laplacian_residual(1, 1, 1.0).unwrap().abs() < 1e-15);
        assert!((PhiK::new(1, 1).laplacian(1.0)).abs() < 1e-15);
        assert!((PhiK::new(1, 1).laplacian(0.0) + 1.0).abs() < 1e-15);
        for n in 1..=3 {
            let r = phi_k_laplacian_residual(n, 1, 1e6).unwrap();
            let scale = PhiK::new(n, 1).recursion_rhs(1e6).abs().max(1.0);
            assert!(r.abs() < 1e-6 * scale);
        }
        assert!(phi_k_laplacian_residual(1, 0, 1.0).is_err());
        assert!(phi_k_laplacian_residual(1, 1, -1.0).is_err());
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing_step(1, &rat(2), 2).unwrap(), rat(1));
        assert!(matches!(
            pairing_step(1, &rat(2), 1),
            Err(Error::Pole { .. })
        ));
        assert_eq!(
            pairing_step(2, &rat(3), 2).unwrap(),
            Rational::new(4.into(), 5.into())
        );
    }

    #[test]
    fn pairing_telescopes_to_closed_form() {
        for n in 1..=3 {
            for k0 in 1..=3 {
                for m in k0..=(k0 + 6) {
                    assert_eq!(
                        pairing_telescoped(n, k0, m).unwrap(),
                        pairing_closed_form(n, k0, m)
                    );
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let s = sigma_prime_closed_form(1, 1, 4).unwrap();
        assert_eq!(s.leading_power(), 2);
        let expect: Vec<Rational> = [1, 1, 0, 0, 0].iter().map(|&c| rat(c)).collect();
        assert_eq!(s.coeffs(), expect.as_slice());
        let s = sigma_prime_closed_form(1, 2, 4).unwrap();
        assert!(s.coeffs()[2..].iter().any(|c| !c.is_zero()));
        let s = sigma_prime_closed_form(2, 1, 3).unwrap();
        assert!(s.coeffs()[3..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn closed_form_matches_variation_series() {
        for n in 1..=2u32 {
            for k0 in 1..=3u32 {
                let j = n + 4;
                let lambda = rat((k0 * (k0 + n)) as i64);
                let v = variation_series_eigen(n, &lambda, j).unwrap();
                assert_eq!(v.normalized(), sigma_prime_closed_form(n, k0, j).unwrap());
            }
        }
    }

    #[test]
    fn basis_sizes_and_diagonal_norm() {
        assert_eq!(first_eigenbasis(1).unwrap().len(), 3);
        assert_eq!(first_eigenbasis(2).unwrap().len(), 8);
        let b = first_eigenbasis(1).unwrap();
        assert!((b[2].seed_norm_sq - 1.0 / 3.0).abs() < 1e-15);
        assert!(first_eigenbasis(0).is_err());
    }

    #[test]
    fn basis_is_orthonormal_by_quadrature() {
        let basis = first_eigenbasis(1).unwrap();
        let rule = SphereRule::new(24, 24);
        for a in &basis {
            for b in &basis {
                let g = rule.integrate(Execution::Parallel, |z| a.eval(z) * b.eval(z));
                let expect = if a.kind == b.kind { 1.0 } else { 0.0 };
                assert!((g - expect).abs() < 1e-12, "{:?} {:?}: {g}", a.kind, b.kind);
            }
        }
    }

    #[test]
    fn exact_gram_is_identity() {
        for n in 1..=3 {
            let basis = first_eigenbasis(n).unwrap();
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let g = hermitian_inner_product(&a.hermitian, &b.hermitian);
                    assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-13);
                }
                assert!(a.hermitian.trace().norm() < 1e-14);
            }
        }
    }

    /// Fubini–Study Laplacian by fourth-order central differences in real
    /// coordinates of the affine chart.
    fn fd_laplacian(f: &dyn Fn(&[Complex64]) -> f64, z: &[Complex64]) -> f64 {
        let n = z.len();
        let h = 2e-3;
        let stencil = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
        let unit = |imag: bool| {
            if imag {
                Complex64::i()
            } else {
                Complex64::one()
            }
        };
        let second = |i: usize, ii: bool, j: usize, ji: bool| {
            let mut acc = 0.0;
            for &(sa, wa) in &stencil {
                for &(sb, wb) in &stencil {
                    let mut w = z.to_vec();
                    w[i] += unit(ii) * (sa * h);
                    w[j] += unit(ji) * (sb * h);
                    acc += wa * wb * f(&w);
                }
            }
            acc / (144.0 * h * h)
        };
        let s: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        let mut acc = Complex64::zero();
        for i in 0..n {
            for j in 0..n {
                let dd = Complex64::new(
                    0.25 * (second(i, false, j, false) + second(i, true, j, true)),
                    0.25 * (second(i, false, j, true) - second(i, true, j, false)),
                );
                let g = if i == j {
                    Complex64::one()
                } else {
                    Complex64::zero()
                } + z[i] * z[j].conj();
                acc += g * dd;
            }
        }
        acc.re * (1.0 + s)
    }

    #[test]
    fn basis_functions_are_first_eigenfunctions() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..=2u32 {
            for theta in first_eigenbasis(n).unwrap() {
                for _ in 0..50 {
                    let z: Vec<Complex64> = (0..n)
                        .map(|_| {
                            Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5))
                        })
                        .collect();
                    let lap = fd_laplacian(&|w| theta.eval_chart(w), &z);
                    let r = lap + (n as f64 + 1.0) * theta.eval_chart(&z);
                    assert!(r.abs() < 1e-8, "n={n} {:?}: residual {r}", theta.kind);
                }
            }
        }
    }

    #[test]
    fn monomial_integrals_match_closed_form() {
        use crate::exact_comb::fs_monomial_integral;
        use num_traits::ToPrimitive;
        for n in 1..=2u32 {
            for m in [0u32, 3] {
                for p in MultiIndex::up_to_degree(n as usize, m) {
                    let q = monomial_integral_quadrature(&p, m, 1e-10).unwrap();
                    let exact = fs_monomial_integral(n, m as u64, &p)
                        .unwrap()
                        .to_f64()
                        .unwrap()
                        * std::f64::consts::PI.powi(n as i32);
                    assert!(((q - exact) / exact).abs() < 1e-8, "n={n} m={m} P={p}");
                }
            }
        }
        assert!(monomial_integral_quadrature(&MultiIndex::new(vec![3]), 2, 1e-10).is_err());
    }

    #[test]
    fn quadrature_density_is_constant() {
        for (m, s) in [(2u32, vec![0.4, 1.3]), (3, vec![0.0, 2.0])] {
            let d = fs_density_quadrature(m, &s, 1e-11).unwrap();
            let exact = ((m + 1) * (m + 2)) as f64;
            assert!((d - exact).abs() < 1e-8, "{d}");
        }
    }
}
