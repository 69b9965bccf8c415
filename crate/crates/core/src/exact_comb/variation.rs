//! First variation of the Fubini–Study Bergman density along an eigenfunction
//! direction, expanded in `1/m`, and the eigenvalue selection built on it.
//!
//! For `Δφ = -λφ` the variation at the base point is assembled from
//!
//! ```text
//! σ'(0)/φ(0) = -(1/n!)·((m+n)!/m!)²·(m+λ)·Σ_k δ_k(λ)/k! · (m-k)!/(m+n)!
//! ```
//!
//! where `δ_k(λ) = Δ_c^k φ(0)/φ(0)` comes from inverting the conversion
//! polynomials. This is the *raw* series. The *centered* series is the same
//! computation applied to `φ - φ(0)`, which is the true first variation of the
//! density (adding a constant to the potential does not move the density).
//! The two differ by the polynomial `m·(m+n)!/m!/n!`, so they agree at every
//! order past `n`.

use num_traits::{One, Zero};
use serde::Serialize;

use super::conversion::{conversion_polynomials, ConversionTable};
use super::polynomial::RationalPolynomial;
use super::rational::{factorial, format_rational, rat, Rational};
use super::series::InverseMSeries;
use crate::error::invalid;
use crate::Result;

/// `δ₀, …, δ_K` as polynomials in `λ`, where `Δ_c^l φ(0) = δ_l(λ)·φ(0)` for an
/// eigenfunction `Δφ = -λφ`. Solves the unit-triangular system
/// `(-λ)^k = Σ_l a_{k,l} δ_l`.
pub fn eigen_delta_c_values(n: u32, max_order: u32) -> Result<Vec<RationalPolynomial>> {
    let table = conversion_polynomials(n, max_order.max(1))?;
    Ok(delta_values_from(&table, max_order))
}

fn delta_values_from(table: &ConversionTable, max_order: u32) -> Vec<RationalPolynomial> {
    let minus_lambda = RationalPolynomial::from_i64(&[0, -1]);
    let mut deltas = vec![RationalPolynomial::constant(Rational::one())];
    let mut power = RationalPolynomial::constant(Rational::one());
    for k in 1..=max_order {
        power = &power * &minus_lambda;
        let mut d = power.clone();
        for (l, delta) in deltas.iter().enumerate().skip(1) {
            d = &d - &delta.scale(&table.coeff(k, l as u32));
        }
        deltas.push(d);
    }
    deltas
}

/// Raw and centered first-variation series, both with leading power `n+1`
/// and truncation order `J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariationSeries {
    pub n: u32,
    pub lambda: Rational,
    pub raw: InverseMSeries,
    pub centered: InverseMSeries,
}

impl VariationSeries {
    /// The raw series scaled to leading coefficient one.
    pub fn normalized(&self) -> InverseMSeries {
        self.raw
            .normalized()
            .expect("raw variation series has leading coefficient -1/n!")
    }

    /// The centered series written as `mⁿ(b₀ + b₁/m + …)`; its `m^{n+1}`
    /// coefficient is always zero.
    pub fn centered_expansion(&self) -> InverseMSeries {
        self.centered
            .with_leading_power(self.n as i64)
            .expect("centered variation has no m^(n+1) term")
    }

    /// Orders `j` in `(n, J]` of the raw series whose coefficient is nonzero.
    pub fn nonzero_orders_past_n(&self) -> Vec<usize> {
        ((self.n as usize + 1)..=self.raw.order())
            .filter(|&j| !self.raw.coeff(j).is_zero())
            .collect()
    }
}

/// `-((m+n)!/m!)²/n!` as an exact series of order `J`.
pub fn raw_prefactor(n: u32, order: usize) -> InverseMSeries {
    let rising = RationalPolynomial::from_shifts(1..=n as i64);
    let sq = &rising * &rising;
    InverseMSeries::from_polynomial(&sq, order)
        .scale(&-Rational::new(One::one(), factorial(n as u64)))
}

/// First-variation series at the base point for an eigenfunction with
/// eigenvalue `-λ`, to order `J`.
pub fn variation_series_eigen(n: u32, lambda: &Rational, order: u32) -> Result<VariationSeries> {
    if order == 0 {
        return Err(invalid("variation_series_eigen", "J must be at least 1"));
    }
    let table = conversion_polynomials(n.max(1), order)?;
    variation_with_table(&table, lambda, order)
}

fn variation_with_table(
    table: &ConversionTable,
    lambda: &Rational,
    order: u32,
) -> Result<VariationSeries> {
    let n = table.n();
    let j = order as usize;
    let deltas: Vec<Rational> = delta_values_from(table, order)
        .iter()
        .map(|d| d.eval(lambda))
        .collect();

    // Σ_k δ_k/k! · 1/((m+n)(m+n-1)···(m-k+1)), valid through m^(-n-J).
    let mut sum = InverseMSeries::zero(-(n as i64), j);
    let mut falling = InverseMSeries::one(j);
    for i in 1..=n as i64 {
        falling = &falling * &InverseMSeries::inverse_linear(&rat(i), j);
    }
    for (k, delta) in deltas.iter().enumerate() {
        if k > 0 {
            falling = &falling * &InverseMSeries::inverse_linear(&rat(1 - k as i64), j);
        }
        if delta.is_zero() {
            continue;
        }
        let w = delta / Rational::from_integer(factorial(k as u64));
        sum = &sum + &falling.scale(&w);
    }

    let linear = InverseMSeries::from_polynomial(&RationalPolynomial::linear(lambda.clone()), j);
    let raw = &(&raw_prefactor(n, j) * &linear) * &sum;
    let correction =
        InverseMSeries::from_polynomial(&RationalPolynomial::from_shifts(0..=n as i64), j)
            .scale(&Rational::new(One::one(), factorial(n as u64)));
    let centered = &raw + &correction;
    Ok(VariationSeries {
        n,
        lambda: lambda.clone(),
        raw: raw.truncate(j),
        centered: centered.truncate(j),
    })
}

/// Coefficient `b_j` of the centered variation `mⁿ(b₀ + b₁/m + …)` as an
/// exact polynomial in `λ`.
pub fn variation_order_polynomial(n: u32, j: u32) -> Result<RationalPolynomial> {
    let order = j + 1;
    let table = conversion_polynomials(n.max(1), order)?;
    // b_j involves δ_0..δ_{j+1} times (m+λ): degree at most j+2 in λ.
    let points = (0..(j as i64 + 4))
        .map(|l| {
            let lambda = rat(l);
            let s = variation_with_table(&table, &lambda, order)?;
            Ok((lambda, s.centered.coeff(j as usize + 1).clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (fit, check) = points.split_at(points.len() - 1);
    let poly = RationalPolynomial::interpolate(fit)?;
    debug_assert_eq!(poly.eval(&check[0].0), check[0].1);
    Ok(poly)
}

/// Outcome of dividing the closed-form variation numerator by its
/// denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Criterion {
    pub n: u32,
    pub k0: u32,
    pub is_polynomial: bool,
    pub numerator: RationalPolynomial,
    pub denominator: RationalPolynomial,
    pub quotient: RationalPolynomial,
    pub remainder: RationalPolynomial,
}

#[derive(Serialize)]
struct CriterionWire {
    n: u32,
    k0: u32,
    is_polynomial: bool,
    quotient: Vec<String>,
    remainder: Vec<String>,
}

impl Serialize for Criterion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = |p: &RationalPolynomial| p.coeffs().iter().map(format_rational).collect();
        CriterionWire {
            n: self.n,
            k0: self.k0,
            is_polynomial: self.is_polynomial,
            quotient: coeffs(&self.quotient),
            remainder: coeffs(&self.remainder),
        }
        .serialize(s)
    }
}

/// Divides `(m+n)(m+n-1)···(m-k₀+1)·(m+k₀(k₀+n))` by
/// `(m+k₀+n)···(m+n+1)` exactly.
pub fn polynomiality_criterion(n: u32, k0: u32) -> Result<Criterion> {
    if k0 == 0 {
        return Err(invalid("polynomiality_criterion", "k0 must be at least 1"));
    }
    let (ni, ki) = (n as i64, k0 as i64);
    let numerator = &RationalPolynomial::from_shifts((1 - ki)..=ni)
        * &RationalPolynomial::linear(rat(ki * (ki + ni)));
    let denominator = RationalPolynomial::from_shifts((ni + 1)..=(ni + ki));
    let (quotient, remainder) = numerator.div_rem(&denominator)?;
    Ok(Criterion {
        n,
        k0,
        is_polynomial: remainder.is_zero(),
        numerator,
        denominator,
        quotient,
        remainder,
    })
}

/// All `k ≤ k_max` for which the variation series at `λ = k(k+n)` vanishes
/// at every order `j` with `n < j ≤ J`.
pub fn admissible_eigenvalue_scan(n: u32, k_max: u32, order: u32) -> Result<Vec<u32>> {
    if order <= n {
        return Err(invalid(
            "admissible_eigenvalue_scan",
            format!("J = {order} must exceed n = {n}"),
        ));
    }
    if k_max == 0 {
        return Ok(Vec::new());
    }
    let table = conversion_polynomials(n, order)?;
    let mut out = Vec::new();
    for k in 1..=k_max {
        let lambda = rat((k * (k + n)) as i64);
        if variation_with_table(&table, &lambda, order)?
            .nonzero_orders_past_n()
            .is_empty()
        {
            out.push(k);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_values_in_one_dimension() {
        let d = eigen_delta_c_values(1, 3).unwrap();
        assert_eq!(d[0], RationalPolynomial::from_i64(&[1]));
        assert_eq!(d[1], RationalPolynomial::from_i64(&[0, -1]));
        assert_eq!(d[2], RationalPolynomial::from_i64(&[0, 2, 1]));
    }

    #[test]
    fn first_eigenvalue_gives_m_times_m_plus_one() {
        let s = variation_series_eigen(1, &rat(2), 4).unwrap();
        assert_eq!(s.raw.leading_power(), 2);
        let norm = s.normalized();
        let expect: Vec<Rational> = [1, 1, 0, 0, 0].iter().map(|&c| rat(c)).collect();
        assert_eq!(norm.coeffs(), expect.as_slice());
        // pure gauge direction: the centered variation vanishes identically
        assert!(s.centered.is_zero());
    }

    #[test]
    fn constant_direction_has_zero_centered_variation() {
        let s = variation_series_eigen(1, &rat(0), 2).unwrap();
        assert!(s.centered.is_zero());
        assert!(!s.raw.is_zero());
    }

    #[test]
    fn second_eigenvalue_leaves_tail() {
        let s = variation_series_eigen(1, &rat(8), 5).unwrap();
        assert!(!s.nonzero_orders_past_n().is_empty());
    }

    #[test]
    fn zero_order_rejected() {
        assert!(variation_series_eigen(1, &rat(2), 0).is_err());
    }

    #[test]
    fn criterion_examples() {
        let c = polynomiality_criterion(1, 1).unwrap();
        assert!(c.is_polynomial);
        assert_eq!(c.quotient, RationalPolynomial::from_shifts([0, 1]));
        assert!(!polynomiality_criterion(1, 2).unwrap().is_polynomial);
        assert!(polynomiality_criterion(2, 1).unwrap().is_polynomial);
        assert!(polynomiality_criterion(1, 0).is_err());
    }

    #[test]
    fn criterion_true_only_at_one() {
        for n in 1..=3 {
            for k0 in 1..=6 {
                assert_eq!(
                    polynomiality_criterion(n, k0).unwrap().is_polynomial,
                    k0 == 1
                );
            }
        }
    }

    #[test]
    fn scan_examples() {
        assert_eq!(admissible_eigenvalue_scan(1, 5, 6).unwrap(), vec![1]);
        assert_eq!(admissible_eigenvalue_scan(2, 5, 7).unwrap(), vec![1]);
        assert!(admissible_eigenvalue_scan(1, 0, 6).unwrap().is_empty());
        assert!(admissible_eigenvalue_scan(2, 3, 2).is_err());
    }

    #[test]
    fn first_eigenvalue_tail_vanishes() {
        for n in 1..=3u32 {
            for j in (n + 1)..=(n + 5) {
                let s = variation_series_eigen(n, &rat((n + 1) as i64), j).unwrap();
                assert!(s.nonzero_orders_past_n().is_empty(), "n={n} J={j}");
            }
        }
    }

    #[test]
    fn order_one_polynomial_roots() {
        for n in 1..=3u32 {
            let p = variation_order_polynomial(n, 1).unwrap();
            let roots = RationalPolynomial::from_shifts([0, -(n as i64 + 1)]);
            let (q, r) = p.div_rem(&roots).unwrap();
            assert!(r.is_zero(), "n={n}: {p}");
            assert_eq!(q.degree(), Some(0), "n={n}: {p}");
        }
    }

    #[test]
    fn centered_expansion_starts_at_m_to_the_n() {
        let s = variation_series_eigen(2, &rat(10), 5).unwrap();
        let e = s.centered_expansion();
        assert_eq!(e.leading_power(), 2);
        // b_0 = f_0(Δ)(φ - φ(0)) at the base point = 0
        assert!(e.coeff(0).is_zero());
    }

    #[test]
    fn criterion_json() {
        let js = serde_json::to_string(&polynomiality_criterion(1, 1).unwrap()).unwrap();
        assert_eq!(
            js,
            r#"{"n":1,"k0":1,"is_polynomial":true,"quotient":["0/1","1/1","1/1"],"remainder":[]}"#
        );
    }
}
