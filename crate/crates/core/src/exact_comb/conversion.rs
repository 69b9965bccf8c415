use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::monomial::MonomialMeasure;
use super::multi_index::MultiIndex;
use super::polynomial::RationalPolynomial;
use super::rational::{factorial, format_rational, parse_rational, rat, Rational};
use crate::error::invalid;
use crate::{Error, Result};

/// Coefficients `a_{k,l}` of the conversion polynomials
/// `f_k(t) = Σ_l a_{k,l} t^l`, which satisfy `Δᵏφ(0) = f_k(Δ_c)φ(0)` at the
/// Fubini–Study base point of CPⁿ.
///
/// Row `k` (for `1 ≤ k ≤ K`) holds `a_{k,0}, …, a_{k,k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionTable {
    n: u32,
    rows: Vec<Vec<Rational>>,
}

/// Builds rows `1..=max_order` from `f₁(t) = t` and the recursion
///
/// ```text
/// a_{k+1,l} = a_{k,l-1} + l(2l+n-1)·a_{k,l} + l²(l+1)(l+n)·a_{k,l+1},  0 < l < k+1
/// ```
///
/// with `a_{k+1,0} = 0` and `a_{k+1,k+1} = 1`.
pub fn conversion_polynomials(n: u32, max_order: u32) -> Result<ConversionTable> {
    if n == 0 {
        return Err(invalid("conversion_polynomials", "n must be at least 1"));
    }
    if max_order == 0 {
        return Err(invalid("conversion_polynomials", "K must be at least 1"));
    }
    let mut rows = vec![vec![Rational::zero(), Rational::one()]];
    for k in 1..max_order as usize {
        let prev = &rows[k - 1];
        let at = |l: usize| prev.get(l).cloned().unwrap_or_else(Rational::zero);
        let mut next = vec![Rational::zero(); k + 2];
        next[k + 1] = Rational::one();
        for (l, slot) in next.iter_mut().enumerate().take(k + 1).skip(1) {
            let li = l as i64;
            let ni = n as i64;
            *slot = at(l - 1)
                + rat(li * (2 * li + ni - 1)) * at(l)
                + rat(li * li * (li + 1) * (li + ni)) * at(l + 1);
        }
        rows.push(next);
    }
    Ok(ConversionTable { n, rows })
}

impl ConversionTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn max_order(&self) -> u32 {
        self.rows.len() as u32
    }

    /// `a_{k,·}` for `1 ≤ k ≤ K`.
    pub fn row(&self, k: u32) -> &[Rational] {
        &self.rows[k as usize - 1]
    }

    /// `a_{k,l}`, zero outside `0 ≤ l ≤ k`. `a_{0,0} = 1`.
    pub fn coeff(&self, k: u32, l: u32) -> Rational {
        if k == 0 {
            return if l == 0 {
                Rational::one()
            } else {
                Rational::zero()
            };
        }
        self.row(k)
            .get(l as usize)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// `f_k` as a polynomial; `f₀ = 1`.
    pub fn polynomial(&self, k: u32) -> RationalPolynomial {
        if k == 0 {
            return RationalPolynomial::constant(Rational::one());
        }
        RationalPolynomial::new(self.row(k).to_vec())
    }

    /// `f_k(Δ_c)|z^P|²(0) = Σ_l a_{k,l}·Δ_c^l|z^P|²(0)`.
    pub fn apply_at_zero(&self, k: u32, p: &MultiIndex) -> Rational {
        (0..=k)
            .map(|l| self.coeff(k, l) * delta_c_power_at_zero(l, p))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Checks the boundary values and the recursion on every stored row.
    pub fn is_consistent(&self) -> bool {
        let Ok(fresh) = conversion_polynomials(self.n, self.max_order()) else {
            return false;
        };
        fresh == *self
            && self
                .rows
                .iter()
                .all(|r| r[0].is_zero() && r.last().is_some_and(One::is_one))
    }
}

#[derive(Serialize, Deserialize)]
struct ConversionTableWire {
    n: u32,
    rows: Vec<Vec<String>>,
}

impl Serialize for ConversionTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ConversionTableWire {
            n: self.n,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(format_rational).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ConversionTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = ConversionTableWire::deserialize(deserializer)?;
        let rows = wire
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let table = ConversionTable { n: wire.n, rows };
        if !table.is_consistent() {
            return Err(D::Error::custom("conversion table violates the recursion"));
        }
        Ok(table)
    }
}

/// `Δᵏ|z^P|²(0)`, computed by rewriting a [`MonomialMeasure`] `k` times and
/// reading off the constant term.
pub fn laplacian_power_at_zero(n: u32, p: &MultiIndex, k: u32) -> Result<Rational> {
    if p.dim() != n as usize {
        return Err(invalid(
            "laplacian_power_at_zero",
            format!("multi-index {p} has dimension {}, expected {n}", p.dim()),
        ));
    }
    Ok(MonomialMeasure::monomial(p.clone())
        .laplacian_power(k)
        .value_at_zero())
}

/// `Δ_c^l|z^P|²(0) = l!·P!` when `l = |P|`, zero otherwise.
pub fn delta_c_power_at_zero(l: u32, p: &MultiIndex) -> Rational {
    if l as u64 != p.degree() {
        return Rational::zero();
    }
    Rational::from_integer(factorial(l as u64) * p.factorial())
}

/// `P!(m-|P|)!/(m+n)!`, the Fubini–Study monomial integral
/// `∫_{ℂⁿ} |z^P|²/(1+|z|²)^{m+n+1} dV` divided by `πⁿ`.
pub fn fs_monomial_integral(n: u32, m: u64, p: &MultiIndex) -> Result<Rational> {
    if p.dim() != n as usize {
        return Err(invalid(
            "fs_monomial_integral",
            format!("multi-index {p} has dimension {}, expected {n}", p.dim()),
        ));
    }
    let deg = p.degree();
    if deg > m {
        return Err(Error::DegreeExceedsPower {
            op: "fs_monomial_integral",
            degree: deg,
            m,
        });
    }
    Ok(Rational::new(
        p.factorial() * factorial(m - deg),
        factorial(m + n as u64),
    ))
}
