use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::polynomial::RationalPolynomial;
use super::rational::{format_rational, Rational};
use crate::{Error, Result};

/// Truncated expansion `m^p · (c₀ + c₁/m + … + c_J/m^J)` with exact
/// rational coefficients.
///
/// `p` is the nominal leading power and `J` the truncation order; terms past
/// `m^(p-J)` are unknown, not zero. Arithmetic keeps track of how far each
/// result is valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseMSeries {
    leading_power: i64,
    coeffs: Vec<Rational>,
}

impl InverseMSeries {
    pub fn new(leading_power: i64, coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        InverseMSeries {
            leading_power,
            coeffs,
        }
    }

    pub fn zero(leading_power: i64, order: usize) -> Self {
        Self::new(leading_power, vec![Rational::zero(); order + 1])
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); order + 1];
        coeffs[0] = c;
        Self::new(0, coeffs)
    }

    /// Exact expansion of a polynomial in `m`, padded with zeros up to `order`.
    pub fn from_polynomial(p: &RationalPolynomial, order: usize) -> Self {
        let Some(deg) = p.degree() else {
            return Self::zero(0, order);
        };
        let coeffs = (0..=order)
            .map(|i| {
                if i <= deg {
                    p.coeff(deg - i)
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Self::new(deg as i64, coeffs)
    }

    /// `1/(m + a) = m⁻¹ Σ (-a)^i m^{-i}`.
    pub fn inverse_linear(a: &Rational, order: usize) -> Self {
        let neg = -a;
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut pow = Rational::one();
        for _ in 0..=order {
            coeffs.push(pow.clone());
            pow *= &neg;
        }
        Self::new(-1, coeffs)
    }

    pub fn leading_power(&self) -> i64 {
        self.leading_power
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient `c_j`, i.e. the coefficient of `m^(p-j)`.
    pub fn coeff(&self, j: usize) -> &Rational {
        &self.coeffs[j]
    }

    /// Lowest power of `m` this series is valid through.
    fn floor(&self) -> i64 {
        self.leading_power - self.order() as i64
    }

    /// Coefficient of the absolute power `m^power` (zero above the leading
    /// power; `None` below the truncation floor).
    pub fn coeff_of_power(&self, power: i64) -> Option<Rational> {
        if power > self.leading_power {
            Some(Rational::zero())
        } else if power < self.floor() {
            None
        } else {
            Some(self.coeffs[(self.leading_power - power) as usize].clone())
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let keep = (order + 1).min(self.coeffs.len());
        Self::new(self.leading_power, self.coeffs[..keep].to_vec())
    }

    /// Re-expresses the series with a different nominal leading power. Raising
    /// it prepends zeros; lowering it requires the dropped terms to be zero.
    pub fn with_leading_power(&self, leading_power: i64) -> Result<Self> {
        let floor = self.floor();
        if leading_power < floor {
            return Err(crate::error::invalid(
                "with_leading_power",
                "new leading power below truncation floor",
            ));
        }
        let coeffs: Option<Vec<_>> = (floor..=leading_power)
            .rev()
            .map(|p| self.coeff_of_power(p))
            .collect();
        for p in (leading_power + 1)..=self.leading_power {
            if !self.coeff_of_power(p).is_some_and(|c| c.is_zero()) {
                return Err(crate::error::invalid(
                    "with_leading_power",
                    "nonzero coefficient above new leading power",
                ));
            }
        }
        Ok(Self::new(leading_power, coeffs.expect("range checked")))
    }

    /// Multiplies by `m^k`.
    pub fn shift_power(&self, k: i64) -> Self {
        Self::new(self.leading_power + k, self.coeffs.clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(
            self.leading_power,
            self.coeffs.iter().map(|a| a * c).collect(),
        )
    }

    /// Multiplicative inverse; requires `c₀ ≠ 0`.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::ZeroLeading { op: "reciprocal" });
        }
        let inv0 = a0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for k in 1..self.coeffs.len() {
            let mut acc = Rational::zero();
            for i in 1..=k {
                acc += &self.coeffs[i] * &out[k - i];
            }
            out.push(-acc * &inv0);
        }
        Ok(Self::new(-self.leading_power, out))
    }

    /// Divides through by `c₀` so the leading coefficient is one.
    pub fn normalized(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::ZeroLeading { op: "normalized" });
        }
        Ok(self.scale(&a0.recip()))
    }

    /// Sum of the retained terms at a given `m`.
    pub fn eval(&self, m: &Rational) -> Rational {
        let inv = m.recip();
        let mut acc = Rational::zero();
        let mut pow = Rational::one();
        for c in &self.coeffs {
            acc += c * &pow;
            pow *= &inv;
        }
        let lead = if self.leading_power >= 0 {
            num_traits::pow(m.clone(), self.leading_power as usize)
        } else {
            num_traits::pow(inv, (-self.leading_power) as usize)
        };
        acc * lead
    }
}

impl Add for &InverseMSeries {
    type Output = InverseMSeries;
    fn add(self, rhs: Self) -> InverseMSeries {
        let lead = self.leading_power.max(rhs.leading_power);
        let floor = self.floor().max(rhs.floor());
        let coeffs = (floor..=lead)
            .rev()
            .map(|p| self.coeff_of_power(p).unwrap() + rhs.coeff_of_power(p).unwrap())
            .collect();
        InverseMSeries::new(lead, coeffs)
    }
}

impl Neg for &InverseMSeries {
    type Output = InverseMSeries;
    fn neg(self) -> InverseMSeries {
        InverseMSeries::new(self.leading_power, self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &InverseMSeries {
    type Output = InverseMSeries;
    fn sub(self, rhs: Self) -> InverseMSeries {
        self + &(-rhs)
    }
}

impl Mul for &InverseMSeries {
    type Output = InverseMSeries;
    fn mul(self, rhs: Self) -> InverseMSeries {
        let len = self.coeffs.len().min(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|k| {
                (0..=k).fold(Rational::zero(), |acc, i| {
                    acc + &self.coeffs[i] * &rhs.coeffs[k - i]
                })
            })
            .collect();
        InverseMSeries::new(self.leading_power + rhs.leading_power, coeffs)
    }
}

impl fmt::Display for InverseMSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m^{} * (", self.leading_power)?;
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                write!(f, " + ")?;
            }
            match j {
                0 => write!(f, "{}", format_rational(c))?,
                1 => write!(f, "{}/m", format_rational(c))?,
                _ => write!(f, "{}/m^{j}", format_rational(c))?,
            }
        }
        write!(f, " + O(m^-{}))", self.order() + 1)
    }
}
