use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;

use super::multi_index::MultiIndex;
use super::rational::{rat, to_f64, Rational};

fn accumulate<K: Ord>(map: &mut BTreeMap<K, Rational>, key: K, value: Rational) {
    if value.is_zero() {
        return;
    }
    let slot = map.entry(key).or_insert_with(Rational::zero);
    *slot += value;
}

fn prune<K: Ord>(map: &mut BTreeMap<K, Rational>) {
    map.retain(|_, c| !c.is_zero());
}

/// Finite sum `Σ c_P |z^P|²` of diagonal monomials in `n` variables.
///
/// Closed under the Fubini–Study Laplacian, which acts on `|z^P|²` with
/// `l = |P|` by
///
/// ```text
/// Δ|z^P|² = Σᵢ pᵢ²|z^{P-eᵢ}|² + l²|z^P|² + Σᵢⱼ pᵢ²|z^{P-eᵢ+eⱼ}|² + Σᵢ l²|z^{P+eᵢ}|²
/// ```
///
/// Terms with `pᵢ = 0` carry a zero coefficient and are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialMeasure {
    n: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl MonomialMeasure {
    pub fn zero(n: usize) -> Self {
        MonomialMeasure {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// The single monomial `|z^P|²`.
    pub fn monomial(p: MultiIndex) -> Self {
        let n = p.dim();
        let mut terms = BTreeMap::new();
        terms.insert(p, rat(1));
        MonomialMeasure { n, terms }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.terms
    }

    pub fn coeff(&self, p: &MultiIndex) -> Rational {
        self.terms.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    /// Value at the origin: the coefficient of the empty monomial.
    pub fn value_at_zero(&self) -> Rational {
        self.coeff(&MultiIndex::zero(self.n))
    }

    pub fn laplacian(&self) -> Self {
        let n = self.n;
        let mut out = BTreeMap::new();
        for (p, c) in &self.terms {
            let l = p.degree() as i64;
            let l2 = c * rat(l * l);
            for i in 0..n {
                let pi = p.exponents()[i] as i64;
                if let Some(lowered) = p.lowered(i) {
                    let w = c * rat(pi * pi);
                    for j in 0..n {
                        accumulate(&mut out, lowered.raised(j), w.clone());
                    }
                    accumulate(&mut out, lowered, w);
                }
                accumulate(&mut out, p.raised(i), l2.clone());
            }
            accumulate(&mut out, p.clone(), l2);
        }
        prune(&mut out);
        MonomialMeasure { n, terms: out }
    }

    pub fn laplacian_power(&self, k: u32) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.laplacian())
    }
}

/// Finite sum `Σ c_{P,Q} z^P z̄^Q`, the extended basis on which the
/// Fubini–Study Laplacian
/// `Δ = (1+|z|²)(δᵢⱼ + zᵢz̄ⱼ)∂²/∂zᵢ∂z̄ⱼ` acts by
///
/// ```text
/// Δ z^P z̄^Q = (1 + Σₖ zₖz̄ₖ) · ( Σᵢ pᵢqᵢ z^{P-eᵢ} z̄^{Q-eᵢ} + |P||Q| z^P z̄^Q ).
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedPolynomial {
    n: usize,
    terms: BTreeMap<(MultiIndex, MultiIndex), Rational>,
}

impl MixedPolynomial {
    pub fn monomial(p: MultiIndex, q: MultiIndex) -> Self {
        assert_eq!(p.dim(), q.dim(), "multi-index dimensions differ");
        let n = p.dim();
        let mut terms = BTreeMap::new();
        terms.insert((p, q), rat(1));
        MixedPolynomial { n, terms }
    }

    pub fn terms(&self) -> &BTreeMap<(MultiIndex, MultiIndex), Rational> {
        &self.terms
    }

    pub fn value_at_zero(&self) -> Rational {
        let z = MultiIndex::zero(self.n);
        self.terms
            .get(&(z.clone(), z))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn laplacian(&self) -> Self {
        let n = self.n;
        let mut inner = BTreeMap::new();
        for ((p, q), c) in &self.terms {
            for i in 0..n {
                if let (Some(pl), Some(ql)) = (p.lowered(i), q.lowered(i)) {
                    let w = rat(p.exponents()[i] as i64 * q.exponents()[i] as i64);
                    accumulate(&mut inner, (pl, ql), c * w);
                }
            }
            let w = rat((p.degree() * q.degree()) as i64);
            accumulate(&mut inner, (p.clone(), q.clone()), c * w);
        }
        let mut out = BTreeMap::new();
        for ((p, q), c) in inner {
            for k in 0..n {
                accumulate(&mut out, (p.raised(k), q.raised(k)), c.clone());
            }
            accumulate(&mut out, (p, q), c);
        }
        prune(&mut out);
        MixedPolynomial { n, terms: out }
    }

    pub fn laplacian_power(&self, k: u32) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.laplacian())
    }

    /// Numerical value at a chart point.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|((p, q), c)| {
                let mut v = Complex64::new(to_f64(c), 0.0);
                for i in 0..self.n {
                    v *= z[i].powu(p.exponents()[i]) * z[i].conj().powu(q.exponents()[i]);
                }
                v
            })
            .sum()
    }
}

impl From<&MonomialMeasure> for MixedPolynomial {
    fn from(m: &MonomialMeasure) -> Self {
        MixedPolynomial {
            n: m.n,
            terms: m
                .terms
                .iter()
                .map(|(p, c)| ((p.clone(), p.clone()), c.clone()))
                .collect(),
        }
    }
}
