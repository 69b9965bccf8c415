use std::fmt;
use std::sync::Arc;

use crate::jet::Jet;
use crate::{Error, Result};

type DerivFn = dyn Fn(f64, usize) -> Vec<f64> + Send + Sync;

/// A smooth radial function on CP¹, given as a function of `x = 1/(1+s)`.
#[derive(Clone)]
pub struct RadialFunction {
    repr: Repr,
}

#[derive(Clone)]
enum Repr {
    /// Coefficients in powers of `x`, lowest first.
    Poly(Vec<f64>),
    /// `f(x, k)` returns `[F(x), F'(x), …, F⁽ᵏ⁾(x)]` for `k ≤ max_order`.
    Custom {
        name: String,
        f: Arc<DerivFn>,
        max_order: usize,
        reflected: bool,
    },
    Sum(Box<RadialFunction>, Box<RadialFunction>, f64),
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Poly(c) => f.debug_tuple("Phi1Polynomial").field(c).finish(),
            Repr::Custom {
                name,
                max_order,
                reflected,
                ..
            } => f
                .debug_struct("Custom")
                .field("name", name)
                .field("max_order", max_order)
                .field("reflected", reflected)
                .finish(),
            Repr::Sum(a, b, c) => f.debug_tuple("Sum").field(a).field(b).field(c).finish(),
        }
    }
}

impl RadialFunction {
    pub fn zero() -> Self {
        Self::phi1_polynomial(vec![])
    }

    pub fn constant(c: f64) -> Self {
        Self::phi1_polynomial(vec![c])
    }

    /// `Σ cₖ φ₁ᵏ` with `φ₁ = 1/(1+s)`.
    pub fn phi1_polynomial(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        RadialFunction {
            repr: Repr::Poly(coeffs),
        }
    }

    /// `ε(1-s)/(1+s) = ε(2φ₁ - 1)`, a first eigenfunction (`λ = 2`).
    pub fn eigen_bump(eps: f64) -> Self {
        Self::phi1_polynomial(vec![-eps, 2.0 * eps])
    }

    /// `ε·s/(1+s)² = ε(φ₁ - φ₁²)`.
    pub fn rational_bump(eps: f64) -> Self {
        Self::phi1_polynomial(vec![0.0, eps, -eps])
    }

    /// A radial function known through its first `max_order` derivatives in
    /// `x`; `f(x, k)` must return `k + 1` values.
    pub fn from_derivatives<F>(name: impl Into<String>, max_order: usize, f: F) -> Self
    where
        F: Fn(f64, usize) -> Vec<f64> + Send + Sync + 'static,
    {
        RadialFunction {
            repr: Repr::Custom {
                name: name.into(),
                f: Arc::new(f),
                max_order,
                reflected: false,
            },
        }
    }

    /// Polynomial coefficients in `φ₁`, if the function is a polynomial.
    pub fn as_polynomial(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Poly(c) => Some(c),
            _ => None,
        }
    }

    /// Highest available derivative order, `None` when unlimited.
    pub fn max_order(&self) -> Option<usize> {
        match &self.repr {
            Repr::Poly(_) => None,
            Repr::Custom { max_order, .. } => Some(*max_order),
            Repr::Sum(a, b, _) => match (a.max_order(), b.max_order()) {
                (Some(p), Some(q)) => Some(p.min(q)),
                (p, q) => p.or(q),
            },
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Poly(c) => c.iter().rev().fold(0.0, |acc, &a| acc * x + a),
            Repr::Custom { f, reflected, .. } => f(if *reflected { 1.0 - x } else { x }, 0)[0],
            Repr::Sum(a, b, c) => a.eval(x) + c * b.eval(x),
        }
    }

    /// Value at `s = |z|²`.
    pub fn eval_s(&self, s: f64) -> f64 {
        self.eval(super::x_of_s(s))
    }

    /// Taylor jet in `x` of the given order.
    pub fn jet(&self, op: &'static str, x: f64, order: usize) -> Result<Jet> {
        match &self.repr {
            Repr::Poly(c) => {
                let mut d = vec![0.0; order + 1];
                let mut work = c.clone();
                for dk in d.iter_mut() {
                    if work.is_empty() {
                        break;
                    }
                    *dk = work.iter().rev().fold(0.0, |acc, &a| acc * x + a);
                    work = work
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(i, &a)| i as f64 * a)
                        .collect();
                }
                Ok(Jet::from_derivatives(&d))
            }
            Repr::Custom {
                f,
                max_order,
                reflected,
                ..
            } => {
                if order > *max_order {
                    return Err(Error::DerivativeUnavailable {
                        op,
                        required: order,
                        available: *max_order,
                    });
                }
                let mut d = f(if *reflected { 1.0 - x } else { x }, order);
                d.truncate(order + 1);
                if *reflected {
                    for (k, v) in d.iter_mut().enumerate() {
                        if k % 2 == 1 {
                            *v = -*v;
                        }
                    }
                }
                Ok(Jet::from_derivatives(&d))
            }
            Repr::Sum(a, b, c) => Ok(&a.jet(op, x, order)? + &b.jet(op, x, order)?.scale(*c)),
        }
    }

    /// `ΔF(x) = (1-2x)F'(x) + x(1-x)F''(x)`.
    pub fn laplacian(&self, op: &'static str, x: f64) -> Result<f64> {
        let j = self.jet(op, x, 2)?;
        Ok((1.0 - 2.0 * x) * j.derivative(1) + x * (1.0 - x) * j.derivative(2))
    }

    /// `self + c·other`, merged exactly when both are polynomials.
    pub fn add_scaled(&self, other: &RadialFunction, c: f64) -> RadialFunction {
        if let (Repr::Poly(a), Repr::Poly(b)) = (&self.repr, &other.repr) {
            let len = a.len().max(b.len());
            let coeffs = (0..len)
                .map(|i| a.get(i).copied().unwrap_or(0.0) + c * b.get(i).copied().unwrap_or(0.0))
                .collect();
            return Self::phi1_polynomial(coeffs);
        }
        RadialFunction {
            repr: Repr::Sum(Box::new(self.clone()), Box::new(other.clone()), c),
        }
    }

    /// The same function seen from the chart at infinity, `x ↦ 1 - x`.
    pub fn reflected(&self) -> RadialFunction {
        match &self.repr {
            Repr::Poly(c) => {
                // Expand Σ cₖ(1-x)ᵏ.
                let mut out = vec![0.0; c.len()];
                let mut binom = vec![1.0];
                for (k, &ck) in c.iter().enumerate() {
                    if k > 0 {
                        let mut next = vec![1.0; k + 1];
                        for i in 1..k {
                            next[i] = binom[i - 1] + binom[i];
                        }
                        binom = next;
                    }
                    for (i, b) in binom.iter().enumerate() {
                        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                        out[i] += ck * b * sign;
                    }
                }
                Self::phi1_polynomial(out)
            }
            Repr::Custom {
                name,
                f,
                max_order,
                reflected,
            } => RadialFunction {
                repr: Repr::Custom {
                    name: name.clone(),
                    f: f.clone(),
                    max_order: *max_order,
                    reflected: !reflected,
                },
            },
            Repr::Sum(a, b, c) => RadialFunction {
                repr: Repr::Sum(Box::new(a.reflected()), Box::new(b.reflected()), *c),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_values() {
        let s = 3.0;
        let e = RadialFunction::eigen_bump(0.1);
        assert!((e.eval_s(s) - 0.1 * (1.0 - s) / (1.0 + s)).abs() < 1e-15);
        let r = RadialFunction::rational_bump(0.2);
        assert!((r.eval_s(s) - 0.2 * s / (1.0 + s).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn polynomial_jet_matches_derivatives() {
        let p = RadialFunction::phi1_polynomial(vec![1.0, -2.0, 0.5, 3.0]);
        let j = p.jet("test", 0.3, 4).unwrap();
        let x: f64 = 0.3;
        assert!((j.value() - (1.0 - 0.6 + 0.5 * x * x + 3.0 * x.powi(3))).abs() < 1e-14);
        assert!((j.derivative(1) - (-2.0 + x + 9.0 * x * x)).abs() < 1e-14);
        assert!((j.derivative(2) - (1.0 + 18.0 * x)).abs() < 1e-14);
        assert!((j.derivative(3) - 18.0).abs() < 1e-14);
        assert_eq!(j.derivative(4), 0.0);
    }

    #[test]
    fn eigen_bump_is_first_eigenfunction() {
        let e = RadialFunction::eigen_bump(1.0);
        for &x in &[0.1, 0.5, 0.9] {
            assert!((e.laplacian("test", x).unwrap() + 2.0 * e.eval(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn reflection_matches_custom() {
        let p = RadialFunction::phi1_polynomial(vec![0.3, 1.0, -2.0, 0.7]);
        let q = p.clone();
        let c = RadialFunction::from_derivatives("p", 8, move |x, k| {
            let j = q.jet("test", x, k).unwrap();
            (0..=k).map(|i| j.derivative(i)).collect()
        });
        for &x in &[0.2, 0.65] {
            let a = p.reflected().jet("test", x, 3).unwrap();
            let b = c.reflected().jet("test", x, 3).unwrap();
            for k in 0..=3 {
                assert!((a.derivative(k) - b.derivative(k)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn custom_order_is_enforced() {
        let c = RadialFunction::from_derivatives("lin", 2, |x, k| {
            let mut d = vec![x, 1.0, 0.0];
            d.truncate(k + 1);
            d
        });
        assert!(matches!(
            c.jet("test", 0.5, 4),
            Err(Error::DerivativeUnavailable {
                required: 4,
                available: 2,
                ..
            })
        ));
    }
}
