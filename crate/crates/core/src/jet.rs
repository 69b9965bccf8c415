//! Truncated Taylor arithmetic in one variable.
//!
//! A [`Jet`] stores `f(x₀), f'(x₀), f''(x₀)/2!, …` up to a fixed order and
//! propagates them exactly through `+`, `×`, `÷`, `ln` and `exp`. Curvature
//! quantities of radial metrics need up to sixth derivatives of the
//! potential; jets keep those chain-rule computations mechanical.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    /// Normalized Taylor coefficients `f^{(k)}(x₀)/k!`.
    c: Vec<f64>,
}

impl Jet {
    /// From plain derivatives `f, f', f'', …`.
    pub fn from_derivatives(d: &[f64]) -> Self {
        let mut fact = 1.0;
        let c = d
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                if k > 0 {
                    fact *= k as f64;
                }
                v / fact
            })
            .collect();
        Jet { c }
    }

    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet { c }
    }

    /// The identity function at `x₀`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut j = Self::constant(x0, order);
        if order >= 1 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `f^{(k)}(x₀)`.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.c[k] * fact
    }

    /// The jet of `f'`, one order shorter.
    pub fn differentiate(&self) -> Self {
        assert!(self.order() >= 1, "cannot differentiate an order-0 jet");
        Jet {
            c: (1..self.c.len()).map(|k| k as f64 * self.c[k]).collect(),
        }
    }

    /// The antiderivative with the given constant term, one order longer
    /// but truncated back to `order`.
    fn integrate_to(&self, c0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = c0;
        for k in 1..=order {
            c[k] = self.c[k - 1] / k as f64;
        }
        Jet { c }
    }

    pub fn truncate(&self, order: usize) -> Self {
        Jet {
            c: self.c[..=order.min(self.order())].to_vec(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet {
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn recip(&self) -> Self {
        let a0 = self.c[0];
        let mut out = vec![0.0; self.c.len()];
        out[0] = 1.0 / a0;
        for k in 1..self.c.len() {
            let acc: f64 = (1..=k).map(|i| self.c[i] * out[k - i]).sum();
            out[k] = -acc / a0;
        }
        Jet { c: out }
    }

    pub fn ln(&self) -> Self {
        let order = self.order();
        if order == 0 {
            return Jet {
                c: vec![self.c[0].ln()],
            };
        }
        let d = &self.differentiate() * &self.truncate(order - 1).recip();
        d.integrate_to(self.c[0].ln(), order)
    }

    pub fn exp(&self) -> Self {
        // y' = f'y solved coefficient by coefficient.
        let n = self.c.len();
        let mut y = vec![0.0; n];
        y[0] = self.c[0].exp();
        for k in 1..n {
            let acc: f64 = (1..=k).map(|i| i as f64 * self.c[i] * y[k - i]).sum();
            y[k] = acc / k as f64;
        }
        Jet { c: y }
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: Self) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        Jet {
            c: (0..n).map(|k| self.c[k] + rhs.c[k]).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: Self) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        Jet {
            c: (0..n).map(|k| self.c[k] - rhs.c[k]).collect(),
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: Self) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        Jet {
            c: (0..n)
                .map(|k| (0..=k).map(|i| self.c[i] * rhs.c[k - i]).sum())
                .collect(),
        }
    }
}
