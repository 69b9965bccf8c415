use super::profile::RadialFunction;
use super::s_of_x;
use crate::jet::Jet;
use crate::{Error, Result};

/// Number of interior points of the positivity validation grid in `x`.
const VALIDATION_POINTS: usize = 512;

/// The metric `h = x·e^{-u}` on `O(1) → CP¹` for a radial potential `u`.
#[derive(Debug, Clone)]
pub struct RadialMetric {
    u: RadialFunction,
}

impl RadialMetric {
    pub fn fubini_study() -> Self {
        RadialMetric {
            u: RadialFunction::zero(),
        }
    }

    /// Validates that `ω = (1 + Δu)ω₀` is positive on a uniform grid in `x`
    /// including both poles.
    pub fn new(u: RadialFunction) -> Result<Self> {
        Self::validated("RadialMetric::new", u)
    }

    pub(crate) fn validated(op: &'static str, u: RadialFunction) -> Result<Self> {
        let m = RadialMetric { u };
        for i in 0..=VALIDATION_POINTS {
            let x = i as f64 / VALIDATION_POINTS as f64;
            let v = m.volume_density(op, x)?;
            if !(v > 0.0) {
                return Err(Error::PositivityViolation {
                    op,
                    what: "volume density",
                    value: v,
                    s: s_of_x(x),
                });
            }
        }
        Ok(m)
    }

    pub fn potential(&self) -> &RadialFunction {
        &self.u
    }

    pub fn is_fubini_study(&self) -> bool {
        self.u.as_polynomial().is_some_and(|c| c.is_empty())
    }

    /// `ω/ω₀ = 1 + Δu` at `x`.
    pub fn volume_density(&self, op: &'static str, x: f64) -> Result<f64> {
        Ok(1.0 + self.u.laplacian(op, x)?)
    }

    /// Jet of `ω/ω₀` at `x`, two orders shorter than requested from `u`.
    pub(crate) fn volume_jet(&self, op: &'static str, x: f64, u_order: usize) -> Result<Jet> {
        let u = self.u.jet(op, x, u_order)?;
        Ok(&Jet::constant(1.0, u_order - 2) + &radial_laplacian_jet(&u, x))
    }

    /// The metric `h·e^{tφ}`, i.e. potential `u - tφ`, validated.
    pub fn perturbed(&self, phi: &RadialFunction, t: f64) -> Result<Self> {
        Self::validated("density_with_potential", self.u.add_scaled(phi, -t))
    }

    /// The same metric written in the chart at infinity `w = 1/z`.
    pub fn reflected(&self) -> Self {
        RadialMetric {
            u: self.u.reflected(),
        }
    }
}

/// `ΔF = (1-2x)F' + x(1-x)F''` on jets; the result is two orders shorter.
pub(crate) fn radial_laplacian_jet(f: &Jet, x: f64) -> Jet {
    let order = f.order() - 2;
    let xj = Jet::variable(x, order);
    let one = Jet::constant(1.0, order);
    let a = &one - &xj.scale(2.0);
    let b = &xj * &(&one - &xj);
    let d1 = f.differentiate().truncate(order);
    let d2 = f.differentiate().differentiate();
    &(&a * &d1) + &(&b * &d2)
}
