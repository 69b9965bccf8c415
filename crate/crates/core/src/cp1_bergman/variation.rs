use std::f64::consts::PI;

use serde::Serialize;

use super::density::density_with_potential;
use super::metric::RadialMetric;
use super::profile::RadialFunction;
use super::x_of_s;
use crate::error::invalid;
use crate::quadrature::{integrate, QuadOptions};
use crate::{Error, Result};

/// Smallest finite-difference step accepted by [`first_variation`].
pub const MIN_FD_STEP: f64 = 1e-9;

/// Angular nodes of the trapezoid rule; exact for polynomials in `φ₁` of
/// degree below this.
const ANGULAR: usize = 64;

/// The first variation of `Π_m` at a point, by the kernel formula and by
/// centered finite differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstVariation {
    pub m: u32,
    pub s: f64,
    pub t: f64,
    pub formula_value: f64,
    pub fd_value: f64,
    pub abs_error: f64,
    pub rel_error: f64,
}

/// `d/dt Π_m(h e^{tφ})` at `t = 0` for the Fubini–Study base metric.
///
/// The formula is `-∫ |K_m(x₀,y)|² (mψ - Δψ)(y) ω₀(y)` with
/// `ψ = φ - φ(x₀)` and `|K_m(x₀,y)|² = (m+1)² cos^{2m} d(x₀,y)`. A unitary
/// moving `x₀` to the origin turns it into
/// `-(m+1)² ∫₀¹ (1-t)^m ⟨mψ - Δψ⟩_θ dt`, where `y = U(√(1-t), √t e^{iθ})`.
pub fn first_variation(phi: &RadialFunction, m: u32, s: f64, t: f64) -> Result<FirstVariation> {
    const OP: &str = "first_variation";
    if m == 0 {
        return Err(invalid(OP, "m must be at least 1"));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(invalid(OP, "s must be finite and nonnegative"));
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(invalid(OP, "step must be positive"));
    }
    if t < MIN_FD_STEP {
        return Err(Error::StepUnderflow { op: OP, t });
    }
    let x0 = x_of_s(s);
    let c = phi.eval(x0);
    let mf = m as f64;
    let r0 = s.sqrt();
    let cos: Vec<f64> = (0..ANGULAR)
        .map(|k| (2.0 * PI * k as f64 / ANGULAR as f64).cos())
        .collect();

    // Evaluate the derivative availability once, outside the integrand.
    phi.laplacian(OP, 0.5)?;
    let angular_mean = |tt: f64| {
        let root = (tt * (1.0 - tt)).max(0.0).sqrt();
        let base = (1.0 - tt) + s * tt;
        cos.iter()
            .map(|&cs| {
                let xy = ((base - 2.0 * r0 * root * cs) / (1.0 + s)).clamp(0.0, 1.0);
                let lap = phi.laplacian(OP, xy).unwrap_or(f64::NAN);
                mf * (phi.eval(xy) - c) - lap
            })
            .sum::<f64>()
            / ANGULAR as f64
    };
    let scale = (mf + 1.0) * (mf + 1.0);
    let q = integrate(
        OP,
        |tt| (1.0 - tt).powi(m as i32) * angular_mean(tt),
        0.0,
        1.0,
        QuadOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-15 * (mf + 1.0),
            max_intervals: 4000,
        },
    )?;
    let formula_value = -scale * q.value;

    let fs = RadialMetric::fubini_study();
    let plus = density_with_potential(&fs, phi, t, m, &[s])?.values[0];
    let minus = density_with_potential(&fs, phi, -t, m, &[s])?.values[0];
    let fd_value = (plus - minus) / (2.0 * t);

    let abs_error = (formula_value - fd_value).abs();
    let denom = formula_value.abs().max(fd_value.abs());
    let rel_error = if denom == 0.0 { 0.0 } else { abs_error / denom };
    Ok(FirstVariation {
        m,
        s,
        t,
        formula_value,
        fd_value,
        abs_error,
        rel_error,
    })
}
