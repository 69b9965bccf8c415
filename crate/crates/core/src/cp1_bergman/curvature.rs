use serde::Serialize;

use super::metric::{radial_laplacian_jet, RadialMetric};
use super::x_of_s;
use crate::error::invalid;
use crate::jet::Jet;
use crate::Result;

/// Curvature quantities and the first two expansion coefficients at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub s: f64,
    pub rho: f64,
    pub lap_rho: f64,
    pub a1: f64,
    pub a2: f64,
}

/// Scalar curvature `ρ = (2 - Δ₀ log V)/V` of `ω = Vω₀`, its Laplacian
/// `Δρ = Δ₀ρ/V`, and `a₁ = ρ/2`, `a₂ = Δρ/3`. In complex dimension one
/// `|R|² = |Ric|² = ρ²`, so the quadratic curvature terms of `a₂` cancel.
pub fn scalar_curvature(metric: &RadialMetric, s: f64) -> Result<CurvatureReport> {
    const OP: &str = "scalar_curvature";
    if !(s >= 0.0 && s.is_finite()) {
        return Err(invalid(OP, "s must be finite and nonnegative"));
    }
    let x = x_of_s(s);
    let v = metric.volume_jet(OP, x, 6)?;
    let two = Jet::constant(2.0, 2);
    let rho = &(&two - &radial_laplacian_jet(&v.ln(), x)) * &v.truncate(2).recip();
    let lap_rho = radial_laplacian_jet(&rho, x).value() / v.value();
    Ok(CurvatureReport {
        s,
        rho: rho.value(),
        lap_rho,
        a1: rho.value() / 2.0,
        a2: lap_rho / 3.0,
    })
}
