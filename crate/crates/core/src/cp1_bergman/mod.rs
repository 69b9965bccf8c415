//! Bergman densities of rotationally invariant metrics on CP¹.
//!
//! Everything is written in the variable `x = 1/(1+|z|²) ∈ (0, 1]`, the
//! first Fubini–Study eigenfunction family member `φ₁`. In this variable the
//! unit-volume Fubini–Study measure is `dx`, the radial Laplacian is
//! `ΔF = (1-2x)F' + x(1-x)F''`, and the catalog perturbations are
//! polynomials. The point `z = 0` is `x = 1`, the point at infinity `x = 0`.
//!
//! A metric is `h = x·e^{-u}` for a radial potential `u`; `u ≡ 0` is
//! Fubini–Study. Its Kähler form is `ω = (1 + Δu)ω₀`, so the volume stays 1.

mod curvature;
mod density;
mod metric;
mod profile;
mod variation;

pub use curvature::{scalar_curvature, CurvatureReport};
pub use density::{
    bergman_density, bergman_density_with, density_sweep, density_with_potential, section_norms,
    section_norms_with, DensityResult,
};
pub use metric::RadialMetric;
pub use profile::RadialFunction;
pub use variation::{first_variation, FirstVariation, MIN_FD_STEP};

/// `x = 1/(1+s)`.
pub fn x_of_s(s: f64) -> f64 {
    1.0 / (1.0 + s)
}

/// `s = (1-x)/x`; infinite at `x = 0`.
pub fn s_of_x(x: f64) -> f64 {
    (1.0 - x) / x
}
