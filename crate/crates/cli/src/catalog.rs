//! Named metric and potential families accepted by the subcommands.

use bergman_core::centering::{rho_homogeneous, TracelessHermitian};
use bergman_core::cp1_bergman::{RadialFunction, RadialMetric};
use bergman_core::cpn_geometry::first_eigenbasis;
use num_complex::Complex64;

use crate::config::required;
use crate::report::CliError;

pub const RADIAL_FAMILIES: &[&str] = &[
    "fubini-study",
    "eigen-bump",
    "rational-bump",
    "phi1-polynomial",
];

/// A radial function from a family name and its parameters.
pub fn radial(
    family: &str,
    eps: Option<f64>,
    coeffs: &Option<Vec<f64>>,
) -> Result<RadialFunction, CliError> {
    match family {
        "fubini-study" | "zero" => Ok(RadialFunction::zero()),
        "eigen-bump" => Ok(RadialFunction::eigen_bump(required(&eps, "eps")?)),
        "rational-bump" => Ok(RadialFunction::rational_bump(required(&eps, "eps")?)),
        "phi1-polynomial" => Ok(RadialFunction::phi1_polynomial(required(coeffs, "coeffs")?)),
        other => Err(CliError::config(format!(
            "unknown family `{other}`; expected one of {}",
            RADIAL_FAMILIES.join(", ")
        ))),
    }
}

pub fn metric(
    family: &str,
    eps: Option<f64>,
    coeffs: &Option<Vec<f64>>,
) -> Result<RadialMetric, CliError> {
    Ok(RadialMetric::new(radial(family, eps, coeffs)?)?)
}

pub type BoxedPotential = Box<dyn Fn(&[Complex64]) -> f64 + Sync>;

/// Potentials on CP¹ evaluated at unit homogeneous coordinates.
pub fn potential(
    kind: &str,
    eps: Option<f64>,
    index: Option<usize>,
    coords: &Option<Vec<f64>>,
    coeffs: &Option<Vec<f64>>,
) -> Result<BoxedPotential, CliError> {
    match kind {
        "zero" => Ok(Box::new(|_: &[Complex64]| 0.0)),
        "theta" => {
            let eps = required(&eps, "eps")?;
            let i = required(&index, "index")?;
            let mut basis = first_eigenbasis(1)?;
            if i >= basis.len() {
                return Err(CliError::config(format!(
                    "`index` must be below {}",
                    basis.len()
                )));
            }
            let theta = basis.swap_remove(i);
            Ok(Box::new(move |z: &[Complex64]| eps * theta.eval(z)))
        }
        "gauge" => {
            let b = TracelessHermitian::from_coords(1, &required(coords, "coords")?)?;
            let e = b.exp();
            Ok(Box::new(move |z: &[Complex64]| rho_homogeneous(&e, z)))
        }
        "radial" => {
            let f = RadialFunction::phi1_polynomial(required(coeffs, "coeffs")?);
            Ok(Box::new(move |z: &[Complex64]| {
                f.eval(z[0].norm_sqr() / (z[0].norm_sqr() + z[1].norm_sqr()))
            }))
        }
        other => Err(CliError::config(format!(
            "unknown potential `{other}`; expected zero, theta, gauge or radial"
        ))),
    }
}
