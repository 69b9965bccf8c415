//! Exact rational combinatorics at the Fubini–Study base point of CPⁿ.
//!
//! Everything here runs on arbitrary-precision rationals; no floating point
//! is involved. The pieces are:
//!
//! * [`MultiIndex`], [`RationalPolynomial`] and [`InverseMSeries`], the value
//!   types;
//! * the conversion table `a_{k,l}` expressing powers of the Fubini–Study
//!   Laplacian at the origin through powers of the flat Laplacian
//!   ([`conversion_polynomials`]);
//! * the monomial rewrite oracles ([`MonomialMeasure`], [`MixedPolynomial`]);
//! * the first-variation series of the density along eigenfunction
//!   directions and the eigenvalue selection built on it ([`variation`]).

mod conversion;
mod monomial;
mod multi_index;
mod polynomial;
mod rational;
mod series;
pub mod variation;

pub use conversion::{
    conversion_polynomials, delta_c_power_at_zero, fs_monomial_integral, laplacian_power_at_zero,
    ConversionTable,
};
pub use monomial::{MixedPolynomial, MonomialMeasure};
pub use multi_index::MultiIndex;
pub use polynomial::RationalPolynomial;
pub(crate) use rational::to_f64;
pub use rational::{factorial, format_rational, parse_rational, Rational};
pub use series::InverseMSeries;
pub use variation::{
    admissible_eigenvalue_scan, eigen_delta_c_values, polynomiality_criterion,
    variation_order_polynomial, variation_series_eigen, Criterion, VariationSeries,
};
