//! Bergman densities on polarized projective spaces and the coefficients of
//! their Tian–Yau–Zelditch expansions.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`exact_comb`]: exact rational combinatorics at the Fubini–Study base
//!   point (conversion polynomials, monomial Laplacians, variation series and
//!   the polynomiality criterion).
//! * [`cpn_geometry`]: closed-form facts about the Fubini–Study metric on CPⁿ.
//! * [`cp1_bergman`]: numerical Bergman densities for rotationally invariant
//!   metrics on CP¹.
//! * [`asymptotics`]: extraction of expansion coefficients from density
//!   samples.
//! * [`centering`]: the contraction-mapping solver that centers a potential
//!   with respect to the automorphism group.
//!
//! Data-parallel loops go through [`exec`], which uses rayon when the
//! `parallel` feature is enabled and falls back to plain iterators otherwise.

// Negated comparisons reject NaN on purpose; index loops mirror the formulas.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::suspicious_arithmetic_impl
)]

pub mod asymptotics;
pub mod centering;
pub mod cp1_bergman;
pub mod cpn_geometry;
mod error;
pub mod exact_comb;
pub mod exec;
pub mod jet;
pub mod quadrature;

pub use error::{Error, Result};
