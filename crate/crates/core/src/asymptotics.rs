//! Extraction of expansion coefficients `a₀..a_K` from density samples.
//!
//! The model is `Π_m = mⁿ(a₀ + a₁/m + … + a_K/m^K)`. With exactly `K+1`
//! samples the coefficients solve a Vandermonde system in `1/m`; with more
//! they are the least-squares fit. Exact rational samples take an exact
//! path; floating samples take a column-scaled SVD solve whose condition
//! number is reported.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::invalid;
use crate::exact_comb::{format_rational, Rational, RationalPolynomial};
use crate::{Error, Result};

/// Condition numbers above this are flagged in [`FitResult::warning`].
pub const ILL_CONDITIONED: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub n: u32,
    pub order: u32,
    pub coeffs: Vec<f64>,
    /// Exact coefficients when the samples were exact.
    pub exact: Option<Vec<Rational>>,
    /// Largest `|model(m) - value|` over the samples.
    pub residual: f64,
    /// 2-norm condition number of the column-scaled design matrix.
    pub condition: f64,
    pub warning: Option<String>,
}

impl Serialize for FitResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FitResult", 7)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("K", &self.order)?;
        st.serialize_field("coeffs", &self.coeffs)?;
        let exact: Option<Vec<String>> = self
            .exact
            .as_ref()
            .map(|v| v.iter().map(format_rational).collect());
        st.serialize_field("exact", &exact)?;
        st.serialize_field("residual", &self.residual)?;
        st.serialize_field("condition", &self.condition)?;
        st.serialize_field("warning", &self.warning)?;
        st.end()
    }
}

fn check_samples(op: &'static str, ms: &[u64], order: u32) -> Result<()> {
    if ms.contains(&0) {
        return Err(invalid(op, "tensor powers must be positive"));
    }
    let mut distinct = ms.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != ms.len() {
        return Err(invalid(op, "tensor powers must be distinct"));
    }
    let required = order as usize + 1;
    if ms.len() < required {
        return Err(Error::InsufficientSamples {
            op,
            required,
            got: ms.len(),
        });
    }
    Ok(())
}

fn regime_warning(ms: &[u64], order: u32) -> Option<String> {
    ms.iter()
        .any(|&m| m <= order as u64)
        .then(|| format!("some samples have m <= K = {order}"))
}

fn condition_of(ms: &[u64], order: u32) -> f64 {
    let (a, _) = scaled_design(ms, order);
    let sv = a.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Design matrix `(1/m)^k` with each column scaled to unit max-norm.
fn scaled_design(ms: &[u64], order: u32) -> (DMatrix<f64>, Vec<f64>) {
    let cols = order as usize + 1;
    let mut a = DMatrix::from_fn(ms.len(), cols, |i, k| (ms[i] as f64).powi(-(k as i32)));
    let scales: Vec<f64> = (0..cols).map(|k| a.column(k).amax()).collect();
    for (k, sc) in scales.iter().enumerate() {
        a.column_mut(k).scale_mut(1.0 / sc);
    }
    (a, scales)
}

fn model(n: u32, coeffs: &[f64], m: f64) -> f64 {
    let inner = coeffs.iter().rev().fold(0.0, |acc, a| acc / m + a);
    m.powi(n as i32) * inner
}

/// Floating-point fit.
pub fn fit_expansion(samples: &[(u64, f64)], n: u32, order: u32) -> Result<FitResult> {
    const OP: &str = "fit_expansion";
    let ms: Vec<u64> = samples.iter().map(|s| s.0).collect();
    check_samples(OP, &ms, order)?;
    if samples.iter().any(|s| !s.1.is_finite()) {
        return Err(invalid(OP, "sample values must be finite"));
    }
    let (a, scales) = scaled_design(&ms, order);
    let b = DVector::from_iterator(
        samples.len(),
        samples.iter().map(|&(m, v)| v / (m as f64).powi(n as i32)),
    );
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let condition = if sv.min() == 0.0 {
        f64::INFINITY
    } else {
        sv.max() / sv.min()
    };
    if !condition.is_finite() {
        return Err(Error::Singular { op: OP });
    }
    let y = svd
        .solve(&b, sv.max() * f64::EPSILON)
        .map_err(|_| Error::Singular { op: OP })?;
    let coeffs: Vec<f64> = y.iter().zip(&scales).map(|(c, s)| c / s).collect();
    let residual = samples
        .iter()
        .map(|&(m, v)| (model(n, &coeffs, m as f64) - v).abs())
        .fold(0.0, f64::max);
    let mut warning = regime_warning(&ms, order);
    if condition > ILL_CONDITIONED {
        warning = Some(format!(
            "ill-conditioned design (condition {condition:.3e})"
        ));
    }
    Ok(FitResult {
        n,
        order,
        coeffs,
        exact: None,
        residual,
        condition,
        warning,
    })
}

/// Exact rational fit: interpolation in `1/m` for `K+1` samples, normal
/// equations otherwise.
pub fn fit_expansion_exact(samples: &[(u64, Rational)], n: u32, order: u32) -> Result<FitResult> {
    const OP: &str = "fit_expansion";
    let ms: Vec<u64> = samples.iter().map(|s| s.0).collect();
    check_samples(OP, &ms, order)?;
    let points: Vec<(Rational, Rational)> = samples
        .iter()
        .map(|(m, v)| {
            let mr = Rational::from_integer((*m).into());
            (mr.recip(), v / mr.pow(n as i32))
        })
        .collect();
    let cols = order as usize + 1;
    let exact = if samples.len() == cols {
        let p = RationalPolynomial::interpolate(&points)?;
        (0..cols).map(|k| p.coeff(k)).collect()
    } else {
        let mut ata = vec![vec![Rational::zero(); cols]; cols];
        let mut atb = vec![Rational::zero(); cols];
        for (x, y) in &points {
            let pows: Vec<Rational> = (0..cols).map(|k| x.pow(k as i32)).collect();
            for i in 0..cols {
                atb[i] += &pows[i] * y;
                for j in 0..cols {
                    ata[i][j] += &pows[i] * &pows[j];
                }
            }
        }
        solve_exact(OP, ata, atb)?
    };
    let residual = points
        .iter()
        .zip(&ms)
        .map(|((x, y), &m)| {
            let fitted = exact
                .iter()
                .rev()
                .fold(Rational::zero(), |acc, a| acc * x + a);
            let diff = (fitted - y) * Rational::from_integer(m.into()).pow(n as i32);
            crate::exact_comb::to_f64(&diff.abs())
        })
        .fold(0.0, f64::max);
    let condition = condition_of(&ms, order);
    Ok(FitResult {
        n,
        order,
        coeffs: exact.iter().map(crate::exact_comb::to_f64).collect(),
        exact: Some(exact),
        residual,
        condition,
        warning: regime_warning(&ms, order),
    })
}

/// Gaussian elimination over the rationals.
fn solve_exact(
    op: &'static str,
    mut a: Vec<Vec<Rational>>,
    mut b: Vec<Rational>,
) -> Result<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::Singular { op })?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Rational::one() / &a[col][col];
        for r in (col + 1)..n {
            let f = &a[r][col] * &inv;
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let d = &f * &a[col][c];
                a[r][c] -= d;
            }
            let d = &f * &b[col];
            b[r] -= d;
        }
    }
    let mut x = vec![Rational::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in (r + 1)..n {
            acc -= &a[r][c] * &x[c];
        }
        x[r] = acc / &a[r][r];
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanishingEntry {
    pub k: u32,
    pub value: f64,
    pub vanishes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanishingReport {
    pub n: u32,
    pub tol: f64,
    pub residual: f64,
    pub entries: Vec<VanishingEntry>,
}

/// `|a_k| < tol` for each `k` in `(n, K]`; empty when `K ≤ n`. Exact
/// coefficients are tested exactly when available.
pub fn vanishing_report(fit: &FitResult, n: u32, tol: f64) -> VanishingReport {
    let entries = ((n + 1)..=fit.order)
        .map(|k| {
            let value = fit.coeffs[k as usize];
            let vanishes = match &fit.exact {
                Some(e) if tol == 0.0 => e[k as usize].is_zero(),
                _ => value.abs() < tol,
            };
            VanishingEntry { k, value, vanishes }
        })
        .collect();
    VanishingReport {
        n,
        tol,
        residual: fit.residual,
        entries,
    }
}
