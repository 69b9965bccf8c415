//! Subcommand arguments and handlers.

use std::path::PathBuf;

use bergman_core::asymptotics::{fit_expansion, vanishing_report};
use bergman_core::centering::{center as run_center, CenteringOptions};
use bergman_core::cp1_bergman::{self as cp1, density_sweep};
use bergman_core::cpn_geometry::{fs_density_quadrature, monomial_integral_quadrature};
use bergman_core::exact_comb::{
    admissible_eigenvalue_scan, conversion_polynomials, factorial, fs_monomial_integral,
    parse_rational, polynomiality_criterion, variation_series_eigen, MultiIndex, Rational,
};
use bergman_core::exec::Execution;
use clap::Args;
use num_traits::ToPrimitive;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog;
use crate::config::{self, positive, required};
use crate::report::{emit, float, json_text, poly_in_t, series_json, CliError};

type Handler<A> = fn(A) -> Result<(), CliError>;

/// Loads the config, merges flags, and runs the handler. On failure the
/// merged parameters travel with the error.
pub fn run<A: Serialize + DeserializeOwned>(
    flags: &A,
    config_path: &Option<PathBuf>,
    handler: Handler<A>,
) -> Result<(), (CliError, Value)> {
    let fallback = serde_json::to_value(flags).unwrap_or(Value::Null);
    let cfg = config::load(config_path.as_deref()).map_err(|e| (e, fallback.clone()))?;
    let (args, merged) = config::merge(flags, cfg).map_err(|e| (e, fallback))?;
    handler(args).map_err(|e| (e, merged))
}

const DEFAULT_GRID: &[f64] = &[0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0, 100.0];

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct ConvertPolyArgs {
    /// Complex dimension.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Highest order k of f_k.
    #[arg(long = "K")]
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

pub fn convert_poly(a: ConvertPolyArgs) -> Result<(), CliError> {
    let n = required(&a.n, "n")?;
    let k = required(&a.k, "K")?;
    let table = conversion_polynomials(n, k)?;
    let polys: Vec<String> = (1..=k).map(|i| poly_in_t(&table.polynomial(i))).collect();
    let mut v = serde_json::to_value(&table).expect("table serializes");
    v["K"] = json!(k);
    v["polynomials"] = json!(polys);
    emit(a.output.as_deref(), &json_text(&v))
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct VariationArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Eigenvalue λ as an integer or "p/q".
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    /// Use λ = k0(k0+n) instead of --lambda.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0: Option<u32>,
    /// Truncation order J.
    #[arg(long = "J")]
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<u32>,
    /// Largest k in the admissible-eigenvalue scan (default 6).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

pub fn variation(a: VariationArgs) -> Result<(), CliError> {
    let n = required(&a.n, "n")?;
    let j = required(&a.j, "J")?;
    let lambda = match (&a.lambda, a.k0) {
        (Some(l), None) => parse_rational(l)?,
        (None, Some(k0)) => Rational::from_integer(((k0 * (k0 + n)) as i64).into()),
        _ => return Err(CliError::config("give exactly one of `lambda` and `k0`")),
    };
    let v = variation_series_eigen(n, &lambda, j)?;
    let k_max = a.k_max.unwrap_or(6);
    let scan = if j > n {
        json!(admissible_eigenvalue_scan(n, k_max, j)?)
    } else {
        Value::Null
    };
    let out = json!({
        "n": n,
        "lambda": bergman_core::exact_comb::format_rational(&lambda),
        "J": j,
        "raw": series_json(&v.raw),
        "normalized": series_json(&v.normalized()),
        "centered": series_json(&v.centered_expansion()),
        "nonzero_orders_past_n": v.nonzero_orders_past_n(),
        "k_max": k_max,
        "admissible_k": scan,
    });
    emit(a.output.as_deref(), &json_text(&out))
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct PolynomialityArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0_max: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

pub fn polynomiality(a: PolynomialityArgs) -> Result<(), CliError> {
    let n = required(&a.n, "n")?;
    let k0_max = required(&a.k0_max, "k0_max")?;
    let table = (1..=k0_max)
        .map(|k0| polynomiality_criterion(n, k0))
        .collect::<Result<Vec<_>, _>>()?;
    let polynomial: Vec<u32> = table
        .iter()
        .filter(|c| c.is_polynomial)
        .map(|c| c.k0)
        .collect();
    let out = json!({ "n": n, "table": table, "polynomial_k0": polynomial });
    emit(a.output.as_deref(), &json_text(&out))
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct FsCheckArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<u32>,
    /// Values of |z|² (split evenly over coordinates when n > 1).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Pass threshold for the density deviation (default 1e-9).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

pub fn fs_check(a: FsCheckArgs) -> Result<(), CliError> {
    let n = required(&a.n, "n")?;
    let m_max = required(&a.m_max, "m_max")?;
    if n == 0 {
        return Err(CliError::config("`n` must be at least 1"));
    }
    let grid = a.grid.unwrap_or_else(|| DEFAULT_GRID.to_vec());
    let tol = positive(a.tol.unwrap_or(1e-12), "tol")?;
    let threshold = positive(a.threshold.unwrap_or(1e-9), "threshold")?;
    let mut rows = Vec::new();
    for m in 0..=m_max {
        let exact = Rational::new(factorial((m + n) as u64), factorial(m as u64))
            .to_f64()
            .unwrap_or(f64::NAN);
        let (values, norm_err) = if n == 1 {
            let d = cp1::bergman_density_with(
                &cp1::RadialMetric::fubini_study(),
                m,
                &grid,
                tol,
                Execution::default(),
            )?;
            let err = d
                .norms
                .iter()
                .enumerate()
                .map(|(j, q)| {
                    let b = fs_monomial_integral(1, m as u64, &MultiIndex::new(vec![j as u32]))
                        .map(|r| r.to_f64().unwrap_or(f64::NAN))
                        .unwrap_or(f64::NAN);
                    ((q - b) / b).abs()
                })
                .fold(0.0, f64::max);
            (d.values, err)
        } else {
            let values = grid
                .iter()
                .map(|&s| fs_density_quadrature(m, &vec![s / n as f64; n as usize], tol))
                .collect::<Result<Vec<_>, _>>()?;
            let mut err: f64 = 0.0;
            for p in MultiIndex::up_to_degree(n as usize, m) {
                let q =
                    monomial_integral_quadrature(&p, m, tol)? / std::f64::consts::PI.powi(n as i32);
                let b = fs_monomial_integral(n, m as u64, &p)?
                    .to_f64()
                    .unwrap_or(f64::NAN);
                err = err.max(((q - b) / b).abs());
            }
            (values, err)
        };
        let dev = values.iter().map(|v| (v - exact).abs()).fold(0.0, f64::max);
        rows.push(json!({
            "m": m,
            "expected": exact,
            "max_deviation": dev,
            "max_norm_rel_error": norm_err,
        }));
    }
    let max_dev = rows
        .iter()
        .map(|r| r["max_deviation"].as_f64().unwrap_or(f64::NAN))
        .fold(0.0, f64::max);
    let max_norm = rows
        .iter()
        .map(|r| r["max_norm_rel_error"].as_f64().unwrap_or(f64::NAN))
        .fold(0.0, f64::max);
    let out = json!({
        "n": n,
        "m_max": m_max,
        "grid": grid,
        "threshold": threshold,
        "max_deviation": max_dev,
        "max_norm_rel_error": max_norm,
        "pass": max_dev < threshold,
        "per_m": rows,
    });
    emit(a.output.as_deref(), &json_text(&out))
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct DensityArgs {
    /// fubini-study, eigen-bump, rational-bump or phi1-polynomial.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Coefficients of u in powers of φ₁ = 1/(1+|z|²).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
    /// Explicit list of tensor powers.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ms: Option<Vec<u32>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_min: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_step: Option<u32>,
    /// Values of |z|².
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

pub fn density(a: DensityArgs) -> Result<(), CliError> {
    let family = a.family.clone().unwrap_or_else(|| "fubini-study".into());
    let metric = catalog::metric(&family, a.eps, &a.coeffs)?;
    let ms = match (&a.ms, a.m_min, a.m_max) {
        (Some(ms), None, None) => ms.clone(),
        (None, lo, Some(hi)) => {
            let lo = lo.unwrap_or(0);
            let step = a.m_step.unwrap_or(1);
            if step == 0 {
                return Err(CliError::config("`m_step` must be positive"));
            }
            (lo..=hi).step_by(step as usize).collect()
        }
        _ => {
            return Err(CliError::config(
                "give either `ms` or `m_max` (with optional `m_min`, `m_step`)",
            ))
        }
    };
    if ms.is_empty() {
        return Err(CliError::config("m-range is empty"));
    }
    let grid = a.grid.clone().unwrap_or_else(|| DEFAULT_GRID.to_vec());
    let tol = positive(a.tol.unwrap_or(1e-12), "tol")?;
    let results = density_sweep(&metric, &ms, &grid, tol, Execution::default())?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(vec![]);
    let mut header = vec!["s".to_string()];
    header.extend(ms.iter().map(|m| format!("pi_{m}")));
    w.write_record(&header)
        .map_err(|e| CliError::io(e.to_string()))?;
    for (i, s) in grid.iter().enumerate() {
        let mut row = vec![float(*s)];
        row.extend(results.iter().map(|r| float(r.values[i])));
        w.write_record(&row)
            .map_err(|e| CliError::io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io(e.to_string()))?;
    emit(
        a.output.as_deref(),
        &String::from_utf8(bytes).expect("csv is utf-8"),
    )
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct FitArgs {
    /// Density CSV as written by `density`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// The |z|² row to fit (must match a grid value).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[arg(long = "K")]
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Threshold for the vanishing report (default 1e-8).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vanish_tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

pub fn read_samples(path: &std::path::Path, s: f64) -> Result<Vec<(u64, f64)>, CliError> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let header = r
        .headers()
        .map_err(|e| CliError::config(e.to_string()))?
        .clone();
    let ms = header
        .iter()
        .skip(1)
        .map(|h| {
            h.strip_prefix("pi_")
                .and_then(|m| m.parse::<u64>().ok())
                .ok_or_else(|| CliError::config(format!("unexpected column `{h}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| CliError::config(format!("bad number `{t}`: {e}")))
    };
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::config(e.to_string()))?;
        let row_s = parse(&rec[0])?;
        if (row_s - s).abs() <= 1e-12 * s.abs().max(1.0) {
            return ms
                .iter()
                .zip(rec.iter().skip(1))
                .map(|(&m, v)| Ok((m, parse(v)?)))
                .collect();
        }
    }
    Err(CliError::config(format!(
        "no row with s = {s} in {}",
        path.display()
    )))
}

pub fn fit(a: FitArgs) -> Result<(), CliError> {
    let input = required(&a.input, "input")?;
    let s = required(&a.s, "s")?;
    let n = a.n.unwrap_or(1);
    let k = required(&a.k, "K")?;
    let tol = positive(a.vanish_tol.unwrap_or(1e-8), "vanish_tol")?;
    let samples = read_samples(&input, s)?;
    let f = fit_expansion(&samples, n, k)?;
    let v = vanishing_report(&f, n, tol);
    let out = json!({ "s": s, "samples": samples, "fit": f, "vanishing": v });
    emit(a.output.as_deref(), &json_text(&out))
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct FirstVariationArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_eps: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_coeffs: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Finite-difference step (default 1e-5).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

pub fn first_variation(a: FirstVariationArgs) -> Result<(), CliError> {
    let family = required(&a.phi_family, "phi_family")?;
    let phi = catalog::radial(&family, a.phi_eps, &a.phi_coeffs)?;
    let m = required(&a.m, "m")?;
    let v = cp1::first_variation(&phi, m, a.s.unwrap_or(0.0), a.t.unwrap_or(1e-5))?;
    emit(a.output.as_deref(), &json_text(&v))
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct CenterArgs {
    /// zero, theta, gauge or radial.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Index of the θ basis function for `theta`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    /// Coordinates of B for the pure-gauge potential ρ_B.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
    /// Coefficients in φ₁ for `radial`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub damping: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radial: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angular: Option<usize>,
    /// Trace CSV path (stdout when absent).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Optional JSON summary of the final state.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
}

pub fn center(a: CenterArgs) -> Result<(), CliError> {
    let kind = required(&a.potential, "potential")?;
    let phi = catalog::potential(&kind, a.eps, a.index, &a.coords, &a.coeffs)?;
    let d = CenteringOptions::default();
    let opts = CenteringOptions {
        tol: positive(a.tol.unwrap_or(d.tol), "tol")?,
        max_iter: a.max_iter.unwrap_or(d.max_iter),
        damping: positive(a.damping.unwrap_or(d.damping), "damping")?,
        radial: a.radial.unwrap_or(d.radial),
        angular: a.angular.unwrap_or(d.angular),
        ..d
    };
    let state = run_center(1, &phi, opts)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(vec![]);
    w.write_record(["iteration", "step_norm", "residual_norm", "a_norm"])
        .map_err(|e| CliError::io(e.to_string()))?;
    for r in &state.trace {
        w.write_record([
            r.iteration.to_string(),
            float(r.step_norm),
            float(r.residual_norm),
            float(r.a_norm),
        ])
        .map_err(|e| CliError::io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io(e.to_string()))?;
    emit(
        a.output.as_deref(),
        &String::from_utf8(bytes).expect("csv is utf-8"),
    )?;
    if let Some(path) = &a.summary {
        let out = json!({
            "iterations": state.iteration,
            "a_coords": state.a.coords(),
            "a_norm": state.a.norm(),
            "residual": state.residual,
            "residual_norm": state.residual_norm(),
            "step_norm": state.step_norm,
        });
        emit(Some(path), &json_text(&out))?;
    }
    Ok(())
}
