//! Gauss–Legendre quadrature: fixed rules, a globally adaptive driver on
//! finite intervals and the half-line, and a product rule on CP¹.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::exec::{map_range, Execution};
use crate::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule on `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule_pair() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    RULES.get_or_init(|| (GaussLegendre::new(10), GaussLegendre::new(20)))
}

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Default::default()
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let (lo, hi) = rule_pair();
    let coarse = lo.integrate(f, a, b);
    let fine = hi.integrate(f, a, b);
    Panel {
        a,
        b,
        value: fine,
        error: (fine - coarse).abs(),
    }
}

/// Globally adaptive 10/20-point Gauss–Legendre on `[a, b]`: bisects the
/// panel with the largest error estimate until the summed estimate is below
/// `max(rel_tol·|I|, abs_tol)`.
pub fn integrate<F: Fn(f64) -> f64>(
    op: &'static str,
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<Quad> {
    let mut heap = BinaryHeap::new();
    heap.push(panel(&f, a, b));
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        let target = (opts.rel_tol * value.abs()).max(opts.abs_tol);
        if error <= target || error == 0.0 {
            return Ok(Quad {
                value,
                error,
                intervals: heap.len(),
            });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::QuadratureNonConvergence {
                op,
                budget: opts.max_intervals,
                error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureNonConvergence {
                op,
                budget: opts.max_intervals,
                error,
            });
        }
        heap.push(panel(&f, worst.a, mid));
        heap.push(panel(&f, mid, worst.b));
    }
}

/// `∫₀^∞ f(s) ds` through the compactifying substitution `s = t/(1-t)`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(
    op: &'static str,
    f: F,
    opts: QuadOptions,
) -> Result<Quad> {
    integrate(
        op,
        |t| {
            let u = 1.0 - t;
            f(t / u) / (u * u)
        },
        0.0,
        1.0,
        opts,
    )
}

/// A point of CP¹ as a unit vector `(Z₀, Z₁)` together with its quadrature
/// weight for the unit-volume Fubini–Study measure.
#[derive(Debug, Clone, Copy)]
pub struct SpherePoint {
    pub z: [Complex64; 2],
    pub weight: f64,
}

impl SpherePoint {
    /// Affine chart coordinate `Z₁/Z₀`.
    pub fn chart(&self) -> Complex64 {
        self.z[1] / self.z[0]
    }
}

/// Product rule on CP¹: Gauss–Legendre in `t = |Z₁|²/|Z|²` (the Fubini–Study
/// measure is `dt dθ / 2π` in these coordinates) times the trapezoid rule in
/// the phase of `Z₁`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    points: Vec<SpherePoint>,
}

impl SphereRule {
    pub fn new(radial: usize, angular: usize) -> Self {
        let gl = GaussLegendre::new(radial);
        let mut points = Vec::with_capacity(radial * angular);
        for (&x, &w) in gl.nodes().iter().zip(gl.weights()) {
            let t = 0.5 * (x + 1.0);
            let wt = 0.5 * w / angular as f64;
            for k in 0..angular {
                let theta = 2.0 * PI * k as f64 / angular as f64;
                points.push(SpherePoint {
                    z: [
                        Complex64::new((1.0 - t).sqrt(), 0.0),
                        Complex64::from_polar(t.sqrt(), theta),
                    ],
                    weight: wt,
                });
            }
        }
        SphereRule { points }
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn integrate<F: Fn(&[Complex64; 2]) -> f64 + Sync>(&self, mode: Execution, f: F) -> f64 {
        map_range(mode, self.points.len(), |i| {
            let p = &self.points[i];
            p.weight * f(&p.z)
        })
        .into_iter()
        .sum()
    }

    /// Integrates a vector-valued function of length `dim`.
    pub fn integrate_vec<F: Fn(&[Complex64; 2]) -> Vec<f64> + Sync>(
        &self,
        mode: Execution,
        dim: usize,
        f: F,
    ) -> Vec<f64> {
        let chunks = 64.min(self.points.len()).max(1);
        let per = self.points.len().div_ceil(chunks);
        let partial = map_range(mode, chunks, |c| {
            let mut acc = vec![0.0; dim];
            for p in self.points.iter().skip(c * per).take(per) {
                for (a, v) in acc.iter_mut().zip(f(&p.z)) {
                    *a += p.weight * v;
                }
            }
            acc
        });
        partial.into_iter().fold(vec![0.0; dim], |mut acc, v| {
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b;
            }
            acc
        })
    }
}
