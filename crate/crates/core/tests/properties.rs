use bergman_core::centering::{Centerer, CenteringOptions, TracelessHermitian};
use bergman_core::cp1_bergman::{bergman_density, scalar_curvature, RadialFunction, RadialMetric};
use bergman_core::cpn_geometry::phi_k_laplacian_residual;
use num_complex::Complex64;
use proptest::prelude::*;

/// Small φ₁-polynomial potentials; `|Δu| ≤ 0.6` keeps ω positive.
fn small_potential() -> impl Strategy<Value = RadialFunction> {
    prop::collection::vec(-0.05f64..0.05, 1..5).prop_map(RadialFunction::phi1_polynomial)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adding_a_constant_leaves_density_unchanged(
        u in small_potential(),
        c in -3.0f64..3.0,
        m in 1u32..25,
        s in 0.0f64..20.0,
    ) {
        let a = RadialMetric::new(u.clone()).unwrap();
        let b = RadialMetric::new(u.add_scaled(&RadialFunction::constant(1.0), c)).unwrap();
        let da = bergman_density(&a, m, &[s]).unwrap().values[0];
        let db = bergman_density(&b, m, &[s]).unwrap().values[0];
        prop_assert!((da - db).abs() <= 1e-12 * da.abs(), "{} vs {}", da, db);
    }

    #[test]
    fn density_is_chart_independent(
        u in small_potential(),
        m in 1u32..20,
        s in 0.01f64..50.0,
    ) {
        let a = RadialMetric::new(u).unwrap();
        let da = bergman_density(&a, m, &[s]).unwrap().values[0];
        let db = bergman_density(&a.reflected(), m, &[1.0 / s]).unwrap().values[0];
        prop_assert!((da - db).abs() < 1e-8, "{} vs {}", da, db);
    }

    #[test]
    fn density_is_positive_and_smooth(u in small_potential(), m in 1u32..30) {
        let a = RadialMetric::new(u).unwrap();
        let grid: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let d = bergman_density(&a, m, &grid).unwrap();
        prop_assert!(d.values.iter().all(|&v| v > 0.0));
        let second = d.values.windows(3).map(|w| (w[0] - 2.0 * w[1] + w[2]).abs()).fold(0.0, f64::max);
        prop_assert!(second < 0.1, "second difference {}", second);
    }

    #[test]
    fn curvature_integrates_to_two(u in small_potential()) {
        let a = RadialMetric::new(u).unwrap();
        // ∫ρω = ∫₀¹ ρ V dx by Gauss–Legendre.
        let gl = bergman_core::quadrature::GaussLegendre::new(40);
        let total = gl.integrate(|x| {
            let s = (1.0 - x) / x;
            scalar_curvature(&a, s).unwrap().rho * a.volume_density("test", x).unwrap()
        }, 0.0, 1.0);
        prop_assert!((total - 2.0).abs() < 1e-9, "{}", total);
    }

    #[test]
    fn phi_k_identity(n in 1u32..4, k in 1u32..8, s in 0.0f64..1e3) {
        let r = phi_k_laplacian_residual(n, k, s).unwrap();
        prop_assert!(r.abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn step_map_contracts(
        a in prop::collection::vec(-0.1f64..0.1, 3),
        b in prop::collection::vec(-0.1f64..0.1, 3),
        w in prop::collection::vec(-0.03f64..0.03, 3),
    ) {
        let phi = move |z: &[Complex64]| {
            let p = z[0] * z[1].conj();
            w[0] * (z[0].norm_sqr() - 0.5) + w[1] * p.re + w[2] * p.im
        };
        let c = Centerer::new(1, &phi, CenteringOptions::default()).unwrap();
        let a = TracelessHermitian::from_coords(1, &a).unwrap();
        let b = TracelessHermitian::from_coords(1, &b).unwrap();
        let lhs = (c.step(&b).matrix() - c.step(&a).matrix()).norm();
        let rhs = 0.5 * (b.matrix() - a.matrix()).norm();
        prop_assert!(lhs <= rhs, "{} > {}", lhs, rhs);
    }
}
