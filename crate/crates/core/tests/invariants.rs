use capmono_core::geometry::{unit_sphere_area, ModelManifold, WarpProfile};
use capmono_core::mcf::iso_ratio;
use capmono_core::monotone::{beta_threshold, phi_beta, sample_u, u_beta, LevelSource};
use capmono_core::numerics::{integrate, QuadSpec};
use capmono_core::potential::solve_exterior;
use capmono_core::willmore::{check_willmore, kasue_bounds, SurfaceSpec};
use proptest::prelude::*;

fn warp_strategy() -> impl Strategy<Value = WarpProfile> {
    prop_oneof![
        Just(WarpProfile::Euclidean),
        (0.1f64..=1.0).prop_map(|alpha| WarpProfile::Cone { alpha }),
        (0.1f64..0.95).prop_map(|alpha| WarpProfile::SmoothedCone { alpha }),
    ]
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn quadrature_is_additive(lo in -3.0f64..0.0, mid in 0.0f64..2.0, hi in 2.0f64..5.0) {
        let f = |x: f64| (x * 1.3).sin() * (-0.2 * x * x).exp() + x * x;
        let spec = QuadSpec::default();
        let whole = integrate(f, lo, hi, &spec).unwrap();
        let parts = integrate(f, lo, mid, &spec).unwrap() + integrate(f, mid, hi, &spec).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-12 * whole.abs().max(1.0));
        let reversed = integrate(f, hi, lo, &spec).unwrap();
        prop_assert_eq!(reversed, -whole);
    }

    #[test]
    fn cone_capacity_scales(alpha in 0.1f64..=1.0, r0 in 0.2f64..5.0, n in 3usize..=6) {
        let m = ModelManifold::new(n, WarpProfile::Cone { alpha }).unwrap();
        let cap = solve_exterior(&m, r0).unwrap().capacity().unwrap();
        let expected = alpha.powi(n as i32 - 1) * r0.powi(n as i32 - 2);
        prop_assert!((cap - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn potential_is_a_decreasing_fraction(warp in warp_strategy(), n in 3usize..=5, x in 0.0f64..1.0) {
        let m = ModelManifold::new(n, warp).unwrap();
        let sol = solve_exterior(&m, 1.0).unwrap();
        let r = 10f64.powf(4.0 * x);
        let u = sol.value(r).unwrap();
        prop_assert!(u > 0.0 && u <= 1.0 + 1e-15);
        prop_assert!(sol.derivative(r) < 0.0);
        let back = sol.level_radius(u).unwrap();
        prop_assert!((back - r).abs() <= 1e-9 * r, "{} vs {}", back, r);
    }

    #[test]
    fn u_beta_is_nondecreasing(warp in warp_strategy(), n in 3usize..=5, beta_excess in 0.0f64..3.0, t in 1e-3f64..0.99) {
        let m = ModelManifold::new(n, warp).unwrap();
        let sol = solve_exterior(&m, 1.0).unwrap();
        let beta = beta_threshold(n) + beta_excess;
        let src = LevelSource::from(&sol);
        let low = u_beta(src, beta, t).unwrap().value;
        let high = u_beta(src, beta, (t * 1.5).min(1.0)).unwrap().value;
        let scale = u_beta(src, beta, 1.0).unwrap().value;
        prop_assert!(high >= low - 1e-9 * scale);
        let sample = sample_u(src, beta, t).unwrap();
        prop_assert!(sample.d_surface >= -1e-10 * scale);
    }

    #[test]
    fn phi_is_u_in_logarithmic_time(warp in warp_strategy(), beta in 0.5f64..3.0, s in 0.0f64..6.0) {
        let m = ModelManifold::new(3, warp).unwrap();
        let sol = solve_exterior(&m, 1.0).unwrap();
        let phi = phi_beta(&sol, beta, s).unwrap();
        let u = u_beta((&sol).into(), beta, (-s).exp()).unwrap();
        prop_assert!((phi.value - u.value).abs() <= 1e-12 * u.value);
    }

    #[test]
    fn willmore_inequality_on_coordinate_spheres(warp in warp_strategy(), n in 3usize..=5, r in 0.05f64..50.0) {
        let m = ModelManifold::new(n, warp).unwrap();
        let report = check_willmore(&SurfaceSpec::coordinate_sphere(m, r).unwrap(), 1e-10).unwrap();
        prop_assert!(!report.failed(), "{:?}", report);
    }

    #[test]
    fn bishop_gromov_ratios_decrease(warp in warp_strategy(), n in 3usize..=5, r in 0.01f64..100.0) {
        let m = ModelManifold::new(n, warp).unwrap();
        let near = m.bishop_gromov(r).unwrap();
        let far = m.bishop_gromov(r * 1.7).unwrap();
        prop_assert!(far.volume_ratio <= near.volume_ratio + 1e-10);
        prop_assert!(far.area_ratio <= near.area_ratio + 1e-10);
        prop_assert!(far.area_ratio >= m.avr() - 1e-12);
    }

    #[test]
    fn isoperimetric_ratio_exceeds_avr(warp in warp_strategy(), rho in 0.01f64..100.0) {
        let m = ModelManifold::new(3, warp).unwrap();
        prop_assert!(iso_ratio(&m, rho).unwrap() >= m.avr() - 1e-10);
    }

    #[test]
    fn kasue_identity_is_exact(warp in warp_strategy(), n in 3usize..=5, beta_excess in 0.0f64..3.0) {
        let m = ModelManifold::new(n, warp).unwrap();
        let sol = solve_exterior(&m, 1.0).unwrap();
        let k = kasue_bounds((&sol).into(), beta_threshold(n) + beta_excess).unwrap();
        prop_assert!(k.identity_residual <= 1e-10 * (k.bound * k.weight).abs());
        prop_assert!(k.bound > 0.0 && k.bound <= k.sup_h * (1.0 + 1e-10));
    }

    #[test]
    fn quotient_scales_capacity(n in 3usize..=5, order in 1u32..=6) {
        let full = ModelManifold::new(n, WarpProfile::Euclidean).unwrap();
        let quotient = ModelManifold::with_cross_area(n, WarpProfile::Euclidean, unit_sphere_area(n) / order as f64).unwrap();
        let a = solve_exterior(&full, 1.0).unwrap().capacity().unwrap();
        let b = solve_exterior(&quotient, 1.0).unwrap().capacity().unwrap();
        prop_assert!((a / b - order as f64).abs() < 1e-12 * order as f64);
    }
}
