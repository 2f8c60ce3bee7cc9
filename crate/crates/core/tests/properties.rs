//! Invariants over randomly drawn weights, series, anchors and radii.

use num_complex::Complex64;
use proptest::prelude::*;

use bergman_core::analysis::{lp_identity_residual, LpIdentity};
use bergman_core::kernels::{kernel_plus_n_consistency, kernel_slice};
use bergman_core::operators::{apply_integral_form, FracDerivative};
use bergman_core::projection::{project, DiskSample, PolarGrid};
use bergman_core::series::PowerSeries;
use bergman_core::weights::{parse_weight_spec, RadialWeight};

fn std_w(alpha: f64) -> RadialWeight {
    RadialWeight::standard(alpha).unwrap()
}

fn series_strategy(max_degree: usize) -> impl Strategy<Value = PowerSeries> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..=max_degree + 1)
        .prop_map(|c| PowerSeries::new(c.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()))
}

fn anchor(max_modulus: f64) -> impl Strategy<Value = Complex64> {
    (0.0f64..max_modulus, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

/// A few weights whose moments come from quadrature; built once per test.
fn quadrature_weights() -> Vec<RadialWeight> {
    ["log:beta=2", "zero:[0.3,0.4]:std:alpha=1", "std:alpha=0+"]
        .iter()
        .map(|s| parse_weight_spec(s).unwrap())
        .collect()
}

fn max_rel(a: &PowerSeries, b: &PowerSeries) -> f64 {
    a.max_coeff_deviation(b) / b.max_abs_coeff().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn standard_moments_are_positive_and_decreasing(alpha in -0.95f64..6.0) {
        let t = std_w(alpha).moments_upto(60).unwrap();
        prop_assert!(t.values.iter().all(|&m| m > 0.0));
        prop_assert!(t.values.windows(2).all(|w| w[1] < w[0]));
        t.check_invariants().unwrap();
    }

    #[test]
    fn dilation_commutes_with_the_multiplier(
        a in -0.9f64..4.0,
        b in -0.9f64..4.0,
        f in series_strategy(30),
        r in 0.05f64..0.99,
    ) {
        let rop = FracDerivative::build(&std_w(a), &std_w(b), f.degree()).unwrap();
        let lhs = rop.apply(&f.dilate(r).unwrap()).unwrap();
        let rhs = rop.apply(&f).unwrap().dilate(r).unwrap();
        prop_assert!(lhs.max_coeff_deviation(&rhs) <= 1e-12 * rhs.max_abs_coeff().max(1e-300));
    }

    #[test]
    fn multiplier_maps_kernel_to_kernel(a in -0.9f64..4.0, b in -0.9f64..4.0, z in anchor(0.95)) {
        let dev = kernel_plus_n_consistency(&std_w(a), &std_w(b), 0, z, 80).unwrap();
        prop_assert!(dev <= 1e-12, "{dev}");
    }

    #[test]
    fn inversion_returns_the_input(a in -0.9f64..4.0, b in -0.9f64..4.0, f in series_strategy(40)) {
        let rop = FracDerivative::build(&std_w(a), &std_w(b), f.degree()).unwrap();
        let back = rop.swapped().apply(&rop.apply(&f).unwrap()).unwrap();
        for (x, y) in back.coeffs().iter().zip(f.coeffs()) {
            prop_assert!((x - y).norm() <= 1e-12 * y.norm().max(1e-300));
        }
    }

    #[test]
    fn kernel_is_hermitian(alpha in -0.9f64..4.0, z in anchor(0.8), w in anchor(0.8)) {
        let om = std_w(alpha);
        let bz = kernel_slice(&om, z, 200).unwrap().series;
        let bw = kernel_slice(&om, w, 200).unwrap().series;
        let lhs = bz.eval(w).unwrap();
        let rhs = bw.eval(z).unwrap().conj();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
    }

    #[test]
    fn kernel_reproduces_polynomials(alpha in -0.9f64..4.0, p in series_strategy(32), z in anchor(0.99)) {
        let om = std_w(alpha);
        let n = p.degree();
        let moments = om.moments_upto(n).unwrap();
        let b = kernel_slice(&om, z, n).unwrap().series;
        let got = p.inner_product_radial(&b, &moments).unwrap();
        let want = p.eval(z).unwrap();
        prop_assert!((got - want).norm() <= 1e-10 * want.norm().max(1.0));
    }

    #[test]
    fn integral_form_matches_multiplier(a in -0.9f64..4.0, b in -0.9f64..4.0, f in series_strategy(20), z in anchor(0.9)) {
        let (om, nu) = (std_w(a), std_w(b));
        let via_mult = FracDerivative::build(&om, &nu, f.degree()).unwrap().apply(&f).unwrap().eval(z).unwrap();
        let via_int = apply_integral_form(&om, &nu, &f, z).unwrap();
        prop_assert!((via_mult - via_int).norm() <= 1e-8 * (1.0 + via_mult.norm()));
    }

    #[test]
    fn littlewood_paley_on_standard_weights(alpha in -0.9f64..3.0, f in series_strategy(25), g in series_strategy(25)) {
        let om = std_w(alpha);
        let res = lp_identity_residual(&f, &g, &om).unwrap();
        let scale = LpIdentity::new(&om, 25).unwrap().pairing(&f, &g).unwrap().norm() + 1.0;
        prop_assert!(res <= 1e-8 * scale, "{res}");
    }

    #[test]
    fn grid_projection_reproduces_polynomials(alpha in -0.9f64..3.0, f in series_strategy(12)) {
        let om = std_w(alpha);
        let n = f.degree();
        let grid = PolarGrid::for_weight(&om, 40, 2 * n + 2).unwrap();
        let p = project(&om, &DiskSample::from_series(&grid, &f).unwrap(), n).unwrap();
        prop_assert!(max_rel(&p, &f) <= 1e-12);
    }
}

proptest! {
    // quadrature weights are slower; fewer cases
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quadrature_weights_map_kernels(i in 0usize..3, j in 0usize..3, z in anchor(0.9)) {
        let ws = quadrature_weights();
        let dev = kernel_plus_n_consistency(&ws[i], &ws[j], 0, z, 40).unwrap();
        prop_assert!(dev <= 1e-8, "{dev}");
    }

    #[test]
    fn monomials_are_orthogonal_on_the_grid(i in 0usize..3, j in 0usize..10, k in 0usize..10) {
        let w = &quadrature_weights()[i];
        let grid = PolarGrid::for_weight(w, 200, 32).unwrap();
        let zj = DiskSample::from_series(&grid, &PowerSeries::monomial(j)).unwrap();
        let p = project(w, &zj, 12).unwrap();
        let want = if j == k { 1.0 } else { 0.0 };
        prop_assert!((p.coeff(k) - Complex64::new(want, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn discrete_moments_match_continuous_moments(i in 0usize..3) {
        let w = &quadrature_weights()[i];
        let grid = PolarGrid::for_weight(w, 400, 8).unwrap();
        let discrete = grid.discrete_moments(w, 20).unwrap();
        let exact = w.moments_upto(20).unwrap();
        for (d, e) in discrete.iter().zip(&exact.values) {
            prop_assert!((d - e).abs() <= 1e-8 * e, "{d} vs {e}");
        }
    }
}
