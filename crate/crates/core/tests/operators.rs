use num_complex::Complex64;
use proptest::prelude::*;
use semiclassical::acceptance::{kinetic_test_functions, radial_momentum_residuals};
use semiclassical::operators::*;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn hydrogen_levels_oracle() {
    let levels = hydrogen_radial_levels(3, &HydrogenGrid::default()).unwrap();
    for (n, e) in levels.iter().enumerate() {
        let exact = -0.5 / ((n + 1) as f64).powi(2);
        assert!((e - exact).abs() < 1e-4, "{e} vs {exact}");
    }
}

#[test]
fn spurious_term_matches_the_multiplier() {
    let grid = SphericalGrid::offset(200, 200, 10.0).unwrap();
    let settings = OperatorSettings::default();
    for f in kinetic_test_functions() {
        let gf = GridFunction::spherical(&grid, |r, t| c(f(r, t)));
        let d = kinetic_discrepancy(&gf, &settings, 1e-2).unwrap();
        assert!(d.max_relative_error < 1e-3, "{}", d.max_relative_error);
    }
}

#[test]
fn radial_momentum_hermiticity_converges_at_fourth_order() {
    let res = radial_momentum_residuals(&[100, 200, 400, 800]).unwrap();
    for w in res.windows(2) {
        assert!((w[0] / w[1]).log2() > 3.5, "{res:?}");
    }
}

#[test]
fn naive_derivative_is_not_hermitian() {
    let grid = RadialGrid::offset(400, 10.0).unwrap();
    let s = OperatorSettings::default();
    let f = GridFunction::radial(&grid, |r| c((-r * r / 2.0).exp()));
    let g = GridFunction::radial(&grid, |r| c((1.0 + r) * (-r * r).exp()));
    let naive = hermiticity_residual(|u| apply_naive_radial_derivative(u, &s), &f, &g).unwrap();
    let proper = hermiticity_residual(|u| apply_radial_momentum(u, &s), &f, &g).unwrap();
    assert!(naive > 1e3 * proper, "{naive} vs {proper}");
}

#[test]
fn invalid_settings() {
    let grid = RadialGrid::offset(50, 5.0).unwrap();
    let f = GridFunction::radial(&grid, c);
    let odd = OperatorSettings {
        stencil_order: 3,
        ..OperatorSettings::default()
    };
    assert!(apply_radial_momentum(&f, &odd).is_err());
    assert!(apply_theta_momentum(&f, &OperatorSettings::default()).is_err());
    assert!(RadialGrid::offset(1, 5.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn radial_momentum_is_hermitian_on_localized_functions(
        a in 2.0f64..6.0, wa in 0.5f64..1.5, b in 2.0f64..6.0, wb in 0.5f64..1.5,
    ) {
        let grid = RadialGrid::offset(400, 10.0).unwrap();
        let s = OperatorSettings::default();
        let f = GridFunction::radial(&grid, |r| c((-((r - a) / wa).powi(2)).exp()));
        let g = GridFunction::radial(&grid, |r| c((-((r - b) / wb).powi(2)).exp()));
        let res = hermiticity_residual(|u| apply_radial_momentum(u, &s), &f, &g).unwrap();
        prop_assert!(res < 1e-4 * f.norm() * g.norm() / (wa.min(wb) * wa.min(wb)), "{res}");
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(a in 0.5f64..5.0, b in 0.5f64..5.0) {
        let grid = SphericalGrid::offset(40, 30, 8.0).unwrap();
        let f = GridFunction::spherical(&grid, |r, t| Complex64::new((-r / a).exp(), t.cos()));
        let g = GridFunction::spherical(&grid, |r, t| Complex64::new(t.sin(), (-r / b).exp()));
        let fg = f.inner(&g).unwrap();
        let gf = g.inner(&f).unwrap();
        prop_assert!((fg - gf.conj()).norm() < 1e-12 * fg.norm().max(1.0));
    }
}
