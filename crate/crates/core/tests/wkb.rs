use proptest::prelude::*;
use semiclassical::wkb::*;

#[test]
fn barrier_identity_oracle() {
    for g in [0.05, 0.1, 0.2] {
        assert!((g * g * barrier_exponent(g).unwrap() - 2.0 / 15.0).abs() < 1e-10);
    }
}

#[test]
fn integer_quantum_numbers_shift_every_level_by_half_a_quantum() {
    let v = PotentialModel::harmonic(1.0).unwrap();
    let good = bohr_sommerfeld_levels(&v, &QuantizationSpec::caustic(1.0, 0..10)).unwrap();
    let bad = bohr_sommerfeld_levels(&v, &QuantizationSpec::integer(1.0, 0..10)).unwrap();
    for (n, (a, b)) in good.iter().zip(&bad).enumerate() {
        assert!((a - (n as f64 + 0.5)).abs() < 1e-10);
        assert!((a - b - 0.5).abs() < 1e-10);
    }
}

#[test]
fn semiclassical_levels_approach_the_grid_spectrum_of_a_quartic_well() {
    // grid_levels works in units with hbar = 1.
    let v = PotentialModel::power_wall(1.0, 10.0, 2).unwrap();
    let wkb = bohr_sommerfeld_levels(&v, &QuantizationSpec::caustic(1.0, 0..6)).unwrap();
    let exact = grid_levels_extrapolated(&v, -2.0, 2.0, 1000, 6).unwrap();
    let rel: Vec<f64> = wkb.iter().zip(&exact).map(|(a, b)| ((a - b) / b).abs()).collect();
    assert!(rel[0] > 0.1 && rel[0] < 0.2, "{rel:?}");
    assert!(rel[5] < 2e-3, "{rel:?}");
    assert!(rel[1..].windows(2).all(|w| w[1] < w[0]), "{rel:?}");
}

#[test]
fn invalid_inputs() {
    assert!(PotentialModel::harmonic(0.0).is_err());
    assert!(barrier_exponent(-0.1).is_err());
    let v = PotentialModel::harmonic(1.0).unwrap();
    assert!(bohr_sommerfeld_levels(&v, &QuantizationSpec::caustic(0.0, 0..3)).is_err());
    assert!(matches!(
        action_between_turning_points(&v, -1.0),
        Err(WkbError::NoAllowedRegion { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn harmonic_levels_are_exact_with_caustic_phases(omega in 0.3f64..3.0, hbar in 0.2f64..2.0) {
        let v = PotentialModel::harmonic(omega).unwrap();
        let levels = bohr_sommerfeld_levels(&v, &QuantizationSpec::caustic(hbar, 0..4)).unwrap();
        for (n, e) in levels.iter().enumerate() {
            let exact = hbar * omega * (n as f64 + 0.5);
            prop_assert!((e - exact).abs() < 1e-9 * exact.max(1.0));
        }
    }

    #[test]
    fn barrier_identity_holds_for_any_coupling(g in 0.03f64..0.25) {
        prop_assert!((g * g * barrier_exponent(g).unwrap() - 2.0 / 15.0).abs() < 1e-10);
    }

    #[test]
    fn action_grows_with_energy(e1 in 0.1f64..5.0, e2 in 0.1f64..5.0) {
        prop_assume!((e1 - e2).abs() > 1e-3);
        let v = PotentialModel::power_wall(1.0, 2.0, 4).unwrap();
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(action_between_turning_points(&v, lo).unwrap() < action_between_turning_points(&v, hi).unwrap());
    }
}
