use num_complex::Complex64;
use proptest::prelude::*;
use semiclassical::trajectory::*;

// Frozen from the closed-form lifetime and the default escape-time sweep.
const TAU: [f64; 4] = [547.252216464, 85.2290759200, 24.4658495983, 10.2276791662];
const T_C: [f64; 4] = [15002.5643426, 1385.00525599, 220.428607171, 48.8308261456];

#[test]
fn lifetimes_are_frozen() {
    for (g, tau) in TABLE1_G.iter().zip(TAU) {
        assert!((lifetime_tau(*g).unwrap() - tau).abs() < 1e-8 * tau);
    }
}

#[test]
fn escape_times_are_frozen() {
    let rows = table1_sweep(&TABLE1_G, &SweepConfig::default());
    for (row, t_c) in rows.into_iter().zip(T_C) {
        let r = row.unwrap();
        assert!((r.t_c - t_c).abs() < 1e-6 * t_c, "{} vs {t_c}", r.t_c);
        assert_eq!(r.ratio, r.t_c / r.tau);
    }
}

#[test]
fn changeover_of_the_sample_orbit() {
    let sys = CubicSystem::resonance(2.0 / 125f64.sqrt(), EnergyOrder::SecondOrder).unwrap();
    let path = run_trajectory(&sys, 100.0, 0.01, &TrajectoryConfig::default()).unwrap();
    let c = first_changeover(&sys, &path).unwrap();
    assert!((c.t - 40.33).abs() < 0.01, "{}", c.t);
}

#[test]
fn sensitivity_rows_cover_both_orders_and_three_starts() {
    let rows = sensitivity_sweep(&[0.17888], &SweepConfig::default());
    assert_eq!(rows[0].variants.len(), 6);
    let (lo, hi) = rows[0].band().unwrap();
    assert!(lo < T_C[3] && T_C[3] <= hi + 1e-9);
}

#[test]
fn bad_inputs_are_rejected() {
    assert!(lifetime_tau(-1.0).is_err());
    assert!(lifetime_tau(0.0).is_err());
    assert!(EnergyOrder::from_order(1).is_err());
    let sys = CubicSystem::resonance(0.15, EnergyOrder::SecondOrder).unwrap();
    assert!(run_trajectory(&sys, -1.0, 0.1, &TrajectoryConfig::default()).is_err());
    let cfg = TrajectoryConfig {
        initial_condition: InitialCondition::WellFraction(1.5),
        ..TrajectoryConfig::default()
    };
    assert!(run_trajectory(&sys, 1.0, 0.1, &cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn turning_points_solve_the_energy_relation(g in 0.05f64..0.3, re in 0.0f64..0.5, im in -0.1f64..0.0) {
        let e = Complex64::new(re, im);
        for x in turning_points(g, e).unwrap() {
            prop_assert!((potential(g, x) - e).norm() < 1e-10 * (1.0 + x.norm().powi(3)));
        }
    }

    #[test]
    fn short_orbits_stay_on_the_energy_shell(g in 0.12f64..0.2, frac in 0.1f64..0.9) {
        let sys = CubicSystem::resonance(g, EnergyOrder::SecondOrder).unwrap();
        let cfg = TrajectoryConfig {
            initial_condition: InitialCondition::WellFraction(frac),
            ..TrajectoryConfig::default()
        };
        let path = run_trajectory(&sys, 20.0, 0.5, &cfg).unwrap();
        prop_assert_eq!(path.len(), 41);
        for r in path {
            prop_assert!(sys.energy_drift(r.x, r.p) < 1e-8);
        }
    }

    #[test]
    fn lifetime_decreases_with_coupling(a in 0.05f64..0.3, b in 0.05f64..0.3) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(lifetime_tau(lo).unwrap() > lifetime_tau(hi).unwrap());
    }
}
