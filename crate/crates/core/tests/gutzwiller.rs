use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use semiclassical::gutzwiller::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn linear_model_poles_match_closed_form() {
    let orbit = GutzwillerOrbit::linear_model();
    for k in 0..2 {
        for s in 0..2 {
            let exact = c(2.0 * PI * s as f64, -(2.0 * k as f64 + 1.0));
            let guess = exact + c(0.4, 0.3);
            let pole = find_pole(&orbit, PoleIndex::new(k, s), guess).unwrap();
            assert!((pole.energy - exact).norm() < 1e-10, "{k},{s}: {}", pole.energy);
            assert!(pole.residual < 1e-10);
        }
    }
}

#[test]
fn pole_spacing_is_two_pi_hbar_over_period() {
    let orbit = GutzwillerOrbit::affine(0.2, 2.5, 1.3, 0.0, 1, 0.7).unwrap();
    let idx: Vec<PoleIndex> = (0..4).map(|s| PoleIndex::new(0, s)).collect();
    let poles: Vec<Pole> = find_poles(&orbit, &idx, |i| orbit.exact_pole(i).unwrap() + 0.1)
        .into_iter()
        .collect::<Result<_, _>>()
        .unwrap();
    for w in poles.windows(2) {
        let spacing = w[1].energy.re - w[0].energy.re;
        assert!((spacing - 2.0 * PI * 0.7 / 2.5).abs() < 1e-12);
    }
}

#[test]
fn response_blows_up_at_each_pole() {
    let orbit = GutzwillerOrbit::linear_model();
    for k in 0..2 {
        for s in 0..2 {
            let pole = orbit.exact_pole(PoleIndex::new(k, s)).unwrap();
            let mut last = 0.0;
            for d in [1e-3, 1e-5, 1e-7] {
                let g = response_function(&orbit, pole + c(d, 0.0), 10_000).unwrap();
                assert!(g.value.norm() > last);
                last = g.value.norm();
            }
            assert!(last > 1e6, "{k},{s}: {last}");
        }
    }
}

#[test]
fn doubling_the_term_cap_does_not_move_a_regular_value() {
    let orbit = GutzwillerOrbit::affine(0.0, 1.0, 0.8, 0.1, 2, 1.0).unwrap();
    for e in [c(1.0, 0.0), c(3.3, 0.2), c(5.0, -0.2)] {
        let a = response_function(&orbit, e, 200).unwrap();
        let b = response_function(&orbit, e, 400).unwrap();
        assert!((a.value - b.value).norm() < 1e-10);
        assert!(!a.near_pole);
    }
}

#[test]
fn direct_and_resummed_sums_agree() {
    let orbit = GutzwillerOrbit::affine(0.1, 1.0, 1.5, 0.0, 1, 1.0).unwrap();
    let direct = ResponseConfig {
        representation: Representation::Direct,
        ..ResponseConfig::default()
    };
    let resummed = ResponseConfig {
        representation: Representation::Resummed,
        ..ResponseConfig::default()
    };
    for e in [c(0.5, 0.0), c(2.0, 0.4), c(4.0, -0.3)] {
        let a = response_function_with(&orbit, e, &direct).unwrap();
        let b = response_function_with(&orbit, e, &resummed).unwrap();
        assert!((a.value - b.value).norm() < 1e-10 * a.value.norm().max(1.0));
    }
}

#[test]
fn period_consistency_for_a_curved_action() {
    let orbit = GutzwillerOrbit::custom(
        |e| e + 0.1 * e * e,
        |e| 1.0 + 0.2 * e,
        |e| 1.0 + 0.05 * e,
        0,
        1.0,
    )
    .unwrap();
    assert!(orbit.period_consistency(c(2.0, 0.0)) < 1e-6);
    let pole = find_pole(&orbit, PoleIndex::new(0, 2), c(8.0, -0.5)).unwrap();
    assert!(pole.energy.im < 0.0);
    assert!(pole_condition_residual(&orbit, pole.energy, pole.index).norm() < 1e-10);
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(GutzwillerOrbit::affine(0.0, -1.0, 1.0, 0.0, 0, 1.0).is_err());
    assert!(GutzwillerOrbit::affine(0.0, 1.0, 1.0, 0.0, 0, 0.0).is_err());
    let orbit = GutzwillerOrbit::linear_model();
    assert!(response_function(&orbit, c(1.0, 0.0), 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn affine_poles_lie_below_the_real_axis(
        a in -1.0f64..1.0,
        t in 0.2f64..5.0,
        w0 in 0.1f64..3.0,
        w1 in 0.0f64..0.5,
        lambda in 0i32..4,
        hbar in 0.1f64..2.0,
        k in 0u32..3,
        s in 1u32..4,
    ) {
        let orbit = GutzwillerOrbit::affine(a, t, w0, w1, lambda, hbar).unwrap();
        let idx = PoleIndex::new(k, s);
        let exact = orbit.exact_pole(idx).unwrap();
        let pole = find_pole(&orbit, idx, exact + c(0.05, 0.05)).unwrap();
        prop_assert!(pole.energy.im < 0.0);
        prop_assert!((pole.energy - exact).norm() < 1e-9 * exact.norm().max(1.0));
    }
}
