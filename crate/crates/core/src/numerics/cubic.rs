use std::cmp::Ordering;

use num_complex::Complex64;

use super::{is_finite, NumericsError, Result};

/// Evaluates `c3 z^3 + c2 z^2 + c1 z + c0` by Horner's rule.
pub fn polynomial_residual(coeffs: [Complex64; 4], z: Complex64) -> Complex64 {
    let [c3, c2, c1, c0] = coeffs;
    ((c3 * z + c2) * z + c1) * z + c0
}

/// All three roots of `c3 z^3 + c2 z^2 + c1 z + c0`, counted with
/// multiplicity and sorted by ascending real part (ties by imaginary part).
///
/// Cardano's formula supplies the roots with the cube-root branch chosen to
/// avoid cancellation; each root is then polished by Newton steps on the
/// original polynomial, keeping a step only if it lowers the residual.
pub fn solve_cubic_complex(
    c3: Complex64,
    c2: Complex64,
    c1: Complex64,
    c0: Complex64,
) -> Result<[Complex64; 3]> {
    if c3 == Complex64::new(0.0, 0.0) {
        return Err(NumericsError::DegeneratePolynomial);
    }
    if ![c3, c2, c1, c0].into_iter().all(is_finite) {
        return Err(NumericsError::InvalidInput(
            "cubic coefficients must be finite".into(),
        ));
    }

    let a = c2 / c3;
    let b = c1 / c3;
    let c = c0 / c3;

    let mut roots = if c == Complex64::new(0.0, 0.0) {
        // Exact factor z; keeps double roots at the origin exact.
        let [r1, r2] = solve_quadratic_monic(a, b);
        [Complex64::new(0.0, 0.0), r1, r2]
    } else {
        cardano_monic(a, b, c)
    };

    let coeffs = [c3, c2, c1, c0];
    for root in roots.iter_mut() {
        *root = polish(coeffs, *root);
    }
    if !roots.iter().copied().all(is_finite) {
        return Err(NumericsError::InvalidInput(
            "cubic roots overflowed the floating-point range".into(),
        ));
    }
    roots.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap_or(Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal))
    });
    Ok(roots)
}

/// Roots of `z^2 + a z + b` without cancellation in the larger root.
fn solve_quadratic_monic(a: Complex64, b: Complex64) -> [Complex64; 2] {
    let disc = (a * a - 4.0 * b).sqrt();
    // Pick the sign that makes |a + s*disc| largest.
    let sign = if (a.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (a + sign * disc);
    if q == Complex64::new(0.0, 0.0) {
        [q, q]
    } else {
        [q, b / q]
    }
}

fn cardano_monic(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 3] {
    // z = t - a/3 gives t^3 + p t + q = 0.
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;

    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let w1 = -q / 2.0 + disc;
    let w2 = -q / 2.0 - disc;
    let w = if w1.norm() >= w2.norm() { w1 } else { w2 };

    let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    if w == Complex64::new(0.0, 0.0) {
        // p = q = 0: triple root.
        return [-shift; 3];
    }
    let u = w.powf(1.0 / 3.0);
    let mut out = [Complex64::new(0.0, 0.0); 3];
    let mut rot = Complex64::new(1.0, 0.0);
    for slot in out.iter_mut() {
        let uk = u * rot;
        let vk = -p / (3.0 * uk);
        *slot = uk + vk - shift;
        rot *= omega;
    }
    out
}

fn polish(coeffs: [Complex64; 4], mut z: Complex64) -> Complex64 {
    let [c3, c2, c1, _] = coeffs;
    let mut best = polynomial_residual(coeffs, z).norm();
    for _ in 0..4 {
        if best == 0.0 {
            break;
        }
        let f = polynomial_residual(coeffs, z);
        let df = (3.0 * c3 * z + 2.0 * c2) * z + c1;
        if df == Complex64::new(0.0, 0.0) {
            break;
        }
        let candidate = z - f / df;
        let r = polynomial_residual(coeffs, candidate).norm();
        if r < best {
            best = r;
            z = candidate;
        } else {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual_ok(coeffs: [Complex64; 4], r: Complex64) -> bool {
        polynomial_residual(coeffs, r).norm() <= 1e-12 * r.norm().powi(3).max(1.0)
    }

    #[test]
    fn zero_energy_factorization() {
        let g = 0.1;
        let roots = solve_cubic_complex(c(-g, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0))
            .unwrap();
        assert_eq!(roots[0], c(0.0, 0.0));
        assert_eq!(roots[1], c(0.0, 0.0));
        assert!((roots[2] - c(5.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cube_roots_of_unity() {
        let roots = solve_cubic_complex(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
            .unwrap();
        let s = 3f64.sqrt() / 2.0;
        let expected = [c(-0.5, -s), c(-0.5, s), c(1.0, 0.0)];
        for (r, e) in roots.iter().zip(expected) {
            assert!((r - e).norm() < 1e-14, "{r} vs {e}");
        }
    }

    #[test]
    fn triple_root() {
        // (z - 2)^3
        let roots = solve_cubic_complex(c(1.0, 0.0), c(-6.0, 0.0), c(12.0, 0.0), c(-8.0, 0.0))
            .unwrap();
        for r in roots {
            assert!((r - c(2.0, 0.0)).norm() < 1e-5);
        }
    }

    #[test]
    fn zero_leading_coefficient_is_rejected() {
        let err = solve_cubic_complex(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(err, Err(NumericsError::DegeneratePolynomial));
    }

    #[test]
    fn ten_thousand_random_draws_meet_residual_bound() {
        // Deterministic LCG so the sweep is reproducible without a rand dependency.
        let mut state: u64 = 0x2545_f491_4f6c_dd1d;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..10_000 {
            let coeffs = [c(next(), next()), c(next(), next()), c(next(), next()), c(next(), next())];
            if coeffs[0].norm() < 1e-3 {
                continue;
            }
            let roots = solve_cubic_complex(coeffs[0], coeffs[1], coeffs[2], coeffs[3]).unwrap();
            for r in roots {
                assert!(residual_ok(coeffs, r), "coeffs {coeffs:?} root {r}");
            }
        }
    }

    proptest! {
        #[test]
        fn roots_are_sorted_and_reproduce_vieta(
            re in proptest::array::uniform4(-3.0f64..3.0),
            im in proptest::array::uniform4(-3.0f64..3.0),
        ) {
            let coeffs = [c(re[0], im[0]), c(re[1], im[1]), c(re[2], im[2]), c(re[3], im[3])];
            prop_assume!(coeffs[0].norm() > 1e-2);
            let roots = solve_cubic_complex(coeffs[0], coeffs[1], coeffs[2], coeffs[3]).unwrap();
            prop_assert!(roots[0].re <= roots[1].re && roots[1].re <= roots[2].re);
            for r in roots {
                prop_assert!(residual_ok(coeffs, r));
            }
            // Sum of roots = -c2/c3.
            let sum = roots[0] + roots[1] + roots[2];
            let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
            prop_assert!((sum + coeffs[1] / coeffs[0]).norm() < 1e-9 * scale);
        }
    }
}
