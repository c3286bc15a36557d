use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{NumericsError, Result};

// 15-point Kronrod nodes (non-negative half) with the embedded 7-point
// Gauss weights on the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_intervals: 4000,
        }
    }
}

/// One Gauss–Kronrod 7/15 panel on `[a, b]`: `(kronrod estimate, |K15 − G7|)`.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
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

/// Globally adaptive Gauss–Kronrod integration: the panel with the largest
/// error estimate is bisected until the summed estimate meets the tolerance.
pub(crate) fn adaptive<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    config: &QuadratureConfig,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (value, error) = gauss_kronrod(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(NumericsError::InvalidInput(
                "integrand is not finite on the interval".into(),
            ));
        }
        if total_err <= config.abs_tol.max(config.rel_tol * total.abs()) {
            // Re-sum in a fixed order so the result does not depend on the
            // accumulated rounding of the running total.
            let mut panels: Vec<Panel> = heap.into_vec();
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        if heap.len() >= config.max_intervals {
            return Err(NumericsError::NonConvergent {
                estimate: total_err,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(NumericsError::NonConvergent {
                estimate: total_err,
                intervals: heap.len() + 1,
            });
        }
        let (v1, e1) = gauss_kronrod(f, worst.a, mid);
        let (v2, e2) = gauss_kronrod(f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
}

/// Power used in `x = a + (m − a) s^q` so that an endpoint factor
/// `(x − a)^beta` times the Jacobian becomes smooth in `s`.
fn substitution_power(beta: f64) -> f64 {
    if beta >= 1.0 || beta == 0.0 {
        1.0
    } else if beta > 0.0 {
        1.0 / beta
    } else {
        1.0 / (1.0 + beta)
    }
}

/// Integrates `f` over `[a, b]` when `f` behaves like `(x − a)^beta` near `a`
/// and `(b − x)^beta` near `b`, with `beta = endpoint_exponent > −1`.
pub fn singular_quadrature<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    endpoint_exponent: f64,
) -> Result<f64> {
    singular_quadrature_with(f, a, b, endpoint_exponent, &QuadratureConfig::default())
}

pub fn singular_quadrature_with<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    endpoint_exponent: f64,
    config: &QuadratureConfig,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(NumericsError::InvalidInput(format!(
            "need finite a < b, got [{a}, {b}]"
        )));
    }
    if !(endpoint_exponent > -1.0) {
        return Err(NumericsError::InvalidInput(format!(
            "endpoint exponent {endpoint_exponent} is not integrable"
        )));
    }
    let q = substitution_power(endpoint_exponent);
    let mid = 0.5 * (a + b);
    let half = mid - a;
    // Each half is mapped onto s in [0, 1] with the singular end at s = 0.
    let mut left = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let x = (a + half * s.powf(q)).min(mid);
        f(x) * half * q * s.powf(q - 1.0)
    };
    let lower = adaptive(&mut left, 0.0, 1.0, config)?;
    let mut right = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let x = (b - half * s.powf(q)).max(mid);
        f(x) * half * q * s.powf(q - 1.0)
    };
    let upper = adaptive(&mut right, 0.0, 1.0, config)?;
    Ok(lower + upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn barrier_integral_closed_form() {
        let g: f64 = 0.1;
        let v = singular_quadrature(|x| x * (1.0 - 2.0 * g * x).max(0.0).sqrt(), 0.0, 0.5 / g, 0.5)
            .unwrap();
        let exact = 1.0 / (15.0 * g * g);
        assert!((v - exact).abs() < 1e-12 * exact, "{v} vs {exact}");
    }

    #[test]
    fn semicircle_area() {
        let v = singular_quadrature(|x: f64| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, 0.5)
            .unwrap();
        assert!((v - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn linear_integrand() {
        let v = singular_quadrature(|x| x, 0.0, 1.0, 0.0).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn monomial_times_root_family() {
        // Beta-function values of x^m sqrt(1-x) on [0, 1].
        let exact = [2.0 / 3.0, 4.0 / 15.0, 16.0 / 105.0];
        for (m, e) in exact.iter().enumerate() {
            let v = singular_quadrature(|x: f64| x.powi(m as i32) * (1.0 - x).max(0.0).sqrt(), 0.0, 1.0, 0.5)
                .unwrap();
            assert!((v - e).abs() < 1e-13 * e, "m = {m}: {v} vs {e}");
        }
    }

    #[test]
    fn inverse_root_singularity() {
        // integral of 1/sqrt(1 - x^2) over [-1, 1] = pi
        let v = singular_quadrature(
            |x: f64| 1.0 / (1.0 - x * x).max(f64::MIN_POSITIVE).sqrt(),
            -1.0,
            1.0,
            -0.5,
        )
        .unwrap();
        assert!((v - PI).abs() < 1e-12);
    }

    #[test]
    fn single_panel_is_exact_for_low_degree_polynomials() {
        let (v, e) = gauss_kronrod(&mut |x: f64| x.powi(10), -1.0, 1.0);
        assert!((v - 2.0 / 11.0).abs() < 1e-15);
        assert!(e < 1e-2);
    }

    #[test]
    fn stalled_refinement_is_reported() {
        let config = QuadratureConfig {
            abs_tol: 1e-30,
            rel_tol: 1e-30,
            max_intervals: 8,
        };
        let r = singular_quadrature_with(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, 0.0, &config);
        assert!(matches!(r, Err(NumericsError::NonConvergent { .. })));
    }

    #[test]
    fn invalid_bounds_are_rejected() {
        assert!(singular_quadrature(|x| x, 1.0, 0.0, 0.5).is_err());
        assert!(singular_quadrature(|x| x, 0.0, 1.0, -1.0).is_err());
    }
}
