use super::{NumericsError, Result};

/// Number of eigenvalues strictly below `x` (Sturm sequence count of the
/// LDLᵀ pivots).
fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q == 0.0 { f64::EPSILON * off[i - 1].abs().max(f64::MIN_POSITIVE) } else { q };
        q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `count` smallest eigenvalues (ascending) of the symmetric tridiagonal
/// matrix with diagonal `diag` and sub-diagonal `off`, by Sturm bisection.
pub fn symmetric_tridiagonal_lowest(diag: &[f64], off: &[f64], count: usize) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(NumericsError::InvalidInput(
            "need n >= 1 diagonal entries and n - 1 off-diagonal entries".into(),
        ));
    }
    if count > n {
        return Err(NumericsError::InvalidInput(format!(
            "requested {count} eigenvalues of a {n}x{n} matrix"
        )));
    }
    if diag.iter().chain(off).any(|v| !v.is_finite()) {
        return Err(NumericsError::InvalidInput("matrix entries must be finite".into()));
    }
    // Gershgorin interval.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let (mut a, mut b) = (lo, hi);
        let mut iterations = 0;
        while b - a > 4.0 * f64::EPSILON * scale.max(a.abs().max(b.abs())) {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if count_below(diag, off, m) > k {
                b = m;
            } else {
                a = m;
            }
            iterations += 1;
            if iterations > 2000 {
                return Err(NumericsError::ConvergenceFailure(format!(
                    "bisection for eigenvalue {k} stalled on [{a}, {b}]"
                )));
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn discrete_laplacian_spectrum() {
        // tridiag(-1, 2, -1) has eigenvalues 2 - 2 cos(k pi / (n + 1)).
        let n = 50;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let ev = symmetric_tridiagonal_lowest(&diag, &off, 5).unwrap();
        for (k, e) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos();
            assert!((e - exact).abs() < 1e-13, "{e} vs {exact}");
        }
    }

    #[test]
    fn diagonal_matrix() {
        let ev = symmetric_tridiagonal_lowest(&[3.0, -1.0, 2.0], &[0.0, 0.0], 3).unwrap();
        assert_eq!(ev.len(), 3);
        for (e, x) in ev.iter().zip([-1.0, 2.0, 3.0]) {
            assert!((e - x).abs() < 1e-14);
        }
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        assert!(symmetric_tridiagonal_lowest(&[1.0, 2.0], &[], 1).is_err());
        assert!(symmetric_tridiagonal_lowest(&[1.0], &[], 2).is_err());
    }
}
