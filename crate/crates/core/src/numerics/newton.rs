use num_complex::Complex64;

use super::{is_finite, NumericsError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Convergence is declared once `|f(z)| < tol`.
    pub tol: f64,
    pub max_iterations: usize,
    /// Relative step of the central-difference derivative.
    pub fd_step: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 100,
            fd_step: 1e-6,
        }
    }
}

/// Complex Newton iteration with a central-difference derivative.
pub fn newton_complex<F>(mut f: F, guess: Complex64, config: &NewtonConfig) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Complex64,
{
    let h_rel = config.fd_step;
    let central = |z: Complex64, f: &mut F| {
        let h = h_rel * z.norm().max(1.0);
        (f(z + h) - f(z - h)) / (2.0 * h)
    };
    iterate(&mut f, central, guess, config)
}

/// Complex Newton iteration with a caller-supplied derivative.
pub fn newton_complex_with_derivative<F, D>(
    mut f: F,
    mut df: D,
    guess: Complex64,
    config: &NewtonConfig,
) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Complex64,
    D: FnMut(Complex64) -> Complex64,
{
    iterate(&mut f, |z, _| df(z), guess, config)
}

fn iterate<F, D>(f: &mut F, mut df: D, guess: Complex64, config: &NewtonConfig) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Complex64,
    D: FnMut(Complex64, &mut F) -> Complex64,
{
    if !is_finite(guess) {
        return Err(NumericsError::InvalidInput("initial guess is not finite".into()));
    }
    let mut z = guess;
    let mut fz = f(z);
    if !is_finite(fz) {
        return Err(NumericsError::InvalidInput("f is not finite at the guess".into()));
    }
    let mut best = (z, fz.norm());

    for iteration in 0..config.max_iterations {
        if fz.norm() < config.tol {
            // One extra step usually gains the last few digits for free.
            let d = df(z, f);
            if d.norm() > 0.0 && is_finite(d) {
                let candidate = z - fz / d;
                let fc = f(candidate);
                if is_finite(fc) && fc.norm() < fz.norm() {
                    return Ok(candidate);
                }
            }
            return Ok(z);
        }
        let d = df(z, f);
        if !is_finite(d) || d.norm() == 0.0 {
            return Err(NumericsError::NoConvergence {
                best: best.0,
                residual: best.1,
                iterations: iteration,
            });
        }
        let step = fz / d;
        // Backtrack until the residual decreases.
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let candidate = z - step * lambda;
            let fc = f(candidate);
            if is_finite(fc) && fc.norm() < fz.norm() {
                accepted = Some((candidate, fc));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((zn, fzn)) => {
                z = zn;
                fz = fzn;
                if fz.norm() < best.1 {
                    best = (z, fz.norm());
                }
            }
            None => {
                return Err(NumericsError::NoConvergence {
                    best: best.0,
                    residual: best.1,
                    iterations: iteration + 1,
                })
            }
        }
    }
    if fz.norm() < config.tol {
        return Ok(z);
    }
    Err(NumericsError::NoConvergence {
        best: best.0,
        residual: best.1,
        iterations: config.max_iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_of_minus_one() {
        let z = newton_complex(|z| z * z + 1.0, Complex64::new(0.5, 0.8), &NewtonConfig::default())
            .unwrap();
        assert!((z - Complex64::i()).norm() < 1e-12, "{z}");
    }

    #[test]
    fn exponential_zero() {
        let z = newton_complex(|z| z.exp() - 1.0, Complex64::new(0.1, 0.0), &NewtonConfig::default())
            .unwrap();
        assert!(z.norm() < 1e-12);
    }

    #[test]
    fn supplied_derivative() {
        let z = newton_complex_with_derivative(
            |z| z * z * z - 8.0,
            |z| 3.0 * z * z,
            Complex64::new(1.5, 0.3),
            &NewtonConfig::default(),
        )
        .unwrap();
        assert!((z - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn no_root_reports_best_iterate() {
        let cfg = NewtonConfig {
            max_iterations: 20,
            ..NewtonConfig::default()
        };
        // exp(z) has no zeros.
        let err = newton_complex(|z| z.exp(), Complex64::new(0.0, 0.0), &cfg).unwrap_err();
        match err {
            NumericsError::NoConvergence { residual, .. } => assert!(residual > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
