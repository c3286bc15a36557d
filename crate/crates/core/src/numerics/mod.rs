//! Shared numerical kernels: complex cubic roots, adaptive complex ODE
//! integration, quadrature with square-root endpoint behaviour, complex
//! Newton iteration, finite-difference stencils and a symmetric tridiagonal
//! eigensolver.
//!
//! Everything here is a pure function of its inputs.

mod cubic;
mod finite_diff;
mod newton;
mod ode;
mod quadrature;
mod roots;
mod tridiagonal;

use num_complex::Complex64;
use thiserror::Error;

pub use cubic::{polynomial_residual, solve_cubic_complex};
pub use finite_diff::{fornberg_weights, FiniteDifference};
pub use newton::{newton_complex, newton_complex_with_derivative, NewtonConfig};
pub use ode::{integrate_complex_ivp, DormandPrince, OdeSpec, StepControl, ToleranceConfig};
pub use quadrature::{
    gauss_kronrod, singular_quadrature, singular_quadrature_with, QuadratureConfig,
};
pub use roots::{bisect, golden_section_min};
pub use tridiagonal::symmetric_tridiagonal_lowest;

/// Complex scalar used throughout the crate.
pub type ComplexNumber = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("leading coefficient of the cubic is zero")]
    DegeneratePolynomial,

    #[error("step limit of {max_steps} exceeded at t = {t}")]
    StepLimitExceeded { t: f64, max_steps: usize },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("right-hand side is not finite at t = {t}")]
    RhsNonFinite { t: f64 },

    #[error("quadrature did not converge: error estimate {estimate:e} after {intervals} subintervals")]
    NonConvergent { estimate: f64, intervals: usize },

    #[error("Newton iteration did not converge after {iterations} iterations (best {best}, |f| = {residual:e})")]
    NoConvergence {
        best: Complex64,
        residual: f64,
        iterations: usize,
    },

    #[error("root is not bracketed on [{a}, {b}]")]
    RootNotBracketed { a: f64, b: f64 },

    #[error("grid has {available} points but the stencil needs {required}")]
    GridTooCoarse { required: usize, available: usize },

    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = NumericsError> = std::result::Result<T, E>;

pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
