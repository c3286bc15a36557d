//! Periodic-orbit response function of a single unstable orbit and its
//! poles in the complex energy plane.
//!
//! With `z = exp(i(S/ħ − λπ/2))` the orbit contributes
//!
//! `g(E) = −iT/(2ħ) Σ_{n≥1} zⁿ / sinh(n w/2)`.
//!
//! Expanding `1/sinh x = 2 Σ_k e^{−(2k+1)x}` and summing over `n` gives
//! `g(E) = −iT/ħ Σ_{k≥0} q_k/(1 − q_k)` with `q_k = z e^{−(2k+1)w/2}`, which
//! continues `g` to energies where the `n`-sum diverges and shows the poles
//! at `q_k = 1`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::{newton_complex, newton_complex_with_derivative, NewtonConfig, NumericsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GutzwillerError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instability exponent must have Re w > 0; got w = {w} at E = {energy}")]
    NonPositiveInstability { energy: Complex64, w: Complex64 },

    #[error("repetition sum diverges at this energy (|z| e^(-w/2) = {ratio})")]
    DivergentSeries { ratio: f64 },

    #[error("truncation remainder {remainder:e} exceeds the tolerance after {terms} terms")]
    TruncationNotConverged { remainder: f64, terms: usize },

    #[error("pole search did not converge (best {best}, |residual| = {residual:e})")]
    NoConvergence { best: Complex64, residual: f64 },
}

pub type Result<T, E = GutzwillerError> = std::result::Result<T, E>;

type ComplexMap = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Energy dependence of the orbit's action, period and instability.
#[derive(Clone)]
pub enum OrbitFamily {
    /// `S = action0 + period·E`, `w = instability0 + instability_slope·E`.
    Affine {
        action0: f64,
        period: f64,
        instability0: f64,
        instability_slope: f64,
    },
    /// Arbitrary analytic maps; `period` should equal `dS/dE`.
    Custom {
        action: ComplexMap,
        period: ComplexMap,
        instability: ComplexMap,
    },
}

impl fmt::Debug for OrbitFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Affine {
                action0,
                period,
                instability0,
                instability_slope,
            } => f
                .debug_struct("Affine")
                .field("action0", action0)
                .field("period", period)
                .field("instability0", instability0)
                .field("instability_slope", instability_slope)
                .finish(),
            Self::Custom { .. } => f.write_str("Custom(..)"),
        }
    }
}

/// One unstable periodic orbit.
#[derive(Debug, Clone)]
pub struct GutzwillerOrbit {
    pub family: OrbitFamily,
    /// Number of focal points per period (λ).
    pub focal_count: i32,
    pub hbar: f64,
}

/// Pole label: `k` counts the instability ladder, `s` the action winding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PoleIndex {
    pub k: u32,
    pub s: u32,
}

impl PoleIndex {
    pub fn new(k: u32, s: u32) -> Self {
        Self { k, s }
    }
}

impl GutzwillerOrbit {
    /// `S(E) = E`, `w = 2`, `λ = 0`, `ħ = 1`; its poles sit at `2πs − i(2k+1)`.
    pub fn linear_model() -> Self {
        Self::affine(0.0, 1.0, 2.0, 0.0, 0, 1.0).expect("valid constants")
    }

    pub fn affine(
        action0: f64,
        period: f64,
        instability0: f64,
        instability_slope: f64,
        focal_count: i32,
        hbar: f64,
    ) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(GutzwillerError::InvalidParameter(format!(
                "period > 0 required, got {period}"
            )));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(GutzwillerError::InvalidParameter(format!("hbar > 0 required, got {hbar}")));
        }
        if !(action0.is_finite() && instability0.is_finite() && instability_slope.is_finite()) {
            return Err(GutzwillerError::InvalidParameter("coefficients must be finite".into()));
        }
        Ok(Self {
            family: OrbitFamily::Affine {
                action0,
                period,
                instability0,
                instability_slope,
            },
            focal_count,
            hbar,
        })
    }

    pub fn custom<S, T, W>(action: S, period: T, instability: W, focal_count: i32, hbar: f64) -> Result<Self>
    where
        S: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        T: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        W: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(GutzwillerError::InvalidParameter(format!("hbar > 0 required, got {hbar}")));
        }
        Ok(Self {
            family: OrbitFamily::Custom {
                action: Arc::new(action),
                period: Arc::new(period),
                instability: Arc::new(instability),
            },
            focal_count,
            hbar,
        })
    }

    pub fn action(&self, e: Complex64) -> Complex64 {
        match &self.family {
            OrbitFamily::Affine { action0, period, .. } => *action0 + *period * e,
            OrbitFamily::Custom { action, .. } => action(e),
        }
    }

    pub fn period(&self, e: Complex64) -> Complex64 {
        match &self.family {
            OrbitFamily::Affine { period, .. } => Complex64::new(*period, 0.0),
            OrbitFamily::Custom { period, .. } => period(e),
        }
    }

    pub fn instability(&self, e: Complex64) -> Complex64 {
        match &self.family {
            OrbitFamily::Affine {
                instability0,
                instability_slope,
                ..
            } => *instability0 + *instability_slope * e,
            OrbitFamily::Custom { instability, .. } => instability(e),
        }
    }

    /// Relative mismatch between `T(E)` and a central difference of `S`.
    pub fn period_consistency(&self, e: Complex64) -> f64 {
        let h = 1e-5 * e.norm().max(1.0);
        let ds = (self.action(e + h) - self.action(e - h)) / (2.0 * h);
        let t = self.period(e);
        (ds - t).norm() / t.norm().max(f64::MIN_POSITIVE)
    }

    fn checked_instability(&self, e: Complex64) -> Result<Complex64> {
        let w = self.instability(e);
        if !(w.re > 0.0) {
            return Err(GutzwillerError::NonPositiveInstability { energy: e, w });
        }
        Ok(w)
    }

    fn z(&self, e: Complex64) -> Complex64 {
        let phase = self.action(e) / self.hbar - self.focal_count as f64 * PI / 2.0;
        (Complex64::i() * phase).exp()
    }

    /// Closed-form pole for affine families.
    pub fn exact_pole(&self, idx: PoleIndex) -> Option<Complex64> {
        match self.family {
            OrbitFamily::Affine {
                action0,
                period,
                instability0,
                instability_slope,
            } => {
                let kh = self.hbar * (idx.k as f64 + 0.5);
                let rhs = Complex64::new(
                    self.hbar * (self.focal_count as f64 * PI / 2.0 + 2.0 * PI * idx.s as f64) - action0,
                    -kh * instability0,
                );
                Some(rhs / Complex64::new(period, kh * instability_slope))
            }
            OrbitFamily::Custom { .. } => None,
        }
    }
}

/// How the repetition sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Direct sum where it converges quickly, resummed otherwise.
    Auto,
    /// Term-by-term sum over repetitions `n`.
    Direct,
    /// Geometric-series resummation over the instability ladder `k`.
    Resummed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseConfig {
    /// Cap on the number of terms.
    pub n_max: usize,
    /// Relative remainder target.
    pub tolerance: f64,
    pub representation: Representation,
}

impl Default for ResponseConfig {
    fn default() -> Self {
        Self {
            n_max: 10_000,
            tolerance: 1e-13,
            representation: Representation::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseValue {
    pub value: Complex64,
    /// Bound on the magnitude of the omitted tail.
    pub remainder_bound: f64,
    pub terms: usize,
    pub representation: Representation,
    /// `min_k |1 − q_k|`; zero exactly at a pole.
    pub pole_proximity: f64,
    pub near_pole: bool,
}

const NEAR_POLE: f64 = 1e-6;

/// Evaluates `g(E)` with at most `n_max` terms.
pub fn response_function(orbit: &GutzwillerOrbit, e: Complex64, n_max: usize) -> Result<ResponseValue> {
    response_function_with(
        orbit,
        e,
        &ResponseConfig {
            n_max,
            ..ResponseConfig::default()
        },
    )
}

pub fn response_function_with(
    orbit: &GutzwillerOrbit,
    e: Complex64,
    config: &ResponseConfig,
) -> Result<ResponseValue> {
    if config.n_max == 0 {
        return Err(GutzwillerError::InvalidParameter("n_max >= 1 required".into()));
    }
    let w = orbit.checked_instability(e)?;
    let z = orbit.z(e);
    let t = orbit.period(e);
    let half = (-0.5 * w).exp();
    let ratio = z.norm() * half.norm();
    let proximity = {
        // |q_k| falls by e^{−Re w} per step, so only a few k can be near 1.
        let decay = (-w).exp();
        let mut q = z * half;
        let mut best = f64::INFINITY;
        for _ in 0..64 {
            best = best.min((1.0 - q).norm());
            if q.norm() < 0.5 {
                break;
            }
            q *= decay;
        }
        best
    };
    let representation = match config.representation {
        Representation::Auto if ratio < 0.5 => Representation::Direct,
        Representation::Auto => Representation::Resummed,
        r => r,
    };
    let (sum, bound, terms, prefactor) = match representation {
        Representation::Direct => {
            if !(ratio < 1.0) {
                return Err(GutzwillerError::DivergentSeries { ratio });
            }
            let a = 0.5 * w.re;
            let mut sum = Complex64::new(0.0, 0.0);
            let mut zn = Complex64::new(1.0, 0.0);
            let mut bound = f64::INFINITY;
            let mut n = 0;
            while n < config.n_max {
                n += 1;
                zn *= z;
                sum += zn / (0.5 * n as f64 * w).sinh();
                let tail_start = (n + 1) as f64;
                bound = 2.0 * ratio.powf(tail_start) / ((1.0 - ratio) * (1.0 - (-2.0 * tail_start * a).exp()));
                if bound <= config.tolerance * sum.norm().max(1.0) {
                    break;
                }
            }
            (sum, bound, n, -Complex64::i() * t / (2.0 * orbit.hbar))
        }
        Representation::Resummed => {
            let decay = (-w).exp();
            let decay_abs = decay.norm();
            let mut sum = Complex64::new(0.0, 0.0);
            let mut q = z * half;
            let mut bound = f64::INFINITY;
            let mut k = 0;
            while k < config.n_max {
                k += 1;
                sum += q / (1.0 - q);
                q *= decay;
                let qa = q.norm();
                if qa < 1.0 {
                    bound = qa / ((1.0 - qa) * (1.0 - decay_abs));
                    if bound <= config.tolerance * sum.norm().max(1.0) {
                        break;
                    }
                }
            }
            (sum, bound, k, -Complex64::i() * t / orbit.hbar)
        }
        Representation::Auto => unreachable!("resolved above"),
    };
    let value = prefactor * sum;
    let remainder_bound = prefactor.norm() * bound;
    let near_pole = proximity < NEAR_POLE || !value.is_finite();
    let converged = bound <= config.tolerance * sum.norm().max(1.0);
    if !near_pole && !converged {
        return Err(GutzwillerError::TruncationNotConverged {
            remainder: remainder_bound,
            terms,
        });
    }
    Ok(ResponseValue {
        value,
        remainder_bound,
        terms,
        representation,
        pole_proximity: proximity,
        near_pole,
    })
}

/// `S(E) − [ħλπ/2 − iħ w(E)(k + ½) + 2πsħ]`.
pub fn pole_condition_residual(orbit: &GutzwillerOrbit, e: Complex64, idx: PoleIndex) -> Complex64 {
    let h = orbit.hbar;
    let target = Complex64::new(h * (orbit.focal_count as f64 * PI / 2.0 + 2.0 * PI * idx.s as f64), 0.0)
        - Complex64::i() * h * orbit.instability(e) * (idx.k as f64 + 0.5);
    orbit.action(e) - target
}

/// A located pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub index: PoleIndex,
    pub energy: Complex64,
    pub residual: f64,
}

/// Solves the pole condition by complex Newton iteration from `guess`.
pub fn find_pole(orbit: &GutzwillerOrbit, idx: PoleIndex, guess: Complex64) -> Result<Pole> {
    let config = NewtonConfig {
        tol: 1e-12,
        ..NewtonConfig::default()
    };
    let f = |e: Complex64| pole_condition_residual(orbit, e, idx);
    let found = match orbit.family {
        OrbitFamily::Affine {
            period,
            instability_slope,
            ..
        } => {
            let d = Complex64::new(period, orbit.hbar * instability_slope * (idx.k as f64 + 0.5));
            newton_complex_with_derivative(f, |_| d, guess, &config)
        }
        OrbitFamily::Custom { .. } => newton_complex(f, guess, &config),
    };
    let energy = found.map_err(|e| match e {
        NumericsError::NoConvergence { best, residual, .. } => GutzwillerError::NoConvergence { best, residual },
        other => GutzwillerError::InvalidParameter(other.to_string()),
    })?;
    let residual = pole_condition_residual(orbit, energy, idx).norm();
    if !(residual < 1e-10) {
        return Err(GutzwillerError::NoConvergence { best: energy, residual });
    }
    Ok(Pole {
        index: idx,
        energy,
        residual,
    })
}

/// Runs `find_pole` over several indices concurrently, in input order.
pub fn find_poles<G>(orbit: &GutzwillerOrbit, indices: &[PoleIndex], guess: G) -> Vec<Result<Pole>>
where
    G: Fn(PoleIndex) -> Complex64 + Sync,
{
    indices.par_iter().map(|&idx| find_pole(orbit, idx, guess(idx))).collect()
}
