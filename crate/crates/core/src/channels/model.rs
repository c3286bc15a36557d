use std::fmt;
use std::sync::Arc;

use super::{ChannelError, Result};

/// A real function of the internuclear distance `R`.
#[derive(Clone)]
pub struct RadialFn(pub Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl RadialFn {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self(Arc::new(f))
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.0)(r)
    }
}

impl fmt::Debug for RadialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RadialFn(..)")
    }
}

/// One independent off-diagonal element `⟨i|∂|j⟩`; the `(j, i)` element is
/// its negative.
#[derive(Debug, Clone)]
pub struct CouplingTerm {
    pub i: usize,
    pub j: usize,
    pub f: RadialFn,
}

/// Adiabatic curves and non-adiabatic couplings of a collision model.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    /// Two adiabatic curves `∓½√(Δ² + u²)` of an avoided crossing with
    /// `u(R) = α w tanh((R − R_x)/w)`. Near `R_x` the diabatic splitting is
    /// linear with slope `α`; the radial coupling is the Lorentzian
    /// `−½ Δ u′ / (Δ² + u²)`.
    LandauZener {
        delta: f64,
        alpha: f64,
        width: f64,
        r_x: f64,
    },
    /// Two curves at `∓gap/2` with a Gaussian radial coupling pulse of
    /// area `strength` centred at `r_c`.
    Rabi {
        gap: f64,
        strength: f64,
        r_c: f64,
        width: f64,
    },
    Custom(CustomModel),
}

#[derive(Debug, Clone)]
pub struct CustomModel {
    pub curves: Vec<RadialFn>,
    pub radial: Vec<CouplingTerm>,
    pub rotational: Vec<CouplingTerm>,
}

impl PartialEq for CustomModel {
    fn eq(&self, other: &Self) -> bool {
        fn same(a: &[CouplingTerm], b: &[CouplingTerm]) -> bool {
            a.len() == b.len()
                && a.iter()
                    .zip(b)
                    .all(|(x, y)| x.i == y.i && x.j == y.j && Arc::ptr_eq(&x.f.0, &y.f.0))
        }
        self.curves.len() == other.curves.len()
            && self
                .curves
                .iter()
                .zip(&other.curves)
                .all(|(a, b)| Arc::ptr_eq(&a.0, &b.0))
            && same(&self.radial, &other.radial)
            && same(&self.rotational, &other.rotational)
    }
}

impl ChannelModel {
    pub fn channels(&self) -> usize {
        match self {
            Self::LandauZener { .. } | Self::Rabi { .. } => 2,
            Self::Custom(m) => m.curves.len(),
        }
    }

    /// Adiabatic energy `E_n(R)` in hartree.
    pub fn curve(&self, n: usize, r: f64) -> f64 {
        match self {
            Self::LandauZener {
                delta,
                alpha,
                width,
                r_x,
            } => {
                let u = alpha * width * ((r - r_x) / width).tanh();
                let half = 0.5 * delta.hypot(u);
                if n == 0 {
                    -half
                } else {
                    half
                }
            }
            Self::Rabi { gap, .. } => {
                if n == 0 {
                    -0.5 * gap
                } else {
                    0.5 * gap
                }
            }
            Self::Custom(m) => m.curves[n].eval(r),
        }
    }

    /// Radial coupling matrix `⟨n|∂/∂R|n′⟩` at `R`, row-major.
    pub fn radial_coupling(&self, r: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let a12 = match self {
            Self::LandauZener {
                delta,
                alpha,
                width,
                r_x,
            } => {
                let s = (r - r_x) / width;
                let u = alpha * width * s.tanh();
                let du = alpha / s.cosh().powi(2);
                -0.5 * delta * du / (delta * delta + u * u)
            }
            Self::Rabi {
                strength,
                r_c,
                width,
                ..
            } => {
                let s = (r - r_c) / width;
                strength / (width * std::f64::consts::PI.sqrt()) * (-s * s).exp()
            }
            Self::Custom(m) => {
                fill_antisymmetric(&m.radial, m.curves.len(), r, out);
                return;
            }
        };
        out[1] = a12;
        out[2] = -a12;
    }

    /// Rotational coupling matrix `⟨n|∂/∂θ|n′⟩` at `R`, row-major.
    pub fn rotational_coupling(&self, r: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if let Self::Custom(m) = self {
            fill_antisymmetric(&m.rotational, m.curves.len(), r, out);
        }
    }

    pub fn has_rotational_coupling(&self) -> bool {
        matches!(self, Self::Custom(m) if !m.rotational.is_empty())
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ChannelError::InvalidParameter(msg));
        match self {
            Self::LandauZener {
                delta,
                alpha,
                width,
                r_x,
            } => {
                if !(*delta > 0.0 && *alpha > 0.0 && *width > 0.0 && r_x.is_finite()) {
                    return bad("Landau-Zener model needs delta > 0, alpha > 0, width > 0".into());
                }
            }
            Self::Rabi {
                gap,
                strength,
                r_c,
                width,
            } => {
                if !(gap.is_finite() && strength.is_finite() && r_c.is_finite() && *width > 0.0) {
                    return bad("Rabi model needs finite gap, strength, r_c and width > 0".into());
                }
            }
            Self::Custom(m) => {
                let n = m.curves.len();
                if n == 0 {
                    return bad("custom model needs at least one curve".into());
                }
                for t in m.radial.iter().chain(&m.rotational) {
                    if t.i >= n || t.j >= n || t.i == t.j {
                        return bad(format!(
                            "coupling ({}, {}) must join two distinct channels below {n}",
                            t.i, t.j
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn fill_antisymmetric(terms: &[CouplingTerm], n: usize, r: f64, out: &mut [f64]) {
    for t in terms {
        let v = t.f.eval(r);
        out[t.i * n + t.j] += v;
        out[t.j * n + t.i] -= v;
    }
}
