//! Two-state (or N-state) adiabatic collision models and the two ways of
//! propagating their channel amplitudes: the stationary first-order system
//! in `R` with channel-dependent momenta, and the time-dependent system
//! along a single classical trajectory.
//!
//! Atomic units are used unless `hbar` is changed.

mod kinematics;
mod model;
mod solve;

use thiserror::Error;

use crate::numerics::NumericsError;

pub use kinematics::{common_trajectory, Kinematics, KinematicState, Reversed, Trajectory};
pub use model::{ChannelModel, CouplingTerm, CustomModel, RadialFn};
pub use solve::{
    emergence_of_time_sweep, solve_stationary_semiclassical, solve_stationary_with,
    solve_time_dependent, solve_time_dependent_with, ChannelSolverConfig, EmergenceRow, Method,
    TimeDependentOutcome, TransitionResult,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("channel {channel} is closed at R = {r} (energy below the local potential)")]
    ChannelClosedInRange { channel: usize, r: f64 },

    #[error("trajectory is trapped: {0}")]
    TrappedOrbit(String),

    #[error("norm drifted by {deviation:e} at t = {t}")]
    UnitarityLoss { t: f64, deviation: f64 },

    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T, E = ChannelError> = std::result::Result<T, E>;

/// Local radial momentum in a channel, or a marker that the channel is
/// classically closed there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Momentum {
    Open(f64),
    Closed,
}

impl Momentum {
    pub fn open(self) -> Option<f64> {
        match self {
            Self::Open(p) => Some(p),
            Self::Closed => None,
        }
    }
}

/// A collision model at fixed total energy and angular momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSystem {
    pub model: ChannelModel,
    /// Reduced nuclear mass.
    pub mass: f64,
    pub z1z2: f64,
    /// Nuclear angular momentum quantum number.
    pub l: u32,
    pub energy: f64,
    pub hbar: f64,
    /// Outer end of the interaction region; couplings must vanish there.
    pub r_max: f64,
}

impl ChannelSystem {
    pub fn new(
        model: ChannelModel,
        mass: f64,
        z1z2: f64,
        l: u32,
        energy: f64,
        hbar: f64,
        r_max: f64,
    ) -> Result<Self> {
        let sys = Self {
            model,
            mass,
            z1z2,
            l,
            energy,
            hbar,
            r_max,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// The bundled avoided-crossing model used for the energy sweep.
    pub fn landau_zener(energy: f64) -> Result<Self> {
        Self::new(
            ChannelModel::LandauZener {
                delta: 0.1,
                alpha: 0.4,
                width: 0.5,
                r_x: 1.5,
            },
            10.0,
            0.0,
            0,
            energy,
            1.0,
            15.5,
        )
    }

    /// The bundled constant-gap model.
    pub fn rabi(energy: f64) -> Result<Self> {
        Self::new(
            ChannelModel::Rabi {
                gap: 0.05,
                strength: 0.6,
                r_c: 3.0,
                width: 0.8,
            },
            10.0,
            0.0,
            0,
            energy,
            1.0,
            12.0,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(ChannelError::InvalidParameter(msg.to_string()));
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return bad("M > 0 required");
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return bad("hbar > 0 required");
        }
        if !(self.energy > 0.0 && self.energy.is_finite()) {
            return bad("total energy must be positive and finite");
        }
        if !self.z1z2.is_finite() {
            return bad("Z1Z2 must be finite");
        }
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return bad("r_max > 0 required");
        }
        self.model.validate()?;
        let n = self.channels();
        let mut m = vec![0.0; n * n];
        for k in 1..=64 {
            let r = self.r_max * k as f64 / 64.0;
            if (0..n).any(|c| !self.model.curve(c, r).is_finite()) {
                return Err(ChannelError::InvalidParameter(format!(
                    "adiabatic curves must be finite (not at R = {r})"
                )));
            }
        }
        for coupling in [true, false] {
            if coupling {
                self.model.radial_coupling(self.r_max, &mut m);
            } else {
                self.model.rotational_coupling(self.r_max, &mut m);
            }
            if m.iter().any(|v| !(v.abs() < 1e-8)) {
                return bad("couplings must vanish (below 1e-8) at r_max");
            }
        }
        Ok(())
    }

    pub fn channels(&self) -> usize {
        self.model.channels()
    }

    pub fn with_energy(&self, energy: f64) -> Result<Self> {
        let mut s = self.clone();
        s.energy = energy;
        s.validate()?;
        Ok(s)
    }

    /// `ℒ = ħ √(L(L+1))`.
    pub fn angular_momentum(&self) -> f64 {
        let l = self.l as f64;
        self.hbar * (l * (l + 1.0)).sqrt()
    }

    /// Channel-independent part of the potential: centrifugal plus Coulomb.
    pub fn common_potential(&self, r: f64) -> f64 {
        let mut v = 0.0;
        if self.l > 0 {
            let lam = self.angular_momentum();
            v += lam * lam / (2.0 * self.mass * r * r);
        }
        if self.z1z2 != 0.0 {
            v += self.z1z2 / r;
        }
        v
    }

    /// A copy in which every channel follows the first curve, so all
    /// channel momenta coincide.
    pub fn identical_curves_control(&self) -> Self {
        let src = self.clone();
        let n = self.channels();
        let curves = (0..n)
            .map(|_| {
                let m = src.model.clone();
                RadialFn::new(move |r| m.curve(0, r))
            })
            .collect();
        let pick = |rotational: bool| -> Vec<CouplingTerm> {
            let mut terms = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let m = src.model.clone();
                    terms.push(CouplingTerm {
                        i,
                        j,
                        f: RadialFn::new(move |r| {
                            let mut out = vec![0.0; n * n];
                            if rotational {
                                m.rotational_coupling(r, &mut out);
                            } else {
                                m.radial_coupling(r, &mut out);
                            }
                            out[i * n + j]
                        }),
                    });
                }
            }
            terms
        };
        let rotational = if self.model.has_rotational_coupling() {
            pick(true)
        } else {
            Vec::new()
        };
        Self {
            model: ChannelModel::Custom(CustomModel {
                curves,
                radial: pick(false),
                rotational,
            }),
            ..self.clone()
        }
    }
}

/// `P_n(R) = √(2M[ℰ − ℒ²/(2MR²) − Z1Z2/R − E_n(R)])`, or `Closed` where
/// the radicand is negative.
pub fn radial_momentum(sys: &ChannelSystem, n: usize, r: f64) -> Momentum {
    let radicand = 2.0 * sys.mass * (sys.energy - sys.common_potential(r) - sys.model.curve(n, r));
    if radicand >= 0.0 {
        Momentum::Open(radicand.sqrt())
    } else {
        Momentum::Closed
    }
}
