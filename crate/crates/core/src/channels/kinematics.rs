use super::{ChannelError, ChannelSystem, Result};

/// Position and velocity of the internuclear vector in polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicState {
    pub r: f64,
    pub r_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
}

/// A prescribed nuclear path `t ↦ (R, θ)` over a finite time window.
pub trait Kinematics: Send + Sync {
    fn time_span(&self) -> (f64, f64);

    /// Interior times where the velocity may be discontinuous; integrators
    /// stop and restart there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn state(&self, t: f64) -> KinematicState;
}

/// Classical path in the channel-independent potential. Closed forms are
/// used throughout: a straight line when there is no Coulomb term and a
/// Kepler hyperbola otherwise, with `t = 0` at closest approach.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    orbit: Orbit,
    mass: f64,
    z1z2: f64,
    angular_momentum: f64,
    energy: f64,
    half_duration: f64,
    r_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Orbit {
    Straight { b: f64, v: f64 },
    /// `r = a (e cosh ξ + sign)`, `n t = e sinh ξ + sign·ξ`.
    Hyperbola { a: f64, e: f64, n: f64, sign: f64 },
}

/// Builds the common trajectory of `sys`, entering and leaving at `r_max`.
pub fn common_trajectory(sys: &ChannelSystem) -> Result<Trajectory> {
    let lam = sys.angular_momentum();
    let speed = (2.0 * sys.energy / sys.mass).sqrt();
    let b = lam / (sys.mass * speed);
    let orbit = if sys.z1z2 == 0.0 {
        Orbit::Straight { b, v: speed }
    } else {
        let a = sys.z1z2.abs() / (2.0 * sys.energy);
        let e = (1.0 + (b / a).powi(2)).sqrt();
        let sign = sys.z1z2.signum();
        if sign < 0.0 && sys.l == 0 {
            return Err(ChannelError::TrappedOrbit(
                "attractive head-on collision falls into R = 0".into(),
            ));
        }
        Orbit::Hyperbola {
            a,
            e,
            n: (sys.z1z2.abs() / (sys.mass * a.powi(3))).sqrt(),
            sign,
        }
    };
    let r_min = match orbit {
        Orbit::Straight { b, .. } => b,
        Orbit::Hyperbola { a, e, sign, .. } => a * (e + sign),
    };
    if !(sys.r_max > r_min) {
        return Err(ChannelError::InvalidParameter(format!(
            "r_max = {} does not exceed the closest approach {r_min}",
            sys.r_max
        )));
    }
    let half_duration = match orbit {
        Orbit::Straight { b, v } => (sys.r_max * sys.r_max - b * b).sqrt() / v,
        Orbit::Hyperbola { a, e, n, sign } => {
            let xi = ((sys.r_max / a - sign) / e).acosh();
            (e * xi.sinh() + sign * xi) / n
        }
    };
    Ok(Trajectory {
        orbit,
        mass: sys.mass,
        z1z2: sys.z1z2,
        angular_momentum: lam,
        energy: sys.energy,
        half_duration,
        r_min,
    })
}

impl Trajectory {
    pub fn closest_approach(&self) -> f64 {
        self.r_min
    }

    pub fn half_duration(&self) -> f64 {
        self.half_duration
    }

    pub fn is_straight_line(&self) -> bool {
        matches!(self.orbit, Orbit::Straight { .. })
    }

    /// Total mechanical energy at `t`, for conservation checks.
    pub fn energy_at(&self, t: f64) -> f64 {
        let s = self.state(t);
        let mut v = 0.5 * self.mass * (s.r_dot.powi(2) + (s.r * s.theta_dot).powi(2));
        if self.z1z2 != 0.0 {
            v += self.z1z2 / s.r;
        }
        v
    }

    pub fn total_energy(&self) -> f64 {
        self.energy
    }

    fn eccentric_anomaly(e: f64, n: f64, sign: f64, t: f64) -> f64 {
        let target = n * t;
        let mut xi = (target / e).asinh();
        for _ in 0..100 {
            let f = e * xi.sinh() + sign * xi - target;
            let step = f / (e * xi.cosh() + sign);
            xi -= step;
            if step.abs() <= 1e-15 * xi.abs().max(1.0) {
                break;
            }
        }
        xi
    }
}

impl Kinematics for Trajectory {
    fn time_span(&self) -> (f64, f64) {
        (-self.half_duration, self.half_duration)
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![0.0]
    }

    fn state(&self, t: f64) -> KinematicState {
        match self.orbit {
            Orbit::Straight { b, v } => {
                // Incoming along +x, so θ grows from 0 towards π.
                let x = -v * t;
                let r = x.hypot(b);
                if r == 0.0 {
                    return KinematicState {
                        r,
                        r_dot: v,
                        theta: 0.0,
                        theta_dot: 0.0,
                    };
                }
                KinematicState {
                    r,
                    r_dot: v * v * t / r,
                    theta: b.atan2(x),
                    theta_dot: b * v / (r * r),
                }
            }
            Orbit::Hyperbola { a, e, n, sign } => {
                let xi = Self::eccentric_anomaly(e, n, sign, t);
                let r = a * (e * xi.cosh() + sign);
                let xi_dot = n * a / r;
                let (x, y) = if sign > 0.0 {
                    (-a * (xi.cosh() + e), a * (e * e - 1.0).sqrt() * xi.sinh())
                } else {
                    (a * (e - xi.cosh()), a * (e * e - 1.0).sqrt() * xi.sinh())
                };
                let theta = if sign > 0.0 { y.atan2(-x) } else { y.atan2(x) };
                KinematicState {
                    r,
                    r_dot: a * e * xi.sinh() * xi_dot,
                    theta,
                    theta_dot: self.angular_momentum / (self.mass * r * r),
                }
            }
        }
    }
}

/// The time-reversed path `t ↦ path(−t)`.
#[derive(Debug, Clone)]
pub struct Reversed<K>(pub K);

impl<K: Kinematics> Kinematics for Reversed<K> {
    fn time_span(&self) -> (f64, f64) {
        let (a, b) = self.0.time_span();
        (-b, -a)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.0.breakpoints().iter().map(|t| -t).collect();
        b.reverse();
        b
    }

    fn state(&self, t: f64) -> KinematicState {
        let s = self.0.state(-t);
        KinematicState {
            r: s.r,
            r_dot: -s.r_dot,
            theta: s.theta,
            theta_dot: -s.theta_dot,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::ChannelModel;
    use std::f64::consts::PI;

    fn system(z1z2: f64, l: u32, energy: f64) -> ChannelSystem {
        ChannelSystem::new(
            ChannelModel::Rabi {
                gap: 0.0,
                strength: 0.0,
                r_c: 1.0,
                width: 0.5,
            },
            2.0,
            z1z2,
            l,
            energy,
            1.0,
            40.0,
        )
        .unwrap()
    }

    #[test]
    fn free_head_on_is_linear_in_abs_t() {
        let traj = common_trajectory(&system(0.0, 0, 4.0)).unwrap();
        let v = 2.0;
        for t in [-3.0, -0.5, 0.25, 7.0] {
            let s = traj.state(t);
            assert!((s.r - v * f64::abs(t)).abs() < 1e-14);
        }
        let (t0, t1) = traj.time_span();
        let sweep = traj.state(t1).theta - traj.state(t0).theta;
        assert!((sweep - PI).abs() < 1e-14);
    }

    #[test]
    fn energy_is_conserved_on_every_orbit() {
        for (z, l) in [(0.0, 5), (1.0, 0), (1.0, 10), (-1.0, 10)] {
            let traj = common_trajectory(&system(z, l, 3.0)).unwrap();
            let (t0, t1) = traj.time_span();
            for k in 0..=50 {
                let t = t0 + (t1 - t0) * k as f64 / 50.0;
                let drift = (traj.energy_at(t) - 3.0).abs() / 3.0;
                assert!(drift < 1e-10, "z={z} l={l} t={t} drift={drift}");
            }
            assert!((traj.state(t1).r - 40.0).abs() < 1e-9);
        }
    }

    #[test]
    fn theta_rate_matches_angle_derivative() {
        let traj = common_trajectory(&system(1.0, 10, 3.0)).unwrap();
        let h = 1e-5;
        for t in [-2.0, 0.1, 1.5] {
            let fd = (traj.state(t + h).theta - traj.state(t - h).theta) / (2.0 * h);
            let rd = (traj.state(t + h).r - traj.state(t - h).r) / (2.0 * h);
            let s = traj.state(t);
            assert!((fd - s.theta_dot).abs() < 1e-7 * s.theta_dot.abs().max(1.0));
            assert!((rd - s.r_dot).abs() < 1e-7);
        }
    }

    #[test]
    fn attractive_head_on_is_trapped() {
        assert!(matches!(
            common_trajectory(&system(-1.0, 0, 3.0)),
            Err(ChannelError::TrappedOrbit(_))
        ));
    }
}
