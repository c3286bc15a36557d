//! Complex classical motion in the cubic well `V(x) = x²/2 − g x³`.
//!
//! A quasi-stationary state of this well has complex energy whose imaginary
//! part is fixed by the lifetime `τ(g)`. Hamilton's equations at that energy
//! drive a trajectory through the complex `x` plane; the time `t_c` it needs
//! to reach the real part of the outer turning point is compared with `τ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::{
    solve_cubic_complex, DormandPrince, NumericsError, OdeSpec, ToleranceConfig,
};

/// Below this coupling `exp(2/(15 g²))` overflows an `f64`.
pub const DEFAULT_G_FLOOR: f64 = 0.0138;

/// Couplings listed in the reference table.
pub const TABLE1_G: [f64; 4] = [0.12522, 0.14311, 0.16099, 0.17888];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrajectoryError {
    #[error("coupling must satisfy g > 0, got {0}")]
    InvalidCoupling(f64),

    #[error("lifetime overflows for g = {g} (floor {floor})")]
    RangeError { g: f64, floor: f64 },

    #[error("energy drift {drift:e} exceeds tolerance {tolerance:e} at t = {t}")]
    EnergyDriftExceeded { t: f64, drift: f64, tolerance: f64 },

    #[error("trajectory never reached Re x3 before t_max = {lower_bound}")]
    NeverCrossed { lower_bound: f64 },

    #[error("invalid trajectory parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T, E = TrajectoryError> = std::result::Result<T, E>;

fn check_g(g: f64) -> Result<()> {
    if g > 0.0 && g.is_finite() {
        Ok(())
    } else {
        Err(TrajectoryError::InvalidCoupling(g))
    }
}

/// Small-`g` lifetime `τ = ½ g √π exp(2/(15 g²))`.
pub fn lifetime_tau(g: f64) -> Result<f64> {
    lifetime_tau_with_floor(g, DEFAULT_G_FLOOR)
}

pub fn lifetime_tau_with_floor(g: f64, floor: f64) -> Result<f64> {
    check_g(g)?;
    if g < floor {
        return Err(TrajectoryError::RangeError { g, floor });
    }
    let tau = 0.5 * g * PI.sqrt() * (2.0 / (15.0 * g * g)).exp();
    if tau.is_finite() {
        Ok(tau)
    } else {
        Err(TrajectoryError::RangeError { g, floor })
    }
}

/// Real part of the resonance energy: the harmonic value, optionally with the
/// leading perturbative shift of the cubic term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyOrder {
    Harmonic,
    #[default]
    SecondOrder,
}

impl EnergyOrder {
    pub fn from_order(order: u32) -> Result<Self> {
        match order {
            0 => Ok(Self::Harmonic),
            2 => Ok(Self::SecondOrder),
            other => Err(TrajectoryError::InvalidParameter(format!(
                "correction order must be 0 or 2, got {other}"
            ))),
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Self::Harmonic => 0,
            Self::SecondOrder => 2,
        }
    }
}

/// `E = ½ [− (11/8) g²] − i / (2τ)`.
pub fn resonance_energy(g: f64, order: EnergyOrder) -> Result<Complex64> {
    let tau = lifetime_tau(g)?;
    let re = match order {
        EnergyOrder::Harmonic => 0.5,
        EnergyOrder::SecondOrder => 0.5 - 11.0 / 8.0 * g * g,
    };
    Ok(Complex64::new(re, -0.5 / tau))
}

pub fn potential(g: f64, x: Complex64) -> Complex64 {
    x * x * (0.5 - g * x)
}

/// `−V′(x) = −x + 3 g x²`.
pub fn force(g: f64, x: Complex64) -> Complex64 {
    x * (3.0 * g * x - 1.0)
}

/// Roots of `E = x²/2 − g x³`, sorted by real part.
pub fn turning_points(g: f64, energy: Complex64) -> Result<[Complex64; 3]> {
    check_g(g)?;
    Ok(solve_cubic_complex(
        Complex64::new(-g, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(0.0, 0.0),
        -energy,
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicSystem {
    pub g: f64,
    pub energy: Complex64,
    pub turning_points: [Complex64; 3],
}

impl CubicSystem {
    pub fn new(g: f64, energy: Complex64) -> Result<Self> {
        let turning_points = turning_points(g, energy)?;
        Ok(Self {
            g,
            energy,
            turning_points,
        })
    }

    /// System at the resonance energy of the given order.
    pub fn resonance(g: f64, order: EnergyOrder) -> Result<Self> {
        Self::new(g, resonance_energy(g, order)?)
    }

    pub fn hamiltonian(&self, x: Complex64, p: Complex64) -> Complex64 {
        0.5 * p * p + potential(self.g, x)
    }

    /// Energy error normalised by the largest of `1`, `|E|`, `|p²/2|`, `|V|`,
    /// so the measure stays meaningful on large excursions.
    pub fn energy_drift(&self, x: Complex64, p: Complex64) -> f64 {
        let kinetic = 0.5 * p * p;
        let v = potential(self.g, x);
        let scale = 1f64
            .max(self.energy.norm())
            .max(kinetic.norm())
            .max(v.norm());
        (kinetic + v - self.energy).norm() / scale
    }
}

/// Where the trajectory starts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InitialCondition {
    /// Real `x0` at the given fraction of the way from `Re x1` to `Re x2`
    /// (`0.5` is the midpoint); `p0` is the principal root with `Re p0 ≥ 0`.
    WellFraction(f64),
    /// Midpoint of `Re x1` and `Re x2`.
    #[default]
    WellMidpoint,
    /// Explicit phase-space point; must lie on the energy shell.
    Explicit { x: Complex64, p: Complex64 },
}

impl InitialCondition {
    pub fn phase_space_point(&self, system: &CubicSystem) -> Result<(Complex64, Complex64)> {
        let [x1, x2, _] = system.turning_points;
        let frac = match *self {
            Self::WellMidpoint => 0.5,
            Self::WellFraction(f) if (0.0..=1.0).contains(&f) => f,
            Self::WellFraction(f) => {
                return Err(TrajectoryError::InvalidParameter(format!(
                    "well fraction must lie in [0, 1], got {f}"
                )))
            }
            Self::Explicit { x, p } => {
                let drift = system.energy_drift(x, p);
                if drift > 1e-10 {
                    return Err(TrajectoryError::InvalidParameter(format!(
                        "explicit initial point is off the energy shell by {drift:e}"
                    )));
                }
                return Ok((x, p));
            }
        };
        let x0 = Complex64::new(x1.re + frac * (x2.re - x1.re), 0.0);
        let mut p0 = (2.0 * (system.energy - potential(system.g, x0))).sqrt();
        if p0.re < 0.0 {
            p0 = -p0;
        }
        Ok((x0, p0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    pub tolerance: ToleranceConfig,
    /// Bound on [`CubicSystem::energy_drift`] at every accepted step.
    pub energy_tolerance: f64,
    pub initial_condition: InitialCondition,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            tolerance: ToleranceConfig::uniform(1e-12),
            energy_tolerance: 1e-8,
            initial_condition: InitialCondition::WellMidpoint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub x: Complex64,
    pub p: Complex64,
}

fn hamilton_rhs(g: f64) -> impl FnMut(f64, &[Complex64], &mut [Complex64]) {
    move |_t, y, dy| {
        dy[0] = y[1];
        dy[1] = force(g, y[0]);
    }
}

fn stepper(
    system: &CubicSystem,
    config: &TrajectoryConfig,
    t1: f64,
) -> Result<DormandPrince<impl FnMut(f64, &[Complex64], &mut [Complex64])>> {
    let (x0, p0) = config.initial_condition.phase_space_point(system)?;
    Ok(DormandPrince::new(OdeSpec {
        rhs: hamilton_rhs(system.g),
        initial_state: vec![x0, p0],
        t0: 0.0,
        t1,
        tolerance: config.tolerance,
    })?)
}

fn check_drift(system: &CubicSystem, config: &TrajectoryConfig, t: f64, y: &[Complex64]) -> Result<()> {
    let drift = system.energy_drift(y[0], y[1]);
    if drift > config.energy_tolerance || !drift.is_finite() {
        return Err(TrajectoryError::EnergyDriftExceeded {
            t,
            drift,
            tolerance: config.energy_tolerance,
        });
    }
    Ok(())
}

/// Integrates the equations of motion along a path `t(s)` in the complex time
/// plane, `s` running from `s0` to `s1`.
fn integrate_path<P>(
    system: &CubicSystem,
    config: &TrajectoryConfig,
    y: [Complex64; 2],
    dt_ds: P,
    s0: f64,
    s1: f64,
    t_label: f64,
) -> Result<[Complex64; 2]>
where
    P: Fn(f64) -> Complex64,
{
    if s0 == s1 {
        return Ok(y);
    }
    let g = system.g;
    let mut stepper = DormandPrince::new(OdeSpec {
        rhs: move |s: f64, y: &[Complex64], dy: &mut [Complex64]| {
            let w = dt_ds(s);
            dy[0] = y[1] * w;
            dy[1] = force(g, y[0]) * w;
        },
        initial_state: y.to_vec(),
        t0: s0,
        t1: s1,
        tolerance: config.tolerance,
    })?;
    while !stepper.advance()? {
        check_drift(system, config, t_label, stepper.state())?;
    }
    let y = stepper.state();
    check_drift(system, config, t_label, y)?;
    Ok([y[0], y[1]])
}

/// Outcome of a real-time leg.
enum Leg {
    Reached([Complex64; 2]),
    /// `|x|` grew past the pole threshold at real time `t`.
    NearPole { t: f64, y: [Complex64; 2] },
}

fn pole_threshold(g: f64) -> f64 {
    5.0 / g
}

fn real_leg(
    system: &CubicSystem,
    config: &TrajectoryConfig,
    y: [Complex64; 2],
    t0: f64,
    t1: f64,
    watch_poles: bool,
) -> Result<Leg> {
    let g = system.g;
    let mut stepper = DormandPrince::new(OdeSpec {
        rhs: hamilton_rhs(g),
        initial_state: y.to_vec(),
        t0,
        t1,
        tolerance: config.tolerance,
    })?;
    let threshold = pole_threshold(g);
    loop {
        let done = stepper.advance()?;
        let s = stepper.state();
        let t = if done { t1 } else { stepper.t() };
        check_drift(system, config, t, s)?;
        if done {
            return Ok(Leg::Reached([s[0], s[1]]));
        }
        if watch_poles && s[0].norm() > threshold {
            return Ok(Leg::NearPole { t, y: [s[0], s[1]] });
        }
    }
}

/// Location of the movable pole of `x(t)` being approached, from the leading
/// terms of the Laurent series `x = 2/(gΔ²) + 1/(6g) + O(Δ²)`, `Δ = t − t*`.
fn pole_estimate(g: f64, t: f64, y: [Complex64; 2]) -> Complex64 {
    let shifted = y[0] - 1.0 / (6.0 * g);
    t + 2.0 * shifted / y[1]
}

/// Integrates Hamilton's equations and records the state at `t = k·sampling`
/// for `k = 0, 1, …` up to `t_max` (the last record sits exactly at `t_max`).
///
/// Complex orbits of the cubic well can pass arbitrarily close to movable
/// poles of `x(t)`, where real-time integration loses all accuracy. When `|x|`
/// grows large the pole `t*` is located and, if it lies within the remaining
/// distance of the real axis, the integration follows a semicircle in complex
/// time around it on the opposite side. The solution is meromorphic, so the
/// continuation back to the real axis is the same function; records inside the
/// detour are reached by short legs perpendicular to the axis.
pub fn run_trajectory(
    system: &CubicSystem,
    t_max: f64,
    sampling: f64,
    config: &TrajectoryConfig,
) -> Result<Vec<TrajectoryRecord>> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(TrajectoryError::InvalidParameter(format!("t_max must be > 0, got {t_max}")));
    }
    if !(sampling > 0.0 && sampling.is_finite()) {
        return Err(TrajectoryError::InvalidParameter(format!(
            "sampling must be > 0, got {sampling}"
        )));
    }
    let g = system.g;
    let n_samples = (t_max / sampling).ceil() as usize;
    let sample_time = |k: usize| (k as f64 * sampling).min(t_max);
    let (x0, p0) = config.initial_condition.phase_space_point(system)?;
    let mut records = Vec::with_capacity(n_samples + 1);
    records.push(TrajectoryRecord { t: 0.0, x: x0, p: p0 });

    let mut y = [x0, p0];
    let mut t = 0.0;
    let mut k = 1;
    // Poles found off-axis are passed on the real line; no second look until
    // the trajectory is beyond them.
    let mut quiet_until = f64::NEG_INFINITY;
    while k <= n_samples {
        let target = sample_time(k);
        match real_leg(system, config, y, t, target, t >= quiet_until)? {
            Leg::Reached(y1) => {
                y = y1;
                t = target;
                records.push(TrajectoryRecord { t, x: y[0], p: y[1] });
                k += 1;
            }
            Leg::NearPole { t: t_stop, y: y_stop } => {
                let pole = pole_estimate(g, t_stop, y_stop);
                let c = pole.re;
                let r = c - t_stop;
                if !(r > 0.0) || pole.im.abs() >= r {
                    y = real_leg_to(system, config, y_stop, t_stop, target)?;
                    t = target;
                    quiet_until = c + r.abs();
                    records.push(TrajectoryRecord { t, x: y[0], p: y[1] });
                    k += 1;
                    continue;
                }
                // Go around on the side away from the pole.
                let sigma = if pole.im >= 0.0 { 1.0 } else { -1.0 };
                let arc = move |phi: f64| Complex64::new(-r * phi.sin(), -sigma * r * phi.cos());
                let mut phi = std::f64::consts::PI;
                let mut y_arc = y_stop;
                while k <= n_samples && sample_time(k) < c + r {
                    let ts = sample_time(k);
                    let phi_s = ((ts - c) / r).clamp(-1.0, 1.0).acos();
                    y_arc = integrate_path(system, config, y_arc, arc, phi, phi_s, ts)?;
                    phi = phi_s;
                    let depth = -sigma * r * phi_s.sin();
                    let down = move |_u: f64| Complex64::new(0.0, -depth);
                    let y_s = integrate_path(system, config, y_arc, down, 0.0, 1.0, ts)?;
                    records.push(TrajectoryRecord { t: ts, x: y_s[0], p: y_s[1] });
                    k += 1;
                }
                y = integrate_path(system, config, y_arc, arc, phi, 0.0, c + r)?;
                t = c + r;
                if t >= t_max {
                    break;
                }
            }
        }
    }
    Ok(records)
}

fn real_leg_to(
    system: &CubicSystem,
    config: &TrajectoryConfig,
    y: [Complex64; 2],
    t0: f64,
    t1: f64,
) -> Result<[Complex64; 2]> {
    match real_leg(system, config, y, t0, t1, false)? {
        Leg::Reached(y) => Ok(y),
        Leg::NearPole { .. } => unreachable!("pole watch disabled"),
    }
}

/// First time with `Re x(t) ≥ Re x3`, linearly interpolated between the
/// bracketing records.
pub fn crossing_time_tc(system: &CubicSystem, trajectory: &[TrajectoryRecord]) -> Result<f64> {
    let target = system.turning_points[2].re;
    if let Some(first) = trajectory.first() {
        if first.x.re >= target {
            return Ok(first.t);
        }
    }
    for w in trajectory.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.x.re >= target {
            let s = (target - a.x.re) / (b.x.re - a.x.re);
            return Ok(a.t + s * (b.t - a.t));
        }
    }
    Err(TrajectoryError::NeverCrossed {
        lower_bound: trajectory.last().map_or(0.0, |r| r.t),
    })
}

/// Streaming variant of [`crossing_time_tc`] that keeps no history: each
/// accepted step is checked, and the crossing inside the bracketing step is
/// located by bisection on the step's dense output.
pub fn escape_time(system: &CubicSystem, t_max: f64, config: &TrajectoryConfig) -> Result<f64> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(TrajectoryError::InvalidParameter(format!("t_max must be > 0, got {t_max}")));
    }
    let target = system.turning_points[2].re;
    let mut stepper = stepper(system, config, t_max)?;
    if stepper.state()[0].re >= target {
        return Ok(0.0);
    }
    let mut buf = [Complex64::new(0.0, 0.0); 2];
    loop {
        let done = stepper.advance()?;
        check_drift(system, config, stepper.t(), stepper.state())?;
        if stepper.state()[0].re >= target {
            let (mut a, mut b) = (stepper.previous_t(), stepper.t());
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                stepper.interpolate(m, &mut buf);
                if buf[0].re >= target {
                    b = m;
                } else {
                    a = m;
                }
            }
            return Ok(0.5 * (a + b));
        }
        if done {
            return Err(TrajectoryError::NeverCrossed { lower_bound: t_max });
        }
    }
}

/// A crossing of the real axis by the trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisCrossing {
    pub t: f64,
    pub re_x: f64,
    /// `Re(−V′(x))` at the crossing; positive means the path bends rightward.
    pub re_force: f64,
}

/// Every sign change of `Im x` between consecutive records, with time and
/// position linearly interpolated.
pub fn real_axis_crossings(system: &CubicSystem, trajectory: &[TrajectoryRecord]) -> Vec<AxisCrossing> {
    let mut out = Vec::new();
    for w in trajectory.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.x.im == 0.0 || a.x.im.signum() == b.x.im.signum() {
            continue;
        }
        let s = a.x.im / (a.x.im - b.x.im);
        let t = a.t + s * (b.t - a.t);
        let x = Complex64::new(a.x.re + s * (b.x.re - a.x.re), 0.0);
        out.push(AxisCrossing {
            t,
            re_x: x.re,
            re_force: force(system.g, x).re,
        });
    }
    out
}

/// First real-axis crossing to the right of the middle turning point at which
/// the path is concave rightward, that is where the real force points to
/// larger `x`. Earlier right-side crossings bend back towards the well.
pub fn first_changeover(system: &CubicSystem, trajectory: &[TrajectoryRecord]) -> Option<AxisCrossing> {
    let middle = system.turning_points[1].re;
    real_axis_crossings(system, trajectory)
        .into_iter()
        .filter(|c| c.re_x > middle)
        .find(|c| c.re_force > 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeReport {
    pub g: f64,
    pub tau: f64,
    pub t_c: f64,
    pub ratio: f64,
}

/// Settings for one row of the escape-time table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub energy_order: EnergyOrder,
    pub trajectory: TrajectoryConfig,
    /// Integration horizon as a multiple of `τ`, plus a fixed margin.
    pub t_max_over_tau: f64,
    pub t_max_margin: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            energy_order: EnergyOrder::SecondOrder,
            trajectory: TrajectoryConfig::default(),
            t_max_over_tau: 100.0,
            t_max_margin: 200.0,
        }
    }
}

pub fn escape_report(g: f64, config: &SweepConfig) -> Result<EscapeReport> {
    let tau = lifetime_tau(g)?;
    let system = CubicSystem::resonance(g, config.energy_order)?;
    let t_max = config.t_max_over_tau * tau + config.t_max_margin;
    let t_c = escape_time(&system, t_max, &config.trajectory)?;
    Ok(EscapeReport {
        g,
        tau,
        t_c,
        ratio: t_c / tau,
    })
}

/// One report per coupling, in input order; failures stay per-row.
pub fn table1_sweep(gs: &[f64], config: &SweepConfig) -> Vec<Result<EscapeReport>> {
    gs.par_iter().map(|&g| escape_report(g, config)).collect()
}

/// Escape time under one alternative choice of energy and starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityVariant {
    pub energy_order: EnergyOrder,
    pub well_fraction: f64,
    pub t_c: Result<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityRow {
    pub g: f64,
    pub variants: Vec<SensitivityVariant>,
}

impl SensitivityRow {
    /// `(min, max)` of the successful variants.
    pub fn band(&self) -> Option<(f64, f64)> {
        let ok: Vec<f64> = self.variants.iter().filter_map(|v| v.t_c.clone().ok()).collect();
        if ok.is_empty() {
            return None;
        }
        Some((
            ok.iter().copied().fold(f64::INFINITY, f64::min),
            ok.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ))
    }
}

/// Escape times over both energy orders and three starting points inside the
/// well, quantifying how much `t_c` depends on choices the table leaves open.
pub fn sensitivity_sweep(gs: &[f64], base: &SweepConfig) -> Vec<SensitivityRow> {
    const FRACTIONS: [f64; 3] = [0.25, 0.5, 0.75];
    const ORDERS: [EnergyOrder; 2] = [EnergyOrder::Harmonic, EnergyOrder::SecondOrder];
    let jobs: Vec<(f64, EnergyOrder, f64)> = gs
        .iter()
        .flat_map(|&g| ORDERS.iter().flat_map(move |&o| FRACTIONS.iter().map(move |&f| (g, o, f))))
        .collect();
    let results: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(g, order, frac)| {
            let mut cfg = *base;
            cfg.energy_order = order;
            cfg.trajectory.initial_condition = InitialCondition::WellFraction(frac);
            escape_report(g, &cfg).map(|r| r.t_c)
        })
        .collect();
    gs.iter()
        .enumerate()
        .map(|(i, &g)| SensitivityRow {
            g,
            variants: jobs[i * 6..(i + 1) * 6]
                .iter()
                .zip(&results[i * 6..(i + 1) * 6])
                .map(|(&(_, energy_order, well_fraction), t_c)| SensitivityVariant {
                    energy_order,
                    well_fraction,
                    t_c: t_c.clone(),
                })
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_matches_table_values() {
        let expected = [547.3, 85.2, 24.4, 10.2];
        for (g, e) in TABLE1_G.iter().zip(expected) {
            let tau = lifetime_tau(*g).unwrap();
            assert!((tau - e).abs() < 0.005 * e, "g = {g}: {tau}");
        }
    }

    #[test]
    fn tau_rejects_bad_coupling() {
        assert_eq!(lifetime_tau(0.0), Err(TrajectoryError::InvalidCoupling(0.0)));
        assert!(matches!(lifetime_tau(0.01), Err(TrajectoryError::RangeError { .. })));
        assert!(lifetime_tau_with_floor(0.0139, 0.0).is_ok());
        assert!(lifetime_tau_with_floor(0.013, 0.0).is_err());
    }

    #[test]
    fn tau_is_monotone_decreasing() {
        let gs: Vec<f64> = (1..50).map(|i| 0.02 + i as f64 * 0.0095).collect();
        let taus: Vec<f64> = gs.iter().map(|&g| lifetime_tau(g).unwrap()).collect();
        assert!(taus.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn resonance_energy_orders() {
        let e0 = resonance_energy(0.17888, EnergyOrder::Harmonic).unwrap();
        assert!((e0.im + 0.0490).abs() < 5e-4);
        assert_eq!(e0.re, 0.5);
        let e2 = resonance_energy(0.12522, EnergyOrder::SecondOrder).unwrap();
        assert!((0.5 - e2.re - 0.02156).abs() < 1e-5);
        assert!(EnergyOrder::from_order(1).is_err());
    }

    #[test]
    fn turning_points_zero_energy() {
        let tp = turning_points(0.1, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(tp[0], Complex64::new(0.0, 0.0));
        assert_eq!(tp[1], Complex64::new(0.0, 0.0));
        assert!((tp[2] - Complex64::new(5.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn turning_points_small_g_split() {
        let g = 1e-4;
        let tp = turning_points(g, Complex64::new(0.5, 0.0)).unwrap();
        assert!((tp[0].re + 1.0).abs() < 1e-3);
        assert!((tp[1].re - 1.0).abs() < 1e-3);
        assert!((tp[2].re - 0.5 / g).abs() / (0.5 / g) < 1e-3);
    }

    #[test]
    fn turning_points_at_resonance_satisfy_energy_relation() {
        let g = 2.0 / 125f64.sqrt();
        let system = CubicSystem::resonance(g, EnergyOrder::SecondOrder).unwrap();
        for x in system.turning_points {
            assert!((potential(g, x) - system.energy).norm() < 1e-10);
        }
        let [x1, x2, x3] = system.turning_points;
        assert!(x1.re <= x2.re && x2.re <= x3.re);
        assert!((x1 - Complex64::new(-0.839, 0.040)).norm() < 2e-3);
        assert!((x2 - Complex64::new(1.302, -0.124)).norm() < 2e-3);
        assert!((x3 - Complex64::new(2.332, 0.084)).norm() < 2e-3);
    }

    #[test]
    fn harmonic_limit_is_a_sine() {
        let system = CubicSystem::new(1e-8, Complex64::new(0.5, 0.0)).unwrap();
        let recs = run_trajectory(&system, 2.0 * PI, 0.1, &TrajectoryConfig::default()).unwrap();
        for r in &recs {
            assert!((r.x - Complex64::new(r.t.sin(), 0.0)).norm() < 1e-6, "t = {}", r.t);
        }
        assert_eq!(recs.last().unwrap().t, 2.0 * PI);
        assert!(matches!(
            crossing_time_tc(&system, &recs),
            Err(TrajectoryError::NeverCrossed { .. })
        ));
    }

    #[test]
    fn records_are_sampled_on_the_requested_grid() {
        let system = CubicSystem::resonance(0.17888, EnergyOrder::SecondOrder).unwrap();
        let recs = run_trajectory(&system, 5.0, 0.25, &TrajectoryConfig::default()).unwrap();
        assert_eq!(recs.len(), 21);
        for (k, r) in recs.iter().enumerate() {
            assert!((r.t - 0.25 * k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn initial_condition_lies_on_energy_shell() {
        let system = CubicSystem::resonance(0.14311, EnergyOrder::Harmonic).unwrap();
        for ic in [
            InitialCondition::WellMidpoint,
            InitialCondition::WellFraction(0.2),
            InitialCondition::WellFraction(0.9),
        ] {
            let (x, p) = ic.phase_space_point(&system).unwrap();
            assert_eq!(x.im, 0.0);
            assert!(p.re >= 0.0);
            assert!(system.energy_drift(x, p) < 1e-14);
        }
        assert!(InitialCondition::WellFraction(1.5).phase_space_point(&system).is_err());
    }
}
