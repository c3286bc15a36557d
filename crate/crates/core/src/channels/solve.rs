use num_complex::Complex64;
use rayon::prelude::*;

use super::kinematics::{common_trajectory, Kinematics};
use super::{radial_momentum, ChannelError, ChannelSystem, Momentum, Result};
use crate::numerics::{singular_quadrature_with, DormandPrince, OdeSpec, QuadratureConfig, ToleranceConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSolverConfig {
    pub tolerance: ToleranceConfig,
    /// Largest allowed drift of `Σ|F̃_n|²` in the time-dependent solver.
    pub unitarity_tolerance: f64,
    /// Points used to check that every channel stays open.
    pub scan_points: usize,
    pub quadrature: QuadratureConfig,
}

impl Default for ChannelSolverConfig {
    fn default() -> Self {
        Self {
            tolerance: ToleranceConfig::uniform(1e-12),
            unitarity_tolerance: 1e-8,
            scan_points: 2000,
            quadrature: QuadratureConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Stationary,
    TimeDependent,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stationary => "stationary",
            Self::TimeDependent => "time-dependent",
        }
    }
}

/// Final channel populations of one collision.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionResult {
    pub probabilities: Vec<f64>,
    pub method: Method,
    pub energy: f64,
    /// `Σ|F̃_n|²` before normalisation. Exactly conserved only by the
    /// time-dependent system.
    pub norm: f64,
}

/// Full final state of a time-dependent run, enough to continue or invert it.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeDependentOutcome {
    pub result: TransitionResult,
    pub amplitudes: Vec<Complex64>,
    /// `∫ E_n dt` per channel, including the supplied starting values.
    pub phases: Vec<f64>,
    pub max_norm_deviation: f64,
}

fn indicator(n: usize, channel: usize) -> Result<Vec<Complex64>> {
    if channel >= n {
        return Err(ChannelError::InvalidParameter(format!(
            "initial channel {channel} out of range for {n} channels"
        )));
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[channel] = Complex64::new(1.0, 0.0);
    Ok(v)
}

/// Integrates the amplitude equations along the common trajectory of `sys`,
/// starting with all population in `initial_channel`.
pub fn solve_time_dependent(
    sys: &ChannelSystem,
    initial_channel: usize,
    config: &ChannelSolverConfig,
) -> Result<TransitionResult> {
    let traj = common_trajectory(sys)?;
    let start = indicator(sys.channels(), initial_channel)?;
    let zeros = vec![0.0; sys.channels()];
    Ok(solve_time_dependent_with(sys, &traj, &start, &zeros, config)?.result)
}

/// Integrates `dF̃_n/dt = Σ (Ṙ A_nn′ + θ̇ B_nn′) e^{−i(φ_n − φ_n′)/ħ} F̃_n′`
/// with `φ_n = ∫ E_n dt` along an arbitrary path.
pub fn solve_time_dependent_with(
    sys: &ChannelSystem,
    path: &dyn Kinematics,
    initial_amplitudes: &[Complex64],
    initial_phases: &[f64],
    config: &ChannelSolverConfig,
) -> Result<TimeDependentOutcome> {
    sys.validate()?;
    let n = sys.channels();
    if initial_amplitudes.len() != n || initial_phases.len() != n {
        return Err(ChannelError::InvalidParameter(format!(
            "expected {n} initial amplitudes and phases"
        )));
    }
    let model = &sys.model;
    let hbar = sys.hbar;
    let rotational = model.has_rotational_coupling();
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n * n];
    let rhs = move |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let s = path.state(t);
        model.radial_coupling(s.r, &mut a);
        if rotational {
            model.rotational_coupling(s.r, &mut b);
        }
        for i in 0..n {
            dy[n + i] = Complex64::new(model.curve(i, s.r), 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let w = s.r_dot * a[i * n + j] + if rotational { s.theta_dot * b[i * n + j] } else { 0.0 };
                if w != 0.0 {
                    let phase = -(y[n + i].re - y[n + j].re) / hbar;
                    acc += w * Complex64::from_polar(1.0, phase) * y[j];
                }
            }
            dy[i] = acc;
        }
    };

    let norm0: f64 = initial_amplitudes.iter().map(|z| z.norm_sqr()).sum();
    let mut y: Vec<Complex64> = initial_amplitudes.to_vec();
    y.extend(initial_phases.iter().map(|&p| Complex64::new(p, 0.0)));
    let (t0, t1) = path.time_span();
    let mut knots = vec![t0];
    knots.extend(path.breakpoints().into_iter().filter(|&t| t > t0 && t < t1));
    knots.push(t1);

    let mut worst = 0.0f64;
    let mut rhs = rhs;
    for w in knots.windows(2) {
        let mut stepper = DormandPrince::new(OdeSpec {
            rhs: &mut rhs,
            initial_state: y.clone(),
            t0: w[0],
            t1: w[1],
            tolerance: config.tolerance,
        })?;
        loop {
            let done = stepper.advance()?;
            let norm: f64 = stepper.state()[..n].iter().map(|z| z.norm_sqr()).sum();
            let deviation = (norm - norm0).abs();
            worst = worst.max(deviation);
            if !(deviation <= config.unitarity_tolerance) {
                return Err(ChannelError::UnitarityLoss {
                    t: stepper.t(),
                    deviation,
                });
            }
            if done {
                break;
            }
        }
        y.copy_from_slice(stepper.state());
    }

    let amplitudes = y[..n].to_vec();
    let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    Ok(TimeDependentOutcome {
        result: TransitionResult {
            probabilities: amplitudes.iter().map(|z| z.norm_sqr()).collect(),
            method: Method::TimeDependent,
            energy: sys.energy,
            norm,
        },
        phases: y[n..].iter().map(|z| z.re).collect(),
        amplitudes,
        max_norm_deviation: worst,
    })
}

fn open_momentum(sys: &ChannelSystem, channel: usize, r: f64) -> Result<f64> {
    match radial_momentum(sys, channel, r) {
        Momentum::Open(p) if p > 0.0 => Ok(p),
        _ => Err(ChannelError::ChannelClosedInRange { channel, r }),
    }
}

/// Stationary semiclassical propagation with the phase integrals anchored
/// at closest approach.
pub fn solve_stationary_semiclassical(
    sys: &ChannelSystem,
    initial_channel: usize,
    config: &ChannelSolverConfig,
) -> Result<TransitionResult> {
    solve_stationary_with(sys, initial_channel, &vec![0.0; sys.channels()], config)
}

/// Integrates the first-order stationary system along the doubled radial
/// contour (inbound from `r_max` to closest approach, then outbound):
///
/// `dF̃_n/dℓ = Σ (s P_n′/P_n A_nn′ + ℒ/(R² P_n) B_nn′) e^{i(σ_n − σ_n′)/ħ} F̃_n′`
///
/// with path length `ℓ`, `s = dR/dℓ = ∓1` and `σ_n = ∫ P_n dℓ`. The phases
/// start at `−∫_{R_min}^{r_max} P_n dR` plus `phase_offsets[n]`, which moves
/// the lower limit of the action integrals.
pub fn solve_stationary_with(
    sys: &ChannelSystem,
    initial_channel: usize,
    phase_offsets: &[f64],
    config: &ChannelSolverConfig,
) -> Result<TransitionResult> {
    sys.validate()?;
    let n = sys.channels();
    if phase_offsets.len() != n {
        return Err(ChannelError::InvalidParameter(format!("expected {n} phase offsets")));
    }
    let start = indicator(n, initial_channel)?;
    let r_min = common_trajectory(sys)?.closest_approach();
    let span = sys.r_max - r_min;
    let scan = config.scan_points.max(2);
    for k in 0..=scan {
        let r = r_min + span * k as f64 / scan as f64;
        for c in 0..n {
            open_momentum(sys, c, r)?;
        }
    }

    let mut y = start;
    for c in 0..n {
        let action = singular_quadrature_with(
            |r| radial_momentum(sys, c, r).open().unwrap_or(f64::NAN),
            r_min,
            sys.r_max,
            0.0,
            &config.quadrature,
        )?;
        y.push(Complex64::new(phase_offsets[c] - action, 0.0));
    }

    let model = &sys.model;
    let hbar = sys.hbar;
    let lam = sys.angular_momentum();
    let rotational = model.has_rotational_coupling() && lam > 0.0;
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n * n];
    let mut p = vec![0.0; n];
    let mut rhs = move |l: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let (r, s) = if l <= span { (sys.r_max - l, -1.0) } else { (r_min + (l - span), 1.0) };
        for (c, pc) in p.iter_mut().enumerate() {
            *pc = radial_momentum(sys, c, r).open().unwrap_or(f64::NAN);
        }
        model.radial_coupling(r, &mut a);
        if rotational {
            model.rotational_coupling(r, &mut b);
        }
        for i in 0..n {
            dy[n + i] = Complex64::new(p[i], 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let mut w = s * p[j] / p[i] * a[i * n + j];
                if rotational {
                    w += lam / (r * r * p[i]) * b[i * n + j];
                }
                if w != 0.0 {
                    let phase = (y[n + i].re - y[n + j].re) / hbar;
                    acc += w * Complex64::from_polar(1.0, phase) * y[j];
                }
            }
            dy[i] = acc;
        }
    };

    for (l0, l1) in [(0.0, span), (span, 2.0 * span)] {
        let mut stepper = DormandPrince::new(OdeSpec {
            rhs: &mut rhs,
            initial_state: y.clone(),
            t0: l0,
            t1: l1,
            tolerance: config.tolerance,
        })?;
        while !stepper.advance()? {}
        y.copy_from_slice(stepper.state());
    }

    let raw: Vec<f64> = y[..n].iter().map(|z| z.norm_sqr()).collect();
    let norm: f64 = raw.iter().sum();
    Ok(TransitionResult {
        probabilities: raw.iter().map(|v| v / norm).collect(),
        method: Method::Stationary,
        energy: sys.energy,
        norm,
    })
}

/// One energy of the stationary versus time-dependent comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct EmergenceRow {
    pub energy: f64,
    pub stationary: Vec<f64>,
    pub time_dependent: Vec<f64>,
    /// `max_n |P_stat,n − P_td,n|`.
    pub discrepancy: f64,
    /// The same quantity for the identical-curves control.
    pub control_discrepancy: f64,
    /// Largest `P_max/P_min − 1` over the radial range.
    pub momentum_spread: f64,
    pub max_norm_deviation: f64,
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn emergence_row(
    base: &ChannelSystem,
    energy: f64,
    initial_channel: usize,
    config: &ChannelSolverConfig,
) -> Result<EmergenceRow> {
    let sys = base.with_energy(energy)?;
    let traj = common_trajectory(&sys)?;
    let start = indicator(sys.channels(), initial_channel)?;
    let zeros = vec![0.0; sys.channels()];
    let td = solve_time_dependent_with(&sys, &traj, &start, &zeros, config)?;
    let stat = solve_stationary_semiclassical(&sys, initial_channel, config)?;

    let control = sys.identical_curves_control();
    let ctd = solve_time_dependent_with(&control, &traj, &start, &zeros, config)?;
    let cstat = solve_stationary_semiclassical(&control, initial_channel, config)?;

    let r_min = traj.closest_approach();
    let scan = config.scan_points.max(2);
    let mut spread = 0.0f64;
    for k in 0..=scan {
        let r = r_min + (sys.r_max - r_min) * k as f64 / scan as f64;
        let ps: Vec<f64> = (0..sys.channels())
            .map(|c| open_momentum(&sys, c, r))
            .collect::<Result<_>>()?;
        let hi = ps.iter().cloned().fold(f64::MIN, f64::max);
        let lo = ps.iter().cloned().fold(f64::MAX, f64::min);
        spread = spread.max(hi / lo - 1.0);
    }

    Ok(EmergenceRow {
        energy,
        discrepancy: max_abs_diff(&stat.probabilities, &td.result.probabilities),
        control_discrepancy: max_abs_diff(&cstat.probabilities, &ctd.result.probabilities),
        stationary: stat.probabilities,
        time_dependent: td.result.probabilities,
        momentum_spread: spread,
        max_norm_deviation: td.max_norm_deviation.max(ctd.max_norm_deviation),
    })
}

/// Compares both solvers at each energy (rows computed in parallel, output
/// in input order). Failures are reported per row.
pub fn emergence_of_time_sweep(
    sys: &ChannelSystem,
    energies: &[f64],
    initial_channel: usize,
    config: &ChannelSolverConfig,
) -> Vec<Result<EmergenceRow>> {
    energies
        .par_iter()
        .map(|&e| emergence_row(sys, e, initial_channel, config))
        .collect()
}
