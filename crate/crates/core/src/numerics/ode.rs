use std::ops::ControlFlow;

use num_complex::Complex64;

use super::{is_finite, NumericsError, Result};

/// Error tolerances and step budget for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_steps: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(NumericsError::InvalidInput(
                "abs_tol > 0 and rel_tol > 0 required".into(),
            ));
        }
        if max_steps == 0 {
            return Err(NumericsError::InvalidInput("max_steps >= 1 required".into()));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_steps,
        })
    }

    /// Same absolute and relative tolerance, generous step budget.
    pub fn uniform(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            max_steps: 50_000_000,
        }
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self::uniform(1e-10)
    }
}

/// An initial-value problem `dy/dt = rhs(t, y)` over complex state vectors.
pub struct OdeSpec<F> {
    pub rhs: F,
    pub initial_state: Vec<Complex64>,
    pub t0: f64,
    pub t1: f64,
    pub tolerance: ToleranceConfig,
}

/// Outcome of an observer callback: keep integrating or stop after this step.
pub type StepControl = ControlFlow<()>;

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Adaptive Dormand–Prince 5(4) stepper over complex state; real and
/// imaginary parts are weighted as independent real components in the
/// error norm. Integrates forward or backward in time.
pub struct DormandPrince<F> {
    rhs: F,
    tol: ToleranceConfig,
    t: f64,
    t_end: f64,
    direction: f64,
    h: f64,
    y: Vec<Complex64>,
    f: Vec<Complex64>,
    t_prev: f64,
    y_prev: Vec<Complex64>,
    f_prev: Vec<Complex64>,
    k: [Vec<Complex64>; 6],
    y_stage: Vec<Complex64>,
    y_new: Vec<Complex64>,
    attempts: usize,
    accepted: usize,
    max_step: f64,
}

impl<F> DormandPrince<F>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    pub fn new(spec: OdeSpec<F>) -> Result<Self> {
        let OdeSpec {
            mut rhs,
            initial_state,
            t0,
            t1,
            tolerance,
        } = spec;
        let n = initial_state.len();
        if n == 0 {
            return Err(NumericsError::InvalidInput("dimension >= 1 required".into()));
        }
        if !(t0.is_finite() && t1.is_finite()) || t0 == t1 {
            return Err(NumericsError::InvalidInput("t1 != t0 required".into()));
        }
        ToleranceConfig::new(tolerance.abs_tol, tolerance.rel_tol, tolerance.max_steps)?;
        if !initial_state.iter().copied().all(is_finite) {
            return Err(NumericsError::InvalidInput("initial state must be finite".into()));
        }

        let mut f = vec![Complex64::new(0.0, 0.0); n];
        rhs(t0, &initial_state, &mut f);
        if !f.iter().copied().all(is_finite) {
            return Err(NumericsError::RhsNonFinite { t: t0 });
        }
        let direction = (t1 - t0).signum();
        let zero = || vec![Complex64::new(0.0, 0.0); n];
        let mut stepper = Self {
            rhs,
            tol: tolerance,
            t: t0,
            t_end: t1,
            direction,
            h: 0.0,
            y: initial_state.clone(),
            f: f.clone(),
            t_prev: t0,
            y_prev: initial_state,
            f_prev: f,
            k: [zero(), zero(), zero(), zero(), zero(), zero()],
            y_stage: zero(),
            y_new: zero(),
            attempts: 0,
            accepted: 0,
            max_step: f64::INFINITY,
        };
        stepper.h = stepper.initial_step();
        Ok(stepper)
    }

    /// Caps the step magnitude; useful when the right-hand side has features
    /// narrower than the adaptive controller would otherwise discover.
    pub fn with_max_step(mut self, max_step: f64) -> Self {
        if max_step > 0.0 {
            self.max_step = max_step;
            self.h = self.h.signum() * self.h.abs().min(max_step);
        }
        self
    }

    /// Moves the end point further along the current direction so that
    /// subsequent steps land exactly on `t_end`.
    pub fn retarget(&mut self, t_end: f64) -> Result<()> {
        if !t_end.is_finite() || (t_end - self.t) * self.direction < 0.0 {
            return Err(NumericsError::InvalidInput(format!(
                "cannot retarget from t = {} to {t_end}",
                self.t
            )));
        }
        self.t_end = t_end;
        Ok(())
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &[Complex64] {
        &self.y
    }

    pub fn derivative(&self) -> &[Complex64] {
        &self.f
    }

    pub fn previous_t(&self) -> f64 {
        self.t_prev
    }

    pub fn previous_state(&self) -> &[Complex64] {
        &self.y_prev
    }

    pub fn accepted_steps(&self) -> usize {
        self.accepted
    }

    pub fn is_finished(&self) -> bool {
        self.t == self.t_end
    }

    /// Cubic Hermite interpolation inside the last accepted step.
    pub fn interpolate(&self, t: f64, out: &mut [Complex64]) {
        let h = self.t - self.t_prev;
        if h == 0.0 {
            out.copy_from_slice(&self.y);
            return;
        }
        let s = (t - self.t_prev) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        for i in 0..out.len() {
            out[i] = self.y_prev[i] * h00
                + self.f_prev[i] * (h10 * h)
                + self.y[i] * h01
                + self.f[i] * (h11 * h);
        }
    }

    fn weighted_norm(&self, y0: &[Complex64], y1: &[Complex64], v: &[Complex64]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..v.len() {
            for (a, b, e) in [
                (y0[i].re, y1[i].re, v[i].re),
                (y0[i].im, y1[i].im, v[i].im),
            ] {
                let scale = self.tol.abs_tol + self.tol.rel_tol * a.abs().max(b.abs());
                worst = worst.max((e / scale).abs());
            }
        }
        worst
    }

    fn initial_step(&mut self) -> f64 {
        // Hairer, Nørsett & Wanner, starting step heuristic.
        let n = self.y.len();
        let zeros = vec![Complex64::new(0.0, 0.0); n];
        let d0 = self.weighted_norm(&self.y, &zeros, &self.y);
        let d1 = self.weighted_norm(&self.y, &zeros, &self.f);
        let span = (self.t_end - self.t).abs();
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h0 = h0.min(span).min(self.max_step);
        for i in 0..n {
            self.y_stage[i] = self.y[i] + self.f[i] * (self.direction * h0);
        }
        (self.rhs)(self.t + self.direction * h0, &self.y_stage, &mut self.k[0]);
        let mut diff = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            diff[i] = (self.k[0][i] - self.f[i]) / h0;
        }
        let d2 = self.weighted_norm(&self.y, &zeros, &diff);
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 5.0)
        };
        self.direction * (100.0 * h0).min(h1).min(span).min(self.max_step)
    }

    /// Takes one accepted step (retrying rejected attempts internally).
    /// Returns `Ok(true)` once the end time has been reached.
    pub fn advance(&mut self) -> Result<bool> {
        if self.is_finished() {
            return Ok(true);
        }
        let n = self.y.len();
        loop {
            if self.attempts >= self.tol.max_steps {
                return Err(NumericsError::StepLimitExceeded {
                    t: self.t,
                    max_steps: self.tol.max_steps,
                });
            }
            self.attempts += 1;

            let remaining = self.t_end - self.t;
            let mut h = self.h;
            let mut last = false;
            if h.abs() >= remaining.abs() {
                h = remaining;
                last = true;
            }
            if h.abs() < 1e-14 * self.t.abs().max(1.0) {
                return Err(NumericsError::StepSizeUnderflow { t: self.t, h });
            }

            let t = self.t;
            let y = &self.y;
            let f0 = &self.f;
            let ys = &mut self.y_stage;
            let [k2, k3, k4, k5, k6, k7] = &mut self.k;

            for i in 0..n {
                ys[i] = y[i] + f0[i] * (h * A21);
            }
            (self.rhs)(t + C2 * h, ys, k2);
            for i in 0..n {
                ys[i] = y[i] + (f0[i] * A31 + k2[i] * A32) * h;
            }
            (self.rhs)(t + C3 * h, ys, k3);
            for i in 0..n {
                ys[i] = y[i] + (f0[i] * A41 + k2[i] * A42 + k3[i] * A43) * h;
            }
            (self.rhs)(t + C4 * h, ys, k4);
            for i in 0..n {
                ys[i] = y[i] + (f0[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h;
            }
            (self.rhs)(t + C5 * h, ys, k5);
            for i in 0..n {
                ys[i] = y[i]
                    + (f0[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h;
            }
            (self.rhs)(t + h, ys, k6);
            let t_new = if last { self.t_end } else { t + h };
            for i in 0..n {
                self.y_new[i] = y[i]
                    + (f0[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76) * h;
            }
            (self.rhs)(t_new, &self.y_new, k7);

            let finite = [&*k2, &*k3, &*k4, &*k5, &*k6, &*k7]
                .iter()
                .all(|k| k.iter().copied().all(is_finite))
                && self.y_new.iter().copied().all(is_finite);
            if !finite {
                // Try a smaller step before declaring the field singular.
                if h.abs() > 1e-10 * self.t.abs().max(1.0) {
                    self.h *= 0.1;
                    continue;
                }
                return Err(NumericsError::RhsNonFinite { t });
            }

            for i in 0..n {
                ys[i] = (f0[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                    * h;
            }
            let err = self.weighted_norm(&self.y, &self.y_new, &self.y_stage);

            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };

            if err <= 1.0 {
                std::mem::swap(&mut self.y_prev, &mut self.y);
                std::mem::swap(&mut self.f_prev, &mut self.f);
                self.y.copy_from_slice(&self.y_new);
                self.f.copy_from_slice(&self.k[5]);
                self.t_prev = self.t;
                self.t = t_new;
                self.accepted += 1;
                let next = self.h.abs().max(h.abs()) * factor;
                self.h = self.direction * next.min(self.max_step);
                return Ok(last);
            }
            self.h = h * factor.min(1.0);
        }
    }
}

/// Integrates `spec` and returns every accepted step, starting with the
/// initial state. The observer sees each accepted `(t, state)` and may stop
/// the integration early with `ControlFlow::Break`.
pub fn integrate_complex_ivp<F, O>(
    spec: OdeSpec<F>,
    mut observer: O,
) -> Result<Vec<(f64, Vec<Complex64>)>>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    O: FnMut(f64, &[Complex64]) -> StepControl,
{
    let mut stepper = DormandPrince::new(spec)?;
    let mut out = vec![(stepper.t(), stepper.state().to_vec())];
    if observer(stepper.t(), stepper.state()).is_break() {
        return Ok(out);
    }
    loop {
        let done = stepper.advance()?;
        out.push((stepper.t(), stepper.state().to_vec()));
        if observer(stepper.t(), stepper.state()).is_break() || done {
            return Ok(out);
        }
    }
}
