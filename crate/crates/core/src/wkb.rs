//! Action integrals and Bohr–Sommerfeld quantization for one-dimensional
//! wells (unit mass), including the barrier exponent of the cubic well.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::numerics::{
    bisect, golden_section_min, singular_quadrature_with, symmetric_tridiagonal_lowest,
    NumericsError, QuadratureConfig,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WkbError {
    #[error("no classically allowed region at E = {energy}")]
    NoAllowedRegion { energy: f64 },

    #[error("{count} turning points at E = {energy}; isolate a single well")]
    MoreThanTwoTurningPoints { count: usize, energy: f64 },

    #[error("level n = {n} is not bracketed inside the well (action range [{min_action}, {max_action}])")]
    RootNotBracketed { n: u32, min_action: f64, max_action: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T, E = WkbError> = std::result::Result<T, E>;

/// Closed-form potentials, plus arbitrary closures.
#[derive(Clone)]
pub enum PotentialKind {
    /// `ω² x² / 2`.
    Harmonic { omega: f64 },
    /// `x²/2 − g x³`, restricted to the well left of the barrier top.
    Cubic { g: f64 },
    /// `depth · (x / half_width)^(2·exponent)`: flat bottom with steep walls
    /// as the exponent grows.
    PowerWall { half_width: f64, depth: f64, exponent: u32 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Harmonic { omega } => write!(f, "Harmonic {{ omega: {omega} }}"),
            Self::Cubic { g } => write!(f, "Cubic {{ g: {g} }}"),
            Self::PowerWall {
                half_width,
                depth,
                exponent,
            } => write!(
                f,
                "PowerWall {{ half_width: {half_width}, depth: {depth}, exponent: {exponent} }}"
            ),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl PartialEq for PotentialKind {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Harmonic { omega: a }, Self::Harmonic { omega: b }) => a == b,
            (Self::Cubic { g: a }, Self::Cubic { g: b }) => a == b,
            (
                Self::PowerWall {
                    half_width: w1,
                    depth: d1,
                    exponent: e1,
                },
                Self::PowerWall {
                    half_width: w2,
                    depth: d2,
                    exponent: e2,
                },
            ) => w1 == w2 && d1 == d2 && e1 == e2,
            (Self::Custom(a), Self::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// A potential together with the interval searched for turning points.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialModel {
    pub kind: PotentialKind,
    pub label: String,
    pub domain: (f64, f64),
}

impl PotentialModel {
    pub fn harmonic(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(WkbError::InvalidParameter(format!("omega > 0 required, got {omega}")));
        }
        Ok(Self {
            kind: PotentialKind::Harmonic { omega },
            label: format!("harmonic(omega={omega})"),
            domain: (-100.0 / omega, 100.0 / omega),
        })
    }

    pub fn cubic(g: f64) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(WkbError::InvalidParameter(format!("g > 0 required, got {g}")));
        }
        let top = 1.0 / (3.0 * g);
        Ok(Self {
            kind: PotentialKind::Cubic { g },
            label: format!("cubic(g={g})"),
            domain: (-top, top),
        })
    }

    pub fn power_wall(half_width: f64, depth: f64, exponent: u32) -> Result<Self> {
        if !(half_width > 0.0 && depth > 0.0 && exponent >= 1) {
            return Err(WkbError::InvalidParameter(
                "half_width > 0, depth > 0 and exponent >= 1 required".into(),
            ));
        }
        Ok(Self {
            kind: PotentialKind::PowerWall {
                half_width,
                depth,
                exponent,
            },
            label: format!("power_wall(a={half_width}, k={exponent})"),
            domain: (-2.0 * half_width, 2.0 * half_width),
        })
    }

    pub fn custom<F>(label: impl Into<String>, domain: (f64, f64), f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(domain.0 < domain.1) {
            return Err(WkbError::InvalidParameter("domain must satisfy lo < hi".into()));
        }
        Ok(Self {
            kind: PotentialKind::Custom(Arc::new(f)),
            label: label.into(),
            domain,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Harmonic { omega } => 0.5 * omega * omega * x * x,
            PotentialKind::Cubic { g } => x * x * (0.5 - g * x),
            PotentialKind::PowerWall {
                half_width,
                depth,
                exponent,
            } => depth * (x / half_width).powi(2 * *exponent as i32),
            PotentialKind::Custom(f) => f(x),
        }
    }
}

/// Phase shifts and range of quantum numbers for the quantization rule
/// `∫ p dx = π ħ (n + α1 + α2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationSpec {
    pub alpha1: f64,
    pub alpha2: f64,
    pub hbar: f64,
    pub n_range: std::ops::Range<u32>,
}

impl QuantizationSpec {
    /// Quarter-phase loss at each smooth turning point.
    pub fn caustic(hbar: f64, n_range: std::ops::Range<u32>) -> Self {
        Self {
            alpha1: 0.25,
            alpha2: 0.25,
            hbar,
            n_range,
        }
    }

    /// Integer quantum numbers with the turning-point phases dropped.
    pub fn integer(hbar: f64, n_range: std::ops::Range<u32>) -> Self {
        Self {
            alpha1: 0.0,
            alpha2: 0.0,
            hbar,
            n_range,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(WkbError::InvalidParameter(format!("hbar > 0 required, got {}", self.hbar)));
        }
        Ok(())
    }
}

/// Numerical settings for turning-point search and action quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbConfig {
    pub scan_points: usize,
    /// Bisection resolution of turning points.
    pub resolution: f64,
    pub quadrature: QuadratureConfig,
}

impl Default for WkbConfig {
    fn default() -> Self {
        Self {
            scan_points: 2000,
            resolution: 1e-12,
            quadrature: QuadratureConfig::default(),
        }
    }
}

/// Location and value of the potential minimum inside the domain.
pub fn well_bottom(v: &PotentialModel, config: &WkbConfig) -> (f64, f64) {
    let (lo, hi) = v.domain;
    let n = config.scan_points.max(3);
    let h = (hi - lo) / (n - 1) as f64;
    let (mut best_i, mut best_v) = (0, f64::INFINITY);
    for i in 0..n {
        let val = v.eval(lo + i as f64 * h);
        if val < best_v {
            best_v = val;
            best_i = i;
        }
    }
    let a = lo + best_i.saturating_sub(1) as f64 * h;
    let b = (lo + (best_i + 1) as f64 * h).min(hi);
    let x = golden_section_min(|x| v.eval(x), a, b, 1e-10 * (1.0 + a.abs().max(b.abs())));
    let vx = v.eval(x);
    if vx <= best_v {
        (x, vx)
    } else {
        (lo + best_i as f64 * h, best_v)
    }
}

/// All sign changes of `E − V` on the domain, refined by bisection.
pub fn real_turning_points(v: &PotentialModel, energy: f64, config: &WkbConfig) -> Result<Vec<f64>> {
    let (lo, hi) = v.domain;
    let n = config.scan_points.max(3);
    let h = (hi - lo) / (n - 1) as f64;
    let mut nodes: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
    // The refined minimum keeps narrow allowed regions from hiding inside a
    // single scan cell.
    nodes.push(well_bottom(v, config).0);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let f = |x: f64| energy - v.eval(x);
    let mut points = Vec::new();
    for w in nodes.windows(2) {
        let (fa, fb) = (f(w[0]), f(w[1]));
        if fa == 0.0 {
            points.push(w[0]);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            points.push(bisect(f, w[0], w[1], config.resolution)?);
        }
    }
    if f(hi) == 0.0 {
        points.push(hi);
    }
    Ok(points)
}

/// `∫ √(2(E − V)) dx` across the single allowed region at energy `E`.
pub fn action_between_turning_points(v: &PotentialModel, energy: f64) -> Result<f64> {
    action_with(v, energy, &WkbConfig::default())
}

pub fn action_with(v: &PotentialModel, energy: f64, config: &WkbConfig) -> Result<f64> {
    let points = real_turning_points(v, energy, config)?;
    match points.len() {
        0 | 1 => Err(WkbError::NoAllowedRegion { energy }),
        2 => {
            let (a, b) = (points[0], points[1]);
            if energy - v.eval(0.5 * (a + b)) < 0.0 {
                return Err(WkbError::NoAllowedRegion { energy });
            }
            Ok(singular_quadrature_with(
                |x| (2.0 * (energy - v.eval(x))).max(0.0).sqrt(),
                a,
                b,
                0.5,
                &config.quadrature,
            )?)
        }
        count => Err(WkbError::MoreThanTwoTurningPoints { count, energy }),
    }
}

/// Energies solving `∫ p dx = π ħ (n + α1 + α2)` for each `n` in the range.
pub fn bohr_sommerfeld_levels(v: &PotentialModel, spec: &QuantizationSpec) -> Result<Vec<f64>> {
    bohr_sommerfeld_levels_with(v, spec, &WkbConfig::default())
}

pub fn bohr_sommerfeld_levels_with(
    v: &PotentialModel,
    spec: &QuantizationSpec,
    config: &WkbConfig,
) -> Result<Vec<f64>> {
    spec.validate()?;
    let (_, e_min) = well_bottom(v, config);
    // The well holds energies up to the lower of its two rims.
    let e_max = v.eval(v.domain.0).min(v.eval(v.domain.1));
    let top = e_min + (e_max - e_min) * (1.0 - 1e-9);
    let action = |e: f64| -> Result<f64> {
        if e <= e_min {
            Ok(0.0)
        } else {
            action_with(v, e, config)
        }
    };
    let max_action = action(top)?;
    let mut levels = Vec::with_capacity(spec.n_range.len());
    for n in spec.n_range.clone() {
        let target = PI * spec.hbar * (n as f64 + spec.alpha1 + spec.alpha2);
        if target < 0.0 || target > max_action {
            return Err(WkbError::RootNotBracketed {
                n,
                min_action: 0.0,
                max_action,
            });
        }
        if target == 0.0 {
            levels.push(e_min);
            continue;
        }
        let mut failure = None;
        let root = bisect(
            |e| match action(e) {
                Ok(s) => s - target,
                Err(err) => {
                    failure.get_or_insert(err);
                    f64::NAN
                }
            },
            e_min,
            top,
            1e-14 * (1.0 + e_min.abs().max(top.abs())),
        );
        if let Some(err) = failure {
            return Err(err);
        }
        levels.push(root?);
    }
    Ok(levels)
}

/// `2 ∫ √(2V) dx` under the cubic barrier at `E = 0`, between the middle and
/// outer turning points.
pub fn barrier_exponent(g: f64) -> Result<f64> {
    let tp = crate::trajectory::turning_points(g, num_complex::Complex64::new(0.0, 0.0))
        .map_err(|e| WkbError::InvalidParameter(e.to_string()))?;
    let (a, b) = (tp[1].re, tp[2].re);
    let integral = singular_quadrature_with(
        |x| (2.0 * (x * x * (0.5 - g * x))).max(0.0).sqrt(),
        a,
        b,
        0.5,
        &QuadratureConfig::default(),
    )?;
    Ok(2.0 * integral)
}

/// Lowest eigenvalues of `−½ d²/dx² + V` on `[a, b]` with Dirichlet walls,
/// from the three-point discretization with `n_interior` unknowns.
pub fn grid_levels(v: &PotentialModel, a: f64, b: f64, n_interior: usize, count: usize) -> Result<Vec<f64>> {
    if !(a < b) || n_interior < count.max(2) {
        return Err(WkbError::InvalidParameter("need a < b and enough grid points".into()));
    }
    let h = (b - a) / (n_interior + 1) as f64;
    let kinetic = 0.5 / (h * h);
    let diag: Vec<f64> = (1..=n_interior)
        .map(|i| 2.0 * kinetic + v.eval(a + i as f64 * h))
        .collect();
    let off = vec![-kinetic; n_interior - 1];
    Ok(symmetric_tridiagonal_lowest(&diag, &off, count)?)
}

/// Grid levels extrapolated from `h` and `h/2` (the three-point error is
/// `O(h²)`).
pub fn grid_levels_extrapolated(
    v: &PotentialModel,
    a: f64,
    b: f64,
    n_interior: usize,
    count: usize,
) -> Result<Vec<f64>> {
    let coarse = grid_levels(v, a, b, n_interior, count)?;
    let fine = grid_levels(v, a, b, 2 * n_interior + 1, count)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_action_is_circle_area() {
        let v = PotentialModel::harmonic(1.0).unwrap();
        let s = action_between_turning_points(&v, 1.0).unwrap();
        assert!((s - PI).abs() < 1e-11, "{s}");
    }

    #[test]
    fn steep_walls_approach_box_action() {
        let e: f64 = 0.5;
        let width = 2.0;
        let box_action = width * (2.0f64 * e).sqrt();
        let mut last_err = f64::INFINITY;
        for k in [4, 16, 64, 256] {
            let v = PotentialModel::power_wall(1.0, 10.0, k).unwrap();
            let s = action_between_turning_points(&v, e).unwrap();
            let err = (s - box_action).abs();
            assert!(err < last_err);
            last_err = err;
        }
        assert!(last_err < 0.01 * box_action, "{last_err}");
    }

    #[test]
    fn cubic_action_vanishes_at_the_bottom() {
        let v = PotentialModel::cubic(0.1).unwrap();
        let s = action_between_turning_points(&v, 1e-8).unwrap();
        assert!(s < 1e-7, "{s}");
        // Close to the harmonic value pi E for small E.
        let s = action_between_turning_points(&v, 1e-3).unwrap();
        assert!((s - PI * 1e-3).abs() < 1e-4 * PI * 1e-3 + 1e-6);
    }

    #[test]
    fn action_errors() {
        let v = PotentialModel::harmonic(1.0).unwrap();
        assert!(matches!(
            action_between_turning_points(&v, -1.0),
            Err(WkbError::NoAllowedRegion { .. })
        ));
        let double = PotentialModel::custom("double well", (-3.0, 3.0), |x| (x * x - 1.0).powi(2)).unwrap();
        assert!(matches!(
            action_between_turning_points(&double, 0.5),
            Err(WkbError::MoreThanTwoTurningPoints { count: 4, .. })
        ));
    }

    #[test]
    fn harmonic_levels_with_and_without_caustic_phase() {
        let v = PotentialModel::harmonic(1.0).unwrap();
        let good = bohr_sommerfeld_levels(&v, &QuantizationSpec::caustic(1.0, 0..6)).unwrap();
        let bad = bohr_sommerfeld_levels(&v, &QuantizationSpec::integer(1.0, 0..6)).unwrap();
        for n in 0..6 {
            let exact = n as f64 + 0.5;
            assert!((good[n] - exact).abs() < 1e-10, "n={n}: {}", good[n]);
            assert!(((exact - bad[n]) - 0.5).abs() < 1e-10, "n={n}: {}", bad[n]);
        }
    }

    #[test]
    fn levels_scale_with_omega_and_hbar() {
        let v = PotentialModel::harmonic(2.0).unwrap();
        let levels = bohr_sommerfeld_levels(&v, &QuantizationSpec::caustic(0.5, 0..3)).unwrap();
        for (n, e) in levels.iter().enumerate() {
            assert!((e - 0.5 * 2.0 * (n as f64 + 0.5)).abs() < 1e-10);
        }
    }

    #[test]
    fn levels_beyond_capacity_are_rejected() {
        let v = PotentialModel::cubic(0.2).unwrap();
        // Barrier height 1/(54 g^2) ~ 0.46 holds no n = 1 level.
        assert!(matches!(
            bohr_sommerfeld_levels(&v, &QuantizationSpec::caustic(1.0, 0..3)),
            Err(WkbError::RootNotBracketed { n: 1, .. })
        ));
    }

    #[test]
    fn barrier_exponent_closed_form() {
        for g in [0.05, 0.1, 2.0 / 125f64.sqrt(), 0.2] {
            let b = barrier_exponent(g).unwrap();
            assert!((b * g * g - 2.0 / 15.0).abs() < 1e-10, "g={g}: {b}");
        }
        assert!((barrier_exponent(0.1).unwrap() - 40.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn grid_levels_reproduce_harmonic_spectrum() {
        let v = PotentialModel::harmonic(1.0).unwrap();
        let ev = grid_levels_extrapolated(&v, -10.0, 10.0, 1999, 3).unwrap();
        for (n, e) in ev.iter().enumerate() {
            assert!((e - (n as f64 + 0.5)).abs() < 1e-7, "{e}");
        }
    }
}
