//! Finite-difference checks of kinetic operators in spherical coordinates.
//!
//! Grids are offset (`r_i = (i + ½) h`, `θ_j = (j + ½) h_θ`) so neither the
//! origin nor the polar axis is ever sampled. Functions are assumed
//! independent of `φ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{symmetric_tridiagonal_lowest, FiniteDifference, NumericsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("grid has {available} points along an axis but the stencil needs {required}")]
    GridTooCoarse { required: usize, available: usize },

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("operator needs a {0} grid function")]
    WrongGrid(&'static str),

    #[error("|f| is below the mask threshold at every grid point")]
    DivisionNearZero,

    #[error("eigensolver failed: {0}")]
    ConvergenceFailure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl From<NumericsError> for OperatorError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::GridTooCoarse {
                required,
                available,
            } => Self::GridTooCoarse {
                required,
                available,
            },
            NumericsError::ConvergenceFailure(msg) => Self::ConvergenceFailure(msg),
            other => Self::InvalidParameter(other.to_string()),
        }
    }
}

pub type Result<T, E = OperatorError> = std::result::Result<T, E>;

/// Physical constants and stencil accuracy shared by every operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSettings {
    pub hbar: f64,
    pub mass: f64,
    /// Accuracy order of the finite-difference stencils (even, ≥ 2).
    pub stencil_order: usize,
}

impl Default for OperatorSettings {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            stencil_order: 4,
        }
    }
}

impl OperatorSettings {
    fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.mass > 0.0) {
            return Err(OperatorError::InvalidParameter("hbar > 0 and mass > 0 required".into()));
        }
        if self.stencil_order < 2 || self.stencil_order % 2 != 0 {
            return Err(OperatorError::InvalidParameter(format!(
                "stencil order must be even and >= 2, got {}",
                self.stencil_order
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub r: Vec<f64>,
    pub h: f64,
}

impl RadialGrid {
    pub fn offset(n: usize, r_max: f64) -> Result<Self> {
        if n < 2 || !(r_max > 0.0) {
            return Err(OperatorError::InvalidParameter("need n >= 2 and r_max > 0".into()));
        }
        let h = r_max / n as f64;
        Ok(Self {
            r: (0..n).map(|i| (i as f64 + 0.5) * h).collect(),
            h,
        })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalGrid {
    pub radial: RadialGrid,
    pub theta: Vec<f64>,
    pub h_theta: f64,
}

impl SphericalGrid {
    pub fn offset(n_r: usize, n_theta: usize, r_max: f64) -> Result<Self> {
        if n_theta < 2 {
            return Err(OperatorError::InvalidParameter("need n_theta >= 2".into()));
        }
        let h_theta = PI / n_theta as f64;
        Ok(Self {
            radial: RadialGrid::offset(n_r, r_max)?,
            theta: (0..n_theta).map(|j| (j as f64 + 0.5) * h_theta).collect(),
            h_theta,
        })
    }

    pub fn n_r(&self) -> usize {
        self.radial.len()
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    /// Jacobian `r² sin θ` times the cell area, row-major `(i_r, j_θ)`.
    pub fn weights(&self) -> Vec<f64> {
        let wr = corrected_midpoint_weights(self.n_r(), self.radial.h);
        let wt = corrected_midpoint_weights(self.n_theta(), self.h_theta);
        let mut out = Vec::with_capacity(self.n_r() * self.n_theta());
        for (i, r) in self.radial.r.iter().enumerate() {
            for (j, t) in self.theta.iter().enumerate() {
                out.push(wr[i] * wt[j] * r * r * t.sin());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Radial(RadialGrid),
    Spherical(SphericalGrid),
}

/// Complex samples on a grid; spherical samples are row-major in `(r, θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn radial<F: Fn(f64) -> Complex64>(grid: &RadialGrid, f: F) -> Self {
        Self {
            values: grid.r.iter().map(|&r| f(r)).collect(),
            grid: Grid::Radial(grid.clone()),
        }
    }

    pub fn spherical<F: Fn(f64, f64) -> Complex64>(grid: &SphericalGrid, f: F) -> Self {
        let mut values = Vec::with_capacity(grid.n_r() * grid.n_theta());
        for &r in &grid.radial.r {
            for &t in &grid.theta {
                values.push(f(r, t));
            }
        }
        Self {
            values,
            grid: Grid::Spherical(grid.clone()),
        }
    }

    fn with_values(&self, values: Vec<Complex64>) -> Self {
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Jacobian-weighted inner product `⟨self, other⟩`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(OperatorError::GridMismatch);
        }
        let w = jacobian_weights(&self.grid);
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(&w)
            .map(|((a, b), w)| a.conj() * b * *w)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).map(|z| z.re.max(0.0).sqrt()).unwrap_or(0.0)
    }
}

/// Midpoint weights with the `O(h²)` end corrections built from one-sided
/// derivative estimates, giving a fourth-order rule on offset grids.
pub fn corrected_midpoint_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n >= 6 {
        for (k, c) in [2.0, -3.0, 1.0].iter().enumerate() {
            w[k] += c * h / 24.0;
            w[n - 1 - k] += c * h / 24.0;
        }
    }
    w
}

fn jacobian_weights(grid: &Grid) -> Vec<f64> {
    match grid {
        Grid::Radial(g) => corrected_midpoint_weights(g.len(), g.h)
            .iter()
            .zip(&g.r)
            .map(|(w, r)| w * r * r)
            .collect(),
        Grid::Spherical(g) => g.weights(),
    }
}

/// Applies `d/dr` (or the given derivative order) along the radial axis.
fn along_r(f: &GridFunction, derivative: usize, order: usize) -> Result<Vec<Complex64>> {
    match &f.grid {
        Grid::Radial(g) => {
            let fd = FiniteDifference::uniform(g.len(), g.h, derivative, order)?;
            Ok(fd.apply(&f.values))
        }
        Grid::Spherical(g) => {
            let (nr, nt) = (g.n_r(), g.n_theta());
            let fd = FiniteDifference::uniform(nr, g.radial.h, derivative, order)?;
            let mut out = vec![Complex64::new(0.0, 0.0); nr * nt];
            for j in 0..nt {
                for i in 0..nr {
                    out[i * nt + j] = fd.apply_at(i, |k| f.values[k * nt + j]);
                }
            }
            Ok(out)
        }
    }
}

fn along_theta(f: &GridFunction, derivative: usize, order: usize) -> Result<Vec<Complex64>> {
    let Grid::Spherical(g) = &f.grid else {
        return Err(OperatorError::WrongGrid("spherical"));
    };
    let (nr, nt) = (g.n_r(), g.n_theta());
    let fd = FiniteDifference::uniform(nt, g.h_theta, derivative, order)?;
    let mut out = vec![Complex64::new(0.0, 0.0); nr * nt];
    for i in 0..nr {
        let row = &f.values[i * nt..(i + 1) * nt];
        for j in 0..nt {
            out[i * nt + j] = fd.apply_at(j, |k| row[k]);
        }
    }
    Ok(out)
}

fn radii(f: &GridFunction) -> Vec<f64> {
    match &f.grid {
        Grid::Radial(g) => g.r.clone(),
        Grid::Spherical(g) => g
            .radial
            .r
            .iter()
            .flat_map(|&r| std::iter::repeat(r).take(g.n_theta()))
            .collect(),
    }
}

fn thetas(g: &SphericalGrid) -> Vec<f64> {
    (0..g.n_r()).flat_map(|_| g.theta.iter().copied()).collect()
}

/// `p̂_r f = −iħ (1/r) d(r f)/dr`.
pub fn apply_radial_momentum(f: &GridFunction, settings: &OperatorSettings) -> Result<GridFunction> {
    settings.validate()?;
    let r = radii(f);
    let rf = f.with_values(f.values.iter().zip(&r).map(|(v, r)| v * r).collect());
    let d = along_r(&rf, 1, settings.stencil_order)?;
    let factor = Complex64::new(0.0, -settings.hbar);
    Ok(f.with_values(d.iter().zip(&r).map(|(d, r)| factor * d / r).collect()))
}

/// `p̂_θ f = −iħ (1/√sin θ) ∂_θ(√sin θ f)`.
pub fn apply_theta_momentum(f: &GridFunction, settings: &OperatorSettings) -> Result<GridFunction> {
    settings.validate()?;
    let Grid::Spherical(g) = &f.grid else {
        return Err(OperatorError::WrongGrid("spherical"));
    };
    let root_sin: Vec<f64> = thetas(g).iter().map(|t| t.sin().sqrt()).collect();
    let sf = f.with_values(f.values.iter().zip(&root_sin).map(|(v, s)| v * s).collect());
    let d = along_theta(&sf, 1, settings.stencil_order)?;
    let factor = Complex64::new(0.0, -settings.hbar);
    Ok(f.with_values(d.iter().zip(&root_sin).map(|(d, s)| factor * d / s).collect()))
}

/// `−iħ d f/dr` with no Jacobian dressing; not symmetric under `r² dr`.
pub fn apply_naive_radial_derivative(f: &GridFunction, settings: &OperatorSettings) -> Result<GridFunction> {
    settings.validate()?;
    let d = along_r(f, 1, settings.stencil_order)?;
    let factor = Complex64::new(0.0, -settings.hbar);
    Ok(f.with_values(d.iter().map(|d| factor * d).collect()))
}

/// `|⟨f, A g⟩ − ⟨A f, g⟩|` with the Jacobian-weighted inner product.
pub fn hermiticity_residual<A>(op: A, f: &GridFunction, g: &GridFunction) -> Result<f64>
where
    A: Fn(&GridFunction) -> Result<GridFunction>,
{
    let ag = op(g)?;
    let af = op(f)?;
    Ok((f.inner(&ag)? - af.inner(g)?).norm())
}

/// Kinetic energy assembled from the squared spherical momenta,
/// `(p̂_r² + p̂_θ²/r²) / 2m`.
pub fn kinetic_from_momenta(f: &GridFunction, settings: &OperatorSettings) -> Result<GridFunction> {
    let pr2 = apply_radial_momentum(&apply_radial_momentum(f, settings)?, settings)?;
    let pt2 = apply_theta_momentum(&apply_theta_momentum(f, settings)?, settings)?;
    let r = radii(f);
    let inv2m = 0.5 / settings.mass;
    Ok(f.with_values(
        pr2.values
            .iter()
            .zip(&pt2.values)
            .zip(&r)
            .map(|((a, b), r)| (a + b / (r * r)) * inv2m)
            .collect(),
    ))
}

/// Kinetic energy from the Cartesian Laplacian written in spherical
/// coordinates, `−(ħ²/2m)[(1/r) ∂²_r(r f) + (1/(r² sin θ)) ∂_θ(sin θ ∂_θ f)]`.
pub fn kinetic_laplacian(f: &GridFunction, settings: &OperatorSettings) -> Result<GridFunction> {
    settings.validate()?;
    let Grid::Spherical(g) = &f.grid else {
        return Err(OperatorError::WrongGrid("spherical"));
    };
    let order = settings.stencil_order;
    let r = radii(f);
    let th = thetas(g);
    let rf = f.with_values(f.values.iter().zip(&r).map(|(v, r)| v * r).collect());
    let d2r = along_r(&rf, 2, order)?;
    let d1t = along_theta(f, 1, order)?;
    let d2t = along_theta(f, 2, order)?;
    let scale = -settings.hbar * settings.hbar / (2.0 * settings.mass);
    Ok(f.with_values(
        (0..f.values.len())
            .map(|k| {
                let cot = th[k].cos() / th[k].sin();
                let radial = d2r[k] / r[k];
                let angular = (d2t[k] + d1t[k] * cot) / (r[k] * r[k]);
                (radial + angular) * scale
            })
            .collect(),
    ))
}

/// `−(ħ²/2m)(cos²θ − 2) / (4 r² sin²θ)`.
pub fn discrepancy_multiplier(r: f64, theta: f64, settings: &OperatorSettings) -> f64 {
    let (s, c) = theta.sin_cos();
    -settings.hbar * settings.hbar / (2.0 * settings.mass) * (c * c - 2.0) / (4.0 * r * r * s * s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KineticDiscrepancy {
    /// `[(T_momenta − T_laplacian) f] / f`, `None` where `|f|` is masked.
    pub ratio: Vec<Option<Complex64>>,
    pub multiplier: Vec<f64>,
    pub masked_points: usize,
    /// Largest `|ratio − multiplier| / |multiplier|` over unmasked points.
    pub max_relative_error: f64,
}

/// Pointwise ratio of the two kinetic operators' difference to `f`, compared
/// with the analytic multiplier. Points with `|f| ≤ mask · max|f|` are masked.
pub fn kinetic_discrepancy(f: &GridFunction, settings: &OperatorSettings, mask: f64) -> Result<KineticDiscrepancy> {
    let Grid::Spherical(g) = &f.grid else {
        return Err(OperatorError::WrongGrid("spherical"));
    };
    let wrong = kinetic_from_momenta(f, settings)?;
    let right = kinetic_laplacian(f, settings)?;
    let fmax = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let threshold = mask * fmax;
    let r = radii(f);
    let th = thetas(g);
    let mut ratio = Vec::with_capacity(f.values.len());
    let mut multiplier = Vec::with_capacity(f.values.len());
    let mut masked = 0;
    let mut worst: f64 = 0.0;
    for k in 0..f.values.len() {
        let m = discrepancy_multiplier(r[k], th[k], settings);
        multiplier.push(m);
        if f.values[k].norm() <= threshold || f.values[k].norm() == 0.0 {
            masked += 1;
            ratio.push(None);
            continue;
        }
        let q = (wrong.values[k] - right.values[k]) / f.values[k];
        worst = worst.max((q - m).norm() / m.abs());
        ratio.push(Some(q));
    }
    if masked == f.values.len() {
        return Err(OperatorError::DivisionNearZero);
    }
    Ok(KineticDiscrepancy {
        ratio,
        multiplier,
        masked_points: masked,
        max_relative_error: worst,
    })
}

/// Discretization of the s-wave radial problem `−½ u'' − u/r` on `u(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydrogenGrid {
    pub r_max: f64,
    /// Number of intervals; nodes `r_i = i·r_max/n`, `u(0) = u(r_max) = 0`.
    pub n: usize,
}

impl Default for HydrogenGrid {
    fn default() -> Self {
        Self {
            r_max: 60.0,
            n: 6000,
        }
    }
}

/// Lowest `n_levels` s-wave hydrogen energies (hartree).
pub fn hydrogen_radial_levels(n_levels: usize, grid: &HydrogenGrid) -> Result<Vec<f64>> {
    if grid.n < 3 || !(grid.r_max > 0.0) {
        return Err(OperatorError::InvalidParameter("need n >= 3 and r_max > 0".into()));
    }
    let h = grid.r_max / grid.n as f64;
    let kinetic = 0.5 / (h * h);
    let diag: Vec<f64> = (1..grid.n).map(|i| 2.0 * kinetic - 1.0 / (i as f64 * h)).collect();
    let off = vec![-kinetic; grid.n - 2];
    Ok(symmetric_tridiagonal_lowest(&diag, &off, n_levels)?)
}
