//! Python bindings. Physics types are wrapped as opaque classes; results come
//! back as floats, complex numbers, lists and dicts.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use semiclassical::acceptance::{full_report, Tolerances};
use semiclassical::channels::{
    emergence_of_time_sweep, solve_stationary_semiclassical, solve_time_dependent, ChannelError,
    ChannelSolverConfig, ChannelSystem, TransitionResult,
};
use semiclassical::config::{load_model, parse_model, serialize_model, ConfigError, LoadedModel};
use semiclassical::gutzwiller::{
    find_pole, response_function, GutzwillerError, GutzwillerOrbit, PoleIndex,
};
use semiclassical::operators::{hydrogen_radial_levels, HydrogenGrid};
use semiclassical::trajectory::{
    escape_report, lifetime_tau, run_trajectory, CubicSystem, EnergyOrder, SweepConfig, TrajectoryConfig,
    TrajectoryError,
};
use semiclassical::wkb::{barrier_exponent, bohr_sommerfeld_levels, PotentialModel, QuantizationSpec, WkbError};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn trajectory_err(e: TrajectoryError) -> PyErr {
    match e {
        TrajectoryError::InvalidCoupling(_) | TrajectoryError::InvalidParameter(_) => value_err(e),
        _ => runtime_err(e),
    }
}

fn wkb_err(e: WkbError) -> PyErr {
    match e {
        WkbError::InvalidParameter(_) => value_err(e),
        _ => runtime_err(e),
    }
}

fn channel_err(e: ChannelError) -> PyErr {
    match e {
        ChannelError::InvalidParameter(_) => value_err(e),
        _ => runtime_err(e),
    }
}

fn gutzwiller_err(e: GutzwillerError) -> PyErr {
    match e {
        GutzwillerError::InvalidParameter(_) => value_err(e),
        _ => runtime_err(e),
    }
}

fn config_err(e: ConfigError) -> PyErr {
    match e {
        ConfigError::Io { .. } => runtime_err(e),
        _ => value_err(e),
    }
}

fn energy_order(order: u32) -> PyResult<EnergyOrder> {
    EnergyOrder::from_order(order).map_err(trajectory_err)
}

/// Decay lifetime of the cubic-well resonance at coupling `g`.
#[pyfunction]
fn lifetime(g: f64) -> PyResult<f64> {
    lifetime_tau(g).map_err(trajectory_err)
}

/// Escape time of the complex trajectory; returns `(tau, t_c, ratio)`.
#[pyfunction]
#[pyo3(signature = (g, order = 2))]
fn escape_time(g: f64, order: u32) -> PyResult<(f64, f64, f64)> {
    let config = SweepConfig {
        energy_order: energy_order(order)?,
        ..SweepConfig::default()
    };
    let r = escape_report(g, &config).map_err(trajectory_err)?;
    Ok((r.tau, r.t_c, r.ratio))
}

/// Sampled complex trajectory as a list of `(t, x, p)`.
#[pyfunction]
#[pyo3(signature = (g, t_max, dt = 0.05, order = 2))]
fn trajectory(g: f64, t_max: f64, dt: f64, order: u32) -> PyResult<Vec<(f64, Complex64, Complex64)>> {
    let sys = CubicSystem::resonance(g, energy_order(order)?).map_err(trajectory_err)?;
    let path = run_trajectory(&sys, t_max, dt, &TrajectoryConfig::default()).map_err(trajectory_err)?;
    Ok(path.into_iter().map(|r| (r.t, r.x, r.p)).collect())
}

/// Tunnelling exponent through the cubic barrier.
#[pyfunction]
fn barrier(g: f64) -> PyResult<f64> {
    barrier_exponent(g).map_err(wkb_err)
}

/// Lowest s-wave hydrogen levels from the radial finite-difference problem.
#[pyfunction]
#[pyo3(signature = (count = 3, r_max = 60.0, n = 6000))]
fn hydrogen_levels(count: usize, r_max: f64, n: usize) -> PyResult<Vec<f64>> {
    hydrogen_radial_levels(count, &HydrogenGrid { r_max, n }).map_err(value_err)
}

/// One-dimensional potential well.
#[pyclass(name = "Potential", frozen)]
struct PyPotential(PotentialModel);

#[pymethods]
impl PyPotential {
    #[staticmethod]
    fn harmonic(omega: f64) -> PyResult<Self> {
        PotentialModel::harmonic(omega).map(Self).map_err(wkb_err)
    }

    #[staticmethod]
    fn cubic(g: f64) -> PyResult<Self> {
        PotentialModel::cubic(g).map(Self).map_err(wkb_err)
    }

    #[staticmethod]
    fn power_wall(half_width: f64, depth: f64, exponent: u32) -> PyResult<Self> {
        PotentialModel::power_wall(half_width, depth, exponent).map(Self).map_err(wkb_err)
    }

    fn __call__(&self, x: f64) -> f64 {
        self.0.eval(x)
    }

    /// Bohr-Sommerfeld levels `n = 0..count`; `alpha` is the phase loss at
    /// each turning point.
    #[pyo3(signature = (count, hbar = 1.0, alpha = 0.25))]
    fn levels(&self, count: u32, hbar: f64, alpha: f64) -> PyResult<Vec<f64>> {
        let spec = QuantizationSpec {
            alpha1: alpha,
            alpha2: alpha,
            hbar,
            n_range: 0..count,
        };
        bohr_sommerfeld_levels(&self.0, &spec).map_err(wkb_err)
    }
}

fn result_dict<'py>(py: Python<'py>, r: &TransitionResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("probabilities", r.probabilities.clone())?;
    d.set_item("method", r.method.as_str())?;
    d.set_item("energy", r.energy)?;
    d.set_item("norm", r.norm)?;
    Ok(d)
}

/// Coupled-channel collision system.
#[pyclass(name = "ChannelSystem", frozen)]
struct PyChannelSystem(ChannelSystem);

#[pymethods]
impl PyChannelSystem {
    #[staticmethod]
    fn landau_zener(energy: f64) -> PyResult<Self> {
        ChannelSystem::landau_zener(energy).map(Self).map_err(channel_err)
    }

    #[staticmethod]
    fn rabi(energy: f64) -> PyResult<Self> {
        ChannelSystem::rabi(energy).map(Self).map_err(channel_err)
    }

    /// Loads a `[channels]` model file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        match load_model(path).map_err(config_err)? {
            LoadedModel::Channels(s) => Ok(Self(s)),
            LoadedModel::Potential(_) => Err(PyValueError::new_err("file holds a [potential] model")),
        }
    }

    fn to_config(&self) -> PyResult<String> {
        serialize_model(&LoadedModel::Channels(self.0.clone())).map_err(config_err)
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.0.energy
    }

    #[getter]
    fn channels(&self) -> usize {
        self.0.channels()
    }

    fn with_energy(&self, energy: f64) -> PyResult<Self> {
        self.0.with_energy(energy).map(Self).map_err(channel_err)
    }

    #[pyo3(signature = (initial_channel = 0))]
    fn solve_stationary<'py>(&self, py: Python<'py>, initial_channel: usize) -> PyResult<Bound<'py, PyDict>> {
        let r = solve_stationary_semiclassical(&self.0, initial_channel, &ChannelSolverConfig::default())
            .map_err(channel_err)?;
        result_dict(py, &r)
    }

    #[pyo3(signature = (initial_channel = 0))]
    fn solve_time_dependent<'py>(&self, py: Python<'py>, initial_channel: usize) -> PyResult<Bound<'py, PyDict>> {
        let r = solve_time_dependent(&self.0, initial_channel, &ChannelSolverConfig::default())
            .map_err(channel_err)?;
        result_dict(py, &r)
    }

    /// Stationary versus time-dependent probabilities over `energies`; one
    /// dict per energy.
    #[pyo3(signature = (energies, initial_channel = 0))]
    fn emergence_sweep<'py>(
        &self,
        py: Python<'py>,
        energies: Vec<f64>,
        initial_channel: usize,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let rows = py.detach(|| {
            emergence_of_time_sweep(&self.0, &energies, initial_channel, &ChannelSolverConfig::default())
        });
        rows.into_iter()
            .map(|row| {
                let r = row.map_err(channel_err)?;
                let d = PyDict::new(py);
                d.set_item("energy", r.energy)?;
                d.set_item("stationary", r.stationary)?;
                d.set_item("time_dependent", r.time_dependent)?;
                d.set_item("discrepancy", r.discrepancy)?;
                d.set_item("control_discrepancy", r.control_discrepancy)?;
                d.set_item("max_norm_deviation", r.max_norm_deviation)?;
                Ok(d)
            })
            .collect()
    }
}

/// Parses model text; returns a `ChannelSystem` or a `Potential`.
#[pyfunction]
fn parse_model_text(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(match parse_model(text).map_err(config_err)? {
        LoadedModel::Channels(s) => Py::new(py, PyChannelSystem(s))?.into_any(),
        LoadedModel::Potential(v) => Py::new(py, PyPotential(v))?.into_any(),
    })
}

/// Periodic-orbit family entering the trace formula.
#[pyclass(name = "Orbit", frozen)]
struct PyOrbit(GutzwillerOrbit);

#[pymethods]
impl PyOrbit {
    #[staticmethod]
    fn linear_model() -> Self {
        Self(GutzwillerOrbit::linear_model())
    }

    #[staticmethod]
    #[pyo3(signature = (action0, period, instability, instability_slope = 0.0, focal_count = 0, hbar = 1.0))]
    fn affine(
        action0: f64,
        period: f64,
        instability: f64,
        instability_slope: f64,
        focal_count: i32,
        hbar: f64,
    ) -> PyResult<Self> {
        GutzwillerOrbit::affine(action0, period, instability, instability_slope, focal_count, hbar)
            .map(Self)
            .map_err(gutzwiller_err)
    }

    /// Closed-form pole for affine families, `None` otherwise.
    fn exact_pole(&self, k: u32, s: u32) -> Option<Complex64> {
        self.0.exact_pole(PoleIndex::new(k, s))
    }

    /// Newton refinement of pole `(k, s)` from `guess`.
    fn find_pole(&self, k: u32, s: u32, guess: Complex64) -> PyResult<Complex64> {
        find_pole(&self.0, PoleIndex::new(k, s), guess)
            .map(|p| p.energy)
            .map_err(gutzwiller_err)
    }

    /// Summed repetition series at complex energy `e`.
    #[pyo3(signature = (e, n_max = 10_000))]
    fn response(&self, e: Complex64, n_max: usize) -> PyResult<Complex64> {
        response_function(&self.0, e, n_max)
            .map(|r| r.value)
            .map_err(gutzwiller_err)
    }
}

/// Runs the acceptance checks; returns `(all_passed, csv_document)`.
#[pyfunction]
#[pyo3(signature = (overrides = None))]
fn report(py: Python<'_>, overrides: Option<Vec<(String, f64)>>) -> PyResult<(bool, String)> {
    let mut tol = Tolerances::default();
    for (k, v) in overrides.unwrap_or_default() {
        tol.set(&k, v).map_err(PyValueError::new_err)?;
    }
    let (outcomes, doc) = py.detach(|| full_report(&tol));
    Ok((outcomes.iter().all(|o| o.passed), doc))
}

#[pymodule]
fn semiclassical_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(lifetime, m)?)?;
    m.add_function(wrap_pyfunction!(escape_time, m)?)?;
    m.add_function(wrap_pyfunction!(trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(barrier, m)?)?;
    m.add_function(wrap_pyfunction!(hydrogen_levels, m)?)?;
    m.add_function(wrap_pyfunction!(parse_model_text, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add_class::<PyPotential>()?;
    m.add_class::<PyChannelSystem>()?;
    m.add_class::<PyOrbit>()?;
    Ok(())
}
