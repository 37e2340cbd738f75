//! Python bindings: configuration parsing, simulation, and the scalar diagnostics.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use logwave_core::analysis::{self, EnergyReport};
use logwave_core::{app, config, integrator, lognonlin, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config { .. } | Error::Argument(_) | Error::Domain(_) | Error::Precondition(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Simulation parameters; build one with `parse_config(text).sim`.
#[pyclass(name = "SimConfig", from_py_object)]
#[derive(Clone)]
struct PySimConfig {
    inner: integrator::SimConfig,
}

#[pymethods]
impl PySimConfig {
    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }
    #[setter]
    fn set_a(&mut self, v: f64) {
        self.inner.a = v;
    }
    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }
    #[setter]
    fn set_b(&mut self, v: f64) {
        self.inner.b = v;
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }
    #[setter]
    fn set_gamma(&mut self, v: f64) {
        self.inner.gamma = v;
    }
    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }
    #[setter]
    fn set_epsilon(&mut self, v: f64) {
        self.inner.epsilon = v;
    }
    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }
    #[setter]
    fn set_m(&mut self, v: usize) {
        self.inner.m = v;
    }
    #[getter(T)]
    fn horizon(&self) -> f64 {
        self.inner.horizon
    }
    #[setter(T)]
    fn set_horizon(&mut self, v: f64) {
        self.inner.horizon = v;
    }
    #[getter]
    fn dt(&self) -> Option<f64> {
        self.inner.dt
    }
    #[setter]
    fn set_dt(&mut self, v: Option<f64>) {
        self.inner.dt = v;
    }

    /// `(steps, dt)` of the time grid.
    fn time_grid(&self) -> (usize, f64) {
        self.inner.time_grid()
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "SimConfig(a={}, b={}, gamma={}, epsilon={}, m={}, T={})",
            c.a, c.b, c.gamma, c.epsilon, c.m, c.horizon
        )
    }
}

/// Parsed experiment configuration.
#[pyclass(name = "ExperimentConfig", from_py_object)]
#[derive(Clone)]
struct PyExperimentConfig {
    inner: config::ExperimentConfig,
}

#[pymethods]
impl PyExperimentConfig {
    #[getter]
    fn sim(&self) -> PySimConfig {
        PySimConfig {
            inner: self.inner.sim.clone(),
        }
    }

    #[getter]
    fn window_fraction(&self) -> f64 {
        self.inner.window_fraction
    }

    #[getter]
    fn fit_tol(&self) -> f64 {
        self.inner.fit_tol
    }

    /// `[(epsilon, m), ...]` cells of the sweep.
    fn sweep_plan(&self) -> Vec<(f64, usize)> {
        self.inner.sweep_plan()
    }
}

/// Recorded simulation with per-step energy diagnostics.
#[pyclass(name = "Trajectory")]
struct PyTrajectory {
    inner: integrator::Trajectory,
}

fn field(name: &str) -> PyResult<fn(&EnergyReport) -> f64> {
    Ok(match name {
        "t" => |r| r.t,
        "kinetic" => |r| r.kinetic,
        "dirichlet" => |r| r.dirichlet,
        "mass" => |r| r.mass,
        "log_term" => |r| r.log_term,
        "gamma_term" => |r| r.gamma_term,
        "penalty" => |r| r.penalty,
        "E" => |r| r.e,
        "E_pen" => |r| r.e_pen,
        "E_plus" => |r| r.e_plus,
        "I1" => |r| r.i1,
        "J1" => |r| r.j1,
        "in_well" => |r| f64::from(u8::from(r.in_well)),
        "l2sq" => |r| r.l2sq,
        "chi_l2sq" => |r| r.chi_l2sq,
        other => return Err(PyValueError::new_err(format!("unknown series `{other}`"))),
    })
}

#[pymethods]
impl PyTrajectory {
    fn __len__(&self) -> usize {
        self.inner.steps.len()
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt
    }

    fn times(&self) -> Vec<f64> {
        self.inner.times()
    }

    /// One column of the energy table, e.g. `"E_pen"` or `"I1"`.
    fn series(&self, name: &str) -> PyResult<Vec<f64>> {
        Ok(self.inner.series(field(name)?))
    }

    fn max_penalty_l2sq(&self) -> f64 {
        self.inner.max_penalty_l2sq()
    }

    #[pyo3(signature = (rel_tol = app::DISSIPATION_TOL))]
    fn dissipation_violations(&self, rel_tol: f64) -> Vec<usize> {
        self.inner.dissipation_violations(rel_tol)
    }

    /// Final displacement coefficients.
    fn final_coefficients(&self) -> Vec<f64> {
        self.inner.steps[self.inner.steps.len() - 1].state.g.clone()
    }

    /// `energy.csv` contents.
    fn energy_csv(&self) -> String {
        app::energy_csv(&self.inner)
    }
}

#[pyfunction]
fn parse_config(text: &str) -> PyResult<PyExperimentConfig> {
    config::parse_config(text)
        .map(|inner| PyExperimentConfig { inner })
        .map_err(to_py)
}

#[pyfunction]
fn simulate(py: Python<'_>, cfg: PySimConfig) -> PyResult<PyTrajectory> {
    py.detach(|| integrator::simulate(&cfg.inner))
        .map(|inner| PyTrajectory { inner })
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (traj, window_fraction = 0.5, fit_tol = 0.05))]
fn fit_decay<'py>(
    py: Python<'py>,
    traj: &PyTrajectory,
    window_fraction: f64,
    fit_tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let f = analysis::fit_decay(&traj.inner, window_fraction, fit_tol).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("t_start", f.t_start)?;
    d.set_item("t_end", f.t_end)?;
    d.set_item("beta_hat", f.beta_hat)?;
    d.set_item("r2", f.r2)?;
    d.set_item("beta_paper", f.beta_paper)?;
    d.set_item("delta_used", f.delta_used)?;
    d.set_item("envelope_ok", f.envelope_ok)?;
    Ok(d)
}

/// Potential-well status of the configuration's projected initial displacement.
#[pyfunction]
fn well_status<'py>(py: Python<'py>, cfg: &PySimConfig) -> PyResult<Bound<'py, PyDict>> {
    let w = app::well_of_initial_data(&cfg.inner).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("I1", w.i1)?;
    d.set_item("J1", w.j1)?;
    d.set_item("d_bound", w.d_bound)?;
    d.set_item("in_well", w.in_well)?;
    Ok(d)
}

/// Optimal δ of the Nakao constants.
#[pyfunction]
fn optimal_delta(gamma: f64) -> PyResult<f64> {
    analysis::optimal_delta(gamma)
        .map(|d| d.delta)
        .map_err(to_py)
}

/// `(d2, d3, beta)`.
#[pyfunction]
fn nakao_constants(delta: f64, gamma: f64) -> PyResult<(f64, f64, f64)> {
    analysis::nakao_constants(delta, gamma)
        .map(|c| (c.d2, c.d3, c.beta))
        .map_err(to_py)
}

#[pyfunction]
fn depth_lower_bound(gamma: f64) -> f64 {
    lognonlin::depth_lower_bound(gamma)
}

/// `u ln|u|^γ`, extended by 0 at `u = 0`.
#[pyfunction]
fn f_log(u: f64, gamma: f64) -> f64 {
    lognonlin::f_log(u, gamma)
}

#[pymodule]
fn logwave(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySimConfig>()?;
    m.add_class::<PyExperimentConfig>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(parse_config, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(fit_decay, m)?)?;
    m.add_function(wrap_pyfunction!(well_status, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_delta, m)?)?;
    m.add_function(wrap_pyfunction!(nakao_constants, m)?)?;
    m.add_function(wrap_pyfunction!(depth_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(f_log, m)?)?;
    Ok(())
}
