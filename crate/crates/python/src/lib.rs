//! Python bindings for `tdcss`.

use num_complex::Complex64 as C64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tdcss::config::RunConfig;
use tdcss::hamiltonian::{AlgebraicCoefficients, CoefficientSchedule, UnitContext};
use tdcss::mathieu::{self, DrivenOscillatorConfig};
use tdcss::motion::{self, InitialConditions, IntegratorSettings, MotionFrame};
use tdcss::{observables, states, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Numerical { .. } | Error::Convergence { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn units(hbar: f64, l: f64) -> PyResult<UnitContext> {
    UnitContext::new(hbar, l).map_err(py_err)
}

fn algebraic(alpha: C64, beta: f64, gamma: C64, delta: f64) -> AlgebraicCoefficients {
    AlgebraicCoefficients {
        alpha,
        beta,
        gamma,
        delta,
    }
}

/// State of the integral-of-motion construction at one time.
#[pyclass(name = "MotionFrame", module = "pytdcss", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFrame(MotionFrame);

#[pymethods]
impl PyFrame {
    #[new]
    #[pyo3(signature = (t, f, g, varphi, phase_phi = 0.0, phase_vartheta = 0.0))]
    fn new(t: f64, f: C64, g: C64, varphi: C64, phase_phi: f64, phase_vartheta: f64) -> Self {
        PyFrame(MotionFrame {
            phase_phi,
            phase_vartheta,
            ..MotionFrame::new(t, f, g, varphi)
        })
    }

    #[getter]
    fn t(&self) -> f64 {
        self.0.t
    }
    #[getter]
    fn f(&self) -> C64 {
        self.0.f
    }
    #[getter]
    fn g(&self) -> C64 {
        self.0.g
    }
    #[getter]
    fn varphi(&self) -> C64 {
        self.0.varphi
    }
    #[getter]
    fn phase_phi(&self) -> f64 {
        self.0.phase_phi
    }
    #[getter]
    fn phase_vartheta(&self) -> f64 {
        self.0.phase_vartheta
    }
    #[getter]
    fn arg_f(&self) -> f64 {
        self.0.arg_f
    }

    /// `|f|^2 - |g|^2`
    fn invariant(&self) -> f64 {
        self.0.invariant()
    }

    fn __repr__(&self) -> String {
        format!(
            "MotionFrame(t={}, f={}, g={}, varphi={})",
            self.0.t, self.0.f, self.0.g, self.0.varphi
        )
    }
}

fn wrap(frames: Vec<MotionFrame>) -> Vec<PyFrame> {
    frames.into_iter().map(PyFrame).collect()
}

fn settings(rtol: f64, atol: f64) -> IntegratorSettings {
    IntegratorSettings {
        rtol,
        atol,
        ..IntegratorSettings::default()
    }
}

/// Integrates a constant-coefficient Hamiltonian over `times` (starting at 0).
#[pyfunction]
#[pyo3(signature = (alpha, beta, gamma, delta, f0, g0, varphi0, times, hbar = 1.0, l = 1.0, rtol = 1e-10, atol = 1e-12))]
#[allow(clippy::too_many_arguments)]
fn evolve_constant(
    alpha: C64,
    beta: f64,
    gamma: C64,
    delta: f64,
    f0: C64,
    g0: C64,
    varphi0: C64,
    times: Vec<f64>,
    hbar: f64,
    l: f64,
    rtol: f64,
    atol: f64,
) -> PyResult<Vec<PyFrame>> {
    let init = InitialConditions::new(f0, g0, varphi0).map_err(py_err)?;
    let schedule = CoefficientSchedule::constant(algebraic(alpha, beta, gamma, delta), units(hbar, l)?);
    motion::evolve(&schedule, &init, &times, &settings(rtol, atol))
        .map(wrap)
        .map_err(py_err)
}

/// Closed-form frame at `t` for constant coefficients.
#[pyfunction]
#[pyo3(signature = (alpha, beta, gamma, delta, f0, g0, varphi0, t, hbar = 1.0, l = 1.0))]
#[allow(clippy::too_many_arguments)]
fn closed_form(
    alpha: C64,
    beta: f64,
    gamma: C64,
    delta: f64,
    f0: C64,
    g0: C64,
    varphi0: C64,
    t: f64,
    hbar: f64,
    l: f64,
) -> PyResult<PyFrame> {
    let init = InitialConditions::new(f0, g0, varphi0).map_err(py_err)?;
    motion::closed_form(&algebraic(alpha, beta, gamma, delta), &init, t, &units(hbar, l)?)
        .map(PyFrame)
        .map_err(py_err)
}

/// Runs a TOML configuration on its own time grid.
#[pyfunction]
fn evolve_config(path: std::path::PathBuf) -> PyResult<Vec<PyFrame>> {
    let cfg = RunConfig::load(&path).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let grid = cfg
        .grid
        .clone()
        .ok_or_else(|| PyValueError::new_err("configuration has no integration grid"))?;
    cfg.frames_at(&grid, &cfg.settings).map(wrap).map_err(py_err)
}

/// `(f0, g0)` of the minimum-uncertainty state with position spread `sigma_x0`.
#[pyfunction]
#[pyo3(signature = (sigma_x0, theta = 0.0, hbar = 1.0, l = 1.0))]
fn from_initial_width(sigma_x0: f64, theta: f64, hbar: f64, l: f64) -> PyResult<(C64, C64)> {
    let init = motion::from_initial_width(sigma_x0, theta, &units(hbar, l)?).map_err(py_err)?;
    Ok((init.f0(), init.g0()))
}

/// `(xi, zeta)`
#[pyfunction]
fn parameters(frame: &PyFrame) -> (C64, C64) {
    let p = states::parameters(&frame.0);
    (p.xi, p.zeta)
}

#[pyfunction]
fn normalization(frame: &PyFrame) -> C64 {
    states::normalization(&frame.0)
}

#[pyfunction]
#[pyo3(signature = (frame, tail_tolerance = states::DEFAULT_TAIL_TOLERANCE, n_max = states::DEFAULT_N_MAX))]
fn fock_coefficients(frame: &PyFrame, tail_tolerance: f64, n_max: usize) -> PyResult<Vec<C64>> {
    states::fock_coefficients(&frame.0, tail_tolerance, n_max)
        .map(|d| d.coefficients)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (frame, tail_tolerance = states::DEFAULT_TAIL_TOLERANCE, n_max = states::DEFAULT_N_MAX))]
fn transition_probabilities(frame: &PyFrame, tail_tolerance: f64, n_max: usize) -> PyResult<Vec<f64>> {
    states::transition_probabilities(&frame.0, tail_tolerance, n_max).map_err(py_err)
}

/// Streamed sum, peak and mean of the photon-number distribution.
#[pyfunction]
#[pyo3(signature = (frame, tail_tolerance = states::DEFAULT_TAIL_TOLERANCE, n_max = states::DEFAULT_N_MAX, keep = 16))]
fn photon_statistics<'py>(
    py: Python<'py>,
    frame: &PyFrame,
    tail_tolerance: f64,
    n_max: usize,
    keep: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let s = states::photon_statistics(&frame.0, tail_tolerance, n_max, keep).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("total", s.total)?;
    d.set_item("tail_bound", s.tail_bound)?;
    d.set_item("truncation", s.truncation)?;
    d.set_item("argmax", s.argmax)?;
    d.set_item("max_probability", s.max_probability)?;
    d.set_item("mean_number", s.mean_number)?;
    d.set_item("head", s.head)?;
    Ok(d)
}

#[pyfunction]
fn overlap(a: &PyFrame, b: &PyFrame) -> C64 {
    states::overlap(&a.0, &b.0)
}

/// `(xbar, pbar)`
#[pyfunction]
#[pyo3(signature = (frame, hbar = 1.0, l = 1.0))]
fn means(frame: &PyFrame, hbar: f64, l: f64) -> PyResult<(f64, f64)> {
    Ok(observables::means(&frame.0, &units(hbar, l)?))
}

/// `(sigma_x, sigma_p, sigma_xp)`
#[pyfunction]
#[pyo3(signature = (frame, hbar = 1.0, l = 1.0))]
fn deviations(frame: &PyFrame, hbar: f64, l: f64) -> PyResult<(f64, f64, f64)> {
    Ok(observables::deviations(&frame.0, &units(hbar, l)?))
}

/// `(heisenberg, sr_invariant)`
#[pyfunction]
#[pyo3(signature = (frame, hbar = 1.0, l = 1.0))]
fn uncertainty(frame: &PyFrame, hbar: f64, l: f64) -> PyResult<(f64, f64)> {
    Ok(observables::uncertainty(&frame.0, &units(hbar, l)?))
}

#[pyfunction]
#[pyo3(signature = (frame, alpha, beta, gamma, delta, hbar = 1.0, l = 1.0))]
fn mean_energy(frame: &PyFrame, alpha: C64, beta: f64, gamma: C64, delta: f64, hbar: f64, l: f64) -> PyResult<f64> {
    Ok(observables::mean_energy(
        &frame.0,
        &algebraic(alpha, beta, gamma, delta),
        &units(hbar, l)?,
    ))
}

/// `psi(x)` at each position.
#[pyfunction]
#[pyo3(signature = (frame, xs, hbar = 1.0, l = 1.0))]
fn wavefunction(frame: &PyFrame, xs: Vec<f64>, hbar: f64, l: f64) -> PyResult<Vec<C64>> {
    observables::wavefunction(&frame.0, &xs, &units(hbar, l)?)
        .map(|w| w.psi)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (n, x, hbar = 1.0, l = 1.0))]
fn fock_wavefunction(n: usize, x: f64, hbar: f64, l: f64) -> PyResult<f64> {
    Ok(observables::fock_wavefunction(n, x, &units(hbar, l)?))
}

fn driven(m0: f64, epsilon0: f64, eta0: f64, omega0: f64, hbar: f64, varphi0: C64) -> PyResult<DrivenOscillatorConfig> {
    DrivenOscillatorConfig::new(m0, epsilon0, eta0, omega0, hbar, InitialConditions::VACUUM.with_varphi(varphi0))
        .map_err(py_err)
}

/// `(a, q)` of the driven oscillator.
#[pyfunction]
#[pyo3(signature = (m0 = 1.0, epsilon0 = 1.0, eta0 = 50.0, omega0 = 10.0))]
fn mathieu_parameters(m0: f64, epsilon0: f64, eta0: f64, omega0: f64) -> PyResult<(f64, f64)> {
    let p = mathieu::mathieu_parameters(&driven(m0, epsilon0, eta0, omega0, 1.0, C64::new(0.0, 0.0))?);
    Ok((p.a, p.q))
}

/// Frames of the driven oscillator at Mathieu times `taus`, started from
/// `f0 = 1`, `g0 = 0`.
#[pyfunction]
#[pyo3(signature = (taus, m0 = 1.0, epsilon0 = 1.0, eta0 = 50.0, omega0 = 10.0, hbar = 1.0, varphi0 = C64::new(0.0, -1.0), rtol = 1e-12, atol = 1e-14))]
#[allow(clippy::too_many_arguments)]
fn mathieu_frames(
    taus: Vec<f64>,
    m0: f64,
    epsilon0: f64,
    eta0: f64,
    omega0: f64,
    hbar: f64,
    varphi0: C64,
    rtol: f64,
    atol: f64,
) -> PyResult<Vec<PyFrame>> {
    let cfg = driven(m0, epsilon0, eta0, omega0, hbar, varphi0)?;
    mathieu::frames(&cfg, &taus, &settings(rtol, atol))
        .map(wrap)
        .map_err(py_err)
}

#[pymodule]
fn pytdcss(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFrame>()?;
    m.add_function(wrap_pyfunction!(evolve_constant, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_config, m)?)?;
    m.add_function(wrap_pyfunction!(from_initial_width, m)?)?;
    m.add_function(wrap_pyfunction!(parameters, m)?)?;
    m.add_function(wrap_pyfunction!(normalization, m)?)?;
    m.add_function(wrap_pyfunction!(fock_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(transition_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(photon_statistics, m)?)?;
    m.add_function(wrap_pyfunction!(overlap, m)?)?;
    m.add_function(wrap_pyfunction!(means, m)?)?;
    m.add_function(wrap_pyfunction!(deviations, m)?)?;
    m.add_function(wrap_pyfunction!(uncertainty, m)?)?;
    m.add_function(wrap_pyfunction!(mean_energy, m)?)?;
    m.add_function(wrap_pyfunction!(wavefunction, m)?)?;
    m.add_function(wrap_pyfunction!(fock_wavefunction, m)?)?;
    m.add_function(wrap_pyfunction!(mathieu_parameters, m)?)?;
    m.add_function(wrap_pyfunction!(mathieu_frames, m)?)?;
    Ok(())
}
