//! Python bindings: the geometry and signal types, shape factors, emission
//! curves, angular profiles and the validation suite.

use std::collections::HashMap;

use gwsr::emission::{delta_gamma_general, gamma_total, peak_delta_gamma, peak_scan, EmissionCurve};
use gwsr::kernels::{f_gw_exact, f_gw_series, f_mink, f_tilde};
use gwsr::oracle::{run_suite, Suite};
use gwsr::shape_factor::{eta_max as eta_max_rs, mu_mink as mu_mink_rs, superradiance_boundary, EtaMaxMethod};
use gwsr::{angular, GwKernel};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: gwsr::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "ArrayGeometry", frozen, module = "pygwsr")]
struct PyArrayGeometry {
    inner: gwsr::ArrayGeometry,
}

#[pymethods]
impl PyArrayGeometry {
    #[new]
    fn new(n_atoms: u64, beta: f64) -> PyResult<Self> {
        Ok(PyArrayGeometry { inner: gwsr::make_array(n_atoms, beta).map_err(err)? })
    }

    #[getter]
    fn n_atoms(&self) -> u64 {
        self.inner.n_atoms()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    /// `mu_M N`.
    fn mu_mink_n(&self) -> f64 {
        mu_mink_rs(&self.inner) * self.inner.n_atoms() as f64
    }

    fn __repr__(&self) -> String {
        format!("ArrayGeometry(n_atoms={}, beta={})", self.inner.n_atoms(), self.inner.beta())
    }
}

#[pyclass(name = "GwSignal", frozen, module = "pygwsr")]
struct PyGwSignal {
    inner: gwsr::GwSignal,
}

#[pymethods]
impl PyGwSignal {
    #[new]
    fn new(h_plus: f64, omega_bar: f64) -> PyResult<Self> {
        Ok(PyGwSignal { inner: gwsr::GwSignal::new(h_plus, omega_bar).map_err(err)? })
    }

    #[getter]
    fn h_plus(&self) -> f64 {
        self.inner.h_plus()
    }

    #[getter]
    fn omega_bar(&self) -> f64 {
        self.inner.omega_bar()
    }

    fn __repr__(&self) -> String {
        format!("GwSignal(h_plus={:e}, omega_bar={:e})", self.inner.h_plus(), self.inner.omega_bar())
    }
}

#[pyclass(name = "ShapeFactors", frozen, module = "pygwsr")]
struct PyShapeFactors {
    inner: gwsr::ShapeFactors,
}

#[pymethods]
impl PyShapeFactors {
    #[staticmethod]
    #[pyo3(signature = (geometry, signal, series_threshold = gwsr::kernels::DEFAULT_SERIES_THRESHOLD))]
    fn compute(
        py: Python<'_>,
        geometry: &PyArrayGeometry,
        signal: &PyGwSignal,
        series_threshold: f64,
    ) -> PyResult<Self> {
        let (g, s) = (geometry.inner, signal.inner);
        let inner = py.detach(|| gwsr::ShapeFactors::compute(&g, &s, series_threshold)).map_err(err)?;
        Ok(PyShapeFactors { inner })
    }

    #[getter]
    fn mu_mink(&self) -> f64 {
        self.inner.mu_mink
    }

    #[getter]
    fn mu_gw(&self) -> f64 {
        self.inner.mu_gw
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta
    }

    #[getter]
    fn mu_total(&self) -> f64 {
        self.inner.mu_total
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!("ShapeFactors(mu_mink={:e}, mu_gw={:e}, eta={:e})", s.mu_mink, s.mu_gw, s.eta)
    }
}

/// `(f_M, f~, g exact, g series)` at phase `x`.
#[pyfunction]
fn kernels(x: f64, omega_bar: f64) -> (f64, f64, f64, f64) {
    (f_mink(x), f_tilde(x), f_gw_exact(x, omega_bar).value, f_gw_series(x, omega_bar).value)
}

/// GW kernel with the crossover-aware method choice.
#[pyfunction]
#[pyo3(signature = (x, omega_bar, series_threshold = gwsr::kernels::DEFAULT_SERIES_THRESHOLD))]
fn gw_kernel(x: f64, omega_bar: f64, series_threshold: f64) -> PyResult<f64> {
    Ok(GwKernel::new(omega_bar, series_threshold).map_err(err)?.eval(x).value)
}

#[pyfunction]
#[pyo3(signature = (beta, omega_bar, method = "scan"))]
fn eta_max(py: Python<'_>, beta: f64, omega_bar: f64, method: &str) -> PyResult<u64> {
    let method: EtaMaxMethod = method.parse().map_err(err)?;
    py.detach(|| eta_max_rs(beta, omega_bar, method)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n_atoms, level = 1.0))]
fn boundary(n_atoms: u64, level: f64) -> PyResult<f64> {
    superradiance_boundary(n_atoms, level).map_err(err)
}

/// `Gamma / gamma0` at time `t` for total shape factor `mu`.
#[pyfunction]
fn gamma(t: f64, n_atoms: u64, mu: f64, theta0: f64) -> PyResult<f64> {
    gamma_total(t, n_atoms, mu, theta0).map_err(err)
}

#[pyfunction]
fn delta_gamma(t: f64, n_atoms: u64, shape: &PyShapeFactors, theta0: f64) -> PyResult<f64> {
    delta_gamma_general(t, n_atoms, shape.inner.mu_mink, shape.inner.mu_gw, theta0).map_err(err)
}

/// Emission curve as a dict of equal-length lists.
#[pyfunction]
#[pyo3(signature = (geometry, shape, theta0, t_max = 6.0, samples = 512))]
fn emission_curve(
    geometry: &PyArrayGeometry,
    shape: &PyShapeFactors,
    theta0: f64,
    t_max: f64,
    samples: usize,
) -> PyResult<HashMap<String, Vec<f64>>> {
    let c = EmissionCurve::from_shape(geometry.inner.n_atoms(), &shape.inner, theta0, t_max, samples).map_err(err)?;
    Ok(HashMap::from([
        ("t".into(), c.times),
        ("gamma".into(), c.gamma),
        ("gamma_inc".into(), c.gamma_inc),
        ("delta_gamma".into(), c.delta_gamma),
    ]))
}

/// `(t_peak, delta_gamma_peak)` in `gamma0` units.
#[pyfunction]
#[pyo3(signature = (geometry, shape, theta0, t_max = 6.0))]
fn peak(geometry: &PyArrayGeometry, shape: &PyShapeFactors, theta0: f64, t_max: f64) -> PyResult<(f64, f64)> {
    let p = peak_delta_gamma(geometry.inner.n_atoms(), &shape.inner, theta0, t_max).map_err(err)?;
    Ok((p.t, p.value))
}

/// Fitted log-log exponent of the peak imprint across `n_values`.
#[pyfunction]
#[pyo3(signature = (n_values, beta, signal, theta0, t_max = 6.0))]
fn scaling_exponent(
    py: Python<'_>,
    n_values: Vec<u64>,
    beta: f64,
    signal: &PyGwSignal,
    theta0: f64,
    t_max: f64,
) -> PyResult<Option<f64>> {
    let s = signal.inner;
    let report = py
        .detach(|| peak_scan(&n_values, beta, &s, theta0, t_max, gwsr::kernels::DEFAULT_SERIES_THRESHOLD))
        .map_err(err)?;
    Ok(report.fitted_exponent)
}

/// Angular densities `(phi, mu_M(phi), eta(phi), Gamma(phi))` as a dict.
#[pyfunction]
#[pyo3(signature = (geometry, signal, theta0, t = 0.5, phi_samples = 256, tol = 1e-8))]
fn angular_profile(
    py: Python<'_>,
    geometry: &PyArrayGeometry,
    signal: &PyGwSignal,
    theta0: f64,
    t: f64,
    phi_samples: usize,
    tol: f64,
) -> PyResult<HashMap<String, Vec<f64>>> {
    let (g, s) = (geometry.inner, signal.inner);
    let p = py
        .detach(|| {
            angular::angular_profile(&g, &s, theta0, t, phi_samples, tol, gwsr::kernels::DEFAULT_SERIES_THRESHOLD)
        })
        .map_err(err)?;
    Ok(HashMap::from([
        ("phi".into(), p.phis),
        ("mu_mink".into(), p.mu_m_phi),
        ("eta".into(), p.eta_phi),
        ("gamma".into(), p.gamma_phi),
    ]))
}

/// Runs a validation suite; returns `(identity, max_rel_err, samples, pass)` tuples.
#[pyfunction]
#[pyo3(signature = (suite = "all", tol = 1e-8))]
fn validate(py: Python<'_>, suite: &str, tol: f64) -> PyResult<Vec<(String, f64, usize, bool)>> {
    let suite: Suite = suite.parse().map_err(err)?;
    let reports = py.detach(|| run_suite(suite, tol)).map_err(err)?;
    Ok(reports.into_iter().map(|r| (r.identity, r.max_rel_err, r.samples, r.pass)).collect())
}

#[pymodule]
fn pygwsr(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyArrayGeometry>()?;
    m.add_class::<PyGwSignal>()?;
    m.add_class::<PyShapeFactors>()?;
    m.add_function(wrap_pyfunction!(kernels, m)?)?;
    m.add_function(wrap_pyfunction!(gw_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(eta_max, m)?)?;
    m.add_function(wrap_pyfunction!(boundary, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(delta_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(emission_curve, m)?)?;
    m.add_function(wrap_pyfunction!(peak, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(angular_profile, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
