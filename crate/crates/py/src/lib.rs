//! Python bindings for `qsl-core`.

use std::collections::HashMap;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qsl_core::bounds::{self as b, BoundFamily};
use qsl_core::channels::{self as ch, ChannelDescriptor};
use qsl_core::experiments::{self as ex, Experiment, ExperimentConfig};
use qsl_core::qfi::{sld_and_qfi, Trajectory};
use qsl_core::{states, ComplexMatrix, Error};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Density operator on a finite-dimensional Hilbert space.
#[pyclass(name = "DensityOperator", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDensity(qsl_core::DensityOperator);

#[pymethods]
impl PyDensity {
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let m = ComplexMatrix::from_rows(rows).map_err(err)?;
        Ok(Self(qsl_core::DensityOperator::new(m).map_err(err)?))
    }

    #[staticmethod]
    fn pure(psi: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self(qsl_core::DensityOperator::pure(&psi).map_err(err)?))
    }

    #[staticmethod]
    fn basis(dim: usize, k: usize) -> PyResult<Self> {
        Ok(Self(qsl_core::DensityOperator::basis(dim, k).map_err(err)?))
    }

    #[staticmethod]
    fn qubit_bloch(x: f64, y: f64, z: f64) -> PyResult<Self> {
        Ok(Self(qsl_core::DensityOperator::qubit_bloch(x, y, z).map_err(err)?))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        self.0.matrix().rows()
    }

    fn purity(&self) -> f64 {
        self.0.purity()
    }
}

/// Quantum channel descriptor.
#[pyclass(name = "Channel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyChannel(ChannelDescriptor);

#[pymethods]
impl PyChannel {
    #[staticmethod]
    fn amplitude_damping(gamma: f64) -> Self {
        Self(ChannelDescriptor::amplitude_damping(gamma))
    }

    #[staticmethod]
    fn dephasing(gamma: f64, omega0: f64) -> Self {
        Self(ChannelDescriptor::dephasing(gamma, omega0))
    }

    #[staticmethod]
    fn dephasing_n(gamma: f64, omega0: f64, n_qubits: usize) -> Self {
        Self(ChannelDescriptor::dephasing_n(gamma, omega0, n_qubits))
    }

    /// Closed evolution `exp(-i H t)`.
    #[staticmethod]
    fn hamiltonian(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let h = ComplexMatrix::from_rows(rows).map_err(err)?;
        Ok(Self(ChannelDescriptor::hamiltonian(&h).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyfunction]
fn bures_fidelity(a: &PyDensity, b: &PyDensity) -> PyResult<f64> {
    states::bures_fidelity(&a.0, &b.0).map_err(err)
}

#[pyfunction]
fn bures_angle(a: &PyDensity, b: &PyDensity) -> PyResult<f64> {
    states::bures_angle(&a.0, &b.0).map_err(err)
}

#[pyfunction]
fn evolve(channel: &PyChannel, rho0: &PyDensity, t: f64) -> PyResult<PyDensity> {
    Ok(PyDensity(ch::evolve(&channel.0, &rho0.0, t).map_err(err)?))
}

/// Quantum Fisher information at `t`, from the symmetric logarithmic derivative.
#[pyfunction]
#[pyo3(signature = (channel, rho0, t, t_max = None))]
fn qfi(channel: &PyChannel, rho0: &PyDensity, t: f64, t_max: Option<f64>) -> PyResult<f64> {
    let tr = Trajectory::new(channel.0.clone(), rho0.0.clone(), t_max.unwrap_or(2.0 * t + 1.0)).map_err(err)?;
    Ok(sld_and_qfi(&tr, t).map_err(err)?.qfi)
}

#[pyfunction]
#[pyo3(signature = (channel, rho0, tau, quad_tol = 1e-10))]
fn bures_length(channel: &PyChannel, rho0: &PyDensity, tau: f64, quad_tol: f64) -> PyResult<f64> {
    let tr = Trajectory::new(channel.0.clone(), rho0.0.clone(), tau).map_err(err)?;
    b::bures_length(&tr, tau, quad_tol).map_err(err)
}

#[pyfunction]
fn mandelstam_tamm_tau(var_h: f64, d: f64) -> PyResult<f64> {
    b::mandelstam_tamm_tau(var_h, d).map_err(err)
}

#[pyfunction]
fn amp_damp_tau_bound(d: f64, n_excited: f64) -> PyResult<f64> {
    b::amp_damp_tau_bound(d, n_excited).map_err(err)
}

#[pyfunction]
fn cq_opt_1q(t: f64, omega0: f64, gamma: f64, var_z: f64) -> PyResult<f64> {
    b::cq_opt_1q(t, omega0, gamma, var_z).map_err(err)
}

#[pyfunction]
fn cq_opt_nq(t: f64, omega0: f64, gamma: f64, n: usize, q: f64, var_z: f64) -> PyResult<f64> {
    b::cq_opt_nq(t, omega0, gamma, n, q, var_z).map_err(err)
}

/// `(alpha, beta, delta)` of the optimal environment generator.
#[pyfunction]
fn optimal_env_params(t: f64, omega0: f64, gamma: f64, n: usize, q: f64, mean_z: f64) -> PyResult<(f64, f64, f64)> {
    let p = b::optimal_env_params(t, omega0, gamma, n, q, mean_z).map_err(err)?;
    Ok((p.alpha, p.beta, p.delta))
}

#[pyfunction]
fn dephasing_distance_bound(gt: f64, r: f64, var_z: f64, n: usize, q: f64) -> PyResult<f64> {
    b::dephasing_distance_bound(gt, r, var_z, n, q).map_err(err)
}

#[pyfunction]
fn exclusion_limit(r: f64) -> PyResult<f64> {
    b::exclusion_limit(r).map_err(err)
}

#[pyfunction]
fn critical_ratio() -> f64 {
    b::critical_ratio()
}

/// Minimal `gamma tau` to reach `d` for symmetric separable states.
#[pyfunction]
fn invert_separable(r: f64, var_z: f64, n: usize, d: f64) -> PyResult<f64> {
    b::invert_bound(&BoundFamily::SeparableElliptic { r, var_z, n }, d).map_err(err)
}

/// Minimal `gamma tau` to reach `d` for any `N`-qubit state.
#[pyfunction]
fn invert_ghz(r: f64, n: usize, d: f64) -> PyResult<f64> {
    b::invert_bound(&BoundFamily::GhzGeneral { r, n }, d).map_err(err)
}

#[pyfunction]
fn ghz_tau_asymptote(n: usize, r: f64, d: f64) -> PyResult<f64> {
    b::ghz_tau_asymptote(n, r, d).map_err(err)
}

#[pyfunction]
fn exact_fidelity_ghz(n: usize, r: f64, gt: f64) -> f64 {
    ch::exact_fidelity_ghz(n, r, gt)
}

#[pyfunction]
fn exact_fidelity_separable(n: usize, r: f64, gt: f64) -> f64 {
    ch::exact_fidelity_separable(n, r, gt)
}

/// Runs an experiment and returns the CSV text.
#[pyfunction]
#[pyo3(signature = (name, overrides = None))]
fn run_experiment(name: &str, overrides: Option<HashMap<String, String>>) -> PyResult<String> {
    let exp: Experiment = name.parse().map_err(err)?;
    let mut cfg = ExperimentConfig::defaults(exp);
    let mut pairs: Vec<_> = overrides.unwrap_or_default().into_iter().collect();
    pairs.sort();
    for (k, v) in pairs {
        cfg.set(&k, &v).map_err(err)?;
    }
    Ok(ex::run(&cfg).map_err(err)?.to_csv_string())
}

#[pymodule]
fn qsl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensity>()?;
    m.add_class::<PyChannel>()?;
    m.add_function(wrap_pyfunction!(bures_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(bures_angle, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(qfi, m)?)?;
    m.add_function(wrap_pyfunction!(bures_length, m)?)?;
    m.add_function(wrap_pyfunction!(mandelstam_tamm_tau, m)?)?;
    m.add_function(wrap_pyfunction!(amp_damp_tau_bound, m)?)?;
    m.add_function(wrap_pyfunction!(cq_opt_1q, m)?)?;
    m.add_function(wrap_pyfunction!(cq_opt_nq, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_env_params, m)?)?;
    m.add_function(wrap_pyfunction!(dephasing_distance_bound, m)?)?;
    m.add_function(wrap_pyfunction!(exclusion_limit, m)?)?;
    m.add_function(wrap_pyfunction!(critical_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(invert_separable, m)?)?;
    m.add_function(wrap_pyfunction!(invert_ghz, m)?)?;
    m.add_function(wrap_pyfunction!(ghz_tau_asymptote, m)?)?;
    m.add_function(wrap_pyfunction!(exact_fidelity_ghz, m)?)?;
    m.add_function(wrap_pyfunction!(exact_fidelity_separable, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
