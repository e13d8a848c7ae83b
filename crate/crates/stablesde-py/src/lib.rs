//! Python bindings: stable parameters, coefficient functions, paths and their transforms,
//! boundary classification, closed-form oracles and the validation suites.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use stablesde::boundary_classifier;
use stablesde::cli::{self, RunConfig, EXIT_USAGE};
use stablesde::fluctuation_oracles;
use stablesde::montecarlo_harness;
use stablesde::sde_timechange;
use stablesde::stable_core::{self, Sidedness};
use stablesde::transforms::{self, ExponentKind, LevyExponent};
use stablesde::{Error, RandomState};

fn to_py(e: Error) -> PyErr {
    if cli::exit_code_for(&e) == EXIT_USAGE {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Stability index α ∈ (0,2) and positivity parameter ρ = P(X₁ > 0).
#[pyclass(
    name = "StableParams",
    module = "stablesde_py",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyStableParams {
    inner: stable_core::StableParams,
}

#[pymethods]
impl PyStableParams {
    #[new]
    fn new(alpha: f64, rho: f64) -> PyResult<Self> {
        Ok(Self {
            inner: stable_core::StableParams::new(alpha, rho).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn symmetric(alpha: f64) -> PyResult<Self> {
        Ok(Self {
            inner: stable_core::StableParams::symmetric(alpha).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn spectrally_positive(alpha: f64) -> PyResult<Self> {
        Ok(Self {
            inner: stable_core::StableParams::spectrally_positive(alpha).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn spectrally_negative(alpha: f64) -> PyResult<Self> {
        Ok(Self {
            inner: stable_core::StableParams::spectrally_negative(alpha).map_err(to_py)?,
        })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho()
    }

    #[getter]
    fn rho_hat(&self) -> f64 {
        self.inner.rho_hat()
    }

    /// "two-sided", "spectrally-positive" or "spectrally-negative".
    #[getter]
    fn sidedness(&self) -> &'static str {
        match self.inner.sidedness() {
            Sidedness::TwoSided => "two-sided",
            Sidedness::SpectrallyPositive => "spectrally-positive",
            Sidedness::SpectrallyNegative => "spectrally-negative",
        }
    }

    /// Parameters of the dual process -X.
    fn dual(&self) -> Self {
        Self {
            inner: self.inner.dual(),
        }
    }

    /// Characteristic exponent Ψ(z) with E e^{izX₁} = e^{-Ψ(z)}.
    fn char_exponent(&self, z: f64) -> Complex64 {
        stable_core::char_exponent(&self.inner, z)
    }

    fn __repr__(&self) -> String {
        format!(
            "StableParams(alpha={}, rho={})",
            self.inner.alpha(),
            self.inner.rho()
        )
    }
}

/// Coefficient function σ > 0 built from a spec such as "power:c=1,theta=2".
#[pyclass(
    name = "SigmaFunction",
    module = "stablesde_py",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PySigma {
    inner: stablesde::SigmaFunction,
}

#[pymethods]
impl PySigma {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self {
            inner: stablesde::SigmaFunction::parse(spec).map_err(to_py)?,
        })
    }

    #[getter]
    fn spec(&self) -> String {
        self.inner.spec().to_string()
    }

    fn __call__(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }

    fn eval(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }

    /// σ(-x), as a new coefficient function.
    fn reflected(&self) -> Self {
        Self {
            inner: self.inner.reflected(),
        }
    }

    fn __repr__(&self) -> String {
        format!("SigmaFunction('{}')", self.inner.spec())
    }
}

/// Skeleton of a càdlàg path: sample times, values, optional killing time and horizon.
#[pyclass(name = "Path", module = "stablesde_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPath {
    inner: stable_core::Path,
}

#[pymethods]
impl PyPath {
    #[new]
    #[pyo3(signature = (times, values, horizon, killed_at=None, step=0.0, seed=0))]
    fn new(
        times: Vec<f64>,
        values: Vec<f64>,
        horizon: f64,
        killed_at: Option<f64>,
        step: f64,
        seed: u64,
    ) -> PyResult<Self> {
        Ok(Self {
            inner: stable_core::Path::new(times, values, killed_at, horizon, step, seed)
                .map_err(to_py)?,
        })
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.times.clone()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values.clone()
    }

    #[getter]
    fn killed_at(&self) -> Option<f64> {
        self.inner.killed_at
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.inner.horizon
    }

    /// Value held at time `t`, or None after the killing time or beyond the horizon.
    fn value_at(&self, t: f64) -> Option<f64> {
        self.inner.value_at(t)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Path(len={}, horizon={}, killed_at={:?})",
            self.inner.len(),
            self.inner.horizon,
            self.inner.killed_at
        )
    }
}

fn wrap(p: stablesde::Result<stable_core::Path>) -> PyResult<PyPath> {
    Ok(PyPath {
        inner: p.map_err(to_py)?,
    })
}

/// Euler skeleton of the stable process from `x0` on `[0, horizon]`, reproducible from `(seed, stream)`.
#[pyfunction]
#[pyo3(signature = (params, x0, horizon, step, seed=0, stream=0))]
fn sample_path(
    params: &PyStableParams,
    x0: f64,
    horizon: f64,
    step: f64,
    seed: u64,
    stream: u64,
) -> PyResult<PyPath> {
    wrap(stable_core::sample_path(
        &params.inner,
        x0,
        horizon,
        step,
        &mut RandomState::new(seed, stream),
    ))
}

/// Solution paths of dZ = σ(Z-) dX on `[0, horizon]`, as the `simulate` subcommand produces them.
#[pyfunction]
#[pyo3(signature = (params, sigma, x0, horizon, n_paths, step=None, seed=0))]
fn simulate(
    params: &PyStableParams,
    sigma: &PySigma,
    x0: f64,
    horizon: f64,
    n_paths: usize,
    step: Option<f64>,
    seed: u64,
) -> PyResult<Vec<PyPath>> {
    let cfg = RunConfig {
        alpha: params.inner.alpha(),
        rho: params.inner.rho(),
        sigma: sigma.inner.spec().to_string(),
        seed,
        n_paths,
        horizon,
        step,
        x0,
        ..RunConfig::default()
    };
    (0..n_paths)
        .map(|i| wrap(cli::simulate_path(&params.inner, &sigma.inner, &cfg, i)))
        .collect()
}

/// Cumulative clock A_s = ∫₀^s σ(X_u)^{-α} du at the sample times.
#[pyfunction]
fn additive_functional(path: &PyPath, sigma: &PySigma, alpha: f64) -> Vec<f64> {
    sde_timechange::additive_functional(&path.inner, &sigma.inner, alpha).cumvals
}

/// Z_t = X_{τ_t} on `[0, t_max]`, with τ the inverse of the clock A.
#[pyfunction]
fn time_change(path: &PyPath, sigma: &PySigma, alpha: f64, t_max: f64) -> PyResult<PyPath> {
    wrap(sde_timechange::time_change_solve(
        &path.inner,
        &sigma.inner,
        alpha,
        t_max,
    ))
}

#[pyfunction]
fn spatial_inversion(path: &PyPath, sigma: &PySigma, alpha: f64) -> PyResult<PyPath> {
    wrap(sde_timechange::spatial_inversion(
        &path.inner,
        &sigma.inner,
        alpha,
    ))
}

#[pyfunction]
fn co_inversion(path: &PyPath, sigma: &PySigma, alpha: f64) -> PyResult<PyPath> {
    wrap(sde_timechange::co_inversion(
        &path.inner,
        &sigma.inner,
        alpha,
    ))
}

#[pyfunction]
fn lamperti_forward(path: &PyPath, alpha: f64) -> PyResult<PyPath> {
    wrap(transforms::lamperti_forward(&path.inner, alpha))
}

#[pyfunction]
fn lamperti_inverse(path: &PyPath, alpha: f64) -> PyResult<PyPath> {
    wrap(transforms::lamperti_inverse(&path.inner, alpha))
}

#[pyfunction]
fn censor_positive(path: &PyPath) -> PyPath {
    PyPath {
        inner: transforms::censor_positive(&path.inner),
    }
}

/// Explosion and entrance verdicts at +∞, -∞ and ±∞, as a dict.
#[pyfunction]
fn classify<'py>(
    py: Python<'py>,
    params: &PyStableParams,
    sigma: &PySigma,
) -> PyResult<Bound<'py, PyAny>> {
    let report = boundary_classifier::classify(&params.inner, &sigma.inner).map_err(to_py)?;
    let value =
        serde_json::to_value(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &value)
}

/// Free potential density h(x).
#[pyfunction]
fn h_function(params: &PyStableParams, x: f64) -> PyResult<f64> {
    fluctuation_oracles::h_function(&params.inner, x).map_err(to_py)
}

/// Lévy exponent of the given kind at a complex argument.
#[pyfunction]
fn exponent(kind: &str, params: &PyStableParams, z: Complex64) -> PyResult<Complex64> {
    let k = cli::EXPONENT_KINDS
        .iter()
        .position(|n| *n == kind)
        .ok_or_else(|| {
            PyValueError::new_err(format!(
                "unknown kind '{kind}'; expected one of {:?}",
                cli::EXPONENT_KINDS
            ))
        })?;
    LevyExponent::new(ExponentKind::ALL[k], params.inner)
        .eval(z)
        .map_err(to_py)
}

/// Evaluates a named closed-form identity; `oracle("list")` returns the names.
///
/// Keyword arguments x, y, z, a, b and kind (an exponent kind name) are passed as evaluation points.
#[pyfunction]
#[pyo3(signature = (op, alpha=1.5, rho=0.5, sigma="const:c=1", **points))]
fn oracle<'py>(
    py: Python<'py>,
    op: &str,
    alpha: f64,
    rho: f64,
    sigma: &str,
    points: Option<&Bound<'py, PyDict>>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut map = BTreeMap::new();
    if let Some(d) = points {
        for (k, v) in d.iter() {
            let key: String = k.extract()?;
            let value = if key == "kind" {
                let name: String = v.extract()?;
                cli::EXPONENT_KINDS
                    .iter()
                    .position(|n| *n == name)
                    .ok_or_else(|| {
                        PyValueError::new_err(format!(
                            "unknown kind '{name}'; expected one of {:?}",
                            cli::EXPONENT_KINDS
                        ))
                    })? as f64
            } else {
                v.extract()?
            };
            map.insert(key, value);
        }
    }
    let cfg = RunConfig {
        alpha,
        rho,
        sigma: sigma.to_string(),
        points: map,
        ..RunConfig::default()
    };
    let value = cli::oracle_eval(&cfg, op).map_err(to_py)?;
    json_to_py(py, &value)
}

/// Runs a named validation suite and returns its outcomes as dicts.
#[pyfunction]
#[pyo3(signature = (name, seed=0, n=10_000))]
fn run_suite<'py>(py: Python<'py>, name: &str, seed: u64, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let name = name.to_string();
    let outcomes = py
        .detach(move || montecarlo_harness::run_suite(&name, seed, n))
        .map_err(to_py)?;
    let value =
        serde_json::to_value(&outcomes).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &value)
}

#[pymodule]
fn stablesde_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStableParams>()?;
    m.add_class::<PySigma>()?;
    m.add_class::<PyPath>()?;
    m.add_function(wrap_pyfunction!(sample_path, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(additive_functional, m)?)?;
    m.add_function(wrap_pyfunction!(time_change, m)?)?;
    m.add_function(wrap_pyfunction!(spatial_inversion, m)?)?;
    m.add_function(wrap_pyfunction!(co_inversion, m)?)?;
    m.add_function(wrap_pyfunction!(lamperti_forward, m)?)?;
    m.add_function(wrap_pyfunction!(lamperti_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(censor_positive, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(h_function, m)?)?;
    m.add_function(wrap_pyfunction!(exponent, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add("SUITES", montecarlo_harness::SUITES.to_vec())?;
    m.add("ORACLE_OPS", cli::ORACLE_OPS.to_vec())?;
    m.add("EXPONENT_KINDS", cli::EXPONENT_KINDS.to_vec())?;
    Ok(())
}
