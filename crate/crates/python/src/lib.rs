//! Python bindings: Lie models, Hopf points, Perron eigenpairs, the taming
//! pipeline and whole CLI scenarios. Structured results come back as dicts.

use lcslab::formcalc::{Rational, RealScalar};
use lcslab::lie::{self, LieAlgebraModel};
use lcslab::mesh::{random_smooth_field, ConformalMetric, GridForm, PeriodicGrid};
use lcslab::perron::{principal_eigenpair, DriftScheme, EllipticSpec};
use lcslab::pipeline::{find_taming_class, GauduchonData, PipelineConfig};
use lcslab::surfaces::{self, Complex64, PointSample};
use lcslab_cli::config::{self, Command, Overrides};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(lcslab, LcslabError, PyException);

fn err(e: lcslab::Error) -> PyErr {
    LcslabError::new_err(e.to_string())
}

/// Round-trips through JSON so every result is a plain dict/list.
fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Resolves, validates and runs a scenario; returns the report JSON and
/// its exit status.
pub fn scenario_report(
    command: &str,
    scenario: Option<&str>,
    config_text: Option<&str>,
    seed: Option<u64>,
) -> Result<(String, i32), String> {
    let cmd: Command = serde_json::from_value(serde_json::Value::String(command.into()))
        .map_err(|_| format!("unknown command {command:?}"))?;
    let (mut s, src) = match (config_text, scenario) {
        (Some(t), _) => config::parse_str(t, "<config>"),
        (None, Some(name)) => config::from_catalog(name),
        (None, None) => config::default_for(cmd),
    }
    .map_err(|e| e.to_string())?;
    s.apply(&Overrides { seed, ..Default::default() }, &src)
        .map_err(|e| e.to_string())?;
    s.validate(cmd, &src).map_err(|e| e.to_string())?;
    let report = lcslab_cli::commands::run(&s).map_err(|e| e.to_string())?;
    Ok((report.to_json(), report.status.exit_code()))
}

/// Runs a CLI scenario (bundled by name, or a JSON config string) and
/// returns its report.
#[pyfunction]
#[pyo3(signature = (command, scenario=None, config=None, seed=None))]
fn run_scenario(
    py: Python<'_>,
    command: &str,
    scenario: Option<&str>,
    config: Option<&str>,
    seed: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let (json, _) = scenario_report(command, scenario, config, seed).map_err(LcslabError::new_err)?;
    Ok(py.import("json")?.call_method1("loads", (json,))?.unbind())
}

#[pyfunction]
fn scenarios() -> Vec<String> {
    config::catalog_names()
}

/// Invariant Lie algebra model with complex structure and Lee class.
#[pyclass(name = "LieModel", module = "lcslab", frozen)]
struct PyLieModel {
    inner: LieAlgebraModel,
}

#[pymethods]
impl PyLieModel {
    /// Bundled model by name (`sol41`, `abelian4`).
    #[staticmethod]
    fn named(name: &str) -> PyResult<Self> {
        lie::catalog(name)
            .map(|inner| Self { inner })
            .ok_or_else(|| PyValueError::new_err(format!("unknown model {name:?}")))
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        lie::parse_model(text).map(|inner| Self { inner }).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    /// Betti numbers of invariant `d_{kα₀}`-cohomology in every degree.
    fn twisted_betti(&self, k: f64) -> PyResult<Vec<usize>> {
        let alpha = self.inner.alpha0().scale(&<Rational as RealScalar>::from_f64(k));
        (0..=self.inner.dim())
            .map(|d| lie::twisted_cohomology_rank(&self.inner, d, &alpha).map(|r| r.betti))
            .collect::<Result<_, _>>()
            .map_err(err)
    }

    /// Invariant taming search at `α = kα₀`.
    fn taming(&self, py: Python<'_>, k: f64) -> PyResult<Py<PyAny>> {
        let s = lie::invariant_taming_solve(&self.inner, k).map_err(err)?;
        to_py(
            py,
            &serde_json::json!({
                "k": s.k,
                "feasible": s.feasible,
                "certified": s.certified,
                "min_eig": s.min_eig,
                "kernel_dim": s.kernel_dim,
                "obstruction": s.obstruction,
            }),
        )
    }

    fn __repr__(&self) -> String {
        format!("LieModel({:?}, dim={})", self.inner.name(), self.inner.dim())
    }
}

/// Full rigidity report for the Inoue model and its abelian control.
#[pyfunction]
fn inoue_report(py: Python<'_>) -> PyResult<Py<PyAny>> {
    to_py(py, &surfaces::inoue_report().map_err(err)?)
}

/// Primary Hopf surface; points are pairs of complex numbers.
#[pyclass(name = "HopfModel", module = "lcslab", frozen)]
struct PyHopfModel {
    inner: surfaces::HopfModel,
}

fn point(z1: Complex64, z2: Complex64, step: f64) -> PyResult<PointSample> {
    PointSample::new([z1, z2], step).map_err(err)
}

#[pymethods]
impl PyHopfModel {
    #[new]
    #[pyo3(signature = (alpha, beta, lam=Complex64::new(0.0, 0.0), m=1))]
    fn new(alpha: Complex64, beta: Complex64, lam: Complex64, m: u32) -> PyResult<Self> {
        surfaces::HopfModel::new(alpha, beta, lam, m)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    /// `F_t`, `θ_t` and the taming data at a point.
    #[pyo3(signature = (t, z1, z2, step=2.5e-4))]
    fn potential_form(&self, py: Python<'_>, t: f64, z1: Complex64, z2: Complex64, step: f64) -> PyResult<Py<PyAny>> {
        let f = surfaces::hopf_potential_form(&self.inner, t, &point(z1, z2, step)?).map_err(err)?;
        to_py(py, &f)
    }

    /// `sup |dF_t − θ_t∧F_t|`.
    fn lck_residual(&self, t: f64, z1: Complex64, z2: Complex64) -> PyResult<f64> {
        Ok(surfaces::hopf_lck_residual(t, &point(z1, z2, 2.5e-4)?))
    }

    /// `‖θ_t‖²` in the metric of `F_t`.
    fn lee_norm2(&self, t: f64, z1: Complex64, z2: Complex64) -> PyResult<f64> {
        Ok(surfaces::hopf_lee_norm2(t, &point(z1, z2, 2.5e-4)?))
    }

    fn pluricanonical_residual(&self, z1: Complex64, z2: Complex64) -> PyResult<f64> {
        Ok(surfaces::pluricanonical_residual(&self.inner, &point(z1, z2, 2.5e-4)?))
    }

    /// `f(γ₀z)/f(z)` for the standard potential.
    fn automorphy_ratio(&self, z1: Complex64, z2: Complex64) -> f64 {
        surfaces::automorphy_ratio(&self.inner, [z1, z2])
    }
}

/// Principal eigenpair of `Δ_g u + g(b, du) + c u` on the flat torus with
/// constant drift `b`, constant potential `c` and a seeded conformal factor.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (n, drift, potential=0.0, phi_amplitude=0.0, seed=0, scheme="upwind", tol=1e-10))]
fn principal_eigenvalue(
    py: Python<'_>,
    n: usize,
    drift: Vec<f64>,
    potential: f64,
    phi_amplitude: f64,
    seed: u64,
    scheme: &str,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let scheme = match scheme {
        "upwind" => DriftScheme::Upwind,
        "centered" => DriftScheme::Centered,
        other => return Err(PyValueError::new_err(format!("unknown scheme {other:?}"))),
    };
    let grid = PeriodicGrid::new(drift.len(), n).map_err(err)?;
    let metric = ConformalMetric::new(random_smooth_field(&grid, seed, phi_amplitude, 3, 1)).map_err(err)?;
    let spec = EllipticSpec::new(
        metric,
        GridForm::constant_one_form(&grid, &drift),
        GridForm::constant(&grid, potential),
    )
    .map_err(err)?
    .with_scheme(scheme);
    let p = principal_eigenpair(&spec, tol).map_err(err)?;
    to_py(
        py,
        &serde_json::json!({
            "lambda0": p.lambda0,
            "residual": p.residual,
            "iterations": p.iterations,
            "u0": p.u0.values(),
        }),
    )
}

/// Taming-class certificate on the flat torus: constant Lee form `theta`,
/// or (when `theta` is omitted) seeded perturbed data with harmonic part
/// `c0·dx₁`.
#[pyfunction]
#[pyo3(signature = (n, theta=None, dim=4, c0=2.0, seed=0, phi_amplitude=0.2, gamma_amplitude=0.3))]
#[allow(clippy::too_many_arguments)]
fn find_taming(
    py: Python<'_>,
    n: usize,
    theta: Option<Vec<f64>>,
    dim: usize,
    c0: f64,
    seed: u64,
    phi_amplitude: f64,
    gamma_amplitude: f64,
) -> PyResult<Py<PyAny>> {
    let data = match &theta {
        Some(t) => GauduchonData::constant(&PeriodicGrid::new(t.len(), n).map_err(err)?, t),
        None => GauduchonData::perturbed(
            &PeriodicGrid::new(dim, n).map_err(err)?,
            c0,
            seed,
            phi_amplitude,
            gamma_amplitude,
        ),
    }
    .map_err(err)?;
    let cert = find_taming_class(&data, &PipelineConfig::default()).map_err(err)?;
    to_py(py, &cert.summary(Some(seed)))
}

#[pymodule(name = "lcslab")]
fn lcslab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LcslabError", m.py().get_type::<LcslabError>())?;
    m.add_class::<PyLieModel>()?;
    m.add_class::<PyHopfModel>()?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(inoue_report, m)?)?;
    m.add_function(wrap_pyfunction!(principal_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(find_taming, m)?)?;
    Ok(())
}
