//! Python bindings. Reports come back as plain dicts and lists; rationals are
//! `"p/q"` strings and complex numbers `"re+imj"` strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use lgcy::continuation::{self, Path, PrecisionContext, Singularity};
use lgcy::ifunc::{i_series, ISeriesSpec};
use lgcy::moduli::{self, TopologicalType};
use lgcy::pf::{self, PFOperator};
use lgcy::statespace as space;
use lgcy::{mirror, verify, FreqSeries, ModelCase, Side};

fn err(e: lgcy::Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.kind()))
}

fn case_of(s: &str) -> PyResult<ModelCase> {
    s.parse().map_err(err)
}

fn side_of(s: &str) -> PyResult<Side> {
    s.parse().map_err(err)
}

fn to_py<T: Serialize>(py: Python<'_>, x: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py
        .import_bound("json")?
        .call_method1("loads", (text,))?
        .unbind())
}

/// Truncated I-function of one side.
#[pyclass(name = "ISeries", module = "lgcy_py")]
struct PyISeries {
    inner: FreqSeries,
}

#[pymethods]
impl PyISeries {
    #[new]
    #[pyo3(signature = (case, side = "gw", order = 10))]
    fn new(case: &str, side: &str, order: u32) -> PyResult<Self> {
        let inner =
            i_series(&ISeriesSpec::new(case_of(case)?, side_of(side)?, order)).map_err(err)?;
        Ok(PyISeries { inner })
    }

    #[getter]
    fn case(&self) -> String {
        self.inner.case().to_string()
    }

    #[getter]
    fn side(&self) -> String {
        self.inner.side().to_string()
    }

    #[getter]
    fn f_max(&self) -> String {
        self.inner.f_max().to_string()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "ISeries(case={}, side={}, f_max={}, terms={})",
            self.inner.case(),
            self.inner.side(),
            self.inner.f_max(),
            self.inner.len()
        )
    }

    /// `(f, sector, z_exp, H_power, value)` rows.
    fn coefficients(&self) -> Vec<(String, u32, i32, usize, String)> {
        self.inner
            .coefficient_rows()
            .into_iter()
            .map(|(f, h, e, k, v)| (f.to_string(), h, e, k, v.to_string()))
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<PyObject> {
        to_py(py, &self.inner.to_json_value())
    }

    /// ω₁, ω₂, mirror map and the normalized J-function.
    fn mirror(&self, py: Python<'_>) -> PyResult<PyObject> {
        let m = mirror::mirror_data(&self.inner).map_err(err)?;
        let d = PyDict::new_bound(py);
        d.set_item("omega1", to_py(py, &m.omega1)?)?;
        d.set_item("omega2", to_py(py, &m.omega2)?)?;
        d.set_item("mirror_map", to_py(py, &m.mirror_map)?)?;
        d.set_item("j_small", to_py(py, &m.j_small.to_json_value())?)?;
        d.set_item("normal_form", m.cone.is_normal_form())?;
        Ok(d.into_any().unbind())
    }
}

/// Picard-Fuchs operator of one side.
#[pyclass(name = "PFOperator", module = "lgcy_py")]
struct PyPFOperator {
    inner: PFOperator,
}

#[pymethods]
impl PyPFOperator {
    #[new]
    #[pyo3(signature = (case, side = "gw"))]
    fn new(case: &str, side: &str) -> PyResult<Self> {
        let inner = PFOperator::for_side(case_of(case)?, side_of(side)?).map_err(err)?;
        Ok(PyPFOperator { inner })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PFOperator({})", self.inner)
    }

    #[getter]
    fn order(&self) -> u32 {
        self.inner.order()
    }

    /// Coefficients of `Q_j(q)` in `Σ_j Q_j(q) (d/dq)^j`, indexed `[j][power]`.
    fn q_coefficients(&self) -> PyResult<Vec<Vec<String>>> {
        let q = self.inner.q_coefficients().map_err(err)?;
        Ok(q.iter()
            .map(|row| row.iter().map(ToString::to_string).collect())
            .collect())
    }

    /// Applies the operator and reports the residual.
    fn check(&self, py: Python<'_>, series: &PyISeries) -> PyResult<PyObject> {
        to_py(py, &self.inner.check(&series.inner))
    }
}

#[pyfunction]
#[pyo3(signature = (case, side = "gw", order = 20))]
fn pf_check(py: Python<'_>, case: &str, side: &str, order: u32) -> PyResult<PyObject> {
    to_py(
        py,
        &pf::canonical_check(case_of(case)?, side_of(side)?, order).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (case, n_terms = 10, digits = 50))]
fn closed_form_crosscheck(
    py: Python<'_>,
    case: &str,
    n_terms: u32,
    digits: u32,
) -> PyResult<PyObject> {
    to_py(
        py,
        &mirror::closed_form_crosscheck(case_of(case)?, n_terms, digits).map_err(err)?,
    )
}

#[pyfunction]
fn statespace(py: Python<'_>, case: &str) -> PyResult<PyObject> {
    to_py(
        py,
        &space::correspondence_check(case_of(case)?).map_err(err)?,
    )
}

#[pyfunction]
fn euler_characteristic(degrees: Vec<u32>, ambient_dim: u32) -> PyResult<i64> {
    space::euler_characteristic(&degrees, ambient_dim).map_err(err)
}

fn topo(genus: u32, degree: u32, mult: Vec<u32>) -> TopologicalType {
    TopologicalType::new(genus, degree, mult)
}

#[pyfunction]
#[pyo3(signature = (case, mult, degree = 0, genus = 0))]
fn selection_rule(case: &str, mult: Vec<u32>, degree: u32, genus: u32) -> PyResult<bool> {
    moduli::selection_rule(case_of(case)?, &topo(genus, degree, mult)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (case, mult, degree = 0, genus = 0))]
fn coarse_degree(
    py: Python<'_>,
    case: &str,
    mult: Vec<u32>,
    degree: u32,
    genus: u32,
) -> PyResult<PyObject> {
    to_py(
        py,
        &moduli::coarse_degree(case_of(case)?, &topo(genus, degree, mult), 0).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (case, mult, degree = 0))]
fn n_theta(case: &str, mult: Vec<u32>, degree: u32) -> PyResult<i64> {
    moduli::n_theta(case_of(case)?, &topo(0, degree, mult)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (case, mult, degree = 0, genus = 0))]
fn virtual_dimension(
    py: Python<'_>,
    case: &str,
    mult: Vec<u32>,
    degree: u32,
    genus: u32,
) -> PyResult<PyObject> {
    to_py(
        py,
        &moduli::virtual_dimension(case_of(case)?, &topo(genus, degree, mult)).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (case, order = 4))]
fn yukawa(py: Python<'_>, case: &str, order: usize) -> PyResult<PyObject> {
    to_py(py, &pf::yukawa(case_of(case)?, order).map_err(err)?)
}

/// Connection matrix from the GW to the hybrid Frobenius basis. `path` is a
/// semicolon-separated list of `re+imj` waypoints.
#[pyfunction]
#[pyo3(signature = (case, digits = 40, path = None))]
fn connection_matrix(
    py: Python<'_>,
    case: &str,
    digits: u32,
    path: Option<&str>,
) -> PyResult<PyObject> {
    let case = case_of(case)?;
    let ctx = PrecisionContext::new(digits).map_err(err)?;
    let path = match path {
        Some(p) => p.parse::<Path>().map_err(err)?,
        None => Path::default_for(case),
    };
    let r = py
        .allow_threads(|| continuation::connection_matrix(case, &ctx, &path))
        .map_err(err)?;
    to_py(py, &r.to_json_value())
}

#[pyfunction]
#[pyo3(signature = (case, around = "zero", digits = 40))]
fn monodromy(py: Python<'_>, case: &str, around: &str, digits: u32) -> PyResult<PyObject> {
    let case = case_of(case)?;
    let around: Singularity = around.parse().map_err(err)?;
    let ctx = PrecisionContext::new(digits).map_err(err)?;
    let r = py
        .allow_threads(|| continuation::monodromy(case, &ctx, around))
        .map_err(err)?;
    to_py(py, &r.to_json_value())
}

/// Runs the acceptance checks; returns one dict per criterion.
#[pyfunction]
fn verify_all(py: Python<'_>) -> PyResult<PyObject> {
    let results = py.allow_threads(verify::run_all);
    to_py(py, &results)
}

#[pymodule]
fn lgcy_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyISeries>()?;
    m.add_class::<PyPFOperator>()?;
    m.add_function(wrap_pyfunction!(pf_check, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_crosscheck, m)?)?;
    m.add_function(wrap_pyfunction!(statespace, m)?)?;
    m.add_function(wrap_pyfunction!(euler_characteristic, m)?)?;
    m.add_function(wrap_pyfunction!(selection_rule, m)?)?;
    m.add_function(wrap_pyfunction!(coarse_degree, m)?)?;
    m.add_function(wrap_pyfunction!(n_theta, m)?)?;
    m.add_function(wrap_pyfunction!(virtual_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(yukawa, m)?)?;
    m.add_function(wrap_pyfunction!(connection_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(monodromy, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    Ok(())
}
