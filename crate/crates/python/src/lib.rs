//! Python bindings. Points are lists of Python `complex`; structured results
//! (reports, certificates, identity checks) come back as plain dicts with the
//! same field names as the JSON the CLI writes.

use crsphere::certifier::{self, DEFAULT_RESTARTS, DEFAULT_SAMPLES, DEFAULT_SEED};
use crsphere::linalg::DEFAULT_RANK_TOL;
use crsphere::sampling::sample_sphere;
use crsphere::{
    catalog, verifier, Complex64, ControlKind, CrError, GraphEmbedding, MinimizeOptions, MultistartOptions,
    Objective, SweepConfig, WPolynomial,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: CrError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, value: &impl Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Polynomial in `z_1..z_m` and their conjugates with exact Gaussian-rational
/// coefficients. Variable indices are 0-based.
#[pyclass(name = "Polynomial", module = "crsphere_py", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyPolynomial(pub WPolynomial);

#[pymethods]
impl PyPolynomial {
    #[staticmethod]
    fn zero(m: usize) -> Self {
        Self(WPolynomial::zero(m))
    }

    #[staticmethod]
    fn one(m: usize) -> Self {
        Self(WPolynomial::one(m))
    }

    #[staticmethod]
    fn z(m: usize, j: usize) -> PyResult<Self> {
        WPolynomial::z(m, j).map(Self).map_err(err)
    }

    #[staticmethod]
    fn zbar(m: usize, j: usize) -> PyResult<Self> {
        WPolynomial::zbar(m, j).map(Self).map_err(err)
    }

    /// Constant polynomial; `re` and `im` are rationals written `"p/q"` or `"p"`.
    #[staticmethod]
    #[pyo3(signature = (m, re, im = "0"))]
    fn constant(m: usize, re: &str, im: &str) -> PyResult<Self> {
        let c = crsphere::GaussianRational::parse_parts(re, im).map_err(err)?;
        Ok(Self(WPolynomial::constant(m, c)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("polynomials serialize")
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    fn degree(&self) -> i64 {
        self.0.degree()
    }

    fn term_count(&self) -> usize {
        self.0.term_count()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn is_real(&self) -> bool {
        self.0.is_real()
    }

    fn conj(&self) -> Self {
        Self(self.0.conj())
    }

    fn d_z(&self, j: usize) -> PyResult<Self> {
        self.0.d_z(j).map(Self).map_err(err)
    }

    fn d_zbar(&self, j: usize) -> PyResult<Self> {
        self.0.d_zbar(j).map(Self).map_err(err)
    }

    fn eval(&self, z: Vec<Complex64>) -> PyResult<Complex64> {
        self.0.eval(&z).map_err(err)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.0.try_add(&other.0).map(Self).map_err(err)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.0.try_sub(&other.0).map(Self).map_err(err)
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        self.0.try_mul(&other.0).map(Self).map_err(err)
    }

    fn __neg__(&self) -> Self {
        Self(-&self.0)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial(m={}, {})", self.0.m(), self.0)
    }
}

/// Graph embedding `z ↦ (z, f_1(z), …, f_q(z))` of the unit sphere in ℂ^m.
#[pyclass(name = "Embedding", module = "crsphere_py", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyEmbedding(pub GraphEmbedding);

#[pymethods]
impl PyEmbedding {
    #[new]
    #[pyo3(signature = (m, functions, label = "custom"))]
    fn new(m: usize, functions: Vec<PyPolynomial>, label: &str) -> PyResult<Self> {
        let fs = functions.into_iter().map(|p| p.0).collect();
        catalog::make_graph_embedding(m, fs, label).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("embeddings serialize")
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn q(&self) -> usize {
        self.0.q()
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label().to_string()
    }

    fn functions(&self) -> Vec<PyPolynomial> {
        self.0.functions().iter().cloned().map(PyPolynomial).collect()
    }

    fn expected_cr_dim(&self) -> usize {
        self.0.expected_cr_dim()
    }

    /// Image `(z, f(z))` of a sphere point.
    fn eval(&self, z: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        catalog::eval_embedding(&self.0, &z).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Embedding(label={:?}, m={}, q={})", self.0.label(), self.0.m(), self.0.q())
    }
}

#[pyfunction]
fn make_p() -> PyPolynomial {
    PyPolynomial(catalog::make_p())
}

#[pyfunction]
fn make_q(n: usize) -> PyResult<PyPolynomial> {
    catalog::make_q(n).map(PyPolynomial).map_err(err)
}

#[pyfunction]
fn ahern_rudin() -> PyEmbedding {
    PyEmbedding(catalog::ahern_rudin_embedding())
}

#[pyfunction]
fn q_block(n: usize) -> PyResult<PyEmbedding> {
    catalog::q_block_embedding(n).map(PyEmbedding).map_err(err)
}

/// `kind` is one of `"holomorphic"`, `"zero"`, `"radial"`.
#[pyfunction]
#[pyo3(signature = (kind, m = 2))]
fn negative_control(kind: &str, m: usize) -> PyResult<PyEmbedding> {
    let kind: ControlKind = kind.parse().map_err(err)?;
    catalog::make_negative_control(kind, m).map(PyEmbedding).map_err(err)
}

#[pyfunction]
fn verify_ar_identity(py: Python<'_>) -> PyResult<Py<PyAny>> {
    to_py(py, &catalog::verify_ar_identity())
}

#[pyfunction]
fn independence_matrix(e: &PyEmbedding, z: Vec<Complex64>) -> PyResult<Vec<Vec<Complex64>>> {
    verifier::independence_matrix(&e.0, &z).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (e, z, tol = DEFAULT_RANK_TOL))]
fn point_report(py: Python<'_>, e: &PyEmbedding, z: Vec<Complex64>, tol: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &verifier::point_report(&e.0, &z, tol).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (e, z, tol = DEFAULT_RANK_TOL))]
fn cr_dim_at(e: &PyEmbedding, z: Vec<Complex64>, tol: f64) -> PyResult<usize> {
    verifier::cr_dim_at(&e.0, &z, tol).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (e, z, tol = DEFAULT_RANK_TOL))]
fn equivalence_check(py: Python<'_>, e: &PyEmbedding, z: Vec<Complex64>, tol: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &verifier::equivalence_check(&e.0, &z, tol).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (m, count, seed = DEFAULT_SEED))]
fn sample_points(m: usize, count: u64, seed: u64) -> Vec<Vec<Complex64>> {
    sample_sphere(m, count, seed).collect()
}

#[pyfunction]
#[pyo3(signature = (e, samples = DEFAULT_SAMPLES, seed = DEFAULT_SEED, tol = DEFAULT_RANK_TOL, workers = None))]
fn sweep(
    py: Python<'_>,
    e: &PyEmbedding,
    samples: u64,
    seed: u64,
    tol: f64,
    workers: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let cfg = SweepConfig { samples, seed, tol, workers };
    let report = py.detach(|| certifier::sweep(&e.0, &cfg)).map_err(err)?;
    to_py(py, &report)
}

/// `objective` is `"sigma"` (σ_min²) or `"det"` (det M M*).
#[pyfunction]
#[pyo3(signature = (
    e,
    restarts = DEFAULT_RESTARTS,
    seed = DEFAULT_SEED,
    objective = "sigma",
    tol = DEFAULT_RANK_TOL,
    sweep_samples = DEFAULT_SAMPLES,
    workers = None
))]
#[allow(clippy::too_many_arguments)]
fn multistart_minimize(
    py: Python<'_>,
    e: &PyEmbedding,
    restarts: usize,
    seed: u64,
    objective: &str,
    tol: f64,
    sweep_samples: u64,
    workers: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let objective = match objective {
        "sigma" => Objective::SigmaMinSquared,
        "det" => Objective::GramDeterminant,
        other => return Err(PyValueError::new_err(format!("unknown objective {other:?}"))),
    };
    let opts = MultistartOptions {
        local: MinimizeOptions { objective, ..MinimizeOptions::default() },
        sweep_samples,
        tol,
        workers,
    };
    let report = py.detach(|| certifier::multistart_minimize(&e.0, restarts, seed, &opts)).map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (resolution = 1_000_000))]
fn profile_ar(py: Python<'_>, resolution: usize) -> PyResult<Py<PyAny>> {
    to_py(py, &certifier::profile_ar(resolution).map_err(err)?)
}

#[pymodule]
pub fn crsphere_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyEmbedding>()?;
    m.add_function(wrap_pyfunction!(make_p, m)?)?;
    m.add_function(wrap_pyfunction!(make_q, m)?)?;
    m.add_function(wrap_pyfunction!(ahern_rudin, m)?)?;
    m.add_function(wrap_pyfunction!(q_block, m)?)?;
    m.add_function(wrap_pyfunction!(negative_control, m)?)?;
    m.add_function(wrap_pyfunction!(verify_ar_identity, m)?)?;
    m.add_function(wrap_pyfunction!(independence_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(point_report, m)?)?;
    m.add_function(wrap_pyfunction!(cr_dim_at, m)?)?;
    m.add_function(wrap_pyfunction!(equivalence_check, m)?)?;
    m.add_function(wrap_pyfunction!(sample_points, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(multistart_minimize, m)?)?;
    m.add_function(wrap_pyfunction!(profile_ar, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
