use std::collections::BTreeMap;

use hyperwidth::approx::{approx_entry, ApproxOutcome, Mode};
use hyperwidth::cover::{edge_cover_number, fractional_cover_number};
use hyperwidth::decomposition::{fhw_width, ghw_width, validate};
use hyperwidth::io::{generate_random, parse_decomposition, parse_hypergraph, serialize_decomposition, serialize_hypergraph};
use hyperwidth::oracle::{exact_fhw, exact_ghw, OracleBudget};
use hyperwidth::ratlp::integer;
use hyperwidth::{Certificate, Error, Hypergraph, Rational, TreeDecomposition, VertexSet};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pyhyperwidth, BudgetExceeded, PyRuntimeError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Parse { .. } => PyValueError::new_err(e.to_string()),
        Error::Budget(_) => BudgetExceeded::new_err(e.to_string()),
        Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
    }
}

fn labels(h: &Hypergraph, s: &VertexSet) -> Vec<String> {
    h.labels_of(s).into_iter().map(str::to_string).collect()
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "ghw4" => Ok(Mode::Ghw4),
        "ghw6" => Ok(Mode::Ghw6),
        "fhw" => Ok(Mode::Fhw),
        other => Err(PyValueError::new_err(format!("unknown mode {other:?}, expected ghw4, ghw6 or fhw"))),
    }
}

/// A hypergraph with labeled vertices and edges.
#[pyclass(name = "Hypergraph", module = "pyhyperwidth", frozen)]
pub struct PyHypergraph {
    inner: Hypergraph,
}

#[pymethods]
impl PyHypergraph {
    /// Builds from a dict `{label: [vertex, ...]}` or a list of vertex lists (labeled e1, e2, ...).
    #[new]
    fn py_new(edges: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = if let Ok(dict) = edges.cast::<PyDict>() {
            let mut labeled = Vec::with_capacity(dict.len());
            for (k, v) in dict.iter() {
                labeled.push((k.extract::<String>()?, v.extract::<Vec<String>>()?));
            }
            Hypergraph::new(labeled)
        } else {
            Hypergraph::from_unlabeled(edges.extract::<Vec<Vec<String>>>()?)
        };
        Ok(Self { inner: inner.map_err(to_py)? })
    }

    /// Parses the line-based hypergraph text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: parse_hypergraph(text).map_err(to_py)? })
    }

    /// Seeded random connected hypergraph.
    #[staticmethod]
    fn generate(n: usize, m: usize, rank: usize, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: generate_random(n, m, rank, seed).map_err(to_py)? })
    }

    fn to_text(&self) -> String {
        serialize_hypergraph(&self.inner)
    }

    #[getter]
    fn vertices(&self) -> Vec<String> {
        labels(&self.inner, self.inner.vertices())
    }

    #[getter]
    fn edges(&self) -> BTreeMap<String, Vec<String>> {
        self.inner.edges().iter().map(|e| (e.label.clone(), labels(&self.inner, &e.vertices))).collect()
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn components(&self) -> Vec<Vec<String>> {
        self.inner.components().iter().map(|c| labels(&self.inner, c)).collect()
    }

    /// Minimum number of edges covering the given vertices, with one optimal cover.
    fn cover_number(&self, vertices: Vec<String>) -> PyResult<(usize, Vec<String>)> {
        let s = self.inner.set_of(&vertices).map_err(to_py)?;
        let (value, cert) = edge_cover_number(&self.inner, &s).map_err(to_py)?;
        Ok((value, cert.edges))
    }

    /// Minimum total edge weight covering the given vertices, with optimal weights.
    fn fractional_cover_number(&self, vertices: Vec<String>) -> PyResult<(Rational, BTreeMap<String, Rational>)> {
        let s = self.inner.set_of(&vertices).map_err(to_py)?;
        let (value, weights) = fractional_cover_number(&self.inner, &s).map_err(to_py)?;
        Ok((value, weights.weights))
    }

    fn __len__(&self) -> usize {
        self.inner.num_edges()
    }

    fn __repr__(&self) -> String {
        format!("Hypergraph(vertices={}, edges={}, rank={})", self.inner.num_vertices(), self.inner.num_edges(), self.inner.rank())
    }
}

/// A tree decomposition of a hypergraph together with its width.
#[pyclass(name = "Decomposition", module = "pyhyperwidth", frozen)]
pub struct PyDecomposition {
    h: Hypergraph,
    td: TreeDecomposition,
    width: Rational,
    certificates: Option<BTreeMap<usize, Certificate>>,
    #[pyo3(get)]
    invocations: usize,
    #[pyo3(get)]
    depth: usize,
}

#[pymethods]
impl PyDecomposition {
    /// Parses the decomposition text format against `h`; node ids are kept as in the file.
    #[staticmethod]
    fn parse(h: &PyHypergraph, text: &str) -> PyResult<Self> {
        let file = parse_decomposition(&h.inner, text).map_err(to_py)?;
        let td = TreeDecomposition::new(
            file.td.bags().iter().map(|(&n, b)| (n + 1, b.clone())),
            file.td.edges().iter().map(|&(a, b)| (a + 1, b + 1)),
        );
        let certificates = file.certificates.into_iter().map(|(n, c)| (n + 1, c)).collect();
        Ok(Self { h: h.inner.clone(), td, width: file.width, certificates: Some(certificates), invocations: 0, depth: 0 })
    }

    /// Width as reported when the decomposition was produced or parsed.
    #[getter]
    fn width(&self) -> Rational {
        self.width.clone()
    }

    #[getter]
    fn bags(&self) -> BTreeMap<usize, Vec<String>> {
        self.td.bags().iter().map(|(&n, b)| (n, labels(&self.h, b))).collect()
    }

    #[getter]
    fn tree_edges(&self) -> Vec<(usize, usize)> {
        self.td.edges().iter().copied().collect()
    }

    /// Human-readable axiom violations; empty when the decomposition is valid.
    fn violations(&self) -> Vec<String> {
        let report = validate(&self.h, &self.td);
        report.describe(&self.h).lines().map(str::to_string).collect()
    }

    fn is_valid(&self) -> bool {
        validate(&self.h, &self.td).is_valid()
    }

    /// Largest integral cover number over all bags.
    fn ghw_width(&self) -> PyResult<usize> {
        Ok(ghw_width(&self.h, &self.td).map_err(to_py)?.0)
    }

    /// Largest fractional cover number over all bags.
    fn fhw_width(&self) -> PyResult<Rational> {
        Ok(fhw_width(&self.h, &self.td).map_err(to_py)?.0)
    }

    fn to_text(&self) -> PyResult<String> {
        serialize_decomposition(&self.h, &self.td, &self.width, self.certificates.as_ref()).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Decomposition(nodes={}, width={})", self.td.num_nodes(), self.width)
    }
}

/// A refusal: `witness` has no balanced separator of the requested size inside `scope`.
#[pyclass(name = "Refusal", module = "pyhyperwidth", frozen)]
pub struct PyRefusal {
    #[pyo3(get)]
    witness: Vec<String>,
    #[pyo3(get)]
    scope: Vec<String>,
    #[pyo3(get)]
    invocations: usize,
    #[pyo3(get)]
    depth: usize,
}

#[pymethods]
impl PyRefusal {
    fn __bool__(&self) -> bool {
        false
    }

    fn __repr__(&self) -> String {
        format!("Refusal(witness={:?})", self.witness)
    }
}

/// Approximates a decomposition of width within the mode's bound, or refuses.
#[pyfunction]
#[pyo3(signature = (h, k, mode = "ghw4"))]
fn approx(py: Python<'_>, h: &PyHypergraph, k: Rational, mode: &str) -> PyResult<Py<PyAny>> {
    let mode = parse_mode(mode)?;
    let inner = h.inner.clone();
    let (outcome, stats) = py.detach(|| approx_entry(&inner, &k, mode)).map_err(to_py)?;
    match outcome {
        ApproxOutcome::Decomposition { td, width, certificates } => {
            let d = PyDecomposition {
                h: inner,
                td,
                width,
                certificates: Some(certificates),
                invocations: stats.invocations,
                depth: stats.max_depth,
            };
            Ok(Py::new(py, d)?.into_any())
        }
        ApproxOutcome::Refusal { witness, scope } => {
            let r = PyRefusal {
                witness: labels(&inner, &witness),
                scope: labels(&inner, &scope),
                invocations: stats.invocations,
                depth: stats.max_depth,
            };
            Ok(Py::new(py, r)?.into_any())
        }
    }
}

fn budget(max_vertices: usize) -> OracleBudget {
    OracleBudget { max_vertices, ..OracleBudget::default() }
}

/// Exact generalized hypertree width with an optimal decomposition.
#[pyfunction]
#[pyo3(signature = (h, max_vertices = 12))]
fn exact_ghw_width(py: Python<'_>, h: &PyHypergraph, max_vertices: usize) -> PyResult<PyDecomposition> {
    let inner = h.inner.clone();
    let (w, td) = py.detach(|| exact_ghw(&inner, &budget(max_vertices))).map_err(to_py)?;
    Ok(PyDecomposition { h: inner, td, width: integer(w as i64), certificates: None, invocations: 0, depth: 0 })
}

/// Exact fractional hypertree width with an optimal decomposition.
#[pyfunction]
#[pyo3(signature = (h, max_vertices = 12))]
fn exact_fhw_width(py: Python<'_>, h: &PyHypergraph, max_vertices: usize) -> PyResult<PyDecomposition> {
    let inner = h.inner.clone();
    let (w, td) = py.detach(|| exact_fhw(&inner, &budget(max_vertices))).map_err(to_py)?;
    Ok(PyDecomposition { h: inner, td, width: w, certificates: None, invocations: 0, depth: 0 })
}

#[pymodule]
fn pyhyperwidth(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHypergraph>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_class::<PyRefusal>()?;
    m.add_function(wrap_pyfunction!(approx, m)?)?;
    m.add_function(wrap_pyfunction!(exact_ghw_width, m)?)?;
    m.add_function(wrap_pyfunction!(exact_fhw_width, m)?)?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    Ok(())
}
