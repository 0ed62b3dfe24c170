//! Python bindings for `hindman_core`.

use hindman_core::bounds::{render, spencer_bound as core_bound, BoundError, OracleTable, DEFAULT_BIT_BUDGET};
use hindman_core::formats::{parse_certificate, parse_coloring, to_json};
use hindman_core::replay::{extract as core_extract, verify_spencer as core_verify, ReplayParams};
use hindman_core::search::{self, SearchBudget, Status};
use hindman_core::{DomainKind, Error, FiniteSet, SpencerWitness};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Input(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn kind_of(name: &str) -> PyResult<DomainKind> {
    match name {
        "interval" => Ok(DomainKind::Interval),
        "subsets" => Ok(DomainKind::Subsets),
        _ => Err(PyValueError::new_err(format!("unknown coloring kind {name:?}"))),
    }
}

/// A coloring of `[k]` (interval) or of the non-empty subsets of `[k]`.
#[pyclass(frozen, name = "Coloring")]
struct PyColoring(hindman_core::Coloring);

#[pymethods]
impl PyColoring {
    #[new]
    fn new(kind: &str, k: u32, colors: u32, assign: Vec<u32>) -> PyResult<Self> {
        hindman_core::Coloring::new(kind_of(kind)?, k, colors, assign).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn constant(kind: &str, k: u32, colors: u32) -> PyResult<Self> {
        hindman_core::Coloring::constant(kind_of(kind)?, k, colors).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_coloring(text).map(Self).map_err(py_err)
    }

    fn to_json(&self) -> String {
        to_json(&self.0)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.0.kind() {
            DomainKind::Interval => "interval",
            DomainKind::Subsets => "subsets",
        }
    }

    #[getter]
    fn k(&self) -> u32 {
        self.0.k()
    }

    #[getter]
    fn colors(&self) -> u32 {
        self.0.colors()
    }

    #[getter]
    fn assign(&self) -> Vec<u32> {
        self.0.assign().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("Coloring({:?}, k={}, colors={})", self.kind(), self.0.k(), self.0.colors())
    }
}

/// Result of a threshold computation.
#[pyclass(frozen, name = "SearchOutcome")]
struct PyOutcome {
    #[pyo3(get)]
    exact: bool,
    #[pyo3(get)]
    value: u64,
    #[pyo3(get)]
    nodes_explored: u64,
    /// Certificate JSON, when a bad coloring was found.
    #[pyo3(get)]
    certificate: Option<String>,
    text: String,
}

#[pymethods]
impl PyOutcome {
    fn __repr__(&self) -> String {
        self.text.clone()
    }
}

impl From<search::SearchOutcome> for PyOutcome {
    fn from(o: search::SearchOutcome) -> Self {
        PyOutcome {
            exact: o.status == Status::Exact,
            value: o.value,
            nodes_explored: o.nodes_explored,
            certificate: o.lower_certificate.as_ref().map(to_json),
            text: o.to_string(),
        }
    }
}

fn budget(max_k: u32, max_nodes: u64, threads: usize) -> SearchBudget {
    SearchBudget { max_k, max_nodes, threads }
}

#[pyfunction]
#[pyo3(signature = (m, p, c, max_k=64, max_nodes=50_000_000, threads=1))]
fn compute_sp(py: Python<'_>, m: u64, p: u64, c: u32, max_k: u32, max_nodes: u64, threads: usize) -> PyResult<PyOutcome> {
    py.detach(|| search::compute_sp(m, p, c, budget(max_k, max_nodes, threads))).map(Into::into).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (n, c, max_k=64, max_nodes=50_000_000, threads=1))]
fn compute_u(py: Python<'_>, n: u32, c: u32, max_k: u32, max_nodes: u64, threads: usize) -> PyResult<PyOutcome> {
    py.detach(|| search::compute_u(n, c, budget(max_k, max_nodes, threads))).map(Into::into).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (n, c, max_k=64, max_nodes=50_000_000, threads=1))]
fn compute_hind(py: Python<'_>, n: u32, c: u32, max_k: u32, max_nodes: u64, threads: usize) -> PyResult<PyOutcome> {
    py.detach(|| search::compute_hind(n, c, budget(max_k, max_nodes, threads))).map(Into::into).map_err(py_err)
}

#[pyfunction]
fn verify_certificate(text: &str) -> PyResult<bool> {
    search::verify_certificate(&parse_certificate(text).map_err(py_err)?).map_err(py_err)
}

#[pyfunction]
fn exp2(elements: Vec<u32>) -> PyResult<u64> {
    hindman_core::exp2(&FiniteSet::new(elements)).map_err(py_err)
}

#[pyfunction]
fn set_of(n: u64) -> PyResult<Vec<u32>> {
    hindman_core::set_of(n).map(|s| s.elements().to_vec()).map_err(py_err)
}

/// A Spencer witness `H` in the coloring, or `None`.
#[pyfunction]
fn find_spencer_witness(coloring: &PyColoring, m: u64, p: u64) -> PyResult<Option<Vec<u64>>> {
    Ok(search::find_spencer_witness(&coloring.0, m, p).map_err(py_err)?.map(|w| w.h))
}

/// Disjoint unions of blocks (as block-index lists) with one color, or `None`.
#[pyfunction]
#[pyo3(signature = (coloring, n, ordered=false))]
fn find_union_witness(coloring: &PyColoring, n: u32, ordered: bool) -> PyResult<Option<Vec<Vec<u32>>>> {
    let w = search::find_union_witness(&coloring.0, n, ordered).map_err(py_err)?;
    Ok(w.map(|w| w.d.iter().map(|s| s.elements().to_vec()).collect()))
}

/// `(valid, violation)` for a Spencer witness against an interval coloring.
#[pyfunction]
fn verify_spencer(coloring: &PyColoring, m: u64, p: u64, h: Vec<u64>) -> (bool, Option<String>) {
    let report = core_verify(&coloring.0, &SpencerWitness { m, p, h });
    (report.valid, report.violation)
}

fn exact_oracles(max_k: u32, max_nodes: u64) -> OracleTable {
    OracleTable::exact(budget(max_k, max_nodes, 1))
}

/// Rendered bound trace. `oracle` is `"exact"` or `"symbolic"`.
#[pyfunction]
#[pyo3(signature = (m, p, c, oracle="exact", bits=DEFAULT_BIT_BUDGET, max_k=6, max_nodes=10_000_000))]
fn spencer_bound(m: u64, p: u64, c: u64, oracle: &str, bits: u64, max_k: u32, max_nodes: u64) -> PyResult<String> {
    let table = match oracle {
        "exact" => exact_oracles(max_k, max_nodes),
        "symbolic" => OracleTable::symbolic(),
        _ => return Err(PyValueError::new_err(format!("unknown oracle {oracle:?}"))),
    };
    match core_bound(m, p, c, &table, bits) {
        Ok(trace) => Ok(render(&trace)),
        Err(BoundError::Domain(e)) => Err(py_err(e)),
        Err(BoundError::UnknownOracle(miss)) => Err(PyRuntimeError::new_err(miss.message)),
    }
}

/// Replays the upper-bound argument on a coloring: `(H, transcript JSON)`.
#[pyfunction]
#[pyo3(signature = (m, p, c, coloring, n_seq=None))]
fn extract(
    py: Python<'_>,
    m: u64,
    p: u64,
    c: u64,
    coloring: &PyColoring,
    n_seq: Option<Vec<u64>>,
) -> PyResult<(Vec<u64>, String)> {
    let params = match n_seq {
        Some(n) => ReplayParams::Supplied(n),
        None => ReplayParams::Recursion(exact_oracles(6, 10_000_000)),
    };
    let col = coloring.0.clone();
    let t = py.detach(|| core_extract(m, p, c, &col, &params)).map_err(py_err)?;
    Ok((t.witness.h.clone(), to_json(&t)))
}

#[pymodule]
fn hindman(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyColoring>()?;
    m.add_class::<PyOutcome>()?;
    m.add_function(wrap_pyfunction!(compute_sp, m)?)?;
    m.add_function(wrap_pyfunction!(compute_u, m)?)?;
    m.add_function(wrap_pyfunction!(compute_hind, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(exp2, m)?)?;
    m.add_function(wrap_pyfunction!(set_of, m)?)?;
    m.add_function(wrap_pyfunction!(find_spencer_witness, m)?)?;
    m.add_function(wrap_pyfunction!(find_union_witness, m)?)?;
    m.add_function(wrap_pyfunction!(verify_spencer, m)?)?;
    m.add_function(wrap_pyfunction!(spencer_bound, m)?)?;
    m.add_function(wrap_pyfunction!(extract, m)?)?;
    Ok(())
}
