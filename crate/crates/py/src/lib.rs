use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use stablepieces::git_locus::{
    common_nilcone, locus_report, nilcone_pieces, orbitwise_common_nilcone, semistable_pieces,
};
use stablepieces::pgl2_oracle::{self, ProjMatrixPoint};
use stablepieces::pieces;
use stablepieces::quotient_strata::{quotient_strata_for, StrataReport};
use stablepieces::rootsys::DEFAULT_GROUP_GUARD;
use stablepieces::verify::{context_for, run_suites, Suite, VerifyOptions};
use stablepieces::{Error, Weight};

fn value_error(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serialize to JSON and hand back the equivalent Python object.
fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A root system of the given type, e.g. `RootSystem("B3")`.
#[pyclass(frozen)]
struct RootSystem {
    inner: stablepieces::RootSystem,
}

#[pymethods]
impl RootSystem {
    #[new]
    fn new(type_spec: &str) -> PyResult<Self> {
        Ok(RootSystem { inner: stablepieces::RootSystem::build(type_spec).map_err(value_error)? })
    }

    #[getter]
    fn type_label(&self) -> String {
        self.inner.type_label()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn positive_count(&self) -> usize {
        self.inner.positive_count()
    }

    /// Every root as coordinates in the simple-root basis, positives first.
    fn roots(&self) -> Vec<Vec<i32>> {
        self.inner.roots().to_vec()
    }

    fn cartan(&self) -> Vec<Vec<i32>> {
        self.inner.cartan().to_vec()
    }

    /// Order of the Weyl group from the closed formula.
    fn weyl_order(&self) -> u128 {
        self.inner.cartan_type().weyl_order()
    }

    fn __repr__(&self) -> String {
        format!("RootSystem('{}')", self.inner.type_label())
    }
}

/// The pieces of one `(type, automorphism)` configuration and everything
/// computed from them.
#[pyclass(frozen)]
struct PieceContext {
    inner: pieces::PieceContext,
}

impl PieceContext {
    fn ids(&self, set: &[usize]) -> Vec<String> {
        let mut ids: Vec<String> = set.iter().map(|&k| self.inner.piece(k).id.clone()).collect();
        ids.sort();
        ids
    }

    fn weight(&self, coeffs: Vec<i64>) -> PyResult<Weight> {
        let rank = self.inner.group().rank();
        if coeffs.len() != rank {
            return Err(value_error(Error::WeightLength { expected: rank, got: coeffs.len() }));
        }
        Ok(Weight::new(coeffs))
    }
}

#[pymethods]
impl PieceContext {
    #[new]
    #[pyo3(signature = (type_spec, auto="id", guard=None))]
    fn new(type_spec: &str, auto: &str, guard: Option<u128>) -> PyResult<Self> {
        let inner = context_for(type_spec, auto, guard.unwrap_or(DEFAULT_GROUP_GUARD)).map_err(value_error)?;
        Ok(PieceContext { inner })
    }

    #[getter]
    fn type_label(&self) -> String {
        self.inner.type_label()
    }

    #[getter]
    fn automorphism(&self) -> String {
        self.inner.sigma().spec_string()
    }

    #[getter]
    fn group_order(&self) -> usize {
        self.inner.group().size()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("PieceContext('{}', auto='{}')", self.type_label(), self.automorphism())
    }

    /// Pieces in enumeration order as dicts with `id`, `J`, `w` and `core`.
    fn pieces<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let g = self.inner.group();
        let rows: Vec<serde_json::Value> = self
            .inner
            .pieces()
            .iter()
            .map(|p| serde_json::json!({"id": p.id, "J": p.j, "w": g.format(p.w), "core": p.core}))
            .collect();
        to_py(py, &rows)
    }

    /// Sorted IDs of the pieces in the closure of `piece`.
    fn closure(&self, piece: &str) -> PyResult<Vec<String>> {
        let p = self.inner.parse_id(piece).map_err(value_error)?;
        Ok(self.ids(&self.inner.closure(p)))
    }

    /// `(upper, lower)` cover pairs of the closure order.
    fn poset_covers(&self) -> PyResult<Vec<(String, String)>> {
        Ok(self.inner.closure_poset().map_err(value_error)?.covers)
    }

    fn poset_dot(&self) -> PyResult<String> {
        Ok(self.inner.closure_poset().map_err(value_error)?.to_dot())
    }

    /// Pieces in the nilpotent cone of a dominant sigma-stable weight.
    fn nilcone(&self, weight: Vec<i64>) -> PyResult<Vec<String>> {
        let lambda = self.weight(weight)?;
        Ok(self.ids(&nilcone_pieces(&self.inner, &lambda).map_err(value_error)?))
    }

    fn semistable(&self) -> Vec<String> {
        self.ids(&semistable_pieces(&self.inner))
    }

    /// Pieces with full support; with `orbitwise=True`, pieces whose support
    /// meets every sigma-orbit instead.
    #[pyo3(signature = (orbitwise=false))]
    fn common_nilcone(&self, orbitwise: bool) -> Vec<String> {
        if orbitwise {
            self.ids(&orbitwise_common_nilcone(&self.inner))
        } else {
            self.ids(&common_nilcone(&self.inner))
        }
    }

    /// The locus report for the given weights.
    fn locus<'py>(&self, py: Python<'py>, weights: Vec<Vec<i64>>) -> PyResult<Bound<'py, PyAny>> {
        let weights = weights.into_iter().map(|w| self.weight(w)).collect::<PyResult<Vec<_>>>()?;
        to_py(py, &locus_report(&self.inner, &weights).map_err(value_error)?)
    }

    /// Quotient strata; the automorphism must be the identity.
    fn strata<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let strata = quotient_strata_for(&self.inner).map_err(value_error)?;
        to_py(py, &StrataReport { strata })
    }

    /// Run verification suites and return the report as a dict.
    #[pyo3(signature = (suite="all", samples=1000, seed=42))]
    fn verify<'py>(&self, py: Python<'py>, suite: &str, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let suites =
            Suite::parse_selection(suite).ok_or_else(|| PyValueError::new_err(format!("unknown suite {suite:?}")))?;
        let opts = VerifyOptions { pgl2_samples: samples, seed };
        let report = py.detach(|| run_suites(&self.inner, &suites, &opts)).map_err(value_error)?;
        to_py(py, &report)
    }
}

/// Run every PGL_2 check and return the report as a dict.
#[pyfunction]
#[pyo3(signature = (samples=1000, seed=42))]
fn oracle_pgl2<'py>(py: Python<'py>, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let report = py.detach(|| pgl2_oracle::oracle_report(samples, seed));
    to_py(py, &report)
}

/// `[tr^2 : det]` of an integer 2×2 matrix, as strings in lowest terms
/// with the first nonzero coordinate scaled to 1.
#[pyfunction]
fn quotient_point(entries: [[i64; 2]; 2]) -> PyResult<(String, String)> {
    let a = ProjMatrixPoint::from_ints(entries).map_err(value_error)?;
    let (p, q) = pgl2_oracle::quotient_point(&a).map_err(value_error)?.canonical();
    Ok((p.to_string(), q.to_string()))
}

/// ID of the A1 piece containing an integer 2×2 matrix.
#[pyfunction]
fn classify_piece(entries: [[i64; 2]; 2]) -> PyResult<&'static str> {
    Ok(pgl2_oracle::classify_piece(&ProjMatrixPoint::from_ints(entries).map_err(value_error)?))
}

#[pymodule]
fn pystablepieces(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<RootSystem>()?;
    m.add_class::<PieceContext>()?;
    m.add_function(wrap_pyfunction!(oracle_pgl2, m)?)?;
    m.add_function(wrap_pyfunction!(quotient_point, m)?)?;
    m.add_function(wrap_pyfunction!(classify_piece, m)?)?;
    Ok(())
}
