//! Python bindings. Integers cross the boundary as Python ints; structured
//! reports are returned as dictionaries decoded from the JSON encodings.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;

use afkit_core::dimension::{telescope, to_dot, validate_diagram};
use afkit_core::eplag::{divisibility_fingerprint, is_p_divisible_sample, tree_to_eplag, EplagGroup};
use afkit_core::invariants::{pipeline as run_pipeline, PipelineOptions};
use afkit_core::json;
use afkit_core::rordam::{rordam_pair, rordam_verify};
use afkit_core::schreier::{schreier_generators as generators, KernelOracle};
use afkit_core::{smith_normal_form as snf, FgAbelianGroup, IntMatrix};

fn err(e: afkit_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let json = PyModule::import(py, "json")?;
    Ok(json.call_method1("loads", (v.to_string(),))?.unbind())
}

fn parse(text: &str) -> PyResult<serde_json::Value> {
    json::parse_document(text).map_err(err)
}

fn matrix(rows: Vec<Vec<BigInt>>, cols: usize) -> PyResult<IntMatrix> {
    IntMatrix::from_rows(rows, cols).map_err(err)
}

/// A finitely presented abelian group: generators modulo the row relations.
#[pyclass(name = "Group", module = "afkit", skip_from_py_object)]
#[derive(Clone)]
struct PyGroup {
    inner: FgAbelianGroup,
}

#[pymethods]
impl PyGroup {
    #[new]
    #[pyo3(signature = (generators, relations = Vec::new()))]
    fn new(generators: usize, relations: Vec<Vec<BigInt>>) -> PyResult<Self> {
        let rel = matrix(relations, generators)?;
        Ok(PyGroup { inner: FgAbelianGroup::new(generators, rel).map_err(err)? })
    }

    #[staticmethod]
    fn cyclic(order: u64) -> Self {
        PyGroup { inner: FgAbelianGroup::cyclic(order) }
    }

    #[staticmethod]
    fn free(rank: usize) -> Self {
        PyGroup { inner: FgAbelianGroup::free(rank) }
    }

    #[staticmethod]
    fn trivial() -> Self {
        PyGroup { inner: FgAbelianGroup::trivial() }
    }

    #[getter]
    fn invariant_factors(&self) -> Vec<BigInt> {
        self.inner.invariant_factors().to_vec()
    }

    #[getter]
    fn free_rank(&self) -> usize {
        self.inner.free_rank()
    }

    #[getter]
    fn torsion(&self) -> Vec<BigInt> {
        self.inner.torsion_factors()
    }

    #[getter]
    fn order(&self) -> Option<BigInt> {
        self.inner.order()
    }

    fn is_trivial(&self) -> bool {
        self.inner.is_trivial()
    }

    fn is_isomorphic(&self, other: &PyGroup) -> bool {
        self.inner.is_isomorphic(&other.inner)
    }

    fn quotient_by(&self, elements: Vec<Vec<BigInt>>) -> PyResult<Self> {
        Ok(PyGroup { inner: self.inner.quotient_by(&elements).map_err(err)? })
    }

    fn is_n_divisible(&self, n: u64) -> bool {
        self.inner.is_n_divisible(n)
    }

    fn is_uniquely_n_divisible(&self, n: u64) -> bool {
        self.inner.is_uniquely_n_divisible(n)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Group({})", self.inner)
    }
}

/// Returns `(s, u, v)` with `u * m * v == s`.
#[pyfunction]
fn smith_normal_form(rows: Vec<Vec<BigInt>>) -> PyResult<(Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>)> {
    let cols = rows.first().map_or(0, Vec::len);
    let f = snf(&matrix(rows, cols)?);
    Ok((f.s.to_rows(), f.u.to_rows(), f.v.to_rows()))
}

#[pyfunction]
#[pyo3(signature = (group, width = 6, depth = 4))]
fn rordam(py: Python<'_>, group: &PyGroup, width: usize, depth: usize) -> PyResult<Py<PyAny>> {
    let pair = rordam_pair(&group.inner, width).map_err(err)?;
    let r = rordam_verify(&pair, &group.inner, depth).map_err(err)?;
    let v = serde_json::json!({
        "pass": r.pass,
        "expected": json::vector_to_json(&r.expected),
        "observed": r.observed.iter().map(|o| json::vector_to_json(o)).collect::<Vec<_>>(),
        "beta": json::matrix_to_json(pair.beta()),
    });
    to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (group, prime, depth = 3, width = 2, bound = 64))]
fn pipeline(py: Python<'_>, group: &PyGroup, prime: u64, depth: usize, width: usize, bound: usize) -> PyResult<Py<PyAny>> {
    let opts = PipelineOptions { width, search_bound: bound };
    let r = run_pipeline(&group.inner, prime, depth, opts).map_err(err)?;
    to_py(py, &json::pipeline_report_to_json(&r))
}

/// Violations of a diagram given as JSON text; empty when valid.
#[pyfunction]
fn diagram_violations(text: &str) -> PyResult<Vec<String>> {
    let d = json::diagram_from_json(&parse(text)?).map_err(err)?;
    Ok(validate_diagram(&d).iter().map(ToString::to_string).collect())
}

#[pyfunction]
fn diagram_telescope(py: Python<'_>, text: &str, cuts: Vec<usize>) -> PyResult<Py<PyAny>> {
    let d = json::diagram_from_json(&parse(text)?).map_err(err)?;
    to_py(py, &json::diagram_to_json(&telescope(&d, &cuts).map_err(err)?))
}

#[pyfunction]
fn diagram_dot(text: &str) -> PyResult<String> {
    Ok(to_dot(&json::diagram_from_json(&parse(text)?).map_err(err)?))
}

/// The group of a prime-labelled graph.
#[pyclass(name = "Eplag", module = "afkit")]
struct PyEplag {
    inner: EplagGroup,
}

#[pymethods]
impl PyEplag {
    #[staticmethod]
    fn from_graph(text: &str) -> PyResult<Self> {
        Ok(PyEplag { inner: EplagGroup::new(json::graph_from_json(&parse(text)?).map_err(err)?) })
    }

    #[staticmethod]
    #[pyo3(signature = (text, primes = Vec::new()))]
    fn from_tree(text: &str, primes: Vec<u64>) -> PyResult<Self> {
        let tree = json::tree_from_json(&parse(text)?).map_err(err)?;
        let primes: BTreeSet<u64> = primes.into_iter().collect();
        Ok(PyEplag { inner: tree_to_eplag(&tree, &primes).map_err(err)? })
    }

    #[getter]
    fn vertex_labels(&self) -> Vec<u64> {
        self.inner.graph.vertex_labels.clone()
    }

    #[getter]
    fn edge_labels(&self) -> Vec<u64> {
        self.inner.graph.edge_labels.clone()
    }

    /// Membership of a vector of rationals written as strings like "1/15".
    #[pyo3(signature = (x, bound = 4))]
    fn contains(&self, x: Vec<String>, bound: u32) -> PyResult<bool> {
        let x: Vec<BigRational> = x
            .iter()
            .enumerate()
            .map(|(i, s)| json::rational_from_json(&serde_json::Value::String(s.clone()), &format!("x[{i}]")))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        Ok(self.inner.membership(&x, bound).map_err(err)?.is_member())
    }

    #[pyo3(signature = (prime_bound = 20, exp_bound = 4))]
    fn fingerprint(&self, prime_bound: u64, exp_bound: u32) -> PyResult<Vec<Vec<u64>>> {
        let fp = divisibility_fingerprint(&self.inner, prime_bound, exp_bound).map_err(err)?;
        Ok(fp.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    #[pyo3(signature = (exp_bound = 4))]
    fn is_p_divisible(&self, exp_bound: u32) -> PyResult<bool> {
        is_p_divisible_sample(&self.inner, exp_bound).map_err(err)
    }
}

/// Schreier generators of the kernel of `F_r -> Z/modulus`, generator `i`
/// going to `images[i]`.
#[pyfunction]
#[pyo3(signature = (images, modulus, word_bound = None))]
fn schreier_generators(images: Vec<i64>, modulus: u64, word_bound: Option<usize>) -> PyResult<Vec<String>> {
    let rank = images.len();
    let images = images.into_iter().map(|x| vec![BigInt::from(x)]).collect();
    let oracle = KernelOracle::new(FgAbelianGroup::cyclic(modulus), images).map_err(err)?;
    let bound = word_bound.unwrap_or(modulus as usize);
    Ok(generators(&oracle, bound, rank).iter().map(ToString::to_string).collect())
}

#[pymodule]
fn afkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_class::<PyEplag>()?;
    m.add_function(wrap_pyfunction!(smith_normal_form, m)?)?;
    m.add_function(wrap_pyfunction!(rordam, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(diagram_violations, m)?)?;
    m.add_function(wrap_pyfunction!(diagram_telescope, m)?)?;
    m.add_function(wrap_pyfunction!(diagram_dot, m)?)?;
    m.add_function(wrap_pyfunction!(schreier_generators, m)?)?;
    Ok(())
}
