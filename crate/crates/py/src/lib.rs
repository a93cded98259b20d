//! Python bindings. Rows, columns, symbols and points are 0-based here as in
//! the Rust API.

use latin_canon::cycles::cycle_structure;
use latin_canon::onefact::{canonical_1f, of_to_unipotent, same_class_1f, unipotent_to_of, FactorSet};
use latin_canon::oracle::largest_proper_subsquare;
use latin_canon::sampler::{h_statistics_with, JmChain, Schedule};
use latin_canon::steiner::{canonical_sts, canonical_sts_lifted, quasigroup_to_sts, sts_to_quasigroup, BlockSet};
use latin_canon::{canonical_labelling, hamiltonian_count, longest_cycle, same_isotopism_class, species_canonical, PartialPermutation};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: latin_canon::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn images(p: &PartialPermutation) -> Vec<Option<usize>> {
    p.images()
}

#[pyclass(name = "LatinSquare", module = "latin_canon", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyLatinSquare {
    inner: latin_canon::LatinSquare,
}

#[pymethods]
impl PyLatinSquare {
    #[new]
    fn new(rows: Vec<Vec<usize>>) -> PyResult<Self> {
        latin_canon::LatinSquare::new(&rows).map(|inner| PyLatinSquare { inner }).map_err(err)
    }

    /// Parses the 1-based text format or the compact `n:digits` format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = if text.contains(':') {
            latin_canon::LatinSquare::parse_compact(text)
        } else {
            latin_canon::LatinSquare::parse(text)
        };
        inner.map(|inner| PyLatinSquare { inner }).map_err(err)
    }

    #[staticmethod]
    fn cyclic(n: usize) -> Self {
        PyLatinSquare { inner: latin_canon::LatinSquare::cyclic(n) }
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    fn rows(&self) -> Vec<Vec<usize>> {
        self.inner.rows()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn to_compact(&self) -> Option<String> {
        self.inner.to_compact()
    }

    fn canonical(&self) -> Self {
        PyLatinSquare { inner: canonical_labelling(&self.inner).form }
    }

    /// `(form, rows, cols, symbols)` where each map lists the label of every element.
    fn canonical_labelling(&self) -> (Self, Vec<Option<usize>>, Vec<Option<usize>>, Vec<Option<usize>>) {
        let res = canonical_labelling(&self.inner);
        let l = &res.labelling;
        (PyLatinSquare { inner: res.form }, images(&l.alpha), images(&l.beta), images(&l.gamma))
    }

    fn species(&self) -> Self {
        PyLatinSquare { inner: species_canonical(&self.inner) }
    }

    fn is_isotopic(&self, other: PyRef<'_, Self>) -> PyResult<bool> {
        same_isotopism_class(&self.inner, &other.inner).map_err(err)
    }

    fn longest_cycle(&self) -> PyResult<usize> {
        longest_cycle(&self.inner).map_err(err)
    }

    /// Number of row pairs whose cycle structure is a single `n`-cycle.
    fn hamiltonian_count(&self) -> usize {
        hamiltonian_count(&self.inner)
    }

    fn cycle_structure(&self, i: usize, j: usize) -> PyResult<Vec<usize>> {
        let n = self.inner.order();
        if i >= n || j >= n {
            return Err(PyValueError::new_err("row index out of range"));
        }
        cycle_structure(&self.inner, i, j).map(|g| g.0).map_err(err)
    }

    fn largest_proper_subsquare(&self) -> usize {
        largest_proper_subsquare(&self.inner)
    }

    fn __repr__(&self) -> String {
        match self.inner.to_compact() {
            Some(c) => format!("LatinSquare.parse({c:?})"),
            None => format!("<LatinSquare of order {}>", self.inner.order()),
        }
    }
}

/// `count` squares from a Jacobson-Matthews chain.
#[pyfunction]
#[pyo3(signature = (n, seed, count=1))]
fn sample(n: usize, seed: u64, count: usize) -> PyResult<Vec<PyLatinSquare>> {
    let chain = JmChain::new(n, seed).map_err(err)?;
    Ok(chain.take(count).map(|inner| PyLatinSquare { inner }).collect())
}

/// Statistics of the number of Hamiltonian row cycles, as a dict.
#[pyfunction]
#[pyo3(signature = (n, samples, seed, jobs=1))]
fn h_statistics<'py>(py: Python<'py>, n: usize, samples: u64, seed: u64, jobs: usize) -> PyResult<Bound<'py, PyDict>> {
    let s = h_statistics_with(n, samples, seed, jobs, Schedule::default_for(n)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("order", s.order)?;
    d.set_item("samples", s.samples)?;
    d.set_item("min", s.min)?;
    d.set_item("max", s.max)?;
    d.set_item("mode", s.mode)?;
    d.set_item("mean", s.mean)?;
    d.set_item("stddev", s.stddev)?;
    d.set_item("histogram", s.histogram)?;
    Ok(d)
}

/// Canonical block list of a Steiner triple system.
#[pyfunction]
#[pyo3(signature = (n, blocks, lifted=false))]
fn sts_canonical(n: usize, blocks: Vec<[usize; 3]>, lifted: bool) -> PyResult<Vec<[usize; 3]>> {
    let q = sts_to_quasigroup(&BlockSet::new(n, &blocks).map_err(err)?);
    let form = if lifted { canonical_sts_lifted(&q) } else { canonical_sts(&q).form };
    Ok(quasigroup_to_sts(&form).blocks().to_vec())
}

#[pyfunction]
fn sts_isomorphic(n: usize, a: Vec<[usize; 3]>, b: Vec<[usize; 3]>) -> PyResult<bool> {
    let qa = sts_to_quasigroup(&BlockSet::new(n, &a).map_err(err)?);
    let qb = sts_to_quasigroup(&BlockSet::new(n, &b).map_err(err)?);
    Ok(canonical_sts(&qa).form == canonical_sts(&qb).form)
}

/// Canonical factor list of a 1-factorisation of `K_v`.
#[pyfunction]
fn of_canonical(v: usize, factors: Vec<Vec<(usize, usize)>>) -> PyResult<Vec<Vec<(usize, usize)>>> {
    let f = FactorSet::new(v, &factors).map_err(err)?;
    Ok(unipotent_to_of(&canonical_1f(&of_to_unipotent(&f)).form).factors().to_vec())
}

#[pyfunction]
fn of_isomorphic(v: usize, a: Vec<Vec<(usize, usize)>>, b: Vec<Vec<(usize, usize)>>) -> PyResult<bool> {
    let a = FactorSet::new(v, &a).map_err(err)?;
    let b = FactorSet::new(v, &b).map_err(err)?;
    same_class_1f(&a, &b).map_err(err)
}

#[pymodule(name = "latin_canon")]
fn latin_canon_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLatinSquare>()?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(h_statistics, m)?)?;
    m.add_function(wrap_pyfunction!(sts_canonical, m)?)?;
    m.add_function(wrap_pyfunction!(sts_isomorphic, m)?)?;
    m.add_function(wrap_pyfunction!(of_canonical, m)?)?;
    m.add_function(wrap_pyfunction!(of_isomorphic, m)?)?;
    Ok(())
}
