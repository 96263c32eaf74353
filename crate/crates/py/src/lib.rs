//! Python bindings for the catalog, the spherical module, the boundary-value
//! map and the analysis passes. Structured results come back as plain
//! Python objects via JSON; rationals are `"p/q"` strings throughout.

use std::sync::Arc;

use jacquet_core::analysis::{filtration_report, formal_character, probe, relation_certificate, splitting_test};
use jacquet_core::boundary::{boundary_map, verify_bv, BoundaryValueResult};
use jacquet_core::lie::{catalog_json, load_algebra, LieAlgebraData, Weight, CATALOG};
use jacquet_core::rational::{format_rational, int, parse_rational, Rational};
use jacquet_core::spherical::{build_module, SphericalModule};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(jacquet, JacquetError, PyException);

fn err(e: jacquet_core::JacquetError) -> PyErr {
    JacquetError::new_err(format!("[{}] {e}", e.code()))
}

fn to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).expect("values serialize");
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn parse_coord(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(n) = obj.extract::<i64>() {
        return Ok(int(n));
    }
    let s: String = obj.extract()?;
    parse_rational(&s).map_err(err)
}

#[pyclass(frozen, module = "jacquet")]
struct Algebra {
    inner: Arc<LieAlgebraData>,
}

#[pymethods]
impl Algebra {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        Ok(Algebra {
            inner: Arc::new(load_algebra(name).map_err(err)?),
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn weyl_order(&self) -> usize {
        self.inner.weyl_order()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels.clone()
    }

    fn structure_constants(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &catalog_json(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("Algebra('{}')", self.inner.name)
    }
}

/// The spherical principal series `U(λ)` in its normal form.
#[pyclass(frozen, module = "jacquet")]
struct Module {
    inner: Arc<SphericalModule>,
}

#[pymethods]
impl Module {
    #[new]
    fn new(algebra: &Algebra, lam: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let coords = lam.iter().map(parse_coord).collect::<PyResult<Vec<_>>>()?;
        if coords.len() != algebra.inner.rank {
            return Err(JacquetError::new_err(format!(
                "{} has rank {}, got {} coordinates",
                algebra.inner.name,
                algebra.inner.rank,
                coords.len()
            )));
        }
        let module = build_module(algebra.inner.clone(), Weight::new(coords)).map_err(err)?;
        Ok(Module { inner: Arc::new(module) })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn regular(&self) -> bool {
        self.inner.is_regular()
    }

    #[getter]
    fn lam(&self) -> Vec<String> {
        self.inner.lambda.coords.iter().map(format_rational).collect()
    }

    fn summary(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &serde_json::to_value(self.inner.summary()).expect("summaries serialize"))
    }

    fn boundary_map(&self, k: u32) -> PyResult<Boundary> {
        let res = boundary_map(&self.inner, k).map_err(err)?;
        Ok(Boundary {
            module: self.inner.clone(),
            inner: Arc::new(res),
        })
    }
}

/// Generators `v`, the triangular `a`-action `Q` and the transition series.
#[pyclass(frozen, module = "jacquet")]
struct Boundary {
    module: Arc<SphericalModule>,
    inner: Arc<BoundaryValueResult>,
}

#[pymethods]
impl Boundary {
    #[getter]
    fn k(&self) -> u32 {
        self.inner.k
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    /// `ρ + w_iλ` in simple-root coordinates, in generator order.
    #[getter]
    fn eigenvalues(&self) -> Vec<Vec<String>> {
        self.inner
            .eigenvalues
            .iter()
            .map(|w| w.coords.iter().map(format_rational).collect())
            .collect()
    }

    fn to_json(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.to_json(self.module.alg()))
    }

    fn table(&self) -> String {
        self.inner.summary_table(self.module.alg())
    }

    /// `(passed, [(name, passed, detail), ...])`
    fn verify(&self) -> PyResult<(bool, Vec<(String, bool, String)>)> {
        let rep = verify_bv(&self.module, &self.inner).map_err(err)?;
        Ok((rep.passed(), rep.checks.into_iter().map(|c| (c.name, c.passed, c.detail)).collect()))
    }

    fn certificate(&self, py: Python<'_>, i: usize, x: usize) -> PyResult<Py<PyAny>> {
        let c = relation_certificate(&self.module, &self.inner, i, x).map_err(err)?;
        to_py(py, &c.to_json(self.module.alg()))
    }

    fn filtration(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let (report, _) = filtration_report(&self.module, &self.inner).map_err(err)?;
        to_py(py, &serde_json::to_value(report).expect("reports serialize"))
    }

    fn character(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let t = formal_character(&self.module, &self.inner, self.inner.k);
        to_py(py, &serde_json::to_value(t).expect("tables serialize"))
    }

    /// Splitting test at generator `step` (1-based), with the convention
    /// probe attached for rank-one algebras.
    #[pyo3(signature = (step = 1))]
    fn split_test(&self, py: Python<'_>, step: usize) -> PyResult<Py<PyAny>> {
        if step == 0 || step > self.inner.rank() {
            return Err(JacquetError::new_err(format!("step must be in 1..={}", self.inner.rank())));
        }
        let s = splitting_test(&self.module, &self.inner, step - 1).map_err(err)?;
        let mut v = serde_json::to_value(&s).expect("results serialize");
        if self.module.alg().rank == 1 {
            let p = probe(&self.module, &s).map_err(err)?;
            v["probe"] = serde_json::to_value(p).expect("results serialize");
        }
        to_py(py, &v)
    }
}

#[pyfunction]
fn catalog() -> Vec<String> {
    CATALOG.iter().map(|s| s.to_string()).collect()
}

/// Runs the command line in-process; returns `(exit_code, report)`.
#[pyfunction]
fn run(py: Python<'_>, args: Vec<String>) -> PyResult<(i32, Option<Py<PyAny>>)> {
    let argv = std::iter::once("jacquet".to_string()).chain(args);
    let out = jacquet_core::cli::run(argv);
    let report = match out.report {
        Some(doc) => Some(to_py(py, &serde_json::to_value(doc).expect("reports serialize"))?),
        None => None,
    };
    Ok((out.exit_code, report))
}

#[pymodule]
fn jacquet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Algebra>()?;
    m.add_class::<Module>()?;
    m.add_class::<Boundary>()?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("JacquetError", m.py().get_type::<JacquetError>())?;
    Ok(())
}
