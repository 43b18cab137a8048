//! Python bindings for the weighted bounded-variation laboratory.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wbv::{BallFamily, BoxDomain, CoareaTarget, EmbedObject, ShapeSet, WbvError};

fn to_py(e: WbvError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A locally integrable positive weight on R^n.
#[pyclass(name = "Weight", skip_from_py_object)]
#[derive(Clone)]
struct PyWeight {
    inner: wbv::Weight,
}

#[pymethods]
impl PyWeight {
    /// Build a weight from the spec mini-language, e.g. "const(1)",
    /// "power(alpha=-0.5)", "step(threshold=0, low=1, high=2)",
    /// "radial(profile=affine, a=1, b=1)".
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self { inner: wbv::parse_weight(spec).map_err(to_py)? })
    }

    /// Evaluate at a point (list of coordinates).
    fn eval(&self, x: Vec<f64>) -> f64 {
        self.inner.eval(&x)
    }

    /// The averaging constant recorded for this weight, if any.
    fn known_a1(&self) -> Option<f64> {
        self.inner.known_a1()
    }

    fn __repr__(&self) -> String {
        format!("Weight({:?})", self.inner.kind())
    }
}

/// A function sampled at cell centers of a uniform grid on a box.
#[pyclass(name = "GridFunc", skip_from_py_object)]
#[derive(Clone)]
struct PyGridFunc {
    inner: wbv::GridFunction,
}

#[pymethods]
impl PyGridFunc {
    /// Sample `f` (callable taking a list of coordinates) on the grid with
    /// the given per-axis `lower`/`upper` bounds and `resolution`.
    #[new]
    fn new(
        py: Python<'_>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        resolution: Vec<usize>,
        f: Py<pyo3::types::PyAny>,
    ) -> PyResult<Self> {
        let dom = BoxDomain::new(lower, upper).map_err(to_py)?;
        let grid = wbv::make_grid(&dom, &resolution).map_err(to_py)?;
        let mut values = Vec::with_capacity(grid.num_cells());
        for c in grid.centers() {
            let v: f64 = f.call1(py, (c.to_vec(),))?.extract(py)?;
            values.push(v);
        }
        Ok(Self { inner: wbv::GridFunction::new(grid, values).map_err(to_py)? })
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn resolution(&self) -> Vec<usize> {
        self.inner.grid().resolution().to_vec()
    }
}

/// A piecewise function of one variable with jump discontinuities.
#[pyclass(name = "Piecewise1D", skip_from_py_object)]
#[derive(Clone)]
struct PyPiecewise {
    inner: wbv::PiecewiseFunction1D,
}

#[pymethods]
impl PyPiecewise {
    /// Indicator of the open interval (a, b).
    #[staticmethod]
    fn indicator(a: f64, b: f64) -> PyResult<Self> {
        Ok(Self { inner: wbv::PiecewiseFunction1D::indicator(a, b).map_err(to_py)? })
    }

    /// Tent function max(0, 1 - |x|).
    #[staticmethod]
    fn tent() -> Self {
        Self { inner: wbv::fixtures::tent() }
    }

    fn eval(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }
}

/// Weighted total variation of a grid function (forward-difference sum).
#[pyfunction]
fn weighted_tv(f: &PyGridFunc, w: &PyWeight) -> PyResult<f64> {
    Ok(wbv::weighted_tv(&f.inner, &w.inner).map_err(to_py)?.value)
}

/// Exact weighted variation of a piecewise function on (a, b).
#[pyfunction]
fn variation_1d(f: &PyPiecewise, w: &PyWeight, a: f64, b: f64) -> PyResult<f64> {
    wbv::variation_1d(&f.inner, &w.inner, (a, b)).map_err(to_py)
}

/// Weighted perimeter of a union of intervals; may be infinite.
#[pyfunction]
fn perimeter_1d(intervals: Vec<(f64, f64)>, w: &PyWeight) -> PyResult<f64> {
    wbv::perimeter_1d(&intervals, &w.inner).map_err(to_py)
}

/// Estimate the averaging constant sup M w / w over the window family
/// adapted to the weight's singularities.
#[pyfunction]
fn estimate_a1(w: &PyWeight, a: f64, b: f64, resolution: usize) -> PyResult<f64> {
    let dom = BoxDomain::interval(a, b).map_err(to_py)?;
    let g = wbv::make_grid(&dom, &[resolution]).map_err(to_py)?;
    let fam = BallFamily::adapted(&g, &w.inner);
    wbv::estimate_a1_constant(&w.inner, &g, &fam).map_err(to_py)
}

/// Smooth approximation via the partition-of-unity mollification schedule.
/// Returns (approximant, diagnostics dict).
#[pyfunction]
#[pyo3(signature = (f, w, eps, depth = 3))]
fn smooth_approximate(
    py: Python<'_>,
    f: &PyGridFunc,
    w: &PyWeight,
    eps: f64,
    depth: usize,
) -> PyResult<(PyGridFunc, Py<PyDict>)> {
    let (out, diag) = wbv::smooth_approximate(&f.inner, &w.inner, eps, depth).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("l1_error", diag.l1_error)?;
    d.set_item("tv_input", diag.tv_input)?;
    d.set_item("tv_output", diag.tv_output)?;
    d.set_item("tv_ratio", diag.tv_ratio)?;
    d.set_item(
        "piece_epsilons",
        diag.schedule.pieces.iter().map(|p| p.eps_k).collect::<Vec<_>>(),
    )?;
    Ok((PyGridFunc { inner: out }, d.into()))
}

/// Level-set identity check for a piecewise function on (a, b).
/// Returns a dict with the direct value, the level integral, and the gap.
#[pyfunction]
#[pyo3(signature = (f, w, a, b, levels = 200))]
fn coarea(
    py: Python<'_>,
    f: &PyPiecewise,
    w: &PyWeight,
    a: f64,
    b: f64,
    levels: usize,
) -> PyResult<Py<PyDict>> {
    let rep = wbv::coarea_check(CoareaTarget::Piecewise(&f.inner, (a, b)), &w.inner, levels)
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("direct_value", rep.direct_value)?;
    d.set_item("integral_estimate", rep.integral_estimate)?;
    d.set_item("relative_gap", rep.relative_gap)?;
    d.set_item("levels", rep.levels)?;
    Ok(d.into())
}

/// Subgraph-lift isometry check for the interval (a, b) inside (lo, hi).
#[pyfunction]
#[pyo3(signature = (a, b, w, lo, hi, y_resolution = 256))]
fn isometry_interval(
    py: Python<'_>,
    a: f64,
    b: f64,
    w: &PyWeight,
    lo: f64,
    hi: f64,
    y_resolution: usize,
) -> PyResult<Py<PyDict>> {
    let shape = ShapeSet::interval(a, b).map_err(to_py)?;
    let dom = BoxDomain::interval(lo, hi).map_err(to_py)?;
    let rep = wbv::isometry_check(EmbedObject::Set(&shape), &w.inner, &dom, y_resolution)
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("weighted_value", rep.weighted_value)?;
    d.set_item("lifted_value", rep.lifted_value)?;
    d.set_item("perimeter_gap", rep.perimeter_gap)?;
    d.set_item("l1_gap", rep.l1_gap)?;
    d.set_item("height", rep.height)?;
    Ok(d.into())
}

/// Calibrate the Sobolev constant over the built-in fixture suite.
#[pyfunction]
fn calibrate_sobolev() -> PyResult<f64> {
    wbv::empirical_c1(&wbv::fixtures::gns_suite()).map_err(to_py)
}

/// Named fixtures as (name, summary) pairs.
#[pyfunction]
fn fixture_catalog() -> Vec<(String, String)> {
    wbv::fixtures::catalog()
        .into_iter()
        .map(|f| (f.name.to_string(), f.summary.to_string()))
        .collect()
}

/// Run the full twelve-criteria battery; returns a list of result dicts.
#[pyfunction]
fn run_suite(py: Python<'_>) -> PyResult<Vec<Py<PyDict>>> {
    let rep = wbv::run_suite();
    rep.results
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("id", r.id)?;
            d.set_item("name", r.name.clone())?;
            d.set_item("passed", r.passed)?;
            d.set_item("details", r.details.clone())?;
            d.set_item("runtime_ms", r.runtime_ms)?;
            Ok(d.into())
        })
        .collect()
}

#[pymodule]
fn wbv_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWeight>()?;
    m.add_class::<PyGridFunc>()?;
    m.add_class::<PyPiecewise>()?;
    m.add_function(wrap_pyfunction!(weighted_tv, m)?)?;
    m.add_function(wrap_pyfunction!(variation_1d, m)?)?;
    m.add_function(wrap_pyfunction!(perimeter_1d, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_a1, m)?)?;
    m.add_function(wrap_pyfunction!(smooth_approximate, m)?)?;
    m.add_function(wrap_pyfunction!(coarea, m)?)?;
    m.add_function(wrap_pyfunction!(isometry_interval, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_sobolev, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_catalog, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
