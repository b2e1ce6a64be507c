//! Python bindings. Structured results come back as plain dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde_json::{json, Value};

use toricbk::analysis::{
    aut_report, decide_reduction_sl, decide_reduction_sp, decide_split, reduce_to_levi, SpSearch, Verdict,
};
use toricbk::building::GroupSpec;
use toricbk::helly::{HellySearch, WitnessSearch, DEFAULT_BUDGET};
use toricbk::json::{
    flag_from_doc, flag_value, frame_value, labeled_flag_value, matrix_value, parse_flag, parse_klyachko,
    parse_plmap, plmap_value, to_canonical_string, Num,
};
use toricbk::plmap;
use toricbk::{Error, Field, Fp, Rational, F2, F3, F5, F7};

fn err(e: Error) -> PyErr {
    match e {
        Error::Parse(_) | Error::Precondition(_) | Error::InvalidMap(_) | Error::Incompatible { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (v.to_string(),))?.unbind())
}

/// Accepts ints and strings such as `"3/2"`.
fn rational(x: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let num = if let Ok(i) = x.extract::<i64>() {
        Num::Int(i)
    } else {
        Num::Str(x.extract::<String>()?)
    };
    num.to_rational().map_err(err)
}

fn verdict_value<T>(v: &Verdict<T>, witness: impl FnOnce(&T) -> Value) -> Value {
    let w = match v {
        Verdict::Yes(t) => witness(t),
        _ => Value::Null,
    };
    json!({ "verdict": v.as_str(), "witness": w, "reason": v.reason() })
}

/// A piecewise-linear map from a fan to the building, over the rationals.
#[pyclass(name = "PLMap", module = "toricbk", frozen)]
struct PyPLMap {
    inner: plmap::PLMap<Rational>,
}

#[pymethods]
impl PyPLMap {
    /// Parse a map document. Validity is not checked here; see `validate`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = parse_plmap(text).and_then(|d| d.to_plmap()).map_err(err)?;
        Ok(PyPLMap { inner })
    }

    /// Build the map determined by labeled ray flags.
    #[staticmethod]
    fn from_klyachko(text: &str) -> PyResult<Self> {
        let k = parse_klyachko(text).and_then(|d| d.to_data()).map_err(err)?;
        Ok(PyPLMap { inner: plmap::PLMap::from_klyachko(&k).map_err(err)? })
    }

    fn to_json(&self) -> String {
        to_canonical_string(&plmap_value(&self.inner))
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.fan().rank()
    }

    #[getter]
    fn group(&self) -> String {
        format!("{}({})", self.inner.group().kind(), self.inner.group().size())
    }

    #[getter]
    fn num_cones(&self) -> usize {
        self.inner.fan().cones().len()
    }

    /// Diagnostics as strings; empty when the map is valid.
    fn validate(&self) -> PyResult<Vec<String>> {
        Ok(match self.inner.validate().map_err(err)? {
            Ok(()) => Vec::new(),
            Err(ds) => ds.iter().map(|d| d.to_string()).collect(),
        })
    }

    fn is_valid(&self) -> PyResult<bool> {
        Ok(self.validate()?.is_empty())
    }

    /// The labeled flag at a point given as ints or `"p/q"` strings.
    fn eval(&self, py: Python<'_>, point: Vec<Bound<'_, PyAny>>) -> PyResult<Py<PyAny>> {
        let v = point.iter().map(rational).collect::<PyResult<Vec<_>>>()?;
        to_py(py, &labeled_flag_value(&self.inner.eval(&v).map_err(err)?))
    }

    fn ray_flags(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let rays = self.inner.ray_flags().map_err(err)?;
        to_py(py, &Value::Array(rays.iter().map(labeled_flag_value).collect()))
    }

    /// Whether the map lands in one apartment, with the frame as witness.
    fn split(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let v = decide_split(&self.inner).map_err(err)?;
        to_py(py, &verdict_value(&v, frame_value))
    }

    fn reduces_to_sl(&self) -> PyResult<bool> {
        decide_reduction_sl(&self.inner).map_err(err)
    }

    #[pyo3(signature = (seed = 0, grid_budget = 100_000))]
    fn reduce_to_sp(&self, py: Python<'_>, seed: u64, grid_budget: usize) -> PyResult<Py<PyAny>> {
        let search = SpSearch { seed, grid_budget, ..SpSearch::default() };
        let v = decide_reduction_sp(&self.inner, &search).map_err(err)?;
        to_py(
            py,
            &verdict_value(&v, |c| {
                json!({ "form": matrix_value(&c.form.gram().row_vectors()), "plmap": plmap_value(&c.map) })
            }),
        )
    }

    /// Split along a flag given as a flag document; returns the block maps.
    fn reduce_to_levi(&self, flag_json: &str) -> PyResult<Vec<PyPLMap>> {
        let doc = parse_flag(flag_json).map_err(err)?;
        let f0 = flag_from_doc::<Rational>(self.inner.group().size(), &doc.flag).map_err(err)?;
        let blocks = reduce_to_levi(&self.inner, &f0).map_err(err)?;
        Ok(blocks.into_iter().map(|inner| PyPLMap { inner }).collect())
    }

    /// Dimension of the automorphism group, with both assembly paths.
    fn aut(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let a = aut_report(&self.inner).map_err(err)?;
        to_py(
            py,
            &json!({
                "dimension": a.dimension,
                "dimension_by_intersection": a.dimension_by_intersection,
                "ray_flags": a.ray_flags.iter().map(flag_value).collect::<Vec<_>>(),
            }),
        )
    }

    /// The map composed with the action of an invertible matrix (rows of ints or `"p/q"` strings).
    fn conjugate(&self, matrix: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let rows = matrix
            .iter()
            .map(|r| r.iter().map(rational).collect::<PyResult<Vec<_>>>())
            .collect::<PyResult<Vec<_>>>()?;
        let n = rows.first().map_or(0, |r| r.len());
        let g = toricbk::linalg::Matrix::from_rows(n, &rows).map_err(err)?;
        Ok(PyPLMap { inner: self.inner.conjugate(&g).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("PLMap(group={}, rank={}, cones={})", self.group(), self.rank(), self.num_cones())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

fn helly_json<F: Field>(
    mode: &str,
    group: &str,
    size: usize,
    k: Option<usize>,
    max_family: Option<usize>,
    budget: usize,
    seed: u64,
) -> toricbk::Result<Value> {
    let g = GroupSpec::<F>::new(group.parse()?, size)?;
    let search = HellySearch::new(g, budget)?;
    let need_k = || k.ok_or_else(|| Error::Precondition("k is required".into()));
    let witness = |w: &toricbk::helly::HellyWitness<F>| {
        json!({
            "k": w.k,
            "flags": w.flags.iter().map(flag_value).collect::<Vec<_>>(),
            "subset_frames": w.subset_frames.iter().map(frame_value).collect::<Vec<_>>(),
            "refutation": w.refutation,
        })
    };
    Ok(match mode {
        "search" => {
            let k = need_k()?;
            match search.find_witness(k, k + 1, budget, seed)? {
                WitnessSearch::Found(w) => json!({ "verdict": "yes", "witness": witness(&w) }),
                WitnessSearch::NoneExists => json!({ "verdict": "no", "witness": null }),
                WitnessSearch::BudgetExhausted { .. } => json!({ "verdict": "undetermined", "witness": null }),
            }
        }
        "verify" => {
            let k = need_k()?;
            let r = search.verify_upper(k, max_family.unwrap_or(k + 3), budget, seed)?;
            json!({
                "passed": r.passed(),
                "exhaustive": r.exhaustive,
                "checked": r.checked,
                "counterexample": r.counterexample.as_ref().map(witness),
            })
        }
        "bounds" => {
            let b = search.helly_bounds(max_family, budget, seed)?;
            let upper = match (&b.upper.counterexample, b.upper.exhaustive) {
                (Some(_), _) => "counterexample".to_string(),
                (None, true) => format!("verified-to({})", b.upper.max_family),
                (None, false) => "open".to_string(),
            };
            json!({
                "lower": b.lower,
                "upper": upper,
                "witness": b.witness.as_ref().map(witness),
                "search_exhausted": b.search_exhausted,
            })
        }
        m => return Err(Error::Precondition(format!("unknown mode {m:?} (use search, verify or bounds)"))),
    })
}

/// Helly-number experiments over a finite prime field.
#[pyfunction]
#[pyo3(signature = (mode, size, prime, group = "GL", k = None, max_family = None, budget = DEFAULT_BUDGET, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn helly(
    py: Python<'_>,
    mode: &str,
    size: usize,
    prime: u32,
    group: &str,
    k: Option<usize>,
    max_family: Option<usize>,
    budget: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let v = py
        .detach(|| match prime {
            2 => helly_json::<F2>(mode, group, size, k, max_family, budget, seed),
            3 => helly_json::<F3>(mode, group, size, k, max_family, budget, seed),
            5 => helly_json::<F5>(mode, group, size, k, max_family, budget, seed),
            7 => helly_json::<F7>(mode, group, size, k, max_family, budget, seed),
            11 => helly_json::<Fp<11>>(mode, group, size, k, max_family, budget, seed),
            13 => helly_json::<Fp<13>>(mode, group, size, k, max_family, budget, seed),
            p => Err(Error::Precondition(format!("prime {p} is not supported"))),
        })
        .map_err(err)?;
    to_py(py, &v)
}

#[pymodule]
#[pyo3(name = "toricbk")]
fn toricbk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPLMap>()?;
    m.add_function(wrap_pyfunction!(helly, m)?)?;
    Ok(())
}
