//! Python bindings for the compop engine.
//!
//! Exposes the main types (`Space`, `Map`) and the classification, norm,
//! topology, and oracle operations, plus `run_scenario` for the batch
//! pipeline. Points cross the boundary as `(length, index)` tuples, radii as
//! strings like `"3/2"`, and structured results as plain dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};
use serde_json::{json, Value};

use compop::analysis;
use compop::error::Error;
use compop::funcspace::BoundedFunction;
use compop::oracle;
use compop::report;
use compop::scenario::{parse_rational, parse_scenario};
use compop::selfmap::{Deviation, SelfMap};
use compop::space::{Point, Space};
use compop::topology;
use compop::topology::{Isolation, OperatorPoint, Topology};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Internal(msg) => PyRuntimeError::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn point_from(t: (u64, u64)) -> Point {
    Point::new(t.0, t.1)
}

fn point_tuple(p: Point) -> (u64, u64) {
    (p.length(), p.index())
}

fn parse_topology(text: &str) -> PyResult<Topology> {
    text.parse::<Topology>().map_err(PyValueError::new_err)
}

fn parse_radius(text: &str) -> PyResult<num_rational::BigRational> {
    parse_rational(text).map_err(PyValueError::new_err)
}

fn json_to_py<'py>(py: Python<'py>, value: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match value {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any()
            }
        }
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.into_any()
        }
    })
}

fn function_json(f: &BoundedFunction) -> Value {
    Value::Array(
        f.support()
            .map(|(p, v)| json!([point_tuple(*p), v.to_string()]))
            .collect(),
    )
}

/// An unbounded, locally finite rooted space.
#[pyclass(name = "Space", skip_from_py_object)]
#[derive(Clone)]
struct PySpace {
    inner: Space,
}

#[pymethods]
impl PySpace {
    /// One point per length.
    #[staticmethod]
    fn path() -> PySpace {
        PySpace { inner: Space::path() }
    }

    /// `arity^n` points at length `n`; arity must be at least 2.
    #[staticmethod]
    fn tree(arity: u32) -> PyResult<PySpace> {
        Ok(PySpace {
            inner: Space::homogeneous_tree(arity).map_err(to_py_err)?,
        })
    }

    /// Explicit per-length counts, then a cyclic tail profile.
    #[staticmethod]
    fn table(head: Vec<u64>, cycle: Vec<u64>) -> PyResult<PySpace> {
        Ok(PySpace {
            inner: Space::table(head, cycle).map_err(to_py_err)?,
        })
    }

    fn with_point_budget(&self, budget: u64) -> PySpace {
        PySpace {
            inner: self.inner.clone().with_point_budget(budget),
        }
    }

    fn root(&self) -> (u64, u64) {
        point_tuple(self.inner.root())
    }

    fn level_count(&self, length: u64) -> u64 {
        self.inner.level_count(length)
    }

    fn points_up_to(&self, max_length: u64) -> PyResult<Vec<(u64, u64)>> {
        Ok(self
            .inner
            .points_up_to(max_length)
            .map_err(to_py_err)?
            .into_iter()
            .map(point_tuple)
            .collect())
    }

    fn ray(&self, step: u64) -> PyResult<(u64, u64)> {
        Ok(point_tuple(self.inner.canonical_ray(step).map_err(to_py_err)?))
    }

    fn __repr__(&self) -> String {
        format!("Space({})", self.inner)
    }

    fn __eq__(&self, other: &PySpace) -> bool {
        self.inner == other.inner
    }
}

/// A symbolic self-map: a tail rule plus a finite override table.
#[pyclass(name = "Map", skip_from_py_object)]
#[derive(Clone)]
struct PyMap {
    inner: SelfMap,
}

#[pymethods]
impl PyMap {
    #[staticmethod]
    fn identity(space: &PySpace) -> PyMap {
        PyMap {
            inner: SelfMap::identity(&space.inner),
        }
    }

    #[staticmethod]
    fn constant(space: &PySpace, point: (u64, u64)) -> PyResult<PyMap> {
        Ok(PyMap {
            inner: SelfMap::constant(&space.inner, point_from(point)).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn ray_advance(space: &PySpace, advance: u64) -> PyResult<PyMap> {
        Ok(PyMap {
            inner: SelfMap::ray_advance(&space.inner, advance).map_err(to_py_err)?,
        })
    }

    fn with_override(&self, from: (u64, u64), to: (u64, u64)) -> PyResult<PyMap> {
        Ok(PyMap {
            inner: self
                .inner
                .clone()
                .with_override(point_from(from), point_from(to))
                .map_err(to_py_err)?,
        })
    }

    fn apply(&self, point: (u64, u64)) -> PyResult<(u64, u64)> {
        Ok(point_tuple(
            self.inner.apply(point_from(point)).map_err(to_py_err)?,
        ))
    }

    fn range_is_finite(&self) -> bool {
        self.inner.range_is_finite()
    }

    /// The deviation set against another map, as a dict with either the
    /// exact finite point list or a strictly length-increasing witness
    /// prefix.
    fn deviation<'py>(&self, py: Python<'py>, other: &PyMap) -> PyResult<Bound<'py, PyDict>> {
        let dict = PyDict::new(py);
        match self.inner.deviation(&other.inner).map_err(to_py_err)? {
            Deviation::Finite(points) => {
                dict.set_item("finite", true)?;
                dict.set_item(
                    "points",
                    points.into_iter().map(point_tuple).collect::<Vec<_>>(),
                )?;
            }
            Deviation::Infinite(witness) => {
                dict.set_item("finite", false)?;
                dict.set_item(
                    "witness_prefix",
                    witness
                        .take(4)
                        .map_err(to_py_err)?
                        .into_iter()
                        .map(point_tuple)
                        .collect::<Vec<_>>(),
                )?;
            }
        }
        Ok(dict)
    }

    fn increasing_deviation_sequence(&self, other: &PyMap, n: usize) -> PyResult<Vec<(u64, u64)>> {
        Ok(self
            .inner
            .increasing_deviation_sequence(&other.inner, n)
            .map_err(to_py_err)?
            .into_iter()
            .map(point_tuple)
            .collect())
    }

    fn infinite_range_sequence(&self, n: usize) -> PyResult<Vec<(u64, u64)>> {
        Ok(self
            .inner
            .infinite_range_sequence(n)
            .map_err(to_py_err)?
            .into_iter()
            .map(point_tuple)
            .collect())
    }

    fn describe(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Map({})", self.inner)
    }

    fn __eq__(&self, other: &PyMap) -> bool {
        self.inner == other.inner
    }
}

fn classification_json(c: analysis::Classification) -> Value {
    json!({"class": c.class.to_string(), "equal": c.equal})
}

/// Which of the four range/deviation relations holds for the pair.
#[pyfunction]
fn classify<'py>(py: Python<'py>, a: &PyMap, b: &PyMap) -> PyResult<Bound<'py, PyAny>> {
    let c = analysis::classify(&a.inner, &b.inner).map_err(to_py_err)?;
    json_to_py(py, &classification_json(c))
}

/// Operator norm, essential norm, and compactness of one composition
/// operator.
#[pyfunction]
fn single_norms<'py>(py: Python<'py>, m: &PyMap) -> PyResult<Bound<'py, PyAny>> {
    let r = analysis::single_norms(&m.inner);
    json_to_py(
        py,
        &json!({
            "operator_norm": r.operator_norm,
            "essential_norm": r.essential_norm,
            "compact": r.compact,
        }),
    )
}

/// Norms and compactness of the difference of two composition operators.
#[pyfunction]
fn difference_norms<'py>(py: Python<'py>, a: &PyMap, b: &PyMap) -> PyResult<Bound<'py, PyAny>> {
    let r = analysis::difference_norms(&a.inner, &b.inner).map_err(to_py_err)?;
    json_to_py(
        py,
        &json!({
            "operator_norm": r.operator_norm,
            "essential_norm": r.essential_norm,
            "compact": r.compact,
            "relation": r.relation.map(classification_json),
        }),
    )
}

/// The unit-norm function on which the difference operator attains norm 2.
#[pyfunction]
fn norm_attainment_witness<'py>(
    py: Python<'py>,
    a: &PyMap,
    b: &PyMap,
) -> PyResult<Bound<'py, PyAny>> {
    let w = analysis::norm_attainment_witness(&a.inner, &b.inner).map_err(to_py_err)?;
    json_to_py(
        py,
        &json!({
            "base": point_tuple(w.base),
            "attained": w.attained,
            "sup_norm": w.witness.sup_norm().to_string(),
            "function": function_json(&w.witness),
        }),
    )
}

/// The pointwise-null unit family certifying essential norm 2 for an
/// infinite-deviation pair.
#[pyfunction]
fn essential_witness_sequence<'py>(
    py: Python<'py>,
    a: &PyMap,
    b: &PyMap,
    n: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let family = analysis::essential_witness_sequence(&a.inner, &b.inner, n).map_err(to_py_err)?;
    let value = Value::Array(family.iter().map(function_json).collect());
    json_to_py(py, &value)
}

/// The escaping characteristic family certifying essential norm 1 for a
/// mixed pair.
#[pyfunction]
fn mixed_noncompact_witness<'py>(
    py: Python<'py>,
    a: &PyMap,
    b: &PyMap,
    n: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let family = analysis::mixed_noncompact_witness(&a.inner, &b.inner, n).map_err(to_py_err)?;
    let value = Value::Array(family.iter().map(function_json).collect());
    json_to_py(py, &value)
}

/// Two certified companions of a map: one in its own class, one across the
/// range split.
#[pyfunction]
fn class_representatives<'py>(py: Python<'py>, m: &PyMap) -> PyResult<Bound<'py, PyAny>> {
    let reps = analysis::class_representatives(&m.inner).map_err(to_py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("same_class", PyMap { inner: reps.same_class })?;
    dict.set_item(
        "same_class_relation",
        json_to_py(py, &classification_json(reps.same_class_relation))?,
    )?;
    dict.set_item("cross_class", PyMap { inner: reps.cross_class })?;
    dict.set_item(
        "cross_class_relation",
        json_to_py(py, &classification_json(reps.cross_class_relation))?,
    )?;
    Ok(dict.into_any())
}

#[pyfunction]
fn uniform_distance(a: &PyMap, b: &PyMap) -> PyResult<u8> {
    topology::uniform_distance(
        &OperatorPoint::new(a.inner.clone()),
        &OperatorPoint::new(b.inner.clone()),
    )
    .map_err(to_py_err)
}

#[pyfunction]
fn essential_distance(a: &PyMap, b: &PyMap) -> PyResult<u8> {
    topology::essential_distance(
        &OperatorPoint::new(a.inner.clone()),
        &OperatorPoint::new(b.inner.clone()),
    )
    .map_err(to_py_err)
}

/// Symbolic shape of the essential ball around the center, e.g.
/// `"dot-class-plus-compacts"`. The radius is a rational string like `"3/2"`.
#[pyfunction]
fn essential_ball(center: &PyMap, epsilon: &str) -> PyResult<String> {
    let eps = parse_radius(epsilon)?;
    Ok(
        topology::essential_ball(&OperatorPoint::new(center.inner.clone()), &eps)
            .map_err(to_py_err)?
            .kind()
            .to_string(),
    )
}

#[pyfunction]
fn ball_contains(center: &PyMap, epsilon: &str, candidate: &PyMap) -> PyResult<bool> {
    let eps = parse_radius(epsilon)?;
    topology::ball_contains(
        &OperatorPoint::new(center.inner.clone()),
        &eps,
        &OperatorPoint::new(candidate.inner.clone()),
    )
    .map_err(to_py_err)
}

/// Whether the two operators share a component in the `"uniform"` or
/// `"essential"` topology.
#[pyfunction]
fn same_component(a: &PyMap, b: &PyMap, topology_name: &str) -> PyResult<bool> {
    topology::same_component(
        &OperatorPoint::new(a.inner.clone()),
        &OperatorPoint::new(b.inner.clone()),
        parse_topology(topology_name)?,
    )
    .map_err(to_py_err)
}

/// `(isolated, witness)`: every operator is uniformly isolated; none is
/// essentially isolated, and then a distinct same-component witness comes
/// back.
#[pyfunction]
fn is_isolated(m: &PyMap, topology_name: &str) -> PyResult<(bool, Option<PyMap>)> {
    let isolation = topology::is_isolated(
        &OperatorPoint::new(m.inner.clone()),
        parse_topology(topology_name)?,
    )
    .map_err(to_py_err)?;
    Ok(match isolation {
        Isolation::Isolated => (true, None),
        Isolation::NotIsolated { witness } => (
            false,
            Some(PyMap {
                inner: witness.symbol().clone(),
            }),
        ),
    })
}

/// Two distinct operators that no essential neighborhoods separate.
#[pyfunction]
fn hausdorff_counterexample(space: &PySpace) -> PyResult<(PyMap, PyMap)> {
    let (x, y) = topology::hausdorff_counterexample(&space.inner).map_err(to_py_err)?;
    Ok((
        PyMap {
            inner: x.symbol().clone(),
        },
        PyMap {
            inner: y.symbol().clone(),
        },
    ))
}

/// Continuity certificate for the two-piece step path between operators of
/// one essential component.
#[pyfunction]
fn path_certificate<'py>(py: Python<'py>, a: &PyMap, b: &PyMap) -> PyResult<Bound<'py, PyAny>> {
    let cert = topology::path_certificate(
        &OperatorPoint::new(a.inner.clone()),
        &OperatorPoint::new(b.inner.clone()),
    )
    .map_err(to_py_err)?;
    let value = json!({
        "continuous": cert.continuous,
        "cases": serde_json::to_value(&cert.cases).expect("serializable"),
    });
    json_to_py(py, &value)
}

/// Dual-route restricted difference norm over points of length at most
/// `max_length`.
#[pyfunction]
fn restricted_difference_norm<'py>(
    py: Python<'py>,
    a: &PyMap,
    b: &PyMap,
    max_length: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = oracle::restricted_difference_norm(&a.inner, &b.inner, max_length).map_err(to_py_err)?;
    json_to_py(py, &serde_json::to_value(&r).expect("serializable"))
}

/// Certified essential-norm lower bound from an explicit witness family.
#[pyfunction]
fn essential_lower_bound_probe<'py>(
    py: Python<'py>,
    a: &PyMap,
    b: &PyMap,
    family_size: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let r = oracle::essential_lower_bound_probe(&a.inner, &b.inner, family_size)
        .map_err(to_py_err)?;
    json_to_py(py, &serde_json::to_value(&r).expect("serializable"))
}

/// Difference-norm trace along a pointwise-null family, with a verdict.
#[pyfunction]
fn compactness_probe<'py>(
    py: Python<'py>,
    a: &PyMap,
    b: &PyMap,
    family_size: usize,
    max_length: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = oracle::compactness_probe(&a.inner, &b.inner, family_size, max_length)
        .map_err(to_py_err)?;
    json_to_py(py, &serde_json::to_value(&r).expect("serializable"))
}

/// Scan for a point whose image length exceeds the bound.
#[pyfunction]
fn range_escape_probe<'py>(
    py: Python<'py>,
    m: &PyMap,
    max_length: u64,
    range_bound: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = oracle::range_escape_probe(&m.inner, max_length, range_bound).map_err(to_py_err)?;
    json_to_py(py, &serde_json::to_value(&r).expect("serializable"))
}

/// Parses and runs a scenario document, returning the JSON report as a
/// string. Parse and validation errors raise `ValueError` with positioned
/// messages.
#[pyfunction]
#[pyo3(signature = (document, validate = false))]
fn run_scenario(document: &str, validate: bool) -> PyResult<String> {
    let scenario = parse_scenario(document).map_err(|errors| {
        PyValueError::new_err(
            errors
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; "),
        )
    })?;
    let report = report::run(&scenario, validate).map_err(to_py_err)?;
    Ok(report.to_json())
}

#[pymodule]
fn compop_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpace>()?;
    m.add_class::<PyMap>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(single_norms, m)?)?;
    m.add_function(wrap_pyfunction!(difference_norms, m)?)?;
    m.add_function(wrap_pyfunction!(norm_attainment_witness, m)?)?;
    m.add_function(wrap_pyfunction!(essential_witness_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_noncompact_witness, m)?)?;
    m.add_function(wrap_pyfunction!(class_representatives, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_distance, m)?)?;
    m.add_function(wrap_pyfunction!(essential_distance, m)?)?;
    m.add_function(wrap_pyfunction!(essential_ball, m)?)?;
    m.add_function(wrap_pyfunction!(ball_contains, m)?)?;
    m.add_function(wrap_pyfunction!(same_component, m)?)?;
    m.add_function(wrap_pyfunction!(is_isolated, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff_counterexample, m)?)?;
    m.add_function(wrap_pyfunction!(path_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(restricted_difference_norm, m)?)?;
    m.add_function(wrap_pyfunction!(essential_lower_bound_probe, m)?)?;
    m.add_function(wrap_pyfunction!(compactness_probe, m)?)?;
    m.add_function(wrap_pyfunction!(range_escape_probe, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
