//! Python module `tori`: tori described by JSON documents or built from the
//! worked examples, with endomorphism, Neron-Severi and verification calls.
//! Structured results come back as plain dicts and lists.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::{json, Value};

use tori::document::TorusDocument;
use tori::endo::{classify_algebra, compute_endo_ring};
use tori::neronseveri::{
    canonical_form_coordinates, compute_n_d, compute_ns, is_algebraic, polarization_search, AlgebraicityVerdict,
    PolarizationOutcome,
};
use tori::papercheck::{self, big_vec_json, field_matrix_json, int_matrix_json, obstruction_json};
use tori::torus::{MultiplicationDatum, Torus};
use tori::GeneratorSpec;

create_exception!(tori, ToriError, PyValueError);

fn err(e: tori::Error) -> PyErr {
    let debug = format!("{e:?}");
    let kind = debug.split(['(', ' ', '{']).next().unwrap_or("Error").to_string();
    ToriError::new_err((kind, e.to_string()))
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (v.to_string(),))?.unbind())
}

/// A torus with the multiplications attached to it.
#[pyclass(name = "Torus", module = "tori", frozen)]
struct PyTorus {
    torus: Torus,
    mults: Vec<MultiplicationDatum>,
}

impl PyTorus {
    fn from_parts(torus: Torus, mults: Vec<MultiplicationDatum>) -> Self {
        PyTorus { torus, mults }
    }

    fn mult(&self, k: usize) -> PyResult<&MultiplicationDatum> {
        self.mults
            .get(k)
            .ok_or_else(|| ToriError::new_err(("Validation", format!("no multiplication with index {k}"))))
    }
}

#[pymethods]
impl PyTorus {
    /// Parses a JSON torus document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc = TorusDocument::parse(text).map_err(err)?;
        let torus = doc.torus().map_err(err)?;
        let mults = doc.attach_all(&torus).map_err(err)?;
        Ok(Self::from_parts(torus, mults))
    }

    fn to_json(&self) -> PyResult<String> {
        Ok(TorusDocument::from_torus(&self.torus, &self.mults).map_err(err)?.to_json())
    }

    /// Period matrix entries as expression strings.
    fn period(&self) -> Vec<Vec<String>> {
        self.torus.period().render()
    }

    fn multiplications(&self) -> Vec<(Vec<Vec<String>>, i64)> {
        self.mults.iter().map(|m| (m.d_analytic.render(), m.d)).collect()
    }

    fn endomorphisms(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let ring = compute_endo_ring(&self.torus).map_err(err)?;
        let class = classify_algebra(&ring).map_err(err)?;
        let v = json!({
            "rank": ring.rank(),
            "basis": ring.basis.iter().map(|b| int_matrix_json(&b.r)).collect::<Vec<_>>(),
            "analytic": ring.basis.iter().map(|b| field_matrix_json(&b.a)).collect::<Vec<_>>(),
            "tag": serde_json::to_value(class.tag).expect("tags serialize"),
            "discriminant_data": big_vec_json(&class.discriminant_data),
        });
        to_py(py, &v)
    }

    /// (tag, discriminant data) of End_Q.
    fn classify(&self) -> PyResult<(String, Vec<String>)> {
        let ring = compute_endo_ring(&self.torus).map_err(err)?;
        let class = classify_algebra(&ring).map_err(err)?;
        let tag = serde_json::to_value(class.tag).expect("tags serialize");
        Ok((tag.as_str().unwrap_or_default().to_string(), class.discriminant_data.iter().map(ToString::to_string).collect()))
    }

    fn ns_rank(&self) -> PyResult<usize> {
        Ok(compute_ns(&self.torus).map_err(err)?.rank())
    }

    /// Alternating integer forms of an NS basis, as nested lists of strings.
    fn ns_basis(&self) -> PyResult<Vec<Vec<Vec<String>>>> {
        Ok(compute_ns(&self.torus).map_err(err)?.basis.iter().map(|b| b.e.render()).collect())
    }

    #[pyo3(signature = (mult = 0))]
    fn nd(&self, py: Python<'_>, mult: usize) -> PyResult<Py<PyAny>> {
        let m = self.mult(mult)?;
        let ns = compute_ns(&self.torus).map_err(err)?;
        let nd = compute_n_d(&ns, m).map_err(err)?;
        let coords = nd
            .basis
            .iter()
            .map(|b| canonical_form_coordinates(m, &b.m).map(|c| json!({ "a": c.a.to_string(), "b": c.b.to_string() })))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let v = json!({
            "rank": nd.rank(),
            "basis": nd.basis.iter().map(|b| int_matrix_json(&b.e)).collect::<Vec<_>>(),
            "canonical_coords": coords,
        });
        to_py(py, &v)
    }

    /// The certified polarization found by the search, or None.
    fn polarize(&self, py: Python<'_>) -> PyResult<Option<Py<PyAny>>> {
        let ns = compute_ns(&self.torus).map_err(err)?;
        match polarization_search(&self.torus, &ns).map_err(err)? {
            PolarizationOutcome::Found(p) => {
                let v = json!({ "coefficients": big_vec_json(&p.coeffs), "E": int_matrix_json(&p.form.e), "M": field_matrix_json(&p.form.m) });
                Ok(Some(to_py(py, &v)?))
            }
            PolarizationOutcome::NoneFound => Ok(None),
        }
    }

    fn is_algebraic(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let ns = compute_ns(&self.torus).map_err(err)?;
        let v = match is_algebraic(&self.torus, &ns, &self.mults).map_err(err)? {
            AlgebraicityVerdict::Algebraic(p) => json!({ "kind": "algebraic", "E": int_matrix_json(&p.form.e) }),
            AlgebraicityVerdict::NotAlgebraic(ob) => json!({ "kind": "not_algebraic", "obstruction": obstruction_json(&ob) }),
            AlgebraicityVerdict::Unknown => json!({ "kind": "unknown" }),
        };
        to_py(py, &v)
    }

    #[pyo3(signature = (mult = 0, seed = 0))]
    fn verify_proposition(&self, py: Python<'_>, mult: usize, seed: u64) -> PyResult<Py<PyAny>> {
        let r = papercheck::verify_proposition_seeded(&self.torus, self.mult(mult)?, seed).map_err(err)?;
        to_py(py, &serde_json::to_value(&r.claims).expect("claims serialize"))
    }

    fn verify_corollaries(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let r = papercheck::verify_corollaries(&self.torus, &self.mults).map_err(err)?;
        to_py(py, &serde_json::to_value(&r.claims).expect("claims serialize"))
    }

    fn __repr__(&self) -> String {
        format!("Torus(period={:?}, multiplications={})", self.period(), self.mults.len())
    }
}

/// Example 1 with parameter r = cube root of `cube_root`.
#[pyfunction]
#[pyo3(signature = (m, cube_root = 2))]
fn example1(m: i64, cube_root: i64) -> PyResult<PyTorus> {
    let r = GeneratorSpec::cube_root("r", cube_root).map_err(err)?;
    let (t, mult) = papercheck::example1(m, Some(r)).map_err(err)?;
    Ok(PyTorus::from_parts(t, vec![mult]))
}

#[pyfunction]
fn example2(m: i64, n: i64) -> PyResult<PyTorus> {
    let (t, mult) = papercheck::example2(m, n).map_err(err)?;
    Ok(PyTorus::from_parts(t, vec![mult]))
}

/// (Z + Z sqrt(-m))^2 with the nonscalar multiplication first, then the
/// scalar one.
#[pyfunction]
fn scalar_cm_product(m: i64) -> PyResult<PyTorus> {
    let t = papercheck::scalar_cm_product(m).map_err(err)?;
    let (scalar, nonscalar) = papercheck::scalar_cm_multiplications(&t, m).map_err(err)?;
    Ok(PyTorus::from_parts(t, vec![nonscalar, scalar]))
}

#[pyfunction]
fn random_torus(d: i64, seed: u64) -> PyResult<PyTorus> {
    let (t, mult) = papercheck::random_torus_with_sqrt_d(d, seed).map_err(err)?;
    Ok(PyTorus::from_parts(t, vec![mult]))
}

#[pymodule]
#[pyo3(name = "tori")]
fn tori_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTorus>()?;
    m.add_function(wrap_pyfunction!(example1, m)?)?;
    m.add_function(wrap_pyfunction!(example2, m)?)?;
    m.add_function(wrap_pyfunction!(scalar_cm_product, m)?)?;
    m.add_function(wrap_pyfunction!(random_torus, m)?)?;
    m.add("ToriError", m.py().get_type::<ToriError>())?;
    Ok(())
}
