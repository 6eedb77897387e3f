//! Python bindings. Structured results cross the boundary as JSON and are
//! decoded with the standard `json` module.

use mirrorkit::ci_model::{build_cayley, derive_weights, validate, CiSpec};
use mirrorkit::pipeline::{self, exit_code_for, Command, OutputFormat, Report, EXIT_INVALID};
use mirrorkit::transposition::transpose_spec;
use mirrorkit::RationalMatrix;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(mirrorkit_py, MirrorError, PyException);

fn to_py(e: mirrorkit::Error) -> PyErr {
    if exit_code_for(&e) == EXIT_INVALID {
        PyValueError::new_err(e.to_string())
    } else {
        MirrorError::new_err(e.to_string())
    }
}

fn loads<'py>(py: Python<'py>, json: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (json,))
}

type StringMatrix = Vec<Vec<String>>;

fn matrix_strings(m: &RationalMatrix) -> StringMatrix {
    m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

/// A complete-intersection system: exponent rows and index sets per block.
#[pyclass(name = "Spec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpec {
    inner: CiSpec,
}

#[pymethods]
impl PySpec {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CiSpec::from_json(text).map(|inner| PySpec { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PyValueError::new_err(format!("{path}: {e}")))?;
        Self::from_json(&text)
    }

    /// The m-th member of the two-block family, m >= 3.
    #[staticmethod]
    fn family(m: usize) -> PyResult<Self> {
        pipeline::generate_family(m).map(|inner| PySpec { inner }).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn is_valid(&self) -> bool {
        validate(&self.inner).valid
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let report = serde_json::to_string(&validate(&self.inner)).expect("report serializes");
        loads(py, &report)
    }

    /// One weight vector per block.
    fn weights(&self) -> PyResult<Vec<Vec<u64>>> {
        derive_weights(&self.inner).map(|w| w.vectors).map_err(to_py)
    }

    /// Cayley matrix and its inverse, entries as strings such as "-2/147".
    fn cayley(&self) -> PyResult<(StringMatrix, StringMatrix)> {
        let cm = build_cayley(&self.inner).map_err(to_py)?;
        let inv = cm.inverse().map_err(to_py)?;
        Ok((matrix_strings(&cm.matrix), matrix_strings(&inv)))
    }

    fn transpose(&self) -> PyResult<PySpec> {
        transpose_spec(&self.inner).map(|t| PySpec { inner: t.tspec }).map_err(to_py)
    }

    fn __eq__(&self, other: &PySpec) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Spec(n={}, k={})", self.inner.n, self.inner.k)
    }
}

/// Outcome of one pipeline command.
#[pyclass(name = "Report", frozen)]
struct PyReport {
    inner: Report,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn command(&self) -> String {
        self.inner.command.to_string()
    }

    #[getter]
    fn exit_code(&self) -> i32 {
        self.inner.exit_code
    }

    #[getter]
    fn error(&self) -> Option<String> {
        self.inner.error.clone()
    }

    /// Name of the check that decided a nonzero exit code.
    fn decisive_failure(&self) -> Option<String> {
        self.inner.decisive_failure().map(|c| c.name.clone())
    }

    /// `(name, severity, passed)` for every check.
    fn checks(&self) -> Vec<(String, String, bool)> {
        self.inner
            .checks
            .iter()
            .map(|c| (c.name.clone(), format!("{:?}", c.severity).to_lowercase(), c.passed))
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_text(&self) -> String {
        self.inner.render(OutputFormat::Text)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        loads(py, &self.inner.to_json())
    }

    fn __repr__(&self) -> String {
        format!("Report(command={}, exit_code={})", self.inner.command, self.inner.exit_code)
    }
}

/// Runs `command` ("validate", "cayley", ..., "verify") on a `Spec`.
#[pyfunction]
#[pyo3(signature = (command, spec, order = 8, strict = false))]
fn run(command: &str, spec: &PySpec, order: usize, strict: bool) -> PyResult<PyReport> {
    let command: Command = command.parse().map_err(PyValueError::new_err)?;
    Ok(PyReport { inner: pipeline::run_spec(command, &spec.inner, order, strict) })
}

#[pyfunction]
#[pyo3(signature = (spec, order = 8, strict = false))]
fn verify(spec: &PySpec, order: usize, strict: bool) -> PyReport {
    PyReport { inner: pipeline::run_spec(Command::Verify, &spec.inner, order, strict) }
}

#[pyfunction]
fn commands() -> Vec<String> {
    Command::ALL.iter().map(ToString::to_string).collect()
}

#[pymodule]
pub fn mirrorkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpec>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(commands, m)?)?;
    m.add("MirrorError", m.py().get_type::<MirrorError>())?;
    Ok(())
}
