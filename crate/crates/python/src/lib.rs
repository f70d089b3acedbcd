//! Python bindings for the qgame emulator.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qgame_core::harness::BranchReport;
use qgame_core::{HarnessError, SimulationConfig, TestCase, TruthTable};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn harness_error(e: HarnessError) -> PyErr {
    match e {
        HarnessError::Sim(e) => PyRuntimeError::new_err(e.to_string()),
        other => value_error(other),
    }
}

fn config(n_qubits: usize, oracle: Option<&str>, oracle_limit: Option<usize>) -> PyResult<SimulationConfig> {
    let mut cfg = SimulationConfig::new(n_qubits);
    if let Some(tt) = oracle {
        cfg = cfg.with_oracle(TruthTable::parse(tt).map_err(value_error)?);
    }
    if let Some(limit) = oracle_limit {
        cfg = cfg.with_oracle_limit(limit);
    }
    Ok(cfg)
}

/// A parsed QGAME program.
#[pyclass(frozen, module = "qgame")]
struct Program {
    inner: qgame_core::Program,
}

#[pymethods]
impl Program {
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        let inner = qgame_core::Program::parse(source).map_err(value_error)?;
        Ok(Program { inner })
    }

    /// Names of the top-level instructions, in order.
    fn instruction_names(&self) -> Vec<&'static str> {
        self.inner.instructions.iter().map(|i| i.name()).collect()
    }

    #[getter]
    fn uses_oracle(&self) -> bool {
        self.inner.uses_oracle()
    }

    fn __len__(&self) -> usize {
        self.inner.instructions.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("<qgame.Program with {} instructions>", self.inner.instructions.len())
    }
}

#[pyclass(frozen, get_all, module = "qgame")]
struct TestResult {
    misses: usize,
    max_error: f64,
    avg_error: f64,
    max_exp_oracles: f64,
    avg_exp_oracles: f64,
}

#[pymethods]
impl TestResult {
    fn __repr__(&self) -> String {
        format!(
            "TestResult(misses={}, max_error={:e}, avg_error={:e}, max_exp_oracles={}, avg_exp_oracles={})",
            self.misses, self.max_error, self.avg_error, self.max_exp_oracles, self.avg_exp_oracles
        )
    }
}

/// One end branch of an execution.
#[pyclass(frozen, get_all, module = "qgame")]
struct Branch {
    probability: f64,
    /// `(qubit, outcome, probability)` per measurement taken.
    history: Vec<(usize, u8, f64)>,
    halted: bool,
    oracle_calls: usize,
    amplitudes: Vec<Complex64>,
    distribution: Option<Vec<f64>>,
}

impl From<BranchReport> for Branch {
    fn from(b: BranchReport) -> Self {
        Branch {
            probability: b.probability,
            history: b.history.iter().map(|e| (e.qubit, e.outcome, e.probability)).collect(),
            halted: b.halted,
            oracle_calls: b.oracle_calls,
            amplitudes: b.final_amplitudes.rows.iter().map(|r| r.amplitude).collect(),
            distribution: b.final_distribution,
        }
    }
}

#[pymethods]
impl Branch {
    fn __repr__(&self) -> String {
        format!("Branch(probability={}, history={:?}, halted={})", self.probability, self.history, self.halted)
    }
}

/// Runs `program` once and returns every end branch.
#[pyfunction]
#[pyo3(signature = (program, n_qubits, oracle=None, final_qubits=None, oracle_limit=None))]
fn execute(
    program: &Program,
    n_qubits: usize,
    oracle: Option<&str>,
    final_qubits: Option<Vec<usize>>,
    oracle_limit: Option<usize>,
) -> PyResult<Vec<Branch>> {
    let tt_len = oracle.map(|t| t.trim().len());
    let validated =
        qgame_core::validate_program(program.inner.clone(), n_qubits, tt_len).map_err(value_error)?;
    let cfg = config(n_qubits, oracle, oracle_limit)?;
    let report = qgame_core::execute_program(&validated, &cfg, final_qubits.as_deref()).map_err(harness_error)?;
    Ok(report.branches.into_iter().map(Branch::from).collect())
}

/// Scores `program` on cases written as `"TT-OUT"`, e.g. `"1000-0"`.
#[pyfunction]
#[pyo3(signature = (program, n_qubits, cases, final_qubits, threshold, oracle_limit=None))]
fn run_test_suite(
    program: &Program,
    n_qubits: usize,
    cases: Vec<String>,
    final_qubits: Vec<usize>,
    threshold: f64,
    oracle_limit: Option<usize>,
) -> PyResult<TestResult> {
    let cases = cases
        .iter()
        .map(|c| c.parse::<TestCase>().map_err(PyValueError::new_err))
        .collect::<PyResult<Vec<_>>>()?;
    let base = config(n_qubits, None, oracle_limit)?;
    let r = qgame_core::harness::run_test_suite_with(&program.inner, &cases, &final_qubits, threshold, &base)
        .map_err(harness_error)?;
    Ok(TestResult {
        misses: r.misses,
        max_error: r.max_error,
        avg_error: r.avg_error,
        max_exp_oracles: r.max_exp_oracles,
        avg_exp_oracles: r.avg_exp_oracles,
    })
}

/// Runs the command-line front end; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = qgame_core::cli::main_with_args(&args, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}

#[pyfunction]
fn grover_source() -> &'static str {
    qgame_core::corpus::GROVER_PROGRAM
}

#[pymodule]
fn qgame(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Program>()?;
    m.add_class::<TestResult>()?;
    m.add_class::<Branch>()?;
    m.add_function(wrap_pyfunction!(execute, m)?)?;
    m.add_function(wrap_pyfunction!(run_test_suite, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add_function(wrap_pyfunction!(grover_source, m)?)?;
    Ok(())
}
