//! Command-line front end.
//!
//! ```text
//! qgame (-c CASE... | -x TT) -n N -f Q... [-t T] FILE
//! qgame -v
//! qgame -h
//! ```
//!
//! Exit codes: 0 success, 1 usage, 2 I/O error, 3 syntax or validation
//! error, 4 runtime error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use crate::engine::SimulationConfig;
use crate::format::{format_amplitude_table, format_real, format_statistic, format_test_result};
use crate::gates::TruthTable;
use crate::harness::{execute_program, run_test_suite_with, ExecutionReport, TestCase};
use crate::program::{validate_program, Program};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const USAGE: &str = "Usage: qgame [OPTIONS] FILE ...";

pub const HELP: &str = "\
Usage: qgame [OPTIONS] FILE ...

Quantum gate and measurement emulator.

Test mode:     qgame -c CASE... -n N -f Q... -t T FILE
Execute mode:  qgame -x TT -n N [-f Q...] [-t T] FILE

Options:
  -c CASE...  test cases TT-OUTPUT, e.g. 1000-0 0100-1 (truth table bits, dash, answer)
  -x TT       oracle truth table for a single execution, e.g. 1000
  -n N        number of qubits to simulate
  -f Q...     final measurement qubits, most significant first
  -t T        error threshold for counting a case as a miss (ignored in execute mode)
  -v          print version
  -h          print this help

Examples:
  qgame -c 1000-0 0100-1 0010-2 0001-3 -n 3 -f 2 1 -t 0.48 grover.qcp
  qgame -x 1000 -n 3 -f 2 1 grover.qcp

Notes:
  A negative or out-of-range qubit index such as (HADAMARD -2) is rejected
  before simulation with a validation error (exit 3).

Exit codes: 0 ok, 1 usage, 2 I/O error, 3 syntax/validation error, 4 runtime error.
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Test,
    Execute,
    Version,
    Help,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliInvocation {
    pub mode: Mode,
    pub cases: Vec<TestCase>,
    pub oracle_tt: Option<TruthTable>,
    pub n_qubits: Option<usize>,
    pub final_qubits: Vec<usize>,
    pub threshold: Option<f64>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Io(String),
    Syntax(String),
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Syntax(_) | CliError::Validation(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    /// Diagnostic text for stderr.
    pub fn report(&self) -> String {
        match self {
            CliError::Usage(msg) => format!("{msg}\n{USAGE}\n"),
            CliError::Io(msg) => format!("I/O Error: {msg}\nProgram aborted.\n"),
            CliError::Syntax(msg) => format!("Syntax error: {msg}\nProgram aborted.\n"),
            CliError::Validation(msg) => format!("Validation error: {msg}\nProgram aborted.\n"),
            CliError::Runtime(msg) => format!("Runtime error: {msg}\nProgram aborted.\n"),
        }
    }
}

fn is_flag(tok: &str) -> bool {
    tok.starts_with("--") || (tok.len() >= 2 && tok.starts_with('-') && tok.as_bytes()[1].is_ascii_alphabetic())
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses arguments (without the program name).
///
/// `-c` takes every following non-flag token. When nothing else is left to
/// serve as FILE, the last token taken by `-c` becomes FILE.
pub fn parse_args<I, S>(args: I) -> Result<CliInvocation, CliError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let args: Vec<String> = args.into_iter().map(|s| s.as_ref().to_string()).collect();
    if args.is_empty() {
        return Err(usage("no arguments given"));
    }

    let mut case_tokens: Option<Vec<String>> = None;
    let mut tt_token: Option<String> = None;
    let mut n_qubits = None;
    let mut final_qubits: Option<Vec<usize>> = None;
    let mut threshold = None;
    let mut positionals = Vec::new();
    let mut mode_flag = None;

    let mut it = args.iter().peekable();
    while let Some(tok) = it.next() {
        let mut value = |flag: &str| {
            it.next()
                .filter(|v| !is_flag(v))
                .cloned()
                .ok_or_else(|| usage(format!("option {flag} needs a value")))
        };
        match tok.as_str() {
            "-c" => {
                let list = case_tokens.get_or_insert_with(Vec::new);
                while let Some(v) = it.next_if(|v| !is_flag(v)) {
                    list.push(v.clone());
                }
            }
            "-x" => tt_token = Some(value("-x")?),
            "-n" => {
                let v = value("-n")?;
                n_qubits = Some(
                    v.parse::<usize>()
                        .map_err(|_| usage(format!("-n expects a qubit count, got `{v}`")))?,
                );
            }
            "-t" => {
                let v = value("-t")?;
                let t: f64 = v
                    .parse()
                    .ok()
                    .filter(|t: &f64| t.is_finite())
                    .ok_or_else(|| usage(format!("-t expects a number, got `{v}`")))?;
                threshold = Some(t);
            }
            "-f" => {
                let list = final_qubits.get_or_insert_with(Vec::new);
                while let Some(v) = it.next_if(|v| !is_flag(v) && v.parse::<usize>().is_ok()) {
                    list.push(v.parse().expect("checked"));
                }
                if list.is_empty() {
                    return Err(usage("-f expects one or more qubit indices"));
                }
            }
            "-v" | "--version" => mode_flag = mode_flag.or(Some(Mode::Version)),
            "-h" | "--help" => mode_flag = mode_flag.or(Some(Mode::Help)),
            flag if is_flag(flag) => return Err(usage(format!("unknown option `{flag}`"))),
            _ => positionals.push(tok.clone()),
        }
    }

    if let Some(mode) = mode_flag {
        return Ok(CliInvocation {
            mode,
            cases: Vec::new(),
            oracle_tt: None,
            n_qubits,
            final_qubits: final_qubits.unwrap_or_default(),
            threshold,
            file: None,
        });
    }

    if positionals.len() > 1 {
        return Err(usage(format!("unexpected argument `{}`", positionals[0])));
    }
    let mut file = positionals.pop();
    if file.is_none() {
        if let Some(list) = case_tokens.as_mut() {
            file = list.pop();
        }
    }
    let file = file.ok_or_else(|| usage("missing FILE"))?;

    let had_cases = case_tokens.is_some();
    if had_cases && tt_token.is_some() {
        return Err(usage("-c and -x cannot be combined"));
    }
    let cases = case_tokens
        .unwrap_or_default()
        .iter()
        .map(|t| t.parse::<TestCase>().map_err(usage))
        .collect::<Result<Vec<_>, _>>()?;
    let oracle_tt = tt_token
        .map(|t| TruthTable::parse(&t).map_err(|e| usage(format!("-x: {e}"))))
        .transpose()?;
    let mode = if had_cases { Mode::Test } else { Mode::Execute };

    Ok(CliInvocation {
        mode,
        cases,
        oracle_tt,
        n_qubits,
        final_qubits: final_qubits.unwrap_or_default(),
        threshold,
        file: Some(PathBuf::from(file)),
    })
}

fn load(inv: &CliInvocation) -> Result<(String, String), CliError> {
    let path = inv.file.as_ref().ok_or_else(|| usage("missing FILE"))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read `{}`: {e}", path.display())))?;
    Ok((path.display().to_string(), text))
}

fn require_qubits(inv: &CliInvocation) -> Result<usize, CliError> {
    match inv.n_qubits {
        None => Err(usage("missing -n (number of qubits)")),
        Some(0) => Err(usage("-n must be at least 1")),
        Some(n) => Ok(n),
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

/// Runs a parsed invocation and returns stdout text.
pub fn run(inv: &CliInvocation) -> Result<String, CliError> {
    match inv.mode {
        Mode::Version => return Ok(format!("qgame {VERSION}\n")),
        Mode::Help => return Ok(HELP.to_string()),
        Mode::Test | Mode::Execute => {}
    }
    let (name, text) = load(inv)?;
    let n = require_qubits(inv)?;
    if inv.mode == Mode::Test {
        if inv.final_qubits.is_empty() {
            return Err(usage("missing -f (final measurement qubits)"));
        }
        if inv.cases.is_empty() {
            return Err(usage("missing test cases after -c"));
        }
        if inv.threshold.is_none() {
            return Err(usage("missing -t (threshold)"));
        }
    }
    let program = Program::parse(&text)
        .map_err(|e| CliError::Syntax(e.to_string()))?
        .with_source_name(name.clone());

    match inv.mode {
        Mode::Test => run_test_mode(inv, &program, &name, n),
        _ => run_execute_mode(inv, program, &name, n),
    }
}

fn run_test_mode(inv: &CliInvocation, program: &Program, name: &str, n: usize) -> Result<String, CliError> {
    let threshold = inv.threshold.expect("checked by caller");
    let tt_len = inv.cases[0].truth_table.len();
    // surface validation problems with their own diagnostic class
    validate_program(program.clone(), n, Some(tt_len)).map_err(|e| CliError::Validation(e.to_string()))?;
    let result = run_test_suite_with(program, &inv.cases, &inv.final_qubits, threshold, &SimulationConfig::new(n))
        .map_err(|e| match e {
            crate::error::HarnessError::Validation(v) => CliError::Validation(v.to_string()),
            crate::error::HarnessError::DesiredOutputOutOfRange { .. }
            | crate::error::HarnessError::InconsistentTruthTables { .. } => usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        })?;
    let mut out = format_test_result(&result);
    let _ = write!(
        out,
        "\nCASES: {}\nQUBITS: {n}\nFINAL-QUBITS: {}\nTHRESHOLD: {}\nPROGRAM: {name}\n",
        join(&inv.cases),
        join(&inv.final_qubits),
        format_statistic(threshold),
    );
    Ok(out)
}

fn run_execute_mode(inv: &CliInvocation, program: Program, name: &str, n: usize) -> Result<String, CliError> {
    let tt_len = inv.oracle_tt.as_ref().map(TruthTable::len);
    let validated = validate_program(program, n, tt_len).map_err(|e| CliError::Validation(e.to_string()))?;
    let mut cfg = SimulationConfig::new(n);
    cfg.oracle_tt = inv.oracle_tt.clone();
    let final_qubits = (!inv.final_qubits.is_empty()).then_some(inv.final_qubits.as_slice());
    let report = execute_program(&validated, &cfg, final_qubits).map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(render_report(inv, validated.program(), &report, name, n))
}

fn render_report(inv: &CliInvocation, program: &Program, report: &ExecutionReport, name: &str, n: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "PROGRAM: {name}");
    let _ = writeln!(out, "QUBITS: {n}");
    if let Some(tt) = &inv.oracle_tt {
        let _ = writeln!(out, "ORACLE: {tt}");
    }
    if !inv.final_qubits.is_empty() {
        let _ = writeln!(out, "FINAL-QUBITS: {}", join(&inv.final_qubits));
    }
    let _ = writeln!(out, "BRANCHES: {}", report.branches.len());
    let _ = writeln!(out, "EXPECTED-ORACLES: {}", format_statistic(report.expected_oracles));
    let _ = write!(out, "\n{program}");

    for (i, b) in report.branches.iter().enumerate() {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "Branch {}: probability {}, oracle calls {}{}",
            i + 1,
            format_real(b.probability),
            b.oracle_calls,
            if b.halted { ", halted" } else { "" }
        );
        let history = if b.history.is_empty() {
            "(none)".to_string()
        } else {
            b.history
                .iter()
                .map(|e| format!("q{}->{} (p={})", e.qubit, e.outcome, format_real(e.probability)))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let _ = writeln!(out, "Measurement history: {history}");
        for (k, snap) in b.printed.iter().enumerate() {
            let _ = writeln!(out, "PRINTAMPS #{}:", k + 1);
            out.push_str(&format_amplitude_table(snap));
        }
        let _ = writeln!(out, "Final state:");
        out.push_str(&format_amplitude_table(&b.final_amplitudes));
        if let Some(dist) = &b.final_distribution {
            let values = dist
                .iter()
                .enumerate()
                .map(|(v, p)| format!("{v}:{}", format_real(*p)))
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(out, "Final measurement: {values}");
        }
    }
    out
}

/// Full CLI entry point; returns the process exit code.
pub fn main_with_args<I, S>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let outcome = parse_args(args).and_then(|inv| run(&inv));
    match outcome {
        Ok(text) => {
            let _ = stdout.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = stderr.write_all(e.report().as_bytes());
            e.exit_code()
        }
    }
}
