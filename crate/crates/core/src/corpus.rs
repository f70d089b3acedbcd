//! Fixture programs with golden CLI outcomes.
//!
//! Each fixture pairs a program file under `fixtures/` with a `.golden`
//! file. Golden files are plain text, one item per line; blank lines and
//! lines starting with `#` are ignored:
//!
//! ```text
//! args: -x 1000 -n 3 -f 2 1 -t 1 grover.qcp   # CLI arguments, FILE last
//! exit: 0                                     # expected exit code
//! stdout-contains: BRANCHES: 1                # substring checks
//! stderr-contains: Program aborted.
//! branches: 1                                 # number of end branches
//! amplitude-tolerance: 1e-4
//! probability-tolerance: 1e-6
//! dust-probability: 1e-12                     # bound for rows expected at 0
//! |000⟩ 0.70710678 0.5                        # register amplitude probability
//! stat-tolerance: 1e-9
//! MISSES: 0                                   # test-mode statistics
//! ```
//!
//! Amplitude rows are compared against the first branch's final-state
//! table; amplitudes are real-valued in every shipped fixture. Values are
//! compared numerically, never as text.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::cli::main_with_args;

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub const GROVER_PROGRAM: &str = include_str!("../fixtures/grover.qcp");

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    /// Program file named by the invocation, if any.
    pub program_file: Option<&'static str>,
    pub golden: &'static str,
}

macro_rules! fixture {
    ($name:literal, $program:expr) => {
        Fixture {
            name: $name,
            program_file: $program,
            golden: include_str!(concat!("../fixtures/", $name, ".golden")),
        }
    };
}

/// Grover search: the four single-marked truth tables in execute mode plus
/// the full test-mode suite.
pub fn grover_fixtures() -> Vec<Fixture> {
    vec![
        fixture!("grover_1000", Some("grover.qcp")),
        fixture!("grover_0100", Some("grover.qcp")),
        fixture!("grover_0010", Some("grover.qcp")),
        fixture!("grover_0001", Some("grover.qcp")),
        fixture!("grover_suite", Some("grover.qcp")),
    ]
}

/// Program-reading and argument-handling fixtures, plus branching and
/// coverage programs.
pub fn smoke_fixtures() -> Vec<Fixture> {
    vec![
        fixture!("read_program_1", Some("quantum_program_1.qcp")),
        fixture!("read_program_2", Some("quantum_program_2.txt")),
        fixture!("read_program_5", Some("quantum_program_5.qcp")),
        fixture!("read_program_6", Some("quantum_program_6.qcp")),
        fixture!("read_program_7", Some("quantum_program_7.qcp")),
        fixture!("negative_index", Some("negative_index.qcp")),
        fixture!("args_bare_positionals", None),
        fixture!("args_cases_only", None),
        fixture!("args_full_test", Some("quantum_program_1.qcp")),
        fixture!("args_version", None),
        fixture!("branching", Some("branching.qcp")),
        fixture!("halt", Some("halt.qcp")),
        fixture!("all_instructions", Some("all_instructions.qcp")),
    ]
}

pub fn all_fixtures() -> Vec<Fixture> {
    let mut v = grover_fixtures();
    v.extend(smoke_fixtures());
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeRowSpec {
    pub label: String,
    pub amplitude: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Golden {
    pub args: Vec<String>,
    pub exit: i32,
    pub stdout_contains: Vec<String>,
    pub stderr_contains: Vec<String>,
    pub branches: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
    pub rows: Vec<AmplitudeRowSpec>,
    pub stats: Vec<(String, f64)>,
}

fn strip_comment(line: &str) -> &str {
    match line.find(" #") {
        Some(i) => &line[..i],
        None => line,
    }
    .trim()
}

impl Golden {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut g = Golden::default();
        for (n, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| format!("golden line {}: {msg}: `{raw}`", n + 1);
            if line.starts_with('|') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                let [label, amp, prob] = parts[..] else {
                    return Err(err("expected `REGISTER AMPLITUDE PROBABILITY`"));
                };
                g.rows.push(AmplitudeRowSpec {
                    label: label.to_string(),
                    amplitude: amp.parse().map_err(|_| err("bad amplitude"))?,
                    probability: prob.parse().map_err(|_| err("bad probability"))?,
                });
                continue;
            }
            let (key, value) = line.split_once(':').ok_or_else(|| err("expected `key: value`"))?;
            let value = value.trim();
            let number = || value.parse::<f64>().map_err(|_| err("expected a number"));
            match key {
                "args" => g.args = value.split_whitespace().map(str::to_string).collect(),
                "exit" => g.exit = value.parse().map_err(|_| err("bad exit code"))?,
                "stdout-contains" => g.stdout_contains.push(value.to_string()),
                "stderr-contains" => g.stderr_contains.push(value.to_string()),
                "branches" => g.branches = Some(value.parse().map_err(|_| err("bad branch count"))?),
                k if k.ends_with("-tolerance") || k == "dust-probability" => {
                    g.tolerances.insert(k.to_string(), number()?);
                }
                k if k.chars().all(|c| c.is_ascii_uppercase() || c == '-') => {
                    g.stats.push((k.to_string(), number()?));
                }
                _ => return Err(err("unknown key")),
            }
        }
        Ok(g)
    }

    fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub exit: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the CLI in-process. A trailing non-flag argument is taken as FILE
/// and resolved inside `dir`.
pub fn replay_args(args: &[String], dir: &Path) -> Replay {
    let mut args = args.to_vec();
    if let Some(last) = args.last_mut() {
        if !last.starts_with('-') {
            *last = dir.join(&*last).display().to_string();
        }
    }
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let exit = main_with_args(&args, &mut out, &mut err);
    Replay {
        exit,
        stdout: String::from_utf8_lossy(&out).into_owned(),
        stderr: String::from_utf8_lossy(&err).into_owned(),
    }
}

/// Parses the first `Final state:` table of an execute-mode report.
pub fn parse_final_table(stdout: &str) -> Vec<(String, f64, f64)> {
    let mut rows = Vec::new();
    let mut lines = stdout.lines().skip_while(|l| *l != "Final state:").skip(2);
    for line in lines.by_ref() {
        if !line.starts_with('|') {
            break;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if let [label, amp, prob] = parts[..] {
            let amp = amp.parse().unwrap_or(f64::NAN);
            let prob = prob.parse().unwrap_or(f64::NAN);
            rows.push((label.to_string(), amp, prob));
        }
    }
    rows
}

/// Checks a replay against its golden; returns every mismatch found.
pub fn check(golden: &Golden, replay: &Replay) -> Result<(), Vec<String>> {
    let mut problems = Vec::new();
    if replay.exit != golden.exit {
        problems.push(format!("exit code {} != expected {}", replay.exit, golden.exit));
    }
    for s in &golden.stdout_contains {
        if !replay.stdout.contains(s.as_str()) {
            problems.push(format!("stdout lacks `{s}`"));
        }
    }
    for s in &golden.stderr_contains {
        if !replay.stderr.contains(s.as_str()) {
            problems.push(format!("stderr lacks `{s}`"));
        }
    }
    if let Some(n) = golden.branches {
        let line = format!("BRANCHES: {n}\n");
        if !replay.stdout.contains(&line) {
            problems.push(format!("expected {n} branches"));
        }
    }
    if !golden.rows.is_empty() {
        let amp_tol = golden.tolerance("amplitude-tolerance", 1e-4);
        let prob_tol = golden.tolerance("probability-tolerance", 1e-6);
        let dust = golden.tolerance("dust-probability", 1e-12);
        let table = parse_final_table(&replay.stdout);
        if table.len() != golden.rows.len() {
            problems.push(format!("table has {} rows, expected {}", table.len(), golden.rows.len()));
        }
        for (want, (label, amp, prob)) in golden.rows.iter().zip(&table) {
            if &want.label != label {
                problems.push(format!("row {label} where {} expected", want.label));
            }
            if want.probability == 0.0 {
                if !(*prob < dust) {
                    problems.push(format!("{label}: probability {prob} not below {dust}"));
                }
            } else if !((prob - want.probability).abs() <= prob_tol) {
                problems.push(format!("{label}: probability {prob} vs {}", want.probability));
            }
            // printed amplitudes carry three significant digits
            let printed_tol = amp_tol.max(5e-4 * want.amplitude.abs());
            if !((amp - want.amplitude).abs() <= printed_tol) {
                problems.push(format!("{label}: amplitude {amp} vs {}", want.amplitude));
            }
        }
    }
    if !golden.stats.is_empty() {
        let tol = golden.tolerance("stat-tolerance", 1e-9);
        for (key, want) in &golden.stats {
            let prefix = format!("{key}: ");
            let got = replay
                .stdout
                .lines()
                .find_map(|l| l.strip_prefix(prefix.as_str()))
                .and_then(|v| v.trim().parse::<f64>().ok());
            match got {
                Some(v) if (v - want).abs() <= tol => {}
                other => problems.push(format!("{key}: got {other:?}, expected {want}")),
            }
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems)
    }
}

impl Fixture {
    pub fn golden(&self) -> Golden {
        Golden::parse(self.golden).unwrap_or_else(|e| panic!("fixture {}: {e}", self.name))
    }

    pub fn replay(&self) -> Replay {
        replay_args(&self.golden().args, &fixtures_dir())
    }

    pub fn verify(&self) -> Result<(), Vec<String>> {
        check(&self.golden(), &self.replay())
    }
}
