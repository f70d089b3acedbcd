//! Test and execute modes.
//!
//! Test mode runs a program once per oracle truth table and scores the
//! integer read from the final measurement qubits against the desired
//! answer. Error probability is averaged over end branches by their path
//! probability, the same weighting used for expected oracle calls.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::engine::{expected_oracle_calls, run_program, AmplitudeSnapshot, ExecutionBranch, MeasurementEvent, SimulationConfig};
use crate::error::{HarnessError, StateError};
use crate::gates::TruthTable;
use crate::program::{validate_program, Program, ValidatedProgram};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub truth_table: TruthTable,
    pub desired_output: u64,
}

impl TestCase {
    pub fn new(truth_table: TruthTable, desired_output: u64) -> Self {
        Self {
            truth_table,
            desired_output,
        }
    }
}

/// `TT-OUTPUT`, e.g. `0100-1`.
impl FromStr for TestCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (tt, out) = s
            .split_once('-')
            .ok_or_else(|| format!("case `{s}` must look like TRUTHTABLE-OUTPUT, e.g. 0100-1"))?;
        let truth_table = TruthTable::parse(tt).map_err(|e| format!("case `{s}`: {e}"))?;
        if out.is_empty() || !out.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("case `{s}`: output `{out}` is not a non-negative integer"));
        }
        let desired_output = out.parse().map_err(|_| format!("case `{s}`: output `{out}` is too large"))?;
        Ok(Self {
            truth_table,
            desired_output,
        })
    }
}

impl fmt::Display for TestCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.truth_table, self.desired_output)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseOutcome {
    pub error_probability: f64,
    pub expected_oracles: f64,
    pub is_miss: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub misses: usize,
    pub max_error: f64,
    pub avg_error: f64,
    pub max_exp_oracles: f64,
    pub avg_exp_oracles: f64,
}

impl TestResult {
    /// Aggregates per-case outcomes.
    pub fn from_outcomes(outcomes: &[CaseOutcome]) -> Result<Self, HarnessError> {
        if outcomes.is_empty() {
            return Err(HarnessError::NoCases);
        }
        let n = outcomes.len() as f64;
        let max = |f: fn(&CaseOutcome) -> f64| outcomes.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        // summed in sorted order so the result does not depend on case order
        let mean = |f: fn(&CaseOutcome) -> f64| {
            let mut v: Vec<f64> = outcomes.iter().map(f).collect();
            v.sort_by(f64::total_cmp);
            v.iter().sum::<f64>() / n
        };
        Ok(Self {
            misses: outcomes.iter().filter(|o| o.is_miss).count(),
            max_error: max(|o| o.error_probability),
            avg_error: mean(|o| o.error_probability),
            max_exp_oracles: max(|o| o.expected_oracles),
            avg_exp_oracles: mean(|o| o.expected_oracles),
        })
    }
}

fn success_probability(branches: &[ExecutionBranch], final_qubits: &[usize], desired: u64) -> Result<f64, StateError> {
    let mut p = 0.0;
    for b in branches {
        let dist = b.state.read_distribution(final_qubits)?;
        p += b.probability * dist[desired as usize];
    }
    Ok(p)
}

/// Runs one case and scores it. `program` must already be validated
/// against `n_qubits` and the case's truth-table length.
pub fn evaluate_case(
    program: &ValidatedProgram,
    case: &TestCase,
    final_qubits: &[usize],
    threshold: f64,
) -> Result<CaseOutcome, HarnessError> {
    evaluate_case_with(program, case, final_qubits, threshold, &SimulationConfig::new(program.n_qubits()))
}

/// As [`evaluate_case`], with engine settings (oracle limit, pruning) taken
/// from `base`; its truth table is replaced by the case's.
pub fn evaluate_case_with(
    program: &ValidatedProgram,
    case: &TestCase,
    final_qubits: &[usize],
    threshold: f64,
    base: &SimulationConfig,
) -> Result<CaseOutcome, HarnessError> {
    let bits = final_qubits.len();
    if bits >= 64 || case.desired_output >= 1u64 << bits {
        return Err(HarnessError::DesiredOutputOutOfRange {
            desired: case.desired_output,
            bits,
        });
    }
    let mut cfg = base.clone();
    cfg.oracle_tt = Some(case.truth_table.clone());
    let branches = run_program(program, &cfg)?;
    let success = success_probability(&branches, final_qubits, case.desired_output)?;
    let error_probability = (1.0 - success).clamp(0.0, 1.0);
    Ok(CaseOutcome {
        error_probability,
        expected_oracles: expected_oracle_calls(&branches),
        is_miss: error_probability > threshold,
    })
}

/// Validates `program` against the suite and evaluates every case.
/// Cases run in parallel; aggregation follows the input order.
pub fn run_test_suite(
    program: &Program,
    n_qubits: usize,
    cases: &[TestCase],
    final_qubits: &[usize],
    threshold: f64,
) -> Result<TestResult, HarnessError> {
    run_test_suite_with(program, cases, final_qubits, threshold, &SimulationConfig::new(n_qubits))
}

pub fn run_test_suite_with(
    program: &Program,
    cases: &[TestCase],
    final_qubits: &[usize],
    threshold: f64,
    base: &SimulationConfig,
) -> Result<TestResult, HarnessError> {
    let first = cases.first().ok_or(HarnessError::NoCases)?;
    let tt_len = first.truth_table.len();
    if let Some(bad) = cases.iter().find(|c| c.truth_table.len() != tt_len) {
        return Err(HarnessError::InconsistentTruthTables {
            expected: tt_len,
            actual: bad.truth_table.len(),
        });
    }
    let validated = validate_program(program.clone(), base.n_qubits, Some(tt_len))?;
    let outcomes = cases
        .par_iter()
        .map(|case| evaluate_case_with(&validated, case, final_qubits, threshold, base))
        .collect::<Result<Vec<_>, _>>()?;
    TestResult::from_outcomes(&outcomes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchReport {
    pub probability: f64,
    pub history: Vec<MeasurementEvent>,
    pub halted: bool,
    pub oracle_calls: usize,
    pub printed: Vec<AmplitudeSnapshot>,
    pub final_amplitudes: AmplitudeSnapshot,
    /// Distribution over the final measurement qubits, when requested.
    pub final_distribution: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionReport {
    pub branches: Vec<BranchReport>,
    pub expected_oracles: f64,
}

/// One run of `program`, reporting every end branch.
pub fn execute_program(
    program: &ValidatedProgram,
    cfg: &SimulationConfig,
    final_qubits: Option<&[usize]>,
) -> Result<ExecutionReport, HarnessError> {
    let branches = run_program(program, cfg)?;
    let expected_oracles = expected_oracle_calls(&branches);
    let branches = branches
        .into_iter()
        .map(|b| {
            let final_distribution = final_qubits.map(|q| b.state.read_distribution(q)).transpose()?;
            Ok(BranchReport {
                probability: b.probability,
                final_amplitudes: AmplitudeSnapshot::of(&b.state),
                history: b.history,
                halted: b.halted,
                oracle_calls: b.oracle_calls,
                printed: b.snapshots,
                final_distribution,
            })
        })
        .collect::<Result<Vec<_>, StateError>>()?;
    Ok(ExecutionReport {
        branches,
        expected_oracles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn validated(src: &str, n: usize, tt_len: Option<usize>) -> ValidatedProgram {
        validate_program(Program::parse(src).unwrap(), n, tt_len).unwrap()
    }

    fn case(s: &str) -> TestCase {
        s.parse().unwrap()
    }

    #[test]
    fn case_syntax() {
        let c = case("0100-1");
        assert_eq!(c.truth_table.bits(), &[0, 1, 0, 0]);
        assert_eq!(c.desired_output, 1);
        assert_eq!(c.to_string(), "0100-1");
        for bad in ["0100", "0100-", "010-1", "01x0-1", "0100--1", "0100-a", "-1"] {
            assert!(bad.parse::<TestCase>().is_err(), "{bad}");
        }
    }

    #[test]
    fn empty_program_has_no_error() {
        let p = validated("", 1, Some(2));
        let out = evaluate_case(&p, &case("00-0"), &[0], 0.48).unwrap();
        assert_eq!(out.error_probability, 0.0);
        assert_eq!(out.expected_oracles, 0.0);
        assert!(!out.is_miss);
    }

    #[test]
    fn coin_flip_is_a_miss() {
        let p = validated("(HADAMARD 0)", 1, Some(2));
        let out = evaluate_case(&p, &case("00-0"), &[0], 0.48).unwrap();
        assert_abs_diff_eq!(out.error_probability, 0.5, epsilon = 1e-12);
        assert!(out.is_miss);

        let r = run_test_suite(&Program::parse("(HADAMARD 0)").unwrap(), 1, &[case("00-0")], &[0], 0.48).unwrap();
        assert_eq!(r.misses, 1);
        assert_abs_diff_eq!(r.max_error, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.avg_error, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn branch_weighted_error() {
        // measure a |+> qubit, then flip it back to 1 on the 0 branch
        let src = "(HADAMARD 0)(MEASURE 0)(END)(QNOT 0)(END)";
        let p = validated(src, 1, Some(2));
        let out = evaluate_case(&p, &case("00-1"), &[0], 0.48).unwrap();
        assert_abs_diff_eq!(out.error_probability, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn oracle_counts() {
        let src = "(ORACLE 1 0)";
        let r = run_test_suite(&Program::parse(src).unwrap(), 2, &[case("01-0"), case("10-0")], &[1], 0.48).unwrap();
        assert_eq!(r.max_exp_oracles, 1.0);
        assert_eq!(r.avg_exp_oracles, 1.0);
        assert_eq!(r.misses, 0);
    }

    #[test]
    fn suite_errors() {
        let p = Program::parse("(QNOT 0)").unwrap();
        assert_eq!(run_test_suite(&p, 1, &[], &[0], 0.5).unwrap_err(), HarnessError::NoCases);
        assert!(matches!(
            run_test_suite(&p, 1, &[case("01-0"), case("0110-0")], &[0], 0.5).unwrap_err(),
            HarnessError::InconsistentTruthTables { .. }
        ));
        assert!(matches!(
            run_test_suite(&p, 1, &[case("01-2")], &[0], 0.5).unwrap_err(),
            HarnessError::DesiredOutputOutOfRange { desired: 2, bits: 1 }
        ));
        let oracle = Program::parse("(ORACLE 2 1 0)").unwrap();
        assert!(matches!(
            run_test_suite(&oracle, 3, &[case("01-0")], &[0], 0.5).unwrap_err(),
            HarnessError::Validation(_)
        ));
    }

    #[test]
    fn execute_reports() {
        let p = validated("(HADAMARD 0)(MEASURE 0)(END)(END)", 1, None);
        let r = execute_program(&p, &SimulationConfig::new(1), Some(&[0])).unwrap();
        assert_eq!(r.branches.len(), 2);
        assert_eq!(r.branches[0].history[0].qubit, 0);
        assert_eq!(r.branches[0].history[0].outcome, 1);
        assert_abs_diff_eq!(r.branches[0].history[0].probability, 0.5, epsilon = 1e-12);
        assert_eq!(r.branches[1].history[0].outcome, 0);
        assert_eq!(r.branches[0].final_distribution.as_deref(), Some(&[0.0, 1.0][..]));

        let p = validated("(PRINTAMPS)", 2, None);
        let r = execute_program(&p, &SimulationConfig::new(2), None).unwrap();
        let snap = &r.branches[0].printed[0];
        assert_eq!(snap.rows[0].label, "|00⟩");
        assert_eq!(snap.rows[0].amplitude.re, 1.0);
        assert_eq!(r.expected_oracles, 0.0);
    }
}
