//! Quantum gate and measurement emulator.
//!
//! Parses QGAME programs, simulates them on a state vector with exhaustive
//! measurement branching, and scores them against oracle test cases.
//!
//! ```
//! use qgame_core::{run_test_suite, Program, TestCase};
//!
//! let program = Program::parse(qgame_core::corpus::GROVER_PROGRAM).unwrap();
//! let cases: Vec<TestCase> = ["1000-0", "0100-1", "0010-2", "0001-3"]
//!     .iter()
//!     .map(|c| c.parse().unwrap())
//!     .collect();
//! let result = run_test_suite(&program, 3, &cases, &[2, 1], 0.48).unwrap();
//! assert_eq!(result.misses, 0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x <= tol)` also rejects NaN

pub mod cli;
pub mod corpus;
pub mod engine;
pub mod error;
pub mod format;
pub mod gates;
pub mod harness;
pub mod lexer;
pub mod program;
pub mod state;

pub use engine::{
    expected_oracle_calls, run_program, step, AmplitudeSnapshot, ExecutionBranch, MeasurementEvent, Simulation,
    SimulationConfig,
};
pub use error::{Error, HarnessError, ParseError, SimError, StateError, ValidationError};
pub use gates::{GateMatrix, TruthTable};
pub use harness::{evaluate_case, execute_program, run_test_suite, CaseOutcome, ExecutionReport, TestCase, TestResult};
pub use lexer::{tokenize, Token, TokenKind};
pub use program::{parse_angle, parse_program, validate_program, Angle, Instruction, Program, ValidatedProgram};
pub use state::{ComplexAmp, QuantumState};
