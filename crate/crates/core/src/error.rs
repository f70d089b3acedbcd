use std::fmt;

use thiserror::Error;

use crate::lexer::Position;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Lexical => f.write_str("lexical error"),
            ParseErrorKind::Syntax => f.write_str("syntax error"),
        }
    }
}

/// A positioned diagnostic from the tokenizer or parser.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at {pos}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: Position,
    pub message: String,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, pos: Position, message: impl Into<String>) -> Self {
        Self {
            kind,
            pos,
            message: message.into(),
        }
    }

    pub(crate) fn syntax(pos: Position, message: impl Into<String>) -> Self {
        Self::new(ParseErrorKind::Syntax, pos, message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("{instruction}: qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange {
        instruction: &'static str,
        index: i64,
        n_qubits: usize,
    },
    #[error("{instruction}: qubit {index} used more than once")]
    RepeatedQubit {
        instruction: &'static str,
        index: i64,
    },
    #[error("ORACLE with {inputs} inputs needs a truth table of length {expected}, got {actual}")]
    OracleArity {
        inputs: usize,
        expected: usize,
        actual: usize,
    },
    #[error("program calls ORACLE but no truth table was supplied")]
    MissingTruthTable,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("qubit count {n} outside supported range 1..={ceiling}")]
    QubitCount { n: usize, ceiling: usize },
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {0} appears more than once in target list")]
    DuplicateQubit(usize),
    #[error("gate `{name}` acts on {expected} qubits but {actual} targets were given")]
    TargetCount {
        name: String,
        expected: usize,
        actual: usize,
    },
    #[error("matrix `{name}` is not unitary (max |U^dagger U - I| = {deviation:e})")]
    NonUnitary { name: String, deviation: f64 },
    #[error("matrix `{name}` has {len} entries; expected {expected}")]
    MatrixShape {
        name: String,
        len: usize,
        expected: usize,
    },
    #[error("amplitudes have squared norm {norm}, expected 1")]
    NotNormalized { norm: f64 },
    #[error("cannot collapse qubit {qubit} to {value}: outcome has zero probability")]
    ZeroProbability { qubit: usize, value: u8 },
    #[error("truth table of length {len} does not match {inputs} oracle inputs")]
    TruthTableLength { len: usize, inputs: usize },
    #[error("invalid truth table `{0}`: expected a power-of-two number of 0/1 digits")]
    InvalidTruthTable(String),
    #[error("final-measurement value needs {bits} bits, more than supported")]
    TooManyReadQubits { bits: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("program calls ORACLE but the configuration has no truth table")]
    MissingTruthTable,
    #[error("oracle limit of {limit} exceeded on branch {branch}")]
    OracleLimitExceeded { limit: usize, branch: String },
    #[error("configured qubit count {config} differs from the validated program's {program}")]
    QubitCountMismatch { config: usize, program: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("test suite needs at least one case")]
    NoCases,
    #[error("all truth tables must have the same length ({expected}), found {actual}")]
    InconsistentTruthTables { expected: usize, actual: usize },
    #[error("desired output {desired} cannot be read from {bits} final qubits")]
    DesiredOutputOutOfRange { desired: u64, bits: usize },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Crate-level error, used where several stages are chained.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}
