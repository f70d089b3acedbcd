//! QGAME program syntax: instruction tree, parser, validation and printing.
//!
//! A program is a sequence of parenthesized forms. A measurement form opens
//! two branch bodies, each closed by an `(END)` form:
//!
//! ```text
//! (MEASURE q) ...outcome-1 body... (END) ...outcome-0 body... (END)
//! ```
//!
//! `MEASURED` is accepted as a synonym. ORACLE takes an optional `ORACLE-TT`
//! placeholder before its qubit list, followed by the input qubits (most
//! significant row bit first) and the output qubit.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{ParseError, ParseErrorKind, ValidationError};
use crate::lexer::{tokenize, Position, Token, TokenKind};

/// Deepest permitted nesting of measurement forms.
pub const MAX_MEASURE_DEPTH: usize = 256;

/// Symbol allowed (and ignored) in the first ORACLE operand slot.
pub const ORACLE_PLACEHOLDER: &str = "ORACLE-TT";

/// A gate parameter in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(pub f64);

impl Angle {
    pub fn radians(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Debug output of f64 is the shortest round-tripping literal.
        write!(f, "{:?}", self.0)
    }
}

/// One QGAME instruction. Qubit indices are kept signed so that a negative
/// index in the source survives parsing and is reported by
/// [`validate_program`] against the register size.
#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Qnot { q: i64 },
    Cnot { control: i64, target: i64 },
    Srn { q: i64 },
    Hadamard { q: i64 },
    UTheta { q: i64, theta: Angle },
    U2 { q: i64, phi: Angle, theta: Angle, psi: Angle, alpha: Angle },
    Cphase { control: i64, target: i64, alpha: Angle },
    Swap { q1: i64, q2: i64 },
    Oracle { inputs: Vec<i64>, output: i64 },
    Measure { q: i64, branch1: Vec<Instruction>, branch0: Vec<Instruction> },
    Halt,
    Printamps,
}

impl Instruction {
    pub fn name(&self) -> &'static str {
        match self {
            Instruction::Qnot { .. } => "QNOT",
            Instruction::Cnot { .. } => "CNOT",
            Instruction::Srn { .. } => "SRN",
            Instruction::Hadamard { .. } => "HADAMARD",
            Instruction::UTheta { .. } => "U-THETA",
            Instruction::U2 { .. } => "U2",
            Instruction::Cphase { .. } => "CPHASE",
            Instruction::Swap { .. } => "SWAP",
            Instruction::Oracle { .. } => "ORACLE",
            Instruction::Measure { .. } => "MEASURE",
            Instruction::Halt => "HALT",
            Instruction::Printamps => "PRINTAMPS",
        }
    }

    /// Qubits named directly by this instruction (not its branch bodies).
    pub fn qubits(&self) -> Vec<i64> {
        match self {
            Instruction::Qnot { q }
            | Instruction::Srn { q }
            | Instruction::Hadamard { q }
            | Instruction::UTheta { q, .. }
            | Instruction::U2 { q, .. }
            | Instruction::Measure { q, .. } => vec![*q],
            Instruction::Cnot { control, target } | Instruction::Cphase { control, target, .. } => {
                vec![*control, *target]
            }
            Instruction::Swap { q1, q2 } => vec![*q1, *q2],
            Instruction::Oracle { inputs, output } => {
                let mut v = inputs.clone();
                v.push(*output);
                v
            }
            Instruction::Halt | Instruction::Printamps => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub instructions: Vec<Instruction>,
    pub source_name: String,
}

impl Program {
    pub fn new(instructions: Vec<Instruction>) -> Self {
        Self {
            instructions,
            source_name: String::new(),
        }
    }

    pub fn with_source_name(mut self, name: impl Into<String>) -> Self {
        self.source_name = name.into();
        self
    }

    /// Tokenize and parse `text` in one go.
    pub fn parse(text: &str) -> Result<Program, ParseError> {
        parse_program(&tokenize(text)?)
    }

    /// Visits every instruction, including those nested in branch bodies.
    pub fn visit(&self, f: &mut impl FnMut(&Instruction)) {
        fn walk(list: &[Instruction], f: &mut impl FnMut(&Instruction)) {
            for instr in list {
                f(instr);
                if let Instruction::Measure { branch1, branch0, .. } = instr {
                    walk(branch1, f);
                    walk(branch0, f);
                }
            }
        }
        walk(&self.instructions, f);
    }

    pub fn oracle_input_counts(&self) -> Vec<usize> {
        let mut counts = Vec::new();
        self.visit(&mut |i| {
            if let Instruction::Oracle { inputs, .. } = i {
                counts.push(inputs.len());
            }
        });
        counts
    }

    pub fn uses_oracle(&self) -> bool {
        !self.oracle_input_counts().is_empty()
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, list: &[Instruction], depth: usize) -> fmt::Result {
    for instr in list {
        let indent = "  ".repeat(depth);
        match instr {
            Instruction::Measure { q, branch1, branch0 } => {
                writeln!(f, "{indent}(MEASURE {q})")?;
                write_list(f, branch1, depth + 1)?;
                writeln!(f, "{indent}(END)")?;
                write_list(f, branch0, depth + 1)?;
                writeln!(f, "{indent}(END)")?;
            }
            other => writeln!(f, "{indent}{other}")?,
        }
    }
    Ok(())
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Qnot { q } => write!(f, "(QNOT {q})"),
            Instruction::Cnot { control, target } => write!(f, "(CNOT {control} {target})"),
            Instruction::Srn { q } => write!(f, "(SRN {q})"),
            Instruction::Hadamard { q } => write!(f, "(HADAMARD {q})"),
            Instruction::UTheta { q, theta } => write!(f, "(U-THETA {q} {theta})"),
            Instruction::U2 { q, phi, theta, psi, alpha } => {
                write!(f, "(U2 {q} {phi} {theta} {psi} {alpha})")
            }
            Instruction::Cphase { control, target, alpha } => {
                write!(f, "(CPHASE {control} {target} {alpha})")
            }
            Instruction::Swap { q1, q2 } => write!(f, "(SWAP {q1} {q2})"),
            Instruction::Oracle { inputs, output } => {
                write!(f, "(ORACLE {ORACLE_PLACEHOLDER}")?;
                for q in inputs {
                    write!(f, " {q}")?;
                }
                write!(f, " {output})")
            }
            Instruction::Measure { .. } => write_list(f, std::slice::from_ref(self), 0),
            Instruction::Halt => f.write_str("(HALT)"),
            Instruction::Printamps => f.write_str("(PRINTAMPS)"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.instructions, 0)
    }
}

/// Reads an angle operand: a decimal literal or `[-]PI[/k]` with `k` a
/// positive integer.
pub fn parse_angle(token: &Token) -> Result<Angle, ParseError> {
    let lexical = |msg: String| ParseError::new(ParseErrorKind::Lexical, token.pos, msg);
    match token.kind {
        TokenKind::Number => {
            let v: f64 = token
                .text
                .parse()
                .map_err(|_| lexical(format!("malformed number `{}`", token.text)))?;
            if !v.is_finite() {
                return Err(lexical(format!("angle `{}` is not finite", token.text)));
            }
            Ok(Angle(v))
        }
        TokenKind::Symbol => {
            let (sign, rest) = match token.text.strip_prefix('-') {
                Some(rest) => (-1.0, rest),
                None => (1.0, token.text.as_str()),
            };
            let Some(after_pi) = rest.strip_prefix("PI") else {
                return Err(ParseError::syntax(
                    token.pos,
                    format!("expected an angle, found `{}`", token.text),
                ));
            };
            if after_pi.is_empty() {
                return Ok(Angle(sign * PI));
            }
            let denom = after_pi
                .strip_prefix('/')
                .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                .and_then(|d| d.parse::<u64>().ok())
                .filter(|&k| k > 0)
                .ok_or_else(|| {
                    lexical(format!(
                        "angle `{}` must have the form [-]PI or [-]PI/k with k a positive integer",
                        token.text
                    ))
                })?;
            Ok(Angle(sign * PI / denom as f64))
        }
        _ => Err(ParseError::syntax(token.pos, "expected an angle")),
    }
}

enum Form {
    Instr(Instruction),
    Measure { q: i64, pos: Position },
    End,
}

struct Parser<'t> {
    tokens: &'t [Token],
    next: usize,
    eof: Position,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.next)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.next);
        self.next += 1;
        t
    }

    fn here(&self) -> Position {
        self.peek().map_or(self.eof, |t| t.pos)
    }

    /// Parses forms until an `(END)` (when inside a measurement) or the end
    /// of input (at top level).
    fn block(&mut self, measure_at: Option<Position>, depth: usize) -> Result<Vec<Instruction>, ParseError> {
        let mut out = Vec::new();
        loop {
            if self.peek().is_none() {
                return match measure_at {
                    None => Ok(out),
                    Some(pos) => Err(ParseError::syntax(
                        self.eof,
                        format!("missing (END) for measurement opened at {pos}"),
                    )),
                };
            }
            let start = self.here();
            match self.form()? {
                Form::Instr(i) => out.push(i),
                Form::Measure { q, pos } => out.push(self.measurement(q, pos, depth)?),
                Form::End if measure_at.is_some() => return Ok(out),
                Form::End => {
                    return Err(ParseError::syntax(start, "(END) outside of a measurement"));
                }
            }
        }
    }

    fn measurement(&mut self, q: i64, pos: Position, depth: usize) -> Result<Instruction, ParseError> {
        if depth >= MAX_MEASURE_DEPTH {
            return Err(ParseError::syntax(pos, format!("measurements nested deeper than {MAX_MEASURE_DEPTH}")));
        }
        let branch1 = self.block(Some(pos), depth + 1)?;
        let branch0 = self.block(Some(pos), depth + 1)?;
        Ok(Instruction::Measure { q, branch1, branch0 })
    }

    fn form(&mut self) -> Result<Form, ParseError> {
        let open = self.bump().expect("caller checked for a token");
        if !open.is_open() {
            let what = if open.is_close() { "unbalanced `)`" } else { "bare token outside parentheses" };
            return Err(ParseError::syntax(open.pos, format!("{what}: `{}`", open.text)));
        }
        let head = match self.bump() {
            Some(t) if t.kind == TokenKind::Symbol => t,
            Some(t) => {
                return Err(ParseError::syntax(t.pos, format!("expected instruction name, found `{}`", t.text)))
            }
            None => return Err(ParseError::syntax(self.eof, "unbalanced `(`")),
        };
        let mut operands = Vec::new();
        loop {
            match self.bump() {
                None => return Err(ParseError::syntax(self.eof, format!("unbalanced `(` opened at {}", open.pos))),
                Some(t) if t.is_close() => break,
                Some(t) if t.is_open() => {
                    return Err(ParseError::syntax(t.pos, "nested form inside an instruction"))
                }
                Some(t) => operands.push(t),
            }
        }
        let ops = Operands {
            name: &head.text,
            pos: head.pos,
            items: &operands,
        };
        let instr = match head.text.as_str() {
            "QNOT" => {
                ops.arity(1)?;
                Instruction::Qnot { q: ops.qubit(0)? }
            }
            "SRN" => {
                ops.arity(1)?;
                Instruction::Srn { q: ops.qubit(0)? }
            }
            "HADAMARD" => {
                ops.arity(1)?;
                Instruction::Hadamard { q: ops.qubit(0)? }
            }
            "CNOT" => {
                ops.arity(2)?;
                Instruction::Cnot {
                    control: ops.qubit(0)?,
                    target: ops.qubit(1)?,
                }
            }
            "SWAP" => {
                ops.arity(2)?;
                Instruction::Swap {
                    q1: ops.qubit(0)?,
                    q2: ops.qubit(1)?,
                }
            }
            "U-THETA" => {
                ops.arity(2)?;
                Instruction::UTheta {
                    q: ops.qubit(0)?,
                    theta: parse_angle(ops.items[1])?,
                }
            }
            "U2" => {
                ops.arity(5)?;
                Instruction::U2 {
                    q: ops.qubit(0)?,
                    phi: parse_angle(ops.items[1])?,
                    theta: parse_angle(ops.items[2])?,
                    psi: parse_angle(ops.items[3])?,
                    alpha: parse_angle(ops.items[4])?,
                }
            }
            "CPHASE" => {
                ops.arity(3)?;
                Instruction::Cphase {
                    control: ops.qubit(0)?,
                    target: ops.qubit(1)?,
                    alpha: parse_angle(ops.items[2])?,
                }
            }
            "ORACLE" => ops.oracle()?,
            "MEASURE" | "MEASURED" => {
                ops.arity(1)?;
                return Ok(Form::Measure {
                    q: ops.qubit(0)?,
                    pos: head.pos,
                });
            }
            "HALT" => {
                ops.arity(0)?;
                Instruction::Halt
            }
            "PRINTAMPS" => {
                ops.arity(0)?;
                Instruction::Printamps
            }
            "END" => {
                ops.arity(0)?;
                return Ok(Form::End);
            }
            other => {
                return Err(ParseError::syntax(head.pos, format!("unknown instruction `{other}`")));
            }
        };
        Ok(Form::Instr(instr))
    }
}

struct Operands<'a, 't> {
    name: &'a str,
    pos: Position,
    items: &'a [&'t Token],
}

impl Operands<'_, '_> {
    fn arity(&self, n: usize) -> Result<(), ParseError> {
        if self.items.len() == n {
            Ok(())
        } else {
            Err(ParseError::syntax(
                self.pos,
                format!("{} takes {n} operand(s), found {}", self.name, self.items.len()),
            ))
        }
    }

    fn qubit(&self, i: usize) -> Result<i64, ParseError> {
        qubit_index(self.items[i])
    }

    fn oracle(&self) -> Result<Instruction, ParseError> {
        let items = match self.items.first() {
            Some(t) if t.kind == TokenKind::Symbol && t.text == ORACLE_PLACEHOLDER => &self.items[1..],
            _ => self.items,
        };
        if items.len() < 2 {
            return Err(ParseError::syntax(
                self.pos,
                "ORACLE needs at least one input qubit and an output qubit",
            ));
        }
        let qubits = items.iter().map(|t| qubit_index(t)).collect::<Result<Vec<_>, _>>()?;
        let mut seen = HashSet::new();
        for (q, t) in qubits.iter().zip(items) {
            if !seen.insert(*q) {
                return Err(ParseError::syntax(t.pos, format!("ORACLE qubit {q} listed twice")));
            }
        }
        let (output, inputs) = qubits.split_last().expect("length checked");
        Ok(Instruction::Oracle {
            inputs: inputs.to_vec(),
            output: *output,
        })
    }
}

fn qubit_index(t: &Token) -> Result<i64, ParseError> {
    let is_int = t.kind == TokenKind::Number && t.text.bytes().skip(1).all(|b| b.is_ascii_digit());
    if !is_int {
        return Err(ParseError::syntax(t.pos, format!("expected a qubit index, found `{}`", t.text)));
    }
    t.text
        .parse()
        .map_err(|_| ParseError::syntax(t.pos, format!("qubit index `{}` is too large", t.text)))
}

pub fn parse_program(tokens: &[Token]) -> Result<Program, ParseError> {
    let eof = tokens.last().map_or(Position { line: 1, column: 1 }, |t| Position {
        line: t.pos.line,
        column: t.pos.column + t.text.chars().count(),
    });
    let mut parser = Parser { tokens, next: 0, eof };
    Ok(Program::new(parser.block(None, 0)?))
}

/// A program whose qubit indices and oracle arities have been checked
/// against a register size and truth-table length.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedProgram {
    program: Program,
    n_qubits: usize,
}

impl ValidatedProgram {
    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.program.instructions
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn into_inner(self) -> Program {
        self.program
    }
}

pub fn validate_program(
    program: Program,
    n_qubits: usize,
    truth_table_len: Option<usize>,
) -> Result<ValidatedProgram, ValidationError> {
    let mut result = Ok(());
    program.visit(&mut |instr| {
        if result.is_err() {
            return;
        }
        result = check_instruction(instr, n_qubits, truth_table_len);
    });
    result.map(|()| ValidatedProgram { program, n_qubits })
}

fn check_instruction(instr: &Instruction, n_qubits: usize, tt_len: Option<usize>) -> Result<(), ValidationError> {
    let name = instr.name();
    let qubits = instr.qubits();
    for &q in &qubits {
        if q < 0 || q as u64 >= n_qubits as u64 {
            return Err(ValidationError::QubitOutOfRange {
                instruction: name,
                index: q,
                n_qubits,
            });
        }
    }
    let mut seen = HashSet::new();
    for &q in &qubits {
        if !seen.insert(q) {
            return Err(ValidationError::RepeatedQubit { instruction: name, index: q });
        }
    }
    if let Instruction::Oracle { inputs, .. } = instr {
        let len = tt_len.ok_or(ValidationError::MissingTruthTable)?;
        let expected = 1usize.checked_shl(inputs.len() as u32).unwrap_or(0);
        if expected != len {
            return Err(ValidationError::OracleArity {
                inputs: inputs.len(),
                expected,
                actual: len,
            });
        }
    }
    Ok(())
}
