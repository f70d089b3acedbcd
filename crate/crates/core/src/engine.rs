//! Branching execution of QGAME programs.
//!
//! Execution starts from `|0...0>` with a single branch of probability 1.
//! A measurement forks the current branch into an outcome-1 child and an
//! outcome-0 child, each carrying its collapsed state and its share of the
//! path probability; children whose outcome probability falls below
//! `prune_epsilon` are never created. Each child runs its own branch body
//! and then the instructions following the measurement's second `(END)`.
//! `HALT` ends only the branch that executes it.
//!
//! Branches are kept in depth-first order, outcome 1 before outcome 0, so
//! results and measurement histories are reproducible.

use std::fmt;

use crate::error::SimError;
use crate::gates::{self, GateMatrix, TruthTable};
use crate::program::{Instruction, ValidatedProgram};
use crate::state::{ket_label, ComplexAmp, QuantumState, DEFAULT_MAX_QUBITS};

pub const DEFAULT_PRUNE_EPSILON: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub n_qubits: usize,
    pub oracle_tt: Option<TruthTable>,
    /// Maximum oracle calls per branch; `None` is unlimited.
    pub oracle_limit: Option<usize>,
    /// Measurement outcomes less likely than this are not followed.
    pub prune_epsilon: f64,
    pub max_qubits: usize,
}

impl SimulationConfig {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            oracle_tt: None,
            oracle_limit: None,
            prune_epsilon: DEFAULT_PRUNE_EPSILON,
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }

    pub fn with_oracle(mut self, tt: TruthTable) -> Self {
        self.oracle_tt = Some(tt);
        self
    }

    pub fn with_oracle_limit(mut self, limit: usize) -> Self {
        self.oracle_limit = Some(limit);
        self
    }

    pub fn with_prune_epsilon(mut self, eps: f64) -> Self {
        self.prune_epsilon = eps;
        self
    }

    pub fn with_max_qubits(mut self, max: usize) -> Self {
        self.max_qubits = max;
        self
    }

    fn check(&self) -> Result<(), SimError> {
        if !(0.0..0.5).contains(&self.prune_epsilon) {
            return Err(SimError::Config(format!(
                "prune_epsilon {} must lie in [0, 0.5)",
                self.prune_epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementEvent {
    pub qubit: usize,
    pub outcome: u8,
    /// Probability of this outcome given the branch state at the fork.
    pub probability: f64,
}

impl fmt::Display for MeasurementEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}={} (p={})", self.qubit, self.outcome, self.probability)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeRow {
    pub label: String,
    pub amplitude: ComplexAmp,
    pub probability: f64,
}

/// Register table of a state at one point of execution.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSnapshot {
    pub rows: Vec<AmplitudeRow>,
}

impl AmplitudeSnapshot {
    pub fn of(state: &QuantumState) -> Self {
        let n = state.n_qubits();
        let rows = state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(b, &a)| AmplitudeRow {
                label: ket_label(b, n),
                amplitude: a,
                probability: a.norm_sqr(),
            })
            .collect();
        Self { rows }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionBranch {
    pub state: QuantumState,
    pub probability: f64,
    pub oracle_calls: usize,
    pub history: Vec<MeasurementEvent>,
    /// Tables captured by `PRINTAMPS`.
    pub snapshots: Vec<AmplitudeSnapshot>,
    pub halted: bool,
}

impl ExecutionBranch {
    pub fn root(cfg: &SimulationConfig) -> Result<Self, SimError> {
        Ok(Self {
            state: QuantumState::zero_with_ceiling(cfg.n_qubits, cfg.max_qubits)?,
            probability: 1.0,
            oracle_calls: 0,
            history: Vec::new(),
            snapshots: Vec::new(),
            halted: false,
        })
    }

    /// Human-readable path label such as `root` or `q0=1,q2=0`.
    pub fn path(&self) -> String {
        if self.history.is_empty() {
            return "root".to_string();
        }
        self.history
            .iter()
            .map(|e| format!("q{}={}", e.qubit, e.outcome))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Probabilities of both outcomes at a measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fork {
    pub qubit: usize,
    pub p1: f64,
    pub p0: f64,
}

fn qubit(q: i64) -> usize {
    // Negative indices map out of range and are rejected by the state.
    usize::try_from(q).unwrap_or(usize::MAX)
}

fn gate_for(instr: &Instruction) -> Option<(GateMatrix, Vec<usize>)> {
    let g = match instr {
        Instruction::Qnot { q } => (gates::qnot(), vec![qubit(*q)]),
        Instruction::Srn { q } => (gates::srn(), vec![qubit(*q)]),
        Instruction::Hadamard { q } => (gates::hadamard(), vec![qubit(*q)]),
        Instruction::UTheta { q, theta } => (gates::u_theta(theta.0), vec![qubit(*q)]),
        Instruction::U2 { q, phi, theta, psi, alpha } => {
            (gates::u2(phi.0, theta.0, psi.0, alpha.0), vec![qubit(*q)])
        }
        Instruction::Cnot { control, target } => (gates::cnot(), vec![qubit(*control), qubit(*target)]),
        Instruction::Cphase { control, target, alpha } => {
            (gates::cphase(alpha.0), vec![qubit(*control), qubit(*target)])
        }
        Instruction::Swap { q1, q2 } => (gates::swap(), vec![qubit(*q1), qubit(*q2)]),
        _ => return None,
    };
    Some(g)
}

fn step_inner(
    mut branch: ExecutionBranch,
    instr: &Instruction,
    cfg: &SimulationConfig,
) -> Result<(Vec<ExecutionBranch>, Option<Fork>), SimError> {
    if let Some((gate, targets)) = gate_for(instr) {
        branch.state.apply_gate(&gate, &targets)?;
        return Ok((vec![branch], None));
    }
    match instr {
        Instruction::Oracle { inputs, output } => {
            let tt = cfg.oracle_tt.as_ref().ok_or(SimError::MissingTruthTable)?;
            if let Some(limit) = cfg.oracle_limit {
                if branch.oracle_calls >= limit {
                    return Err(SimError::OracleLimitExceeded {
                        limit,
                        branch: branch.path(),
                    });
                }
            }
            let inputs: Vec<usize> = inputs.iter().map(|&q| qubit(q)).collect();
            branch.state.apply_oracle(tt, &inputs, qubit(*output))?;
            branch.oracle_calls += 1;
            Ok((vec![branch], None))
        }
        Instruction::Measure { q, .. } => {
            let q = qubit(*q);
            let p1 = branch.state.probability_of(q, 1)?;
            let p0 = branch.state.probability_of(q, 0)?;
            let mut children = Vec::with_capacity(2);
            for (outcome, p) in [(1u8, p1), (0u8, p0)] {
                if p < cfg.prune_epsilon || p == 0.0 {
                    continue;
                }
                let mut child = branch.clone();
                child.state.collapse(q, outcome)?;
                child.probability *= p;
                child.history.push(MeasurementEvent {
                    qubit: q,
                    outcome,
                    probability: p,
                });
                children.push(child);
            }
            Ok((children, Some(Fork { qubit: q, p1, p0 })))
        }
        Instruction::Halt => {
            branch.halted = true;
            Ok((vec![branch], None))
        }
        Instruction::Printamps => {
            branch.snapshots.push(AmplitudeSnapshot::of(&branch.state));
            Ok((vec![branch], None))
        }
        _ => unreachable!("gate instructions handled above"),
    }
}

/// Executes one instruction on one branch. Gates, oracles, `HALT` and
/// `PRINTAMPS` yield one branch; a measurement yields its surviving
/// children (outcome 1 first) with collapsed states but does not run the
/// branch bodies, which is the scheduler's job.
pub fn step(
    branch: ExecutionBranch,
    instr: &Instruction,
    cfg: &SimulationConfig,
) -> Result<Vec<ExecutionBranch>, SimError> {
    step_inner(branch, instr, cfg).map(|(children, _)| children)
}

struct Slot<'p> {
    branch: ExecutionBranch,
    /// Remaining instruction slices, innermost last.
    cont: Vec<&'p [Instruction]>,
}

impl<'p> Slot<'p> {
    fn next_instruction(&mut self) -> Option<&'p Instruction> {
        if self.branch.halted {
            return None;
        }
        while let Some(top) = self.cont.last_mut() {
            if let Some((first, rest)) = top.split_first() {
                *top = rest;
                return Some(first);
            }
            self.cont.pop();
        }
        None
    }

    fn is_done(&self) -> bool {
        self.branch.halted || self.cont.iter().all(|s| s.is_empty())
    }
}

/// Incremental simulation: every call to [`Simulation::advance`] executes
/// one instruction on each live branch, so invariants can be observed
/// between instructions.
pub struct Simulation<'p> {
    cfg: SimulationConfig,
    slots: Vec<Slot<'p>>,
    forks: Vec<Fork>,
}

impl<'p> Simulation<'p> {
    pub fn new(program: &'p ValidatedProgram, cfg: &SimulationConfig) -> Result<Self, SimError> {
        cfg.check()?;
        if cfg.n_qubits != program.n_qubits() {
            return Err(SimError::QubitCountMismatch {
                config: cfg.n_qubits,
                program: program.n_qubits(),
            });
        }
        if cfg.oracle_tt.is_none() && program.program().uses_oracle() {
            return Err(SimError::MissingTruthTable);
        }
        Ok(Self {
            cfg: cfg.clone(),
            slots: vec![Slot {
                branch: ExecutionBranch::root(cfg)?,
                cont: vec![program.instructions()],
            }],
            forks: Vec::new(),
        })
    }

    pub fn is_finished(&self) -> bool {
        self.slots.iter().all(Slot::is_done)
    }

    /// Runs one instruction on every live branch. Returns `false` once
    /// nothing is left to execute.
    pub fn advance(&mut self) -> Result<bool, SimError> {
        if self.is_finished() {
            return Ok(false);
        }
        let mut next = Vec::with_capacity(self.slots.len() + 1);
        for mut slot in std::mem::take(&mut self.slots) {
            let Some(instr) = slot.next_instruction() else {
                next.push(slot);
                continue;
            };
            let (children, fork) = step_inner(slot.branch, instr, &self.cfg)?;
            if let Some(fork) = fork {
                self.forks.push(fork);
            }
            let bodies = match instr {
                Instruction::Measure { branch1, branch0, .. } => Some((branch1, branch0)),
                _ => None,
            };
            for child in children {
                let mut cont = slot.cont.clone();
                if let Some((branch1, branch0)) = bodies {
                    let outcome = child.history.last().map(|e| e.outcome);
                    cont.push(if outcome == Some(1) { branch1 } else { branch0 });
                }
                next.push(Slot { branch: child, cont });
            }
        }
        self.slots = next;
        Ok(!self.is_finished())
    }

    /// All branches, live and finished, in depth-first order.
    pub fn branches(&self) -> impl Iterator<Item = &ExecutionBranch> {
        self.slots.iter().map(|s| &s.branch)
    }

    pub fn forks(&self) -> &[Fork] {
        &self.forks
    }

    pub fn run(mut self) -> Result<Vec<ExecutionBranch>, SimError> {
        while self.advance()? {}
        Ok(self.into_branches())
    }

    pub fn into_branches(self) -> Vec<ExecutionBranch> {
        self.slots.into_iter().map(|s| s.branch).collect()
    }
}

/// Runs a validated program to completion and returns its end branches.
pub fn run_program(program: &ValidatedProgram, cfg: &SimulationConfig) -> Result<Vec<ExecutionBranch>, SimError> {
    Simulation::new(program, cfg)?.run()
}

/// Probability-weighted mean number of oracle calls.
pub fn expected_oracle_calls(branches: &[ExecutionBranch]) -> f64 {
    branches.iter().map(|b| b.probability * b.oracle_calls as f64).sum()
}
