//! State-vector register.
//!
//! Basis index `b` holds qubit `q` in bit `q` (qubit 0 is least
//! significant). Kets are printed with qubit `n - 1` leftmost, so
//! `|001>` differs from `|000>` in qubit 0.

use std::fmt;

use num_complex::Complex64;

use crate::error::StateError;
use crate::gates::{GateMatrix, TruthTable};

/// Complex amplitude of one basis state.
pub type ComplexAmp = Complex64;

/// Default ceiling on register width: 2^24 amplitudes, 256 MiB.
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Tolerance on `sum |amp|^2 = 1`.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amps: Vec<ComplexAmp>,
}

impl QuantumState {
    /// `|00...0>` over `n` qubits, `1 <= n <= DEFAULT_MAX_QUBITS`.
    pub fn zero(n: usize) -> Result<Self, StateError> {
        Self::zero_with_ceiling(n, DEFAULT_MAX_QUBITS)
    }

    pub fn zero_with_ceiling(n: usize, ceiling: usize) -> Result<Self, StateError> {
        // usize shifts past the word size are meaningless regardless of ceiling
        let hard_cap = usize::BITS as usize - 2;
        if n == 0 || n > ceiling || n > hard_cap {
            return Err(StateError::QubitCount {
                n,
                ceiling: ceiling.min(hard_cap),
            });
        }
        let mut amps = vec![ComplexAmp::new(0.0, 0.0); 1 << n];
        amps[0] = ComplexAmp::new(1.0, 0.0);
        Ok(Self { n_qubits: n, amps })
    }

    /// Wraps an amplitude vector whose length is `2^n` (n >= 1) and whose
    /// norm is 1 within [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amps: Vec<ComplexAmp>) -> Result<Self, StateError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(StateError::MatrixShape {
                name: "state".into(),
                len,
                expected: len.next_power_of_two().max(2),
            });
        }
        let state = Self {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        };
        let norm = state.norm_sqr();
        if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[ComplexAmp] {
        &self.amps
    }

    pub fn amplitude(&self, basis: usize) -> ComplexAmp {
        self.amps[basis]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Ket label for a basis index, qubit `n - 1` first.
    pub fn ket_label(&self, basis: usize) -> String {
        ket_label(basis, self.n_qubits)
    }

    fn check_qubit(&self, q: usize) -> Result<(), StateError> {
        if q >= self.n_qubits {
            Err(StateError::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    fn check_targets(&self, targets: &[usize]) -> Result<(), StateError> {
        for (i, &q) in targets.iter().enumerate() {
            self.check_qubit(q)?;
            if targets[..i].contains(&q) {
                return Err(StateError::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// Applies `gate` to `targets` in place; `targets[0]` is the most
    /// significant bit of the gate's basis index.
    ///
    /// For every assignment of the non-target qubits the 2^k amplitudes at
    /// the target positions are gathered, multiplied by the gate and
    /// scattered back. The full 2^n x 2^n operator is never formed.
    pub fn apply_gate(&mut self, gate: &GateMatrix, targets: &[usize]) -> Result<(), StateError> {
        let k = gate.k_qubits();
        if targets.len() != k {
            return Err(StateError::TargetCount {
                name: gate.name().to_string(),
                expected: k,
                actual: targets.len(),
            });
        }
        self.check_targets(targets)?;

        let dim = gate.dim();
        let offsets: Vec<usize> = (0..dim)
            .map(|j| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (j >> (k - 1 - i)) & 1 == 1)
                    .map(|(_, &q)| 1usize << q)
                    .sum()
            })
            .collect();
        let mask: usize = targets.iter().map(|&q| 1usize << q).sum();
        let m = gate.entries();
        let mut buf = vec![ComplexAmp::new(0.0, 0.0); dim];

        for base in (0..self.amps.len()).filter(|b| b & mask == 0) {
            for (slot, &off) in buf.iter_mut().zip(&offsets) {
                *slot = self.amps[base + off];
            }
            for (row, &off) in offsets.iter().enumerate() {
                let coeffs = &m[row * dim..(row + 1) * dim];
                self.amps[base + off] = coeffs.iter().zip(&buf).map(|(g, a)| g * a).sum();
            }
        }
        Ok(())
    }

    /// Oracle `|x, out> -> |x, out xor tt[x]>`; the row index `x` is built
    /// from `inputs` with `inputs[0]` most significant.
    pub fn apply_oracle(&mut self, tt: &TruthTable, inputs: &[usize], output: usize) -> Result<(), StateError> {
        if tt.inputs() != inputs.len() {
            return Err(StateError::TruthTableLength {
                len: tt.len(),
                inputs: inputs.len(),
            });
        }
        let mut all = inputs.to_vec();
        all.push(output);
        self.check_targets(&all)?;

        let out_bit = 1usize << output;
        for b in (0..self.amps.len()).filter(|b| b & out_bit == 0) {
            let row = inputs.iter().fold(0usize, |acc, &q| (acc << 1) | ((b >> q) & 1));
            if tt.get(row) {
                self.amps.swap(b, b | out_bit);
            }
        }
        Ok(())
    }

    /// Probability that measuring qubit `q` yields `value`.
    pub fn probability_of(&self, q: usize, value: u8) -> Result<f64, StateError> {
        self.check_qubit(q)?;
        let want = usize::from(value & 1);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(b, _)| (b >> q) & 1 == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects qubit `q` onto `value` and renormalizes. Returns the
    /// probability of the outcome.
    pub fn collapse(&mut self, q: usize, value: u8) -> Result<f64, StateError> {
        let p = self.probability_of(q, value)?;
        if !(p > 0.0) {
            return Err(StateError::ZeroProbability { qubit: q, value });
        }
        let want = usize::from(value & 1);
        let scale = 1.0 / p.sqrt();
        for (b, a) in self.amps.iter_mut().enumerate() {
            if (b >> q) & 1 == want {
                *a *= scale;
            } else {
                *a = ComplexAmp::new(0.0, 0.0);
            }
        }
        Ok(p)
    }

    /// Distribution of the integer spelled by `qubits`, first listed qubit
    /// most significant. A qubit listed twice contributes the same bit to
    /// both positions.
    pub fn read_distribution(&self, qubits: &[usize]) -> Result<Vec<f64>, StateError> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        if qubits.len() > 30 {
            return Err(StateError::TooManyReadQubits { bits: qubits.len() });
        }
        let mut dist = vec![0.0; 1 << qubits.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let v = qubits.iter().fold(0usize, |acc, &q| (acc << 1) | ((b >> q) & 1));
            dist[v] += a.norm_sqr();
        }
        Ok(dist)
    }
}

pub fn ket_label(basis: usize, n_qubits: usize) -> String {
    let bits: String = (0..n_qubits)
        .rev()
        .map(|q| if (basis >> q) & 1 == 1 { '1' } else { '0' })
        .collect();
    format!("|{bits}⟩")
}

impl fmt::Display for QuantumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, a) in self.amps.iter().enumerate() {
            writeln!(f, "{} {} {}", self.ket_label(b), a, a.norm_sqr())?;
        }
        Ok(())
    }
}
