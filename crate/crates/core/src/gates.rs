//! Gate matrices.
//!
//! A k-qubit gate is a row-major 2^k x 2^k complex matrix. Row and column
//! indices are read with the first target qubit as the most significant bit,
//! so for `CNOT` applied to `[control, target]` the basis order is
//! `|control target>` = `|00>, |01>, |10>, |11>`.
//!
//! Conventions:
//!
//! | gate        | matrix                                               |
//! |-------------|------------------------------------------------------|
//! | QNOT        | `[[0, 1], [1, 0]]`                                   |
//! | HADAMARD    | `1/sqrt(2) [[1, 1], [1, -1]]`                        |
//! | SRN         | `1/sqrt(2) [[1, -1], [1, 1]]`                        |
//! | U-THETA(t)  | `[[cos t, sin t], [-sin t, cos t]]`                  |
//! | U2(p,t,s,a) | `e^{ia} [[e^{i(-p-s)/2} cos t, -e^{i(-p+s)/2} sin t], [e^{i(p-s)/2} sin t, e^{i(p+s)/2} cos t]]` |
//! | CNOT        | flips target when control is 1                       |
//! | CPHASE(a)   | `diag(1, 1, 1, e^{ia})`                              |
//! | SWAP        | exchanges the two qubits                             |

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::StateError;

/// Tolerance used when accepting a caller-supplied matrix as unitary.
pub const UNITARITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    name: String,
    k_qubits: usize,
    entries: Vec<Complex64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl GateMatrix {
    /// Builds a gate from an arbitrary row-major matrix, rejecting anything
    /// that is not square over `k_qubits` or not unitary.
    pub fn new(name: impl Into<String>, k_qubits: usize, entries: Vec<Complex64>) -> Result<Self, StateError> {
        let name = name.into();
        let dim = 1usize
            .checked_shl(k_qubits as u32)
            .filter(|_| k_qubits < 16)
            .ok_or_else(|| StateError::MatrixShape {
                name: name.clone(),
                len: entries.len(),
                expected: usize::MAX,
            })?;
        if entries.len() != dim * dim {
            return Err(StateError::MatrixShape {
                name,
                len: entries.len(),
                expected: dim * dim,
            });
        }
        let gate = Self {
            name,
            k_qubits,
            entries,
        };
        let deviation = gate.unitarity_deviation();
        if !(deviation <= UNITARITY_TOLERANCE) {
            return Err(StateError::NonUnitary {
                name: gate.name,
                deviation,
            });
        }
        Ok(gate)
    }

    fn builtin(name: &str, k_qubits: usize, entries: Vec<Complex64>) -> Self {
        debug_assert_eq!(entries.len(), 1 << (2 * k_qubits));
        Self {
            name: name.to_string(),
            k_qubits,
            entries,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn k_qubits(&self) -> usize {
        self.k_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.k_qubits
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    /// `max |(U^dagger U - I)_ij|`; NaN entries propagate.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                if i == j {
                    acc -= 1.0;
                }
                let dev = acc.norm();
                if dev.is_nan() {
                    return f64::NAN;
                }
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// Matrix product `self * rhs` of two gates of the same width.
    pub fn compose(&self, rhs: &GateMatrix) -> GateMatrix {
        assert_eq!(self.k_qubits, rhs.k_qubits, "gate widths differ");
        let d = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = (0..d).map(|k| self.get(i, k) * rhs.get(k, j)).sum();
            }
        }
        GateMatrix::builtin(&format!("{}*{}", self.name, rhs.name), self.k_qubits, out)
    }
}

pub fn qnot() -> GateMatrix {
    GateMatrix::builtin("QNOT", 1, vec![r(0.0), r(1.0), r(1.0), r(0.0)])
}

pub fn hadamard() -> GateMatrix {
    let h = FRAC_1_SQRT_2;
    GateMatrix::builtin("HADAMARD", 1, vec![r(h), r(h), r(h), r(-h)])
}

pub fn srn() -> GateMatrix {
    let h = FRAC_1_SQRT_2;
    GateMatrix::builtin("SRN", 1, vec![r(h), r(-h), r(h), r(h)])
}

pub fn u_theta(theta: f64) -> GateMatrix {
    let (s, co) = theta.sin_cos();
    GateMatrix::builtin("U-THETA", 1, vec![r(co), r(s), r(-s), r(co)])
}

pub fn u2(phi: f64, theta: f64, psi: f64, alpha: f64) -> GateMatrix {
    let e = |angle: f64| Complex64::from_polar(1.0, angle);
    let (s, co) = theta.sin_cos();
    let global = e(alpha);
    GateMatrix::builtin(
        "U2",
        1,
        vec![
            global * e(-phi / 2.0 - psi / 2.0) * co,
            -global * e(-phi / 2.0 + psi / 2.0) * s,
            global * e(phi / 2.0 - psi / 2.0) * s,
            global * e(phi / 2.0 + psi / 2.0) * co,
        ],
    )
}

pub fn cnot() -> GateMatrix {
    let (o, l) = (r(0.0), r(1.0));
    GateMatrix::builtin(
        "CNOT",
        2,
        vec![
            l, o, o, o, //
            o, l, o, o, //
            o, o, o, l, //
            o, o, l, o,
        ],
    )
}

pub fn cphase(alpha: f64) -> GateMatrix {
    let (o, l) = (r(0.0), r(1.0));
    GateMatrix::builtin(
        "CPHASE",
        2,
        vec![
            l, o, o, o, //
            o, l, o, o, //
            o, o, l, o, //
            o, o, o, c(alpha.cos(), alpha.sin()),
        ],
    )
}

pub fn swap() -> GateMatrix {
    let (o, l) = (r(0.0), r(1.0));
    GateMatrix::builtin(
        "SWAP",
        2,
        vec![
            l, o, o, o, //
            o, o, l, o, //
            o, l, o, o, //
            o, o, o, l,
        ],
    )
}

/// Output column of an oracle's truth table, rows in binary order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable(Vec<u8>);

impl TruthTable {
    /// Accepts a non-empty, power-of-two-length list of 0/1 values.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self, StateError> {
        let len = bits.len();
        if len == 0 || !len.is_power_of_two() || bits.iter().any(|&b| b > 1) {
            let text: String = bits.iter().map(|b| b.to_string()).collect();
            return Err(StateError::InvalidTruthTable(text));
        }
        Ok(Self(bits))
    }

    /// Parses a bit string such as `1000`.
    pub fn parse(s: &str) -> Result<Self, StateError> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(StateError::InvalidTruthTable(s.to_string())),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        Self::from_bits(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of oracle input qubits this table serves.
    pub fn inputs(&self) -> usize {
        self.0.len().trailing_zeros() as usize
    }

    pub fn get(&self, row: usize) -> bool {
        self.0[row] == 1
    }
}

impl std::fmt::Display for TruthTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Permutation matrix `|x, out> -> |x, out xor tt[x]>` over `m + 1` qubits,
/// ordered as `[inputs..., output]` with the first input most significant.
pub fn oracle_matrix(tt: &TruthTable) -> GateMatrix {
    let m = tt.inputs();
    let d = 1usize << (m + 1);
    let mut entries = vec![r(0.0); d * d];
    for col in 0..d {
        let (x, out) = (col >> 1, col & 1);
        let row = (x << 1) | (out ^ usize::from(tt.get(x)));
        entries[row * d + col] = r(1.0);
    }
    GateMatrix::builtin("ORACLE", m + 1, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn builtins() -> Vec<GateMatrix> {
        vec![
            qnot(),
            hadamard(),
            srn(),
            u_theta(0.3),
            u2(0.1, 0.2, 0.3, 0.4),
            cnot(),
            cphase(1.1),
            swap(),
        ]
    }

    #[test]
    fn builtins_are_unitary() {
        for g in builtins() {
            assert!(g.unitarity_deviation() < 1e-12, "{}", g.name());
        }
    }

    #[test]
    fn u_theta_zero_is_identity() {
        let g = u_theta(0.0);
        assert_eq!(g.entries(), &[r(1.0), r(0.0), r(0.0), r(1.0)]);
    }

    #[test]
    fn u2_reduces_to_rotation() {
        let g = u2(0.0, 0.7, 0.0, 0.0);
        let (s, co) = 0.7f64.sin_cos();
        let want = [co, -s, s, co];
        for (a, b) in g.entries().iter().zip(want) {
            assert_abs_diff_eq!(a.re, b, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn srn_squared_is_not_up_to_sign() {
        let g = srn().compose(&srn());
        let want = [0.0, -1.0, 1.0, 0.0];
        for (a, b) in g.entries().iter().zip(want) {
            assert_abs_diff_eq!(a.re, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn involutions() {
        for g in [qnot(), hadamard(), swap(), cnot()] {
            let sq = g.compose(&g);
            let d = sq.dim();
            for i in 0..d {
                for j in 0..d {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(sq.get(i, j).re, want, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn caller_matrices_are_checked() {
        assert!(GateMatrix::new("ok", 1, hadamard().entries().to_vec()).is_ok());
        let err = GateMatrix::new("bad", 1, vec![r(1.0), r(1.0), r(0.0), r(1.0)]).unwrap_err();
        assert!(matches!(err, StateError::NonUnitary { .. }));
        let err = GateMatrix::new("nan", 1, vec![r(f64::NAN), r(0.0), r(0.0), r(1.0)]).unwrap_err();
        assert!(matches!(err, StateError::NonUnitary { .. }));
        assert!(matches!(
            GateMatrix::new("shape", 1, vec![r(1.0); 3]).unwrap_err(),
            StateError::MatrixShape { .. }
        ));
    }

    #[test]
    fn oracle_matrix_is_a_permutation() {
        let g = oracle_matrix(&TruthTable::parse("1000").unwrap());
        assert_eq!(g.k_qubits(), 3);
        assert!(g.unitarity_deviation() < 1e-15);
        // |00,0> -> |00,1>
        assert_eq!(g.get(1, 0), r(1.0));
        // |01,0> fixed
        assert_eq!(g.get(2, 2), r(1.0));
    }

    #[test]
    fn truth_tables() {
        let tt = TruthTable::parse("0100").unwrap();
        assert_eq!(tt.inputs(), 2);
        assert!(tt.get(1) && !tt.get(0));
        assert_eq!(tt.to_string(), "0100");
        assert_eq!(TruthTable::parse("1").unwrap().inputs(), 0);
        for bad in ["", "100", "10a0", "2000"] {
            assert!(TruthTable::parse(bad).is_err(), "{bad}");
        }
    }
}
