//! Reference dense simulator used as a test oracle.
//!
//! Every operator is built as a full 2^n x 2^n matrix from Kronecker
//! products of single-qubit outer products, so nothing here shares code
//! with the engine's in-place kernels. Gate matrices are written out from
//! the documented conventions rather than taken from the library.

#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C;
use qgame_core::{Angle, Instruction, Program};
use rand::rngs::StdRng;
use rand::Rng;

pub type Matrix = Vec<Vec<C>>;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|r| (0..dim).map(|col| if r == col { c(1.0) } else { c(0.0) }).collect())
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn mat_vec(m: &Matrix, v: &[C]) -> Vec<C> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// |r><c| on one qubit.
fn outer(r: usize, col: usize) -> Matrix {
    let mut m = vec![vec![c(0.0); 2]; 2];
    m[r][col] = c(1.0);
    m
}

/// Lifts a k-qubit matrix onto `targets` of an n-qubit register:
/// sum over (r, c) of g[r][c] times the tensor product, qubit n-1 leftmost,
/// with |r_j><c_j| on targets[j] (targets[0] is the most significant bit of
/// the gate index) and the identity elsewhere.
pub fn lift(g: &Matrix, targets: &[usize], n: usize) -> Matrix {
    let k = targets.len();
    let dim = 1 << n;
    let mut full = vec![vec![c(0.0); dim]; dim];
    for (r, row) in g.iter().enumerate() {
        for (col, &entry) in row.iter().enumerate() {
            if entry == c(0.0) {
                continue;
            }
            let mut term = identity(1);
            for q in (0..n).rev() {
                let factor = match targets.iter().position(|&t| t == q) {
                    Some(j) => outer((r >> (k - 1 - j)) & 1, (col >> (k - 1 - j)) & 1),
                    None => identity(2),
                };
                term = kron(&term, &factor);
            }
            for i in 0..dim {
                for j in 0..dim {
                    full[i][j] += entry * term[i][j];
                }
            }
        }
    }
    full
}

pub fn m2(a: C, b: C, cc: C, d: C) -> Matrix {
    vec![vec![a, b], vec![cc, d]]
}

pub fn qnot() -> Matrix {
    m2(c(0.0), c(1.0), c(1.0), c(0.0))
}

pub fn hadamard() -> Matrix {
    let h = FRAC_1_SQRT_2;
    m2(c(h), c(h), c(h), c(-h))
}

pub fn srn() -> Matrix {
    let h = FRAC_1_SQRT_2;
    m2(c(h), c(-h), c(h), c(h))
}

pub fn u_theta(t: f64) -> Matrix {
    m2(c(t.cos()), c(t.sin()), c(-t.sin()), c(t.cos()))
}

pub fn u2(phi: f64, theta: f64, psi: f64, alpha: f64) -> Matrix {
    let e = |x: f64| C::from_polar(1.0, x);
    let g = e(alpha);
    m2(
        g * e(-phi / 2.0 - psi / 2.0) * theta.cos(),
        -g * e(-phi / 2.0 + psi / 2.0) * theta.sin(),
        g * e(phi / 2.0 - psi / 2.0) * theta.sin(),
        g * e(phi / 2.0 + psi / 2.0) * theta.cos(),
    )
}

/// Two-qubit gate from its four basis images, index = 2*first + second.
fn perm4(images: [usize; 4]) -> Matrix {
    let mut m = vec![vec![c(0.0); 4]; 4];
    for (col, &row) in images.iter().enumerate() {
        m[row][col] = c(1.0);
    }
    m
}

pub fn cnot() -> Matrix {
    perm4([0, 1, 3, 2])
}

pub fn swap() -> Matrix {
    perm4([0, 2, 1, 3])
}

pub fn cphase(alpha: f64) -> Matrix {
    let mut m = identity(4);
    m[3][3] = C::from_polar(1.0, alpha);
    m
}

/// Full-register operator of an oracle: |x, out> -> |x, out xor tt[x]>.
#[allow(clippy::needless_range_loop)]
pub fn oracle_full(tt: &[u8], inputs: &[usize], output: usize, n: usize) -> Matrix {
    let dim = 1 << n;
    let mut full = vec![vec![c(0.0); dim]; dim];
    for b in 0..dim {
        let x = inputs.iter().fold(0, |acc, &q| (acc << 1) | ((b >> q) & 1));
        let image = if tt[x] == 1 { b ^ (1 << output) } else { b };
        full[image][b] = c(1.0);
    }
    full
}

pub fn projector(q: usize, v: usize, n: usize) -> Matrix {
    lift(&outer(v, v), &[q], n)
}

pub fn norm_sqr(v: &[C]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn qb(q: i64) -> usize {
    usize::try_from(q).expect("validated qubit")
}

/// Dense operator of a unitary instruction, or `None` for control flow.
pub fn operator(instr: &Instruction, n: usize, tt: Option<&[u8]>) -> Option<Matrix> {
    let m = match instr {
        Instruction::Qnot { q } => lift(&qnot(), &[qb(*q)], n),
        Instruction::Srn { q } => lift(&srn(), &[qb(*q)], n),
        Instruction::Hadamard { q } => lift(&hadamard(), &[qb(*q)], n),
        Instruction::UTheta { q, theta } => lift(&u_theta(theta.0), &[qb(*q)], n),
        Instruction::U2 { q, phi, theta, psi, alpha } => lift(&u2(phi.0, theta.0, psi.0, alpha.0), &[qb(*q)], n),
        Instruction::Cnot { control, target } => lift(&cnot(), &[qb(*control), qb(*target)], n),
        Instruction::Cphase { control, target, alpha } => lift(&cphase(alpha.0), &[qb(*control), qb(*target)], n),
        Instruction::Swap { q1, q2 } => lift(&swap(), &[qb(*q1), qb(*q2)], n),
        Instruction::Oracle { inputs, output } => {
            let inputs: Vec<usize> = inputs.iter().map(|&q| qb(q)).collect();
            oracle_full(tt.expect("oracle needs a truth table"), &inputs, qb(*output), n)
        }
        Instruction::Measure { .. } | Instruction::Halt | Instruction::Printamps => return None,
    };
    Some(m)
}

#[derive(Debug, Clone)]
pub struct DenseBranch {
    pub state: Vec<C>,
    pub probability: f64,
    pub oracle_calls: usize,
    pub outcomes: Vec<(usize, u8)>,
    pub halted: bool,
}

pub const PRUNE: f64 = 1e-10;

/// Brute-force enumeration of every measurement branch, outcome 1 first.
pub fn run_dense(program: &Program, n: usize, tt: Option<&[u8]>) -> Vec<DenseBranch> {
    let mut zero = vec![c(0.0); 1 << n];
    zero[0] = c(1.0);
    let root = DenseBranch {
        state: zero,
        probability: 1.0,
        oracle_calls: 0,
        outcomes: Vec::new(),
        halted: false,
    };
    run_block(&program.instructions, vec![root], n, tt)
}

fn run_block(block: &[Instruction], branches: Vec<DenseBranch>, n: usize, tt: Option<&[u8]>) -> Vec<DenseBranch> {
    branches
        .into_iter()
        .flat_map(|b| {
            let mut live = vec![b];
            for instr in block {
                live = live.into_iter().flat_map(|b| run_one(instr, b, n, tt)).collect();
            }
            live
        })
        .collect()
}

fn run_one(instr: &Instruction, mut b: DenseBranch, n: usize, tt: Option<&[u8]>) -> Vec<DenseBranch> {
    if b.halted {
        return vec![b];
    }
    if let Some(m) = operator(instr, n, tt) {
        b.state = mat_vec(&m, &b.state);
        if matches!(instr, Instruction::Oracle { .. }) {
            b.oracle_calls += 1;
        }
        return vec![b];
    }
    match instr {
        Instruction::Halt => {
            b.halted = true;
            vec![b]
        }
        Instruction::Printamps => vec![b],
        Instruction::Measure { q, branch1, branch0 } => {
            let q = qb(*q);
            let mut out = Vec::new();
            for (v, body) in [(1usize, branch1), (0, branch0)] {
                let projected = mat_vec(&projector(q, v, n), &b.state);
                let p = norm_sqr(&projected);
                if p < PRUNE {
                    continue;
                }
                let mut child = b.clone();
                child.state = projected.iter().map(|a| a / p.sqrt()).collect();
                child.probability *= p;
                child.outcomes.push((q, v as u8));
                out.extend(run_block(body, vec![child], n, tt));
            }
            out
        }
        _ => unreachable!(),
    }
}

/// Probability of reading `desired` on `final_qubits` (first listed most
/// significant) from a dense state.
pub fn read_probability(state: &[C], final_qubits: &[usize], desired: u64) -> f64 {
    state
        .iter()
        .enumerate()
        .filter(|(b, _)| final_qubits.iter().fold(0u64, |acc, &q| (acc << 1) | ((b >> q) & 1) as u64) == desired)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

fn random_angle(rng: &mut StdRng) -> Angle {
    Angle(rng.random_range(-2.0 * PI..2.0 * PI))
}

fn distinct(rng: &mut StdRng, n: usize, k: usize) -> Vec<i64> {
    let mut pool: Vec<i64> = (0..n as i64).collect();
    let mut out = Vec::new();
    for _ in 0..k {
        let i = rng.random_range(0..pool.len());
        out.push(pool.swap_remove(i));
    }
    out
}

/// A random unitary instruction over `n` qubits. Oracles use
/// `oracle_inputs` inputs when that many plus one qubits exist.
pub fn random_gate(rng: &mut StdRng, n: usize, oracle_inputs: Option<usize>) -> Instruction {
    loop {
        let kind = rng.random_range(0..9);
        let two = n >= 2;
        let instr = match kind {
            0 => Instruction::Qnot { q: distinct(rng, n, 1)[0] },
            1 => Instruction::Srn { q: distinct(rng, n, 1)[0] },
            2 => Instruction::Hadamard { q: distinct(rng, n, 1)[0] },
            3 => Instruction::UTheta {
                q: distinct(rng, n, 1)[0],
                theta: random_angle(rng),
            },
            4 => Instruction::U2 {
                q: distinct(rng, n, 1)[0],
                phi: random_angle(rng),
                theta: random_angle(rng),
                psi: random_angle(rng),
                alpha: random_angle(rng),
            },
            5 if two => {
                let q = distinct(rng, n, 2);
                Instruction::Cnot { control: q[0], target: q[1] }
            }
            6 if two => {
                let q = distinct(rng, n, 2);
                Instruction::Cphase {
                    control: q[0],
                    target: q[1],
                    alpha: random_angle(rng),
                }
            }
            7 if two => {
                let q = distinct(rng, n, 2);
                Instruction::Swap { q1: q[0], q2: q[1] }
            }
            8 => match oracle_inputs {
                Some(m) if m < n => {
                    let q = distinct(rng, n, m + 1);
                    Instruction::Oracle {
                        inputs: q[..m].to_vec(),
                        output: q[m],
                    }
                }
                _ => continue,
            },
            _ => continue,
        };
        return instr;
    }
}

/// A random block of at most `budget` gates; measurements (with nested
/// blocks) and HALT appear when `branching` is set.
pub fn random_block(
    rng: &mut StdRng,
    n: usize,
    budget: &mut usize,
    oracle_inputs: Option<usize>,
    branching: bool,
    depth: usize,
) -> Vec<Instruction> {
    let mut out = Vec::new();
    let len = rng.random_range(0..=*budget);
    for _ in 0..len {
        if *budget == 0 {
            break;
        }
        *budget -= 1;
        let roll = rng.random_range(0..10);
        if branching && roll == 0 && depth < 3 {
            let q = distinct(rng, n, 1)[0];
            let branch1 = random_block(rng, n, budget, oracle_inputs, branching, depth + 1);
            let branch0 = random_block(rng, n, budget, oracle_inputs, branching, depth + 1);
            out.push(Instruction::Measure { q, branch1, branch0 });
        } else if branching && roll == 1 && depth > 0 {
            out.push(Instruction::Halt);
        } else {
            out.push(random_gate(rng, n, oracle_inputs));
        }
    }
    out
}

pub fn random_truth_table(rng: &mut StdRng, inputs: usize) -> Vec<u8> {
    (0..1 << inputs).map(|_| rng.random_range(0..2u8)).collect()
}

pub fn truth_table_string(tt: &[u8]) -> String {
    tt.iter().map(|b| char::from(b'0' + b)).collect()
}
