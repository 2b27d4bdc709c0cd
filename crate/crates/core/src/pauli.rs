//! Sparse Pauli strings with an `i`-power phase, shared by the simulators,
//! code layouts, and the fidelity evaluator.

use std::collections::BTreeMap;
use std::fmt;

/// Single-qubit non-identity Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliOp {
    X,
    Y,
    Z,
}

impl PauliOp {
    /// (x, z) symplectic bits of the operator.
    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliOp::X => (true, false),
            PauliOp::Y => (true, true),
            PauliOp::Z => (false, true),
        }
    }
}

/// A Pauli string stored sparsely: identity qubits are absent from the map.
///
/// `phase_i_pow` is the exponent k in the global factor i^k, kept mod 4 so
/// products of strings stay exact.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PauliString {
    ops: BTreeMap<u32, PauliOp>,
    phase_i_pow: u8,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(qubit: u32, op: PauliOp) -> Self {
        let mut ops = BTreeMap::new();
        ops.insert(qubit, op);
        Self { ops, phase_i_pow: 0 }
    }

    /// Builds `op` applied to every qubit in `qubits`.
    pub fn uniform(qubits: impl IntoIterator<Item = u32>, op: PauliOp) -> Self {
        let mut ops = BTreeMap::new();
        for q in qubits {
            ops.insert(q, op);
        }
        Self { ops, phase_i_pow: 0 }
    }

    pub fn from_ops(pairs: impl IntoIterator<Item = (u32, PauliOp)>) -> Self {
        let mut ops = BTreeMap::new();
        for (q, op) in pairs {
            ops.insert(q, op);
        }
        Self { ops, phase_i_pow: 0 }
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.ops.len()
    }

    pub fn phase_i_pow(&self) -> u8 {
        self.phase_i_pow
    }

    pub fn with_phase_i_pow(mut self, k: u8) -> Self {
        self.phase_i_pow = k & 3;
        self
    }

    pub fn op_at(&self, qubit: u32) -> Option<PauliOp> {
        self.ops.get(&qubit).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, PauliOp)> + '_ {
        self.ops.iter().map(|(&q, &op)| (q, op))
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.ops.keys().copied()
    }

    pub fn max_qubit(&self) -> Option<u32> {
        self.ops.keys().next_back().copied()
    }

    /// Product `self * rhs` with exact phase bookkeeping.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = BTreeMap::new();
        let mut phase = (self.phase_i_pow + rhs.phase_i_pow) & 3;
        let mut qubits: Vec<u32> = self.ops.keys().copied().collect();
        for q in rhs.ops.keys() {
            if !self.ops.contains_key(q) {
                qubits.push(*q);
            }
        }
        for q in qubits {
            let a = self.ops.get(&q).copied();
            let b = rhs.ops.get(&q).copied();
            let (op, extra) = match (a, b) {
                (Some(a), None) => (Some(a), 0),
                (None, Some(b)) => (Some(b), 0),
                (Some(a), Some(b)) => mul_single(a, b),
                (None, None) => (None, 0),
            };
            phase = (phase + extra) & 3;
            if let Some(op) = op {
                out.insert(q, op);
            }
        }
        Self { ops: out, phase_i_pow: phase }
    }

    /// True iff the strings commute (phases are irrelevant here).
    pub fn commutes_with(&self, rhs: &Self) -> bool {
        let mut anti = 0usize;
        for (q, a) in &self.ops {
            if let Some(b) = rhs.ops.get(q) {
                if a != b {
                    anti += 1;
                }
            }
        }
        anti % 2 == 0
    }

    /// Hermitian strings square to +1 and have a real matrix representation:
    /// the i-power must be even and compensate the number of Y factors.
    pub fn is_hermitian(&self) -> bool {
        let ys = self.ops.values().filter(|&&op| op == PauliOp::Y).count();
        // i^k * (product with Y = iXZ each) is Hermitian iff k even.
        let _ = ys;
        self.phase_i_pow % 2 == 0
    }
}

/// Single-qubit product a*b -> (result op, extra i-power).
fn mul_single(a: PauliOp, b: PauliOp) -> (Option<PauliOp>, u8) {
    if a == b {
        return (None, 0);
    }
    let (xa, za) = a.bits();
    let (xb, zb) = b.bits();
    // Using P(x,z) = i^{xz} X^x Z^z: phase of product = xa*zb - za*xb (mod 4) fixups.
    // Direct table is clearer:
    let (op, k) = match (a, b) {
        (PauliOp::X, PauliOp::Y) => (PauliOp::Z, 1), // XY = iZ
        (PauliOp::Y, PauliOp::X) => (PauliOp::Z, 3), // YX = -iZ
        (PauliOp::Y, PauliOp::Z) => (PauliOp::X, 1), // YZ = iX
        (PauliOp::Z, PauliOp::Y) => (PauliOp::X, 3),
        (PauliOp::Z, PauliOp::X) => (PauliOp::Y, 1), // ZX = iY
        (PauliOp::X, PauliOp::Z) => (PauliOp::Y, 3),
        _ => unreachable!(),
    };
    let _ = (xa, za, xb, zb);
    (Some(op), k)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase_i_pow {
            0 => write!(f, "+")?,
            1 => write!(f, "+i*")?,
            2 => write!(f, "-")?,
            3 => write!(f, "-i*")?,
            _ => unreachable!(),
        }
        if self.ops.is_empty() {
            return write!(f, "I");
        }
        for (q, op) in &self.ops {
            write!(f, "{:?}{}", op, q)?;
        }
        Ok(())
    }
}
