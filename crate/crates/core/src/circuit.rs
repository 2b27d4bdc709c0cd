//! Circuit intermediate representation shared by all simulators and builders.
//!
//! A circuit is an ordered instruction list over a qubit register and a
//! classical-bit register. Instructions carry an optional classical condition
//! (a conjunction of possibly negated bits) and a `noisy` flag that marks
//! whether a depolarizing fault location attaches after the instruction.

use std::collections::BTreeMap;
use std::fmt;

/// Gate tags. `I` is a multi-qubit identity used as an explicit noise
/// placeholder (e.g. left behind by the Clifford conversion of a Toffoli).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    I,
    X,
    Y,
    Z,
    H,
    S,
    T,
    Tdg,
    Cx,
    Cz,
    Ccx,
    Ccz,
    /// k controls, one target.
    Ckx(u8),
    /// k controls, one target; fully symmetric phase gate.
    Ckz(u8),
    Reset,
    Measure,
}

impl Gate {
    /// Expected operand count, or `None` when variable (the `I` placeholder).
    pub fn arity(self) -> Option<usize> {
        match self {
            Gate::I => None,
            Gate::X | Gate::Y | Gate::Z | Gate::H | Gate::S | Gate::T | Gate::Tdg => Some(1),
            Gate::Cx | Gate::Cz => Some(2),
            Gate::Ccx | Gate::Ccz => Some(3),
            Gate::Ckx(k) | Gate::Ckz(k) => Some(k as usize + 1),
            Gate::Reset => Some(1),
            Gate::Measure => Some(1),
        }
    }

    pub fn is_unitary(self) -> bool {
        !matches!(self, Gate::Reset | Gate::Measure)
    }

    /// Gates whose action in the computational basis only permutes or phases
    /// basis states. `H` is the only branching gate in the set.
    pub fn is_branching(self) -> bool {
        matches!(self, Gate::H)
    }

    pub fn name(self) -> String {
        match self {
            Gate::I => "I".into(),
            Gate::X => "X".into(),
            Gate::Y => "Y".into(),
            Gate::Z => "Z".into(),
            Gate::H => "H".into(),
            Gate::S => "S".into(),
            Gate::T => "T".into(),
            Gate::Tdg => "TDG".into(),
            Gate::Cx => "CX".into(),
            Gate::Cz => "CZ".into(),
            Gate::Ccx => "CCX".into(),
            Gate::Ccz => "CCZ".into(),
            Gate::Ckx(k) => format!("CKX({k})"),
            Gate::Ckz(k) => format!("CKZ({k})"),
            Gate::Reset => "RESET".into(),
            Gate::Measure => "MEASURE".into(),
        }
    }
}

/// Conjunction of classical-bit literals; empty means "always".
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Condition {
    /// (bit index, required value): `(3, false)` encodes `!c3`.
    pub literals: Vec<(u32, bool)>,
}

impl Condition {
    pub fn bit(bit: u32) -> Self {
        Condition { literals: vec![(bit, true)] }
    }

    pub fn and(mut self, bit: u32, value: bool) -> Self {
        self.literals.push((bit, value));
        self
    }

    pub fn eval(&self, bits: &[bool]) -> bool {
        self.literals.iter().all(|&(b, v)| bits[b as usize] == v)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .literals
            .iter()
            .map(|&(b, v)| if v { format!("c{b}") } else { format!("!c{b}") })
            .collect();
        write!(f, "{}", parts.join(" & "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub gate: Gate,
    pub operands: Vec<u32>,
    /// Classical destination for `MEASURE`.
    pub target_bit: Option<u32>,
    pub condition: Option<Condition>,
    pub noisy: bool,
}

impl Instruction {
    pub fn new(gate: Gate, operands: Vec<u32>) -> Self {
        let noisy = gate.is_unitary();
        Instruction { gate, operands, target_bit: None, condition: None, noisy }
    }

    pub fn noiseless(mut self) -> Self {
        self.noisy = false;
        self
    }

    pub fn with_condition(mut self, cond: Condition) -> Self {
        self.condition = Some(cond);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub num_qubits: u32,
    pub num_cbits: u32,
    pub instructions: Vec<Instruction>,
    /// Free-form labels (protocol name, concatenation layer, ...).
    pub metadata: BTreeMap<String, String>,
}

impl Circuit {
    pub fn new(num_qubits: u32, num_cbits: u32) -> Self {
        Circuit { num_qubits, num_cbits, ..Default::default() }
    }

    pub fn push(&mut self, instr: Instruction) {
        self.instructions.push(instr);
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Appends all instructions of `other`, which must address the same
    /// registers (register sizes are widened to fit).
    pub fn extend_from(&mut self, other: &Circuit) {
        self.num_qubits = self.num_qubits.max(other.num_qubits);
        self.num_cbits = self.num_cbits.max(other.num_cbits);
        self.instructions.extend(other.instructions.iter().cloned());
    }

    pub fn count_gate(&self, gate: Gate) -> usize {
        self.instructions.iter().filter(|i| i.gate == gate).count()
    }
}

/// A validation finding: the instruction index and what is wrong with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub index: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "instruction {}: {}", self.index, self.message)
    }
}

/// Checks every instruction against the register sizes and the per-gate
/// invariants. An empty result means the circuit is well-formed.
pub fn validate(circuit: &Circuit) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (index, instr) in circuit.instructions.iter().enumerate() {
        let mut bad = |message: String| out.push(Diagnostic { index, message });
        match instr.gate.arity() {
            Some(n) if instr.operands.len() != n => {
                bad(format!(
                    "operand count {} does not match arity {} of {}",
                    instr.operands.len(),
                    n,
                    instr.gate.name()
                ));
            }
            None if instr.operands.is_empty() => {
                bad("I placeholder needs at least one operand".into());
            }
            _ => {}
        }
        for (k, &q) in instr.operands.iter().enumerate() {
            if q >= circuit.num_qubits {
                bad(format!("operand out of range: qubit {q} at position {k}"));
            }
            if instr.operands[..k].contains(&q) {
                bad(format!("duplicate operand at index {index}: qubit {q}"));
            }
        }
        match instr.gate {
            Gate::Measure => match instr.target_bit {
                None => bad("MEASURE needs a classical target bit".into()),
                Some(c) if c >= circuit.num_cbits => {
                    bad(format!("classical target bit c{c} out of range"));
                }
                _ => {}
            },
            _ => {
                if instr.target_bit.is_some() {
                    bad("only MEASURE may carry a classical target bit".into());
                }
            }
        }
        if let Some(cond) = &instr.condition {
            for &(b, _) in &cond.literals {
                if b >= circuit.num_cbits {
                    bad(format!("condition references undeclared classical bit c{b}"));
                }
            }
        }
        if instr.noisy && instr.gate == Gate::Measure {
            bad("MEASURE cannot carry gate noise".into());
        }
    }
    out
}

/// One fault location per noisy instruction, in execution order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultLocation {
    pub instruction_index: usize,
    pub support: Vec<u32>,
    /// Number of qubits the depolarizing channel acts on.
    pub arity: usize,
}

pub fn fault_locations(circuit: &Circuit) -> Vec<FaultLocation> {
    circuit
        .instructions
        .iter()
        .enumerate()
        .filter(|(_, instr)| instr.noisy)
        .map(|(instruction_index, instr)| FaultLocation {
            instruction_index,
            support: instr.operands.clone(),
            arity: instr.operands.len(),
        })
        .collect()
}

/// Sensitivity switch: marks every RESET as noisy so it yields a
/// single-qubit depolarizing fault location.
pub fn with_reset_noise(mut circuit: Circuit) -> Circuit {
    for instr in &mut circuit.instructions {
        if instr.gate == Gate::Reset {
            instr.noisy = true;
        }
    }
    circuit
}
