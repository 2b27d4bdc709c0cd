//! Builders for the protocol circuits: measurement-free QEC rounds (three-
//! and four-ancilla variants, concatenated), unencoding gadgets, gauge
//! fixing, code deformation for the transversal CCZ, and the circuit
//! transformations (feedback decomposition, Clifford conversion).

mod deform;
mod elements;
mod gauge_fix;
mod qec;
mod transform;

pub use deform::{ccz_protocol, extend, shrink, transversal_ccz, CczProtocol, ExtendedRegister};
pub use elements::{
    append_logical_state_prep, append_plus_prep, append_zero_prep, repetition_correct,
    transversal_cnot, transversal_hadamard, transversal_pauli, unencode_x, unencode_z,
    RepRoundBasis,
};
pub use gauge_fix::{gauge_fix_steane, gauge_fix_teleport, GaugeFixMethod, TeleportRegisters};
pub use qec::{append_cx_round, append_cz_round, append_qec_round, qec_round, AncillaVariant, BuiltQec};
pub use transform::{clifford_convert, decompose_feedback, TransformError};

use crate::circuit::{Circuit, Gate, Instruction};
use crate::codes::ConcatLayout;
use std::collections::BTreeMap;

/// Incremental circuit builder with register allocation and a current
/// noise default. Gates are noisy unless the builder is in a noiseless
/// section; RESET and MEASURE never carry noise.
#[derive(Debug, Clone)]
pub struct Build {
    pub circuit: Circuit,
    noisy: bool,
}

impl Default for Build {
    fn default() -> Self {
        Self::new()
    }
}

impl Build {
    pub fn new() -> Self {
        Build { circuit: Circuit::new(0, 0), noisy: true }
    }

    pub fn alloc(&mut self, n: u32) -> Vec<u32> {
        let start = self.circuit.num_qubits;
        self.circuit.num_qubits += n;
        (start..start + n).collect()
    }

    pub fn alloc_block(&mut self, levels: u32) -> ConcatLayout {
        ConcatLayout::over(levels, self.alloc(9u32.pow(levels)))
    }

    pub fn alloc_cbit(&mut self) -> u32 {
        let bit = self.circuit.num_cbits;
        self.circuit.num_cbits += 1;
        bit
    }

    /// Runs `f` with gate noise disabled (ideal preparation / decode suffix).
    pub fn noiseless<F: FnOnce(&mut Self)>(&mut self, f: F) {
        let saved = self.noisy;
        self.noisy = false;
        f(self);
        self.noisy = saved;
    }

    pub fn push_gate(&mut self, gate: Gate, operands: Vec<u32>) {
        let mut i = Instruction::new(gate, operands);
        i.noisy = self.noisy && i.gate.is_unitary();
        self.circuit.push(i);
    }

    pub fn h(&mut self, q: u32) {
        self.push_gate(Gate::H, vec![q]);
    }

    pub fn x(&mut self, q: u32) {
        self.push_gate(Gate::X, vec![q]);
    }

    pub fn z(&mut self, q: u32) {
        self.push_gate(Gate::Z, vec![q]);
    }

    pub fn cx(&mut self, c: u32, t: u32) {
        self.push_gate(Gate::Cx, vec![c, t]);
    }

    pub fn cz(&mut self, c: u32, t: u32) {
        self.push_gate(Gate::Cz, vec![c, t]);
    }

    pub fn ccx(&mut self, c1: u32, c2: u32, t: u32) {
        self.push_gate(Gate::Ccx, vec![c1, c2, t]);
    }

    pub fn ccz(&mut self, c1: u32, c2: u32, t: u32) {
        self.push_gate(Gate::Ccz, vec![c1, c2, t]);
    }

    pub fn ckx(&mut self, controls: &[u32], t: u32) {
        let mut ops = controls.to_vec();
        ops.push(t);
        self.push_gate(Gate::Ckx(controls.len() as u8), ops);
    }

    pub fn reset(&mut self, q: u32) {
        self.circuit.push(Instruction::new(Gate::Reset, vec![q]).noiseless());
    }

    pub fn reset_all(&mut self, qs: &[u32]) {
        for &q in qs {
            self.reset(q);
        }
    }

    /// Transversal CX between equal-length qubit lists.
    pub fn tcx(&mut self, controls: &[u32], targets: &[u32]) {
        assert_eq!(controls.len(), targets.len());
        for (&c, &t) in controls.iter().zip(targets) {
            self.cx(c, t);
        }
    }
}

/// Level-indexed ancilla registers, handed out on first use and reused
/// afterwards. Every subcircuit resets its ancillas before returning, so a
/// register is always back in |0...0> when the pool hands it out again.
#[derive(Debug, Default)]
pub struct Pool {
    qubits: Vec<u32>,
    blocks: BTreeMap<u32, Vec<ConcatLayout>>,
}

impl Pool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Seeds the pool with already-allocated spare qubits (assumed reset).
    pub fn with_qubits(qubits: Vec<u32>) -> Self {
        Pool { qubits, blocks: BTreeMap::new() }
    }

    /// `count` spare physical ancilla qubits.
    pub fn qubits(&mut self, b: &mut Build, count: usize) -> Vec<u32> {
        while self.qubits.len() < count {
            let q = b.alloc(1)[0];
            self.qubits.push(q);
        }
        self.qubits[..count].to_vec()
    }

    /// `count` ancilla blocks of the given concatenation level.
    pub fn blocks(&mut self, b: &mut Build, level: u32, count: usize) -> Vec<ConcatLayout> {
        let entry = self.blocks.entry(level).or_default();
        while entry.len() < count {
            let block = ConcatLayout::over(level, b.alloc(9u32.pow(level)));
            entry.push(block);
        }
        entry[..count].to_vec()
    }
}

/// Convenience accessors for level-1 blocks.
pub(crate) fn grid(block: &ConcatLayout, i: usize, j: usize) -> u32 {
    debug_assert_eq!(block.levels, 1);
    block.qubits[3 * i + j]
}
