//! Shared circuit elements: logical state preparation, the unencoding
//! gadgets, the measurement-free repetition-code correction round, and the
//! trivial transversal logical gates.

use super::{grid, Build};
use crate::circuit::Gate;
use crate::codes::{BasisLabel, CodeLayout, ConcatLayout};

/// Prepares a Shor-gauge logical |+> (or |->) on a raw-zero block: a cat
/// seed per row fanned out across the row; rows of blocks recursively.
pub fn append_plus_prep(b: &mut Build, block: &ConcatLayout, minus: bool) {
    if block.levels == 1 {
        for i in 0..3 {
            let seed = grid(block, i, 0);
            b.h(seed);
            if minus {
                b.z(seed);
            }
            b.cx(seed, grid(block, i, 1));
            b.cx(seed, grid(block, i, 2));
        }
    } else {
        for i in 0..3 {
            let seed = block.block(i, 0);
            append_plus_prep(b, &seed, minus);
            b.tcx(&seed.qubits, &block.block(i, 1).qubits);
            b.tcx(&seed.qubits, &block.block(i, 2).qubits);
        }
    }
}

/// Prepares a Shor-gauge logical |0> (or |1>) on a raw-zero block via the
/// even-row-parity cat construction: two seed rows in superposition, the
/// third carrying their parity, each row fanned into a cat.
pub fn append_zero_prep(b: &mut Build, block: &ConcatLayout, one: bool) {
    if block.levels == 1 {
        let s0 = grid(block, 0, 0);
        let s1 = grid(block, 1, 0);
        let s2 = grid(block, 2, 0);
        b.h(s0);
        b.h(s1);
        b.cx(s0, s2);
        b.cx(s1, s2);
        for i in 0..3 {
            let seed = grid(block, i, 0);
            b.cx(seed, grid(block, i, 1));
            b.cx(seed, grid(block, i, 2));
        }
    } else {
        let b00 = block.block(0, 0);
        let b10 = block.block(1, 0);
        let b20 = block.block(2, 0);
        append_plus_prep(b, &b00, false);
        append_plus_prep(b, &b10, false);
        b.tcx(&b00.qubits, &b20.qubits);
        b.tcx(&b10.qubits, &b20.qubits);
        for i in 0..3 {
            let seed = block.block(i, 0);
            b.tcx(&seed.qubits, &block.block(i, 1).qubits);
            b.tcx(&seed.qubits, &block.block(i, 2).qubits);
        }
    }
    if one {
        for q in block.x_support() {
            b.x(q);
        }
    }
}

/// Shor-gauge eigenstate preparation for any of the four logical basis
/// labels, at any concatenation level.
pub fn append_logical_state_prep(b: &mut Build, block: &ConcatLayout, label: BasisLabel) {
    match label {
        BasisLabel::Zero => append_zero_prep(b, block, false),
        BasisLabel::One => append_zero_prep(b, block, true),
        BasisLabel::Plus => append_plus_prep(b, block, false),
        BasisLabel::Minus => {
            append_plus_prep(b, block, true);
        }
    }
}

/// Unencoding gadget Lambda_Z: folds each column's Z_L value onto its
/// column-representative qubit, resets the rest, and recurses. All
/// operations stay within one column. Returns the bit-flip repetition
/// register (length 3^(levels-1)).
pub fn unencode_z(b: &mut Build, block: &ConcatLayout) -> Vec<u32> {
    if block.levels == 1 {
        let mut reps = Vec::with_capacity(3);
        for j in 0..3 {
            let rep = grid(block, 0, j);
            b.cx(grid(block, 1, j), rep);
            b.cx(grid(block, 2, j), rep);
            b.reset(grid(block, 1, j));
            b.reset(grid(block, 2, j));
            reps.push(rep);
        }
        reps
    } else {
        let mut reps = Vec::new();
        for j in 0..3 {
            let keep = block.block(0, j);
            b.tcx(&block.block(1, j).qubits, &keep.qubits);
            b.tcx(&block.block(2, j).qubits, &keep.qubits);
            b.reset_all(&block.block(1, j).qubits);
            b.reset_all(&block.block(2, j).qubits);
            reps.extend(unencode_z(b, &keep));
        }
        reps
    }
}

/// Mirror gadget Lambda_X: folds each row's X_L value onto its
/// row-representative qubit (phase-flip repetition register). All
/// operations stay within one row.
pub fn unencode_x(b: &mut Build, block: &ConcatLayout) -> Vec<u32> {
    if block.levels == 1 {
        let mut reps = Vec::with_capacity(3);
        for i in 0..3 {
            let rep = grid(block, i, 0);
            b.cx(rep, grid(block, i, 1));
            b.cx(rep, grid(block, i, 2));
            b.reset(grid(block, i, 1));
            b.reset(grid(block, i, 2));
            reps.push(rep);
        }
        reps
    } else {
        let mut reps = Vec::new();
        for i in 0..3 {
            let keep = block.block(i, 0);
            b.tcx(&keep.qubits, &block.block(i, 1).qubits);
            b.tcx(&keep.qubits, &block.block(i, 2).qubits);
            b.reset_all(&block.block(i, 1).qubits);
            b.reset_all(&block.block(i, 2).qubits);
            reps.extend(unencode_x(b, &keep));
        }
        reps
    }
}

/// Repetition-basis selector for the correction round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepRoundBasis {
    BitFlip,
    PhaseFlip,
}

/// Measurement-free repetition-code correction round on a 3-qubit register:
/// both pairwise parities plus the redundant third (q0, q2) parity are
/// extracted onto three fresh ancillas, pair-controlled Toffoli feedback
/// corrects any single flip, and the ancillas are reset. The redundancy
/// keeps mid-extraction flips of the shared qubit from being mistaken for
/// edge flips (weight-1 syndromes trigger nothing).
pub fn repetition_correct(b: &mut Build, reg: &[u32], basis: RepRoundBasis, anc: &[u32]) {
    assert_eq!(reg.len(), 3);
    assert!(anc.len() >= 3);
    let (a0, a1, a2) = (anc[0], anc[1], anc[2]);
    match basis {
        RepRoundBasis::BitFlip => {
            b.cx(reg[0], a0);
            b.cx(reg[1], a0);
            b.cx(reg[1], a1);
            b.cx(reg[2], a1);
            b.cx(reg[0], a2);
            b.cx(reg[2], a2);
            // (1,0,1) -> reg0, (1,1,0) -> reg1, (0,1,1) -> reg2
            b.ccx(a0, a2, reg[0]);
            b.ccx(a0, a1, reg[1]);
            b.ccx(a1, a2, reg[2]);
        }
        RepRoundBasis::PhaseFlip => {
            for (a, (u, v)) in [(a0, (0, 1)), (a1, (1, 2)), (a2, (0, 2))] {
                b.h(a);
                b.cx(a, reg[u]);
                b.cx(a, reg[v]);
                b.h(a);
            }
            b.ccz(a0, a2, reg[0]);
            b.ccz(a0, a1, reg[1]);
            b.ccz(a1, a2, reg[2]);
        }
    }
    b.reset(a0);
    b.reset(a1);
    b.reset(a2);
}

/// Transversal logical Pauli (X on the X_L row, Z on the Z_L column, Y as
/// both with the crossing qubit carrying Y).
pub fn transversal_pauli(b: &mut Build, layout: &CodeLayout, gate: Gate) {
    match gate {
        Gate::X => {
            for j in 0..layout.n2 {
                b.x(layout.qubit(0, j));
            }
        }
        Gate::Z => {
            for i in 0..layout.n1 {
                b.z(layout.qubit(i, 0));
            }
        }
        _ => panic!("transversal_pauli takes X or Z"),
    }
}

/// Transversal logical CNOT between two equal Bacon-Shor blocks.
pub fn transversal_cnot(b: &mut Build, control: &CodeLayout, target: &CodeLayout) {
    assert_eq!(control.num_qubits(), target.num_qubits());
    b.tcx(&control.qubits, &target.qubits);
}

/// Transversal logical Hadamard: H on every qubit plus the row/column
/// relabeling, returned as the transposed layout.
pub fn transversal_hadamard(b: &mut Build, layout: &CodeLayout) -> CodeLayout {
    for &q in &layout.qubits {
        b.h(q);
    }
    let mut transposed = Vec::with_capacity(layout.qubits.len());
    for j in 0..layout.n2 {
        for i in 0..layout.n1 {
            transposed.push(layout.qubit(i, j));
        }
    }
    CodeLayout { kind: layout.kind, n1: layout.n2, n2: layout.n1, qubits: transposed }
}
