//! Measurement-free QEC rounds for the (concatenated) 3x3 Bacon-Shor code.
//!
//! A round is a C_X subcircuit (Z-type stabilizers extracted to ancillas,
//! Toffoli feedback flipping the flagged column) followed by the mirrored
//! C_Z subcircuit. The three-ancilla variant extracts S1, S2 and the
//! redundant S3 = S1 S2; the four-ancilla variant extracts S1 and S2 twice
//! and decodes with anticontrols. At layer m > 1 the ancillas are logical
//! qubits of layer m-1: extraction pairs are transversal logical CX gates
//! with a subround on the ancilla after each gauge extraction, and feedback
//! goes through the unencoding gadget (the disposable Toffoli gadget).

use super::elements::{append_plus_prep, append_zero_prep, unencode_x, unencode_z};
use super::{grid, Build, Pool};
use crate::circuit::Circuit;
use crate::codes::ConcatLayout;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AncillaVariant {
    ThreeAnc,
    FourAnc,
}

impl AncillaVariant {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "3anc" => Some(AncillaVariant::ThreeAnc),
            "4anc" => Some(AncillaVariant::FourAnc),
            _ => None,
        }
    }

    fn ancilla_count(self) -> usize {
        match self {
            AncillaVariant::ThreeAnc => 3,
            AncillaVariant::FourAnc => 4,
        }
    }

    /// Extraction schedule: which stabilizer (by its unit-index pair) each
    /// ancilla collects. Units are columns for C_X, rows for C_Z.
    fn extraction(self) -> Vec<(usize, usize)> {
        match self {
            AncillaVariant::ThreeAnc => vec![(0, 1), (1, 2), (0, 2)],
            AncillaVariant::FourAnc => vec![(0, 1), (1, 2), (0, 1), (1, 2)],
        }
    }

    /// Decode table: per corrected unit, the (ancilla index, wanted value)
    /// control list, in firing order. Anticontrols appear only in the
    /// four-ancilla table. The firing patterns are (1,0,1,0) -> unit 0,
    /// (1,1,1,1) -> unit 1 and (0,1,0,1) -> unit 2; each redundant literal
    /// is dropped so every rule leaves one ancilla untouched by the others,
    /// and the all-controls rule runs last. A correlated fault on one
    /// feedback gate then cannot fabricate a later rule's pattern: the
    /// untouched ancilla still blocks it.
    fn decode_rules(self) -> Vec<(usize, Vec<(usize, bool)>)> {
        match self {
            AncillaVariant::ThreeAnc => vec![
                (0, vec![(0, true), (2, true)]),
                (1, vec![(0, true), (1, true)]),
                (2, vec![(1, true), (2, true)]),
            ],
            AncillaVariant::FourAnc => vec![
                (0, vec![(0, true), (1, false), (2, true)]),
                (2, vec![(1, true), (2, false), (3, true)]),
                (1, vec![(0, true), (1, true), (2, true), (3, true)]),
            ],
        }
    }
}

/// Ancilla register handle: a bare qubit at layer 1, a logical block above.
enum Anc {
    Qubit(u32),
    Block(ConcatLayout),
}

/// C_X^(m): extracts Z-type stabilizers (column-pair parities) and corrects
/// bit flips with multi-controlled feedback onto the flagged column.
pub fn append_cx_round(b: &mut Build, data: &ConcatLayout, variant: AncillaVariant, pool: &mut Pool) {
    let m = data.levels;
    let count = variant.ancilla_count();
    let ancs: Vec<Anc> = if m == 1 {
        pool.qubits(b, count).into_iter().map(Anc::Qubit).collect()
    } else {
        pool.blocks(b, m - 1, count).into_iter().map(Anc::Block).collect()
    };
    // extraction
    for (anc, &(c1, c2)) in ancs.iter().zip(&variant.extraction()) {
        match anc {
            Anc::Qubit(a) => {
                for i in 0..3 {
                    b.cx(grid(data, i, c1), *a);
                    b.cx(grid(data, i, c2), *a);
                }
            }
            Anc::Block(ab) => {
                append_zero_prep(b, ab, false);
                for i in 0..3 {
                    b.tcx(&data.block(i, c1).qubits, &ab.qubits);
                    b.tcx(&data.block(i, c2).qubits, &ab.qubits);
                    append_cz_round(b, ab, variant, pool);
                }
            }
        }
    }
    // disposable Toffoli feedback
    let reps: Vec<Vec<u32>> = ancs
        .iter()
        .map(|anc| match anc {
            Anc::Qubit(a) => vec![*a],
            Anc::Block(ab) => unencode_z(b, ab),
        })
        .collect();
    for (col, controls) in variant.decode_rules() {
        let targets: Vec<u32> = if m == 1 {
            vec![grid(data, 0, col)]
        } else {
            data.block(0, col).x_support()
        };
        apply_controlled_x(b, &reps, &controls, &targets);
    }
    for anc in &ancs {
        match anc {
            Anc::Qubit(a) => b.reset(*a),
            Anc::Block(ab) => b.reset_all(&ab.qubits),
        }
    }
}

/// C_Z^(m): extracts X-type stabilizers (row-pair X parities) and corrects
/// phase flips with controlled-Z feedback onto the flagged row.
pub fn append_cz_round(b: &mut Build, data: &ConcatLayout, variant: AncillaVariant, pool: &mut Pool) {
    let m = data.levels;
    let count = variant.ancilla_count();
    let ancs: Vec<Anc> = if m == 1 {
        pool.qubits(b, count).into_iter().map(Anc::Qubit).collect()
    } else {
        pool.blocks(b, m - 1, count).into_iter().map(Anc::Block).collect()
    };
    for (anc, &(r1, r2)) in ancs.iter().zip(&variant.extraction()) {
        match anc {
            Anc::Qubit(a) => {
                b.h(*a);
                for j in 0..3 {
                    b.cx(*a, grid(data, r1, j));
                    b.cx(*a, grid(data, r2, j));
                }
            }
            Anc::Block(ab) => {
                append_plus_prep(b, ab, false);
                for j in 0..3 {
                    b.tcx(&ab.qubits, &data.block(r1, j).qubits);
                    b.tcx(&ab.qubits, &data.block(r2, j).qubits);
                    append_cx_round(b, ab, variant, pool);
                }
            }
        }
    }
    // convert the X-basis syndrome into bit registers
    let reps: Vec<Vec<u32>> = ancs
        .iter()
        .map(|anc| match anc {
            Anc::Qubit(a) => {
                b.h(*a);
                vec![*a]
            }
            Anc::Block(ab) => {
                let rs = unencode_x(b, ab);
                for &r in &rs {
                    b.h(r);
                }
                rs
            }
        })
        .collect();
    for (row, controls) in variant.decode_rules() {
        let targets: Vec<u32> = if m == 1 {
            vec![grid(data, row, 0)]
        } else {
            data.block(row, 0).z_support()
        };
        apply_controlled_z(b, &reps, &controls, &targets);
    }
    for anc in &ancs {
        match anc {
            Anc::Qubit(a) => b.reset(*a),
            Anc::Block(ab) => b.reset_all(&ab.qubits),
        }
    }
}

/// Transversal multi-controlled X from repetition registers onto a logical
/// X support, with X sandwiches realizing anticontrols.
fn apply_controlled_x(b: &mut Build, reps: &[Vec<u32>], controls: &[(usize, bool)], targets: &[u32]) {
    sandwich(b, reps, controls, true);
    for (t, &target) in targets.iter().enumerate() {
        let cs: Vec<u32> = controls.iter().map(|&(a, _)| reps[a][t]).collect();
        if cs.len() == 2 {
            b.ccx(cs[0], cs[1], target);
        } else {
            b.ckx(&cs, target);
        }
    }
    sandwich(b, reps, controls, false);
}

fn apply_controlled_z(b: &mut Build, reps: &[Vec<u32>], controls: &[(usize, bool)], targets: &[u32]) {
    sandwich(b, reps, controls, true);
    for (t, &target) in targets.iter().enumerate() {
        let cs: Vec<u32> = controls.iter().map(|&(a, _)| reps[a][t]).collect();
        if cs.len() == 2 {
            b.ccz(cs[0], cs[1], target);
        } else {
            let mut ops = cs.clone();
            ops.push(target);
            b.push_gate(crate::circuit::Gate::Ckz(cs.len() as u8), ops);
        }
    }
    sandwich(b, reps, controls, false);
}

fn sandwich(b: &mut Build, reps: &[Vec<u32>], controls: &[(usize, bool)], _opening: bool) {
    for &(a, wanted) in controls {
        if !wanted {
            for &q in &reps[a] {
                b.x(q);
            }
        }
    }
}

/// Full QEC round: C_X then C_Z.
pub fn append_qec_round(b: &mut Build, data: &ConcatLayout, variant: AncillaVariant, pool: &mut Pool) {
    append_cx_round(b, data, variant, pool);
    append_cz_round(b, data, variant, pool);
}

/// A built QEC-round circuit with its register views.
#[derive(Debug, Clone)]
pub struct BuiltQec {
    pub circuit: Circuit,
    pub data: ConcatLayout,
    /// Spare reset-able qubit for the ideal-decode suffix.
    pub spare: u32,
}

/// Builds `rounds` noisy QEC rounds at concatenation layer `levels` on a
/// fresh data register (input state to be prepended by the caller).
pub fn qec_round(levels: u32, variant: AncillaVariant, rounds: u32) -> BuiltQec {
    let mut b = Build::new();
    let data = b.alloc_block(levels);
    let mut pool = Pool::new();
    for _ in 0..rounds {
        append_qec_round(&mut b, &data, variant, &mut pool);
    }
    let spare = b.alloc(1)[0];
    let mut circuit = b.circuit;
    circuit.metadata.insert("protocol".into(), format!("qec{levels}"));
    circuit.metadata.insert("layer".into(), levels.to_string());
    circuit.metadata.insert(
        "variant".into(),
        match variant {
            AncillaVariant::ThreeAnc => "3anc".into(),
            AncillaVariant::FourAnc => "4anc".to_string(),
        },
    );
    BuiltQec { circuit, data, spare }
}
