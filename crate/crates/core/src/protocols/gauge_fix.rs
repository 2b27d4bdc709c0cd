//! Measurement-free gauge fixing: the logical state is brought to the Shor
//! gauge (all within-row ZZ gauges +1), either by teleportation onto a fresh
//! Shor-gauge register or by a Steane-type row sweep.

use super::elements::{repetition_correct, RepRoundBasis};
use super::Build;
use crate::codes::CodeLayout;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeFixMethod {
    Teleport,
    Steane,
    None,
}

impl GaugeFixMethod {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "teleport" => Some(GaugeFixMethod::Teleport),
            "steane" => Some(GaugeFixMethod::Steane),
            "none" => Some(GaugeFixMethod::None),
            _ => None,
        }
    }
}

/// The two consumed registers of the teleportation protocol. Both are fully
/// reset when the protocol finishes and can be recycled.
pub struct TeleportRegisters<'a> {
    pub bell: &'a CodeLayout,
    pub output: &'a CodeLayout,
}

/// Teleportation gauge fixing. A logical Bell pair is prepared in the Shor
/// gauge (the second half does not need encoding: transversal CX from the
/// row cats onto raw zeros extends them), the input is entangled with it,
/// and both halves are unencoded into repetition registers that drive the
/// Pauli-correction fan-out onto the output register. The bit-flip
/// repetition register gets a majority round first, which is what corrects
/// single bit flips on the input.
pub fn gauge_fix_teleport(
    b: &mut Build,
    input: &CodeLayout,
    regs: TeleportRegisters<'_>,
    rep_anc: &[u32],
) {
    let bell = regs.bell;
    let out = regs.output;
    // |+>_L in the Shor gauge: one cat per row
    for i in 0..3 {
        let seed = bell.qubit(i, 0);
        b.h(seed);
        b.cx(seed, bell.qubit(i, 1));
        b.cx(seed, bell.qubit(i, 2));
    }
    // Bell-pair completion onto the raw-zero output register
    b.tcx(&bell.qubits, &out.qubits);
    // entangle the input with the Bell half
    b.tcx(&input.qubits, &bell.qubits);
    // unencode the Bell half: column parities onto row-0 representatives
    let mut reps_b = Vec::with_capacity(3);
    for j in 0..3 {
        let rep = bell.qubit(0, j);
        b.cx(bell.qubit(1, j), rep);
        b.cx(bell.qubit(2, j), rep);
        b.reset(bell.qubit(1, j));
        b.reset(bell.qubit(2, j));
        reps_b.push(rep);
    }
    // majority-correct the bit-flip repetition register
    repetition_correct(b, &reps_b, RepRoundBasis::BitFlip, rep_anc);
    // conditioned X_L fan-out, column-matched so residual flips pair up into
    // gauge operators on the output
    for j in 0..3 {
        b.cx(reps_b[j], out.qubit(0, j));
    }
    // unencode the input: row X_L values onto column-0 representatives
    let mut reps_a = Vec::with_capacity(3);
    for i in 0..3 {
        let rep = input.qubit(i, 0);
        b.cx(rep, input.qubit(i, 1));
        b.cx(rep, input.qubit(i, 2));
        b.reset(input.qubit(i, 1));
        b.reset(input.qubit(i, 2));
        reps_a.push(rep);
    }
    for &rep in &reps_a {
        b.h(rep);
    }
    // conditioned Z_L fan-out, row-matched
    for i in 0..3 {
        b.cz(reps_a[i], out.qubit(i, 0));
    }
    b.reset_all(&reps_a);
    b.reset_all(&reps_b);
}

/// Steane-type gauge fixing: sweeps the rows, extracting each row's ZZ
/// gauges redundantly onto three ancillas; a detected flip is pushed to the
/// next row by an XX gauge pair. The last row receives only the first half
/// of the correction, fixing the remaining bit flip in place.
pub fn gauge_fix_steane(b: &mut Build, reg: &CodeLayout, anc: &[u32]) {
    assert_eq!(anc.len(), 3);
    for i in 0..3 {
        let (a1, a2, a3) = (anc[0], anc[1], anc[2]);
        // redundant extraction: g1 = Z(i,0)Z(i,1), g2 = Z(i,1)Z(i,2), g3 = g1 g2
        b.cx(reg.qubit(i, 0), a1);
        b.cx(reg.qubit(i, 1), a1);
        b.cx(reg.qubit(i, 1), a2);
        b.cx(reg.qubit(i, 2), a2);
        b.cx(reg.qubit(i, 0), a3);
        b.cx(reg.qubit(i, 2), a3);
        // (1,0,1)->col0, (1,1,0)->col1, (0,1,1)->col2
        let rules = [(a1, a3, 0usize), (a1, a2, 1), (a2, a3, 2)];
        for &(ca, cb, col) in &rules {
            b.ccx(ca, cb, reg.qubit(i, col));
            if i < 2 {
                // XX gauge partner on the next row moves the flip down
                b.ccx(ca, cb, reg.qubit(i + 1, col));
            }
        }
        b.reset_all(anc);
    }
}
