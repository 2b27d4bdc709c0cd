//! Code deformation for the logical CCZ: extend 3x3 -> 3x9, the transversal
//! CCZ layer, shrink back, and the assembled protocol.

use super::elements::{repetition_correct, RepRoundBasis};
use super::gauge_fix::{gauge_fix_steane, gauge_fix_teleport, GaugeFixMethod, TeleportRegisters};
use super::Build;
use crate::circuit::Circuit;
use crate::codes::{
    bacon_shor_at, encode_opts, BasisLabel, CodeKind, CodeLayout, GaugeSpec,
};

/// A 3x9 register assembled from three 3x3 blocks laid side by side
/// (row i of the wide code is the concatenation of the blocks' rows i).
#[derive(Debug, Clone)]
pub struct ExtendedRegister {
    pub wide: CodeLayout,
    pub blocks: [CodeLayout; 3],
}

fn widen(blocks: [CodeLayout; 3]) -> ExtendedRegister {
    let mut qubits = Vec::with_capacity(27);
    for i in 0..3 {
        for block in &blocks {
            for j in 0..3 {
                qubits.push(block.qubit(i, j));
            }
        }
    }
    let wide = CodeLayout { kind: CodeKind::BaconShor, n1: 3, n2: 9, qubits };
    ExtendedRegister { wide, blocks }
}

/// Extend gadget: two transversal CNOT layers copy the Shor-gauge row cats
/// onto two raw-zero blocks, with row-wise bit-flip repetition rounds
/// keeping single flips from spreading into the CCZ layer.
pub fn extend(
    b: &mut Build,
    reg: &CodeLayout,
    fresh1: &CodeLayout,
    fresh2: &CodeLayout,
    rep_anc: &[u32],
) -> ExtendedRegister {
    b.tcx(&reg.qubits, &fresh1.qubits);
    for i in 0..3 {
        let row: Vec<u32> = (0..3).map(|j| reg.qubit(i, j)).collect();
        repetition_correct(b, &row, RepRoundBasis::BitFlip, rep_anc);
        let row1: Vec<u32> = (0..3).map(|j| fresh1.qubit(i, j)).collect();
        repetition_correct(b, &row1, RepRoundBasis::BitFlip, rep_anc);
    }
    b.tcx(&reg.qubits, &fresh2.qubits);
    for i in 0..3 {
        let row2: Vec<u32> = (0..3).map(|j| fresh2.qubit(i, j)).collect();
        repetition_correct(b, &row2, RepRoundBasis::BitFlip, rep_anc);
    }
    widen([reg.clone(), fresh1.clone(), fresh2.clone()])
}

/// Shrink gadget: the inverse deformation, acting independently on each row
/// (a partial unencoding), so single phase flips cannot propagate across
/// rows. The two side blocks end in |0...0> and are reset.
pub fn shrink(b: &mut Build, ext: &ExtendedRegister) -> CodeLayout {
    let keep = &ext.blocks[0];
    for side in &ext.blocks[1..] {
        for i in 0..3 {
            for j in 0..3 {
                b.cx(keep.qubit(i, j), side.qubit(i, j));
            }
        }
    }
    for side in &ext.blocks[1..] {
        b.reset_all(&side.qubits);
    }
    keep.clone()
}

/// The single layer of 27 physical CCZ gates between three 3x9 registers,
/// with row permutations only across columns: gate (i, j) touches qubits
/// (i, j), (i + floor(j/3) mod 3, j), (i + j mod 3, j) of the three
/// registers.
pub fn transversal_ccz(b: &mut Build, regs: [&CodeLayout; 3]) {
    for reg in regs {
        assert_eq!((reg.n1, reg.n2), (3, 9));
    }
    for j in 0..9 {
        for i in 0..3 {
            let q1 = regs[0].qubit(i, j);
            let q2 = regs[1].qubit((i + j / 3) % 3, j);
            let q3 = regs[2].qubit((i + j) % 3, j);
            b.ccz(q1, q2, q3);
        }
    }
}

/// A built CCZ protocol with its register bookkeeping.
#[derive(Debug, Clone)]
pub struct CczProtocol {
    pub circuit: Circuit,
    /// Final 3x3 register of each logical qubit.
    pub outputs: [CodeLayout; 3],
    /// Spare reset-able ancillas (usable by decode suffixes).
    pub spare: Vec<u32>,
}

/// Full measurement-free CCZ protocol: per logical qubit gauge fixing,
/// extension to 3x9, the joint transversal CCZ layer, and the shrink back
/// to 3x3. Inputs are encoded without errors. Each pipeline owns three
/// 9-qubit registers, recycled through the resets of the teleportation and
/// shrink steps; three ancillas are shared by the repetition rounds and the
/// Steane sweep.
pub fn ccz_protocol(
    method: GaugeFixMethod,
    inputs: [BasisLabel; 3],
    gauge: &GaugeSpec,
) -> Result<CczProtocol, crate::codes::CodeError> {
    let mut b = Build::new();
    let regs: Vec<[CodeLayout; 3]> = (0..3)
        .map(|_| {
            [
                bacon_shor_at(3, 3, b.alloc(9)).unwrap(),
                bacon_shor_at(3, 3, b.alloc(9)).unwrap(),
                bacon_shor_at(3, 3, b.alloc(9)).unwrap(),
            ]
        })
        .collect();
    let shared = b.alloc(3);

    // ideal input preparation
    for k in 0..3 {
        let prep = encode_opts(&regs[k][0], gauge, inputs[k], false)?;
        b.circuit.extend_from(&prep);
    }

    let mut extended: Vec<ExtendedRegister> = Vec::with_capacity(3);
    for k in 0..3 {
        let [a, r1, r2] = &regs[k];
        let ext = match method {
            GaugeFixMethod::Teleport => {
                gauge_fix_teleport(
                    &mut b,
                    a,
                    TeleportRegisters { bell: r1, output: r2 },
                    &shared,
                );
                // a and r1 are fully reset now; recycle them as the extend blocks
                extend(&mut b, &r2.clone(), &a.clone(), &r1.clone(), &shared)
            }
            GaugeFixMethod::Steane => {
                gauge_fix_steane(&mut b, a, &shared);
                extend(&mut b, &a.clone(), &r1.clone(), &r2.clone(), &shared)
            }
            GaugeFixMethod::None => {
                extend(&mut b, &a.clone(), &r1.clone(), &r2.clone(), &shared)
            }
        };
        extended.push(ext);
    }

    transversal_ccz(&mut b, [&extended[0].wide, &extended[1].wide, &extended[2].wide]);

    let mut outputs = Vec::with_capacity(3);
    for ext in &extended {
        outputs.push(shrink(&mut b, ext));
    }

    let mut circuit = b.circuit;
    circuit.metadata.insert("protocol".into(), "ccz".into());
    circuit.metadata.insert(
        "gaugefix".into(),
        match method {
            GaugeFixMethod::Teleport => "teleport",
            GaugeFixMethod::Steane => "steane",
            GaugeFixMethod::None => "none",
        }
        .into(),
    );
    circuit.metadata.insert(
        "input".into(),
        inputs.iter().map(|l| l.symbol()).collect::<String>(),
    );
    circuit.metadata.insert("gauge".into(), gauge.name().into());
    Ok(CczProtocol {
        circuit,
        outputs: [outputs[0].clone(), outputs[1].clone(), outputs[2].clone()],
        spare: shared,
    })
}
