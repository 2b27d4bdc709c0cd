//! Circuit transformations: the Toffoli-reset feedback decomposition into
//! one- and two-qubit gates, and the delayed-measurement Clifford
//! conversion used by the tableau benchmarks.

use crate::circuit::{Circuit, Condition, Gate, Instruction};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("instruction {0}: feedback controls are not followed by resets")]
    MissingReset(usize),
    #[error("instruction {index}: control qubit {qubit} reused before reset")]
    ControlReusedBeforeReset { index: usize, qubit: u32 },
    #[error("instruction {0}: conditioned multi-controlled gates are not convertible")]
    ConditionedFeedback(usize),
}

fn controls_reset_later(circuit: &Circuit, index: usize, controls: &[u32]) -> bool {
    controls.iter().all(|&c| {
        circuit.instructions[index + 1..]
            .iter()
            .any(|i| i.gate == Gate::Reset && i.operands[0] == c)
    })
}

/// Replaces every CCX/CCZ feedback gate (controls that are reset afterwards)
/// by: CX copies of the controls onto two auxiliary qubits, then the
/// reset-exploiting Toffoli gadget in one- and two-qubit gates. The gadget
/// equals the exact gate up to a phase on the control pair, which the
/// subsequent resets erase.
pub fn decompose_feedback(circuit: &Circuit) -> Result<Circuit, TransformError> {
    let mut out = Circuit::new(circuit.num_qubits, circuit.num_cbits);
    out.metadata = circuit.metadata.clone();
    let needs_aux = circuit
        .instructions
        .iter()
        .any(|i| matches!(i.gate, Gate::Ccx | Gate::Ccz));
    let (u1, u2) = if needs_aux {
        let base = out.num_qubits;
        out.num_qubits += 2;
        (base, base + 1)
    } else {
        (0, 0)
    };
    let push = |out: &mut Circuit, gate: Gate, ops: Vec<u32>, noisy: bool| {
        let mut i = Instruction::new(gate, ops);
        i.noisy = noisy;
        out.push(i);
    };
    for (index, instr) in circuit.instructions.iter().enumerate() {
        match instr.gate {
            Gate::Ccx | Gate::Ccz => {
                if instr.condition.is_some() {
                    return Err(TransformError::ConditionedFeedback(index));
                }
                let (a, b, t) = (instr.operands[0], instr.operands[1], instr.operands[2]);
                if !controls_reset_later(circuit, index, &[a, b]) {
                    return Err(TransformError::MissingReset(index));
                }
                let noisy = instr.noisy;
                push(&mut out, Gate::Cx, vec![a, u1], noisy);
                push(&mut out, Gate::Cx, vec![b, u2], noisy);
                if instr.gate == Gate::Ccx {
                    push(&mut out, Gate::H, vec![t], noisy);
                }
                push(&mut out, Gate::T, vec![t], noisy);
                push(&mut out, Gate::Cx, vec![u1, t], noisy);
                push(&mut out, Gate::Tdg, vec![t], noisy);
                push(&mut out, Gate::Cx, vec![u2, t], noisy);
                push(&mut out, Gate::T, vec![t], noisy);
                push(&mut out, Gate::Cx, vec![u1, t], noisy);
                push(&mut out, Gate::Tdg, vec![t], noisy);
                push(&mut out, Gate::Cx, vec![u2, t], noisy);
                if instr.gate == Gate::Ccx {
                    push(&mut out, Gate::H, vec![t], noisy);
                }
                push(&mut out, Gate::Reset, vec![u1], false);
                push(&mut out, Gate::Reset, vec![u2], false);
            }
            _ => out.push(instr.clone()),
        }
    }
    Ok(out)
}

/// Delayed-measurement conversion: every multi-controlled gate whose
/// controls are ancillas reset before any further quantum use becomes
/// MEASURE on the controls plus a conditioned Pauli on the target, with the
/// depolarizing channel of the original gate left behind as a noisy
/// multi-qubit identity at the same location and support.
pub fn clifford_convert(circuit: &Circuit) -> Result<Circuit, TransformError> {
    let mut out = Circuit::new(circuit.num_qubits, circuit.num_cbits);
    out.metadata = circuit.metadata.clone();
    // qubits that have been measured by the conversion and must not be used
    // quantum-mechanically (other than Pauli frames / re-measurement) until reset
    let mut pending: Vec<bool> = vec![false; circuit.num_qubits as usize];
    for (index, instr) in circuit.instructions.iter().enumerate() {
        let converts = matches!(instr.gate, Gate::Ccx | Gate::Ccz | Gate::Ckx(_) | Gate::Ckz(_));
        if converts {
            if instr.condition.is_some() {
                return Err(TransformError::ConditionedFeedback(index));
            }
            let n = instr.operands.len();
            let controls = &instr.operands[..n - 1];
            let target = instr.operands[n - 1];
            if pending[target as usize] {
                return Err(TransformError::ControlReusedBeforeReset { index, qubit: target });
            }
            let mut cond = Condition::default();
            for &c in controls {
                let bit = out.num_cbits;
                out.num_cbits += 1;
                let mut m = Instruction::new(Gate::Measure, vec![c]);
                m.target_bit = Some(bit);
                m.noisy = false;
                out.push(m);
                cond = cond.and(bit, true);
                pending[c as usize] = true;
            }
            let pauli = match instr.gate {
                Gate::Ccx | Gate::Ckx(_) => Gate::X,
                _ => Gate::Z,
            };
            let mut p = Instruction::new(pauli, vec![target]).with_condition(cond);
            p.noisy = false;
            out.push(p);
            if instr.noisy {
                let mut marker = Instruction::new(Gate::I, instr.operands.clone());
                marker.noisy = true;
                out.push(marker);
            }
        } else {
            match instr.gate {
                Gate::Reset => pending[instr.operands[0] as usize] = false,
                Gate::Measure | Gate::X | Gate::Y | Gate::Z | Gate::I => {}
                _ => {
                    for &q in &instr.operands {
                        if pending[q as usize] {
                            return Err(TransformError::ControlReusedBeforeReset {
                                index,
                                qubit: q,
                            });
                        }
                    }
                }
            }
            out.push(instr.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::validate;

    fn ccx_with_resets() -> Circuit {
        let mut c = Circuit::new(3, 0);
        c.push(Instruction::new(Gate::Ccx, vec![0, 1, 2]));
        c.push(Instruction::new(Gate::Reset, vec![0]));
        c.push(Instruction::new(Gate::Reset, vec![1]));
        c
    }

    #[test]
    fn decompose_produces_small_gates_only() {
        let c = ccx_with_resets();
        let d = decompose_feedback(&c).unwrap();
        assert!(validate(&d).is_empty());
        assert!(d
            .instructions
            .iter()
            .all(|i| !matches!(i.gate, Gate::Ccx | Gate::Ccz | Gate::Ckx(_) | Gate::Ckz(_))));
        assert!(d.instructions.iter().all(|i| i.operands.len() <= 2));
        assert_eq!(d.num_qubits, 5);
    }

    #[test]
    fn decompose_requires_reset() {
        let mut c = Circuit::new(3, 0);
        c.push(Instruction::new(Gate::Ccx, vec![0, 1, 2]));
        assert_eq!(decompose_feedback(&c).unwrap_err(), TransformError::MissingReset(0));
    }

    #[test]
    fn decompose_leaves_plain_circuits_alone() {
        let mut c = Circuit::new(2, 0);
        c.push(Instruction::new(Gate::H, vec![0]));
        c.push(Instruction::new(Gate::Cx, vec![0, 1]));
        let d = decompose_feedback(&c).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn convert_emits_measures_and_marker() {
        let c = ccx_with_resets();
        let v = clifford_convert(&c).unwrap();
        assert!(validate(&v).is_empty());
        assert_eq!(v.num_cbits, 2);
        assert_eq!(v.count_gate(Gate::Measure), 2);
        assert_eq!(v.count_gate(Gate::I), 1);
        let marker = v.instructions.iter().find(|i| i.gate == Gate::I).unwrap();
        assert_eq!(marker.operands, vec![0, 1, 2]);
        assert!(marker.noisy);
        // conditioned X on the target with a two-literal conjunction
        let x = v.instructions.iter().find(|i| i.gate == Gate::X).unwrap();
        assert_eq!(x.condition.as_ref().unwrap().literals.len(), 2);
    }

    #[test]
    fn convert_rejects_control_reuse() {
        let mut c = Circuit::new(3, 0);
        c.push(Instruction::new(Gate::Ccx, vec![0, 1, 2]));
        c.push(Instruction::new(Gate::H, vec![0]));
        let e = clifford_convert(&c).unwrap_err();
        assert_eq!(e, TransformError::ControlReusedBeforeReset { index: 1, qubit: 0 });
    }

    #[test]
    fn convert_passes_plain_circuits() {
        let mut c = Circuit::new(2, 0);
        c.push(Instruction::new(Gate::H, vec![0]));
        c.push(Instruction::new(Gate::Cx, vec![0, 1]));
        let v = clifford_convert(&c).unwrap();
        assert_eq!(c, v);
    }
}
