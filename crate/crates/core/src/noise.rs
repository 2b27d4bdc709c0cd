//! Depolarizing-channel trajectory sampling and deterministic fault
//! injection. After each noisy l-qubit gate, with probability p a Pauli is
//! drawn uniformly from the 4^l - 1 non-identity strings on its support.

use crate::circuit::{Circuit, FaultLocation, Gate, Instruction};
use crate::pauli::{PauliOp, PauliString};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NoiseError {
    #[error("fault location at instruction {0} does not belong to the circuit")]
    LocationMismatch(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub p: f64,
}

impl NoiseModel {
    pub fn new(p: f64) -> Self {
        assert!((0.0..=1.0).contains(&p), "error probability out of range");
        NoiseModel { p }
    }
}

/// Sampled or constructed Pauli faults, one per chosen location.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FaultAssignment {
    pub faults: Vec<(FaultLocation, PauliString)>,
}

impl FaultAssignment {
    pub fn is_empty(&self) -> bool {
        self.faults.is_empty()
    }

    pub fn len(&self) -> usize {
        self.faults.len()
    }
}

/// Per-shot generator: one master seed, one ChaCha stream per shot index,
/// so parallel and serial runs agree. (Stream 0 is reserved for the
/// experiment driver itself.)
pub fn shot_rng(master_seed: u64, shot: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(shot.wrapping_add(1));
    rng
}

/// The `index`-th non-identity Pauli string (1-based, 1..4^l-1) on `support`,
/// by base-4 digits with 0=I, 1=X, 2=Y, 3=Z.
pub fn pauli_from_index(support: &[u32], mut index: u64) -> PauliString {
    let mut ops = Vec::new();
    for &q in support {
        let digit = index % 4;
        index /= 4;
        match digit {
            0 => {}
            1 => ops.push((q, PauliOp::X)),
            2 => ops.push((q, PauliOp::Y)),
            _ => ops.push((q, PauliOp::Z)),
        }
    }
    PauliString::from_ops(ops)
}

/// Independent Bernoulli(p) per fault location; on success a uniform choice
/// among the non-identity strings. Deterministic per generator state.
pub fn sample_faults<R: Rng + ?Sized>(
    locations: &[FaultLocation],
    model: &NoiseModel,
    rng: &mut R,
) -> FaultAssignment {
    let mut faults = Vec::new();
    for loc in locations {
        if rng.random::<f64>() < model.p {
            let count = 4u64.pow(loc.arity as u32) - 1;
            let index = rng.random_range(1..=count);
            faults.push((loc.clone(), pauli_from_index(&loc.support, index)));
        }
    }
    FaultAssignment { faults }
}

/// Builds a new circuit with the fault Paulis inserted immediately after the
/// faulted instructions, marked noiseless.
pub fn inject(circuit: &Circuit, assignment: &FaultAssignment) -> Result<Circuit, NoiseError> {
    for (loc, _) in &assignment.faults {
        let instr = circuit
            .instructions
            .get(loc.instruction_index)
            .ok_or(NoiseError::LocationMismatch(loc.instruction_index))?;
        if instr.operands != loc.support || !instr.noisy {
            return Err(NoiseError::LocationMismatch(loc.instruction_index));
        }
    }
    let mut out = Circuit::new(circuit.num_qubits, circuit.num_cbits);
    out.metadata = circuit.metadata.clone();
    for (idx, instr) in circuit.instructions.iter().enumerate() {
        out.push(instr.clone());
        for (loc, pauli) in &assignment.faults {
            if loc.instruction_index == idx {
                append_pauli(&mut out, pauli);
            }
        }
    }
    Ok(out)
}

/// Appends a Pauli string as noiseless single-qubit instructions.
pub fn append_pauli(circuit: &mut Circuit, pauli: &PauliString) {
    for (q, op) in pauli.iter() {
        let gate = match op {
            PauliOp::X => Gate::X,
            PauliOp::Y => Gate::Y,
            PauliOp::Z => Gate::Z,
        };
        circuit.push(Instruction::new(gate, vec![q]).noiseless());
    }
}
