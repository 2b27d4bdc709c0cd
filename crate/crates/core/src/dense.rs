//! Dense brute-force state-vector oracle.
//!
//! Verification-only engine: direct matrix action on the full 2^n amplitude
//! table, written independently of the sparse engine so the two can be
//! cross-checked on small instances.

use crate::circuit::{Circuit, Gate};
use crate::sparse::{SimError, SparseState};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::FRAC_1_SQRT_2;

pub const DENSE_MAX_QUBITS: u32 = 20;

#[derive(Debug, Clone)]
pub struct DenseState {
    pub num_qubits: u32,
    pub amps: Vec<Complex64>,
}

/// Runs the circuit from |0...0> by direct matrix action. The generator is
/// consumed only by RESET, mirroring the sparse trajectory semantics so the
/// engines can be driven with identically seeded generators.
pub fn run_dense_oracle<R: Rng + ?Sized>(
    circuit: &Circuit,
    rng: &mut R,
) -> Result<DenseState, SimError> {
    let n = circuit.num_qubits;
    if n > DENSE_MAX_QUBITS {
        return Err(SimError::RegisterTooLarge(n));
    }
    let dim = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[0] = Complex64::new(1.0, 0.0);
    let bits = vec![false; circuit.num_cbits as usize];

    for instr in &circuit.instructions {
        for &q in &instr.operands {
            if q >= n {
                return Err(SimError::OperandOutOfRange(q));
            }
        }
        if let Some(cond) = &instr.condition {
            if !cond.eval(&bits) {
                continue;
            }
        }
        match instr.gate {
            Gate::I => {}
            Gate::X => {
                let m = 1usize << instr.operands[0];
                for i in 0..dim {
                    if i & m == 0 {
                        amps.swap(i, i | m);
                    }
                }
            }
            Gate::Y => {
                let m = 1usize << instr.operands[0];
                for i in 0..dim {
                    if i & m == 0 {
                        let a0 = amps[i];
                        let a1 = amps[i | m];
                        amps[i] = Complex64::new(0.0, -1.0) * a1;
                        amps[i | m] = Complex64::new(0.0, 1.0) * a0;
                    }
                }
            }
            Gate::Z => {
                let m = 1usize << instr.operands[0];
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::S | Gate::T | Gate::Tdg => {
                let m = 1usize << instr.operands[0];
                let ph = match instr.gate {
                    Gate::S => Complex64::new(0.0, 1.0),
                    Gate::T => Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
                    _ => Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
                };
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a *= ph;
                    }
                }
            }
            Gate::H => {
                let m = 1usize << instr.operands[0];
                for i in 0..dim {
                    if i & m == 0 {
                        let a0 = amps[i];
                        let a1 = amps[i | m];
                        amps[i] = (a0 + a1) * FRAC_1_SQRT_2;
                        amps[i | m] = (a0 - a1) * FRAC_1_SQRT_2;
                    }
                }
            }
            Gate::Cx | Gate::Ccx | Gate::Ckx(_) => {
                let nops = instr.operands.len();
                let mut cmask = 0usize;
                for &q in &instr.operands[..nops - 1] {
                    cmask |= 1 << q;
                }
                let t = 1usize << instr.operands[nops - 1];
                for i in 0..dim {
                    if i & cmask == cmask && i & t == 0 {
                        amps.swap(i, i | t);
                    }
                }
            }
            Gate::Cz | Gate::Ccz | Gate::Ckz(_) => {
                let mut mask = 0usize;
                for &q in &instr.operands {
                    mask |= 1 << q;
                }
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
            Gate::Reset => {
                let m = 1usize << instr.operands[0];
                let p1: f64 = amps
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i & m != 0)
                    .map(|(_, a)| a.norm_sqr())
                    .sum();
                let outcome = rng.random::<f64>() < p1;
                let keep = if outcome { m } else { 0 };
                let mut next = vec![Complex64::new(0.0, 0.0); dim];
                let mut norm = 0.0;
                for (i, a) in amps.iter().enumerate() {
                    if i & m == keep {
                        next[i & !m] += *a;
                        norm += a.norm_sqr();
                    }
                }
                let scale = 1.0 / norm.sqrt();
                for a in next.iter_mut() {
                    *a *= scale;
                }
                amps = next;
            }
            Gate::Measure => return Err(SimError::MeasureUnsupported),
        }
    }
    Ok(DenseState { num_qubits: n, amps })
}

/// Maximum absolute amplitude deviation after aligning the global phase on
/// the largest-magnitude dense amplitude. Absent sparse keys count as zero.
pub fn compare_states(sparse: &SparseState, dense: &DenseState) -> Result<f64, SimError> {
    if sparse.num_qubits != dense.num_qubits {
        return Err(SimError::LengthMismatch {
            got: sparse.num_qubits as usize,
            want: dense.num_qubits as usize,
        });
    }
    let (pivot, pivot_amp) = dense
        .amps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().partial_cmp(&b.1.norm_sqr()).unwrap())
        .map(|(i, a)| (i, *a))
        .unwrap();
    let sparse_pivot = sparse.amplitude(pivot as u128);
    // phase factor rotating the sparse state onto the dense one
    let phase = if sparse_pivot.norm() > 0.0 && pivot_amp.norm() > 0.0 {
        let ratio = pivot_amp / sparse_pivot;
        ratio / ratio.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut max_dev: f64 = 0.0;
    for (i, &d) in dense.amps.iter().enumerate() {
        let s = sparse.amplitude(i as u128) * phase;
        max_dev = max_dev.max((s - d).norm());
    }
    Ok(max_dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Instruction;
    use crate::sparse::run_trajectory;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn hadamard_on_zero() {
        let mut c = Circuit::new(1, 0);
        c.push(Instruction::new(Gate::H, vec![0]));
        let d = run_dense_oracle(&c, &mut ChaCha12Rng::seed_from_u64(0)).unwrap();
        assert!((d.amps[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((d.amps[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn ghz3_preparation() {
        let mut c = Circuit::new(3, 0);
        c.push(Instruction::new(Gate::H, vec![0]));
        c.push(Instruction::new(Gate::Cx, vec![0, 1]));
        c.push(Instruction::new(Gate::Cx, vec![0, 2]));
        let d = run_dense_oracle(&c, &mut ChaCha12Rng::seed_from_u64(0)).unwrap();
        assert!((d.amps[0].norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((d.amps[7].norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        let total: f64 = d.amps.iter().map(|a| a.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compare_identical_and_phase_shifted() {
        let mut c = Circuit::new(2, 0);
        c.push(Instruction::new(Gate::H, vec![0]));
        c.push(Instruction::new(Gate::Cx, vec![0, 1]));
        let s = run_trajectory(&c, &mut ChaCha12Rng::seed_from_u64(0)).unwrap();
        let d = run_dense_oracle(&c, &mut ChaCha12Rng::seed_from_u64(0)).unwrap();
        assert!(compare_states(&s, &d).unwrap() < 1e-14);
        // global phase difference is aligned away: S S on |1> = Z|1> = -|1>
        let mut c2 = Circuit::new(1, 0);
        c2.push(Instruction::new(Gate::X, vec![0]));
        let s2 = run_trajectory(&c2, &mut ChaCha12Rng::seed_from_u64(0)).unwrap();
        c2.push(Instruction::new(Gate::S, vec![0]));
        c2.push(Instruction::new(Gate::S, vec![0]));
        let d2 = run_dense_oracle(&c2, &mut ChaCha12Rng::seed_from_u64(0)).unwrap();
        assert!(compare_states(&s2, &d2).unwrap() < 1e-14);
    }

    #[test]
    fn disjoint_states_deviate_fully() {
        let c0 = Circuit::new(1, 0);
        let s = run_trajectory(&c0, &mut ChaCha12Rng::seed_from_u64(0)).unwrap();
        let mut c1 = Circuit::new(1, 0);
        c1.push(Instruction::new(Gate::X, vec![0]));
        let d = run_dense_oracle(&c1, &mut ChaCha12Rng::seed_from_u64(0)).unwrap();
        assert!((compare_states(&s, &d).unwrap() - 1.0).abs() < 1e-12);
    }
}
