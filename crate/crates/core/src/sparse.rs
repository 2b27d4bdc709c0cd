//! Sparse state-vector engine.
//!
//! The protocol circuits in this repository contain very few branching gates
//! (only `H` creates superpositions in the computational basis), so the state
//! vector stays extremely sparse. Amplitudes are kept in a canonically sorted
//! array of (basis index, amplitude) pairs; non-branching gates permute keys
//! or multiply phases in place, and `H` merges colliding pairs.

use crate::circuit::{Circuit, Gate, Instruction};
use crate::pauli::{PauliOp, PauliString};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::FRAC_1_SQRT_2;
use thiserror::Error;

/// Amplitudes below this magnitude are dropped after branching-gate merges,
/// so exact cancellations do not grow the support.
pub const PRUNE_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("bit string length {got} does not match register size {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("register of {0} qubits exceeds the 128-qubit sparse-key limit")]
    RegisterTooLarge(u32),
    #[error("MEASURE unsupported in the sparse engine: use the tableau engine")]
    MeasureUnsupported,
    #[error("instruction addresses qubit {0} outside the register")]
    OperandOutOfRange(u32),
}

/// Sorted sparse map from basis index to amplitude. Keys are `u128` bit
/// strings with qubit q stored at bit position q.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    pub num_qubits: u32,
    amps: Vec<(u128, Complex64)>,
}

/// Builds the computational basis state given by `bits` (one char per qubit,
/// qubit 0 first).
pub fn init_state(num_qubits: u32, bits: &str) -> Result<SparseState, SimError> {
    if bits.len() != num_qubits as usize {
        return Err(SimError::LengthMismatch { got: bits.len(), want: num_qubits as usize });
    }
    if num_qubits > 128 {
        return Err(SimError::RegisterTooLarge(num_qubits));
    }
    let mut key: u128 = 0;
    for (q, ch) in bits.chars().enumerate() {
        if ch == '1' {
            key |= 1u128 << q;
        }
    }
    Ok(SparseState { num_qubits, amps: vec![(key, Complex64::new(1.0, 0.0))] })
}

impl SparseState {
    pub fn zero(num_qubits: u32) -> Result<Self, SimError> {
        if num_qubits > 128 {
            return Err(SimError::RegisterTooLarge(num_qubits));
        }
        Ok(SparseState { num_qubits, amps: vec![(0, Complex64::new(1.0, 0.0))] })
    }

    pub fn support_size(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[(u128, Complex64)] {
        &self.amps
    }

    pub fn amplitude(&self, key: u128) -> Complex64 {
        match self.amps.binary_search_by_key(&key, |&(k, _)| k) {
            Ok(i) => self.amps[i].1,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|&(_, a)| a.norm_sqr()).sum()
    }

    fn resort(&mut self) {
        self.amps.sort_unstable_by_key(|&(k, _)| k);
    }

    /// Debug dump, one `index amplitude` pair per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for &(k, a) in &self.amps {
            out.push_str(&format!("{k} {:+.12e}{:+.12e}i\n", a.re, a.im));
        }
        out
    }

    /// Expectation value of a Pauli string: sum over conj(a[pi(x)]) c(x) a[x].
    pub fn expectation(&self, p: &PauliString) -> f64 {
        let mut flip: u128 = 0;
        for (q, op) in p.iter() {
            let (x, _) = op.bits();
            if x {
                flip |= 1u128 << q;
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &(key, amp) in &self.amps {
            // phase of P acting on |key>
            let mut ipow = p.phase_i_pow() as u32;
            for (q, op) in p.iter() {
                let bit = (key >> q) & 1 == 1;
                match op {
                    PauliOp::Z => {
                        if bit {
                            ipow += 2;
                        }
                    }
                    PauliOp::Y => {
                        // Y|0> = i|1>, Y|1> = -i|0>
                        ipow += if bit { 3 } else { 1 };
                    }
                    PauliOp::X => {}
                }
            }
            let target = key ^ flip;
            let out_amp = self.amplitude(target);
            let phase = match ipow & 3 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
            acc += out_amp.conj() * phase * amp;
        }
        debug_assert!(acc.im.abs() < 1e-9 || !p.is_hermitian());
        acc.re
    }

    /// Applies one instruction in place. `bits` is the classical store used
    /// by conditioned instructions; `rng` drives RESET's Born sampling.
    pub fn apply<R: Rng + ?Sized>(
        &mut self,
        instr: &Instruction,
        bits: &[bool],
        rng: &mut R,
    ) -> Result<(), SimError> {
        for &q in &instr.operands {
            if q >= self.num_qubits {
                return Err(SimError::OperandOutOfRange(q));
            }
        }
        if let Some(cond) = &instr.condition {
            if !cond.eval(bits) {
                return Ok(());
            }
        }
        match instr.gate {
            Gate::I => {}
            Gate::X => {
                let m = 1u128 << instr.operands[0];
                for (k, _) in self.amps.iter_mut() {
                    *k ^= m;
                }
                self.resort();
            }
            Gate::Y => {
                let m = 1u128 << instr.operands[0];
                for (k, a) in self.amps.iter_mut() {
                    *k ^= m;
                    // after the flip, new bit set means Y|0>=i|1>
                    *a *= if *k & m != 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    };
                }
                self.resort();
            }
            Gate::Z => {
                let m = 1u128 << instr.operands[0];
                for (k, a) in self.amps.iter_mut() {
                    if *k & m != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::S => {
                let m = 1u128 << instr.operands[0];
                for (k, a) in self.amps.iter_mut() {
                    if *k & m != 0 {
                        *a *= Complex64::new(0.0, 1.0);
                    }
                }
            }
            Gate::T => {
                let m = 1u128 << instr.operands[0];
                let ph = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
                for (k, a) in self.amps.iter_mut() {
                    if *k & m != 0 {
                        *a *= ph;
                    }
                }
            }
            Gate::Tdg => {
                let m = 1u128 << instr.operands[0];
                let ph = Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2);
                for (k, a) in self.amps.iter_mut() {
                    if *k & m != 0 {
                        *a *= ph;
                    }
                }
            }
            Gate::Cx => {
                let c = 1u128 << instr.operands[0];
                let t = 1u128 << instr.operands[1];
                for (k, _) in self.amps.iter_mut() {
                    if *k & c != 0 {
                        *k ^= t;
                    }
                }
                self.resort();
            }
            Gate::Ckx(_) | Gate::Ccx => {
                let n = instr.operands.len();
                let mut cmask: u128 = 0;
                for &q in &instr.operands[..n - 1] {
                    cmask |= 1u128 << q;
                }
                let t = 1u128 << instr.operands[n - 1];
                for (k, _) in self.amps.iter_mut() {
                    if *k & cmask == cmask {
                        *k ^= t;
                    }
                }
                self.resort();
            }
            Gate::Cz | Gate::Ccz | Gate::Ckz(_) => {
                let mut mask: u128 = 0;
                for &q in &instr.operands {
                    mask |= 1u128 << q;
                }
                for (k, a) in self.amps.iter_mut() {
                    if *k & mask == mask {
                        *a = -*a;
                    }
                }
            }
            Gate::H => self.apply_h(instr.operands[0]),
            Gate::Reset => {
                let q = instr.operands[0];
                let m = 1u128 << q;
                let p1: f64 =
                    self.amps.iter().filter(|&&(k, _)| k & m != 0).map(|&(_, a)| a.norm_sqr()).sum();
                let outcome = rng.random::<f64>() < p1;
                let keep = if outcome { m } else { 0 };
                self.amps.retain(|&(k, _)| k & m == keep);
                let norm: f64 = self.amps.iter().map(|&(_, a)| a.norm_sqr()).sum();
                let scale = 1.0 / norm.sqrt();
                for (k, a) in self.amps.iter_mut() {
                    *a *= scale;
                    *k &= !m;
                }
                self.resort();
            }
            Gate::Measure => return Err(SimError::MeasureUnsupported),
        }
        Ok(())
    }

    fn apply_h(&mut self, qubit: u32) {
        let m = 1u128 << qubit;
        let mut out: Vec<(u128, Complex64)> = Vec::with_capacity(self.amps.len() * 2);
        for &(k, a) in &self.amps {
            let w = a * FRAC_1_SQRT_2;
            let lo = k & !m;
            let hi = k | m;
            if k & m == 0 {
                out.push((lo, w));
                out.push((hi, w));
            } else {
                out.push((lo, w));
                out.push((hi, -w));
            }
        }
        out.sort_unstable_by_key(|&(k, _)| k);
        // merge equal keys, prune cancellations
        let mut merged: Vec<(u128, Complex64)> = Vec::with_capacity(out.len());
        for (k, a) in out {
            match merged.last_mut() {
                Some((lk, la)) if *lk == k => *la += a,
                _ => merged.push((k, a)),
            }
        }
        merged.retain(|&(_, a)| a.norm() > PRUNE_TOL);
        self.amps = merged;
    }
}

/// Runs a MEASURE-free circuit from |0...0> and returns the final state.
/// Deterministic for a fixed seed: the generator is consumed only by RESET.
pub fn run_trajectory<R: Rng + ?Sized>(circuit: &Circuit, rng: &mut R) -> Result<SparseState, SimError> {
    run_trajectory_from(circuit, SparseState::zero(circuit.num_qubits)?, rng)
}

pub fn run_trajectory_from<R: Rng + ?Sized>(
    circuit: &Circuit,
    mut state: SparseState,
    rng: &mut R,
) -> Result<SparseState, SimError> {
    let bits = vec![false; circuit.num_cbits as usize];
    for instr in &circuit.instructions {
        state.apply(instr, &bits, rng)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng() -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(7)
    }

    #[test]
    fn init_basis_states() {
        let s = init_state(3, "000").unwrap();
        assert_eq!(s.amplitudes(), &[(0, Complex64::new(1.0, 0.0))]);
        let s = init_state(1, "1").unwrap();
        assert_eq!(s.amplitudes(), &[(1, Complex64::new(1.0, 0.0))]);
        assert!(init_state(2, "1").is_err());
    }

    #[test]
    fn hadamard_splits_and_merges() {
        let mut s = init_state(1, "0").unwrap();
        let h = Instruction::new(Gate::H, vec![0]);
        s.apply(&h, &[], &mut rng()).unwrap();
        assert_eq!(s.support_size(), 2);
        assert!((s.amplitude(0).re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((s.amplitude(1).re - FRAC_1_SQRT_2).abs() < 1e-12);
        // H^2 = I, support collapses back
        s.apply(&h, &[], &mut rng()).unwrap();
        assert_eq!(s.support_size(), 1);
        assert!((s.amplitude(0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ccz_phases_all_ones() {
        let mut s = init_state(3, "111").unwrap();
        s.apply(&Instruction::new(Gate::Ccz, vec![0, 1, 2]), &[], &mut rng()).unwrap();
        assert!((s.amplitude(0b111).re + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_expectations() {
        let s = init_state(1, "0").unwrap();
        assert!((s.expectation(&PauliString::single(0, PauliOp::Z)) - 1.0).abs() < 1e-12);
        let mut plus = init_state(1, "0").unwrap();
        plus.apply(&Instruction::new(Gate::H, vec![0]), &[], &mut rng()).unwrap();
        assert!((plus.expectation(&PauliString::single(0, PauliOp::X)) - 1.0).abs() < 1e-12);
        assert!(plus.expectation(&PauliString::single(0, PauliOp::Z)).abs() < 1e-12);
        // Y on (|0> + i|1>)/sqrt2
        let mut yplus = plus.clone();
        yplus.apply(&Instruction::new(Gate::S, vec![0]), &[], &mut rng()).unwrap();
        assert!((yplus.expectation(&PauliString::single(0, PauliOp::Y)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reset_projects_and_clears() {
        let mut s = init_state(1, "1").unwrap();
        s.apply(&Instruction::new(Gate::Reset, vec![0]), &[], &mut rng()).unwrap();
        assert_eq!(s.support_size(), 1);
        assert!((s.amplitude(0).re - 1.0).abs() < 1e-12);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditioned_instruction_consults_store() {
        let mut s = init_state(1, "0").unwrap();
        let x = Instruction::new(Gate::X, vec![0])
            .with_condition(crate::circuit::Condition::bit(0));
        s.apply(&x, &[false], &mut rng()).unwrap();
        assert!((s.amplitude(0).re - 1.0).abs() < 1e-12);
        s.apply(&x, &[true], &mut rng()).unwrap();
        assert!((s.amplitude(1).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn determinism_same_seed() {
        let mut c = Circuit::new(2, 0);
        c.push(Instruction::new(Gate::H, vec![0]));
        c.push(Instruction::new(Gate::Cx, vec![0, 1]));
        c.push(Instruction::new(Gate::Reset, vec![0]));
        let s1 = run_trajectory(&c, &mut ChaCha12Rng::seed_from_u64(3)).unwrap();
        let s2 = run_trajectory(&c, &mut ChaCha12Rng::seed_from_u64(3)).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn measure_rejected() {
        let mut c = Circuit::new(1, 1);
        let mut m = Instruction::new(Gate::Measure, vec![0]);
        m.target_bit = Some(0);
        c.push(m);
        assert_eq!(run_trajectory(&c, &mut rng()).unwrap_err(), SimError::MeasureUnsupported);
    }
}
