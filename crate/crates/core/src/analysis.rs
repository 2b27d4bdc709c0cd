//! Logical-fidelity evaluation, Monte Carlo estimation with stopping rules,
//! scaling/pseudothreshold fitting, fault-injection verification, and the
//! shuttling-time model.

use crate::circuit::{Circuit, FaultLocation, Instruction};
use crate::codes::{
    append_perfect_decode, BasisLabel, CodeLayout, ConcatLayout, GaugeSpec, LogicalPauli,
    ReadoutBasis,
};
use crate::noise::{pauli_from_index, sample_faults, shot_rng, FaultAssignment, NoiseModel};
use crate::pauli::PauliString;
use crate::protocols::{
    append_logical_state_prep, append_qec_round, ccz_protocol, clifford_convert, gauge_fix_steane,
    gauge_fix_teleport, qec_round, AncillaVariant, Build, CczProtocol, GaugeFixMethod, Pool,
    TeleportRegisters,
};
use crate::sparse::{SimError, SparseState};
use crate::tableau::{ClassicalStore, Tableau, TableauError};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

/// Shots fail when the logical fidelity drops below this threshold:
/// noiseless runs give F = 1 to machine precision, and any logical
/// deviation is macroscopic.
pub const FIDELITY_FAIL_THRESHOLD: f64 = 1.0 - 1e-6;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("targets over more than 3 logical qubits are unsupported")]
    TooManyLogicalQubits,
    #[error("register count does not match the target")]
    RegisterMismatch,
    #[error("fit needs at least 3 records at distinct p")]
    SingularFit,
    #[error("exhaustive enumeration over {0} assignments exceeds the bound")]
    CombinatorialBound(u128),
    #[error("timing parameters must be positive")]
    NonPositiveTiming,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Code(#[from] crate::codes::CodeError),
    #[error(transparent)]
    Transform(#[from] crate::protocols::TransformError),
}

// ---------------------------------------------------------------------------
// Logical fidelity (sum over expectation values of logical Pauli strings)

/// A target state on k <= 3 logical qubits, given by its 2^k amplitudes.
#[derive(Debug, Clone)]
pub struct LogicalTarget {
    pub num_logical: usize,
    pub amps: Vec<Complex64>,
}

impl LogicalTarget {
    pub fn from_amps(amps: Vec<Complex64>) -> Result<Self, AnalysisError> {
        let k = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << k || k > 3 {
            return Err(AnalysisError::TooManyLogicalQubits);
        }
        Ok(LogicalTarget { num_logical: k, amps })
    }

    fn label_amps(label: BasisLabel) -> [Complex64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match label {
            BasisLabel::Zero => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            BasisLabel::One => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            BasisLabel::Plus => [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
            BasisLabel::Minus => [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
        }
    }

    /// Product state of basis labels.
    pub fn product(labels: &[BasisLabel]) -> Result<Self, AnalysisError> {
        if labels.len() > 3 {
            return Err(AnalysisError::TooManyLogicalQubits);
        }
        let k = labels.len();
        let mut amps = vec![Complex64::new(1.0, 0.0); 1 << k];
        for (idx, amp) in amps.iter_mut().enumerate() {
            for (q, &label) in labels.iter().enumerate() {
                let bit = (idx >> q) & 1;
                *amp *= Self::label_amps(label)[bit];
            }
        }
        Ok(LogicalTarget { num_logical: k, amps })
    }

    /// CCZ applied to a three-label product state.
    pub fn ccz_of(labels: [BasisLabel; 3]) -> Result<Self, AnalysisError> {
        let mut t = Self::product(&labels)?;
        t.amps[0b111] = -t.amps[0b111];
        Ok(t)
    }

    /// c_P = <phi|P|phi> for a logical Pauli word given as base-4 digits
    /// (0=I, 1=X, 2=Y, 3=Z per logical qubit).
    fn coefficient(&self, digits: &[u8]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, amp) in self.amps.iter().enumerate() {
            let mut target = idx;
            let mut ipow: u32 = 0;
            for (q, &d) in digits.iter().enumerate() {
                let bit = (idx >> q) & 1;
                match d {
                    0 => {}
                    1 => target ^= 1 << q,
                    2 => {
                        target ^= 1 << q;
                        ipow += if bit == 1 { 3 } else { 1 };
                    }
                    _ => {
                        if bit == 1 {
                            ipow += 2;
                        }
                    }
                }
            }
            let phase = match ipow & 3 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
            acc += self.amps[target].conj() * phase * amp;
        }
        acc.re
    }
}

/// F = 2^-k sum over logical Pauli words P of <phi|P|phi> <psi|P_L|psi>,
/// with the physical representatives built per register. Gauge-independent
/// because the representatives commute with every gauge operator.
pub fn logical_fidelity(
    state: &SparseState,
    layouts: &[CodeLayout],
    target: &LogicalTarget,
) -> Result<f64, AnalysisError> {
    let k = layouts.len();
    if k > 3 {
        return Err(AnalysisError::TooManyLogicalQubits);
    }
    if k != target.num_logical {
        return Err(AnalysisError::RegisterMismatch);
    }
    let mut total = 0.0;
    let words = 4usize.pow(k as u32);
    for word in 0..words {
        let digits: Vec<u8> = (0..k).map(|q| ((word >> (2 * q)) & 3) as u8).collect();
        let c = target.coefficient(&digits);
        if c.abs() < 1e-14 {
            continue;
        }
        let mut phys = PauliString::identity();
        for (q, &d) in digits.iter().enumerate() {
            let rep = match d {
                0 => continue,
                1 => layouts[q].logical_representative(LogicalPauli::X, 0)?,
                2 => layouts[q].logical_representative(LogicalPauli::Y, 0)?,
                _ => layouts[q].logical_representative(LogicalPauli::Z, 0)?,
            };
            phys = phys.mul(&rep);
        }
        total += c * state.expectation(&phys);
    }
    Ok(total / (1 << k) as f64)
}

// ---------------------------------------------------------------------------
// Trajectory runners with inline fault application

fn fault_map(assignment: &FaultAssignment) -> HashMap<usize, Vec<Instruction>> {
    let mut map: HashMap<usize, Vec<Instruction>> = HashMap::new();
    for (loc, pauli) in &assignment.faults {
        let entry = map.entry(loc.instruction_index).or_default();
        for (q, op) in pauli.iter() {
            let gate = match op {
                crate::pauli::PauliOp::X => crate::circuit::Gate::X,
                crate::pauli::PauliOp::Y => crate::circuit::Gate::Y,
                crate::pauli::PauliOp::Z => crate::circuit::Gate::Z,
            };
            entry.push(Instruction::new(gate, vec![q]).noiseless());
        }
    }
    map
}

/// Sparse trajectory with the faults applied right after their locations,
/// equivalent to running `inject(circuit, faults)` without rebuilding.
pub fn run_sparse_with_faults<R: Rng + ?Sized>(
    circuit: &Circuit,
    faults: &FaultAssignment,
    rng: &mut R,
) -> Result<SparseState, SimError> {
    let mut state = SparseState::zero(circuit.num_qubits)?;
    let map = fault_map(faults);
    let bits = vec![false; circuit.num_cbits as usize];
    for (idx, instr) in circuit.instructions.iter().enumerate() {
        state.apply(instr, &bits, rng)?;
        if let Some(extra) = map.get(&idx) {
            for e in extra {
                state.apply(e, &bits, rng)?;
            }
        }
    }
    Ok(state)
}

/// Tableau run with inline faults; returns the classical store.
pub fn run_tableau_with_faults<R: Rng + ?Sized>(
    circuit: &Circuit,
    faults: &FaultAssignment,
    rng: &mut R,
) -> Result<(Tableau, ClassicalStore), TableauError> {
    let mut t = Tableau::new(circuit.num_qubits as usize);
    let mut store = ClassicalStore::new(circuit.num_cbits);
    let map = fault_map(faults);
    for (idx, instr) in circuit.instructions.iter().enumerate() {
        t.apply(instr, &mut store, rng)?;
        if let Some(extra) = map.get(&idx) {
            for e in extra {
                t.apply(e, &mut store, rng)?;
            }
        }
    }
    Ok((t, store))
}

// ---------------------------------------------------------------------------
// Experiments

/// Stopping rule: sample until either cap is reached.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StopRule {
    pub max_shots: u64,
    pub max_failures: u64,
}

impl Default for StopRule {
    /// Desk-scale default: 2^16 shots or 2^8 failures.
    fn default() -> Self {
        StopRule { max_shots: 1 << 16, max_failures: 1 << 8 }
    }
}

/// Per-noise-point Monte Carlo tally.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub protocol: String,
    pub input: String,
    pub gauge: String,
    pub p: f64,
    pub rounds: u32,
    pub shots: u64,
    pub failures: u64,
    pub p_l: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

impl ResultRecord {
    pub fn csv_header() -> &'static str {
        "protocol,input,gauge,p,rounds,shots,failures,p_L,ci_lo,ci_hi,seed"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.protocol,
            self.input,
            self.gauge,
            self.p,
            self.rounds,
            self.shots,
            self.failures,
            self.p_l,
            self.ci_lo,
            self.ci_hi,
            self.seed
        )
    }
}

/// Wilson 95% confidence interval for a binomial proportion.
pub fn wilson_interval(failures: u64, shots: u64) -> (f64, f64) {
    if shots == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054_f64;
    let n = shots as f64;
    let phat = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// An executable experiment: protocol choice plus its input options.
#[derive(Debug, Clone)]
pub enum Experiment {
    Ccz { method: GaugeFixMethod, inputs: [BasisLabel; 3], gauge: GaugeSpec },
    GaugeFix { method: GaugeFixMethod, input: BasisLabel, gauge: GaugeSpec },
    Concat { levels: u32, variant: AncillaVariant, rounds: u32 },
}

impl Experiment {
    pub fn name(&self) -> String {
        match self {
            Experiment::Ccz { method, .. } => format!("ccz-{method:?}").to_lowercase(),
            Experiment::GaugeFix { method, .. } => format!("gaugefix-{method:?}").to_lowercase(),
            Experiment::Concat { levels, .. } => format!("qec{levels}"),
        }
    }

    fn input_label(&self) -> String {
        match self {
            Experiment::Ccz { inputs, .. } => inputs.iter().map(|l| l.symbol()).collect(),
            Experiment::GaugeFix { input, .. } => input.symbol().to_string(),
            Experiment::Concat { .. } => "xz-eigenstates".into(),
        }
    }

    fn gauge_label(&self) -> String {
        match self {
            Experiment::Ccz { gauge, .. } | Experiment::GaugeFix { gauge, .. } => {
                gauge.name().into()
            }
            Experiment::Concat { .. } => "shor".into(),
        }
    }

    fn rounds(&self) -> u32 {
        match self {
            Experiment::Concat { rounds, .. } => *rounds,
            _ => 1,
        }
    }
}

/// A prepared experiment: circuits plus the per-shot failure check,
/// ready for Monte Carlo or fault injection.
pub struct PreparedExperiment {
    /// One variant circuit per (round-robin) input state.
    pub variants: Vec<ShotCircuit>,
}

pub struct ShotCircuit {
    pub circuit: Circuit,
    pub locations: Vec<FaultLocation>,
    pub check: ShotCheck,
}

pub enum ShotCheck {
    /// Sparse run; failure iff fidelity against the target drops.
    Fidelity { layouts: Vec<CodeLayout>, target: LogicalTarget },
    /// Tableau run; failure iff the decoded readout differs.
    Readout { bit: u32, expected: bool },
}

impl ShotCircuit {
    /// Runs one shot with the given faults; true means logical failure.
    pub fn failure(&self, faults: &FaultAssignment, rng: &mut impl Rng) -> Result<bool, AnalysisError> {
        match &self.check {
            ShotCheck::Fidelity { layouts, target } => {
                let state = run_sparse_with_faults(&self.circuit, faults, rng)?;
                let f = logical_fidelity(&state, layouts, target)?;
                Ok(f < FIDELITY_FAIL_THRESHOLD)
            }
            ShotCheck::Readout { bit, expected } => {
                let (_, store) = run_tableau_with_faults(&self.circuit, faults, rng)?;
                Ok(store.get(*bit) != *expected)
            }
        }
    }
}

/// Noiseless ideal-correction suffix for sparse runs: one 3-ancilla QEC
/// round per output register, reusing the protocol's spare ancillas.
fn append_ideal_rounds(circuit: &mut Circuit, outputs: &[CodeLayout], spare: &[u32]) {
    let mut b = Build::new();
    b.circuit.num_qubits = circuit.num_qubits;
    b.circuit.num_cbits = circuit.num_cbits;
    let mut pool = Pool::with_qubits(spare.to_vec());
    b.noiseless(|b| {
        for out in outputs {
            let view = ConcatLayout::over(1, out.qubits.clone());
            append_qec_round(b, &view, AncillaVariant::ThreeAnc, &mut pool);
        }
    });
    circuit.num_qubits = b.circuit.num_qubits;
    circuit.instructions.extend(b.circuit.instructions);
}

pub fn prepare(exp: &Experiment) -> Result<PreparedExperiment, AnalysisError> {
    match exp {
        Experiment::Ccz { method, inputs, gauge } => {
            let proto: CczProtocol = ccz_protocol(*method, *inputs, gauge)?;
            let mut circuit = proto.circuit.clone();
            let locations = crate::circuit::fault_locations(&circuit);
            append_ideal_rounds(&mut circuit, &proto.outputs, &proto.spare);
            let target = LogicalTarget::ccz_of(*inputs)?;
            Ok(PreparedExperiment {
                variants: vec![ShotCircuit {
                    circuit,
                    locations,
                    check: ShotCheck::Fidelity { layouts: proto.outputs.to_vec(), target },
                }],
            })
        }
        Experiment::GaugeFix { method, input, gauge } => {
            let mut b = Build::new();
            let a = crate::codes::bacon_shor_at(3, 3, b.alloc(9))?;
            let r1 = crate::codes::bacon_shor_at(3, 3, b.alloc(9))?;
            let r2 = crate::codes::bacon_shor_at(3, 3, b.alloc(9))?;
            let shared = b.alloc(3);
            let prep = crate::codes::encode_opts(&a, gauge, *input, false)?;
            b.circuit.extend_from(&prep);
            let out = match method {
                GaugeFixMethod::Teleport => {
                    gauge_fix_teleport(
                        &mut b,
                        &a,
                        TeleportRegisters { bell: &r1, output: &r2 },
                        &shared,
                    );
                    r2
                }
                GaugeFixMethod::Steane => {
                    gauge_fix_steane(&mut b, &a, &shared);
                    a
                }
                GaugeFixMethod::None => a,
            };
            let mut circuit = b.circuit;
            circuit.metadata.insert("protocol".into(), "gaugefix".into());
            let locations = crate::circuit::fault_locations(&circuit);
            append_ideal_rounds(&mut circuit, std::slice::from_ref(&out), &shared);
            let target = LogicalTarget::product(&[*input])?;
            Ok(PreparedExperiment {
                variants: vec![ShotCircuit {
                    circuit,
                    locations,
                    check: ShotCheck::Fidelity { layouts: vec![out], target },
                }],
            })
        }
        Experiment::Concat { levels, variant, rounds } => {
            let built = qec_round(*levels, *variant, *rounds);
            let converted = clifford_convert(&built.circuit)?;
            let states = [
                (BasisLabel::Zero, ReadoutBasis::Z, false),
                (BasisLabel::One, ReadoutBasis::Z, true),
                (BasisLabel::Plus, ReadoutBasis::X, false),
                (BasisLabel::Minus, ReadoutBasis::X, true),
            ];
            let mut variants = Vec::with_capacity(4);
            for (label, basis, expected) in states {
                let mut b = Build::new();
                b.circuit.num_qubits = converted.num_qubits;
                b.noiseless(|b| append_logical_state_prep(b, &built.data, label));
                let mut circuit = b.circuit;
                let prep_len = circuit.instructions.len();
                circuit.num_cbits = converted.num_cbits;
                circuit.instructions.extend(converted.instructions.iter().cloned());
                let locations: Vec<FaultLocation> = crate::circuit::fault_locations(&circuit);
                debug_assert!(locations.iter().all(|l| l.instruction_index >= prep_len));
                let bit = append_perfect_decode(&mut circuit, &built.data, basis, built.spare);
                variants.push(ShotCircuit {
                    circuit,
                    locations,
                    check: ShotCheck::Readout { bit, expected },
                });
            }
            Ok(PreparedExperiment { variants })
        }
    }
}

/// Monte Carlo estimate of the logical error rate at physical rate `p`:
/// trajectories are distributed across the prepared input-state variants
/// round-robin and across worker threads, with shot-indexed seeding so the
/// tally is independent of the thread count.
pub fn mc_estimate(
    exp: &Experiment,
    p: f64,
    stop: StopRule,
    seed: u64,
) -> Result<ResultRecord, AnalysisError> {
    let prepared = prepare(exp)?;
    mc_estimate_prepared(&prepared, exp, p, stop, seed)
}

pub fn mc_estimate_prepared(
    prepared: &PreparedExperiment,
    exp: &Experiment,
    p: f64,
    stop: StopRule,
    seed: u64,
) -> Result<ResultRecord, AnalysisError> {
    let model = NoiseModel::new(p);
    let nvar = prepared.variants.len() as u64;
    let mut shots = 0u64;
    let mut failures = 0u64;
    let chunk: u64 = 4096;
    'outer: while shots < stop.max_shots && failures < stop.max_failures {
        let n = chunk.min(stop.max_shots - shots);
        let results: Vec<Result<bool, AnalysisError>> = (shots..shots + n)
            .into_par_iter()
            .map(|s| {
                let variant = &prepared.variants[(s % nvar) as usize];
                let mut rng = shot_rng(seed, s);
                let faults = sample_faults(&variant.locations, &model, &mut rng);
                variant.failure(&faults, &mut rng)
            })
            .collect();
        for r in results {
            shots += 1;
            if r? {
                failures += 1;
                if failures >= stop.max_failures {
                    break 'outer;
                }
            }
        }
    }
    let p_l = if shots > 0 { failures as f64 / shots as f64 } else { 0.0 };
    let (ci_lo, ci_hi) = wilson_interval(failures, shots);
    Ok(ResultRecord {
        protocol: exp.name(),
        input: exp.input_label(),
        gauge: exp.gauge_label(),
        p,
        rounds: exp.rounds(),
        shots,
        failures,
        p_l,
        ci_lo,
        ci_hi,
        seed,
    })
}

// ---------------------------------------------------------------------------
// Fault-injection verification

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtMode {
    Exhaustive,
    Sampled(u64),
}

const EXHAUSTIVE_BOUND: u128 = 40_000_000;

/// Enumerates (exhaustive) or samples all assignments of at most `t`
/// non-identity Paulis over the circuit's fault locations and returns every
/// assignment whose shot fails. An empty result certifies the contract at
/// the examined coverage.
pub fn ft_verify(
    shot: &ShotCircuit,
    t: usize,
    mode: FtMode,
    seed: u64,
) -> Result<Vec<FaultAssignment>, AnalysisError> {
    let locs = &shot.locations;
    match mode {
        FtMode::Exhaustive => {
            let mut assignments: Vec<FaultAssignment> = Vec::new();
            let mut count: u128 = 0;
            let mut stack: Vec<(usize, Vec<(usize, u64)>)> = vec![(0, Vec::new())];
            // depth-first enumeration of k <= t faulted locations
            while let Some((start, chosen)) = stack.pop() {
                if !chosen.is_empty() {
                    count += 1;
                    if count > EXHAUSTIVE_BOUND {
                        return Err(AnalysisError::CombinatorialBound(count));
                    }
                    let faults = chosen
                        .iter()
                        .map(|&(li, pi)| {
                            (locs[li].clone(), pauli_from_index(&locs[li].support, pi))
                        })
                        .collect();
                    assignments.push(FaultAssignment { faults });
                }
                if chosen.len() < t {
                    for li in start..locs.len() {
                        let max = 4u64.pow(locs[li].arity as u32) - 1;
                        for pi in 1..=max {
                            let mut next = chosen.clone();
                            next.push((li, pi));
                            stack.push((li + 1, next));
                        }
                    }
                }
            }
            run_assignments(shot, assignments, seed)
        }
        FtMode::Sampled(samples) => {
            let assignments: Vec<FaultAssignment> = (0..samples)
                .map(|s| {
                    let mut rng = shot_rng(seed ^ 0x5eed_fa01, s);
                    let k = rng.random_range(1..=t.max(1));
                    let mut chosen: Vec<usize> = Vec::with_capacity(k);
                    while chosen.len() < k.min(locs.len()) {
                        let li = rng.random_range(0..locs.len());
                        if !chosen.contains(&li) {
                            chosen.push(li);
                        }
                    }
                    chosen.sort_unstable();
                    let faults = chosen
                        .iter()
                        .map(|&li| {
                            let max = 4u64.pow(locs[li].arity as u32) - 1;
                            let pi = rng.random_range(1..=max);
                            (locs[li].clone(), pauli_from_index(&locs[li].support, pi))
                        })
                        .collect();
                    FaultAssignment { faults }
                })
                .collect();
            run_assignments(shot, assignments, seed)
        }
    }
}

fn run_assignments(
    shot: &ShotCircuit,
    assignments: Vec<FaultAssignment>,
    seed: u64,
) -> Result<Vec<FaultAssignment>, AnalysisError> {
    let results: Vec<Result<bool, AnalysisError>> = assignments
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let mut rng = shot_rng(seed ^ 0xf7_1e57, i as u64);
            shot.failure(a, &mut rng)
        })
        .collect();
    let mut violations = Vec::new();
    for (a, r) in assignments.into_iter().zip(results) {
        if r? {
            violations.push(a);
        }
    }
    Ok(violations)
}

// ---------------------------------------------------------------------------
// Scaling fit

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub pseudothreshold: f64,
}

/// Weighted least squares of log p_L = log a + b log p; the pseudothreshold
/// solves a p^b = p, i.e. p* = a^(-1/(b-1)).
pub fn fit_scaling(records: &[ResultRecord]) -> Result<ScalingFit, AnalysisError> {
    let pts: Vec<(f64, f64, f64)> = records
        .iter()
        .filter(|r| r.failures > 0 && r.shots > 0)
        .map(|r| (r.p.ln(), r.p_l.ln(), r.failures as f64))
        .collect();
    if pts.len() < 3 {
        return Err(AnalysisError::SingularFit);
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx: f64 = pts.iter().map(|p| p.0 * p.2).sum::<f64>() / sw;
    let my: f64 = pts.iter().map(|p| p.1 * p.2).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    if sxx.abs() < 1e-12 {
        return Err(AnalysisError::SingularFit);
    }
    let b = sxy / sxx;
    let ln_a = my - b * mx;
    let a = ln_a.exp();
    let pseudothreshold = a.powf(-1.0 / (b - 1.0));
    Ok(ScalingFit { exponent: b, prefactor: a, pseudothreshold })
}

/// Fit-window selection: the lowest three p values with at least 20
/// failures each.
pub fn select_fit_window(records: &[ResultRecord]) -> Vec<ResultRecord> {
    let mut eligible: Vec<ResultRecord> =
        records.iter().filter(|r| r.failures >= 20).cloned().collect();
    eligible.sort_by(|a, b| a.p.partial_cmp(&b.p).unwrap());
    eligible.truncate(3);
    eligible
}

// ---------------------------------------------------------------------------
// Timing model

/// Shuttling-time model parameters. kappa defaults to 2(1+sqrt(2)).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TimingParams {
    /// Shuttle time per lattice spacing, seconds.
    pub dtau: f64,
    /// Extraction-path constant.
    pub kappa: f64,
    /// Concatenation depth N >= 1.
    pub levels: u32,
    /// Measurement time for comparison, seconds.
    pub t_m: Option<f64>,
    /// Logical-patch dimension L for the comparison overhead.
    pub patch: Option<u32>,
}

impl TimingParams {
    pub fn new(dtau: f64, levels: u32) -> Self {
        TimingParams { dtau, kappa: 2.0 * (1.0 + 2f64.sqrt()), levels, t_m: None, patch: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TimingResult {
    /// Subcircuit time T_C^(N), seconds.
    pub t_c: f64,
    /// Breakeven measurement time, seconds.
    pub t_m_star: f64,
    pub t_n: u64,
    pub d_n: u64,
    /// Comparison measurement time including the d*L*dtau patch-shuttling
    /// overhead, when a measurement time and patch size were given.
    pub t_m_comparison: Option<f64>,
    /// Documented model caveat.
    pub note: &'static str,
}

pub fn timing_model(params: &TimingParams) -> Result<TimingResult, AnalysisError> {
    if params.dtau <= 0.0 || params.kappa <= 0.0 || params.levels == 0 {
        return Err(AnalysisError::NonPositiveTiming);
    }
    let n = params.levels;
    let t_n = 2u64.pow(n) - 1;
    let d_n = 3u64.pow(n);
    let c = 3.0 * params.kappa + 8.0;
    let t_c = c * (4f64.powi(n as i32) - 3f64.powi(n as i32)) * params.dtau;
    let bracket = 2f64.powi(n as i32) - 1.5f64.powi(n as i32);
    let t_m_star =
        (t_n + 1) as f64 / (2 * t_n + 1) as f64 * c * bracket * params.dtau;
    let t_m_comparison = match (params.t_m, params.patch) {
        (Some(tm), Some(l)) => Some(tm + d_n as f64 * l as f64 * params.dtau),
        (Some(tm), None) => Some(tm),
        _ => None,
    };
    Ok(TimingResult {
        t_c,
        t_m_star,
        t_n,
        d_n,
        t_m_comparison,
        note: "closed form slightly overestimates: it assumes an unencoding gadget at the lowest level",
    })
}
