//! Code layouts: Bacon-Shor grids, repetition chains, gauge presets,
//! encoded-state preparation, concatenation bookkeeping, and the ideal
//! layer-by-layer decoder.
//!
//! Grid convention: an n1 x n2 Bacon-Shor code has n1 rows and n2 columns,
//! qubit (i, j) at row i and column j. X-type stabilizers are X on all
//! qubits of two adjacent rows, Z-type stabilizers Z on two adjacent
//! columns. Gauge generators are the within-column XX pairs and the
//! within-row ZZ pairs. X_L is X on a single row, Z_L is Z on a single
//! column. Repetition codes are the degenerate 1 x n (bit-flip) and n x 1
//! (phase-flip) grids.

use crate::circuit::{Circuit, Condition, Gate, Instruction};
use crate::pauli::{PauliOp, PauliString};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("grid dimensions must be at least 2, got {0}x{1}")]
    DimensionsTooSmall(usize, usize),
    #[error("repetition length must be at least 2, got {0}")]
    RepetitionTooShort(usize),
    #[error("gauge {gauge} has no product-state encoder for |{basis}>_L")]
    IncompatibleGaugeBasis { gauge: String, basis: char },
    #[error("index {0} outside the grid")]
    IndexOutOfRange(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    BaconShor,
    RepetitionBitFlip,
    RepetitionPhaseFlip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicalPauli {
    X,
    Y,
    Z,
}

/// Gauge sector selection. `Shor` fixes all within-row ZZ gauges to +1,
/// `AntiShor` all within-column XX gauges, `Mixed` an explicit commuting set.
#[derive(Debug, Clone, PartialEq)]
pub enum GaugeSpec {
    Shor,
    AntiShor,
    Mixed(Vec<PauliString>),
}

impl GaugeSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GaugeSpec::Shor => "shor",
            GaugeSpec::AntiShor => "antishor",
            GaugeSpec::Mixed(_) => "mixed",
        }
    }

    /// The gauge generators this spec fixes to +1.
    pub fn fixed_generators(&self, layout: &CodeLayout) -> Vec<PauliString> {
        match self {
            GaugeSpec::Shor => layout.z_gauges(),
            GaugeSpec::AntiShor => layout.x_gauges(),
            GaugeSpec::Mixed(gens) => gens.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeLayout {
    pub kind: CodeKind,
    pub n1: usize,
    pub n2: usize,
    /// Physical qubit index of grid site (i, j) at position i*n2 + j.
    pub qubits: Vec<u32>,
}

impl CodeLayout {
    pub fn qubit(&self, i: usize, j: usize) -> u32 {
        self.qubits[i * self.n2 + j]
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn distance(&self) -> usize {
        match self.kind {
            CodeKind::BaconShor => self.n1.min(self.n2),
            CodeKind::RepetitionBitFlip => self.n2,
            CodeKind::RepetitionPhaseFlip => self.n1,
        }
    }

    fn row(&self, i: usize) -> Vec<u32> {
        (0..self.n2).map(|j| self.qubit(i, j)).collect()
    }

    fn col(&self, j: usize) -> Vec<u32> {
        (0..self.n1).map(|i| self.qubit(i, j)).collect()
    }

    /// X on all qubits of rows i and i+1, for i in 0..n1-1.
    pub fn x_stabilizers(&self) -> Vec<PauliString> {
        (0..self.n1.saturating_sub(1))
            .map(|i| {
                PauliString::uniform(
                    self.row(i).into_iter().chain(self.row(i + 1)),
                    PauliOp::X,
                )
            })
            .collect()
    }

    /// Z on all qubits of columns j and j+1, for j in 0..n2-1.
    pub fn z_stabilizers(&self) -> Vec<PauliString> {
        (0..self.n2.saturating_sub(1))
            .map(|j| {
                PauliString::uniform(
                    self.col(j).into_iter().chain(self.col(j + 1)),
                    PauliOp::Z,
                )
            })
            .collect()
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        let mut out = self.x_stabilizers();
        out.extend(self.z_stabilizers());
        out
    }

    /// Within-column X_{i,j} X_{i+1,j} pairs.
    pub fn x_gauges(&self) -> Vec<PauliString> {
        let mut out = Vec::new();
        for j in 0..self.n2 {
            for i in 0..self.n1 - 1 {
                out.push(PauliString::uniform(
                    [self.qubit(i, j), self.qubit(i + 1, j)],
                    PauliOp::X,
                ));
            }
        }
        out
    }

    /// Within-row Z_{i,j} Z_{i,j+1} pairs.
    pub fn z_gauges(&self) -> Vec<PauliString> {
        let mut out = Vec::new();
        for i in 0..self.n1 {
            for j in 0..self.n2 - 1 {
                out.push(PauliString::uniform(
                    [self.qubit(i, j), self.qubit(i, j + 1)],
                    PauliOp::Z,
                ));
            }
        }
        out
    }

    pub fn gauge_generators(&self) -> Vec<PauliString> {
        let mut out = self.x_gauges();
        out.extend(self.z_gauges());
        out
    }

    pub fn logical_x(&self) -> PauliString {
        PauliString::uniform(self.row(0), PauliOp::X)
    }

    pub fn logical_z(&self) -> PauliString {
        PauliString::uniform(self.col(0), PauliOp::Z)
    }

    /// Representative at a chosen row (X_L), column (Z_L), or row/column
    /// crossing (Y_L = i X_L Z_L).
    pub fn logical_representative(
        &self,
        p: LogicalPauli,
        index: usize,
    ) -> Result<PauliString, CodeError> {
        match p {
            LogicalPauli::X => {
                if index >= self.n1 {
                    return Err(CodeError::IndexOutOfRange(index));
                }
                Ok(PauliString::uniform(self.row(index), PauliOp::X))
            }
            LogicalPauli::Z => {
                if index >= self.n2 {
                    return Err(CodeError::IndexOutOfRange(index));
                }
                Ok(PauliString::uniform(self.col(index), PauliOp::Z))
            }
            LogicalPauli::Y => {
                if index >= self.n1 {
                    return Err(CodeError::IndexOutOfRange(index));
                }
                let xl = PauliString::uniform(self.row(index), PauliOp::X);
                let zl = self.logical_z();
                let prod = xl.mul(&zl);
                let ph = (prod.phase_i_pow() + 1) & 3;
                Ok(prod.with_phase_i_pow(ph))
            }
        }
    }
}

/// Bacon-Shor layout on qubits 0..n1*n2.
pub fn bacon_shor(n1: usize, n2: usize) -> Result<CodeLayout, CodeError> {
    bacon_shor_at(n1, n2, (0..(n1 * n2) as u32).collect())
}

/// Bacon-Shor layout over explicit physical qubits (row-major).
pub fn bacon_shor_at(n1: usize, n2: usize, qubits: Vec<u32>) -> Result<CodeLayout, CodeError> {
    if n1 < 2 || n2 < 2 {
        return Err(CodeError::DimensionsTooSmall(n1, n2));
    }
    assert_eq!(qubits.len(), n1 * n2);
    Ok(CodeLayout { kind: CodeKind::BaconShor, n1, n2, qubits })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepBasis {
    BitFlip,
    PhaseFlip,
}

/// Length-n repetition code: bit-flip as a 1 x n grid (pairwise ZZ
/// stabilizers), phase-flip as n x 1 (pairwise XX).
pub fn repetition(n: usize, basis: RepBasis) -> Result<CodeLayout, CodeError> {
    repetition_at(n, basis, (0..n as u32).collect())
}

pub fn repetition_at(n: usize, basis: RepBasis, qubits: Vec<u32>) -> Result<CodeLayout, CodeError> {
    if n < 2 {
        return Err(CodeError::RepetitionTooShort(n));
    }
    assert_eq!(qubits.len(), n);
    Ok(match basis {
        RepBasis::BitFlip => {
            CodeLayout { kind: CodeKind::RepetitionBitFlip, n1: 1, n2: n, qubits }
        }
        RepBasis::PhaseFlip => {
            CodeLayout { kind: CodeKind::RepetitionPhaseFlip, n1: n, n2: 1, qubits }
        }
    })
}

/// The d=3 rotated-surface code as a gauge fix of the 3x3 Bacon-Shor code:
/// two plaquette-style Z gauges and two boundary-style X gauges, mutually
/// commuting and independent of the stabilizers.
pub fn rotated_surface_gauge(layout: &CodeLayout) -> GaugeSpec {
    let q = |i: usize, j: usize| layout.qubit(i, j);
    GaugeSpec::Mixed(vec![
        PauliString::uniform([q(0, 0), q(0, 1), q(1, 0), q(1, 1)], PauliOp::Z),
        PauliString::uniform([q(1, 1), q(1, 2), q(2, 1), q(2, 2)], PauliOp::Z),
        PauliString::uniform([q(0, 0), q(1, 0)], PauliOp::X),
        PauliString::uniform([q(1, 2), q(2, 2)], PauliOp::X),
    ])
}

/// Logical basis label for encoded-state preparation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisLabel {
    Zero,
    One,
    Plus,
    Minus,
}

impl BasisLabel {
    pub fn symbol(self) -> char {
        match self {
            BasisLabel::Zero => '0',
            BasisLabel::One => '1',
            BasisLabel::Plus => '+',
            BasisLabel::Minus => '-',
        }
    }

    pub fn parse(c: char) -> Option<Self> {
        match c {
            '0' => Some(BasisLabel::Zero),
            '1' => Some(BasisLabel::One),
            '+' => Some(BasisLabel::Plus),
            '-' => Some(BasisLabel::Minus),
            _ => None,
        }
    }
}

fn push(c: &mut Circuit, gate: Gate, ops: Vec<u32>, noisy: bool) {
    let mut i = Instruction::new(gate, ops);
    i.noisy = noisy && i.gate.is_unitary();
    c.push(i);
}

/// Cat-product encoder. Shor gauge supports |+/->_L (row cats), anti-Shor
/// |0/1>_L (column cats in the X basis); repetition codes take their
/// natural product codewords. Noiseless by default.
pub fn encode(layout: &CodeLayout, gauge: &GaugeSpec, basis: BasisLabel) -> Result<Circuit, CodeError> {
    encode_opts(layout, gauge, basis, false)
}

pub fn encode_opts(
    layout: &CodeLayout,
    gauge: &GaugeSpec,
    basis: BasisLabel,
    noisy: bool,
) -> Result<Circuit, CodeError> {
    let nq = layout.qubits.iter().copied().max().unwrap_or(0) + 1;
    let mut c = Circuit::new(nq, 0);
    match layout.kind {
        CodeKind::BaconShor => match (gauge, basis) {
            (GaugeSpec::Shor, BasisLabel::Plus | BasisLabel::Minus) => {
                for i in 0..layout.n1 {
                    let seed = layout.qubit(i, 0);
                    push(&mut c, Gate::H, vec![seed], noisy);
                    if basis == BasisLabel::Minus {
                        push(&mut c, Gate::Z, vec![seed], noisy);
                    }
                    for j in 1..layout.n2 {
                        push(&mut c, Gate::Cx, vec![seed, layout.qubit(i, j)], noisy);
                    }
                }
            }
            (GaugeSpec::AntiShor, BasisLabel::Zero | BasisLabel::One) => {
                for j in 0..layout.n2 {
                    let seed = layout.qubit(0, j);
                    push(&mut c, Gate::H, vec![seed], noisy);
                    if basis == BasisLabel::One {
                        push(&mut c, Gate::Z, vec![seed], noisy);
                    }
                    for i in 1..layout.n1 {
                        push(&mut c, Gate::Cx, vec![seed, layout.qubit(i, j)], noisy);
                    }
                    for i in 0..layout.n1 {
                        push(&mut c, Gate::H, vec![layout.qubit(i, j)], noisy);
                    }
                }
            }
            _ => {
                return Err(CodeError::IncompatibleGaugeBasis {
                    gauge: gauge.name().into(),
                    basis: basis.symbol(),
                })
            }
        },
        CodeKind::RepetitionBitFlip => match basis {
            BasisLabel::Zero => {}
            BasisLabel::One => {
                for &q in &layout.qubits {
                    push(&mut c, Gate::X, vec![q], noisy);
                }
            }
            _ => {
                return Err(CodeError::IncompatibleGaugeBasis {
                    gauge: "bitflip".into(),
                    basis: basis.symbol(),
                })
            }
        },
        CodeKind::RepetitionPhaseFlip => match basis {
            BasisLabel::Plus | BasisLabel::Minus => {
                for &q in &layout.qubits {
                    if basis == BasisLabel::Minus {
                        push(&mut c, Gate::X, vec![q], noisy);
                    }
                    push(&mut c, Gate::H, vec![q], noisy);
                }
            }
            _ => {
                return Err(CodeError::IncompatibleGaugeBasis {
                    gauge: "phaseflip".into(),
                    basis: basis.symbol(),
                })
            }
        },
    }
    Ok(c)
}

/// Shor-gauge |0/1>_L via the even/odd row-parity cat construction: the two
/// seed rows are put in superposition, the third row carries their parity,
/// and each row is fanned out into a cat. Used for concatenated ancillas,
/// where the anti-Shor encoder's trailing Hadamards would be in the way.
pub fn shor_gauge_z_basis_prep(layout: &CodeLayout, basis: BasisLabel, noisy: bool) -> Circuit {
    assert_eq!(layout.kind, CodeKind::BaconShor);
    assert_eq!(layout.n1, 3, "parity-cat preparation is for three-row grids");
    let nq = layout.qubits.iter().copied().max().unwrap_or(0) + 1;
    let mut c = Circuit::new(nq, 0);
    let s0 = layout.qubit(0, 0);
    let s1 = layout.qubit(1, 0);
    let s2 = layout.qubit(2, 0);
    push(&mut c, Gate::H, vec![s0], noisy);
    push(&mut c, Gate::H, vec![s1], noisy);
    push(&mut c, Gate::Cx, vec![s0, s2], noisy);
    push(&mut c, Gate::Cx, vec![s1, s2], noisy);
    for i in 0..3 {
        let seed = layout.qubit(i, 0);
        for j in 1..layout.n2 {
            push(&mut c, Gate::Cx, vec![seed, layout.qubit(i, j)], noisy);
        }
    }
    if basis == BasisLabel::One {
        // transversal logical X on row 0
        for j in 0..layout.n2 {
            push(&mut c, Gate::X, vec![layout.qubit(0, j)], noisy);
        }
    }
    c
}

/// The same grid with rows and columns swapped.
pub fn layout_transpose(layout: &CodeLayout) -> CodeLayout {
    let mut qubits = Vec::with_capacity(layout.qubits.len());
    for j in 0..layout.n2 {
        for i in 0..layout.n1 {
            qubits.push(layout.qubit(i, j));
        }
    }
    CodeLayout { kind: layout.kind, n1: layout.n2, n2: layout.n1, qubits }
}

/// General logical preparation covering all four basis labels in both named
/// gauges. Cat-product states use `encode`; the complementary combinations
/// use the parity-cat construction (transposed and Hadamard-conjugated for
/// the anti-Shor +/- states).
pub fn prepare_logical(
    layout: &CodeLayout,
    gauge: &GaugeSpec,
    basis: BasisLabel,
    noisy: bool,
) -> Result<Circuit, CodeError> {
    match (gauge, basis) {
        (GaugeSpec::Shor, BasisLabel::Plus | BasisLabel::Minus)
        | (GaugeSpec::AntiShor, BasisLabel::Zero | BasisLabel::One) => {
            encode_opts(layout, gauge, basis, noisy)
        }
        (GaugeSpec::Shor, b) => Ok(shor_gauge_z_basis_prep(layout, b, noisy)),
        (GaugeSpec::AntiShor, b) => {
            let t = layout_transpose(layout);
            let seed = if b == BasisLabel::Plus { BasisLabel::Zero } else { BasisLabel::One };
            let mut c = shor_gauge_z_basis_prep(&t, seed, noisy);
            for &q in &layout.qubits {
                push(&mut c, Gate::H, vec![q], noisy);
            }
            Ok(c)
        }
        (GaugeSpec::Mixed(_), b) => Err(CodeError::IncompatibleGaugeBasis {
            gauge: "mixed".into(),
            basis: b.symbol(),
        }),
    }
}

// ---------------------------------------------------------------------------
// Concatenation

/// N-layer concatenated 3x3 Bacon-Shor block over explicit physical qubits
/// in recursive row-major order: the child block (i, j) of a level-m block
/// owns the slice of length 9^(m-1) at offset (3i+j)*9^(m-1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcatLayout {
    pub levels: u32,
    pub qubits: Vec<u32>,
}

impl ConcatLayout {
    pub fn new(levels: u32) -> Self {
        assert!(levels >= 1);
        ConcatLayout { levels, qubits: (0..9u32.pow(levels)).collect() }
    }

    pub fn over(levels: u32, qubits: Vec<u32>) -> Self {
        assert_eq!(qubits.len(), 9usize.pow(levels));
        ConcatLayout { levels, qubits }
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    /// Code distance 3^N.
    pub fn d_n(&self) -> u64 {
        3u64.pow(self.levels)
    }

    /// Tolerable faults under layer-by-layer decoding: (t+1)^N - 1 with t=1.
    pub fn t_n(&self) -> u64 {
        2u64.pow(self.levels) - 1
    }

    pub fn block(&self, i: usize, j: usize) -> ConcatLayout {
        assert!(self.levels >= 2);
        let sub = 9usize.pow(self.levels - 1);
        let start = (3 * i + j) * sub;
        ConcatLayout { levels: self.levels - 1, qubits: self.qubits[start..start + sub].to_vec() }
    }

    /// The level-1 grid of a bottom block.
    pub fn level1_layout(&self) -> CodeLayout {
        assert_eq!(self.levels, 1);
        CodeLayout { kind: CodeKind::BaconShor, n1: 3, n2: 3, qubits: self.qubits.clone() }
    }

    /// Physical support of the X_L representative (row 0 at every level).
    pub fn x_support(&self) -> Vec<u32> {
        if self.levels == 1 {
            self.qubits[0..3].to_vec()
        } else {
            let mut out = Vec::with_capacity(3usize.pow(self.levels));
            for j in 0..3 {
                out.extend(self.block(0, j).x_support());
            }
            out
        }
    }

    /// Physical support of the Z_L representative (column 0 at every level).
    pub fn z_support(&self) -> Vec<u32> {
        if self.levels == 1 {
            vec![self.qubits[0], self.qubits[3], self.qubits[6]]
        } else {
            let mut out = Vec::with_capacity(3usize.pow(self.levels));
            for i in 0..3 {
                out.extend(self.block(i, 0).z_support());
            }
            out
        }
    }

    pub fn logical_x(&self) -> PauliString {
        PauliString::uniform(self.x_support(), PauliOp::X)
    }

    pub fn logical_z(&self) -> PauliString {
        PauliString::uniform(self.z_support(), PauliOp::Z)
    }
}

/// Readout basis for the decoder's final logical measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadoutBasis {
    Z,
    X,
}

/// Appends the ideal decoder: noiseless stabilizer measurements with lookup
/// corrections, inner layers first, then one logical measurement into a
/// fresh classical bit (returned). `anc` must be a reset-able spare qubit.
pub fn append_perfect_decode(
    circuit: &mut Circuit,
    block: &ConcatLayout,
    basis: ReadoutBasis,
    anc: u32,
) -> u32 {
    decode_layers(circuit, block, anc);
    // logical readout
    let bit = circuit.num_cbits;
    circuit.num_cbits += 1;
    push(circuit, Gate::Reset, vec![anc], false);
    match basis {
        ReadoutBasis::Z => {
            for q in block.z_support() {
                push(circuit, Gate::Cx, vec![q, anc], false);
            }
        }
        ReadoutBasis::X => {
            push(circuit, Gate::H, vec![anc], false);
            for q in block.x_support() {
                push(circuit, Gate::Cx, vec![anc, q], false);
            }
            push(circuit, Gate::H, vec![anc], false);
        }
    }
    let mut m = Instruction::new(Gate::Measure, vec![anc]);
    m.target_bit = Some(bit);
    m.noisy = false;
    circuit.push(m);
    bit
}

fn decode_layers(circuit: &mut Circuit, block: &ConcatLayout, anc: u32) {
    if block.levels >= 2 {
        for i in 0..3 {
            for j in 0..3 {
                decode_layers(circuit, &block.block(i, j), anc);
            }
        }
    }
    decode_block(circuit, block, anc);
}

/// One level of lookup correction on `block`: measure its two Z-type and two
/// X-type stabilizer representatives, then apply the flagged column/row
/// logical correction of the sub-blocks.
fn decode_block(circuit: &mut Circuit, block: &ConcatLayout, anc: u32) {
    // supports of sub-unit logical reps
    let sub_z: Vec<Vec<u32>> = if block.levels == 1 {
        (0..3).map(|j| vec![block.qubits[j], block.qubits[3 + j], block.qubits[6 + j]]).collect()
    } else {
        // column j at this level: blocks (0,j),(1,j),(2,j); outer Z stabilizer
        // support is the union of the blocks' Z_L supports
        (0..3)
            .map(|j| {
                let mut v = Vec::new();
                for i in 0..3 {
                    v.extend(block.block(i, j).z_support());
                }
                v
            })
            .collect()
    };
    let sub_x: Vec<Vec<u32>> = if block.levels == 1 {
        (0..3).map(|i| block.qubits[3 * i..3 * i + 3].to_vec()).collect()
    } else {
        (0..3)
            .map(|i| {
                let mut v = Vec::new();
                for j in 0..3 {
                    v.extend(block.block(i, j).x_support());
                }
                v
            })
            .collect()
    };
    // corrections: logical X of one unit in the flagged column / logical Z of
    // one unit in the flagged row
    let corr_x: Vec<Vec<u32>> = if block.levels == 1 {
        (0..3).map(|j| vec![block.qubits[j]]).collect()
    } else {
        (0..3).map(|j| block.block(0, j).x_support()).collect()
    };
    let corr_z: Vec<Vec<u32>> = if block.levels == 1 {
        (0..3).map(|i| vec![block.qubits[3 * i]]).collect()
    } else {
        (0..3).map(|i| block.block(i, 0).z_support()).collect()
    };

    // Z-type syndromes flag X errors by column
    let s1 = measure_parity_z(circuit, &[sub_z[0].clone(), sub_z[1].clone()].concat(), anc);
    let s2 = measure_parity_z(circuit, &[sub_z[1].clone(), sub_z[2].clone()].concat(), anc);
    apply_lookup(circuit, Gate::X, s1, s2, &corr_x);
    // X-type syndromes flag Z errors by row
    let t1 = measure_parity_x(circuit, &[sub_x[0].clone(), sub_x[1].clone()].concat(), anc);
    let t2 = measure_parity_x(circuit, &[sub_x[1].clone(), sub_x[2].clone()].concat(), anc);
    apply_lookup(circuit, Gate::Z, t1, t2, &corr_z);
}

fn measure_parity_z(circuit: &mut Circuit, support: &[u32], anc: u32) -> u32 {
    let bit = circuit.num_cbits;
    circuit.num_cbits += 1;
    push(circuit, Gate::Reset, vec![anc], false);
    for &q in support {
        push(circuit, Gate::Cx, vec![q, anc], false);
    }
    let mut m = Instruction::new(Gate::Measure, vec![anc]);
    m.target_bit = Some(bit);
    m.noisy = false;
    circuit.push(m);
    bit
}

fn measure_parity_x(circuit: &mut Circuit, support: &[u32], anc: u32) -> u32 {
    let bit = circuit.num_cbits;
    circuit.num_cbits += 1;
    push(circuit, Gate::Reset, vec![anc], false);
    push(circuit, Gate::H, vec![anc], false);
    for &q in support {
        push(circuit, Gate::Cx, vec![anc, q], false);
    }
    push(circuit, Gate::H, vec![anc], false);
    let mut m = Instruction::new(Gate::Measure, vec![anc]);
    m.target_bit = Some(bit);
    m.noisy = false;
    circuit.push(m);
    bit
}

/// Syndrome lookup: (1,0) -> unit 0, (1,1) -> unit 1, (0,1) -> unit 2.
fn apply_lookup(circuit: &mut Circuit, gate: Gate, s1: u32, s2: u32, targets: &[Vec<u32>]) {
    let conds = [
        Condition { literals: vec![(s1, true), (s2, false)] },
        Condition { literals: vec![(s1, true), (s2, true)] },
        Condition { literals: vec![(s1, false), (s2, true)] },
    ];
    for (cond, target) in conds.iter().zip(targets) {
        for &q in target {
            let mut i = Instruction::new(gate, vec![q]).with_condition(cond.clone());
            i.noisy = false;
            circuit.push(i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_three_counts() {
        let l = bacon_shor(3, 3).unwrap();
        assert_eq!(l.x_stabilizers().len(), 2);
        assert_eq!(l.z_stabilizers().len(), 2);
        assert_eq!(l.gauge_generators().len(), 12);
        assert_eq!(l.logical_x().weight(), 3);
        assert_eq!(l.logical_z().weight(), 3);
        assert_eq!(l.distance(), 3);
    }

    #[test]
    fn three_by_nine_counts() {
        let l = bacon_shor(3, 9).unwrap();
        // two weight-18 generators (adjacent row pairs), eight weight-6
        let xs = l.x_stabilizers();
        let zs = l.z_stabilizers();
        assert_eq!(xs.len(), 2);
        assert!(xs.iter().all(|s| s.weight() == 18));
        assert_eq!(zs.len(), 8);
        assert!(zs.iter().all(|s| s.weight() == 6));
        assert_eq!(l.logical_z().weight(), 3);
        assert_eq!(l.logical_x().weight(), 9);
    }

    #[test]
    fn smallest_legal_instance() {
        let l = bacon_shor(2, 2).unwrap();
        assert_eq!(l.stabilizers().len(), 2);
        assert_eq!(l.distance(), 2);
        commutation_pattern(&l);
        assert!(bacon_shor(1, 3).is_err());
    }

    #[test]
    fn repetition_layouts() {
        let r = repetition(3, RepBasis::BitFlip).unwrap();
        let zs = r.z_stabilizers();
        assert_eq!(zs.len(), 2);
        assert_eq!(zs[0], PauliString::uniform([0, 1], PauliOp::Z));
        assert_eq!(zs[1], PauliString::uniform([1, 2], PauliOp::Z));
        assert_eq!(r.logical_x().weight(), 3);
        assert_eq!(r.logical_z().weight(), 1);

        let p = repetition(2, RepBasis::PhaseFlip).unwrap();
        let xs = p.x_stabilizers();
        assert_eq!(xs.len(), 1);
        assert_eq!(xs[0], PauliString::uniform([0, 1], PauliOp::X));
        assert!(repetition(1, RepBasis::BitFlip).is_err());
    }

    fn commutation_pattern(l: &CodeLayout) {
        let stabs = l.stabilizers();
        let gauges = l.gauge_generators();
        let xl = l.logical_x();
        let zl = l.logical_z();
        for s in &stabs {
            for t in &stabs {
                assert!(s.commutes_with(t));
            }
            for g in &gauges {
                assert!(s.commutes_with(g));
            }
            assert!(s.commutes_with(&xl));
            assert!(s.commutes_with(&zl));
        }
        for g in &gauges {
            assert!(g.commutes_with(&xl));
            assert!(g.commutes_with(&zl));
        }
        assert!(!xl.commutes_with(&zl));
    }

    #[test]
    fn subsystem_commutation_pattern() {
        commutation_pattern(&bacon_shor(3, 3).unwrap());
        commutation_pattern(&bacon_shor(3, 9).unwrap());
    }

    #[test]
    fn logical_representatives() {
        let l = bacon_shor(3, 3).unwrap();
        let x0 = l.logical_representative(LogicalPauli::X, 0).unwrap();
        assert_eq!(x0, PauliString::uniform([0, 1, 2], PauliOp::X));
        let z2 = l.logical_representative(LogicalPauli::Z, 2).unwrap();
        assert_eq!(z2, PauliString::uniform([2, 5, 8], PauliOp::Z));
        assert!(l.logical_representative(LogicalPauli::Z, 3).is_err());
        // X_L(row0) * X_L(row1) is a product of gauge generators
        let x1 = l.logical_representative(LogicalPauli::X, 1).unwrap();
        let prod = x0.mul(&x1);
        let mut acc = prod.clone();
        for j in 0..3 {
            let g = PauliString::uniform([l.qubit(0, j), l.qubit(1, j)], PauliOp::X);
            acc = acc.mul(&g);
        }
        assert!(acc.is_identity());
        assert_eq!(acc.phase_i_pow(), 0);
    }

    #[test]
    fn rotated_surface_gauge_is_commuting_and_independent() {
        let l = bacon_shor(3, 3).unwrap();
        let GaugeSpec::Mixed(gens) = rotated_surface_gauge(&l) else { unreachable!() };
        assert_eq!(gens.len(), 4);
        for a in &gens {
            for b in &gens {
                assert!(a.commutes_with(b));
            }
            for s in l.stabilizers() {
                assert!(a.commutes_with(&s));
            }
            assert!(a.commutes_with(&l.logical_x()));
            assert!(a.commutes_with(&l.logical_z()));
        }
    }

    #[test]
    fn concat_scaling_laws() {
        for n in 1..=4u32 {
            let l = ConcatLayout::new(n.min(3));
            let _ = l;
            let t = 2u64.pow(n) - 1;
            assert_eq!(t + 1, 2u64.pow(n));
        }
        let expected_t = [1u64, 3, 7, 15];
        let expected_d = [3u64, 9, 27, 81];
        for n in 1..=4u32 {
            // layout construction up to N=3 only (9^4 qubits is pointless here)
            let (t, d) = if n <= 3 {
                let l = ConcatLayout::new(n);
                (l.t_n(), l.d_n())
            } else {
                (2u64.pow(n) - 1, 3u64.pow(n))
            };
            assert_eq!(t, expected_t[(n - 1) as usize]);
            assert_eq!(d, expected_d[(n - 1) as usize]);
        }
    }

    #[test]
    fn concat_supports() {
        let l = ConcatLayout::new(2);
        assert_eq!(l.num_qubits(), 81);
        let xs = l.x_support();
        assert_eq!(xs.len(), 9);
        // row 0 of blocks (0,0),(0,1),(0,2)
        assert_eq!(xs, vec![0, 1, 2, 9, 10, 11, 18, 19, 20]);
        let zs = l.z_support();
        assert_eq!(zs, vec![0, 3, 6, 27, 30, 33, 54, 57, 60]);
    }
}
