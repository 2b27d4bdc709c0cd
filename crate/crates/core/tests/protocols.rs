//! Noiseless semantic contracts of the protocol builders, plus targeted
//! fault-injection checks on the smaller subcircuits.

use mfqec_core::analysis::{
    ft_verify, logical_fidelity, run_sparse_with_faults, FtMode, LogicalTarget, ShotCheck,
    ShotCircuit, FIDELITY_FAIL_THRESHOLD,
};
use mfqec_core::circuit::fault_locations;
use mfqec_core::codes::{bacon_shor_at, prepare_logical, BasisLabel, GaugeSpec};
use mfqec_core::noise::{inject, pauli_from_index, FaultAssignment};
use mfqec_core::protocols::{
    ccz_protocol, extend, gauge_fix_steane, gauge_fix_teleport, qec_round, repetition_correct,
    shrink, transversal_ccz, AncillaVariant, Build, GaugeFixMethod, Pool, RepRoundBasis,
    TeleportRegisters,
};
use mfqec_core::sparse::{init_state, run_trajectory, run_trajectory_from};
use mfqec_core::{Circuit, ConcatLayout, Gate, Instruction};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

#[test]
fn repetition_correct_majority_votes() {
    for (input, expect) in [("010", 0u128), ("100", 0), ("000", 0), ("111", 0b111), ("011", 0b111)]
    {
        let mut b = Build::new();
        let reg = b.alloc(3);
        let anc = b.alloc(3);
        repetition_correct(&mut b, &reg, RepRoundBasis::BitFlip, &anc);
        let start = init_state(6, &format!("{input}000")).unwrap();
        let s = run_trajectory_from(&b.circuit, start, &mut rng(0)).unwrap();
        assert_eq!(s.support_size(), 1);
        assert!((s.amplitude(expect).norm() - 1.0).abs() < 1e-9, "input {input}");
    }
}

#[test]
fn repetition_correct_single_fault_certified() {
    // exhaustive single-fault injection over the bit-flip round on |000>:
    // judged by majority-decoded content before and after
    let mut b = Build::new();
    let reg = b.alloc(3);
    let anc = b.alloc(3);
    repetition_correct(&mut b, &reg, RepRoundBasis::BitFlip, &anc);
    let circuit = b.circuit.clone();
    let locs = fault_locations(&circuit);
    for loc in &locs {
        let max = 4u64.pow(loc.arity as u32) - 1;
        for pi in 1..=max {
            let fa = FaultAssignment {
                faults: vec![(loc.clone(), pauli_from_index(&loc.support, pi))],
            };
            let s = run_sparse_with_faults(&circuit, &fa, &mut rng(1)).unwrap();
            // majority-decode the register content per basis ket
            for &(key, amp) in s.amplitudes() {
                if amp.norm() < 1e-12 {
                    continue;
                }
                let bits = [(key & 1) as u8, ((key >> 1) & 1) as u8, ((key >> 2) & 1) as u8];
                let majority = (bits[0] + bits[1] + bits[2]) >= 2;
                assert!(!majority, "fault at {} flipped the majority", loc.instruction_index);
            }
        }
    }
}

fn teleport_build(input_gauge: &GaugeSpec, label: BasisLabel) -> (Build, mfqec_core::CodeLayout) {
    let mut b = Build::new();
    let a = bacon_shor_at(3, 3, b.alloc(9)).unwrap();
    let bell = bacon_shor_at(3, 3, b.alloc(9)).unwrap();
    let out = bacon_shor_at(3, 3, b.alloc(9)).unwrap();
    let anc = b.alloc(3);
    let prep = prepare_logical(&a, input_gauge, label, false).unwrap();
    b.circuit.extend_from(&prep);
    gauge_fix_teleport(&mut b, &a, TeleportRegisters { bell: &bell, output: &out }, &anc);
    (b, out)
}

#[test]
fn teleport_gauge_fix_enforces_shor_gauge() {
    // anti-Shor |+>_L in -> |+>_L out with all row ZZ gauges +1
    for (gauge, label) in [
        (GaugeSpec::AntiShor, BasisLabel::Plus),
        (GaugeSpec::AntiShor, BasisLabel::Zero),
        (GaugeSpec::Shor, BasisLabel::Plus),
        (GaugeSpec::Shor, BasisLabel::Minus),
    ] {
        let (b, out) = teleport_build(&gauge, label);
        let s = run_trajectory(&b.circuit, &mut rng(7)).unwrap();
        for g in GaugeSpec::Shor.fixed_generators(&out) {
            let e = s.expectation(&g);
            assert!((e - 1.0).abs() < 1e-9, "{gauge:?} {label:?}: gauge {g} -> {e}");
        }
        for st in out.stabilizers() {
            assert!((s.expectation(&st) - 1.0).abs() < 1e-9);
        }
        let target = LogicalTarget::product(&[label]).unwrap();
        let f = logical_fidelity(&s, std::slice::from_ref(&out), &target).unwrap();
        assert!(f > 1.0 - 1e-9, "{gauge:?} {label:?}: fidelity {f}");
    }
}

#[test]
fn teleport_corrects_single_input_bit_flips() {
    // an X error on any input qubit is corrected, not just kept correctable
    for q in 0..9u32 {
        let mut b = Build::new();
        let a = bacon_shor_at(3, 3, b.alloc(9)).unwrap();
        let bell = bacon_shor_at(3, 3, b.alloc(9)).unwrap();
        let out = bacon_shor_at(3, 3, b.alloc(9)).unwrap();
        let anc = b.alloc(3);
        let prep = prepare_logical(&a, &GaugeSpec::AntiShor, BasisLabel::Zero, false).unwrap();
        b.circuit.extend_from(&prep);
        b.circuit.push(Instruction::new(Gate::X, vec![q]).noiseless());
        gauge_fix_teleport(&mut b, &a, TeleportRegisters { bell: &bell, output: &out }, &anc);
        let s = run_trajectory(&b.circuit, &mut rng(3)).unwrap();
        let target = LogicalTarget::product(&[BasisLabel::Zero]).unwrap();
        let f = logical_fidelity(&s, std::slice::from_ref(&out), &target).unwrap();
        assert!(f > 1.0 - 1e-9, "input X on qubit {q}: fidelity {f}");
        for g in GaugeSpec::Shor.fixed_generators(&out) {
            assert!((s.expectation(&g) - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn steane_gauge_fix_enforces_shor_gauge() {
    for (gauge, label) in [
        (GaugeSpec::AntiShor, BasisLabel::Plus),
        (GaugeSpec::AntiShor, BasisLabel::One),
        (GaugeSpec::Shor, BasisLabel::Minus),
    ] {
        let mut b = Build::new();
        let a = bacon_shor_at(3, 3, b.alloc(9)).unwrap();
        let anc = b.alloc(3);
        let prep = prepare_logical(&a, &gauge, label, false).unwrap();
        b.circuit.extend_from(&prep);
        gauge_fix_steane(&mut b, &a, &anc);
        let s = run_trajectory(&b.circuit, &mut rng(11)).unwrap();
        for g in GaugeSpec::Shor.fixed_generators(&a) {
            let e = s.expectation(&g);
            assert!((e - 1.0).abs() < 1e-9, "{gauge:?} {label:?}: {g} -> {e}");
        }
        let target = LogicalTarget::product(&[label]).unwrap();
        let f = logical_fidelity(&s, std::slice::from_ref(&a), &target).unwrap();
        assert!(f > 1.0 - 1e-9, "{gauge:?} {label:?}: fidelity {f}");
    }
}

#[test]
fn extend_then_shrink_is_identity_on_logical_content() {
    let mut b = Build::new();
    let r = bacon_shor_at(3, 3, b.alloc(9)).unwrap();
    let e1 = bacon_shor_at(3, 3, b.alloc(9)).unwrap();
    let e2 = bacon_shor_at(3, 3, b.alloc(9)).unwrap();
    let anc = b.alloc(3);
    let prep = prepare_logical(&r, &GaugeSpec::Shor, BasisLabel::One, false).unwrap();
    b.circuit.extend_from(&prep);
    let ext = extend(&mut b, &r, &e1, &e2, &anc);
    // the 3x9 codeword: all stabilizers +1, logical Z = -1
    let s = run_trajectory(&b.circuit, &mut rng(0)).unwrap();
    for st in ext.wide.stabilizers() {
        assert!((s.expectation(&st) - 1.0).abs() < 1e-9, "{st}");
    }
    assert!((s.expectation(&ext.wide.logical_z()) + 1.0).abs() < 1e-9);
    // shrink back
    let kept = shrink(&mut b, &ext);
    let s = run_trajectory(&b.circuit, &mut rng(0)).unwrap();
    let target = LogicalTarget::product(&[BasisLabel::One]).unwrap();
    let f = logical_fidelity(&s, std::slice::from_ref(&kept), &target).unwrap();
    assert!(f > 1.0 - 1e-9, "fidelity {f}");
}

#[test]
fn transversal_ccz_structure() {
    let mut b = Build::new();
    let mk = |b: &mut Build| {
        let blocks = [
            bacon_shor_at(3, 3, b.alloc(9)).unwrap(),
            bacon_shor_at(3, 3, b.alloc(9)).unwrap(),
            bacon_shor_at(3, 3, b.alloc(9)).unwrap(),
        ];
        let mut qubits = Vec::new();
        for i in 0..3 {
            for blk in &blocks {
                for j in 0..3 {
                    qubits.push(blk.qubit(i, j));
                }
            }
        }
        mfqec_core::CodeLayout { kind: mfqec_core::codes::CodeKind::BaconShor, n1: 3, n2: 9, qubits }
    };
    let r1 = mk(&mut b);
    let r2 = mk(&mut b);
    let r3 = mk(&mut b);
    transversal_ccz(&mut b, [&r1, &r2, &r3]);
    assert_eq!(b.circuit.count_gate(Gate::Ccz), 27);
    // j = 0 column: degenerate index triple (i, 0) on the three registers
    let first = &b.circuit.instructions[0];
    assert_eq!(first.operands, vec![r1.qubit(0, 0), r2.qubit(0, 0), r3.qubit(0, 0)]);
    // j = 4, i = 0 -> (0,4), (1,4), (1,4)
    let g = b
        .circuit
        .instructions
        .iter()
        .find(|i| i.operands[0] == r1.qubit(0, 4))
        .unwrap();
    assert_eq!(g.operands, vec![r1.qubit(0, 4), r2.qubit(1, 4), r3.qubit(1, 4)]);
    // per-gate columns agree across registers
    for instr in &b.circuit.instructions {
        let cols: Vec<usize> = instr
            .operands
            .iter()
            .enumerate()
            .map(|(k, &q)| {
                let reg = [&r1, &r2, &r3][k];
                reg.qubits.iter().position(|&x| x == q).unwrap() % 9
            })
            .collect();
        assert_eq!(cols[0], cols[1]);
        assert_eq!(cols[1], cols[2]);
    }
}

fn ccz_noiseless_fidelity(method: GaugeFixMethod, inputs: [BasisLabel; 3], gauge: &GaugeSpec) -> f64 {
    let proto = ccz_protocol(method, inputs, gauge).unwrap();
    let s = run_trajectory(&proto.circuit, &mut rng(1)).unwrap();
    let target = LogicalTarget::ccz_of(inputs).unwrap();
    logical_fidelity(&s, &proto.outputs, &target).unwrap()
}

#[test]
fn ccz_protocol_noiseless_z_basis() {
    let f = ccz_noiseless_fidelity(
        GaugeFixMethod::Teleport,
        [BasisLabel::One; 3],
        &GaugeSpec::AntiShor,
    );
    assert!(f > 1.0 - 1e-9, "teleport |111>: {f}");
    let f = ccz_noiseless_fidelity(
        GaugeFixMethod::Steane,
        [BasisLabel::One, BasisLabel::Zero, BasisLabel::One],
        &GaugeSpec::AntiShor,
    );
    assert!(f > 1.0 - 1e-9, "steane |101>: {f}");
}

#[test]
fn ccz_protocol_noiseless_plus_inputs() {
    let f = ccz_noiseless_fidelity(GaugeFixMethod::Teleport, [BasisLabel::Plus; 3], &GaugeSpec::Shor);
    assert!(f > 1.0 - 1e-9, "teleport |+++>: {f}");
    let f = ccz_noiseless_fidelity(GaugeFixMethod::Steane, [BasisLabel::Plus; 3], &GaugeSpec::Shor);
    assert!(f > 1.0 - 1e-9, "steane |+++>: {f}");
}

#[test]
fn qec_round_noiseless_identity_and_correction() {
    let built = qec_round(1, AncillaVariant::ThreeAnc, 1);
    // noiseless on a codeword: identity channel up to gauge
    let mut b = Build::new();
    b.circuit.num_qubits = built.circuit.num_qubits;
    let prep = prepare_logical(
        &bacon_shor_at(3, 3, built.data.qubits.clone()).unwrap(),
        &GaugeSpec::Shor,
        BasisLabel::Plus,
        false,
    )
    .unwrap();
    b.circuit.extend_from(&prep);
    b.circuit.extend_from(&built.circuit);
    let layout = bacon_shor_at(3, 3, built.data.qubits.clone()).unwrap();
    let s = run_trajectory(&b.circuit, &mut rng(2)).unwrap();
    let target = LogicalTarget::product(&[BasisLabel::Plus]).unwrap();
    let f = logical_fidelity(&s, std::slice::from_ref(&layout), &target).unwrap();
    assert!(f > 1.0 - 1e-9, "noiseless round fidelity {f}");

    // X fault on the center qubit (1,1): corrected up to gauge, Z-stabilizer
    // expectations +1 afterwards
    let mut c = b.circuit.clone();
    let center = layout.qubit(1, 1);
    let pos = prep.instructions.len();
    c.instructions.insert(pos, Instruction::new(Gate::X, vec![center]).noiseless());
    let s = run_trajectory(&c, &mut rng(2)).unwrap();
    for st in layout.z_stabilizers() {
        assert!((s.expectation(&st) - 1.0).abs() < 1e-9);
    }
    let f = logical_fidelity(&s, std::slice::from_ref(&layout), &target).unwrap();
    assert!(f > 1.0 - 1e-9, "corrected fidelity {f}");
}

#[test]
fn injected_stabilizer_acts_trivially() {
    // injecting a stabilizer of the code as a "fault" leaves the logical
    // fidelity at 1
    let built = qec_round(1, AncillaVariant::ThreeAnc, 1);
    let layout = bacon_shor_at(3, 3, built.data.qubits.clone()).unwrap();
    let mut b = Build::new();
    b.circuit.num_qubits = built.circuit.num_qubits;
    let prep = prepare_logical(&layout, &GaugeSpec::Shor, BasisLabel::Plus, false).unwrap();
    b.circuit.extend_from(&prep);
    for (q, _) in layout.x_stabilizers()[0].iter() {
        b.circuit.push(Instruction::new(Gate::X, vec![q]).noiseless());
    }
    b.circuit.extend_from(&built.circuit);
    let s = run_trajectory(&b.circuit, &mut rng(4)).unwrap();
    let target = LogicalTarget::product(&[BasisLabel::Plus]).unwrap();
    let f = logical_fidelity(&s, std::slice::from_ref(&layout), &target).unwrap();
    assert!(f > 1.0 - 1e-9, "stabilizer injection fidelity {f}");
}

#[test]
fn inject_equals_inline_faults() {
    let built = qec_round(1, AncillaVariant::ThreeAnc, 1);
    let locs = fault_locations(&built.circuit);
    let fa = FaultAssignment {
        faults: vec![
            (locs[3].clone(), pauli_from_index(&locs[3].support, 5)),
            (locs[10].clone(), pauli_from_index(&locs[10].support, 2)),
        ],
    };
    let injected = inject(&built.circuit, &fa).unwrap();
    let s1 = run_trajectory(&injected, &mut rng(9)).unwrap();
    let s2 = run_sparse_with_faults(&built.circuit, &fa, &mut rng(9)).unwrap();
    assert_eq!(s1.amplitudes(), s2.amplitudes());
}

/// Builds the single-register QEC-round shot circuit used by the FT checks.
fn qec_shot(variant: AncillaVariant, label: BasisLabel) -> ShotCircuit {
    let built = qec_round(1, variant, 1);
    let layout = bacon_shor_at(3, 3, built.data.qubits.clone()).unwrap();
    let mut b = Build::new();
    b.circuit.num_qubits = built.circuit.num_qubits;
    let gauge = match label {
        BasisLabel::Plus | BasisLabel::Minus => GaugeSpec::Shor,
        _ => GaugeSpec::AntiShor,
    };
    let prep = prepare_logical(&layout, &gauge, label, false).unwrap();
    b.circuit.extend_from(&prep);
    b.circuit.extend_from(&built.circuit);
    let locations = fault_locations(&b.circuit);
    // ideal decode: one more noiseless round, then fidelity
    let mut pool = Pool::with_qubits(vec![built.spare]);
    let data = built.data.clone();
    b.noiseless(|b| {
        mfqec_core::protocols::append_qec_round(b, &data, AncillaVariant::ThreeAnc, &mut pool);
    });
    ShotCircuit {
        circuit: b.circuit,
        locations,
        check: ShotCheck::Fidelity {
            layouts: vec![layout],
            target: LogicalTarget::product(&[label]).unwrap(),
        },
    }
}

#[test]
fn qec_round_single_fault_certification_3anc() {
    for label in [BasisLabel::Zero, BasisLabel::Plus] {
        let shot = qec_shot(AncillaVariant::ThreeAnc, label);
        let violations = ft_verify(&shot, 1, FtMode::Exhaustive, 17).unwrap();
        assert!(
            violations.is_empty(),
            "3anc {label:?}: {} violations, first: {:?}",
            violations.len(),
            violations.first()
        );
    }
}

#[test]
fn qec_round_single_fault_certification_4anc() {
    for label in [BasisLabel::Zero, BasisLabel::Plus] {
        let shot = qec_shot(AncillaVariant::FourAnc, label);
        let violations = ft_verify(&shot, 1, FtMode::Exhaustive, 18).unwrap();
        assert!(
            violations.is_empty(),
            "4anc {label:?}: {} violations, first: {:?}",
            violations.len(),
            violations.first()
        );
    }
}

#[test]
fn qec_round_double_faults_break_distance_three() {
    // t = 2 sampled injection finds failures (the base code only corrects 1)
    let shot = qec_shot(AncillaVariant::ThreeAnc, BasisLabel::Zero);
    let violations = ft_verify(&shot, 2, FtMode::Sampled(20_000), 19).unwrap();
    assert!(!violations.is_empty(), "expected some double-fault failures");
}

#[test]
fn noiseless_ccz_shot_passes_fidelity_check() {
    let shot = {
        let exp = mfqec_core::analysis::Experiment::Ccz {
            method: GaugeFixMethod::Teleport,
            inputs: [BasisLabel::Plus; 3],
            gauge: GaugeSpec::Shor,
        };
        let prepared = mfqec_core::analysis::prepare(&exp).unwrap();
        prepared.variants.into_iter().next().unwrap()
    };
    let fail = shot.failure(&FaultAssignment::default(), &mut rng(0)).unwrap();
    assert!(!fail);
    let _ = FIDELITY_FAIL_THRESHOLD;
    let _ = Circuit::new(0, 0);
}
