//! Simulation laboratory for measurement-free fault-tolerant error
//! correction on the Bacon-Shor code: protocol circuit builders, a sparse
//! state-vector engine, a stabilizer-tableau engine, depolarizing-noise
//! Monte Carlo, fault-injection verification, and scaling analysis.

pub mod analysis;
pub mod circuit;
pub mod codes;
pub mod dense;
pub mod noise;
pub mod pauli;
pub mod protocols;
pub mod sparse;
pub mod tableau;
pub mod text;

pub use circuit::{fault_locations, validate, Circuit, Condition, FaultLocation, Gate, Instruction};
pub use codes::{bacon_shor, repetition, BasisLabel, CodeLayout, ConcatLayout, GaugeSpec};
pub use noise::{inject, sample_faults, FaultAssignment, NoiseModel};
pub use pauli::{PauliOp, PauliString};
pub use sparse::{init_state, run_trajectory, SparseState};
pub use tableau::{run_clifford, ClassicalStore, Tableau};
pub use text::{parse_text, serialize_text};
