//! Clifford+T compilation: Solovay–Kitaev synthesis, the ancilla-rotation
//! stage, and whole-circuit resource counts.

pub mod multiplexor;
pub mod net;
pub mod resources;
pub mod sk;
pub mod taylor;
pub mod unitary;
pub mod word;

pub use multiplexor::{decompose_multiplexed_ry, multiplexor_angles, simplify};
pub use net::{EpsilonNet, DEFAULT_NET_LENGTH, MAX_NET_LENGTH};
pub use resources::{fit_sk_exponent, resource_report, ResourceReport, StageReport, UarMode};
pub use sk::{group_commutator, sk_chain, sk_synthesize, SynthesisResult, MAX_DEPTH};
pub use taylor::{uar_taylor_circuit, uar_taylor_order, TaylorCircuit};
pub use unitary::{quaternion_distance, Unitary2};
pub use word::{GateWord, Symbol};
