//! Ground-state estimation for diagonal Hamiltonians by quantum phase
//! estimation followed by heralded imaginary-time filtering.
//!
//! The closed-form pipeline (`qpe`, `qite`) works level by level on the
//! exact spectrum; `circuit` simulates the same algorithm gate by gate and
//! serves as an oracle; `synthesis` estimates Clifford+T costs.

// `!(x >= 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod error;
pub mod export;
pub mod fit;
pub mod hamiltonians;
pub mod qite;
pub mod qpe;
pub mod spectrum;
pub mod synthesis;

pub use error::{Error, Result};
pub use hamiltonians::{labs_energy_hamiltonian, labs_hamiltonian, DiagonalHamiltonian, SpinSequence, ZMonomial};
pub use qite::{apply_qite, min_tau, MinTau, QiteOutcome, QiteSweep};
pub use qpe::{run_qpe, run_qpe_uniform, InitialState, QpeResult, RegisterConfig};
pub use spectrum::{enumerate_spectrum, Spectrum};
