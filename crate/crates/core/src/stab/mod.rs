//! Binary-symplectic stabilizer formalism.
//!
//! States are stored as a (possibly rank-deficient) list of commuting
//! generators; destabilizers are not tracked, so maximally mixed and
//! partially purified states are first-class. Deterministic measurement
//! outcomes are recovered by Gaussian elimination over GF(2).

mod clifford;
mod pauli;
mod state;

pub use clifford::{enumerate_two_qubit_cliffords, random_two_qubit_clifford, CliffordGate, TWO_QUBIT_CLIFFORD_COUNT};
pub use pauli::{Pauli, PauliString};
pub use state::{Measurement, StabilizerState};
