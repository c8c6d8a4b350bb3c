//! Exact state-vector oracle for small systems.
//!
//! Amplitudes are indexed with site 0 as the most significant digit, so a
//! two-site gate on `(a, b)` sees the local basis `|s_a s_b>` with index
//! `s_a * d + s_b`, matching `kron(A_a, A_b)`.

mod gates;
mod state;

pub use gates::{clifford_unitary, pauli_matrix, sample_haar_unitary, DenseGate};
pub use state::{Basis, DenseState, MAX_AMPLITUDES};

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = nalgebra::DMatrix<C64>;
