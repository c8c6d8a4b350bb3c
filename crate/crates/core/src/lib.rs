//! Simulation and analysis toolkit for hybrid (unitary + measurement) random
//! quantum circuits.
//!
//! The crate is organised by subsystem:
//!
//! * [`stab`]: binary-symplectic stabilizer states, Clifford gates and Pauli
//!   measurements, including rank-deficient (mixed) states.
//! * [`dense`]: exact state-vector oracle with Haar and U(1)-block gates.
//! * [`dynamics`]: monitored random circuit trajectories and ensembles.
//! * [`kpz`]: the minimal surface-growth model of entanglement.
//! * [`spreading`]: operator-front dynamics, exact kernel and Clifford runs.
//! * [`replica`]: permutations, characters, Weingarten functions and the
//!   replica statistical-mechanics weights.
//! * [`mincut`]: measurement-diluted brickwork lattices and minimal cuts.
//! * [`charge`]: stochastic charge transport under U(1)-symmetric gates.
//! * [`collapse`]: finite-size-scaling collapse fits.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charge;
pub mod collapse;
pub mod dense;
pub mod dynamics;
mod error;
pub mod gf2;
pub mod parallel;
pub mod kpz;
pub mod mincut;
pub mod replica;
pub mod rng;
pub mod spreading;
pub mod stab;
pub mod stats;

pub use error::{Error, Result};
