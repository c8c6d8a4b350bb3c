//! Permutation-valued spin models obtained by Haar-averaging replicated
//! random circuits: characters, Weingarten functions, Boltzmann weights and
//! exact partition functions of tiny circuits.

mod characters;
mod partition;
mod perm;
mod weights;
mod weingarten;

pub use characters::{character, partitions, CharacterCache, Partition};
pub use partition::{
    boundary_pair, exact_partition_function, fully_measured_closed_form, haar_monte_carlo, TinyCircuit,
    MAX_FREE_SPINS,
};
pub use perm::{all_permutations, factorial, Permutation};
pub use weights::{
    fk_partition_function, link_weight, link_weight_with, potts_partition_function, triangle_weight, Graph,
    MeasuredWeight, TriangleWeights, MAX_TRIANGLE_Q,
};
pub use weingarten::{
    orthogonality_violation, weingarten_from_characters, weingarten_from_gram, weingarten_table, WeingartenTable,
    MAX_GRAM_Q, MAX_Q,
};
