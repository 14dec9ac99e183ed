//! Seeded generators and brute-force oracles shared by the tests, the
//! acceptance suite and the `check` command.

pub mod oracle;
pub mod random;

pub use random::{
    node_stars, random_contraction_chain, random_partial_orientation, random_system, random_tree_set, rng,
    ContractionChain, Planting, PlantedTreeSet, Tree,
};
