//! Learning strategies for ω-regular objectives on finite MDPs.
//!
//! The pipeline: parse an MDP ([`model`]) and an ω-automaton ([`automata`]),
//! build their product and the ζ-augmented reachability MDP ([`product`]),
//! learn on it with tabular Q-learning ([`learn`]) and check the learned
//! strategy exactly ([`analysis`]). [`corpus`] embeds the example models.

pub mod analysis;
pub mod automata;
pub mod corpus;
pub mod graph;
pub mod learn;
pub mod model;
pub mod product;
pub mod random;

pub use model::{parse_model, Mdp, ModelError, ModelFormat};
