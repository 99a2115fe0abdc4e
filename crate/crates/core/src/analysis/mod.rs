//! Exact analysis of MDPs and products: end components, optimal
//! reachability, and evaluation of fixed strategies on their induced chains.

mod chain;
mod mec;
mod reach;
mod strategy;

use thiserror::Error;

pub use chain::{evaluate_strategy, expected_average_reward, induced_chain, Bscc, Chain, EvalReport};
pub use mec::{
    accepting_mecs, accepting_states, mec_decomposition, mec_decomposition_within, rabin_accepting_mecs, Mec,
    MecDecomposition,
};
pub use reach::{max_reach_prob, max_satisfaction_prob, prob0a, prob1e, ReachOptions, ReachResult};
pub use strategy::{positional_strategies, MixedStrategy, STRATEGY_TOLERANCE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("value iteration did not converge after {iterations} sweeps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("strategy undefined at reachable state {0}")]
    UndefinedStrategy(usize),
    #[error("invalid strategy at state {state}: {msg}")]
    InvalidStrategy { state: usize, msg: String },
    #[error("singular linear system")]
    Singular,
    #[error("expected a Büchi product")]
    NotBuchi,
    #[error("zeta {0} outside (0,1)")]
    ZetaOutOfRange(f64),
}
