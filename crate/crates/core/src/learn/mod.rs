//! Tabular Q-learning over sampling-only access to an MDP.
//!
//! The main learner maximizes the probability of reaching the sink `t` of
//! the ζ-augmented product (reward 1 on entering `t`, no discount). The
//! Rabin-reward learner on the plain product is kept as a baseline.
//!
//! Randomness: run `r` of seed `s` uses the seed drawn from stream `r` of a
//! ChaCha8 generator seeded with `s` (see [`run_seed`]); within a run,
//! episode `e` samples transitions from stream `2e` and exploration from
//! stream `2e + 1`. Results therefore do not depend on how runs are
//! scheduled.

mod env;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::MixedStrategy;
use crate::product::{augment, AugmentedMdp, Product, ProductError};

pub use env::{Env, Step};

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("choice {choice} is not enabled in state {state}")]
    NotEnabled { state: usize, choice: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no Rabin pair {0}")]
    NoSuchPair(usize),
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// Learning-rate schedule of a `(state, choice)` pair after `n` updates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepSize {
    /// `alpha` throughout.
    Constant,
    /// `alpha * n0 / (n0 + n)`.
    Harmonic(f64),
}

/// Step size used for the Rabin baseline. A decaying rate lets it
/// separate strategies whose discounted values differ by much less than
/// the noise of a constant rate.
pub const BASELINE_STEP_SIZE: StepSize = StepSize::Harmonic(1000.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    pub episodes: usize,
    pub episode_length: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub zeta: f64,
    pub seed: u64,
    pub runs: usize,
    pub step_size: StepSize,
    /// Actions within this of the best Q-value share the extracted
    /// strategy's probability mass.
    pub tie_tol: f64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            episodes: 20_000,
            episode_length: 80,
            alpha: 0.1,
            epsilon: 0.1,
            gamma: 1.0,
            zeta: 0.99,
            seed: 0,
            runs: 5,
            step_size: StepSize::Constant,
            tie_tol: 0.01,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<(), LearnError> {
        let bad = |m: &str| Err(LearnError::InvalidConfig(m.to_string()));
        if self.episode_length == 0 {
            return bad("episode length must be positive");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha must lie in (0,1]");
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return bad("epsilon must lie in [0,1]");
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad("gamma must lie in (0,1]");
        }
        if !(self.zeta > 0.0 && self.zeta < 1.0) {
            return bad("zeta must lie in (0,1)");
        }
        if self.runs == 0 {
            return bad("runs must be positive");
        }
        if let StepSize::Harmonic(n0) = self.step_size {
            if !(n0 > 0.0) {
                return bad("harmonic step size needs a positive offset");
            }
        }
        if !(self.tie_tol >= 0.0) {
            return bad("tie tolerance must be nonnegative");
        }
        Ok(())
    }
}

/// Objective of the Rabin-reward baseline. `Average` is relative value
/// iteration Q-learning; it only converges when every strategy induces a
/// single recurrent class, which products with a trap sink violate. Large
/// discounts select average-optimal strategies on those, hence the
/// default `Discounted(0.99)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RewardMode {
    Discounted(f64),
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabinRewardConfig {
    pub pair: usize,
    pub r_plus: f64,
    pub r_minus: f64,
    pub mode: RewardMode,
}

impl Default for RabinRewardConfig {
    fn default() -> Self {
        RabinRewardConfig {
            pair: 0,
            r_plus: 1.0,
            r_minus: 1.0,
            mode: RewardMode::Discounted(0.99),
        }
    }
}

/// Q-values and visit counts; a state's row exists once it was seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    q: Vec<Option<Vec<f64>>>,
    visits: Vec<Option<Vec<u64>>>,
}

impl QTable {
    pub fn new(num_states: usize) -> Self {
        QTable {
            q: vec![None; num_states],
            visits: vec![None; num_states],
        }
    }

    pub fn from_rows(rows: Vec<Option<Vec<f64>>>) -> Self {
        let visits = rows.iter().map(|r| r.as_ref().map(|r| vec![0; r.len()])).collect();
        QTable { q: rows, visits }
    }

    pub fn num_states(&self) -> usize {
        self.q.len()
    }

    fn ensure(&mut self, s: usize, k: usize) {
        if self.q[s].is_none() {
            self.q[s] = Some(vec![0.0; k]);
            self.visits[s] = Some(vec![0; k]);
        }
    }

    pub fn row(&self, s: usize) -> Option<&[f64]> {
        self.q[s].as_deref()
    }

    pub fn visits(&self, s: usize) -> Option<&[u64]> {
        self.visits[s].as_deref()
    }

    pub fn get(&self, s: usize, c: usize) -> Option<f64> {
        self.row(s).map(|r| r[c])
    }

    /// Largest Q-value at `s` (0 for unseen states).
    pub fn max(&self, s: usize) -> f64 {
        self.row(s)
            .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .unwrap_or(0.0)
    }
}

/// Seed of run `run` derived from `seed`.
pub fn run_seed(seed: u64, run: u64) -> u64 {
    env::stream_rng(seed, run).next_u64()
}

fn greedy(row: &[f64], rng: &mut impl Rng) -> usize {
    let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = (0..row.len()).filter(|&c| row[c] == best).collect();
    ties[rng.gen_range(0..ties.len())]
}

/// Shared TD loop. `target(reward, max_next, done, q)` gives the update
/// target.
fn td_learn(env: &mut Env, cfg: &LearnConfig, seed: u64, target: impl Fn(f64, f64, bool, &QTable) -> f64) -> QTable {
    let mut q = QTable::new(env.num_states());
    for e in 0..cfg.episodes as u64 {
        let mut s = env.reset(e);
        let mut rng = env::stream_rng(seed, 2 * e + 1);
        loop {
            q.ensure(s, env.num_choices(s));
            let row = q.row(s).expect("row exists");
            let c = if rng.gen::<f64>() < cfg.epsilon {
                rng.gen_range(0..row.len())
            } else {
                greedy(row, &mut rng)
            };
            let step = env.step(c).expect("learner picks enabled choices");
            let next = step.state;
            q.ensure(next, env.num_choices(next));
            let y = target(step.reward, q.max(next), step.done, &q);
            let n = &mut q.visits[s].as_mut().expect("row exists")[c];
            let alpha = match cfg.step_size {
                StepSize::Constant => cfg.alpha,
                StepSize::Harmonic(n0) => cfg.alpha * n0 / (n0 + *n as f64),
            };
            *n += 1;
            let cell = &mut q.q[s].as_mut().expect("row exists")[c];
            *cell += alpha * (y - *cell);
            if step.done || step.truncated {
                break;
            }
            s = next;
        }
    }
    q
}

/// Q-learning on `env` with an ε-greedy behavior policy (exact ties broken
/// uniformly at random). Exploration draws from the streams of `cfg.seed`,
/// which should match the seed `env` was built with. Terminal states
/// contribute no future value; truncated episodes bootstrap from the last
/// state.
pub fn q_learning(env: &mut Env, cfg: &LearnConfig) -> Result<QTable, LearnError> {
    cfg.validate()?;
    let gamma = cfg.gamma;
    Ok(td_learn(env, cfg, cfg.seed, |r, next, done, _| {
        if done {
            r
        } else {
            r + gamma * next
        }
    }))
}

/// Environment over the ζ-augmented product, seeded with `cfg.seed`.
pub fn make_env<'a>(aug: &'a AugmentedMdp, cfg: &LearnConfig) -> Result<Env<'a>, LearnError> {
    cfg.validate()?;
    Ok(Env::reach(aug, cfg.episode_length, cfg.seed))
}

/// Augments `p` with `cfg.zeta` and learns on it.
pub fn learn_product(p: &Product, cfg: &LearnConfig) -> Result<(QTable, AugmentedMdp), LearnError> {
    let aug = augment(p, cfg.zeta)?;
    let mut env = make_env(&aug, cfg)?;
    let q = q_learning(&mut env, cfg)?;
    Ok((q, aug))
}

/// Baseline learner on the plain product with a Rabin reward. Discounted
/// mode is ordinary Q-learning with the given discount; average mode is
/// relative value iteration Q-learning, subtracting the best Q-value of
/// the initial state as the gain estimate.
pub fn rabin_q_learning(p: &Product, cfg: &LearnConfig, rcfg: &RabinRewardConfig) -> Result<QTable, LearnError> {
    cfg.validate()?;
    let mut env = Env::rabin(p, rcfg, cfg.episode_length, cfg.seed)?;
    let s0 = env.initial();
    Ok(match rcfg.mode {
        RewardMode::Discounted(lambda) => {
            if !(lambda > 0.0 && lambda < 1.0) {
                return Err(LearnError::InvalidConfig("discount must lie in (0,1)".into()));
            }
            td_learn(&mut env, cfg, cfg.seed, move |r, next, _, _| r + lambda * next)
        }
        RewardMode::Average => td_learn(&mut env, cfg, cfg.seed, move |r, next, _, q| r - q.max(s0) + next),
    })
}

/// Per seen state, the uniform distribution over choices whose Q-value is
/// within `tie_tol` of the best. Unseen states stay undefined.
pub fn extract_strategy(q: &QTable, tie_tol: f64) -> MixedStrategy {
    let mut sigma = MixedStrategy::undefined(q.num_states());
    for s in 0..q.num_states() {
        if let Some(row) = q.row(s) {
            if row.is_empty() {
                continue;
            }
            let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let support: Vec<usize> = (0..row.len()).filter(|&c| row[c] >= best - tie_tol).collect();
            sigma.set_uniform(s, row.len(), &support);
        }
    }
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extraction_ties() {
        let q = QTable::from_rows(vec![Some(vec![1.0, 1.0]), Some(vec![0.9, 0.3]), Some(vec![0.5, 0.5 - 1e-7]), None]);
        let s = extract_strategy(&q, 1e-6);
        assert_eq!(s.get(0), Some(&[0.5, 0.5][..]));
        assert_eq!(s.get(1), Some(&[1.0, 0.0][..]));
        assert_eq!(s.get(2), Some(&[0.5, 0.5][..]));
        assert_eq!(s.get(3), None);
    }

    #[test]
    fn run_seeds_differ() {
        assert_ne!(run_seed(1, 0), run_seed(1, 1));
        assert_eq!(run_seed(7, 3), run_seed(7, 3));
    }

    #[test]
    fn config_ranges() {
        assert!(LearnConfig::default().validate().is_ok());
        let c = LearnConfig {
            zeta: 1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
