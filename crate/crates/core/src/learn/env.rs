use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::Mdp;
use crate::product::{AugmentedMdp, Product, ProductAcceptance};

use super::{LearnError, RabinRewardConfig};

/// Generator for stream `stream` of a run seeded with `seed`.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone)]
enum Reward {
    /// Reward 1 on entering the terminal state, which ends the episode.
    Reach(usize),
    /// Reward per `(state, choice)`; episodes only end by truncation.
    PerChoice(Vec<Vec<f64>>),
}

/// Outcome of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub state: usize,
    pub reward: f64,
    /// The terminal state was reached.
    pub done: bool,
    /// The episode hit its step limit without terminating.
    pub truncated: bool,
}

/// Sampling access to an MDP. The learner sees state ids, the number of
/// enabled choices, rewards and episode ends; never the probabilities.
///
/// Episode `e` draws successors from stream `2e` of the seed.
#[derive(Debug, Clone)]
pub struct Env<'a> {
    mdp: &'a Mdp,
    reward: Reward,
    episode_length: usize,
    seed: u64,
    state: usize,
    steps: usize,
    rng: ChaCha8Rng,
}

impl<'a> Env<'a> {
    /// Episodic reachability of `t` on the augmented MDP.
    pub fn reach(aug: &'a AugmentedMdp, episode_length: usize, seed: u64) -> Self {
        Self::reaching(aug.mdp(), aug.t(), episode_length, seed)
    }

    /// Episodic reachability of `target` on any MDP.
    pub fn reaching(mdp: &'a Mdp, target: usize, episode_length: usize, seed: u64) -> Self {
        Self::with_reward(mdp, Reward::Reach(target), episode_length, seed)
    }

    /// Rabin reward of one pair on the plain product: `-r_minus` on the
    /// pair's fin choices, `r_plus` on its inf choices. A Büchi product is
    /// read as the single pair `(∅, F)`.
    pub fn rabin(p: &'a Product, rcfg: &RabinRewardConfig, episode_length: usize, seed: u64) -> Result<Self, LearnError> {
        let (fin, inf) = match p.acceptance() {
            ProductAcceptance::Buchi(f) if rcfg.pair == 0 => (None, f),
            ProductAcceptance::Rabin(pairs) if rcfg.pair < pairs.len() => {
                (Some(&pairs[rcfg.pair].fin), &pairs[rcfg.pair].inf)
            }
            _ => return Err(LearnError::NoSuchPair(rcfg.pair)),
        };
        let rewards = inf
            .iter()
            .enumerate()
            .map(|(s, cs)| {
                (0..cs.len())
                    .map(|c| {
                        if fin.is_some_and(|f| f[s][c]) {
                            -rcfg.r_minus
                        } else if cs[c] {
                            rcfg.r_plus
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self::with_reward(p.mdp(), Reward::PerChoice(rewards), episode_length, seed))
    }

    fn with_reward(mdp: &'a Mdp, reward: Reward, episode_length: usize, seed: u64) -> Self {
        Env {
            mdp,
            reward,
            episode_length,
            seed,
            state: mdp.initial(),
            steps: 0,
            rng: stream_rng(seed, 0),
        }
    }

    pub fn num_states(&self) -> usize {
        self.mdp.num_states()
    }

    pub fn initial(&self) -> usize {
        self.mdp.initial()
    }

    pub fn state(&self) -> usize {
        self.state
    }

    pub fn num_choices(&self, s: usize) -> usize {
        self.mdp.choices(s).len()
    }

    /// Starts episode `episode` in the initial state.
    pub fn reset(&mut self, episode: u64) -> usize {
        self.rng = stream_rng(self.seed, 2 * episode);
        self.state = self.mdp.initial();
        self.steps = 0;
        self.state
    }

    pub fn step(&mut self, choice: usize) -> Result<Step, LearnError> {
        let s = self.state;
        let ch = self
            .mdp
            .choices(s)
            .get(choice)
            .ok_or(LearnError::NotEnabled { state: s, choice })?;
        let u: f64 = self.rng.gen();
        let mut acc = 0.0;
        let mut next = ch.dist.last().expect("empty distribution").0;
        for &(t, p) in &ch.dist {
            acc += p;
            if u < acc {
                next = t;
                break;
            }
        }
        self.state = next;
        self.steps += 1;
        let (reward, done) = match &self.reward {
            Reward::Reach(t) => {
                if next == *t {
                    (1.0, true)
                } else {
                    (0.0, false)
                }
            }
            Reward::PerChoice(r) => (r[s][choice], false),
        };
        Ok(Step {
            state: next,
            reward,
            done,
            truncated: !done && self.steps >= self.episode_length,
        })
    }
}
