use serde::{Deserialize, Serialize};

use crate::model::Mdp;

use super::AnalysisError;

/// Allowed deviation of a distribution's total mass from 1.
pub const STRATEGY_TOLERANCE: f64 = 1e-12;

/// A stationary, possibly randomized strategy: per state, a distribution
/// over the state's choices (indexed like `Mdp::choices`). `None` leaves a
/// state undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategy {
    probs: Vec<Option<Vec<f64>>>,
}

impl MixedStrategy {
    pub fn undefined(num_states: usize) -> Self {
        MixedStrategy {
            probs: vec![None; num_states],
        }
    }

    /// Pure positional strategy picking `choice[s]` in every state.
    pub fn pure(m: &Mdp, choice: &[usize]) -> Self {
        let probs = choice
            .iter()
            .enumerate()
            .map(|(s, &c)| {
                let mut d = vec![0.0; m.choices(s).len()];
                d[c] = 1.0;
                Some(d)
            })
            .collect();
        MixedStrategy { probs }
    }

    /// Uniform over all choices everywhere.
    pub fn uniform(m: &Mdp) -> Self {
        let mut s = Self::undefined(m.num_states());
        s.fill_uniform(m);
        s
    }

    pub fn num_states(&self) -> usize {
        self.probs.len()
    }

    pub fn get(&self, s: usize) -> Option<&[f64]> {
        self.probs.get(s)?.as_deref()
    }

    pub fn set(&mut self, s: usize, dist: Vec<f64>) {
        self.probs[s] = Some(dist);
    }

    /// Uniform over `support` among `num_choices` choices.
    pub fn set_uniform(&mut self, s: usize, num_choices: usize, support: &[usize]) {
        let mut d = vec![0.0; num_choices];
        for &c in support {
            d[c] = 1.0 / support.len() as f64;
        }
        self.probs[s] = Some(d);
    }

    /// Defines every undefined state as uniform over its choices.
    pub fn fill_uniform(&mut self, m: &Mdp) {
        self.probs.resize(m.num_states(), None);
        for s in 0..m.num_states() {
            if self.probs[s].is_none() {
                let k = m.choices(s).len();
                self.probs[s] = Some(vec![1.0 / k as f64; k]);
            }
        }
    }

    pub fn is_total(&self) -> bool {
        self.probs.iter().all(Option::is_some)
    }

    pub fn is_pure(&self) -> bool {
        self.probs
            .iter()
            .flatten()
            .all(|d| d.iter().filter(|&&x| x > 0.0).count() == 1)
    }

    /// Choices with positive probability at `s`.
    pub fn support(&self, s: usize) -> Vec<usize> {
        self.get(s)
            .map(|d| (0..d.len()).filter(|&c| d[c] > 0.0).collect())
            .unwrap_or_default()
    }

    pub fn validate(&self, m: &Mdp) -> Result<(), AnalysisError> {
        if self.probs.len() != m.num_states() {
            return Err(AnalysisError::InvalidStrategy {
                state: self.probs.len().min(m.num_states()),
                msg: format!("defined over {} states, model has {}", self.probs.len(), m.num_states()),
            });
        }
        for (s, d) in self.probs.iter().enumerate() {
            let Some(d) = d else { continue };
            let bad = |msg: String| Err(AnalysisError::InvalidStrategy { state: s, msg });
            if d.len() != m.choices(s).len() {
                return bad(format!("{} entries for {} choices", d.len(), m.choices(s).len()));
            }
            if d.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                return bad("probability outside [0,1]".into());
            }
            let mass: f64 = d.iter().sum();
            if (mass - 1.0).abs() > STRATEGY_TOLERANCE {
                return bad(format!("mass {mass}"));
            }
        }
        Ok(())
    }
}

/// Every pure positional strategy of `m`, in lexicographic order of the
/// choice vector. Returns `None` if there are more than `limit`.
pub fn positional_strategies(m: &Mdp, limit: usize) -> Option<Vec<Vec<usize>>> {
    let n = m.num_states();
    let mut total: usize = 1;
    for s in 0..n {
        total = total.checked_mul(m.choices(s).len().max(1))?;
        if total > limit {
            return None;
        }
    }
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0usize; n];
    loop {
        out.push(cur.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return Some(out);
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < m.choices(i).len() {
                break;
            }
            cur[i] = 0;
        }
    }
}
