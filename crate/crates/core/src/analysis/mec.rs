//! Maximal end components by iterated SCC decomposition and action pruning.

use crate::graph;
use crate::model::Mdp;
use crate::product::{ChoiceMarks, Product, ProductAcceptance};

use super::AnalysisError;

/// One maximal end component: its states (sorted) and, per state, the
/// retained choice indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mec {
    pub states: Vec<usize>,
    pub choices: Vec<Vec<usize>>,
}

impl Mec {
    pub fn contains(&self, s: usize) -> bool {
        self.states.binary_search(&s).is_ok()
    }

    /// Retained `(state, choice)` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.states
            .iter()
            .zip(&self.choices)
            .flat_map(|(&s, cs)| cs.iter().map(move |&c| (s, c)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MecDecomposition {
    pub mecs: Vec<Mec>,
    /// MEC index of every state, if any.
    pub of_state: Vec<Option<usize>>,
}

impl MecDecomposition {
    /// Per-choice mask of choices retained by some MEC.
    pub fn retained(&self, m: &Mdp) -> ChoiceMarks {
        let mut mask: ChoiceMarks = (0..m.num_states()).map(|s| vec![false; m.choices(s).len()]).collect();
        for mec in &self.mecs {
            for (s, c) in mec.pairs() {
                mask[s][c] = true;
            }
        }
        mask
    }
}

pub fn mec_decomposition(m: &Mdp) -> MecDecomposition {
    let all: ChoiceMarks = (0..m.num_states()).map(|s| vec![true; m.choices(s).len()]).collect();
    mec_decomposition_within(m, &all)
}

/// MECs of the sub-MDP that only keeps the choices marked in `allowed`.
pub fn mec_decomposition_within(m: &Mdp, allowed: &ChoiceMarks) -> MecDecomposition {
    let n = m.num_states();
    let mut alive_choice = allowed.clone();
    let mut alive: Vec<bool> = alive_choice.iter().map(|cs| cs.iter().any(|&b| b)).collect();
    let comp = loop {
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|s| {
                if !alive[s] {
                    return Vec::new();
                }
                m.choices(s)
                    .iter()
                    .enumerate()
                    .filter(|&(c, _)| alive_choice[s][c])
                    .flat_map(|(_, ch)| ch.dist.iter().map(|&(t, _)| t))
                    .collect()
            })
            .collect();
        let (comp, _) = graph::scc(&adj, &alive);
        let mut changed = false;
        for s in 0..n {
            if !alive[s] {
                continue;
            }
            for (c, ch) in m.choices(s).iter().enumerate() {
                if alive_choice[s][c] && ch.dist.iter().any(|&(t, _)| !alive[t] || comp[t] != comp[s]) {
                    alive_choice[s][c] = false;
                    changed = true;
                }
            }
        }
        for s in 0..n {
            if alive[s] && !alive_choice[s].iter().any(|&b| b) {
                alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            break comp;
        }
    };

    let mut of_state = vec![None; n];
    let mut mecs: Vec<Mec> = Vec::new();
    let mut by_comp = std::collections::HashMap::new();
    for s in 0..n {
        if !alive[s] {
            continue;
        }
        let k = *by_comp.entry(comp[s]).or_insert_with(|| {
            mecs.push(Mec {
                states: Vec::new(),
                choices: Vec::new(),
            });
            mecs.len() - 1
        });
        of_state[s] = Some(k);
        mecs[k].states.push(s);
        mecs[k]
            .choices
            .push((0..m.choices(s).len()).filter(|&c| alive_choice[s][c]).collect());
    }
    MecDecomposition { mecs, of_state }
}

/// Büchi products: MECs retaining at least one accepting choice.
pub fn accepting_mecs(p: &Product, dec: &MecDecomposition) -> Result<Vec<usize>, AnalysisError> {
    let marks = p.buchi().ok_or(AnalysisError::NotBuchi)?;
    Ok(dec
        .mecs
        .iter()
        .enumerate()
        .filter(|(_, mec)| mec.pairs().any(|(s, c)| marks[s][c]))
        .map(|(i, _)| i)
        .collect())
}

/// MECs that contain, for some pair `i`, an end component avoiding `B_i`
/// and using a `G_i` choice. Büchi products are treated as one pair `(∅, F)`.
pub fn rabin_accepting_mecs(p: &Product, dec: &MecDecomposition) -> Vec<usize> {
    let m = p.mdp();
    let retained = dec.retained(m);
    let pairs: Vec<(ChoiceMarks, ChoiceMarks)> = match p.acceptance() {
        ProductAcceptance::Buchi(f) => vec![(
            f.iter().map(|cs| vec![false; cs.len()]).collect(),
            f.clone(),
        )],
        ProductAcceptance::Rabin(ps) => ps.iter().map(|cp| (cp.fin.clone(), cp.inf.clone())).collect(),
    };
    let mut accepting = vec![false; dec.mecs.len()];
    for (fin, inf) in &pairs {
        let allowed: ChoiceMarks = retained
            .iter()
            .zip(fin)
            .map(|(r, f)| r.iter().zip(f).map(|(&r, &f)| r && !f).collect())
            .collect();
        let sub = mec_decomposition_within(m, &allowed);
        for mec in &sub.mecs {
            if mec.pairs().any(|(s, c)| inf[s][c]) {
                if let Some(k) = dec.of_state[mec.states[0]] {
                    accepting[k] = true;
                }
            }
        }
    }
    (0..dec.mecs.len()).filter(|&k| accepting[k]).collect()
}

/// States belonging to accepting MECs (Büchi or Rabin).
pub fn accepting_states(p: &Product) -> Vec<bool> {
    let dec = mec_decomposition(p.mdp());
    let acc = match p.acceptance() {
        ProductAcceptance::Buchi(_) => accepting_mecs(p, &dec).expect("Büchi product"),
        ProductAcceptance::Rabin(_) => rabin_accepting_mecs(p, &dec),
    };
    let mut target = vec![false; p.num_states()];
    for k in acc {
        for &s in &dec.mecs[k].states {
            target[s] = true;
        }
    }
    target
}
