//! Embedded example models with their objectives.

use std::collections::BTreeMap;

use crate::automata::{parse_hoa, Automaton};
use crate::model::{parse_model, Mdp, ModelError, ModelFormat};

#[derive(Debug, Clone, Copy)]
pub struct CorpusEntry {
    pub name: &'static str,
    /// Restricted-PRISM source.
    pub model: &'static str,
    /// Büchi automaton (deterministic or limit-deterministic) for `ltl`.
    pub automaton: &'static str,
    /// Rabin automaton for the baseline, if the objective needs more than
    /// one pair.
    pub rabin: Option<&'static str>,
    pub ltl: &'static str,
    /// Model constant that `--p` overrides, with its default.
    pub parameter: Option<(&'static str, f64)>,
}

pub const ENTRIES: [CorpusEntry; 3] = [
    CorpusEntry {
        name: "twoPairs",
        model: include_str!("../corpus/twoPairs.prism"),
        automaton: include_str!("../corpus/twoPairs.ldbw.hoa"),
        rabin: Some(include_str!("../corpus/twoPairs.drw.hoa")),
        ltl: "(F G g0 | F G g1) & G !b",
        parameter: Some(("p", 0.5)),
    },
    CorpusEntry {
        name: "riskReward",
        model: include_str!("../corpus/riskReward.prism"),
        automaton: include_str!("../corpus/riskReward.dbw.hoa"),
        rabin: None,
        ltl: "G !b & G F g",
        parameter: Some(("p", 0.75)),
    },
    CorpusEntry {
        name: "deferred",
        model: include_str!("../corpus/deferred.prism"),
        automaton: include_str!("../corpus/deferred.dbw.hoa"),
        rabin: None,
        ltl: "G F acc",
        parameter: None,
    },
];

pub fn entry(name: &str) -> Option<&'static CorpusEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}

impl CorpusEntry {
    /// The model, with its parameter set to `p` if given.
    pub fn mdp(&self, p: Option<f64>) -> Result<Mdp, ModelError> {
        let mut overrides = BTreeMap::new();
        if let Some(v) = p {
            let (name, _) = self.parameter.ok_or_else(|| ModelError::UnknownIdentifier {
                pos: Default::default(),
                name: "p".into(),
            })?;
            overrides.insert(name.to_string(), v);
        }
        parse_model(self.model, ModelFormat::PrismSubset, &overrides)
    }

    pub fn automaton(&self) -> Automaton {
        parse_hoa(self.automaton)
            .expect("embedded automaton is valid")
            .with_name(self.ltl)
    }

    /// Rabin automaton for the baseline; Büchi objectives become the single
    /// pair `(∅, F)`.
    pub fn rabin_automaton(&self) -> Automaton {
        match self.rabin {
            Some(text) => parse_hoa(text).expect("embedded automaton is valid"),
            None => self.automaton().to_rabin(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::AutomatonClass;

    #[test]
    fn sizes() {
        let sizes: Vec<(usize, usize)> = ENTRIES
            .iter()
            .map(|e| (e.mdp(None).unwrap().num_states(), e.automaton().num_states()))
            .collect();
        assert_eq!(sizes, vec![(4, 4), (4, 2), (41, 1)]);
    }

    #[test]
    fn classes() {
        let two = entry("twoPairs").unwrap();
        assert_eq!(two.automaton().classify().unwrap(), AutomatonClass::LimitDeterministic);
        assert_eq!(two.rabin_automaton().classify().unwrap(), AutomatonClass::Deterministic);
        assert_eq!(entry("riskReward").unwrap().automaton().classify().unwrap(), AutomatonClass::Deterministic);
    }

    #[test]
    fn parameter_override() {
        let m = entry("riskReward").unwrap().mdp(Some(0.25)).unwrap();
        let b = m.choice_index(0, "b").unwrap();
        let dist = &m.choices(0)[b].dist;
        assert!(dist.iter().any(|&(_, q)| (q - 0.25).abs() < 1e-15));
        assert!(entry("deferred").unwrap().mdp(Some(0.5)).is_err());
    }
}
