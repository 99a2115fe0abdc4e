//! ω-automata over `2^AP` with transition-based Büchi or Rabin acceptance,
//! the HOA text format, limit-deterministic Büchi automata, and lasso-word
//! tools (membership, enumeration, LTL evaluation) used for testing.

pub mod guard;
pub mod hoa;
pub mod lasso;
pub mod ldbw;
pub mod ltl;

pub use guard::{Guard, Letter};
pub use hoa::{parse_hoa, print_hoa};
pub use ldbw::{nbw_to_ldbw, Ldbw};

use thiserror::Error;

/// Alphabets larger than this are not enumerated letter by letter.
pub const MAX_ENUMERATED_AP: usize = 20;

#[derive(Debug, Error)]
pub enum AutomatonError {
    #[error("HOA line {line}: {msg}")]
    Hoa { line: usize, msg: String },
    #[error("unsupported acceptance condition `{0}`")]
    UnsupportedAcceptance(String),
    #[error("HOA line {line}: undeclared proposition {index}")]
    UndeclaredAp { line: usize, index: usize },
    #[error("invalid automaton: {0}")]
    Invalid(String),
    #[error("expected a Büchi automaton")]
    NotBuchi,
    #[error("automaton is not limit-deterministic")]
    NotLimitDeterministic,
    #[error("too many propositions ({0}) to enumerate letters")]
    TooManyAps(usize),
}

/// One labeled transition `src --guard--> dst`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub guard: Guard,
    pub dst: usize,
}

/// A Rabin pair: accepting when `fin` edges are seen finitely often and
/// `inf` edges infinitely often. Both are indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RabinPair {
    pub fin: Vec<bool>,
    pub inf: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Acceptance {
    /// Accepting edges, indexed by edge id.
    Buchi(Vec<bool>),
    Rabin(Vec<RabinPair>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AutomatonClass {
    Nondeterministic,
    LimitDeterministic,
    Deterministic,
}

impl std::fmt::Display for AutomatonClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AutomatonClass::Deterministic => "deterministic",
            AutomatonClass::LimitDeterministic => "limit-deterministic",
            AutomatonClass::Nondeterministic => "nondeterministic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    name: Option<String>,
    ap: Vec<String>,
    state_names: Vec<String>,
    initial: usize,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    acceptance: Acceptance,
}

impl Automaton {
    pub fn new(
        ap: Vec<String>,
        state_names: Vec<String>,
        initial: usize,
        edges: Vec<Edge>,
        acceptance: Acceptance,
    ) -> Result<Self, AutomatonError> {
        let n = state_names.len();
        let invalid = |m: String| Err(AutomatonError::Invalid(m));
        if n == 0 {
            return invalid("no states".into());
        }
        if initial >= n {
            return invalid(format!("initial state {initial} out of range"));
        }
        if ap.len() > 63 {
            return Err(AutomatonError::TooManyAps(ap.len()));
        }
        let mut out = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            if e.src >= n || e.dst >= n {
                return invalid(format!("edge {id} refers to a missing state"));
            }
            if let Some(i) = e.guard.max_ap() {
                if i >= ap.len() {
                    return invalid(format!("edge {id} uses undeclared proposition {i}"));
                }
            }
            if ap.len() <= MAX_ENUMERATED_AP && e.guard.letters(ap.len()).next().is_none() {
                return invalid(format!("edge {id} has an unsatisfiable guard"));
            }
            out[e.src].push(id);
        }
        match &acceptance {
            Acceptance::Buchi(acc) if acc.len() != edges.len() => {
                return invalid("acceptance marks do not match the edge count".into())
            }
            Acceptance::Rabin(pairs) => {
                if pairs.is_empty() {
                    return invalid("Rabin acceptance needs at least one pair".into());
                }
                if pairs
                    .iter()
                    .any(|p| p.fin.len() != edges.len() || p.inf.len() != edges.len())
                {
                    return invalid("acceptance marks do not match the edge count".into());
                }
            }
            _ => {}
        }
        Ok(Automaton {
            name: None,
            ap,
            state_names,
            initial,
            edges,
            out,
            acceptance,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn ap(&self) -> &[String] {
        &self.ap
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.state_names[q]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// Edge ids leaving `q`.
    pub fn out(&self, q: usize) -> &[usize] {
        &self.out[q]
    }

    pub fn acceptance(&self) -> &Acceptance {
        &self.acceptance
    }

    pub fn is_buchi(&self) -> bool {
        matches!(self.acceptance, Acceptance::Buchi(_))
    }

    /// Büchi accepting marks, if the acceptance is Büchi.
    pub fn buchi_marks(&self) -> Option<&[bool]> {
        match &self.acceptance {
            Acceptance::Buchi(acc) => Some(acc),
            Acceptance::Rabin(_) => None,
        }
    }

    /// Number of Rabin pairs (1 for Büchi).
    pub fn index(&self) -> usize {
        match &self.acceptance {
            Acceptance::Buchi(_) => 1,
            Acceptance::Rabin(p) => p.len(),
        }
    }

    /// Ids of the edges leaving `q` that are enabled on `letter`.
    pub fn enabled(&self, q: usize, letter: Letter) -> impl Iterator<Item = usize> + '_ {
        self.out[q]
            .iter()
            .copied()
            .filter(move |&e| self.edges[e].guard.eval(letter))
    }

    /// Whether edge `e` counts towards acceptance at all (Büchi mark or some
    /// Rabin `inf` set).
    pub fn is_good_edge(&self, e: usize) -> bool {
        match &self.acceptance {
            Acceptance::Buchi(acc) => acc[e],
            Acceptance::Rabin(pairs) => pairs.iter().any(|p| p.inf[e]),
        }
    }

    /// The same automaton as a one-pair Rabin automaton `(∅, F)`.
    pub fn to_rabin(&self) -> Automaton {
        match &self.acceptance {
            Acceptance::Rabin(_) => self.clone(),
            Acceptance::Buchi(acc) => Automaton {
                acceptance: Acceptance::Rabin(vec![RabinPair {
                    fin: vec![false; acc.len()],
                    inf: acc.clone(),
                }]),
                ..self.clone()
            },
        }
    }

    /// States from which some edge counting towards acceptance is reachable.
    pub fn can_accept(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev = vec![Vec::new(); n];
        for e in &self.edges {
            rev[e.dst].push(e.src);
        }
        let starts = (0..self.edges.len())
            .filter(|&e| self.is_good_edge(e))
            .map(|e| self.edges[e].src);
        crate::graph::reachable_from(&rev, starts)
    }

    /// Whether some state has two edges enabled on a common letter.
    fn overlapping_states(&self) -> Result<Vec<bool>, AutomatonError> {
        let k = self.ap.len();
        if k > MAX_ENUMERATED_AP {
            return Err(AutomatonError::TooManyAps(k));
        }
        let mut out = vec![false; self.num_states()];
        for q in 0..self.num_states() {
            if self.out[q].len() < 2 {
                continue;
            }
            out[q] = (0..1u64 << k).any(|l| self.enabled(q, l).nth(1).is_some());
        }
        Ok(out)
    }

    /// States reachable from the source of some accepting edge: the
    /// smallest closed set holding every accepting edge. An automaton is
    /// limit-deterministic iff this set works as the final part `Q_f`.
    pub fn final_part(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.src].push(e.dst);
        }
        let starts = (0..self.edges.len())
            .filter(|&e| self.is_good_edge(e))
            .map(|e| self.edges[e].src);
        crate::graph::reachable_from(&adj, starts)
    }

    /// Strongest applicable class. Limit determinism is only considered for
    /// Büchi acceptance.
    pub fn classify(&self) -> Result<AutomatonClass, AutomatonError> {
        let overlap = self.overlapping_states()?;
        if !overlap.iter().any(|&b| b) {
            return Ok(AutomatonClass::Deterministic);
        }
        let Acceptance::Buchi(acc) = &self.acceptance else {
            return Ok(AutomatonClass::Nondeterministic);
        };
        let fin = self.final_part();
        let accepting_inside = self
            .edges
            .iter()
            .zip(acc)
            .all(|(e, &a)| !a || (fin[e.src] && fin[e.dst]));
        let deterministic_inside = (0..self.num_states()).all(|q| !fin[q] || !overlap[q]);
        if accepting_inside && deterministic_inside {
            Ok(AutomatonClass::LimitDeterministic)
        } else {
            Ok(AutomatonClass::Nondeterministic)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(src: usize, guard: Guard, dst: usize) -> Edge {
        Edge { src, guard, dst }
    }

    #[test]
    fn universal_automaton_is_deterministic() {
        let a = Automaton::new(
            vec!["a".into()],
            vec!["q".into()],
            0,
            vec![edge(0, Guard::True, 0)],
            Acceptance::Buchi(vec![true]),
        )
        .unwrap();
        assert_eq!(a.classify().unwrap(), AutomatonClass::Deterministic);
    }

    #[test]
    fn fg_automaton_is_limit_deterministic() {
        // u: loop on t, guess to v; v: accepting loop on a
        let a = Automaton::new(
            vec!["a".into()],
            vec!["u".into(), "v".into()],
            0,
            vec![edge(0, Guard::True, 0), edge(0, Guard::True, 1), edge(1, Guard::Ap(0), 1)],
            Acceptance::Buchi(vec![false, false, true]),
        )
        .unwrap();
        assert_eq!(a.classify().unwrap(), AutomatonClass::LimitDeterministic);
        assert_eq!(a.final_part(), vec![false, true]);
    }

    #[test]
    fn overlapping_accepting_branches_are_nondeterministic() {
        let a = Automaton::new(
            vec!["a".into()],
            vec!["u".into(), "v".into(), "w".into()],
            0,
            vec![
                edge(0, Guard::True, 1),
                edge(0, Guard::Ap(0), 2),
                edge(1, Guard::True, 0),
                edge(2, Guard::True, 0),
            ],
            Acceptance::Buchi(vec![true, true, false, false]),
        )
        .unwrap();
        assert_eq!(a.classify().unwrap(), AutomatonClass::Nondeterministic);
    }

    #[test]
    fn invalid_automata_are_rejected() {
        let bad_guard = Automaton::new(
            vec!["a".into()],
            vec!["q".into()],
            0,
            vec![edge(0, Guard::and(vec![Guard::Ap(0), Guard::not(Guard::Ap(0))]), 0)],
            Acceptance::Buchi(vec![false]),
        );
        assert!(bad_guard.is_err());
        let bad_ap = Automaton::new(
            vec![],
            vec!["q".into()],
            0,
            vec![edge(0, Guard::Ap(0), 0)],
            Acceptance::Buchi(vec![false]),
        );
        assert!(bad_ap.is_err());
        let no_pairs = Automaton::new(
            vec![],
            vec!["q".into()],
            0,
            vec![edge(0, Guard::True, 0)],
            Acceptance::Rabin(vec![]),
        );
        assert!(no_pairs.is_err());
    }
}
