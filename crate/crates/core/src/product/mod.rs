//! Product of an MDP with a deterministic or limit-deterministic automaton,
//! and the ζ-augmented MDP that turns Büchi acceptance into reachability of
//! a fresh sink `t`.
//!
//! The automaton reads the label of the source state: from `(s, q)` under
//! action `a` the product moves to `(s', q')` where `q --L(s)--> q'`. When
//! the automaton has several successors for `(q, L(s))`, every MDP action
//! `a` is split into one product action per successor, named `a>q'`.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::automata::{Acceptance, Automaton, AutomatonClass, AutomatonError, Letter};
use crate::model::explicit::{write_explicit_annotated, Annotation};
use crate::model::{Choice, Mdp, ModelError};

/// Name of the only action of sink states.
pub const SINK_ACTION: &str = "stay";

#[derive(Debug, Error)]
pub enum ProductError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("automaton proposition `{0}` is not a proposition of the MDP")]
    UnknownAp(String),
    #[error("automaton state {aut_state} has no transition for the label of MDP state {state} (use complete-rejecting to add a sink)")]
    Incomplete { state: String, aut_state: String },
    #[error("automaton must be deterministic or limit-deterministic Büchi")]
    UnsupportedAutomaton,
    #[error("zeta must lie in ]0,1[, got {0}")]
    ZetaOutOfRange(f64),
    #[error("operation needs a Büchi product")]
    NotBuchi,
    #[error("operation needs a Rabin product")]
    NotRabin,
}

#[derive(Debug, Clone, Copy)]
pub struct ProductOptions {
    /// Send letters the automaton cannot read to a rejecting sink instead
    /// of failing.
    pub complete_rejecting: bool,
    /// Collapse all pairs whose automaton state can no longer accept into a
    /// single sink state.
    pub merge_rejecting_sinks: bool,
}

impl Default for ProductOptions {
    fn default() -> Self {
        ProductOptions {
            complete_rejecting: false,
            merge_rejecting_sinks: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProductState {
    Pair { mdp: usize, aut: usize },
    Sink,
}

/// Per-choice marks indexed `[state][choice]`.
pub type ChoiceMarks = Vec<Vec<bool>>;

#[derive(Debug, Clone, PartialEq)]
pub struct ChoicePair {
    pub fin: ChoiceMarks,
    pub inf: ChoiceMarks,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProductAcceptance {
    Buchi(ChoiceMarks),
    Rabin(Vec<ChoicePair>),
}

/// The product MDP. A choice fixes the automaton edge, so acceptance is
/// recorded per `(state, choice)`; every successor of an accepting choice
/// forms an accepting triple.
#[derive(Debug, Clone)]
pub struct Product {
    mdp: Mdp,
    states: Vec<ProductState>,
    aut_edge: Vec<Vec<Option<usize>>>,
    base_choice: Vec<Vec<Option<usize>>>,
    acceptance: ProductAcceptance,
    sink: Option<usize>,
    deterministic: bool,
}

/// `"(1,0)"` becomes `"1,0"`; other names are returned unchanged.
fn strip_parens(name: &str) -> &str {
    name.strip_prefix('(')
        .and_then(|n| n.strip_suffix(')'))
        .unwrap_or(name)
}

fn letter_of(m: &Mdp, s: usize, ap_map: &[usize]) -> Letter {
    let label = m.label(s);
    ap_map
        .iter()
        .enumerate()
        .filter(|(_, j)| label.binary_search(j).is_ok())
        .fold(0, |acc, (i, _)| acc | 1 << i)
}

/// Builds the reachable product of `m` and `a`.
pub fn build_product(m: &Mdp, a: &Automaton, opts: ProductOptions) -> Result<Product, ProductError> {
    let class = a.classify()?;
    match (a.acceptance(), class) {
        (_, AutomatonClass::Deterministic) => {}
        (Acceptance::Buchi(_), AutomatonClass::LimitDeterministic) => {}
        _ => return Err(ProductError::UnsupportedAutomaton),
    }
    let ap_map: Vec<usize> = a
        .ap()
        .iter()
        .map(|p| m.ap_index(p).ok_or_else(|| ProductError::UnknownAp(p.clone())))
        .collect::<Result<_, _>>()?;
    let dead: Vec<bool> = if opts.merge_rejecting_sinks {
        a.can_accept().into_iter().map(|b| !b).collect()
    } else {
        vec![false; a.num_states()]
    };

    let mut actions: Vec<String> = Vec::new();
    let mut action_ids: HashMap<String, usize> = HashMap::new();
    let mut intern_action = |name: String, actions: &mut Vec<String>| -> usize {
        *action_ids.entry(name.clone()).or_insert_with(|| {
            actions.push(name);
            actions.len() - 1
        })
    };

    let mut states: Vec<ProductState> = Vec::new();
    let mut index: HashMap<ProductState, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |ps: ProductState, states: &mut Vec<ProductState>, queue: &mut VecDeque<usize>| -> usize {
        let ps = match ps {
            ProductState::Pair { aut, .. } if dead[aut] => ProductState::Sink,
            other => other,
        };
        *index.entry(ps).or_insert_with(|| {
            states.push(ps);
            queue.push_back(states.len() - 1);
            states.len() - 1
        })
    };
    intern(
        ProductState::Pair {
            mdp: m.initial(),
            aut: a.initial(),
        },
        &mut states,
        &mut queue,
    );

    struct Row {
        choices: Vec<Choice>,
        edge: Vec<Option<usize>>,
        base: Vec<Option<usize>>,
    }
    let mut rows: Vec<Row> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let mut row = Row {
            choices: Vec::new(),
            edge: Vec::new(),
            base: Vec::new(),
        };
        let current = states[i];
        match current {
            ProductState::Sink => {
                let act = intern_action(SINK_ACTION.to_string(), &mut actions);
                row.choices.push(Choice::new(act, vec![(i, 1.0)]));
                row.edge.push(None);
                row.base.push(None);
            }
            ProductState::Pair { mdp: s, aut: q } => {
                let letter = letter_of(m, s, &ap_map);
                let enabled: Vec<usize> = a.enabled(q, letter).collect();
                if enabled.is_empty() && !opts.complete_rejecting {
                    return Err(ProductError::Incomplete {
                        state: m.state_name(s).to_string(),
                        aut_state: a.state_name(q).to_string(),
                    });
                }
                for (c, choice) in m.choices(s).iter().enumerate() {
                    let base_name = m.action_name(choice.action);
                    if enabled.is_empty() {
                        let dist = vec![(intern(ProductState::Sink, &mut states, &mut queue), 1.0)];
                        row.choices.push(Choice::new(intern_action(base_name.to_string(), &mut actions), dist));
                        row.edge.push(None);
                        row.base.push(Some(c));
                        continue;
                    }
                    for &e in &enabled {
                        let dst = a.edge(e).dst;
                        let name = if enabled.len() == 1 {
                            base_name.to_string()
                        } else {
                            let plain = format!("{base_name}>{}", a.state_name(dst));
                            let clash = enabled
                                .iter()
                                .any(|&f| f != e && a.state_name(a.edge(f).dst) == a.state_name(dst));
                            if clash {
                                format!("{plain}#{e}")
                            } else {
                                plain
                            }
                        };
                        let mut dist: Vec<(usize, f64)> = Vec::with_capacity(choice.dist.len());
                        for &(t, p) in &choice.dist {
                            let j = intern(ProductState::Pair { mdp: t, aut: dst }, &mut states, &mut queue);
                            match dist.iter_mut().find(|(k, _)| *k == j) {
                                Some(entry) => entry.1 += p,
                                None => dist.push((j, p)),
                            }
                        }
                        row.choices.push(Choice::new(intern_action(name, &mut actions), dist));
                        row.edge.push(Some(e));
                        row.base.push(Some(c));
                    }
                }
            }
        }
        rows.push(row);
    }

    let mark = |rows: &[Row], f: &dyn Fn(usize) -> bool| -> ChoiceMarks {
        rows.iter()
            .map(|r| r.edge.iter().map(|e| e.is_some_and(f)).collect())
            .collect()
    };
    let acceptance = match a.acceptance() {
        Acceptance::Buchi(acc) => ProductAcceptance::Buchi(mark(&rows, &|e| acc[e])),
        Acceptance::Rabin(pairs) => ProductAcceptance::Rabin(
            pairs
                .iter()
                .map(|p| ChoicePair {
                    fin: mark(&rows, &|e| p.fin[e]),
                    inf: mark(&rows, &|e| p.inf[e]),
                })
                .collect(),
        ),
    };

    let names = states
        .iter()
        .map(|ps| match *ps {
            ProductState::Pair { mdp, aut } => {
                format!("({},{})", strip_parens(m.state_name(mdp)), a.state_name(aut))
            }
            ProductState::Sink => "sink".to_string(),
        })
        .collect();
    let labels = states
        .iter()
        .map(|ps| match *ps {
            ProductState::Pair { mdp, .. } => m.label(mdp).to_vec(),
            ProductState::Sink => Vec::new(),
        })
        .collect();
    let sink = states.iter().position(|ps| *ps == ProductState::Sink);
    let mut aut_edge = Vec::with_capacity(rows.len());
    let mut base_choice = Vec::with_capacity(rows.len());
    let mut choices = Vec::with_capacity(rows.len());
    for r in rows {
        aut_edge.push(r.edge);
        base_choice.push(r.base);
        choices.push(r.choices);
    }
    let mdp = Mdp::new(names, actions, choices, m.ap().to_vec(), labels, 0)?;
    Ok(Product {
        mdp,
        states,
        aut_edge,
        base_choice,
        acceptance,
        sink,
        deterministic: class == AutomatonClass::Deterministic,
    })
}

impl Product {
    pub fn mdp(&self) -> &Mdp {
        &self.mdp
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> ProductState {
        self.states[i]
    }

    pub fn states(&self) -> &[ProductState] {
        &self.states
    }

    /// Index of the merged rejecting sink, if one was created.
    pub fn sink(&self) -> Option<usize> {
        self.sink
    }

    /// Whether the automaton was deterministic (no split actions).
    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn acceptance(&self) -> &ProductAcceptance {
        &self.acceptance
    }

    pub fn is_buchi(&self) -> bool {
        matches!(self.acceptance, ProductAcceptance::Buchi(_))
    }

    /// Büchi marks `[state][choice]`.
    pub fn buchi(&self) -> Option<&ChoiceMarks> {
        match &self.acceptance {
            ProductAcceptance::Buchi(m) => Some(m),
            ProductAcceptance::Rabin(_) => None,
        }
    }

    /// Rabin pairs over choices.
    pub fn rabin(&self) -> Option<&[ChoicePair]> {
        match &self.acceptance {
            ProductAcceptance::Rabin(p) => Some(p),
            ProductAcceptance::Buchi(_) => None,
        }
    }

    /// Whether `(s, c)` is an accepting Büchi choice.
    pub fn is_accepting(&self, s: usize, c: usize) -> bool {
        self.buchi().is_some_and(|m| m[s][c])
    }

    /// Automaton edge taken by choice `c` of state `s`.
    pub fn automaton_edge(&self, s: usize, c: usize) -> Option<usize> {
        self.aut_edge[s][c]
    }

    /// Index of the MDP choice underlying product choice `c` of state `s`.
    pub fn base_choice(&self, s: usize, c: usize) -> Option<usize> {
        self.base_choice[s][c]
    }

    /// All accepting `(state, choice, successor)` triples of a Büchi product.
    pub fn accepting_triples(&self) -> Vec<(usize, usize, usize)> {
        let Some(marks) = self.buchi() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for s in 0..self.num_states() {
            for (c, choice) in self.mdp.choices(s).iter().enumerate() {
                if marks[s][c] {
                    out.extend(choice.dist.iter().map(|&(t, _)| (s, c, t)));
                }
            }
        }
        out
    }

    /// Explicit-format dump with `accepting`, `rabin` and `sink` annotations.
    pub fn to_explicit(&self) -> String {
        let mut ann = Vec::new();
        for s in 0..self.num_states() {
            for c in 0..self.mdp.choices(s).len() {
                let action = self.mdp.choice_name(s, c).to_string();
                match &self.acceptance {
                    ProductAcceptance::Buchi(m) if m[s][c] => ann.push(Annotation::Accepting {
                        state: s,
                        action,
                    }),
                    ProductAcceptance::Buchi(_) => {}
                    ProductAcceptance::Rabin(pairs) => {
                        for (i, p) in pairs.iter().enumerate() {
                            for (set, inf) in [(&p.fin, false), (&p.inf, true)] {
                                if set[s][c] {
                                    ann.push(Annotation::Rabin {
                                        state: s,
                                        action: action.clone(),
                                        pair: i,
                                        inf,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        if let Some(t) = self.sink {
            ann.push(Annotation::Sink { state: t });
        }
        write_explicit_annotated(&self.mdp, &ann)
    }
}

/// The ζ-augmented MDP: the product plus a sink `t` (the last state) that
/// every accepting choice reaches with probability `1 − ζ`, all its other
/// destinations being scaled by `ζ`.
#[derive(Debug, Clone)]
pub struct AugmentedMdp {
    mdp: Mdp,
    t: usize,
    zeta: f64,
    accepting: ChoiceMarks,
}

/// Name of the added sink state.
pub const T_NAME: &str = "t";

pub fn augment(p: &Product, zeta: f64) -> Result<AugmentedMdp, ProductError> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(ProductError::ZetaOutOfRange(zeta));
    }
    let marks = p.buchi().ok_or(ProductError::NotBuchi)?;
    let m = p.mdp();
    let n = m.num_states();
    let mut actions = m.actions().to_vec();
    let stay = match actions.iter().position(|a| a == SINK_ACTION) {
        Some(i) => i,
        None => {
            actions.push(SINK_ACTION.to_string());
            actions.len() - 1
        }
    };
    let mut choices: Vec<Vec<Choice>> = (0..n)
        .map(|s| {
            m.choices(s)
                .iter()
                .enumerate()
                .map(|(c, ch)| {
                    if marks[s][c] {
                        let mut dist: Vec<(usize, f64)> = ch.dist.iter().map(|&(d, q)| (d, q * zeta)).collect();
                        dist.push((n, 1.0 - zeta));
                        Choice::new(ch.action, dist)
                    } else {
                        ch.clone()
                    }
                })
                .collect()
        })
        .collect();
    choices.push(vec![Choice::new(stay, vec![(n, 1.0)])]);
    let mut names = m.state_names().to_vec();
    names.push(T_NAME.to_string());
    let mut labels: Vec<Vec<usize>> = (0..n).map(|s| m.label(s).to_vec()).collect();
    labels.push(Vec::new());
    let mdp = Mdp::new(names, actions, choices, m.ap().to_vec(), labels, m.initial())?;
    let mut accepting = marks.clone();
    accepting.push(vec![false]);
    Ok(AugmentedMdp {
        mdp,
        t: n,
        zeta,
        accepting,
    })
}

impl AugmentedMdp {
    pub fn mdp(&self) -> &Mdp {
        &self.mdp
    }

    /// Index of the sink `t`.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Whether choice `c` of state `s` was accepting in the product.
    pub fn is_accepting(&self, s: usize, c: usize) -> bool {
        self.accepting[s][c]
    }

    /// Undoes the augmentation: removes `t` and divides the other
    /// destinations of accepting choices by ζ.
    pub fn deaugment(&self) -> Vec<Vec<Choice>> {
        (0..self.t)
            .map(|s| {
                self.mdp
                    .choices(s)
                    .iter()
                    .enumerate()
                    .map(|(c, ch)| {
                        if self.accepting[s][c] {
                            let dist = ch
                                .dist
                                .iter()
                                .filter(|&&(d, _)| d != self.t)
                                .map(|&(d, q)| (d, q / self.zeta))
                                .collect();
                            Choice::new(ch.action, dist)
                        } else {
                            ch.clone()
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{Edge, Guard};

    fn chain() -> Mdp {
        // 0 -a-> 1 (1/2) | 0 (1/2); 1 -b-> 1; label g on 1
        Mdp::new(
            vec!["s0".into(), "s1".into()],
            vec!["a".into(), "b".into()],
            vec![
                vec![Choice::new(0, vec![(1, 0.5), (0, 0.5)])],
                vec![Choice::new(1, vec![(1, 1.0)])],
            ],
            vec!["g".into()],
            vec![vec![], vec![0]],
            0,
        )
        .unwrap()
    }

    fn universal() -> Automaton {
        Automaton::new(
            vec![],
            vec!["q".into()],
            0,
            vec![Edge {
                src: 0,
                guard: Guard::True,
                dst: 0,
            }],
            Acceptance::Buchi(vec![true]),
        )
        .unwrap()
    }

    #[test]
    fn universal_product_is_isomorphic() {
        let m = chain();
        let p = build_product(&m, &universal(), ProductOptions::default()).unwrap();
        assert_eq!(p.num_states(), 2);
        assert_eq!(p.mdp().num_choices(), m.num_choices());
        assert_eq!(p.accepting_triples().len(), 3);
        assert!(p.is_deterministic());
    }

    #[test]
    fn augmentation_scales_accepting_choices() {
        let p = build_product(&chain(), &universal(), ProductOptions::default()).unwrap();
        let aug = augment(&p, 0.5).unwrap();
        assert_eq!(aug.mdp().num_states(), 3);
        let c = &aug.mdp().choices(1)[0];
        assert_eq!(c.dist, vec![(1, 0.5), (2, 0.5)]);
        assert_eq!(aug.mdp().choices(2)[0].dist, vec![(2, 1.0)]);
        for (s, row) in aug.deaugment().iter().enumerate() {
            assert_eq!(row, p.mdp().choices(s));
        }
        assert!(matches!(augment(&p, 1.0), Err(ProductError::ZetaOutOfRange(_))));
        assert!(matches!(augment(&p, 0.0), Err(ProductError::ZetaOutOfRange(_))));
    }

    #[test]
    fn incomplete_automaton_is_reported_or_completed() {
        // only reads !g
        let a = Automaton::new(
            vec!["g".into()],
            vec!["q".into()],
            0,
            vec![Edge {
                src: 0,
                guard: Guard::not(Guard::Ap(0)),
                dst: 0,
            }],
            Acceptance::Buchi(vec![true]),
        )
        .unwrap();
        let err = build_product(&chain(), &a, ProductOptions::default()).unwrap_err();
        assert!(matches!(err, ProductError::Incomplete { .. }));
        let p = build_product(
            &chain(),
            &a,
            ProductOptions {
                complete_rejecting: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(p.num_states(), 3);
        assert!(p.sink().is_some());
    }

    #[test]
    fn unknown_proposition() {
        let a = Automaton::new(
            vec!["zzz".into()],
            vec!["q".into()],
            0,
            vec![Edge {
                src: 0,
                guard: Guard::True,
                dst: 0,
            }],
            Acceptance::Buchi(vec![true]),
        )
        .unwrap();
        assert!(matches!(
            build_product(&chain(), &a, ProductOptions::default()),
            Err(ProductError::UnknownAp(_))
        ));
    }

    #[test]
    fn guesses_become_actions() {
        // u: t-loop and t-guess to v; v: accepting loop on g
        let a = Automaton::new(
            vec!["g".into()],
            vec!["u".into(), "v".into()],
            0,
            vec![
                Edge { src: 0, guard: Guard::True, dst: 0 },
                Edge { src: 0, guard: Guard::True, dst: 1 },
                Edge { src: 1, guard: Guard::Ap(0), dst: 1 },
            ],
            Acceptance::Buchi(vec![false, false, true]),
        )
        .unwrap();
        let opts = ProductOptions {
            complete_rejecting: true,
            ..Default::default()
        };
        let p = build_product(&chain(), &a, opts).unwrap();
        let names: Vec<&str> = (0..p.mdp().choices(0).len()).map(|c| p.mdp().choice_name(0, c)).collect();
        assert_eq!(names, vec!["a>u", "a>v"]);
        assert!(!p.is_deterministic());
        let text = p.to_explicit();
        assert!(text.contains("accepting"));
    }
}
