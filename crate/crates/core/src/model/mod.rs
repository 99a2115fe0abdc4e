//! Finite labeled Markov decision processes and their text formats.
//!
//! An [`Mdp`] stores, for every state, the list of enabled choices. A choice
//! pairs a global action name with a discrete distribution over successor
//! states. Two input formats are supported: a restricted PRISM subset
//! ([`prism`]) and a line-oriented explicit listing ([`explicit`]).

pub mod explicit;
pub mod prism;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use thiserror::Error;

/// Absolute tolerance used when checking that a distribution sums to one.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Line/column position inside a source text (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { pos: Pos, name: String },
    #[error("update of `{var}` to {value} is outside [{lo}..{hi}] in state {state}")]
    OutOfBounds {
        var: String,
        value: i64,
        lo: i64,
        hi: i64,
        state: String,
    },
    #[error("evaluation error at {pos}: {msg}")]
    Eval { pos: Pos, msg: String },
    #[error("invalid model: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

/// Input syntax accepted by [`parse_model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFormat {
    PrismSubset,
    Explicit,
}

impl std::str::FromStr for ModelFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prism" | "prism-subset" => Ok(ModelFormat::PrismSubset),
            "explicit" => Ok(ModelFormat::Explicit),
            other => Err(format!("unknown model format `{other}`")),
        }
    }
}

/// One enabled choice: a global action and its successor distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Choice {
    pub action: usize,
    pub dist: Vec<(usize, f64)>,
}

impl Choice {
    pub fn new(action: usize, dist: Vec<(usize, f64)>) -> Self {
        Choice { action, dist }
    }

    pub fn mass(&self) -> f64 {
        self.dist.iter().map(|&(_, p)| p).sum()
    }
}

/// A finite labeled MDP `(S, A, T, AP, L)` with a designated initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Mdp {
    state_names: Vec<String>,
    actions: Vec<String>,
    choices: Vec<Vec<Choice>>,
    ap: Vec<String>,
    labels: Vec<Vec<usize>>,
    initial: usize,
}

/// A violated [`Mdp`] invariant, with coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    BadInitial { initial: usize, states: usize },
    Deadlock { state: usize },
    Mass { state: usize, action: String, total: f64 },
    Probability { state: usize, action: String, target: usize, prob: f64 },
    Target { state: usize, action: String, target: usize },
    DuplicateAction { state: usize, action: String },
    UnknownAction { state: usize, action: usize },
    Label { state: usize, ap: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::BadInitial { initial, states } => {
                write!(f, "initial state {initial} out of range (0..{states})")
            }
            Diagnostic::Deadlock { state } => write!(f, "deadlock: state {state} has no enabled action"),
            Diagnostic::Mass { state, action, total } => {
                write!(f, "mass != 1: state {state} action {action} sums to {total}")
            }
            Diagnostic::Probability { state, action, target, prob } => write!(
                f,
                "probability {prob} of state {state} action {action} to {target} not in ]0,1]"
            ),
            Diagnostic::Target { state, action, target } => {
                write!(f, "state {state} action {action} targets unknown state {target}")
            }
            Diagnostic::DuplicateAction { state, action } => {
                write!(f, "state {state} enables action {action} twice")
            }
            Diagnostic::UnknownAction { state, action } => {
                write!(f, "state {state} uses unknown action index {action}")
            }
            Diagnostic::Label { state, ap } => {
                write!(f, "state {state} carries unknown proposition index {ap}")
            }
        }
    }
}

impl Mdp {
    /// Builds an MDP and rejects it unless [`Mdp::validate`] is clean.
    pub fn new(
        state_names: Vec<String>,
        actions: Vec<String>,
        choices: Vec<Vec<Choice>>,
        ap: Vec<String>,
        labels: Vec<Vec<usize>>,
        initial: usize,
    ) -> Result<Self, ModelError> {
        let m = Self::from_parts_unchecked(state_names, actions, choices, ap, labels, initial);
        let diags = m.validate();
        if diags.is_empty() {
            Ok(m)
        } else {
            Err(ModelError::Invalid(diags))
        }
    }

    /// Builds an MDP without checking invariants. Labels are sorted and
    /// deduplicated; everything else is stored as given.
    pub fn from_parts_unchecked(
        state_names: Vec<String>,
        actions: Vec<String>,
        choices: Vec<Vec<Choice>>,
        ap: Vec<String>,
        mut labels: Vec<Vec<usize>>,
        initial: usize,
    ) -> Self {
        assert_eq!(state_names.len(), choices.len(), "one choice list per state");
        assert_eq!(state_names.len(), labels.len(), "one label set per state");
        for l in &mut labels {
            l.sort_unstable();
            l.dedup();
        }
        Mdp {
            state_names,
            actions,
            choices,
            ap,
            labels,
            initial,
        }
    }

    pub fn num_states(&self) -> usize {
        self.choices.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.state_names[s]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn action_name(&self, a: usize) -> &str {
        &self.actions[a]
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == name)
    }

    /// Enabled choices of state `s`.
    pub fn choices(&self, s: usize) -> &[Choice] {
        &self.choices[s]
    }

    /// Name of the `c`-th enabled choice of state `s`.
    pub fn choice_name(&self, s: usize, c: usize) -> &str {
        &self.actions[self.choices[s][c].action]
    }

    /// Local index of the choice of `s` using action `name`.
    pub fn choice_index(&self, s: usize, name: &str) -> Option<usize> {
        self.choices[s]
            .iter()
            .position(|c| self.actions[c.action] == name)
    }

    pub fn ap(&self) -> &[String] {
        &self.ap
    }

    pub fn ap_index(&self, name: &str) -> Option<usize> {
        self.ap.iter().position(|a| a == name)
    }

    /// Sorted proposition indices holding in `s`.
    pub fn label(&self, s: usize) -> &[usize] {
        &self.labels[s]
    }

    pub fn label_names(&self, s: usize) -> Vec<&str> {
        self.labels[s].iter().map(|&i| self.ap[i].as_str()).collect()
    }

    pub fn num_choices(&self) -> usize {
        self.choices.iter().map(Vec::len).sum()
    }

    pub fn num_transitions(&self) -> usize {
        self.choices
            .iter()
            .flat_map(|cs| cs.iter().map(|c| c.dist.len()))
            .sum()
    }

    /// States reachable from the initial state (ignoring invalid targets).
    pub fn reachable(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut seen = vec![false; n];
        if self.initial >= n {
            return seen;
        }
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(s) = queue.pop_front() {
            for c in &self.choices[s] {
                for &(t, _) in &c.dist {
                    if t < n && !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        seen
    }

    /// Checks every invariant and reports each violation.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let n = self.num_states();
        let mut out = Vec::new();
        if self.initial >= n {
            out.push(Diagnostic::BadInitial {
                initial: self.initial,
                states: n,
            });
        }
        let reachable = self.reachable();
        for s in 0..n {
            if self.choices[s].is_empty() && reachable[s] {
                out.push(Diagnostic::Deadlock { state: s });
            }
            let mut seen_actions = BTreeMap::new();
            for c in &self.choices[s] {
                if c.action >= self.actions.len() {
                    out.push(Diagnostic::UnknownAction {
                        state: s,
                        action: c.action,
                    });
                    continue;
                }
                let name = self.actions[c.action].clone();
                if seen_actions.insert(c.action, ()).is_some() {
                    out.push(Diagnostic::DuplicateAction {
                        state: s,
                        action: name.clone(),
                    });
                }
                for &(t, p) in &c.dist {
                    if t >= n {
                        out.push(Diagnostic::Target {
                            state: s,
                            action: name.clone(),
                            target: t,
                        });
                    }
                    if !(p > 0.0 && p <= 1.0) {
                        out.push(Diagnostic::Probability {
                            state: s,
                            action: name.clone(),
                            target: t,
                            prob: p,
                        });
                    }
                }
                let total = c.mass();
                if (total - 1.0).abs() > MASS_TOLERANCE {
                    out.push(Diagnostic::Mass {
                        state: s,
                        action: name,
                        total,
                    });
                }
            }
            for &l in &self.labels[s] {
                if l >= self.ap.len() {
                    out.push(Diagnostic::Label { state: s, ap: l });
                }
            }
        }
        out
    }
}

/// Parses a model in the given format. `overrides` assigns values to
/// constants of PRISM-subset models (ignored for explicit models).
pub fn parse_model(
    text: &str,
    format: ModelFormat,
    overrides: &BTreeMap<String, f64>,
) -> Result<Mdp, ModelError> {
    match format {
        ModelFormat::PrismSubset => prism::parse_prism(text, overrides),
        ModelFormat::Explicit => explicit::parse_explicit(text).map(|doc| doc.mdp),
    }
}
