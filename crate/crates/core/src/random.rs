//! Random models and automata for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::automata::{Acceptance, Automaton, Edge, Guard};
use crate::model::{Choice, Mdp};

/// Random MDP with `n` states, 1 to `max_actions` choices per state, and
/// every state labeled with a random subset of `num_ap` propositions
/// `p0, p1, ...`. Choices have 1 to 3 successors with weights drawn from
/// `1..=4`. The initial state is 0.
pub fn random_mdp(rng: &mut impl Rng, n: usize, max_actions: usize, num_ap: usize) -> Mdp {
    let actions: Vec<String> = (0..max_actions).map(|a| format!("a{a}")).collect();
    let states: Vec<usize> = (0..n).collect();
    let choices = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=max_actions);
            let mut acts: Vec<usize> = (0..max_actions).collect();
            acts.shuffle(rng);
            acts.truncate(k);
            acts.sort_unstable();
            acts.into_iter()
                .map(|a| {
                    let m = rng.gen_range(1..=3.min(n));
                    let succ: Vec<usize> = states.choose_multiple(rng, m).copied().collect();
                    let w: Vec<u32> = succ.iter().map(|_| rng.gen_range(1..=4)).collect();
                    let total: u32 = w.iter().sum();
                    let dist = succ.into_iter().zip(w).map(|(t, w)| (t, w as f64 / total as f64)).collect();
                    Choice::new(a, dist)
                })
                .collect()
        })
        .collect();
    let labels = (0..n)
        .map(|_| (0..num_ap).filter(|_| rng.gen_bool(0.5)).collect())
        .collect();
    Mdp::new(
        (0..n).map(|s| s.to_string()).collect(),
        actions,
        choices,
        (0..num_ap).map(|i| format!("p{i}")).collect(),
        labels,
        0,
    )
    .expect("random MDP is well formed")
}

fn minterm_edges(
    rng: &mut impl Rng,
    states: usize,
    num_ap: usize,
    mut succ: impl FnMut(&mut dyn rand::RngCore) -> Vec<usize>,
    accept_prob: f64,
) -> Automaton {
    let mut edges = Vec::new();
    let mut acc = Vec::new();
    for q in 0..states {
        for letter in 0..1u64 << num_ap {
            for d in succ(rng) {
                edges.push(Edge {
                    src: q,
                    guard: Guard::minterm(letter, num_ap),
                    dst: d,
                });
                acc.push(rng.gen_bool(accept_prob));
            }
        }
    }
    Automaton::new(
        (0..num_ap).map(|i| format!("p{i}")).collect(),
        (0..states).map(|q| format!("q{q}")).collect(),
        0,
        edges,
        Acceptance::Buchi(acc),
    )
    .expect("random automaton is well formed")
}

/// Random complete deterministic Büchi automaton over `p0, p1, ...`.
pub fn random_dbw(rng: &mut impl Rng, states: usize, num_ap: usize) -> Automaton {
    minterm_edges(rng, states, num_ap, |r| vec![r.gen_range(0..states)], 0.3)
}

/// Random nondeterministic Büchi automaton: every state and letter has
/// zero to two successors.
pub fn random_nbw(rng: &mut impl Rng, states: usize, num_ap: usize) -> Automaton {
    let all: Vec<usize> = (0..states).collect();
    minterm_edges(
        rng,
        states,
        num_ap,
        |r| {
            let k = r.gen_range(0..=2.min(states));
            let mut v: Vec<usize> = all.choose_multiple(r, k).copied().collect();
            v.sort_unstable();
            v
        },
        0.3,
    )
}
