//! Limit-deterministic Büchi automata and the subset/breakpoint
//! construction from arbitrary nondeterministic Büchi automata.
//!
//! The initial part is the subset construction without accepting edges.
//! From a subset `S` on letter `σ`, a guess edge jumps into the final part
//! state `(R', ∅)` for every nonempty `R' ⊆ δ(S,σ)`. A final part state
//! `(R, B)` moves to `R' = δ(R,σ)` with `B'' = δ(B,σ) ∪ δ_F(R,σ)`; the edge is
//! accepting and resets the breakpoint to `(R', ∅)` when `B'' = R'`, and
//! goes to `(R', B'')` otherwise.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::{Acceptance, Automaton, AutomatonClass, AutomatonError, Edge, Guard, Letter, MAX_ENUMERATED_AP};

/// A limit-deterministic Büchi automaton with its initial/final partition.
#[derive(Debug, Clone)]
pub struct Ldbw {
    automaton: Automaton,
    in_final: Vec<bool>,
    guess: Vec<bool>,
}

impl Ldbw {
    /// Wraps a Büchi automaton that is limit-deterministic (or
    /// deterministic). `Q_f` is the set of states reachable from accepting
    /// edge sources; guess edges are the edges entering `Q_f` from outside.
    pub fn from_automaton(automaton: Automaton) -> Result<Self, AutomatonError> {
        if !automaton.is_buchi() {
            return Err(AutomatonError::NotBuchi);
        }
        if automaton.classify()? == AutomatonClass::Nondeterministic {
            return Err(AutomatonError::NotLimitDeterministic);
        }
        let in_final = automaton.final_part();
        let guess = automaton
            .edges()
            .iter()
            .map(|e| !in_final[e.src] && in_final[e.dst])
            .collect();
        Ok(Ldbw {
            automaton,
            in_final,
            guess,
        })
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn into_automaton(self) -> Automaton {
        self.automaton
    }

    /// Whether `q` lies in the final (deterministic) part.
    pub fn in_final(&self, q: usize) -> bool {
        self.in_final[q]
    }

    /// Whether edge `e` jumps from the initial into the final part.
    pub fn is_guess(&self, e: usize) -> bool {
        self.guess[e]
    }

    /// Checks the partition conditions: disjoint parts, accepting edges
    /// inside `Q_f`, determinism of `Q_f`, and closure of `Q_f`.
    pub fn check(&self) -> Result<(), String> {
        let a = &self.automaton;
        let acc = a.buchi_marks().ok_or("not Büchi")?;
        for (id, e) in a.edges().iter().enumerate() {
            if acc[id] && !(self.in_final[e.src] && self.in_final[e.dst]) {
                return Err(format!("accepting edge {id} leaves the final part"));
            }
            if self.in_final[e.src] && !self.in_final[e.dst] {
                return Err(format!("edge {id} leaves the final part"));
            }
        }
        let k = a.ap().len();
        if k > MAX_ENUMERATED_AP {
            return Err("too many propositions".into());
        }
        for q in (0..a.num_states()).filter(|&q| self.in_final[q]) {
            for l in 0..1u64 << k {
                if a.enabled(q, l).nth(1).is_some() {
                    return Err(format!("final state {q} is nondeterministic"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Macro {
    Subset(u64),
    Breakpoint(u64, u64),
}

fn show_set(names: &[String], s: u64) -> String {
    let v: Vec<&str> = (0..names.len())
        .filter(|&i| s >> i & 1 == 1)
        .map(|i| names[i].as_str())
        .collect();
    format!("{{{}}}", v.join(","))
}

/// Subsets of `s`, excluding the empty set.
fn nonempty_subsets(s: u64) -> impl Iterator<Item = u64> {
    let mut sub = s;
    let mut done = s == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let cur = sub;
        sub = (sub.wrapping_sub(1)) & s;
        if cur == 0 || sub == 0 {
            done = true;
        }
        (cur != 0).then_some(cur)
    })
}

/// Builds an LDBW accepting the same language as the Büchi automaton `a`.
/// Only reachable macro-states are generated; state names show the subsets.
pub fn nbw_to_ldbw(a: &Automaton) -> Result<Ldbw, AutomatonError> {
    let acc = a.buchi_marks().ok_or(AutomatonError::NotBuchi)?;
    let k = a.ap().len();
    if k > MAX_ENUMERATED_AP {
        return Err(AutomatonError::TooManyAps(k));
    }
    if a.num_states() > 64 {
        return Err(AutomatonError::Invalid("subset construction limited to 64 states".into()));
    }
    let n = a.num_states();
    // successor masks per (state, letter): all edges and accepting edges
    let letters: Vec<Letter> = (0..1u64 << k).collect();
    let mut succ = vec![vec![(0u64, 0u64); letters.len()]; n];
    for (id, e) in a.edges().iter().enumerate() {
        for &l in &letters {
            if e.guard.eval(l) {
                let entry = &mut succ[e.src][l as usize];
                entry.0 |= 1 << e.dst;
                if acc[id] {
                    entry.1 |= 1 << e.dst;
                }
            }
        }
    }
    let post = |s: u64, l: Letter| -> (u64, u64) {
        let mut all = 0;
        let mut good = 0;
        for q in 0..n {
            if s >> q & 1 == 1 {
                all |= succ[q][l as usize].0;
                good |= succ[q][l as usize].1;
            }
        }
        (all, good)
    };

    let mut index: HashMap<Macro, usize> = HashMap::new();
    let mut macros: Vec<Macro> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |m: Macro, macros: &mut Vec<Macro>, queue: &mut VecDeque<usize>| -> usize {
        *index.entry(m).or_insert_with(|| {
            macros.push(m);
            queue.push_back(macros.len() - 1);
            macros.len() - 1
        })
    };
    let init = intern(Macro::Subset(1 << a.initial()), &mut macros, &mut queue);

    // (source, target, accepting) -> letters
    let mut grouped: BTreeMap<(usize, usize, bool), Vec<Letter>> = BTreeMap::new();
    while let Some(i) = queue.pop_front() {
        let m = macros[i];
        match m {
            Macro::Subset(s) => {
                for &l in &letters {
                    let (t, _) = post(s, l);
                    if t == 0 {
                        continue;
                    }
                    let j = intern(Macro::Subset(t), &mut macros, &mut queue);
                    grouped.entry((i, j, false)).or_default().push(l);
                    for r in nonempty_subsets(t) {
                        let j = intern(Macro::Breakpoint(r, 0), &mut macros, &mut queue);
                        grouped.entry((i, j, false)).or_default().push(l);
                    }
                }
            }
            Macro::Breakpoint(r, b) => {
                for &l in &letters {
                    let (r2, good) = post(r, l);
                    if r2 == 0 {
                        continue;
                    }
                    let b2 = post(b, l).0 | good;
                    let (m, accepting) = if b2 == r2 {
                        (Macro::Breakpoint(r2, 0), true)
                    } else {
                        (Macro::Breakpoint(r2, b2), false)
                    };
                    let j = intern(m, &mut macros, &mut queue);
                    grouped.entry((i, j, accepting)).or_default().push(l);
                }
            }
        }
    }

    let names = a.state_names();
    let state_names = macros
        .iter()
        .map(|m| match *m {
            Macro::Subset(s) => show_set(names, s),
            Macro::Breakpoint(r, b) => format!("({},{})", show_set(names, r), show_set(names, b)),
        })
        .collect();
    let mut edges = Vec::new();
    let mut marks = Vec::new();
    let mut guess = Vec::new();
    for ((src, dst, accepting), ls) in grouped {
        edges.push(Edge {
            src,
            guard: Guard::from_letters(&ls, k),
            dst,
        });
        marks.push(accepting);
        guess.push(matches!(macros[src], Macro::Subset(_)) && matches!(macros[dst], Macro::Breakpoint(..)));
    }
    let in_final = macros.iter().map(|m| matches!(m, Macro::Breakpoint(..))).collect();
    let mut automaton = Automaton::new(a.ap().to_vec(), state_names, init, edges, Acceptance::Buchi(marks))?;
    if let Some(nm) = a.name() {
        automaton = automaton.with_name(format!("{nm} (limit-deterministic)"));
    }
    Ok(Ldbw {
        automaton,
        in_final,
        guess,
    })
}
