//! Ultimately periodic words `prefix · cycle^ω`: automaton membership and
//! exhaustive enumeration.

use super::{Acceptance, Automaton, Letter};
use crate::graph;

/// An ultimately periodic word over `2^AP`. `cycle` must be nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl Lasso {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        Lasso { prefix, cycle }
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Letter at position `i` of the unrolled `prefix · cycle` buffer.
    pub fn letter(&self, i: usize) -> Letter {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[i - self.prefix.len()]
        }
    }

    /// Position following `i`; the end of the cycle wraps to its start.
    pub fn next(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }
}

/// Whether `a` accepts the lasso word, decided on the finite product of
/// automaton states and word positions: some reachable cycle must satisfy
/// the acceptance condition.
pub fn accepts(a: &Automaton, w: &Lasso) -> bool {
    let len = w.len();
    let n = a.num_states() * len;
    let node = |q: usize, i: usize| q * len + i;
    // product edges tagged with the automaton edge id
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    let start = node(a.initial(), 0);
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        let (q, i) = (v / len, v % len);
        for e in a.enabled(q, w.letter(i)) {
            let t = node(a.edge(e).dst, w.next(i));
            out[v].push((t, e));
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    let has_good_cycle = |allowed: &dyn Fn(usize) -> bool, good: &dyn Fn(usize) -> bool| {
        let adj: Vec<Vec<usize>> = out
            .iter()
            .map(|es| es.iter().filter(|&&(_, e)| allowed(e)).map(|&(t, _)| t).collect())
            .collect();
        let (comp, _) = graph::scc(&adj, &seen);
        (0..n).any(|v| {
            seen[v]
                && out[v]
                    .iter()
                    .any(|&(t, e)| allowed(e) && good(e) && comp[t] == comp[v])
        })
    };
    match a.acceptance() {
        Acceptance::Buchi(acc) => has_good_cycle(&|_| true, &|e| acc[e]),
        Acceptance::Rabin(pairs) => pairs
            .iter()
            .any(|p| has_good_cycle(&|e| !p.fin[e], &|e| p.inf[e])),
    }
}

/// Whether `w` is a power of a strictly shorter word.
fn is_power(w: &[Letter]) -> bool {
    let n = w.len();
    (1..n).any(|d| n % d == 0 && (d..n).all(|i| w[i] == w[i - d]))
}

/// All lasso words over `num_ap` propositions with
/// `|prefix| + |cycle| <= max_len`, each ω-word listed once: the cycle is
/// primitive and the prefix does not end with the cycle's last letter.
pub fn enumerate(num_ap: usize, max_len: usize) -> Vec<Lasso> {
    let sigma = 1u64 << num_ap;
    let words = |len: usize| -> Vec<Vec<Letter>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..sigma).map(move |l| {
                        let mut v = w.clone();
                        v.push(l);
                        v
                    })
                })
                .collect();
        }
        out
    };
    let mut result = Vec::new();
    for c in 1..=max_len {
        let cycles: Vec<Vec<Letter>> = words(c).into_iter().filter(|w| !is_power(w)).collect();
        for p in 0..=max_len - c {
            let prefixes = words(p);
            for cycle in &cycles {
                for prefix in &prefixes {
                    if prefix.last().is_some_and(|l| l == cycle.last().unwrap()) {
                        continue;
                    }
                    result.push(Lasso::new(prefix.clone(), cycle.clone()));
                }
            }
        }
    }
    result
}
