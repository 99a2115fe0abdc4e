//! Independent reference computations for the analysis tests. Nothing
//! here calls into the library's analysis module.

#![allow(dead_code)]

use std::collections::VecDeque;

use omegalearn::automata::lasso::Lasso;
use omegalearn::automata::{Acceptance, Automaton};
use omegalearn::model::Mdp;
use omegalearn::product::{build_product, Product, ProductOptions};
use omegalearn::random::{random_dbw, random_mdp};
use rand::Rng;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        assert!(a[piv][col].abs() > 1e-300, "singular system");
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let k = a[r][col] / a[col][col];
            if k != 0.0 {
                for c in col..n {
                    a[r][c] -= k * a[col][c];
                }
                b[r] -= k * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Dense transition matrix of the chain a pure strategy induces.
pub fn chain(m: &Mdp, pure: &[usize]) -> Vec<Vec<f64>> {
    let n = m.num_states();
    let mut p = vec![vec![0.0; n]; n];
    for s in 0..n {
        for &(t, q) in &m.choices(s)[pure[s]].dist {
            p[s][t] += q;
        }
    }
    p
}

/// `reach[s][t]`: t reachable from s in the support graph of `p`
/// (reflexive).
pub fn closure(p: &[Vec<f64>]) -> Vec<Vec<bool>> {
    let n = p.len();
    let mut r: Vec<Vec<bool>> = (0..n).map(|s| (0..n).map(|t| s == t || p[s][t] > 0.0).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Probability of eventually reaching `target` in the chain `p`.
pub fn chain_reach(p: &[Vec<f64>], target: &[bool]) -> Vec<f64> {
    let n = p.len();
    let r = closure(p);
    let can: Vec<bool> = (0..n).map(|s| (0..n).any(|t| target[t] && r[s][t])).collect();
    let unknown: Vec<usize> = (0..n).filter(|&s| can[s] && !target[s]).collect();
    let idx = |s: usize| unknown.iter().position(|&u| u == s);
    let k = unknown.len();
    let mut a = vec![vec![0.0; k]; k];
    let mut b = vec![0.0; k];
    for (i, &s) in unknown.iter().enumerate() {
        a[i][i] += 1.0;
        for t in 0..n {
            if target[t] {
                b[i] += p[s][t];
            } else if let Some(j) = idx(t) {
                a[i][j] -= p[s][t];
            }
        }
    }
    let sol = gauss(a, b);
    let mut x: Vec<f64> = target.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
    for (i, &s) in unknown.iter().enumerate() {
        x[s] = sol[i];
    }
    x
}

/// Best reachability probability over all pure positional strategies.
pub fn max_reach_by_enumeration(m: &Mdp, target: &[bool]) -> Vec<f64> {
    let n = m.num_states();
    let mut best = vec![0.0f64; n];
    let mut pure = vec![0usize; n];
    loop {
        let v = chain_reach(&chain(m, &pure), target);
        for s in 0..n {
            best[s] = best[s].max(v[s]);
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            pure[i] += 1;
            if pure[i] < m.choices(i).len() {
                break;
            }
            pure[i] = 0;
            i += 1;
        }
    }
}

/// Maximal end components by enumerating every subset of choices:
/// each is a sorted list of `(state, sorted choices)`.
pub fn brute_force_mecs(m: &Mdp) -> Vec<Vec<(usize, Vec<usize>)>> {
    let pairs: Vec<(usize, usize)> = (0..m.num_states())
        .flat_map(|s| (0..m.choices(s).len()).map(move |c| (s, c)))
        .collect();
    assert!(pairs.len() <= 20, "too many choices to enumerate");
    let n = m.num_states();
    let mut ecs: Vec<u64> = Vec::new();
    for mask in 1u64..1 << pairs.len() {
        let chosen: Vec<(usize, usize)> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        let mut inside = vec![false; n];
        for &(s, _) in &chosen {
            inside[s] = true;
        }
        let closed = chosen
            .iter()
            .all(|&(s, c)| m.choices(s)[c].dist.iter().all(|&(t, _)| inside[t]));
        if !closed {
            continue;
        }
        let mut p = vec![vec![0.0; n]; n];
        for &(s, c) in &chosen {
            for &(t, _) in &m.choices(s)[c].dist {
                p[s][t] = 1.0;
            }
        }
        let r = closure(&p);
        let states: Vec<usize> = (0..n).filter(|&s| inside[s]).collect();
        if states.iter().all(|&s| states.iter().all(|&t| r[s][t])) {
            ecs.push(mask);
        }
    }
    let maximal: Vec<u64> = ecs
        .iter()
        .copied()
        .filter(|&e| !ecs.iter().any(|&f| f != e && f & e == e))
        .collect();
    let mut out: Vec<Vec<(usize, Vec<usize>)>> = maximal
        .into_iter()
        .map(|mask| {
            let mut v: Vec<(usize, Vec<usize>)> = Vec::new();
            for i in (0..pairs.len()).filter(|&i| mask >> i & 1 == 1) {
                let (s, c) = pairs[i];
                match v.last_mut() {
                    Some((t, cs)) if *t == s => cs.push(c),
                    _ => v.push((s, vec![c])),
                }
            }
            v
        })
        .collect();
    out.sort();
    out
}

/// Reference values of a pure strategy on a Büchi product.
#[derive(Debug, Clone)]
pub struct Reference {
    pub p: Vec<f64>,
    pub a: Vec<f64>,
    pub f: Vec<f64>,
    /// `Some(accepting)` for BSCC states.
    pub bscc: Vec<Option<bool>>,
    /// `reach[s][t]` in the induced chain.
    pub reach: Vec<Vec<bool>>,
}

pub fn reference(prod: &Product, pure: &[usize], zeta: f64) -> Reference {
    let m = prod.mdp();
    let n = m.num_states();
    let p = chain(m, pure);
    let reach = closure(&p);
    let acc: Vec<bool> = (0..n).map(|s| prod.is_accepting(s, pure[s])).collect();
    let in_bscc: Vec<bool> = (0..n).map(|s| (0..n).all(|t| !reach[s][t] || reach[t][s])).collect();
    let bscc: Vec<Option<bool>> = (0..n)
        .map(|s| in_bscc[s].then(|| (0..n).any(|t| reach[s][t] && reach[t][s] && acc[t])))
        .collect();
    let good: Vec<bool> = bscc.iter().map(|b| *b == Some(true)).collect();
    let a = chain_reach(&p, &good);

    // augmented chain with t as an extra last state
    let mut aug = vec![vec![0.0; n + 1]; n + 1];
    for s in 0..n {
        let scale = if acc[s] { zeta } else { 1.0 };
        for t in 0..n {
            aug[s][t] = p[s][t] * scale;
        }
        if acc[s] {
            aug[s][n] = 1.0 - zeta;
        }
    }
    aug[n][n] = 1.0;
    let mut target = vec![false; n + 1];
    target[n] = true;
    let pz = chain_reach(&aug, &target)[..n].to_vec();

    let transient: Vec<usize> = (0..n).filter(|&s| !in_bscc[s]).collect();
    let k = transient.len();
    let mut mat = vec![vec![0.0; k]; k];
    let mut rhs = vec![0.0; k];
    for (i, &s) in transient.iter().enumerate() {
        mat[i][i] += 1.0;
        rhs[i] = if acc[s] { 1.0 } else { 0.0 };
        for (j, &t) in transient.iter().enumerate() {
            mat[i][j] -= p[s][t];
        }
    }
    let sol = gauss(mat, rhs);
    let mut f = vec![0.0; n];
    for (i, &s) in transient.iter().enumerate() {
        f[s] = sol[i];
    }
    Reference { p: pz, a, f, bscc, reach }
}

/// A random Büchi product of an MDP with at most `max_states` states and
/// a deterministic automaton with at most 3 states, plus a random pure
/// positional strategy on it.
pub fn random_instance(rng: &mut impl Rng, max_states: usize, max_actions: usize) -> (Product, Vec<usize>) {
    let num_ap = rng.gen_range(1..=2);
    let n = rng.gen_range(1..=max_states);
    let m = random_mdp(rng, n, max_actions, num_ap);
    let k = rng.gen_range(1..=3);
    let a = random_dbw(rng, k, num_ap);
    let prod = build_product(&m, &a, ProductOptions::default()).expect("complete automaton");
    let pure = (0..prod.num_states())
        .map(|s| rng.gen_range(0..prod.mdp().choices(s).len()))
        .collect();
    (prod, pure)
}

/// Büchi membership by plain search: some accepting edge of the
/// (state, position) graph is reachable and closes a cycle.
pub fn buchi_member(a: &Automaton, w: &Lasso) -> bool {
    let Acceptance::Buchi(acc) = a.acceptance() else {
        panic!("Büchi only")
    };
    let len = w.len();
    let succ = |(q, i): (usize, usize)| -> Vec<(usize, (usize, usize))> {
        a.edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.src == q && e.guard.eval(w.letter(i)))
            .map(|(id, e)| (id, (e.dst, w.next(i))))
            .collect()
    };
    let reach = |from: (usize, usize)| -> Vec<Vec<bool>> {
        let mut seen = vec![vec![false; len]; a.num_states()];
        let mut queue = VecDeque::from([from]);
        seen[from.0][from.1] = true;
        while let Some(v) = queue.pop_front() {
            for (_, u) in succ(v) {
                if !seen[u.0][u.1] {
                    seen[u.0][u.1] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    };
    let from_start = reach((a.initial(), 0));
    for q in 0..a.num_states() {
        for i in 0..len {
            if !from_start[q][i] {
                continue;
            }
            for (id, dst) in succ((q, i)) {
                if acc[id] && reach(dst)[q][i] {
                    return true;
                }
            }
        }
    }
    false
}
