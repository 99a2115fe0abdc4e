//! Markov chains induced by stationary strategies and their exact
//! evaluation by direct linear solves.

use nalgebra::{DMatrix, DVector};

use crate::graph;
use crate::model::Mdp;
use crate::product::{Product, ProductAcceptance};

use super::{AnalysisError, MixedStrategy};

/// A Markov chain over the states of an MDP. Rows outside `domain` are
/// empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub rows: Vec<Vec<(usize, f64)>>,
    pub domain: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bscc {
    pub states: Vec<usize>,
}

/// Mixes the choice distributions of `m` by `sigma`. The domain is every
/// state if `sigma` is total, otherwise the states reachable from the
/// initial state under `sigma`, all of which must be defined.
pub fn induced_chain(m: &Mdp, sigma: &MixedStrategy) -> Result<Chain, AnalysisError> {
    sigma.validate(m)?;
    let n = m.num_states();
    let row = |s: usize| -> Result<Vec<(usize, f64)>, AnalysisError> {
        let d = sigma.get(s).ok_or(AnalysisError::UndefinedStrategy(s))?;
        let mut acc: Vec<(usize, f64)> = Vec::new();
        for (c, &w) in d.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for &(t, p) in &m.choices(s)[c].dist {
                match acc.iter_mut().find(|(u, _)| *u == t) {
                    Some(e) => e.1 += w * p,
                    None => acc.push((t, w * p)),
                }
            }
        }
        acc.retain(|&(_, p)| p > 0.0);
        acc.sort_by_key(|&(t, _)| t);
        Ok(acc)
    };
    let mut rows = vec![Vec::new(); n];
    let mut domain = vec![false; n];
    if sigma.is_total() {
        for s in 0..n {
            rows[s] = row(s)?;
            domain[s] = true;
        }
    } else {
        let mut stack = vec![m.initial()];
        domain[m.initial()] = true;
        while let Some(s) = stack.pop() {
            rows[s] = row(s)?;
            for &(t, _) in &rows[s] {
                if !domain[t] {
                    domain[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    Ok(Chain { rows, domain })
}

impl Chain {
    fn adjacency(&self) -> Vec<Vec<usize>> {
        self.rows.iter().map(|r| r.iter().map(|&(t, _)| t).collect()).collect()
    }

    /// Bottom SCCs and, per state, the index of the BSCC containing it.
    pub fn bsccs(&self) -> (Vec<Bscc>, Vec<Option<usize>>) {
        let n = self.rows.len();
        let (comp, count) = graph::scc(&self.adjacency(), &self.domain);
        let mut bottom = vec![true; count];
        for s in 0..n {
            if self.domain[s] && self.rows[s].iter().any(|&(t, _)| comp[t] != comp[s]) {
                bottom[comp[s]] = false;
            }
        }
        let mut index = vec![None; count];
        let mut out: Vec<Bscc> = Vec::new();
        let mut of_state = vec![None; n];
        for s in 0..n {
            if !self.domain[s] || !bottom[comp[s]] {
                continue;
            }
            let k = *index[comp[s]].get_or_insert_with(|| {
                out.push(Bscc { states: Vec::new() });
                out.len() - 1
            });
            out[k].states.push(s);
            of_state[s] = Some(k);
        }
        (out, of_state)
    }

    /// States (in the domain) with a path to some state in `goal`.
    fn can_reach(&self, goal: &[bool]) -> Vec<bool> {
        let n = self.rows.len();
        let mut pre = vec![Vec::new(); n];
        for s in 0..n {
            for &(t, _) in &self.rows[s] {
                pre[t].push(s);
            }
        }
        graph::reachable_from(&pre, (0..n).filter(|&s| goal[s] && self.domain[s]))
    }
}

/// Solves `x_s = b_s + Σ_t w(s,t) x_t` for `s ∈ unknown`; other entries of
/// `x` are taken as known.
fn solve(
    unknown: &[usize],
    rows: &[Vec<(usize, f64)>],
    b: &[f64],
    x: &mut [f64],
) -> Result<(), AnalysisError> {
    if unknown.is_empty() {
        return Ok(());
    }
    let mut pos = vec![usize::MAX; x.len()];
    for (i, &s) in unknown.iter().enumerate() {
        pos[s] = i;
    }
    let k = unknown.len();
    let mut a = DMatrix::<f64>::identity(k, k);
    let mut rhs = DVector::<f64>::zeros(k);
    for (i, &s) in unknown.iter().enumerate() {
        rhs[i] = b[s];
        for &(t, w) in &rows[s] {
            if pos[t] == usize::MAX {
                rhs[i] += w * x[t];
            } else {
                a[(i, pos[t])] -= w;
            }
        }
    }
    let sol = a.lu().solve(&rhs).ok_or(AnalysisError::Singular)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::Singular);
    }
    for (i, &s) in unknown.iter().enumerate() {
        x[s] = sol[i];
    }
    Ok(())
}

/// Exact quantities of a fixed strategy on a product, per state (`NaN`
/// outside the strategy's domain).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Probability of reaching `t` in the ζ-augmented chain.
    pub p: Option<Vec<f64>>,
    /// Probability that a run is accepting.
    pub a: Vec<f64>,
    /// Expected number of accepting transitions before entering a BSCC.
    pub f: Option<Vec<f64>>,
    pub domain: Vec<bool>,
    /// Per state: inside an accepting BSCC, a rejecting one, or transient.
    pub bscc: Vec<Option<bool>>,
}

/// Evaluates `sigma` on the chain it induces on `p`. `p` and `f` are only
/// available for Büchi products; `p` needs `zeta`.
pub fn evaluate_strategy(p: &Product, sigma: &MixedStrategy, zeta: Option<f64>) -> Result<EvalReport, AnalysisError> {
    let m = p.mdp();
    let n = m.num_states();
    if let Some(z) = zeta {
        if !(z > 0.0 && z < 1.0) {
            return Err(AnalysisError::ZetaOutOfRange(z));
        }
        if !p.is_buchi() {
            return Err(AnalysisError::NotBuchi);
        }
    }
    let chain = induced_chain(m, sigma)?;
    let (bsccs, of_state) = chain.bsccs();
    // weight of accepting choices per state
    let weight = |s: usize, marks: &[Vec<bool>]| -> f64 {
        sigma
            .get(s)
            .map(|d| d.iter().zip(&marks[s]).filter(|(_, &a)| a).map(|(w, _)| w).sum())
            .unwrap_or(0.0)
    };
    let uses = |b: &Bscc, marks: &[Vec<bool>]| b.states.iter().any(|&s| weight(s, marks) > 0.0);
    let accepting: Vec<bool> = bsccs
        .iter()
        .map(|b| match p.acceptance() {
            ProductAcceptance::Buchi(f) => uses(b, f),
            ProductAcceptance::Rabin(pairs) => pairs.iter().any(|cp| !uses(b, &cp.fin) && uses(b, &cp.inf)),
        })
        .collect();
    let bscc: Vec<Option<bool>> = of_state.iter().map(|k| k.map(|k| accepting[k])).collect();

    let good: Vec<bool> = bscc.iter().map(|&b| b == Some(true)).collect();
    let reach_good = chain.can_reach(&good);
    let mut a: Vec<f64> = (0..n)
        .map(|s| match (chain.domain[s], bscc[s]) {
            (false, _) => f64::NAN,
            (true, Some(true)) => 1.0,
            _ => 0.0,
        })
        .collect();
    let unknown: Vec<usize> = (0..n)
        .filter(|&s| chain.domain[s] && bscc[s].is_none() && reach_good[s])
        .collect();
    solve(&unknown, &chain.rows, &vec![0.0; n], &mut a)?;

    let (mut pv, mut fv) = (None, None);
    if let Some(marks) = p.buchi() {
        let r: Vec<f64> = (0..n).map(|s| weight(s, marks)).collect();
        let transient: Vec<usize> = (0..n).filter(|&s| chain.domain[s] && bscc[s].is_none()).collect();
        let mut f: Vec<f64> = (0..n).map(|s| if chain.domain[s] { 0.0 } else { f64::NAN }).collect();
        solve(&transient, &chain.rows, &r, &mut f)?;
        fv = Some(f);

        if let Some(z) = zeta {
            // chain of the augmented MDP restricted to product states
            let rows: Vec<Vec<(usize, f64)>> = (0..n)
                .map(|s| {
                    let Some(d) = sigma.get(s).filter(|_| chain.domain[s]) else {
                        return Vec::new();
                    };
                    let mut acc: Vec<(usize, f64)> = Vec::new();
                    for (c, &w) in d.iter().enumerate() {
                        let scale = if marks[s][c] { z } else { 1.0 };
                        for &(t, q) in &m.choices(s)[c].dist {
                            match acc.iter_mut().find(|(u, _)| *u == t) {
                                Some(e) => e.1 += w * q * scale,
                                None => acc.push((t, w * q * scale)),
                            }
                        }
                    }
                    acc
                })
                .collect();
            let leak: Vec<bool> = r.iter().map(|&x| x > 0.0).collect();
            let live = chain.can_reach(&leak);
            let b: Vec<f64> = r.iter().map(|&x| (1.0 - z) * x).collect();
            let mut pz: Vec<f64> = (0..n).map(|s| if chain.domain[s] { 0.0 } else { f64::NAN }).collect();
            let unknown: Vec<usize> = (0..n).filter(|&s| chain.domain[s] && live[s]).collect();
            solve(&unknown, &rows, &b, &mut pz)?;
            pv = Some(pz);
        }
    }
    Ok(EvalReport {
        p: pv,
        a,
        f: fv,
        domain: chain.domain,
        bscc,
    })
}

/// Long-run average reward of `sigma` from every state, for a reward
/// `rho[s][c]` per state and choice. `NaN` outside the strategy's domain.
pub fn expected_average_reward(m: &Mdp, sigma: &MixedStrategy, rho: &[Vec<f64>]) -> Result<Vec<f64>, AnalysisError> {
    let n = m.num_states();
    let chain = induced_chain(m, sigma)?;
    let (bsccs, of_state) = chain.bsccs();
    let r: Vec<f64> = (0..n)
        .map(|s| {
            sigma
                .get(s)
                .filter(|_| chain.domain[s])
                .map(|d| d.iter().zip(&rho[s]).map(|(w, x)| w * x).sum())
                .unwrap_or(0.0)
        })
        .collect();
    let mut v: Vec<f64> = (0..n).map(|s| if chain.domain[s] { 0.0 } else { f64::NAN }).collect();
    for b in &bsccs {
        let k = b.states.len();
        let mut pos = vec![usize::MAX; n];
        for (i, &s) in b.states.iter().enumerate() {
            pos[s] = i;
        }
        // π (P − I) = 0 with the last equation replaced by Σ π = 1
        let mut a = DMatrix::<f64>::zeros(k, k);
        for (i, &s) in b.states.iter().enumerate() {
            for &(t, q) in &chain.rows[s] {
                a[(pos[t], i)] += q;
            }
            a[(i, i)] -= 1.0;
        }
        for i in 0..k {
            a[(k - 1, i)] = 1.0;
        }
        let mut rhs = DVector::<f64>::zeros(k);
        rhs[k - 1] = 1.0;
        let pi = a.lu().solve(&rhs).ok_or(AnalysisError::Singular)?;
        let gain: f64 = b.states.iter().enumerate().map(|(i, &s)| pi[i] * r[s]).sum();
        for &s in &b.states {
            v[s] = gain;
        }
    }
    let transient: Vec<usize> = (0..n).filter(|&s| chain.domain[s] && of_state[s].is_none()).collect();
    solve(&transient, &chain.rows, &vec![0.0; n], &mut v)?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Choice;

    fn cycle() -> Mdp {
        // 0 -> 1 -> 0 with a branch 0 -> 2 (absorbing) on choice b
        Mdp::from_parts_unchecked(
            (0..3).map(|i| i.to_string()).collect(),
            vec!["a".into(), "b".into()],
            vec![
                vec![Choice::new(0, vec![(1, 1.0)]), Choice::new(1, vec![(2, 0.5), (1, 0.5)])],
                vec![Choice::new(0, vec![(0, 1.0)])],
                vec![Choice::new(0, vec![(2, 1.0)])],
            ],
            vec![],
            vec![vec![]; 3],
            0,
        )
    }

    #[test]
    fn average_reward_of_two_cycle() {
        let m = cycle();
        let s = MixedStrategy::pure(&m, &[0, 0, 0]);
        let rho = vec![vec![1.0, 0.0], vec![0.0], vec![5.0]];
        let v = expected_average_reward(&m, &s, &rho).unwrap();
        assert!((v[0] - 0.5).abs() < 1e-12);
        assert!((v[2] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn absorption_weights_gains() {
        let m = cycle();
        let mut s = MixedStrategy::pure(&m, &[1, 0, 0]);
        let rho = vec![vec![0.0, 0.0], vec![0.0], vec![2.0]];
        let v = expected_average_reward(&m, &s, &rho).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-12);
        // half the time try to leave
        s.set(0, vec![0.5, 0.5]);
        let v = expected_average_reward(&m, &s, &rho).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-12);
        assert_eq!(expected_average_reward(&m, &s, &[vec![0.0; 2], vec![0.0], vec![0.0]]).unwrap()[0], 0.0);
    }

    #[test]
    fn partial_strategy_domain() {
        let m = cycle();
        let mut s = MixedStrategy::undefined(3);
        s.set(0, vec![0.0, 1.0]);
        assert!(matches!(induced_chain(&m, &s), Err(AnalysisError::UndefinedStrategy(1 | 2))));
        s.set(1, vec![1.0]);
        s.set(0, vec![1.0, 0.0]);
        let c = induced_chain(&m, &s).unwrap();
        assert_eq!(c.domain, vec![true, true, false]);
        let (b, of) = c.bsccs();
        assert_eq!(b.len(), 1);
        assert_eq!(of, vec![Some(0), Some(0), None]);
    }
}
