//! Maximal reachability probabilities: graph precomputation followed by
//! Gauss–Seidel value iteration.

use crate::model::Mdp;
use crate::product::Product;

use super::{mec::accepting_states, AnalysisError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachOptions {
    /// Stop once a sweep changes no value by more than this.
    pub tol: f64,
    pub max_iter: usize,
    /// Choices whose backup is within this of the optimum count as optimal.
    pub tie_tol: f64,
}

impl Default for ReachOptions {
    fn default() -> Self {
        ReachOptions {
            tol: 1e-9,
            max_iter: 1_000_000,
            tie_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReachResult {
    pub values: Vec<f64>,
    /// Per state, the choices whose one-step backup is within `tie_tol` of
    /// the state's value.
    pub best: Vec<Vec<usize>>,
    pub iterations: usize,
    /// Sup-norm change of every sweep.
    pub residuals: Vec<f64>,
}

fn predecessors(m: &Mdp) -> Vec<Vec<usize>> {
    let mut pre = vec![Vec::new(); m.num_states()];
    for s in 0..m.num_states() {
        for ch in m.choices(s) {
            for &(t, p) in &ch.dist {
                if p > 0.0 {
                    pre[t].push(s);
                }
            }
        }
    }
    pre
}

/// States from which the target is unreachable under every strategy
/// (maximal probability 0).
pub fn prob0a(m: &Mdp, target: &[bool]) -> Vec<bool> {
    let pre = predecessors(m);
    let can = crate::graph::reachable_from(&pre, (0..m.num_states()).filter(|&s| target[s]));
    can.iter().map(|&c| !c).collect()
}

/// States from which some strategy reaches the target almost surely
/// (maximal probability 1).
pub fn prob1e(m: &Mdp, target: &[bool]) -> Vec<bool> {
    let n = m.num_states();
    let mut u = vec![true; n];
    loop {
        let mut r: Vec<bool> = target.to_vec();
        loop {
            let mut grown = false;
            for s in 0..n {
                if r[s] || !u[s] {
                    continue;
                }
                let ok = m.choices(s).iter().any(|ch| {
                    ch.dist.iter().all(|&(t, p)| p == 0.0 || u[t]) && ch.dist.iter().any(|&(t, p)| p > 0.0 && r[t])
                });
                if ok {
                    r[s] = true;
                    grown = true;
                }
            }
            if !grown {
                break;
            }
        }
        if r == u {
            return u;
        }
        u = r;
    }
}

/// Maximal probability of eventually reaching `target` from every state.
pub fn max_reach_prob(m: &Mdp, target: &[bool], opts: &ReachOptions) -> Result<ReachResult, AnalysisError> {
    let n = m.num_states();
    let zero = prob0a(m, target);
    let one = prob1e(m, target);
    let mut x: Vec<f64> = (0..n).map(|s| if one[s] { 1.0 } else { 0.0 }).collect();
    let unknown: Vec<usize> = (0..n).filter(|&s| !zero[s] && !one[s]).collect();
    let backup = |x: &[f64], s: usize, c: usize| -> f64 { m.choices(s)[c].dist.iter().map(|&(t, p)| p * x[t]).sum() };

    let mut residuals = Vec::new();
    let mut iterations = 0;
    if !unknown.is_empty() {
        loop {
            if iterations >= opts.max_iter {
                return Err(AnalysisError::NotConverged {
                    iterations,
                    residual: residuals.last().copied().unwrap_or(f64::INFINITY),
                });
            }
            iterations += 1;
            let mut residual: f64 = 0.0;
            for &s in &unknown {
                let v = (0..m.choices(s).len())
                    .map(|c| backup(&x, s, c))
                    .fold(0.0, f64::max);
                residual = residual.max((v - x[s]).abs());
                x[s] = v;
            }
            residuals.push(residual);
            if residual < opts.tol {
                break;
            }
        }
    }

    let best = (0..n)
        .map(|s| {
            let k = m.choices(s).len();
            if target[s] {
                return (0..k).collect();
            }
            let q: Vec<f64> = (0..k).map(|c| backup(&x, s, c)).collect();
            let top = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (0..k).filter(|&c| q[c] >= top - opts.tie_tol).collect()
        })
        .collect();
    Ok(ReachResult {
        values: x,
        best,
        iterations,
        residuals,
    })
}

/// Maximal probability of satisfying the product's acceptance condition:
/// reachability of the union of accepting MECs.
pub fn max_satisfaction_prob(p: &Product, opts: &ReachOptions) -> Result<ReachResult, AnalysisError> {
    max_reach_prob(p.mdp(), &accepting_states(p), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Choice;

    fn retry() -> Mdp {
        // 0: alpha stays, beta reaches 1 w.p. 0.3
        Mdp::from_parts_unchecked(
            vec!["0".into(), "1".into()],
            vec!["alpha".into(), "beta".into()],
            vec![
                vec![Choice::new(0, vec![(0, 1.0)]), Choice::new(1, vec![(1, 0.3), (0, 0.7)])],
                vec![Choice::new(0, vec![(1, 1.0)])],
            ],
            vec![],
            vec![vec![]; 2],
            0,
        )
    }

    #[test]
    fn retry_reaches_surely() {
        let r = max_reach_prob(&retry(), &[false, true], &ReachOptions::default()).unwrap();
        assert_eq!(r.values, vec![1.0, 1.0]);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn target_initial() {
        let r = max_reach_prob(&retry(), &[true, false], &ReachOptions::default()).unwrap();
        assert_eq!(r.values[0], 1.0);
    }

    #[test]
    fn gamble_needs_iteration() {
        // 0: a -> {1: 0.4, 2: 0.6}, b -> {1: 0.5, 2: 0.5 via 3}
        let m = Mdp::from_parts_unchecked(
            (0..4).map(|i| i.to_string()).collect(),
            vec!["a".into(), "b".into()],
            vec![
                vec![Choice::new(0, vec![(1, 0.4), (2, 0.6)]), Choice::new(1, vec![(3, 1.0)])],
                vec![Choice::new(0, vec![(1, 1.0)])],
                vec![Choice::new(0, vec![(2, 1.0)])],
                vec![Choice::new(0, vec![(1, 0.5), (2, 0.5)]), Choice::new(1, vec![(3, 0.5), (2, 0.5)])],
            ],
            vec![],
            vec![vec![]; 4],
            0,
        );
        let r = max_reach_prob(&m, &[false, true, false, false], &ReachOptions::default()).unwrap();
        assert!((r.values[0] - 0.5).abs() < 1e-9);
        assert_eq!(r.best[0], vec![1]);
        assert_eq!(r.best[3], vec![0]);
        assert!(r.residuals.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn iteration_budget() {
        // slow geometric convergence: 0 -> 1 w.p. 1e-3, stays otherwise, or gives up
        let m = Mdp::from_parts_unchecked(
            (0..3).map(|i| i.to_string()).collect(),
            vec!["a".into(), "b".into()],
            vec![
                vec![Choice::new(0, vec![(1, 0.001), (0, 0.998), (2, 0.001)])],
                vec![Choice::new(0, vec![(1, 1.0)])],
                vec![Choice::new(0, vec![(2, 1.0)])],
            ],
            vec![],
            vec![vec![]; 3],
            0,
        );
        let opts = ReachOptions {
            max_iter: 10,
            ..Default::default()
        };
        let err = max_reach_prob(&m, &[false, true, false], &opts).unwrap_err();
        assert!(matches!(err, AnalysisError::NotConverged { iterations: 10, .. }));
        let r = max_reach_prob(&m, &[false, true, false], &ReachOptions::default()).unwrap();
        assert!((r.values[0] - 0.5).abs() < 1e-6);
    }
}
