//! Strongly connected components of small explicit graphs.

/// Tarjan's algorithm (iterative). Returns the component index of every
/// node; components are numbered in reverse topological order, so a
/// component only has edges into components with a smaller or equal index.
/// Nodes with `active[v] == false` are ignored and get `usize::MAX`.
pub fn scc(adj: &[Vec<usize>], active: &[bool]) -> (Vec<usize>, usize) {
    let n = adj.len();
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSET; n];
    let mut stack = Vec::new();
    let mut next_index = 0usize;
    let mut count = 0usize;
    // (node, position in its adjacency list)
    let mut work: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if !active[root] || index[root] != UNSET {
            continue;
        }
        work.push((root, 0));
        while let Some(top) = work.len().checked_sub(1) {
            let (v, pos) = work[top];
            if pos == 0 && index[v] == UNSET {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(pos) {
                work[top].1 += 1;
                if !active[w] {
                    continue;
                }
                if index[w] == UNSET {
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            work.pop();
            if let Some(&(parent, _)) = work.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp[w] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    (comp, count)
}

/// Nodes reachable from `start` along `adj`.
pub fn reachable_from(adj: &[Vec<usize>], start: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack: Vec<usize> = Vec::new();
    for s in start {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}
