//! Small graph algorithms shared by the automata, checker and solver.

/// Strongly connected components of the subgraph reachable from `roots`,
/// as a component id per node (`usize::MAX` for unreached nodes) and the
/// component count. Iterative Tarjan.
pub fn scc(adj: &[Vec<usize>], roots: &[usize]) -> (Vec<usize>, usize) {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut comp = vec![UNSEEN; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut ncomp = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for &r in roots {
        if index[r] != UNSEEN {
            continue;
        }
        call.push((r, 0));
        index[r] = next_index;
        low[r] = next_index;
        next_index += 1;
        stack.push(r);
        on_stack[r] = true;
        while let Some(&mut (v, ref mut k)) = call.last_mut() {
            if *k < adj[v].len() {
                let w = adj[v][*k];
                *k += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    (comp, ncomp)
}

/// True if some cycle reachable from `roots` passes through an accepting node.
pub fn has_accepting_cycle(adj: &[Vec<usize>], roots: &[usize], accepting: &[bool]) -> bool {
    let (comp, ncomp) = scc(adj, roots);
    let mut size = vec![0usize; ncomp];
    for &c in &comp {
        if c != usize::MAX {
            size[c] += 1;
        }
    }
    (0..adj.len()).any(|v| {
        comp[v] != usize::MAX
            && accepting[v]
            && (size[comp[v]] > 1 || adj[v].contains(&v))
    })
}

/// A path from a root to an accepting node on a cycle, then the cycle.
/// Returns (stem, cycle) as node lists with `cycle[0]` accepting and the
/// edge from the last cycle node back to `cycle[0]`.
pub fn accepting_lasso(
    adj: &[Vec<usize>],
    roots: &[usize],
    accepting: &[bool],
) -> Option<(Vec<usize>, Vec<usize>)> {
    let (comp, _) = scc(adj, roots);
    let target = (0..adj.len()).find(|&v| {
        comp[v] != usize::MAX
            && accepting[v]
            && (adj[v].contains(&v)
                || adj[v].iter().any(|&w| comp[w] == comp[v]))
    })?;
    let stem = bfs_path(adj, roots, |v| v == target, |_| true)?;
    let c = comp[target];
    let mut cycle = if adj[target].contains(&target) {
        vec![target]
    } else {
        let starts: Vec<usize> = adj[target]
            .iter()
            .copied()
            .filter(|&w| comp[w] == c)
            .collect();
        let mut p = bfs_path(adj, &starts, |v| v == target, |v| comp[v] == c)?;
        p.pop();
        p.insert(0, target);
        p
    };
    let mut stem = stem;
    stem.pop();
    cycle.shrink_to_fit();
    Some((stem, cycle))
}

/// Shortest path from any of `starts` to a node satisfying `goal`, moving
/// only through nodes satisfying `allowed`.
pub fn bfs_path(
    adj: &[Vec<usize>],
    starts: &[usize],
    goal: impl Fn(usize) -> bool,
    allowed: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; adj.len()];
    let mut seen = vec![false; adj.len()];
    let mut queue = std::collections::VecDeque::new();
    for &s in starts {
        if allowed(s) && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        if goal(v) {
            let mut path = vec![v];
            let mut x = v;
            while parent[x] != usize::MAX {
                x = parent[x];
                path.push(x);
            }
            path.reverse();
            return Some(path);
        }
        for &w in &adj[v] {
            if !seen[w] && allowed(w) {
                seen[w] = true;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cycles() {
        // 0 -> 1 -> 2 -> 1, 3 unreachable self-loop
        let adj = vec![vec![1], vec![2], vec![1], vec![3]];
        assert!(has_accepting_cycle(&adj, &[0], &[false, false, true, false]));
        assert!(!has_accepting_cycle(&adj, &[0], &[true, false, false, true]));
        let (stem, cycle) = accepting_lasso(&adj, &[0], &[false, false, true, false]).unwrap();
        assert_eq!(stem, vec![0, 1]);
        assert_eq!(cycle, vec![2, 1]);
    }

    #[test]
    fn self_loop_counts() {
        let adj = vec![vec![0]];
        assert_eq!(accepting_lasso(&adj, &[0], &[true]), Some((vec![], vec![0])));
        let adj = vec![vec![]];
        assert!(!has_accepting_cycle(&adj, &[0], &[true]));
    }
}
