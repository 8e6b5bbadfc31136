//! LTL to NBA by tableau expansion.
//!
//! A tableau state is the set of obligations that must hold from the current
//! position on. Expanding it yields covers: a guard on the current letter, the
//! obligations passed to the next position, and the untils postponed in this
//! step. Acceptance is generalized over untils (an until is satisfied on a
//! transition that does not postpone it) and then degeneralized with a
//! counter.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::guard::Guard;
use super::nba::{Edge, Nba};
use crate::ltl::{nnf, Atom, Formula};

type Obligations = BTreeSet<Formula>;

#[derive(Clone)]
struct Cover {
    guard: Guard,
    next: Obligations,
    pending: BTreeSet<usize>,
    done: BTreeSet<Formula>,
}

struct Ctx<'a> {
    atoms: &'a [Atom],
    untils: BTreeMap<Formula, usize>,
}

fn collect_untils(f: &Formula, out: &mut BTreeMap<Formula, usize>) {
    if let Formula::Until(..) = f {
        let k = out.len();
        out.entry(f.clone()).or_insert(k);
    }
    for c in f.children() {
        collect_untils(c, out);
    }
}

impl Ctx<'_> {
    fn expand(&self, mut todo: Vec<Formula>, mut cov: Cover, out: &mut Vec<Cover>) {
        while let Some(f) = todo.pop() {
            if cov.done.contains(&f) {
                continue;
            }
            cov.done.insert(f.clone());
            if f.is_propositional() {
                let g = Guard::from_formula(&f, self.atoms).expect("atoms registered");
                cov.guard = Guard::and(cov.guard, g);
                if cov.guard == Guard::False {
                    return;
                }
                continue;
            }
            match &f {
                Formula::And(a, b) => {
                    todo.push((**a).clone());
                    todo.push((**b).clone());
                }
                Formula::Or(a, b) => {
                    let mut left = todo.clone();
                    left.push((**a).clone());
                    self.expand(left, cov.clone(), out);
                    todo.push((**b).clone());
                }
                Formula::Next(a) => {
                    if **a != Formula::True {
                        cov.next.insert((**a).clone());
                    }
                }
                Formula::Until(p, q) => {
                    let mut now = todo.clone();
                    now.push((**q).clone());
                    self.expand(now, cov.clone(), out);
                    todo.push((**p).clone());
                    cov.next.insert(f.clone());
                    cov.pending.insert(self.untils[&f]);
                }
                Formula::WeakUntil(p, q) => {
                    let mut now = todo.clone();
                    now.push((**q).clone());
                    self.expand(now, cov.clone(), out);
                    todo.push((**p).clone());
                    cov.next.insert(f.clone());
                }
                Formula::Globally(p) => {
                    todo.push((**p).clone());
                    cov.next.insert(f.clone());
                }
                other => unreachable!("not a desugared NNF formula: {other}"),
            }
        }
        out.push(cov);
    }

    /// Covers of a state, merged by (next, pending) and with dominated
    /// covers removed.
    fn covers(&self, state: &Obligations) -> Vec<(Guard, Obligations, BTreeSet<usize>)> {
        let mut raw = Vec::new();
        let start = Cover {
            guard: Guard::True,
            next: BTreeSet::new(),
            pending: BTreeSet::new(),
            done: BTreeSet::new(),
        };
        self.expand(state.iter().cloned().collect(), start, &mut raw);
        let mut merged: BTreeMap<(Obligations, BTreeSet<usize>), Guard> = BTreeMap::new();
        for c in raw {
            let slot = merged
                .entry((c.next, c.pending))
                .or_insert(Guard::False);
            *slot = Guard::or(slot.clone(), c.guard);
        }
        let list: Vec<_> = merged.into_iter().map(|((n, p), g)| (g, n, p)).collect();
        // (g1, n1, p1) dominates (g2, n2, p2) when g2 -> g1, n1 <= n2, p1 <= p2
        let dominated = |k: usize| {
            let (g2, n2, p2) = &list[k];
            list.iter().enumerate().any(|(j, (g1, n1, p1))| {
                j != k
                    && n1.is_subset(n2)
                    && p1.is_subset(p2)
                    && (n1 != n2 || p1 != p2)
                    && g2.implies(g1, 12) == Some(true)
            })
        };
        let keep: Vec<bool> = (0..list.len()).map(|k| !dominated(k)).collect();
        list.into_iter()
            .zip(keep)
            .filter_map(|(c, k)| k.then_some(c))
            .collect()
    }
}

/// Translates `f` into an NBA over `atoms`. The formula is brought into
/// desugared negation normal form first; atoms of `f` missing from `atoms`
/// are appended in sorted order.
pub fn ltl_to_nba(f: &Formula, atoms: &[Atom]) -> Nba {
    let f = nnf(f);
    let mut atoms = atoms.to_vec();
    for a in f.atoms() {
        if !atoms.contains(&a) {
            atoms.push(a);
        }
    }
    let mut untils = BTreeMap::new();
    collect_untils(&f, &mut untils);
    let ctx = Ctx {
        atoms: &atoms,
        untils,
    };
    let m = ctx.untils.len();

    let init: Obligations = if f == Formula::True {
        BTreeSet::new()
    } else {
        [f.clone()].into_iter().collect()
    };
    if f == Formula::False {
        return Nba::empty(atoms);
    }

    let mut ids: HashMap<(Obligations, usize), usize> = HashMap::new();
    let mut keys: Vec<(Obligations, usize)> = Vec::new();
    let mut edges: Vec<Vec<Edge>> = Vec::new();
    let mut cover_cache: HashMap<Obligations, Vec<(Guard, Obligations, BTreeSet<usize>)>> =
        HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |key: (Obligations, usize),
                      keys: &mut Vec<(Obligations, usize)>,
                      edges: &mut Vec<Vec<Edge>>,
                      queue: &mut VecDeque<usize>| {
        *ids.entry(key.clone()).or_insert_with(|| {
            keys.push(key);
            edges.push(Vec::new());
            queue.push_back(keys.len() - 1);
            keys.len() - 1
        })
    };
    let i0 = intern((init, 0), &mut keys, &mut edges, &mut queue);
    while let Some(s) = queue.pop_front() {
        let (obl, k) = keys[s].clone();
        let covers = cover_cache
            .entry(obl.clone())
            .or_insert_with(|| ctx.covers(&obl))
            .clone();
        let base = if k == m { 0 } else { k };
        let mut out: BTreeMap<usize, Guard> = BTreeMap::new();
        for (guard, next, pending) in covers {
            let mut k2 = base;
            while k2 < m && !pending.contains(&k2) {
                k2 += 1;
            }
            let t = intern((next, k2), &mut keys, &mut edges, &mut queue);
            let slot = out.entry(t).or_insert(Guard::False);
            *slot = Guard::or(slot.clone(), guard);
        }
        edges[s] = out
            .into_iter()
            .map(|(to, guard)| Edge { guard, to })
            .collect();
    }
    let accepting = keys.iter().map(|(_, k)| *k == m).collect();
    let names = keys
        .iter()
        .map(|(obl, k)| {
            let items: Vec<String> = obl.iter().map(|f| f.to_string()).collect();
            format!("{{{}}} #{k}", items.join(", "))
        })
        .collect();
    prune_dead(Nba {
        atoms,
        initial: vec![i0],
        accepting,
        edges,
        names,
    })
}

/// Removes states from which no accepting cycle is reachable.
fn prune_dead(a: Nba) -> Nba {
    let n = a.num_states();
    let adj: Vec<Vec<usize>> = a
        .edges
        .iter()
        .map(|es| es.iter().map(|e| e.to).collect())
        .collect();
    let roots: Vec<usize> = (0..n).collect();
    let (comp, ncomp) = crate::graph::scc(&adj, &roots);
    // a component is live if it contains an accepting cycle
    let mut size = vec![0usize; ncomp];
    for &c in &comp {
        size[c] += 1;
    }
    let mut live = vec![false; n];
    for v in 0..n {
        if a.accepting[v] && (size[comp[v]] > 1 || adj[v].contains(&v)) {
            live[v] = true;
        }
    }
    // backward closure
    let mut rev = vec![Vec::new(); n];
    for (v, ws) in adj.iter().enumerate() {
        for &w in ws {
            rev[w].push(v);
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| live[v]).collect();
    while let Some(w) = stack.pop() {
        for &v in &rev[w] {
            if !live[v] {
                live[v] = true;
                stack.push(v);
            }
        }
    }
    if !a.initial.iter().any(|&i| live[i]) {
        return Nba::empty(a.atoms);
    }
    // renumber in BFS order from the initial states for stable ids
    let mut new_id = vec![usize::MAX; n];
    let mut order = Vec::new();
    let mut queue: VecDeque<usize> = a.initial.iter().copied().filter(|&i| live[i]).collect();
    for &i in &queue {
        new_id[i] = order.len();
        order.push(i);
    }
    while let Some(v) = queue.pop_front() {
        for e in &a.edges[v] {
            if live[e.to] && new_id[e.to] == usize::MAX {
                new_id[e.to] = order.len();
                order.push(e.to);
                queue.push_back(e.to);
            }
        }
    }
    Nba {
        initial: a
            .initial
            .iter()
            .filter(|&&i| live[i])
            .map(|&i| new_id[i])
            .collect(),
        accepting: order.iter().map(|&v| a.accepting[v]).collect(),
        edges: order
            .iter()
            .map(|&v| {
                a.edges[v]
                    .iter()
                    .filter(|e| new_id[e.to] != usize::MAX)
                    .map(|e| Edge {
                        guard: e.guard.clone(),
                        to: new_id[e.to],
                    })
                    .collect()
            })
            .collect(),
        names: order.iter().map(|&v| a.names[v].clone()).collect(),
        atoms: a.atoms,
    }
}
