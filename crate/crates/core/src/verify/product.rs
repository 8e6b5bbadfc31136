//! Product of a system with a Büchi automaton and nested depth-first
//! search for accepting lassos.

use std::collections::HashMap;

use crate::automata::Nba;

/// One system step as seen by the automaton.
#[derive(Debug, Clone)]
pub struct SysEdge<W> {
    /// Valuation of the automaton's atoms at the source state.
    pub letter: u64,
    /// Scheduled vertices.
    pub moved: u64,
    pub next: usize,
    pub witness: W,
}

/// A finite system explored on the fly. States are dense ids.
pub trait Structure {
    type Witness: Clone;
    fn initial(&self) -> Vec<usize>;
    fn edges(&self, s: usize) -> Vec<SysEdge<Self::Witness>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ProductOptions {
    /// The automaton only advances when this vertex is scheduled.
    pub stutter_unless: Option<usize>,
    /// Require every one of this many vertices to be scheduled infinitely often.
    pub fair_vertices: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct LassoStep<W> {
    pub state: usize,
    pub witness: W,
    pub moved: u64,
}

#[derive(Debug, Clone)]
pub struct Lasso<W> {
    pub steps: Vec<LassoStep<W>>,
    pub loop_start: usize,
}

type Node = (usize, usize, usize);

struct Product<'a, S: Structure> {
    sys: &'a S,
    nba: &'a Nba,
    opts: ProductOptions,
    ids: HashMap<Node, usize>,
    nodes: Vec<Node>,
    succ: Vec<Option<Vec<(usize, usize)>>>,
    /// Witness store: (witness, moved) per product edge.
    labels: Vec<(S::Witness, u64)>,
    sys_cache: HashMap<usize, Vec<SysEdge<S::Witness>>>,
}

impl<'a, S: Structure> Product<'a, S> {
    fn top(&self) -> usize {
        self.opts.fair_vertices.unwrap_or(0)
    }

    fn intern(&mut self, n: Node) -> usize {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let id = self.nodes.len();
        self.ids.insert(n, id);
        self.nodes.push(n);
        self.succ.push(None);
        id
    }

    fn accepting(&self, id: usize) -> bool {
        let (_, a, c) = self.nodes[id];
        c == self.top() && self.nba.accepting[a]
    }

    fn successors(&mut self, id: usize) -> Vec<(usize, usize)> {
        if let Some(s) = &self.succ[id] {
            return s.clone();
        }
        let (s, a, c) = self.nodes[id];
        let top = self.top();
        let edges = match self.sys_cache.remove(&s) {
            Some(e) => e,
            None => self.sys.edges(s),
        };
        let mut out = Vec::new();
        for e in &edges {
            let advance = self
                .opts
                .stutter_unless
                .is_none_or(|v| e.moved >> v & 1 == 1);
            let c2 = if top == 0 {
                0
            } else {
                let mut k = match c == top {
                    true if self.nba.accepting[a] => 0,
                    true => top,
                    false => c,
                };
                while k < top && e.moved >> k & 1 == 1 {
                    k += 1;
                }
                k
            };
            let targets: Vec<usize> = if advance {
                self.nba.successors(a, e.letter).collect()
            } else {
                vec![a]
            };
            for b in targets {
                let t = self.intern((e.next, b, c2));
                let label = self.labels.len();
                self.labels.push((e.witness.clone(), e.moved));
                out.push((t, label));
            }
        }
        self.sys_cache.insert(s, edges);
        if self.sys_cache.len() > 4096 {
            self.sys_cache.clear();
        }
        self.succ[id] = Some(out.clone());
        out
    }
}

/// Searches the product for a reachable accepting cycle. Returns the lasso
/// as a sequence of system states with the witness taken from each state.
pub fn find_accepting_lasso<S: Structure>(
    sys: &S,
    nba: &Nba,
    opts: ProductOptions,
) -> Option<Lasso<S::Witness>> {
    if nba.initial.is_empty() {
        return None;
    }
    let mut p = Product {
        sys,
        nba,
        opts,
        ids: HashMap::new(),
        nodes: Vec::new(),
        succ: Vec::new(),
        labels: Vec::new(),
        sys_cache: HashMap::new(),
    };
    let roots: Vec<usize> = sys
        .initial()
        .into_iter()
        .flat_map(|s| nba.initial.iter().map(move |&a| (s, a, 0)))
        .collect::<Vec<_>>()
        .into_iter()
        .map(|n| p.intern(n))
        .collect();

    // colors: 0 white, 1 cyan (on outer stack), 2 blue (done), red separately
    let mut color: Vec<u8> = Vec::new();
    let mut red: Vec<bool> = Vec::new();
    let grow = |v: &mut Vec<u8>, r: &mut Vec<bool>, n: usize| {
        if v.len() < n {
            v.resize(n, 0);
            r.resize(n, false);
        }
    };
    for root in roots {
        grow(&mut color, &mut red, p.nodes.len());
        if color[root] != 0 {
            continue;
        }
        // outer stack entries: (node, successor list, next index, label used to enter)
        let mut outer: Vec<(usize, Vec<(usize, usize)>, usize, usize)> = Vec::new();
        let s = p.successors(root);
        grow(&mut color, &mut red, p.nodes.len());
        color[root] = 1;
        outer.push((root, s, 0, usize::MAX));
        while let Some(top) = outer.last_mut() {
            if top.2 < top.1.len() {
                let (t, label) = top.1[top.2];
                top.2 += 1;
                grow(&mut color, &mut red, p.nodes.len());
                if color[t] == 0 {
                    let s = p.successors(t);
                    grow(&mut color, &mut red, p.nodes.len());
                    color[t] = 1;
                    outer.push((t, s, 0, label));
                }
                continue;
            }
            let v = top.0;
            if p.accepting(v) {
                if let Some(inner_path) = inner_dfs(&mut p, v, &mut color, &mut red) {
                    return Some(build_lasso(&p, &outer, inner_path));
                }
            }
            color[v] = 2;
            outer.pop();
        }
    }
    None
}

/// Red search from `seed`; returns the edges (target, label) from `seed` up
/// to a node on the outer stack.
fn inner_dfs<S: Structure>(
    p: &mut Product<'_, S>,
    seed: usize,
    color: &mut Vec<u8>,
    red: &mut Vec<bool>,
) -> Option<Vec<(usize, usize)>> {
    let mut stack: Vec<(usize, Vec<(usize, usize)>, usize)> = Vec::new();
    let mut path: Vec<(usize, usize)> = Vec::new();
    let s = p.successors(seed);
    stack.push((seed, s, 0));
    while let Some(top) = stack.last_mut() {
        if top.2 < top.1.len() {
            let (t, label) = top.1[top.2];
            top.2 += 1;
            if color.len() < p.nodes.len() {
                color.resize(p.nodes.len(), 0);
                red.resize(p.nodes.len(), false);
            }
            if color[t] == 1 {
                path.push((t, label));
                return Some(path);
            }
            if !red[t] {
                red[t] = true;
                let s = p.successors(t);
                path.push((t, label));
                stack.push((t, s, 0));
            }
            continue;
        }
        stack.pop();
        path.pop();
    }
    None
}

fn build_lasso<S: Structure>(
    p: &Product<'_, S>,
    outer: &[(usize, Vec<(usize, usize)>, usize, usize)],
    inner: Vec<(usize, usize)>,
) -> Lasso<S::Witness> {
    // outer[k].3 is the label of the edge into outer[k].0
    let close = inner.last().expect("nonempty inner path").0;
    let pos = outer
        .iter()
        .position(|e| e.0 == close)
        .expect("cycle closes on the outer stack");
    // nodes in order: outer[0..], then inner targets except the closing one
    let mut nodes: Vec<usize> = outer.iter().map(|e| e.0).collect();
    let mut into: Vec<usize> = outer.iter().map(|e| e.3).collect();
    for &(t, label) in &inner {
        nodes.push(t);
        into.push(label);
    }
    // nodes.last() == close == nodes[pos]; step k leaves nodes[k] via into[k+1]
    let len = nodes.len() - 1;
    let steps = (0..len)
        .map(|k| {
            let (w, moved) = p.labels[into[k + 1]].clone();
            LassoStep {
                state: p.nodes[nodes[k]].0,
                witness: w,
                moved,
            }
        })
        .collect();
    Lasso {
        steps,
        loop_start: pos,
    }
}
