use std::fmt::Write as _;

use super::guard::Guard;
use crate::graph;
use crate::ltl::Atom;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub guard: Guard,
    pub to: usize,
}

/// Nondeterministic Büchi automaton with state-based acceptance. Letters are
/// bitmasks over `atoms`; the letter at time `t` is read on the edge from the
/// state at `t` to the state at `t+1`.
#[derive(Debug, Clone)]
pub struct Nba {
    pub atoms: Vec<Atom>,
    pub initial: Vec<usize>,
    pub accepting: Vec<bool>,
    pub edges: Vec<Vec<Edge>>,
    /// Human-readable state descriptions, for export only.
    pub names: Vec<String>,
}

impl Nba {
    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// Automaton with the empty language.
    pub fn empty(atoms: Vec<Atom>) -> Nba {
        Nba {
            atoms,
            initial: vec![],
            accepting: vec![],
            edges: vec![],
            names: vec![],
        }
    }

    pub fn successors(&self, state: usize, letter: u64) -> impl Iterator<Item = usize> + '_ {
        self.edges[state]
            .iter()
            .filter(move |e| e.guard.eval(letter))
            .map(|e| e.to)
    }

    /// Whether `stem . cycle^w` is accepted. Panics on an empty cycle.
    pub fn accepts(&self, stem: &[u64], cycle: &[u64]) -> bool {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        let n = self.num_states();
        let letters: Vec<u64> = stem.iter().chain(cycle).copied().collect();
        let len = letters.len();
        let succ_pos = |p: usize| if p + 1 < len { p + 1 } else { stem.len() };
        let mut adj = vec![Vec::new(); len * n];
        let mut acc = vec![false; len * n];
        for p in 0..len {
            for s in 0..n {
                let node = p * n + s;
                acc[node] = self.accepting[s];
                let np = succ_pos(p);
                adj[node] = self.successors(s, letters[p]).map(|t| np * n + t).collect();
            }
        }
        let roots: Vec<usize> = self.initial.clone();
        graph::has_accepting_cycle(&adj, &roots, &acc)
    }

    /// Line-based text dump.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let atoms: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(out, "atoms: {}", atoms.join(" "));
        let _ = writeln!(out, "states: {}", self.num_states());
        let list = |v: Vec<usize>| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(out, "initial: {}", list(self.initial.clone()));
        let acc: Vec<usize> = (0..self.num_states()).filter(|&s| self.accepting[s]).collect();
        let _ = writeln!(out, "accepting: {}", list(acc));
        for (s, es) in self.edges.iter().enumerate() {
            for e in es {
                let _ = writeln!(out, "{s} -> {} : {}", e.to, e.guard.display(&self.atoms));
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph nba {\n  rankdir=LR;\n");
        for s in 0..self.num_states() {
            let shape = if self.accepting[s] { "doublecircle" } else { "circle" };
            let label = self.names.get(s).cloned().unwrap_or_default().replace('"', "\\\"");
            let _ = writeln!(
                out,
                "  s{s} [shape={shape}, label=\"{s}\", tooltip=\"{label}\"];"
            );
        }
        for (k, &i) in self.initial.iter().enumerate() {
            let _ = writeln!(out, "  init{k} [shape=point];\n  init{k} -> s{i};");
        }
        for (s, es) in self.edges.iter().enumerate() {
            for e in es {
                let g = e.guard.display(&self.atoms).to_string().replace('"', "\\\"");
                let _ = writeln!(out, "  s{s} -> s{} [label=\"{g}\"];", e.to);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Free-function form of [`Nba::accepts`].
pub fn nba_accepts(a: &Nba, stem: &[u64], cycle: &[u64]) -> bool {
    a.accepts(stem, cycle)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g_p() -> Nba {
        Nba {
            atoms: vec![Atom::global("p")],
            initial: vec![0],
            accepting: vec![true],
            edges: vec![vec![Edge {
                guard: Guard::lit(0, true),
                to: 0,
            }]],
            names: vec!["G p".into()],
        }
    }

    #[test]
    fn hand_built_automaton() {
        let a = g_p();
        assert!(a.accepts(&[], &[1]));
        assert!(!a.accepts(&[1], &[0]));
        assert!(!Nba::empty(vec![]).accepts(&[0], &[0]));
    }

    #[test]
    fn exports_mention_all_edges() {
        let a = g_p();
        assert!(a.to_text().contains("0 -> 0 : p"));
        assert!(a.to_dot().contains("doublecircle"));
    }
}
