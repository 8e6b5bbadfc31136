//! Backtracking search over `delta` and `out` cells. Ranks are not searched:
//! a partial candidate is rejected as soon as its reachable product with the
//! automaton has an accepting cycle, and ranks of a complete candidate are
//! longest-path values over that product.

use std::time::Instant;

use super::{Assignment, SolveError, SolverOutcome, SolverStatus};
use crate::automata::Guard;
use crate::graph;
use crate::synth::{Constraint, ConstraintSystem, Pin};

#[derive(Debug, Clone, Copy)]
pub struct BuiltinOptions {
    /// Search nodes before giving up with an unknown result.
    pub node_limit: u64,
    /// Largest accepted `bound * letters`.
    pub cell_cap: usize,
}

impl Default for BuiltinOptions {
    fn default() -> Self {
        BuiltinOptions {
            node_limit: 20_000_000,
            cell_cap: 256,
        }
    }
}

struct OutOfBudget;

struct Search<'a> {
    n: usize,
    letters: usize,
    na: usize,
    m: usize,
    accepting: &'a [bool],
    /// `[q][i][a]`: automaton successors `b` with their output guard.
    rank_at: Vec<Vec<Vec<Vec<(usize, Guard)>>>>,
    steps: Vec<Vec<Vec<Guard>>>,
    out_opts: Vec<Vec<u64>>,
    delta_pin: Vec<Vec<Option<usize>>>,
    roots: Vec<usize>,
    /// States from here on are interchangeable and unpinned.
    free_start: usize,
    tok: usize,
    rcv: u64,
    out: Vec<Option<u64>>,
    delta: Vec<Vec<Option<usize>>>,
    refs: Vec<usize>,
    nodes: u64,
    limit: u64,
}

struct Explored {
    bad: bool,
    need_out: Option<usize>,
    cell: Option<(usize, usize)>,
}

impl<'a> Search<'a> {
    fn new(cs: &'a ConstraintSystem, limit: u64) -> Self {
        let n = cs.bound;
        let letters = cs.num_letters() as usize;
        let na = cs.nba.num_states();
        let m = cs.num_outputs();
        let mut rank_at = vec![vec![vec![Vec::new(); na]; letters]; n];
        let mut steps = vec![vec![Vec::new(); letters]; n];
        let mut states: Vec<Vec<Guard>> = vec![Vec::new(); n];
        let mut roots = Vec::new();
        for c in &cs.constraints {
            match c {
                Constraint::Reach { a, q } => roots.push(a * n + q),
                Constraint::Rank { q, i, a, b, guard, .. } => {
                    rank_at[*q][*i as usize][*a].push((*b, guard.clone()))
                }
                Constraint::Step { q, i, guard } => steps[*q][*i as usize].push(guard.clone()),
                Constraint::State { q, guard } => states[*q].push(guard.clone()),
            }
        }
        let mut delta_pin = vec![vec![None; letters]; n];
        let mut out_mask = vec![(0u64, 0u64); n];
        let mut pinned_delta = vec![false; n];
        for p in &cs.pins {
            match *p {
                Pin::Delta { q, i, to } => {
                    delta_pin[q][i as usize] = Some(to);
                    pinned_delta[q] = true;
                    pinned_delta[to] = true;
                }
                Pin::Out { q, bit, value } => {
                    out_mask[q].0 |= 1 << bit;
                    if value {
                        out_mask[q].1 |= 1 << bit;
                    }
                }
            }
        }
        let out_opts = (0..n)
            .map(|q| {
                (0..1u64 << m)
                    .filter(|&o| o & out_mask[q].0 == out_mask[q].1)
                    .filter(|&o| states[q].iter().all(|g| g.eval(o)))
                    .collect()
            })
            .collect();
        let mut free_start = n;
        while free_start > 2
            && !pinned_delta[free_start - 1]
            && out_mask[free_start - 1] == out_mask[n - 1]
            && states[free_start - 1] == states[n - 1]
        {
            free_start -= 1;
        }
        roots.sort_unstable();
        roots.dedup();
        Search {
            n,
            letters,
            na,
            m,
            accepting: &cs.nba.accepting,
            rank_at,
            steps,
            out_opts,
            delta_pin,
            roots,
            free_start,
            tok: cs.tok_bit(),
            rcv: cs.rcv_mask(),
            out: vec![None; n],
            delta: vec![vec![None; letters]; n],
            refs: vec![0; n],
            nodes: 0,
            limit,
        }
    }

    fn node_accepting(&self, id: usize) -> bool {
        self.accepting[id / self.n]
    }

    /// Reachable product graph under the current partial assignment.
    fn product(&self) -> (Vec<Vec<usize>>, Vec<usize>, Explored) {
        let size = self.na * self.n;
        let mut adj = vec![Vec::new(); size];
        let mut seen = vec![false; size];
        let mut queue: Vec<usize> = Vec::new();
        for &r in &self.roots {
            if !seen[r] {
                seen[r] = true;
                queue.push(r);
            }
        }
        let mut ex = Explored {
            bad: false,
            need_out: None,
            cell: None,
        };
        let mut head = 0;
        while head < queue.len() {
            let id = queue[head];
            head += 1;
            let (a, q) = (id / self.n, id % self.n);
            let Some(o) = self.out[q] else {
                ex.need_out.get_or_insert(q);
                continue;
            };
            for i in 0..self.letters {
                for (b, g) in &self.rank_at[q][i][a] {
                    if !g.eval(o) {
                        continue;
                    }
                    match self.delta[q][i] {
                        Some(t) => {
                            let to = b * self.n + t;
                            adj[id].push(to);
                            if !seen[to] {
                                seen[to] = true;
                                queue.push(to);
                            }
                        }
                        None => {
                            ex.cell.get_or_insert((q, i));
                        }
                    }
                }
            }
        }
        ex.bad = graph::has_accepting_cycle(&adj, &self.roots, &self.acc_vec());
        (adj, queue, ex)
    }

    fn acc_vec(&self) -> Vec<bool> {
        (0..self.na * self.n).map(|id| self.node_accepting(id)).collect()
    }

    fn step_ok(&self, q: usize, i: usize, oq: u64, ot: u64) -> bool {
        self.steps[q][i].iter().all(|g| g.eval(oq | ot << self.m))
    }

    /// Assigned cells touching `q` stay consistent if `out(q) = o`.
    fn out_consistent(&self, q: usize, o: u64) -> bool {
        let val = |s: usize| if s == q { Some(o) } else { self.out[s] };
        for p in 0..self.n {
            for i in 0..self.letters {
                let Some(t) = self.delta[p][i] else { continue };
                if p != q && t != q {
                    continue;
                }
                if let (Some(op), Some(ot)) = (val(p), val(t)) {
                    if !self.step_ok(p, i, op, ot) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn used(&self, t: usize) -> bool {
        self.out[t].is_some() || self.refs[t] > 0
    }

    fn candidates(&self, q: usize, i: usize) -> Vec<usize> {
        if let Some(t) = self.delta_pin[q][i] {
            return vec![t];
        }
        let tok = self.out[q].is_some_and(|o| o >> self.tok & 1 == 1);
        if tok && i as u64 & self.rcv != 0 {
            return vec![q];
        }
        let mut out: Vec<usize> = (0..self.n)
            .filter(|&t| t < self.free_start || self.used(t))
            .collect();
        if let Some(f) = (self.free_start..self.n).find(|&t| !self.used(t)) {
            out.push(f);
        }
        out
    }

    fn branch_out(&mut self, q: usize) -> Result<bool, OutOfBudget> {
        for k in 0..self.out_opts[q].len() {
            let o = self.out_opts[q][k];
            if !self.out_consistent(q, o) {
                continue;
            }
            self.out[q] = Some(o);
            if self.search()? {
                return Ok(true);
            }
            self.out[q] = None;
        }
        Ok(false)
    }

    fn search(&mut self) -> Result<bool, OutOfBudget> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(OutOfBudget);
        }
        let (_, _, ex) = self.product();
        if ex.bad {
            return Ok(false);
        }
        if let Some(q) = ex.need_out {
            return self.branch_out(q);
        }
        let cell = ex.cell.or_else(|| {
            (0..self.n)
                .filter(|&q| self.out[q].is_some())
                .find_map(|q| (0..self.letters).find(|&i| self.delta[q][i].is_none()).map(|i| (q, i)))
        });
        let Some((q, i)) = cell else {
            return match (0..self.n).find(|&t| self.out[t].is_none()) {
                Some(t) => self.branch_out(t),
                None => Ok(true),
            };
        };
        let oq = self.out[q].expect("cell of a state with outputs");
        for t in self.candidates(q, i) {
            if let Some(ot) = if t == q { Some(oq) } else { self.out[t] } {
                if !self.step_ok(q, i, oq, ot) {
                    continue;
                }
            }
            self.delta[q][i] = Some(t);
            self.refs[t] += 1;
            if self.search()? {
                return Ok(true);
            }
            self.refs[t] -= 1;
            self.delta[q][i] = None;
        }
        Ok(false)
    }

    /// Longest-path ranks over the reachable product; `-1` elsewhere.
    fn ranks(&self) -> Vec<Vec<i64>> {
        let (adj, reached, _) = self.product();
        let (comp, ncomp) = graph::scc(&adj, &self.roots);
        let mut val = vec![0i64; ncomp];
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
        for &v in &reached {
            members[comp[v]].push(v);
        }
        // Tarjan numbers sinks first, so descending ids are topological
        for c in (0..ncomp).rev() {
            for &u in &members[c] {
                for &v in &adj[u] {
                    if comp[v] != c {
                        let cand = val[c] + self.node_accepting(v) as i64;
                        val[comp[v]] = val[comp[v]].max(cand);
                    }
                }
            }
        }
        let mut rank = vec![vec![-1i64; self.n]; self.na];
        for &v in &reached {
            rank[v / self.n][v % self.n] = val[comp[v]];
        }
        rank
    }
}

/// Complete search for an assignment within the finite domain.
pub fn solve_builtin(cs: &ConstraintSystem, opts: BuiltinOptions) -> Result<SolverOutcome, SolveError> {
    let cells = cs.bound * cs.num_letters() as usize;
    if cells > opts.cell_cap {
        return Err(SolveError::TooLarge {
            cells,
            cap: opts.cell_cap,
        });
    }
    let start = Instant::now();
    let mut s = Search::new(cs, opts.node_limit);
    let status = match s.search() {
        Err(OutOfBudget) => SolverStatus::Unknown(format!("node limit {} reached", opts.node_limit)),
        Ok(false) => SolverStatus::Unsat,
        Ok(true) => SolverStatus::Sat(Assignment {
            delta: s
                .delta
                .iter()
                .map(|r| r.iter().map(|t| t.expect("complete assignment")).collect())
                .collect(),
            out: s.out.iter().map(|o| o.expect("complete assignment")).collect(),
            rank: s.ranks(),
        }),
    };
    Ok(SolverOutcome {
        status,
        millis: start.elapsed().as_millis(),
        backend: "builtin".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{hub_reduce, parse_spec};
    use crate::solve::check_assignment;
    use crate::synth::encode;

    fn cs(gua: &str, bound: usize) -> ConstraintSystem {
        let text = format!("[INPUTS]\nlocal: r, rcv\n[OUTPUTS]\ng, tok, snd\n[GUARANTEE]\n{gua}\n");
        encode(&hub_reduce(&parse_spec(&text).unwrap()).unwrap(), bound).unwrap()
    }

    #[test]
    fn always_grant() {
        let c = cs("G g_i", 2);
        let out = solve_builtin(&c, BuiltinOptions::default()).unwrap();
        let SolverStatus::Sat(asg) = out.status else {
            panic!("expected sat")
        };
        check_assignment(&c, &asg).unwrap();
        let g = c.output_bit("g").unwrap();
        assert!(asg.out.iter().all(|o| o >> g & 1 == 1));
    }

    #[test]
    fn contradiction_unsat() {
        let c = cs("G g_i & G !g_i", 3);
        let out = solve_builtin(&c, BuiltinOptions::default()).unwrap();
        assert_eq!(out.status, SolverStatus::Unsat);
    }

    #[test]
    fn cap_enforced() {
        let c = cs("G g_i", 2);
        let opts = BuiltinOptions {
            cell_cap: 4,
            ..Default::default()
        };
        assert!(matches!(solve_builtin(&c, opts), Err(SolveError::TooLarge { .. })));
    }

    #[test]
    fn budget_gives_unknown() {
        let c = cs("G(r_i -> F g_i)", 3);
        let opts = BuiltinOptions {
            node_limit: 1,
            ..Default::default()
        };
        assert!(matches!(solve_builtin(&c, opts).unwrap().status, SolverStatus::Unknown(_)));
    }
}
