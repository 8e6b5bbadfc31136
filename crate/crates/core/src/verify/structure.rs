//! System structures the product search runs on: composed rings and the
//! single process under the hub environment.

use std::collections::HashSet;

use super::product::{Structure, SysEdge};
use crate::automata::Guard;
use crate::ltl::{Atom, IndexTag, RCV};
use crate::machine::{ProcessTemplate, RingSystem, SysInput};

/// Where the value of an automaton atom comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Output { vertex: usize, bit: usize },
    Token { vertex: usize },
    Input { vertex: usize, bit: usize },
    Global { bit: usize },
    False,
}

/// Input filter: a guard over the automaton-independent atom list `atoms`.
#[derive(Debug, Clone)]
pub struct Filter {
    pub atoms: Vec<Atom>,
    pub guard: Guard,
}

pub struct RingStructure<'a> {
    pub ring: &'a RingSystem,
    sources: Vec<Source>,
    filters: Vec<(Vec<Source>, Guard, Option<usize>)>,
}

fn ring_source(ring: &RingSystem, a: &Atom) -> Source {
    match a.index {
        IndexTag::Concrete(v) if v < ring.n => {
            let t = &ring.templates[v];
            if a.name == crate::ltl::TOK {
                Source::Token { vertex: v }
            } else if let Some(b) = t.output_bit(&a.name) {
                Source::Output { vertex: v, bit: b }
            } else if let Some(b) = t.input_bit(&a.name) {
                Source::Input { vertex: v, bit: b }
            } else {
                Source::False
            }
        }
        IndexTag::Global => match ring.global_inputs.iter().position(|g| *g == a.name) {
            Some(b) => Source::Global { bit: b },
            None => Source::False,
        },
        _ => Source::False,
    }
}

fn eval_sources(ring: &RingSystem, sources: &[Source], s: &[usize], input: &SysInput) -> u64 {
    let mut letter = 0;
    for (k, src) in sources.iter().enumerate() {
        let v = match *src {
            Source::Output { vertex, bit } => ring.templates[vertex].labels[s[vertex]] >> bit & 1 == 1,
            Source::Token { vertex } => ring.templates[vertex].token[s[vertex]],
            Source::Input { vertex, bit } => ring.vertex_input(vertex, input) >> bit & 1 == 1,
            Source::Global { bit } => input.global >> bit & 1 == 1,
            Source::False => false,
        };
        if v {
            letter |= 1 << k;
        }
    }
    letter
}

fn vertex_of(sources: &[Source]) -> Option<usize> {
    sources.iter().find_map(|s| match *s {
        Source::Output { vertex, .. } | Source::Token { vertex } | Source::Input { vertex, .. } => {
            Some(vertex)
        }
        _ => None,
    })
}

impl<'a> RingStructure<'a> {
    /// `atoms` are the automaton's atoms; `filters` restrict inputs and are
    /// checked for a vertex only on steps where that vertex moves.
    pub fn new(ring: &'a RingSystem, atoms: &[Atom], filters: &[Filter]) -> Self {
        RingStructure {
            ring,
            sources: atoms.iter().map(|a| ring_source(ring, a)).collect(),
            filters: filters
                .iter()
                .map(|f| {
                    let src: Vec<Source> = f.atoms.iter().map(|a| ring_source(ring, a)).collect();
                    let v = vertex_of(&src);
                    (src, f.guard.clone(), v)
                })
                .collect(),
        }
    }

    fn relevant_local(&self, v: usize) -> u64 {
        self.sources
            .iter()
            .filter_map(|s| match *s {
                Source::Input { vertex, bit } if vertex == v => Some(1u64 << bit),
                _ => None,
            })
            .sum()
    }

    fn admissible(&self, s: &[usize], input: &SysInput, moved: u64) -> bool {
        self.filters.iter().all(|(src, g, v)| {
            if let Some(v) = v {
                if moved >> v & 1 == 0 {
                    return true;
                }
            }
            g.eval(eval_sources(self.ring, src, s, input))
        })
    }
}

impl Structure for RingStructure<'_> {
    type Witness = SysInput;

    fn initial(&self) -> Vec<usize> {
        self.ring
            .initial_states()
            .iter()
            .map(|s| self.ring.encode_state(s))
            .collect()
    }

    /// Inputs that differ only in bits the automaton cannot see and lead to
    /// the same successor are collapsed into one edge.
    fn edges(&self, id: usize) -> Vec<SysEdge<SysInput>> {
        let ring = self.ring;
        let s = ring.decode_state(id);
        let nglob = ring.global_inputs.len();
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for m in ring.moves(&s) {
            let recv = ring.receiver(&m);
            let scheduled: Vec<usize> = (0..ring.n).filter(|&v| m.moved >> v & 1 == 1).collect();
            for g in 0..(1u64 << nglob) {
                // per scheduled vertex: distinct (visible bits, target) with a witness input
                let mut options: Vec<Vec<(u64, usize)>> = Vec::new();
                let mut dead = false;
                for &v in &scheduled {
                    let t = &ring.templates[v];
                    let rcv_bit = t.input_bit(RCV);
                    let free: Vec<usize> = (0..t.local_inputs.len())
                        .filter(|&b| Some(b) != rcv_bit)
                        .collect();
                    let fixed = if recv == Some(v) { t.rcv_mask() } else { 0 };
                    let visible = self.relevant_local(v);
                    let mut opts: Vec<(u64, usize)> = Vec::new();
                    let mut keys = HashSet::new();
                    for bits in 0..(1u64 << free.len()) {
                        let mut local = fixed;
                        for (k, &b) in free.iter().enumerate() {
                            if bits >> k & 1 == 1 {
                                local |= 1 << b;
                            }
                        }
                        let mut probe = SysInput {
                            local: vec![0; ring.n],
                            global: g,
                        };
                        probe.local[v] = local;
                        if !self.filters.iter().all(|(src, gd, fv)| {
                            *fv != Some(v) || gd.eval(eval_sources(ring, src, &s, &probe))
                        }) {
                            continue;
                        }
                        let Some(q2) = t.step(s[v], ring.vertex_input(v, &probe)) else {
                            continue;
                        };
                        if keys.insert((local & visible, q2)) {
                            opts.push((local, q2));
                        }
                    }
                    if opts.is_empty() {
                        dead = true;
                        break;
                    }
                    options.push(opts);
                }
                if dead {
                    continue;
                }
                // cartesian product over scheduled vertices
                let mut idx = vec![0usize; scheduled.len()];
                loop {
                    let mut input = SysInput {
                        local: vec![0; ring.n],
                        global: g,
                    };
                    let mut next = s.clone();
                    for (k, &v) in scheduled.iter().enumerate() {
                        let (local, q2) = options[k][idx[k]];
                        input.local[v] = local;
                        next[v] = q2;
                    }
                    if self.admissible(&s, &input, m.moved) {
                        let letter = eval_sources(ring, &self.sources, &s, &input);
                        let nid = ring.encode_state(&next);
                        if seen.insert((letter, m.moved, nid)) {
                            out.push(SysEdge {
                                letter,
                                moved: m.moved,
                                next: nid,
                                witness: input,
                            });
                        }
                    }
                    let mut k = 0;
                    while k < idx.len() {
                        idx[k] += 1;
                        if idx[k] < options[k].len() {
                            break;
                        }
                        idx[k] = 0;
                        k += 1;
                    }
                    if k == idx.len() {
                        break;
                    }
                }
            }
        }
        out
    }
}

/// One process whose environment is the rest of the ring: it delivers `rcv`
/// only while the process lacks the token. Atoms are read with the global tag.
pub struct HubStructure<'a> {
    pub template: &'a ProcessTemplate,
    atom_bits: Vec<(bool, Option<usize>, bool)>,
    filters: Vec<(Vec<(bool, Option<usize>, bool)>, Guard)>,
}

/// (is_output, bit, is_tok) for an atom read against the template.
fn hub_source(t: &ProcessTemplate, a: &Atom) -> (bool, Option<usize>, bool) {
    if a.name == crate::ltl::TOK {
        return (true, None, true);
    }
    if let Some(b) = t.output_bit(&a.name) {
        return (true, Some(b), false);
    }
    (false, t.input_bit(&a.name), false)
}

fn hub_letter(t: &ProcessTemplate, src: &[(bool, Option<usize>, bool)], q: usize, i: u64) -> u64 {
    let mut letter = 0;
    for (k, &(is_out, bit, is_tok)) in src.iter().enumerate() {
        let v = if is_tok {
            t.token[q]
        } else {
            match (is_out, bit) {
                (true, Some(b)) => t.labels[q] >> b & 1 == 1,
                (false, Some(b)) => i >> b & 1 == 1,
                _ => false,
            }
        };
        if v {
            letter |= 1 << k;
        }
    }
    letter
}

impl<'a> HubStructure<'a> {
    pub fn new(template: &'a ProcessTemplate, atoms: &[Atom], filters: &[Filter]) -> Self {
        HubStructure {
            template,
            atom_bits: atoms.iter().map(|a| hub_source(template, a)).collect(),
            filters: filters
                .iter()
                .map(|f| {
                    (
                        f.atoms.iter().map(|a| hub_source(template, a)).collect(),
                        f.guard.clone(),
                    )
                })
                .collect(),
        }
    }
}

impl Structure for HubStructure<'_> {
    type Witness = u64;

    fn initial(&self) -> Vec<usize> {
        vec![self.template.init_token, self.template.init_no_token]
    }

    fn edges(&self, q: usize) -> Vec<SysEdge<u64>> {
        let t = self.template;
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for i in 0..t.num_letters() {
            if t.token[q] && i & t.rcv_mask() != 0 {
                continue;
            }
            if !self
                .filters
                .iter()
                .all(|(src, g)| g.eval(hub_letter(t, src, q, i)))
            {
                continue;
            }
            let Some(next) = t.step(q, i) else { continue };
            let letter = hub_letter(t, &self.atom_bits, q, i);
            if seen.insert((letter, next)) {
                out.push(SysEdge {
                    letter,
                    moved: 1,
                    next,
                    witness: i,
                });
            }
        }
        out
    }
}
