use serde::{Deserialize, Serialize};

use super::template::ProcessTemplate;
use crate::ltl::{Atom, IndexTag, RCV};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Timing {
    Synchronous,
    Interleaving,
    FullyAsynchronous,
}

impl std::str::FromStr for Timing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sync" | "synchronous" => Ok(Timing::Synchronous),
            "interleaving" => Ok(Timing::Interleaving),
            "async" | "fully-async" => Ok(Timing::FullyAsynchronous),
            other => Err(format!("unknown timing '{other}'")),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RingError {
    #[error("ring needs at least 2 vertices, got {0}")]
    RingTooSmall(usize),
    #[error("expected {expected} templates, got {got}")]
    TemplateCount { expected: usize, got: usize },
    #[error("template for vertex {vertex} is not well formed: {message}")]
    Malformed { vertex: usize, message: String },
}

/// Which vertices move in a step and who passes the token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    /// Bitmask of scheduled vertices.
    pub moved: u64,
    /// Sender; the receiver is the next vertex on the ring.
    pub sender: Option<usize>,
}

/// Input to the whole ring: per-vertex local input bits (in each template's
/// local order, `rcv` included) and the shared global inputs (in the
/// system's global order).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SysInput {
    pub local: Vec<u64>,
    pub global: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub input: SysInput,
    pub moved: u64,
    pub target: Vec<usize>,
}

/// Token ring over `n` vertices; vertex `v` runs `templates[v]`.
#[derive(Debug, Clone)]
pub struct RingSystem {
    pub n: usize,
    pub timing: Timing,
    pub templates: Vec<ProcessTemplate>,
    /// Union of the templates' global inputs.
    pub global_inputs: Vec<String>,
    /// Per vertex: system global bit for each template global input.
    global_map: Vec<Vec<usize>>,
}

/// Builds a ring where vertex 0 may run `zero` and all others run `generic`.
pub fn compose_ring(
    generic: &ProcessTemplate,
    zero: Option<&ProcessTemplate>,
    n: usize,
    timing: Timing,
) -> Result<RingSystem, RingError> {
    let mut ts = vec![zero.unwrap_or(generic).clone()];
    ts.extend(std::iter::repeat(generic.clone()).take(n.saturating_sub(1)));
    RingSystem::new(ts, timing)
}

impl RingSystem {
    pub fn new(templates: Vec<ProcessTemplate>, timing: Timing) -> Result<Self, RingError> {
        let n = templates.len();
        if n < 2 {
            return Err(RingError::RingTooSmall(n));
        }
        if n > 63 {
            return Err(RingError::TemplateCount {
                expected: 63,
                got: n,
            });
        }
        for (v, t) in templates.iter().enumerate() {
            if let Some(x) = t.validate().first() {
                return Err(RingError::Malformed {
                    vertex: v,
                    message: x.to_string(),
                });
            }
        }
        let mut global_inputs: Vec<String> = Vec::new();
        for t in &templates {
            for g in &t.global_inputs {
                if !global_inputs.contains(g) {
                    global_inputs.push(g.clone());
                }
            }
        }
        let global_map = templates
            .iter()
            .map(|t| {
                t.global_inputs
                    .iter()
                    .map(|g| global_inputs.iter().position(|x| x == g).unwrap())
                    .collect()
            })
            .collect();
        Ok(RingSystem {
            n,
            timing,
            templates,
            global_inputs,
            global_map,
        })
    }

    pub fn successor_vertex(&self, v: usize) -> usize {
        (v + 1) % self.n
    }

    /// `S_0`: the token at one vertex, every other vertex in its non-token
    /// initial state.
    pub fn initial_states(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|holder| {
                (0..self.n)
                    .map(|v| {
                        let t = &self.templates[v];
                        if v == holder {
                            t.init_token
                        } else {
                            t.init_no_token
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn num_global_states(&self) -> usize {
        self.templates.iter().map(|t| t.num_states()).product()
    }

    pub fn encode_state(&self, s: &[usize]) -> usize {
        let mut id = 0;
        for v in (0..self.n).rev() {
            id = id * self.templates[v].num_states() + s[v];
        }
        id
    }

    pub fn decode_state(&self, mut id: usize) -> Vec<usize> {
        (0..self.n)
            .map(|v| {
                let k = self.templates[v].num_states();
                let q = id % k;
                id /= k;
                q
            })
            .collect()
    }

    pub fn token_holders(&self, s: &[usize]) -> Vec<usize> {
        (0..self.n)
            .filter(|&v| self.templates[v].token[s[v]])
            .collect()
    }

    /// Schedules allowed in global state `s`.
    pub fn moves(&self, s: &[usize]) -> Vec<Move> {
        let senders: Vec<usize> = (0..self.n)
            .filter(|&v| self.templates[v].sends(s[v]))
            .collect();
        let all = (1u64 << self.n) - 1;
        let mut out = Vec::new();
        match self.timing {
            Timing::Synchronous => match senders.as_slice() {
                [] => out.push(Move {
                    moved: all,
                    sender: None,
                }),
                [v] => out.push(Move {
                    moved: all,
                    sender: Some(*v),
                }),
                _ => {}
            },
            Timing::Interleaving => {
                for v in 0..self.n {
                    if !senders.contains(&v) {
                        out.push(Move {
                            moved: 1 << v,
                            sender: None,
                        });
                    }
                }
                if let [v] = senders.as_slice() {
                    out.push(Move {
                        moved: 1 << v | 1 << self.successor_vertex(*v),
                        sender: Some(*v),
                    });
                }
            }
            Timing::FullyAsynchronous => {
                let sender_mask: u64 = senders.iter().map(|v| 1u64 << v).sum();
                for m in 1..=all {
                    if m & sender_mask == 0 {
                        out.push(Move {
                            moved: m,
                            sender: None,
                        });
                    }
                }
                if let [v] = senders.as_slice() {
                    let pair = 1u64 << v | 1 << self.successor_vertex(*v);
                    for m in 1..=all {
                        if m & pair == pair {
                            out.push(Move {
                                moved: m,
                                sender: Some(*v),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Template-order input of vertex `v`: its local bits and the globals.
    pub fn vertex_input(&self, v: usize, input: &SysInput) -> u64 {
        let t = &self.templates[v];
        let mut x = input.local[v];
        for (k, &g) in self.global_map[v].iter().enumerate() {
            if input.global >> g & 1 == 1 {
                x |= 1 << (t.local_inputs.len() + k);
            }
        }
        x
    }

    /// The receiver of a move, if any.
    pub fn receiver(&self, m: &Move) -> Option<usize> {
        m.sender.map(|v| self.successor_vertex(v))
    }

    /// Successor under a move and an input whose `rcv` bits agree with the
    /// move. `None` if some scheduled template has no transition.
    pub fn apply(&self, s: &[usize], m: &Move, input: &SysInput) -> Option<Vec<usize>> {
        let mut next = s.to_vec();
        for v in 0..self.n {
            if m.moved >> v & 1 == 1 {
                next[v] = self.templates[v].step(s[v], self.vertex_input(v, input))?;
            }
        }
        Some(next)
    }

    /// All transitions out of `s`, with every free input bit enumerated.
    /// Unscheduled vertices read the all-false local input. Exponential in
    /// the number of inputs; meant for small instances.
    pub fn transitions(&self, s: &[usize]) -> Vec<Transition> {
        let mut out = Vec::new();
        let nglob = self.global_inputs.len();
        for m in self.moves(s) {
            let recv = self.receiver(&m);
            let free: Vec<(usize, usize)> = (0..self.n)
                .filter(|&v| m.moved >> v & 1 == 1)
                .flat_map(|v| {
                    let rcv = self.templates[v].input_bit(RCV);
                    (0..self.templates[v].local_inputs.len())
                        .filter(move |&b| Some(b) != rcv)
                        .map(move |b| (v, b))
                })
                .collect();
            for g in 0..(1u64 << nglob) {
                for bits in 0..(1u64 << free.len()) {
                    let mut local = vec![0u64; self.n];
                    for (k, &(v, b)) in free.iter().enumerate() {
                        if bits >> k & 1 == 1 {
                            local[v] |= 1 << b;
                        }
                    }
                    if let Some(w) = recv {
                        local[w] |= self.templates[w].rcv_mask();
                    }
                    let input = SysInput { local, global: g };
                    if let Some(target) = self.apply(s, &m, &input) {
                        out.push(Transition {
                            input,
                            moved: m.moved,
                            target,
                        });
                    }
                }
            }
        }
        out
    }

    /// Global states reachable from `S_0`.
    pub fn reachable_states(&self) -> Vec<Vec<usize>> {
        let mut seen = std::collections::HashSet::new();
        let mut stack = self.initial_states();
        let mut out = Vec::new();
        while let Some(s) = stack.pop() {
            if !seen.insert(s.clone()) {
                continue;
            }
            for t in self.transitions(&s) {
                stack.push(t.target);
            }
            out.push(s);
        }
        out
    }

    /// Value of a concrete-indexed or global atom in state `s` under `input`.
    /// Output atoms read the state, input atoms read the input.
    pub fn atom_value(&self, a: &Atom, s: &[usize], input: &SysInput) -> bool {
        match a.index {
            IndexTag::Concrete(v) if v < self.n => {
                let t = &self.templates[v];
                if let Some(x) = t.output(s[v], &a.name) {
                    return x;
                }
                if let Some(b) = t.input_bit(&a.name) {
                    return self.vertex_input(v, input) >> b & 1 == 1;
                }
                false
            }
            IndexTag::Global => self
                .global_inputs
                .iter()
                .position(|g| *g == a.name)
                .is_some_and(|b| input.global >> b & 1 == 1),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::template::minimal_template;

    fn tiny() -> ProcessTemplate {
        minimal_template(&["r", "rcv"], &[], &["g", "snd"])
    }

    #[test]
    fn two_state_sync_ring_counts() {
        let r = compose_ring(&tiny(), None, 2, Timing::Synchronous).unwrap();
        assert_eq!(r.num_global_states(), 4);
        assert_eq!(r.initial_states(), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn token_passes_to_successor() {
        let r = compose_ring(&tiny(), None, 2, Timing::Synchronous).unwrap();
        let ts = r.transitions(&[1, 0]);
        // r free at both vertices, rcv forced at vertex 1
        assert_eq!(ts.len(), 4);
        for t in ts {
            assert_eq!(t.moved, 0b11);
            assert_eq!(t.target, vec![0, 1]);
            assert_eq!(t.input.local[1] & 0b10, 0b10);
            assert_eq!(t.input.local[0] & 0b10, 0);
        }
    }

    #[test]
    fn ring_of_one_rejected() {
        assert_eq!(
            compose_ring(&tiny(), None, 1, Timing::Synchronous).unwrap_err(),
            RingError::RingTooSmall(1)
        );
    }

    #[test]
    fn interleaving_moves() {
        let r = compose_ring(&tiny(), None, 3, Timing::Interleaving).unwrap();
        let ms = r.moves(&[1, 0, 0]);
        assert_eq!(ms.len(), 3);
        assert!(ms.contains(&Move {
            moved: 0b011,
            sender: Some(0)
        }));
    }
}
