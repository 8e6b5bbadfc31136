//! Bounded-synthesis constraint systems.
//!
//! Symbols: `delta(q, i)` in `[0, n)`, `out(q)` as a bitmask over
//! `outputs` (with `tok` and `snd` among them) and `rho(a, q)` in
//! `[-1, ceiling]`, where `rho(a, q) >= 0` marks the product pair as
//! reachable. State 0 is the initial state without the token, state 1 the
//! initial state with it.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::automata::{classify_gr1, ltl_to_nba, step_guard, Gr1Class, Guard, Nba};
use crate::ltl::{Atom, Clause, Formula, IndexTag, ParamSpec, Role, RCV, SND, TOK};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// `rho(a, q) >= 0`.
    Reach { a: usize, q: usize },
    /// `rho(a, q) >= 0 && out(q) |= guard  ->  rho(b, delta(q, i)) ▷ rho(a, q)`
    /// with `▷` strict when `b` is accepting. `guard` ranges over output bits.
    Rank {
        q: usize,
        i: u64,
        a: usize,
        b: usize,
        guard: Guard,
        strict: bool,
    },
    /// `guard` over `out(q)` (variables `0..m`) and `out(delta(q, i))`
    /// (variables `m..2m`) must hold.
    Step { q: usize, i: u64, guard: Guard },
    /// `guard` over `out(q)` must hold.
    State { q: usize, guard: Guard },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pin {
    Delta { q: usize, i: u64, to: usize },
    Out { q: usize, bit: usize, value: bool },
}

/// Formula parts the constraints are generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub assumptions: Vec<Clause>,
    pub fairness: Vec<Formula>,
    /// Token-ring obligations not already implied by template typing.
    pub token_ring: Vec<Formula>,
    pub guarantees: Vec<Clause>,
    /// Invariant bodies over inputs, applied as input filters.
    pub input_filters: Vec<Formula>,
    /// One-step safety bodies, applied as per-state constraints.
    pub safety: Vec<Formula>,
}

impl Problem {
    /// The formula the automaton is built from. Input filters stay in the
    /// premise as `G α` so the tableau can prune letters that violate them.
    pub fn automaton_formula(&self) -> Formula {
        let filters = self
            .input_filters
            .iter()
            .map(|a| Formula::globally(a.clone()));
        let ass = Formula::conjunction(
            self.assumptions
                .iter()
                .map(|c| c.formula.clone())
                .chain(filters),
        );
        let fair = Formula::conjunction(self.fairness.iter().cloned());
        let gua = Formula::conjunction(self.guarantees.iter().map(|c| c.formula.clone()));
        let tr = Formula::conjunction(self.token_ring.iter().cloned());
        Formula::and(
            Formula::implies(ass.clone(), tr),
            Formula::implies(Formula::and(ass, fair), gua),
        )
    }
}

#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub bound: usize,
    pub local_inputs: Vec<String>,
    pub global_inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub problem: Problem,
    /// Automaton for the negated automaton formula.
    pub nba: Nba,
    pub constraints: Vec<Constraint>,
    pub pins: Vec<Pin>,
}

fn g(name: &str) -> Formula {
    Formula::var(name, IndexTag::Global)
}

fn hub_assumption() -> Formula {
    Formula::globally(Formula::implies(g(TOK), Formula::not(g(RCV))))
}

/// Builds the constraint system for a hub-reduced spec and state bound.
pub fn encode(spec: &ParamSpec, bound: usize) -> Result<ConstraintSystem, SynthError> {
    if bound < 2 {
        return Err(SynthError::BoundTooSmall(bound));
    }
    if spec.role != Role::MonolithicAfterHub {
        return Err(SynthError::NotMonolithic);
    }
    if !spec.has_token_signals() {
        return Err(SynthError::MissingTokenSignals);
    }
    let hub = hub_assumption();
    // TR1 to TR3 follow from template typing; TR4 stays.
    let token_ring = spec
        .token_ring_guarantees()
        .into_iter()
        .filter(|c| c.label.as_deref() == Some("TR4"))
        .map(|c| c.formula)
        .collect();
    let problem = Problem {
        // the hub assumption holds by construction: token states never read rcv
        assumptions: spec
            .assumptions
            .iter()
            .filter(|c| c.formula != hub)
            .cloned()
            .collect(),
        fairness: spec.fairness.iter().map(|c| c.formula.clone()).collect(),
        token_ring,
        guarantees: spec.guarantees.clone(),
        input_filters: vec![],
        safety: vec![],
    };
    let mut outputs = spec.all_outputs();
    outputs.retain(|o| o != TOK && o != SND);
    outputs.push(TOK.to_string());
    outputs.push(SND.to_string());
    let mut cs = ConstraintSystem {
        bound,
        local_inputs: spec.local_inputs.clone(),
        global_inputs: spec.global_inputs.clone(),
        outputs,
        problem,
        nba: Nba::empty(vec![]),
        constraints: vec![],
        pins: vec![],
    };
    cs.rebuild();
    Ok(cs)
}

impl ConstraintSystem {
    pub fn inputs(&self) -> Vec<String> {
        self.local_inputs
            .iter()
            .chain(&self.global_inputs)
            .cloned()
            .collect()
    }

    pub fn num_letters(&self) -> u64 {
        1 << (self.local_inputs.len() + self.global_inputs.len())
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn output_bit(&self, name: &str) -> Option<usize> {
        self.outputs.iter().position(|o| o == name)
    }

    pub fn input_bit(&self, name: &str) -> Option<usize> {
        self.local_inputs
            .iter()
            .chain(&self.global_inputs)
            .position(|o| o == name)
    }

    pub fn tok_bit(&self) -> usize {
        self.output_bit(TOK).expect("tok output")
    }

    pub fn snd_bit(&self) -> usize {
        self.output_bit(SND).expect("snd output")
    }

    pub fn rcv_mask(&self) -> u64 {
        self.input_bit(RCV).map_or(0, |b| 1 << b)
    }

    /// Upper bound on ranking values: the number of product pairs.
    pub fn rank_ceiling(&self) -> i64 {
        (self.nba.num_states() * self.bound) as i64
    }

    /// Cells of `delta` the token state `q` never reads.
    pub fn dont_care(&self, tok: bool, i: u64) -> bool {
        tok && i & self.rcv_mask() != 0
    }

    pub fn letter_allowed(&self, i: u64) -> bool {
        let inputs: Vec<Atom> = self.inputs().iter().map(|s| Atom::global(s.as_str())).collect();
        self.problem.input_filters.iter().all(|alpha| {
            Guard::from_formula(alpha, &inputs).is_some_and(|gd| gd.eval(i))
        })
    }

    /// Regenerates the automaton and the constraints from `problem`.
    pub fn rebuild(&mut self) {
        let atoms: Vec<Atom> = self
            .inputs()
            .iter()
            .chain(&self.outputs)
            .map(|s| Atom::global(s.as_str()))
            .collect();
        self.nba = ltl_to_nba(&Formula::not(self.problem.automaton_formula()), &atoms);
        let n = self.bound;
        let m = self.num_outputs();
        let ni = self.local_inputs.len() + self.global_inputs.len();
        let tok = self.tok_bit();
        let snd = self.snd_bit();
        let rcv = self.rcv_mask();
        let mut cs = Vec::new();

        // template well-formedness
        cs.push(Constraint::State {
            q: 0,
            guard: Guard::lit(tok, false),
        });
        cs.push(Constraint::State {
            q: 1,
            guard: Guard::lit(tok, true),
        });
        for q in 0..n {
            cs.push(Constraint::State {
                q,
                guard: Guard::or(Guard::lit(snd, false), Guard::lit(tok, true)),
            });
        }
        let imp = |a: Guard, b: Guard| Guard::or(a.negate(), b);
        let typing_plain = Guard::and(
            Guard::and(
                imp(
                    Guard::and(Guard::lit(tok, true), Guard::lit(snd, true)),
                    Guard::lit(m + tok, false),
                ),
                imp(
                    Guard::and(Guard::lit(tok, true), Guard::lit(snd, false)),
                    Guard::lit(m + tok, true),
                ),
            ),
            imp(Guard::lit(tok, false), Guard::lit(m + tok, false)),
        );
        let typing_rcv = imp(Guard::lit(tok, false), Guard::lit(m + tok, true));
        for q in 0..n {
            for i in 0..self.num_letters() {
                let guard = if i & rcv != 0 {
                    typing_rcv.clone()
                } else {
                    typing_plain.clone()
                };
                cs.push(Constraint::Step { q, i, guard });
            }
        }

        for &a in &self.nba.initial {
            cs.push(Constraint::Reach { a, q: 0 });
            cs.push(Constraint::Reach { a, q: 1 });
        }

        // where each automaton atom comes from
        let in_mask: u64 = self
            .nba
            .atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| self.output_bit(&a.name).is_none())
            .map(|(k, _)| 1u64 << k)
            .sum();
        let to_out: Vec<usize> = self
            .nba
            .atoms
            .iter()
            .map(|a| self.output_bit(&a.name).unwrap_or(usize::MAX))
            .collect();
        let in_bits: Vec<Option<usize>> =
            self.nba.atoms.iter().map(|a| self.input_bit(&a.name)).collect();
        let allowed: Vec<u64> = (0..self.num_letters())
            .filter(|&i| self.letter_allowed(i))
            .collect();

        for &i in &allowed {
            let mut values = 0u64;
            for (k, b) in in_bits.iter().enumerate() {
                if b.is_some_and(|b| i >> b & 1 == 1) {
                    values |= 1 << k;
                }
            }
            let mut guards = Vec::new();
            for a in 0..self.nba.num_states() {
                for e in &self.nba.edges[a] {
                    let mut gd = e.guard.restrict(in_mask, values).map_vars(&|v| to_out[v]);
                    if i & rcv != 0 {
                        gd = Guard::and(gd, Guard::lit(tok, false));
                    }
                    if gd != Guard::False {
                        guards.push((a, e.to, gd));
                    }
                }
            }
            for q in 0..n {
                for (a, b, gd) in &guards {
                    cs.push(Constraint::Rank {
                        q,
                        i,
                        a: *a,
                        b: *b,
                        guard: gd.clone(),
                        strict: self.nba.accepting[*b],
                    });
                }
            }
        }

        // one-step safety: variables of step_guard are inputs, then outputs,
        // then the next-step copies
        let width = ni + m;
        for beta in &self.problem.safety {
            let Some(sg) = step_guard(beta, &atoms) else {
                continue;
            };
            let known: u64 = (0..ni).map(|k| 1u64 << k).sum::<u64>()
                | (0..ni).map(|k| 1u64 << (width + k)).sum::<u64>();
            for &i in &allowed {
                let vals = i | i << width;
                let mut gd = sg.restrict(known, vals).map_vars(&|v| {
                    if v < width {
                        v - ni
                    } else {
                        m + (v - width - ni)
                    }
                });
                if i & rcv != 0 {
                    gd = Guard::or(gd, Guard::lit(tok, true));
                }
                if gd == Guard::True {
                    continue;
                }
                for q in 0..n {
                    cs.push(Constraint::Step {
                        q,
                        i,
                        guard: gd.clone(),
                    });
                }
            }
        }
        self.constraints = cs;
    }

    /// Adds pins, dropping duplicates. Conflicting pins are an error.
    pub fn pin(&mut self, pins: impl IntoIterator<Item = Pin>) -> Result<(), SynthError> {
        let mut set: BTreeSet<Pin> = self.pins.iter().copied().collect();
        for p in pins {
            let clash = set.iter().any(|x| match (x, &p) {
                (Pin::Delta { q, i, to }, Pin::Delta { q: q2, i: i2, to: t2 }) => {
                    q == q2 && i == i2 && to != t2
                }
                (Pin::Out { q, bit, value }, Pin::Out { q: q2, bit: b2, value: v2 }) => {
                    q == q2 && bit == b2 && value != v2
                }
                _ => false,
            });
            if clash {
                return Err(SynthError::ConflictingPin(format!("{p:?}")));
            }
            set.insert(p);
        }
        self.pins = set.into_iter().collect();
        Ok(())
    }

    /// Conjuncts of the assumptions and guarantees with their GR(1) class.
    pub fn gr1_classes(&self) -> Vec<Gr1Class> {
        let inputs: BTreeSet<String> = self.inputs().into_iter().collect();
        self.problem
            .assumptions
            .iter()
            .chain(&self.problem.guarantees)
            .map(|c| classify_gr1(&c.formula, &inputs))
            .collect()
    }
}

/// Moves simple invariant assumptions into input filters and simple safety
/// guarantees into per-state constraints. `classes` lists the class of each
/// assumption followed by each guarantee, as returned by
/// [`ConstraintSystem::gr1_classes`].
pub fn apply_gr1_direct(cs: &ConstraintSystem, classes: &[Gr1Class]) -> ConstraintSystem {
    let mut out = cs.clone();
    let na = cs.problem.assumptions.len();
    let mut ass = Vec::new();
    let mut gua = Vec::new();
    for (k, c) in cs.problem.assumptions.iter().enumerate() {
        match classes.get(k) {
            Some(Gr1Class::SimpleAssumption(alpha)) => out.problem.input_filters.push(alpha.clone()),
            _ => ass.push(c.clone()),
        }
    }
    for (k, c) in cs.problem.guarantees.iter().enumerate() {
        match classes.get(na + k) {
            Some(Gr1Class::SimpleSafety(beta)) => out.problem.safety.push(beta.clone()),
            _ => gua.push(c.clone()),
        }
    }
    if ass.len() == cs.problem.assumptions.len() && gua.len() == cs.problem.guarantees.len() {
        return out;
    }
    out.problem.assumptions = ass;
    out.problem.guarantees = gua;
    out.rebuild();
    out
}

/// Fixes state 0 as the only state without the token.
pub fn hardcode_token(cs: &ConstraintSystem) -> ConstraintSystem {
    let mut out = cs.clone();
    let bit = cs.tok_bit();
    out.pin((0..cs.bound).map(|q| Pin::Out {
        q,
        bit,
        value: q != 0,
    }))
    .expect("token pins agree with the initial states");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{hub_reduce, parse_spec};

    fn mono(gua: &str) -> ParamSpec {
        let text = format!("[INPUTS]\nlocal: r, rcv\n[OUTPUTS]\ng, tok, snd\n[GUARANTEE]\n{gua}\n");
        hub_reduce(&parse_spec(&text).unwrap()).unwrap()
    }

    #[test]
    fn bound_checked() {
        assert!(matches!(encode(&mono("G g_i"), 1), Err(SynthError::BoundTooSmall(1))));
        let generic = parse_spec("[INPUTS]\nlocal: rcv\n[OUTPUTS]\ntok, snd\n").unwrap();
        assert!(matches!(encode(&generic, 2), Err(SynthError::NotMonolithic)));
    }

    #[test]
    fn accepting_edges_are_strict() {
        let cs = encode(&mono("G g_i"), 2).unwrap();
        let ranks: Vec<&Constraint> = cs
            .constraints
            .iter()
            .filter(|c| matches!(c, Constraint::Rank { .. }))
            .collect();
        assert!(!ranks.is_empty());
        for c in ranks {
            if let Constraint::Rank { b, strict, .. } = c {
                assert_eq!(*strict, cs.nba.accepting[*b]);
            }
        }
    }

    #[test]
    fn hardcode_is_idempotent() {
        let cs = encode(&mono("G g_i"), 3).unwrap();
        let once = hardcode_token(&cs);
        let twice = hardcode_token(&once);
        assert_eq!(once.pins, twice.pins);
        assert_eq!(once.pins.len(), 3);
        let bit = cs.tok_bit();
        assert!(once.pins.contains(&Pin::Out { q: 0, bit, value: false }));
        assert!(once.pins.contains(&Pin::Out { q: 2, bit, value: true }));
    }

    #[test]
    fn conflicting_pins_rejected() {
        let mut cs = encode(&mono("G g_i"), 2).unwrap();
        cs.pin([Pin::Delta { q: 0, i: 0, to: 1 }]).unwrap();
        assert!(cs.pin([Pin::Delta { q: 0, i: 0, to: 0 }]).is_err());
    }

    #[test]
    fn gr1_moves_simple_conjuncts() {
        let text = "[INPUTS]\nlocal: r, rcv\n[OUTPUTS]\ng, tok, snd\n[ASSUME]\nA: G !r_i\n\
                    [GUARANTEE]\nS: G(g_i -> tok_i)\nL: G(r_i -> F g_i)\n";
        let spec = hub_reduce(&parse_spec(text).unwrap()).unwrap();
        let cs = encode(&spec, 2).unwrap();
        let classes = cs.gr1_classes();
        assert!(matches!(classes[0], Gr1Class::SimpleAssumption(_)));
        assert!(matches!(classes[1], Gr1Class::SimpleSafety(_)));
        assert_eq!(classes[2], Gr1Class::General);
        let opt = apply_gr1_direct(&cs, &classes);
        assert_eq!(opt.problem.input_filters.len(), 1);
        assert_eq!(opt.problem.safety.len(), 1);
        assert_eq!(opt.problem.guarantees.len(), 1);
        // no rank constraint reads a letter with r set
        let r = 1u64 << cs.input_bit("r").unwrap();
        assert!(opt
            .constraints
            .iter()
            .all(|c| !matches!(c, Constraint::Rank { i, .. } if i & r != 0)));
        assert!(opt.nba.num_states() <= cs.nba.num_states());
        // all-general specs pass through unchanged
        let gen = encode(&mono("G(r_i -> F g_i)"), 2).unwrap();
        let same = apply_gr1_direct(&gen, &gen.gr1_classes());
        assert_eq!(same.constraints, gen.constraints);
    }
}
