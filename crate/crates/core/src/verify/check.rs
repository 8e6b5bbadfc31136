use std::collections::BTreeSet;

use serde::Serialize;

use super::product::{find_accepting_lasso, ProductOptions};
use super::structure::{Filter, HubStructure, RingStructure};
use crate::automata::{classify_gr1, ltl_to_nba, Gr1Class, Guard};
use crate::ltl::{eval_lasso, Atom, Formula, IndexTag};
use crate::machine::{project_local_run, LocalRun, ProcessTemplate, RingSystem, Run, RunStep, Timing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Counterexample {
    Ring(Run),
    /// Run of a single process under the hub environment.
    Process(LocalRun),
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub property: String,
    pub size: usize,
    pub timing: Timing,
    /// Vertices the property was instantiated at.
    pub vertices: Vec<usize>,
    pub status: Status,
    /// The instantiated `premise -> property` that was checked.
    pub checked: Formula,
    pub counterexample: Option<Counterexample>,
    pub note: Option<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Signal names that are inputs of any template in the ring.
fn input_names(templates: &[&ProcessTemplate]) -> BTreeSet<String> {
    templates.iter().flat_map(|t| t.input_names()).collect()
}

/// Splits assumptions into Boolean invariants over inputs (returned as the
/// invariant body) and the rest.
pub fn split_invariants(
    assumptions: &[Formula],
    inputs: &BTreeSet<String>,
) -> (Vec<Formula>, Vec<Formula>) {
    let mut inv = Vec::new();
    let mut rest = Vec::new();
    for a in assumptions {
        for c in a.conjuncts() {
            match classify_gr1(c, inputs) {
                Gr1Class::SimpleAssumption(alpha) => inv.push(alpha),
                _ => rest.push(c.clone()),
            }
        }
    }
    (inv, rest)
}

fn filter(alpha: &Formula) -> Filter {
    let atoms: Vec<Atom> = alpha.atoms().into_iter().collect();
    Filter {
        guard: Guard::from_formula(alpha, &atoms).expect("propositional invariant"),
        atoms,
    }
}

fn has_tag(f: &Formula, tag: IndexTag) -> bool {
    f.index_tags().contains(&tag)
}

/// Checks the property `prop` (tags `I`, `J`, global) on `ring`, with `I`
/// bound to vertex `i` and `J` to `j`, for runs that satisfy `assumptions`.
///
/// Assumptions are one-indexed. Boolean invariants over inputs restrict the
/// inputs of every vertex whenever it moves. Other assumptions are
/// instantiated at the property's vertices; for a property over two
/// vertices this is only done in synchronous rings, where full runs and
/// local runs coincide.
pub fn model_check(
    ring: &RingSystem,
    id: &str,
    prop: &Formula,
    i: usize,
    j: Option<usize>,
    assumptions: &[Formula],
) -> Verdict {
    let two = has_tag(prop, IndexTag::J);
    let vertices: Vec<usize> = match (two, j) {
        (true, Some(j)) => vec![i, j],
        _ => vec![i],
    };
    let mut verdict = Verdict {
        property: id.to_string(),
        size: ring.n,
        timing: ring.timing,
        vertices: vertices.clone(),
        status: Status::Unsupported,
        checked: prop.clone(),
        counterexample: None,
        note: None,
    };
    if ring.timing == Timing::FullyAsynchronous {
        verdict.note = Some("fully asynchronous rings are not model checked".into());
        return verdict;
    }
    if vertices.iter().any(|&v| v >= ring.n) || (two && j.is_none()) {
        verdict.note = Some("property vertex outside the ring".into());
        return verdict;
    }
    let templates: Vec<&ProcessTemplate> = ring.templates.iter().collect();
    let inputs = input_names(&templates);
    if two && prop.atoms().iter().any(|a| inputs.contains(&a.name)) {
        verdict.note = Some("properties over two processes may not mention inputs".into());
        return verdict;
    }
    let inst = |f: &Formula| f.instantiate(i, j);
    let (inv, rest) = split_invariants(assumptions, &inputs);
    let mut filters = Vec::new();
    for alpha in &inv {
        if alpha.index_tags().contains(&IndexTag::I) {
            for v in 0..ring.n {
                filters.push(filter(&alpha.instantiate(v, None)));
            }
        } else {
            filters.push(filter(alpha));
        }
    }
    let mut premise = Vec::new();
    if !two {
        premise.extend(rest.iter().map(inst));
    } else if ring.timing == Timing::Synchronous {
        for &v in &vertices {
            premise.extend(rest.iter().map(|f| f.instantiate(v, None)));
        }
    } else if !rest.is_empty() {
        verdict.note = Some("non-invariant assumptions ignored for this property".into());
    }
    let checked = Formula::implies(Formula::conjunction(premise), inst(prop));
    verdict.checked = checked.clone();
    let atoms: Vec<Atom> = checked.atoms().into_iter().collect();
    let nba = ltl_to_nba(&Formula::not(checked), &atoms);
    let structure = RingStructure::new(ring, &nba.atoms, &filters);
    let opts = ProductOptions {
        stutter_unless: (!two && ring.timing == Timing::Interleaving).then_some(i),
        fair_vertices: (ring.timing == Timing::Interleaving).then_some(ring.n),
    };
    match find_accepting_lasso(&structure, &nba, opts) {
        None => verdict.status = Status::Pass,
        Some(l) => {
            verdict.status = Status::Fail;
            let run = Run {
                steps: l
                    .steps
                    .into_iter()
                    .map(|s| RunStep {
                        state: ring.decode_state(s.state),
                        input: s.witness,
                        moved: s.moved,
                    })
                    .collect(),
                loop_start: Some(l.loop_start),
            };
            verdict.counterexample = Some(Counterexample::Ring(run));
        }
    }
    verdict
}

/// Erases process tags so that a one-indexed formula talks about a lone process.
pub fn as_single_process(f: &Formula) -> Formula {
    f.retag(|_| IndexTag::Global)
}

/// Checks `prop` on one process whose environment passes the token back
/// only while the process lacks it. Formulas may use tag `I` or no tag.
pub fn model_check_process(
    t: &ProcessTemplate,
    id: &str,
    prop: &Formula,
    assumptions: &[Formula],
) -> Verdict {
    let inputs = input_names(&[t]);
    let assumptions: Vec<Formula> = assumptions.iter().map(as_single_process).collect();
    let (inv, rest) = split_invariants(&assumptions, &inputs);
    let filters: Vec<Filter> = inv.iter().map(filter).collect();
    let checked = Formula::implies(Formula::conjunction(rest), as_single_process(prop));
    let atoms: Vec<Atom> = checked.atoms().into_iter().collect();
    let nba = ltl_to_nba(&Formula::not(checked.clone()), &atoms);
    let structure = HubStructure::new(t, &nba.atoms, &filters);
    let lasso = find_accepting_lasso(&structure, &nba, ProductOptions::default());
    Verdict {
        property: id.to_string(),
        size: 1,
        timing: Timing::Synchronous,
        vertices: vec![0],
        status: if lasso.is_some() { Status::Fail } else { Status::Pass },
        checked,
        counterexample: lasso.map(|l| {
            let steps: Vec<(usize, u64)> = l.steps.iter().map(|s| (s.state, s.witness)).collect();
            Counterexample::Process(LocalRun {
                stem: steps[..l.loop_start].to_vec(),
                cycle: steps[l.loop_start..].to_vec(),
            })
        }),
        note: None,
    }
}

fn local_atom_value(t: &ProcessTemplate, vertex: Option<usize>, a: &Atom, q: usize, input: u64) -> bool {
    let mine = match a.index {
        IndexTag::Concrete(v) => Some(v) == vertex,
        IndexTag::Global => true,
        _ => false,
    };
    if !mine {
        return false;
    }
    if let Some(x) = t.output(q, &a.name) {
        return x;
    }
    t.input_bit(&a.name).is_some_and(|b| input >> b & 1 == 1)
}

/// Re-evaluates a failing verdict's counterexample against the checked
/// formula. True when the counterexample indeed violates it.
pub fn counterexample_violates(ring: Option<&RingSystem>, t: Option<&ProcessTemplate>, v: &Verdict) -> bool {
    match (&v.counterexample, ring, t) {
        (Some(Counterexample::Ring(run)), Some(ring), _) => {
            let two = v.vertices.len() == 2;
            if two || ring.timing == Timing::Synchronous {
                let l = run.loop_start.unwrap_or(0);
                let letters: Vec<&RunStep> = run.steps.iter().collect();
                !eval_lasso(&v.checked, &letters[..l], &letters[l..], |s, a| {
                    ring.atom_value(a, &s.state, &s.input)
                })
            } else {
                let j = v.vertices[0];
                let local = project_local_run(ring, run, j);
                if local.cycle.is_empty() {
                    return false;
                }
                let tj = &ring.templates[j];
                !eval_lasso(&v.checked, &local.stem, &local.cycle, |&(q, i), a| {
                    local_atom_value(tj, Some(j), a, q, i)
                })
            }
        }
        (Some(Counterexample::Process(local)), _, Some(t)) => {
            !local.cycle.is_empty()
                && !eval_lasso(&v.checked, &local.stem, &local.cycle, |&(q, i), a| {
                    local_atom_value(t, None, a, q, i)
                })
        }
        _ => false,
    }
}
