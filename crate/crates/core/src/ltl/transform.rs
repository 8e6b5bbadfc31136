//! Rewrites that turn a monolithic parameterized spec into per-process
//! token-ring specs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::formula::{Atom, Formula, IndexTag};
use super::spec::{Clause, ParamSpec, Role, Shape, RCV, SND, TOK};
use super::LtlError;

/// How the monolithic value of a localized output is read back from the
/// per-process copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalRule {
    /// The global value equals `i` iff the local copy of process `i` is set.
    MasterIndex,
    /// The global value is the local copy of the process holding the token.
    ExistsTokenAndLocal,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OutputLocalization {
    pub rules: BTreeMap<String, LocalRule>,
}

fn retag_clauses(clauses: &[Clause], f: &mut impl FnMut(&Atom) -> Formula) -> Vec<Clause> {
    clauses
        .iter()
        .map(|c| Clause {
            label: c.label.clone(),
            formula: c.formula.map_atoms(f),
            line: c.line,
        })
        .collect()
}

fn mentions(spec: &ParamSpec, name: &str) -> bool {
    spec.all_clauses()
        .any(|c| c.formula.atoms().iter().any(|a| a.name == name))
}

/// Turns the given global outputs into process-local ones.
///
/// A global output that the input already compares with the process index
/// (`hmaster = i`) becomes a master-index flag; any other becomes a copy
/// that is meaningful while the process holds the token.
pub fn localize_outputs(
    spec: &ParamSpec,
    globals: &[&str],
) -> Result<(ParamSpec, OutputLocalization), LtlError> {
    let mut out = spec.clone();
    let mut loc = OutputLocalization::default();
    for &g in globals {
        if !spec.global_outputs.iter().any(|s| s == g) || !mentions(spec, g) {
            return Err(LtlError::NameNotFound(g.to_string()));
        }
        let indexed = spec.all_clauses().any(|c| {
            c.formula
                .atoms()
                .iter()
                .any(|a| a.name == g && a.index == IndexTag::I)
        });
        loc.rules.insert(
            g.to_string(),
            if indexed {
                LocalRule::MasterIndex
            } else {
                LocalRule::ExistsTokenAndLocal
            },
        );
    }
    let mut swap = |a: &Atom| {
        if a.index == IndexTag::Global && globals.contains(&a.name.as_str()) {
            Formula::Atom(Atom::new(a.name.clone(), IndexTag::I))
        } else {
            Formula::Atom(a.clone())
        }
    };
    out.assumptions = retag_clauses(&spec.assumptions, &mut swap);
    out.fairness = retag_clauses(&spec.fairness, &mut swap);
    out.guarantees = retag_clauses(&spec.guarantees, &mut swap);
    out.global_outputs.retain(|s| !globals.contains(&s.as_str()));
    for &g in globals {
        out.outputs.push(g.to_string());
    }
    Ok((out, loc))
}

fn push_unique(v: &mut Vec<String>, name: &str) {
    if !v.iter().any(|s| s == name) {
        v.push(name.to_string());
    }
}

/// Adds the token-ring signals, the token-arrival fairness premise and, when
/// a mutex output is declared, the rule that only the token holder may set it.
pub fn localize_assumptions(spec: &ParamSpec) -> Result<ParamSpec, LtlError> {
    match spec.shape() {
        Shape::OneIndexed => {}
        Shape::TwoIndexed => {
            return Err(LtlError::Shape(
                "two-indexed formulas cannot be localized to one process".into(),
            ))
        }
        Shape::Mixed => {
            return Err(LtlError::Shape(
                "formula mentions concrete process indices".into(),
            ))
        }
    }
    if spec.role == Role::MonolithicAfterHub {
        return Err(LtlError::Role("spec is already monolithic".into()));
    }
    let mut out = spec.clone();
    push_unique(&mut out.outputs, TOK);
    push_unique(&mut out.outputs, SND);
    push_unique(&mut out.local_inputs, RCV);
    let tok = || Formula::var(TOK, IndexTag::I);
    if !out.fairness.iter().any(|c| c.label.as_deref() == Some("A5")) {
        out.fairness.push(Clause::new(
            "A5",
            Formula::globally(Formula::eventually(tok())),
        ));
    }
    if let Some(m) = &spec.mutex {
        if !out.guarantees.iter().any(|c| c.label.as_deref() == Some("G12")) {
            out.guarantees.push(Clause::new(
                "G12",
                Formula::globally(Formula::implies(Formula::var(m, IndexTag::I), tok())),
            ));
        }
    }
    out.validate()?;
    Ok(out)
}

/// Specializes a localized AMBA-style spec for the process that holds the
/// token initially and is granted the bus when nobody requests it.
pub fn specialize_zero(spec: &ParamSpec) -> Result<ParamSpec, LtlError> {
    match spec.role {
        Role::GenericProcess => {}
        Role::ZeroProcess => return Err(LtlError::Role("already specialized to zero".into())),
        Role::MonolithicAfterHub => {
            return Err(LtlError::Role("cannot specialize a monolithic spec".into()))
        }
    }
    for s in ["hgrant", "hmaster", "hmastlock"] {
        if !spec.is_output(s) {
            return Err(LtlError::UndeclaredSignal {
                name: s.into(),
                line: 0,
            });
        }
    }
    if !spec.is_input("hbusreq") {
        return Err(LtlError::UndeclaredSignal {
            name: "hbusreq".into(),
            line: 0,
        });
    }
    if !spec.is_output(TOK) {
        return Err(LtlError::UndeclaredSignal {
            name: TOK.into(),
            line: 0,
        });
    }
    let i = |n: &str| Formula::var(n, IndexTag::I);
    let no_req = || Formula::var("no_req", IndexTag::Global);
    let mut out = spec.clone();
    out.role = Role::ZeroProcess;
    out.guarantees
        .retain(|c| !matches!(c.label.as_deref(), Some("G10.1") | Some("G11.1")));
    push_unique(&mut out.global_inputs, "no_req");
    out.assumptions.push(Clause::new(
        "A6",
        Formula::globally(Formula::implies(i("hbusreq"), Formula::not(no_req()))),
    ));
    out.guarantees.push(Clause::new(
        "G10.2",
        Formula::globally(Formula::implies(
            Formula::conjunction([
                no_req(),
                Formula::not(i(TOK)),
                Formula::next(i(TOK)),
            ]),
            Formula::next(i("hgrant")),
        )),
    ));
    out.guarantees.push(Clause::new(
        "G11.2",
        Formula::implies(
            i(TOK),
            Formula::conjunction([
                i("hgrant"),
                i("hmaster"),
                Formula::not(i("hmastlock")),
            ]),
        ),
    ));
    out.validate()?;
    Ok(out)
}

/// Abstracts the rest of the ring into a hub that can pass the token back
/// only while the process does not hold it. The result talks about a single
/// process, so all process tags are erased.
pub fn hub_reduce(spec: &ParamSpec) -> Result<ParamSpec, LtlError> {
    if spec.shape() != Shape::OneIndexed {
        return Err(LtlError::UnsupportedShape(
            "hub abstraction needs a one-indexed spec".into(),
        ));
    }
    if spec.role == Role::MonolithicAfterHub {
        return Err(LtlError::Role("spec is already monolithic".into()));
    }
    if !spec.has_token_signals() {
        return Err(LtlError::UndeclaredSignal {
            name: TOK.into(),
            line: 0,
        });
    }
    let mut erase = |a: &Atom| Formula::Atom(Atom::new(a.name.clone(), IndexTag::Global));
    let mut out = spec.clone();
    out.assumptions = retag_clauses(&spec.assumptions, &mut erase);
    out.fairness = retag_clauses(&spec.fairness, &mut erase);
    out.guarantees = retag_clauses(&spec.guarantees, &mut erase);
    let g = |n: &str| Formula::var(n, IndexTag::Global);
    out.assumptions.push(Clause::new(
        "H",
        Formula::globally(Formula::implies(g(TOK), Formula::not(g(RCV)))),
    ));
    out.role = Role::MonolithicAfterHub;
    out.origin = Some(Box::new(spec.clone()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse::parse_formula;
    use crate::ltl::spec::parse_spec;

    const MONO: &str = "\
[INPUTS] local: req; global: ready
[OUTPUTS] local: grant; global: master, busy
[MUTEX] grant
[ASSUME] G F ready
[GUARANTEE]
G1: G(ready -> (grant_i <-> X master = i))
G2: G(busy -> X !busy)
";

    #[test]
    fn outputs_become_local_with_rules() {
        let s = parse_spec(MONO).unwrap();
        let (l, rules) = localize_outputs(&s, &["master", "busy"]).unwrap();
        assert!(l.global_outputs.is_empty());
        assert_eq!(rules.rules["master"], LocalRule::MasterIndex);
        assert_eq!(rules.rules["busy"], LocalRule::ExistsTokenAndLocal);
        assert_eq!(
            l.clause("G2").unwrap().formula,
            parse_formula("G(busy_i -> X !busy_i)").unwrap()
        );
        assert!(matches!(
            localize_outputs(&s, &["nope"]),
            Err(LtlError::NameNotFound(_))
        ));
    }

    #[test]
    fn assumptions_localized() {
        let s = parse_spec(MONO).unwrap();
        let l = localize_assumptions(&s).unwrap();
        assert!(l.is_localized());
        assert!(l.has_token_signals());
        assert_eq!(
            l.clause("G12").unwrap().formula,
            parse_formula("G(grant_i -> tok_i)").unwrap()
        );
        let two = parse_spec("[OUTPUTS] g\n[GUARANTEE] G!(g_i & g_j)\n").unwrap();
        assert!(matches!(localize_assumptions(&two), Err(LtlError::Shape(_))));
        let conc = parse_spec("[OUTPUTS] g\n[GUARANTEE] G(g_0)\n").unwrap();
        assert!(matches!(localize_assumptions(&conc), Err(LtlError::Shape(_))));
    }

    #[test]
    fn hub_erases_indices() {
        let s = localize_assumptions(&parse_spec(MONO).unwrap()).unwrap();
        let h = hub_reduce(&s).unwrap();
        assert_eq!(h.role, Role::MonolithicAfterHub);
        assert!(h.all_clauses().all(|c| c
            .formula
            .index_tags()
            .iter()
            .all(|t| *t == IndexTag::Global)));
        assert_eq!(
            h.clause("H").unwrap().formula,
            parse_formula("G(tok -> !rcv)").unwrap()
        );
        assert_eq!(h.origin.as_deref(), Some(&s));
        let two = parse_spec("[OUTPUTS] g\n[GUARANTEE] G!(g_i & g_j)\n").unwrap();
        assert!(matches!(hub_reduce(&two), Err(LtlError::UnsupportedShape(_))));
    }
}
