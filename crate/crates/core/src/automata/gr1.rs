//! Recognition of conjuncts simple enough to bypass the automaton.

use std::collections::BTreeSet;

use super::guard::Guard;
use crate::ltl::{Atom, Formula};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gr1Class {
    /// `G α` with `α` a Boolean formula over inputs.
    SimpleAssumption(Formula),
    /// `G β` with `β` over current inputs and outputs and next outputs.
    SimpleSafety(Formula),
    General,
}

/// `X` only directly above Boolean formulas over outputs.
fn is_one_step(f: &Formula, inputs: &BTreeSet<String>) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => true,
        Formula::Not(_)
        | Formula::And(..)
        | Formula::Or(..)
        | Formula::Implies(..)
        | Formula::Iff(..) => f.children().into_iter().all(|c| is_one_step(c, inputs)),
        Formula::Next(a) => {
            a.is_propositional() && a.atoms().iter().all(|x| !inputs.contains(&x.name))
        }
        _ => false,
    }
}

/// Classifies a single conjunct. Signals not listed in `inputs` count as
/// outputs.
pub fn classify_gr1(f: &Formula, inputs: &BTreeSet<String>) -> Gr1Class {
    let Formula::Globally(body) = f else {
        return Gr1Class::General;
    };
    if body.is_propositional() && body.atoms().iter().all(|a| inputs.contains(&a.name)) {
        return Gr1Class::SimpleAssumption((**body).clone());
    }
    if is_one_step(body, inputs) {
        return Gr1Class::SimpleSafety((**body).clone());
    }
    Gr1Class::General
}

/// Compiles a one-step formula. Variable `k < atoms.len()` is atom `k` now,
/// variable `atoms.len() + k` is atom `k` at the next step.
pub fn step_guard(beta: &Formula, atoms: &[Atom]) -> Option<Guard> {
    let n = atoms.len();
    Some(match beta {
        Formula::Next(a) => Guard::from_formula(a, atoms)?.map_vars(&|v| v + n),
        Formula::Not(a) => step_guard(a, atoms)?.negate(),
        Formula::And(a, b) => Guard::and(step_guard(a, atoms)?, step_guard(b, atoms)?),
        Formula::Or(a, b) => Guard::or(step_guard(a, atoms)?, step_guard(b, atoms)?),
        Formula::Implies(a, b) => Guard::or(step_guard(a, atoms)?.negate(), step_guard(b, atoms)?),
        Formula::Iff(a, b) => {
            let (a, b) = (step_guard(a, atoms)?, step_guard(b, atoms)?);
            Guard::or(
                Guard::and(a.clone(), b.clone()),
                Guard::and(a.negate(), b.negate()),
            )
        }
        other => Guard::from_formula(other, atoms)?,
    })
}
