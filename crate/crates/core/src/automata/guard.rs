use std::collections::BTreeSet;
use std::fmt;

use crate::ltl::{Atom, Formula};

/// Boolean transition guard over atom indices, negation on literals only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Guard {
    True,
    False,
    Lit(usize, bool),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    pub fn lit(var: usize, positive: bool) -> Guard {
        Guard::Lit(var, positive)
    }

    pub fn and(a: Guard, b: Guard) -> Guard {
        match (a, b) {
            (Guard::False, _) | (_, Guard::False) => Guard::False,
            (Guard::True, x) | (x, Guard::True) => x,
            (x, y) if x == y => x,
            (Guard::And(mut xs), Guard::And(ys)) => {
                xs.extend(ys);
                Guard::And(xs)
            }
            (Guard::And(mut xs), y) | (y, Guard::And(mut xs)) => {
                xs.push(y);
                Guard::And(xs)
            }
            (x, y) => Guard::And(vec![x, y]),
        }
    }

    pub fn or(a: Guard, b: Guard) -> Guard {
        match (a, b) {
            (Guard::True, _) | (_, Guard::True) => Guard::True,
            (Guard::False, x) | (x, Guard::False) => x,
            (x, y) if x == y => x,
            (Guard::Or(mut xs), Guard::Or(ys)) => {
                xs.extend(ys);
                Guard::Or(xs)
            }
            (Guard::Or(mut xs), y) | (y, Guard::Or(mut xs)) => {
                xs.push(y);
                Guard::Or(xs)
            }
            (x, y) => Guard::Or(vec![x, y]),
        }
    }

    pub fn negate(&self) -> Guard {
        match self {
            Guard::True => Guard::False,
            Guard::False => Guard::True,
            Guard::Lit(v, p) => Guard::Lit(*v, !p),
            Guard::And(xs) => xs
                .iter()
                .map(Guard::negate)
                .fold(Guard::False, Guard::or),
            Guard::Or(xs) => xs
                .iter()
                .map(Guard::negate)
                .fold(Guard::True, Guard::and),
        }
    }

    /// Evaluates with bit `k` of `letter` giving the value of atom `k`.
    pub fn eval(&self, letter: u64) -> bool {
        match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Lit(v, p) => (letter >> v & 1 == 1) == *p,
            Guard::And(xs) => xs.iter().all(|g| g.eval(letter)),
            Guard::Or(xs) => xs.iter().any(|g| g.eval(letter)),
        }
    }

    /// Partial evaluation: atoms set in `known` take their value from `values`.
    pub fn restrict(&self, known: u64, values: u64) -> Guard {
        match self {
            Guard::Lit(v, p) if known >> v & 1 == 1 => {
                if (values >> v & 1 == 1) == *p {
                    Guard::True
                } else {
                    Guard::False
                }
            }
            Guard::And(xs) => xs
                .iter()
                .map(|g| g.restrict(known, values))
                .fold(Guard::True, Guard::and),
            Guard::Or(xs) => xs
                .iter()
                .map(|g| g.restrict(known, values))
                .fold(Guard::False, Guard::or),
            other => other.clone(),
        }
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Guard::Lit(v, _) => {
                out.insert(*v);
            }
            Guard::And(xs) | Guard::Or(xs) => xs.iter().for_each(|g| g.collect_vars(out)),
            _ => {}
        }
    }

    /// Renames variables; used when moving guards between alphabets.
    pub fn map_vars(&self, f: &impl Fn(usize) -> usize) -> Guard {
        match self {
            Guard::Lit(v, p) => Guard::Lit(f(*v), *p),
            Guard::And(xs) => Guard::And(xs.iter().map(|g| g.map_vars(f)).collect()),
            Guard::Or(xs) => Guard::Or(xs.iter().map(|g| g.map_vars(f)).collect()),
            other => other.clone(),
        }
    }

    /// True if `self` implies `other`, decided by enumerating the shared
    /// variables. `None` when there are more than `limit` of them.
    pub fn implies(&self, other: &Guard, limit: usize) -> Option<bool> {
        let vars: Vec<usize> = self.vars().union(&other.vars()).copied().collect();
        if vars.len() > limit {
            return None;
        }
        for bits in 0u64..(1 << vars.len()) {
            let mut letter = 0u64;
            for (k, v) in vars.iter().enumerate() {
                if bits >> k & 1 == 1 {
                    letter |= 1 << v;
                }
            }
            if self.eval(letter) && !other.eval(letter) {
                return Some(false);
            }
        }
        Some(true)
    }

    /// Compiles a propositional NNF-ish formula; atoms are looked up in `atoms`.
    pub fn from_formula(f: &Formula, atoms: &[Atom]) -> Option<Guard> {
        let idx = |a: &Atom| atoms.iter().position(|x| x == a);
        Some(match f {
            Formula::True => Guard::True,
            Formula::False => Guard::False,
            Formula::Atom(a) => Guard::Lit(idx(a)?, true),
            Formula::Not(x) => Guard::from_formula(x, atoms)?.negate(),
            Formula::And(a, b) => {
                Guard::and(Guard::from_formula(a, atoms)?, Guard::from_formula(b, atoms)?)
            }
            Formula::Or(a, b) => {
                Guard::or(Guard::from_formula(a, atoms)?, Guard::from_formula(b, atoms)?)
            }
            Formula::Implies(a, b) => Guard::or(
                Guard::from_formula(a, atoms)?.negate(),
                Guard::from_formula(b, atoms)?,
            ),
            Formula::Iff(a, b) => {
                let (a, b) = (Guard::from_formula(a, atoms)?, Guard::from_formula(b, atoms)?);
                Guard::or(
                    Guard::and(a.clone(), b.clone()),
                    Guard::and(a.negate(), b.negate()),
                )
            }
            _ => return None,
        })
    }

    pub fn to_formula(&self, atoms: &[Atom]) -> Formula {
        match self {
            Guard::True => Formula::True,
            Guard::False => Formula::False,
            Guard::Lit(v, true) => Formula::Atom(atoms[*v].clone()),
            Guard::Lit(v, false) => Formula::not(Formula::Atom(atoms[*v].clone())),
            Guard::And(xs) => Formula::conjunction(xs.iter().map(|g| g.to_formula(atoms))),
            Guard::Or(xs) => Formula::disjunction(xs.iter().map(|g| g.to_formula(atoms))),
        }
    }

    pub fn display<'a>(&'a self, atoms: &'a [Atom]) -> impl fmt::Display + 'a {
        GuardDisplay { g: self, atoms }
    }
}

struct GuardDisplay<'a> {
    g: &'a Guard,
    atoms: &'a [Atom],
}

impl fmt::Display for GuardDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.g.to_formula(self.atoms))
    }
}
