use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Which process an atom refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IndexTag {
    /// Bound by the outer `forall i`.
    I,
    /// Bound by the outer `forall j` of a two-indexed property.
    J,
    /// Shared signal, not attached to any process.
    Global,
    /// A fixed ring vertex.
    Concrete(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub name: String,
    pub index: IndexTag,
}

impl Atom {
    pub fn new(name: impl Into<String>, index: IndexTag) -> Self {
        Atom {
            name: name.into(),
            index,
        }
    }

    pub fn global(name: impl Into<String>) -> Self {
        Atom::new(name, IndexTag::Global)
    }

    pub fn at_i(name: impl Into<String>) -> Self {
        Atom::new(name, IndexTag::I)
    }

    pub fn at(name: impl Into<String>, vertex: usize) -> Self {
        Atom::new(name, IndexTag::Concrete(vertex))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            IndexTag::Global => write!(f, "{}", self.name),
            IndexTag::I => write!(f, "{}_i", self.name),
            IndexTag::J => write!(f, "{}_j", self.name),
            IndexTag::Concrete(n) => write!(f, "{}_{}", self.name, n),
        }
    }
}

/// Indexed LTL formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    WeakUntil(Box<Formula>, Box<Formula>),
    /// `p W[k] q`: `p` holds until the `k+1`-th occurrence of `q`, or forever.
    BoundedWeakUntil(u32, Box<Formula>, Box<Formula>),
    Globally(Box<Formula>),
    Eventually(Box<Formula>),
}

use Formula as F;

impl Formula {
    pub fn atom(a: Atom) -> Self {
        F::Atom(a)
    }

    pub fn var(name: &str, index: IndexTag) -> Self {
        F::Atom(Atom::new(name, index))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        F::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        F::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        F::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        F::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        F::Iff(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        F::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        F::Until(Box::new(a), Box::new(b))
    }

    pub fn weak_until(a: Formula, b: Formula) -> Self {
        F::WeakUntil(Box::new(a), Box::new(b))
    }

    pub fn bounded_weak_until(k: u32, a: Formula, b: Formula) -> Self {
        F::BoundedWeakUntil(k, Box::new(a), Box::new(b))
    }

    pub fn globally(f: Formula) -> Self {
        F::Globally(Box::new(f))
    }

    pub fn eventually(f: Formula) -> Self {
        F::Eventually(Box::new(f))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            F::True | F::False | F::Atom(_) => vec![],
            F::Not(a) | F::Next(a) | F::Globally(a) | F::Eventually(a) => vec![a],
            F::And(a, b)
            | F::Or(a, b)
            | F::Implies(a, b)
            | F::Iff(a, b)
            | F::Until(a, b)
            | F::WeakUntil(a, b)
            | F::BoundedWeakUntil(_, a, b) => vec![a, b],
        }
    }

    /// Rebuilds the formula bottom-up, applying `f` to every atom.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Formula) -> Formula {
        match self {
            F::True => F::True,
            F::False => F::False,
            F::Atom(a) => f(a),
            F::Not(a) => Formula::not(a.map_atoms(f)),
            F::Next(a) => Formula::next(a.map_atoms(f)),
            F::Globally(a) => Formula::globally(a.map_atoms(f)),
            F::Eventually(a) => Formula::eventually(a.map_atoms(f)),
            F::And(a, b) => Formula::and(a.map_atoms(f), b.map_atoms(f)),
            F::Or(a, b) => Formula::or(a.map_atoms(f), b.map_atoms(f)),
            F::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
            F::Iff(a, b) => Formula::iff(a.map_atoms(f), b.map_atoms(f)),
            F::Until(a, b) => Formula::until(a.map_atoms(f), b.map_atoms(f)),
            F::WeakUntil(a, b) => Formula::weak_until(a.map_atoms(f), b.map_atoms(f)),
            F::BoundedWeakUntil(k, a, b) => {
                Formula::bounded_weak_until(*k, a.map_atoms(f), b.map_atoms(f))
            }
        }
    }

    pub fn retag(&self, mut map: impl FnMut(IndexTag) -> IndexTag) -> Formula {
        self.map_atoms(&mut |a| F::Atom(Atom::new(a.name.clone(), map(a.index))))
    }

    /// Substitutes concrete vertices for the `i` / `j` index variables.
    pub fn instantiate(&self, i: usize, j: Option<usize>) -> Formula {
        self.retag(|t| match t {
            IndexTag::I => IndexTag::Concrete(i),
            IndexTag::J => IndexTag::Concrete(j.unwrap_or(i)),
            other => other,
        })
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        if let F::Atom(a) = self {
            out.insert(a.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    pub fn index_tags(&self) -> BTreeSet<IndexTag> {
        self.atoms().into_iter().map(|a| a.index).collect()
    }

    pub fn signal_names(&self) -> BTreeSet<String> {
        self.atoms().into_iter().map(|a| a.name).collect()
    }

    /// No temporal operator anywhere below.
    pub fn is_propositional(&self) -> bool {
        match self {
            F::True | F::False | F::Atom(_) => true,
            F::Not(a) => a.is_propositional(),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Iff(a, b) => {
                a.is_propositional() && b.is_propositional()
            }
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Splits nested conjunctions into their operands.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            F::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            other => vec![other],
        }
    }
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Self {
        F::Atom(a)
    }
}
