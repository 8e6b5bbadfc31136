//! Direct evaluation of LTL on ultimately periodic words `stem . cycle^w`.
//!
//! Used as the reference semantics for automata and for replaying
//! counterexamples. Every subformula is tabulated over the `stem + cycle`
//! distinct positions; temporal operators walk at most that many successors.

use super::formula::{Atom, Formula};
use super::rewrite::desugar;

struct Word<'a, L> {
    letters: Vec<&'a L>,
    loop_start: usize,
}

impl<L> Word<'_, L> {
    fn len(&self) -> usize {
        self.letters.len()
    }

    fn succ(&self, p: usize) -> usize {
        if p + 1 < self.len() {
            p + 1
        } else {
            self.loop_start
        }
    }

    /// Positions visited from `p` on, each distinct one exactly once.
    fn walk(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.len();
        let total = if p < self.loop_start { n - p } else { n - self.loop_start };
        let mut x = p;
        let mut steps = 0;
        std::iter::from_fn(move || {
            if steps >= total {
                return None;
            }
            let cur = x;
            x = self.succ(x);
            steps += 1;
            Some(cur)
        })
    }
}

fn table<L>(f: &Formula, w: &Word<'_, L>, holds: &impl Fn(&L, &Atom) -> bool) -> Vec<bool> {
    let n = w.len();
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(a) => w.letters.iter().map(|l| holds(l, a)).collect(),
        Formula::Not(a) => table(a, w, holds).into_iter().map(|b| !b).collect(),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            let (ta, tb) = (table(a, w, holds), table(b, w, holds));
            ta.iter()
                .zip(&tb)
                .map(|(&x, &y)| match f {
                    Formula::And(..) => x && y,
                    Formula::Or(..) => x || y,
                    Formula::Implies(..) => !x || y,
                    _ => x == y,
                })
                .collect()
        }
        Formula::Next(a) => {
            let ta = table(a, w, holds);
            (0..n).map(|p| ta[w.succ(p)]).collect()
        }
        Formula::Globally(a) => {
            let ta = table(a, w, holds);
            (0..n).map(|p| w.walk(p).all(|x| ta[x])).collect()
        }
        Formula::Eventually(a) => {
            let ta = table(a, w, holds);
            (0..n).map(|p| w.walk(p).any(|x| ta[x])).collect()
        }
        Formula::Until(a, b) | Formula::WeakUntil(a, b) => {
            let weak = matches!(f, Formula::WeakUntil(..));
            let (ta, tb) = (table(a, w, holds), table(b, w, holds));
            (0..n)
                .map(|p| {
                    for x in w.walk(p) {
                        if tb[x] {
                            return true;
                        }
                        if !ta[x] {
                            return false;
                        }
                    }
                    weak
                })
                .collect()
        }
        Formula::BoundedWeakUntil(..) => table(&desugar(f), w, holds),
    }
}

/// Evaluates `f` at position 0 of `stem . cycle^w`. `holds(letter, atom)`
/// decides atomic propositions.
///
/// Panics if `cycle` is empty.
pub fn eval_lasso<L>(
    f: &Formula,
    stem: &[L],
    cycle: &[L],
    holds: impl Fn(&L, &Atom) -> bool,
) -> bool {
    assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
    let w = Word {
        letters: stem.iter().chain(cycle.iter()).collect(),
        loop_start: stem.len(),
    };
    table(f, &w, &holds)[0]
}

/// Evaluation over words given as bitmasks indexed by `atoms`. Atoms
/// missing from `atoms` are false.
pub fn eval_bits(f: &Formula, atoms: &[Atom], stem: &[u64], cycle: &[u64]) -> bool {
    eval_lasso(f, stem, cycle, |l, a| {
        atoms
            .iter()
            .position(|x| x == a)
            .is_some_and(|k| l >> k & 1 == 1)
    })
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_formula;
    use super::*;

    fn atoms() -> Vec<Atom> {
        vec![Atom::global("p"), Atom::global("q")]
    }

    fn ev(s: &str, stem: &[u64], cycle: &[u64]) -> bool {
        eval_bits(&parse_formula(s).unwrap(), &atoms(), stem, cycle)
    }

    #[test]
    fn basic_temporal() {
        // p = bit 0, q = bit 1
        assert!(ev("G p", &[], &[1]));
        assert!(!ev("G p", &[1], &[0]));
        assert!(ev("F q", &[0, 0], &[2]));
        assert!(!ev("F q", &[0], &[1]));
        assert!(ev("G F q", &[], &[0, 2]));
        assert!(!ev("F G q", &[], &[0, 2]));
        assert!(ev("X q", &[1, 2], &[0]));
        assert!(ev("p U q", &[1, 1], &[2]));
        assert!(!ev("p U q", &[1], &[1]));
        assert!(ev("p W q", &[1], &[1]));
        assert!(!ev("p W q", &[1, 0], &[2]));
    }

    #[test]
    fn bounded_weak_until_counts_releases() {
        // p W[1] q: p must hold through the first q and up to the second q
        assert!(ev("p W[1] q", &[3, 1], &[3]));
        assert!(!ev("p W[1] q", &[3, 0], &[3]));
        assert!(ev("p W[1] q", &[3, 3], &[0]));
        assert!(ev("p W[0] q", &[2], &[0]));
    }

    #[test]
    fn positions_inside_the_cycle() {
        // cycle positions see the whole cycle, not the stem
        assert!(ev("X X G p", &[0, 0], &[1]));
        assert!(ev("X G F q", &[2], &[0, 2]));
        assert!(!ev("X G F q", &[2], &[0]));
    }
}
