//! Desugaring and negation normal form.

use super::formula::Formula;

/// Eliminates `F`, `->`, `<->` and `W[k]`.
///
/// The bounded weak until unfolds as `p W[0] q = p W q` and
/// `p W[k] q = p W (q & X(p W[k-1] q))`, so `q` must occur `k+1` times
/// before `p` is released.
pub fn desugar(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(desugar(a)),
        Formula::And(a, b) => Formula::and(desugar(a), desugar(b)),
        Formula::Or(a, b) => Formula::or(desugar(a), desugar(b)),
        Formula::Implies(a, b) => Formula::or(Formula::not(desugar(a)), desugar(b)),
        Formula::Iff(a, b) => {
            let (a, b) = (desugar(a), desugar(b));
            Formula::or(
                Formula::and(a.clone(), b.clone()),
                Formula::and(Formula::not(a), Formula::not(b)),
            )
        }
        Formula::Next(a) => Formula::next(desugar(a)),
        Formula::Until(a, b) => Formula::until(desugar(a), desugar(b)),
        Formula::WeakUntil(a, b) => Formula::weak_until(desugar(a), desugar(b)),
        Formula::BoundedWeakUntil(k, a, b) => {
            let (a, b) = (desugar(a), desugar(b));
            let mut acc = Formula::weak_until(a.clone(), b.clone());
            for _ in 0..*k {
                acc = Formula::weak_until(a.clone(), Formula::and(b.clone(), Formula::next(acc)));
            }
            acc
        }
        Formula::Globally(a) => Formula::globally(desugar(a)),
        Formula::Eventually(a) => Formula::until(Formula::True, desugar(a)),
    }
}

/// True when the formula uses only the operators `desugar` emits.
pub fn is_desugared(f: &Formula) -> bool {
    let here = !matches!(
        f,
        Formula::Implies(..)
            | Formula::Iff(..)
            | Formula::BoundedWeakUntil(..)
            | Formula::Eventually(..)
    );
    here && f.children().into_iter().all(is_desugared)
}

/// True when negation only appears directly above atoms.
pub fn is_nnf(f: &Formula) -> bool {
    match f {
        Formula::Not(a) => matches!(**a, Formula::Atom(_)),
        other => other.children().into_iter().all(is_nnf),
    }
}

/// Negation normal form of `f` (desugared first).
pub fn nnf(f: &Formula) -> Formula {
    push_negation(&desugar(f), false)
}

/// Negation normal form of `!f`. The result is again desugared.
pub fn negate_nnf(f: &Formula) -> Formula {
    push_negation(&desugar(f), true)
}

fn push_negation(f: &Formula, neg: bool) -> Formula {
    match f {
        Formula::True => {
            if neg {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::False => {
            if neg {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Atom(_) => {
            if neg {
                Formula::not(f.clone())
            } else {
                f.clone()
            }
        }
        Formula::Not(a) => push_negation(a, !neg),
        Formula::And(a, b) | Formula::Or(a, b) => {
            let (a, b) = (push_negation(a, neg), push_negation(b, neg));
            let is_and = matches!(f, Formula::And(..));
            if is_and != neg {
                Formula::and(a, b)
            } else {
                Formula::or(a, b)
            }
        }
        Formula::Next(a) => Formula::next(push_negation(a, neg)),
        Formula::Until(p, q) => {
            if neg {
                // !(p U q) = !q W (!p & !q)
                let nq = push_negation(q, true);
                Formula::weak_until(nq.clone(), Formula::and(push_negation(p, true), nq))
            } else {
                Formula::until(push_negation(p, false), push_negation(q, false))
            }
        }
        Formula::WeakUntil(p, q) => {
            if neg {
                // !(p W q) = !q U (!p & !q)
                let nq = push_negation(q, true);
                Formula::until(nq.clone(), Formula::and(push_negation(p, true), nq))
            } else {
                Formula::weak_until(push_negation(p, false), push_negation(q, false))
            }
        }
        Formula::Globally(a) => {
            if neg {
                Formula::until(Formula::True, push_negation(a, true))
            } else {
                Formula::globally(push_negation(a, false))
            }
        }
        Formula::Implies(..)
        | Formula::Iff(..)
        | Formula::BoundedWeakUntil(..)
        | Formula::Eventually(..) => push_negation(&desugar(f), neg),
    }
}

/// Folds `true`/`false` constants through the Boolean and temporal operators.
pub fn simplify(f: &Formula) -> Formula {
    use Formula as F;
    match f {
        F::True | F::False | F::Atom(_) => f.clone(),
        F::Not(a) => match simplify(a) {
            F::True => F::False,
            F::False => F::True,
            F::Not(inner) => *inner,
            x => Formula::not(x),
        },
        F::And(a, b) => match (simplify(a), simplify(b)) {
            (F::False, _) | (_, F::False) => F::False,
            (F::True, x) | (x, F::True) => x,
            (x, y) if x == y => x,
            (x, y) => Formula::and(x, y),
        },
        F::Or(a, b) => match (simplify(a), simplify(b)) {
            (F::True, _) | (_, F::True) => F::True,
            (F::False, x) | (x, F::False) => x,
            (x, y) if x == y => x,
            (x, y) => Formula::or(x, y),
        },
        F::Implies(a, b) => match (simplify(a), simplify(b)) {
            (F::False, _) | (_, F::True) => F::True,
            (F::True, x) => x,
            (x, F::False) => simplify(&Formula::not(x)),
            (x, y) => Formula::implies(x, y),
        },
        F::Iff(a, b) => match (simplify(a), simplify(b)) {
            (F::True, x) | (x, F::True) => x,
            (F::False, x) | (x, F::False) => simplify(&Formula::not(x)),
            (x, y) => Formula::iff(x, y),
        },
        F::Next(a) => match simplify(a) {
            c @ (F::True | F::False) => c,
            x => Formula::next(x),
        },
        F::Globally(a) => match simplify(a) {
            c @ (F::True | F::False) => c,
            x => Formula::globally(x),
        },
        F::Eventually(a) => match simplify(a) {
            c @ (F::True | F::False) => c,
            x => Formula::eventually(x),
        },
        F::Until(a, b) => match (simplify(a), simplify(b)) {
            (_, F::True) => F::True,
            (_, F::False) => F::False,
            (F::False, y) => y,
            (x, y) => Formula::until(x, y),
        },
        F::WeakUntil(a, b) => match (simplify(a), simplify(b)) {
            (_, F::True) | (F::True, _) => F::True,
            (F::False, y) => y,
            (x, F::False) => Formula::globally(x),
            (x, y) => Formula::weak_until(x, y),
        },
        F::BoundedWeakUntil(k, a, b) => Formula::bounded_weak_until(*k, simplify(a), simplify(b)),
    }
}
