use std::fmt::Write as _;

use crate::automata::Guard;
use crate::synth::{Constraint, ConstraintSystem, Pin};

fn guard_term(g: &Guard, var: &dyn Fn(usize) -> String) -> String {
    match g {
        Guard::True => "true".into(),
        Guard::False => "false".into(),
        Guard::Lit(v, true) => var(*v),
        Guard::Lit(v, false) => format!("(not {})", var(*v)),
        Guard::And(xs) | Guard::Or(xs) if xs.is_empty() => {
            (if matches!(g, Guard::And(_)) { "true" } else { "false" }).into()
        }
        Guard::And(xs) | Guard::Or(xs) => {
            let op = if matches!(g, Guard::And(_)) { "and" } else { "or" };
            let parts: Vec<String> = xs.iter().map(|x| guard_term(x, var)).collect();
            format!("({op} {})", parts.join(" "))
        }
    }
}

/// Renders the system as an SMT-LIB v2 script over uninterpreted functions
/// with integer-encoded states. Output order follows the constraint list,
/// so equal systems give identical scripts.
pub fn emit_smtlib(cs: &ConstraintSystem) -> String {
    let n = cs.bound;
    let letters = cs.num_letters();
    let na = cs.nba.num_states();
    let m = cs.num_outputs();
    let ceiling = cs.rank_ceiling();
    let mut s = String::new();
    let _ = writeln!(s, "; bounded synthesis: {n} states, {letters} input letters, {na} automaton states");
    let _ = writeln!(s, "; inputs (bit order): {}", cs.inputs().join(" "));
    for (k, o) in cs.outputs.iter().enumerate() {
        let _ = writeln!(s, "; out{k} = {o}");
    }
    s.push_str("(set-logic UFLIA)\n");
    s.push_str("(declare-fun delta (Int Int) Int)\n");
    for k in 0..m {
        let _ = writeln!(s, "(declare-fun out{k} (Int) Bool)");
    }
    s.push_str("(declare-fun rho (Int Int) Int)\n");
    for q in 0..n {
        for i in 0..letters {
            let _ = writeln!(s, "(assert (and (<= 0 (delta {q} {i})) (< (delta {q} {i}) {n})))");
        }
    }
    for a in 0..na {
        for q in 0..n {
            let _ = writeln!(s, "(assert (and (<= (- 1) (rho {a} {q})) (<= (rho {a} {q}) {ceiling})))");
        }
    }
    for c in &cs.constraints {
        match c {
            Constraint::Reach { a, q } => {
                let _ = writeln!(s, "(assert (>= (rho {a} {q}) 0))");
            }
            Constraint::Rank {
                q,
                i,
                a,
                b,
                guard,
                strict,
            } => {
                let g = guard_term(guard, &|v| format!("(out{v} {q})"));
                let rel = if *strict { ">" } else { ">=" };
                let premise = if g == "true" {
                    format!("(>= (rho {a} {q}) 0)")
                } else {
                    format!("(and (>= (rho {a} {q}) 0) {g})")
                };
                let _ = writeln!(
                    s,
                    "(assert (=> {premise} ({rel} (rho {b} (delta {q} {i})) (rho {a} {q}))))"
                );
            }
            Constraint::Step { q, i, guard } => {
                let g = guard_term(guard, &|v| {
                    if v < m {
                        format!("(out{v} {q})")
                    } else {
                        format!("(out{} (delta {q} {i}))", v - m)
                    }
                });
                let _ = writeln!(s, "(assert {g})");
            }
            Constraint::State { q, guard } => {
                let g = guard_term(guard, &|v| format!("(out{v} {q})"));
                let _ = writeln!(s, "(assert {g})");
            }
        }
    }
    for p in &cs.pins {
        match *p {
            Pin::Delta { q, i, to } => {
                let _ = writeln!(s, "(assert (= (delta {q} {i}) {to}))");
            }
            Pin::Out { q, bit, value } => {
                let _ = writeln!(s, "(assert (= (out{bit} {q}) {value}))");
            }
        }
    }
    s.push_str("(check-sat)\n");
    let cells: Vec<String> = (0..n)
        .flat_map(|q| (0..letters).map(move |i| format!("(delta {q} {i})")))
        .collect();
    let _ = writeln!(s, "(get-value ({}))", cells.join(" "));
    let outs: Vec<String> = (0..m)
        .flat_map(|k| (0..n).map(move |q| format!("(out{k} {q})")))
        .collect();
    let _ = writeln!(s, "(get-value ({}))", outs.join(" "));
    let ranks: Vec<String> = (0..na)
        .flat_map(|a| (0..n).map(move |q| format!("(rho {a} {q})")))
        .collect();
    if !ranks.is_empty() {
        let _ = writeln!(s, "(get-value ({}))", ranks.join(" "));
    }
    s
}
