use std::fmt;

use super::formula::Formula;

// Binding strength, loosest first. Must mirror the parser.
const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNTIL: u8 = 5;
const UNARY: u8 = 6;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Until(..) | Formula::WeakUntil(..) | Formula::BoundedWeakUntil(..) => UNTIL,
        _ => UNARY,
    }
}

fn write_child(
    f: &mut fmt::Formatter<'_>,
    child: &Formula,
    needs_parens: bool,
) -> fmt::Result {
    if needs_parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = prec(self);
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(a) => {
                write!(f, "!")?;
                write_child(f, a, prec(a) < UNARY)
            }
            Formula::Next(a) | Formula::Globally(a) | Formula::Eventually(a) => {
                let op = match self {
                    Formula::Next(_) => "X",
                    Formula::Globally(_) => "G",
                    _ => "F",
                };
                write!(f, "{op} ")?;
                write_child(f, a, prec(a) < UNARY)
            }
            // left-associative
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                let op = match self {
                    Formula::And(..) => "&",
                    Formula::Or(..) => "|",
                    _ => "<->",
                };
                write_child(f, a, prec(a) < p)?;
                write!(f, " {op} ")?;
                write_child(f, b, prec(b) <= p)
            }
            // right-associative
            Formula::Implies(a, b)
            | Formula::Until(a, b)
            | Formula::WeakUntil(a, b)
            | Formula::BoundedWeakUntil(_, a, b) => {
                write_child(f, a, prec(a) <= p)?;
                match self {
                    Formula::Implies(..) => write!(f, " -> ")?,
                    Formula::Until(..) => write!(f, " U ")?,
                    Formula::WeakUntil(..) => write!(f, " W ")?,
                    Formula::BoundedWeakUntil(k, ..) => write!(f, " W[{k}] ")?,
                    _ => unreachable!(),
                }
                write_child(f, b, prec(b) < p)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_formula;

    #[test]
    fn prints_compactly() {
        let f = parse_formula("G((a & b) -> X(c U d))").unwrap();
        assert_eq!(f.to_string(), "G (a & b -> X (c U d))");
        let g = parse_formula("(a -> b) -> c").unwrap();
        assert_eq!(g.to_string(), "(a -> b) -> c");
        let h = parse_formula("!(p_i W[2] q)").unwrap();
        assert_eq!(h.to_string(), "!(p_i W[2] q)");
    }
}
