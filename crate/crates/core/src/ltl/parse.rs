//! Concrete syntax for formulas.
//!
//! Precedence from loosest to tightest: `<->`, `->` (right), `|`, `&`,
//! `U` / `W` / `W[k]` (right), then the prefix operators `! G F X`.
//! Atoms are `name` (global), `name_i`, `name_j`, `name_<n>`, plus the
//! sugar `name = i` and `name[sel]`, both of which denote `name_i`.

use super::formula::{Atom, Formula, IndexTag};
use super::LtlError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(u32),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eq,
    Colon,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<Spanned>, LtlError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let col = col0 + k;
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line, col });
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len()
                && (chars[k].is_ascii_alphanumeric() || chars[k] == '_' || chars[k] == '.')
            {
                k += 1;
            }
            push(&mut out, Tok::Ident(chars[start..k].iter().collect()));
            continue;
        }
        if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let s: String = chars[start..k].iter().collect();
            let n = s.parse().map_err(|_| LtlError::syntax(line, col, "number too large"))?;
            push(&mut out, Tok::Num(n));
            continue;
        }
        let rest: String = chars[k..chars.len().min(k + 3)].iter().collect();
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Implies, 2)
        } else if rest.starts_with("&&") {
            (Tok::And, 2)
        } else if rest.starts_with("||") {
            (Tok::Or, 2)
        } else {
            let t = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '!' | '~' => Tok::Not,
                '&' => Tok::And,
                '|' => Tok::Or,
                '=' => Tok::Eq,
                ':' => Tok::Colon,
                _ => {
                    return Err(LtlError::syntax(
                        line,
                        col,
                        format!("unexpected character '{c}'"),
                    ))
                }
            };
            (t, 1)
        };
        push(&mut out, tok);
        k += len;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    line: usize,
    end_col: usize,
}

fn is_prefix_chain(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| matches!(c, 'G' | 'F' | 'X'))
}

fn is_keyword(s: &str) -> bool {
    is_prefix_chain(s) || matches!(s, "U" | "W" | "true" | "false")
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => (self.line, self.end_col),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LtlError> {
        let (l, c) = self.here();
        Err(LtlError::syntax(l, c, msg))
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), LtlError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn iff(&mut self) -> Result<Formula, LtlError> {
        let mut lhs = self.implies()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, LtlError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, LtlError> {
        let mut lhs = self.until()?;
        while self.eat(&Tok::And) {
            let rhs = self.until()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.unary()?;
        match self.peek() {
            Some(Tok::Ident(s)) if s == "U" => {
                self.pos += 1;
                let rhs = self.until()?;
                Ok(Formula::until(lhs, rhs))
            }
            Some(Tok::Ident(s)) if s == "W" => {
                self.pos += 1;
                if self.eat(&Tok::LBracket) {
                    let k = match self.peek() {
                        Some(Tok::Num(n)) => *n,
                        _ => return self.err("expected bound in W[k]"),
                    };
                    self.pos += 1;
                    self.expect(&Tok::RBracket, "']'")?;
                    let rhs = self.until()?;
                    Ok(Formula::bounded_weak_until(k, lhs, rhs))
                } else {
                    let rhs = self.until()?;
                    Ok(Formula::weak_until(lhs, rhs))
                }
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula, LtlError> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Ident(s)) if is_prefix_chain(&s) => {
                self.pos += 1;
                let mut f = self.unary()?;
                for c in s.chars().rev() {
                    f = match c {
                        'G' => Formula::globally(f),
                        'F' => Formula::eventually(f),
                        _ => Formula::next(f),
                    };
                }
                Ok(f)
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, LtlError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.iff()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(f)
            }
            Some(Tok::Ident(s)) if s == "true" => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::Ident(s)) if s == "false" => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Ident(s)) if !is_keyword(&s) => {
                self.pos += 1;
                self.atom_tail(s)
            }
            Some(_) => self.err("expected a formula"),
            None => self.err("unexpected end of formula"),
        }
    }

    fn atom_tail(&mut self, name: String) -> Result<Formula, LtlError> {
        if self.eat(&Tok::Eq) {
            let tag = match self.peek().cloned() {
                Some(Tok::Ident(v)) if v == "i" => IndexTag::I,
                Some(Tok::Ident(v)) if v == "j" => IndexTag::J,
                Some(Tok::Num(n)) => IndexTag::Concrete(n as usize),
                _ => return self.err("expected an index (i, j or a number) after '='"),
            };
            self.pos += 1;
            return Ok(Formula::Atom(Atom::new(name, tag)));
        }
        if self.eat(&Tok::LBracket) {
            match self.peek() {
                Some(Tok::Ident(_)) => self.pos += 1,
                _ => return self.err("expected a selector signal"),
            }
            self.expect(&Tok::RBracket, "']'")?;
            return Ok(Formula::Atom(Atom::new(name, IndexTag::I)));
        }
        Ok(Formula::Atom(classify_atom(&name)))
    }
}

/// Splits an identifier into signal name and index tag by its suffix.
pub fn classify_atom(ident: &str) -> Atom {
    if let Some((base, suffix)) = ident.rsplit_once('_') {
        if !base.is_empty() {
            match suffix {
                "i" => return Atom::new(base, IndexTag::I),
                "j" => return Atom::new(base, IndexTag::J),
                s if !s.is_empty() && s.chars().all(|c| c.is_ascii_digit()) => {
                    if let Ok(n) = s.parse() {
                        return Atom::new(base, IndexTag::Concrete(n));
                    }
                }
                _ => {}
            }
        }
    }
    Atom::global(ident)
}

/// Parses a formula; `line` and `col` locate `text` in its source for errors.
pub fn parse_formula_at(text: &str, line: usize, col: usize) -> Result<Formula, LtlError> {
    let toks = lex(text, line, col)?;
    let mut p = Parser {
        toks,
        pos: 0,
        line,
        end_col: col + text.chars().count(),
    };
    let f = p.iff()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input after formula");
    }
    Ok(f)
}

pub fn parse_formula(text: &str) -> Result<Formula, LtlError> {
    parse_formula_at(text, 1, 1)
}

/// Recognizes a leading `label:` on a clause line. Returns the label and
/// the column offset where the formula starts.
pub(crate) fn split_label(text: &str) -> (Option<String>, usize) {
    let trimmed = text.trim_start();
    let lead = text.len() - trimmed.len();
    let ident_len = trimmed
        .char_indices()
        .take_while(|(k, c)| {
            c.is_ascii_alphanumeric() || *c == '.' || *c == '_' || (*k == 0 && *c == '_')
        })
        .count();
    if ident_len > 0 {
        let after = &trimmed[ident_len..];
        let after_trim = after.trim_start();
        if after_trim.starts_with(':') {
            let label = trimmed[..ident_len].to_string();
            let offset = lead + ident_len + (after.len() - after_trim.len()) + 1;
            return (Some(label), offset);
        }
    }
    (None, 0)
}
