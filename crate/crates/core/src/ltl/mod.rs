//! Indexed LTL: formulas, parsing, normal forms, lasso evaluation and
//! parameterized specifications.

mod eval;
mod formula;
mod parse;
mod print;
mod rewrite;
pub mod spec;
pub mod transform;

pub use eval::{eval_bits, eval_lasso};
pub use formula::{Atom, Formula, IndexTag};
pub use parse::{classify_atom, parse_formula, parse_formula_at};
pub use rewrite::{desugar, is_desugared, is_nnf, negate_nnf, nnf, simplify};
pub use spec::{parse_spec, Clause, ParamSpec, Role, Shape, RCV, SND, TOK};
pub use transform::{
    hub_reduce, localize_assumptions, localize_outputs, specialize_zero, LocalRule,
    OutputLocalization,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LtlError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("missing section [{0}]")]
    MissingSection(String),
    #[error("undeclared signal '{name}' (line {line})")]
    UndeclaredSignal { name: String, line: usize },
    #[error("signal '{0}' declared twice")]
    DuplicateSignal(String),
    #[error("signal '{name}' must be {expected}")]
    SignalKind { name: String, expected: &'static str },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("name '{0}' is not declared")]
    NameNotFound(String),
    #[error("wrong role: {0}")]
    Role(String),
}

impl LtlError {
    pub fn syntax(line: usize, col: usize, message: impl Into<String>) -> Self {
        LtlError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }
}
