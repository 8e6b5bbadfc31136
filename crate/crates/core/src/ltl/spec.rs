//! Parameterized specifications and the line-oriented spec-file format.
//!
//! ```text
//! # comment
//! [INPUTS]    local: hbusreq, hlock, rcv; global: hready
//! [OUTPUTS]   hgrant, tok, snd
//! [MUTEX]     hgrant
//! [ASSUME]
//! A3: G(hlock_i -> hbusreq_i)
//! [FAIRNESS]
//! A5: G F tok_i
//! [GUARANTEE] G12: G(hgrant_i -> tok_i)
//! ```
//!
//! Formulas go one per line, either on the section header line or below it.
//! `[FAIRNESS]` clauses only guard the functional guarantees, never the
//! token-ring guarantees. `[ROLE]` is one of `generic`, `zero`, `monolithic`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::formula::{Atom, Formula, IndexTag};
use super::parse::{parse_formula_at, split_label};
use super::LtlError;

pub const TOK: &str = "tok";
pub const SND: &str = "snd";
pub const RCV: &str = "rcv";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Clause {
    pub label: Option<String>,
    pub formula: Formula,
    /// Source line, 0 when synthesized by a transformation.
    #[serde(default)]
    pub line: usize,
}

impl PartialEq for Clause {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label && self.formula == other.formula
    }
}

impl Clause {
    pub fn new(label: &str, formula: Formula) -> Self {
        Clause {
            label: Some(label.to_string()),
            formula,
            line: 0,
        }
    }

    pub fn unlabeled(formula: Formula) -> Self {
        Clause {
            label: None,
            formula,
            line: 0,
        }
    }

    pub fn name(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| self.formula.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    OneIndexed,
    TwoIndexed,
    /// Mentions concrete process indices.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    GenericProcess,
    ZeroProcess,
    MonolithicAfterHub,
}

impl Role {
    fn keyword(self) -> &'static str {
        match self {
            Role::GenericProcess => "generic",
            Role::ZeroProcess => "zero",
            Role::MonolithicAfterHub => "monolithic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub local_inputs: Vec<String>,
    pub global_inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub global_outputs: Vec<String>,
    pub assumptions: Vec<Clause>,
    pub fairness: Vec<Clause>,
    pub guarantees: Vec<Clause>,
    pub role: Role,
    /// Output whose holders must be mutually exclusive across the ring.
    pub mutex: Option<String>,
    /// The one-indexed specification this one was hub-reduced from.
    #[serde(skip)]
    pub origin: Option<Box<ParamSpec>>,
}

impl ParamSpec {
    pub fn empty() -> Self {
        ParamSpec {
            local_inputs: vec![],
            global_inputs: vec![],
            outputs: vec![],
            global_outputs: vec![],
            assumptions: vec![],
            fairness: vec![],
            guarantees: vec![],
            role: Role::GenericProcess,
            mutex: None,
            origin: None,
        }
    }

    pub fn all_clauses(&self) -> impl Iterator<Item = &Clause> {
        self.assumptions
            .iter()
            .chain(&self.fairness)
            .chain(&self.guarantees)
    }

    pub fn inputs(&self) -> Vec<String> {
        self.local_inputs
            .iter()
            .chain(&self.global_inputs)
            .cloned()
            .collect()
    }

    pub fn all_outputs(&self) -> Vec<String> {
        self.outputs
            .iter()
            .chain(&self.global_outputs)
            .cloned()
            .collect()
    }

    pub fn is_input(&self, name: &str) -> bool {
        self.local_inputs.iter().chain(&self.global_inputs).any(|s| s == name)
    }

    pub fn is_output(&self, name: &str) -> bool {
        self.outputs.iter().chain(&self.global_outputs).any(|s| s == name)
    }

    pub fn shape(&self) -> Shape {
        let tags: BTreeSet<IndexTag> = self
            .all_clauses()
            .flat_map(|c| c.formula.index_tags())
            .collect();
        if tags.iter().any(|t| matches!(t, IndexTag::Concrete(_))) {
            Shape::Mixed
        } else if tags.contains(&IndexTag::J) {
            Shape::TwoIndexed
        } else {
            Shape::OneIndexed
        }
    }

    /// Localized specs carry the token-arrival premise.
    pub fn is_localized(&self) -> bool {
        !self.fairness.is_empty()
    }

    pub fn has_token_signals(&self) -> bool {
        self.outputs.iter().any(|s| s == TOK)
            && self.outputs.iter().any(|s| s == SND)
            && self.local_inputs.iter().any(|s| s == RCV)
    }

    /// Index tag used for process-local atoms in this spec.
    pub fn local_tag(&self) -> IndexTag {
        match self.role {
            Role::MonolithicAfterHub => IndexTag::Global,
            _ => IndexTag::I,
        }
    }

    /// The token-ring guarantees over the process's own token signals, or
    /// nothing when the declarations lack `tok`, `snd` and `rcv`.
    pub fn token_ring_guarantees(&self) -> Vec<Clause> {
        if !self.has_token_signals() {
            return vec![];
        }
        let t = self.local_tag();
        let tok = || Formula::var(TOK, t);
        let snd = || Formula::var(SND, t);
        let rcv = || Formula::var(RCV, t);
        vec![
            Clause::new("TR1", Formula::globally(Formula::implies(snd(), tok()))),
            Clause::new(
                "TR2",
                Formula::globally(Formula::implies(
                    Formula::and(tok(), Formula::not(snd())),
                    Formula::next(tok()),
                )),
            ),
            Clause::new(
                "TR3",
                Formula::globally(Formula::implies(
                    Formula::and(Formula::not(tok()), Formula::not(rcv())),
                    Formula::next(Formula::not(tok())),
                )),
            ),
            Clause::new(
                "TR4",
                Formula::globally(Formula::implies(tok(), Formula::eventually(snd()))),
            ),
        ]
    }

    /// `(ass -> TR) & (ass & fair -> gua)` as one formula.
    pub fn formula(&self) -> Formula {
        let ass = Formula::conjunction(self.assumptions.iter().map(|c| c.formula.clone()));
        let fair = Formula::conjunction(self.fairness.iter().map(|c| c.formula.clone()));
        let tr = self.token_ring_guarantees();
        let gua = Formula::conjunction(self.guarantees.iter().map(|c| c.formula.clone()));
        let functional = Formula::implies(Formula::and(ass.clone(), fair), gua);
        if tr.is_empty() {
            functional
        } else {
            let tr = Formula::conjunction(tr.into_iter().map(|c| c.formula));
            Formula::and(Formula::implies(ass, tr), functional)
        }
    }

    pub fn clause(&self, label: &str) -> Option<&Clause> {
        self.all_clauses()
            .find(|c| c.label.as_deref() == Some(label))
    }

    /// Checks declarations against the formulas.
    pub fn validate(&self) -> Result<(), LtlError> {
        let mut seen = BTreeSet::new();
        for name in self
            .local_inputs
            .iter()
            .chain(&self.global_inputs)
            .chain(&self.outputs)
            .chain(&self.global_outputs)
        {
            if !seen.insert(name.as_str()) {
                return Err(LtlError::DuplicateSignal(name.clone()));
            }
        }
        if self.is_output(RCV) || self.global_inputs.iter().any(|s| s == RCV) {
            return Err(LtlError::SignalKind {
                name: RCV.into(),
                expected: "a local input",
            });
        }
        if self.is_input(SND) {
            return Err(LtlError::SignalKind {
                name: SND.into(),
                expected: "an output",
            });
        }
        if self.is_input(TOK) {
            return Err(LtlError::SignalKind {
                name: TOK.into(),
                expected: "an output",
            });
        }
        if let Some(m) = &self.mutex {
            if !self.is_output(m) {
                return Err(LtlError::UndeclaredSignal {
                    name: m.clone(),
                    line: 0,
                });
            }
        }
        for c in self.all_clauses() {
            for a in c.formula.atoms() {
                if !seen.contains(a.name.as_str()) {
                    return Err(LtlError::UndeclaredSignal {
                        name: a.name,
                        line: c.line,
                    });
                }
            }
        }
        Ok(())
    }

    /// Renders in the spec-file format; `parse_spec` reads it back.
    pub fn to_spec_text(&self) -> String {
        let mut out = String::new();
        let list = |v: &[String]| v.join(", ");
        let _ = writeln!(
            out,
            "[INPUTS] local: {}; global: {}",
            list(&self.local_inputs),
            list(&self.global_inputs)
        );
        let _ = writeln!(
            out,
            "[OUTPUTS] local: {}; global: {}",
            list(&self.outputs),
            list(&self.global_outputs)
        );
        let _ = writeln!(out, "[ROLE] {}", self.role.keyword());
        if let Some(m) = &self.mutex {
            let _ = writeln!(out, "[MUTEX] {m}");
        }
        for (header, clauses) in [
            ("[ASSUME]", &self.assumptions),
            ("[FAIRNESS]", &self.fairness),
            ("[GUARANTEE]", &self.guarantees),
        ] {
            if clauses.is_empty() {
                continue;
            }
            let _ = writeln!(out, "{header}");
            for c in clauses {
                match &c.label {
                    Some(l) => {
                        let _ = writeln!(out, "{l}: {}", c.formula);
                    }
                    None => {
                        let _ = writeln!(out, "{}", c.formula);
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Inputs,
    Outputs,
    Assume,
    Fairness,
    Guarantee,
    Mutex,
    Role,
}

fn parse_names(text: &str) -> Vec<String> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// `a, b` or `local: a, b; global: c`. Returns (local, global).
fn parse_signal_decl(text: &str, line: usize) -> Result<(Vec<String>, Vec<String>), LtlError> {
    let mut local = vec![];
    let mut global = vec![];
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some(rest) = part.strip_prefix("local:") {
            local.extend(parse_names(rest));
        } else if let Some(rest) = part.strip_prefix("global:") {
            global.extend(parse_names(rest));
        } else if part.contains(':') {
            return Err(LtlError::syntax(
                line,
                1,
                format!("unknown signal group in '{part}'"),
            ));
        } else {
            local.extend(parse_names(part));
        }
    }
    for n in local.iter().chain(&global) {
        if !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(LtlError::syntax(line, 1, format!("bad signal name '{n}'")));
        }
    }
    Ok((local, global))
}

/// Parses a spec file. `[OUTPUTS]` is mandatory.
pub fn parse_spec(text: &str) -> Result<ParamSpec, LtlError> {
    let mut spec = ParamSpec::empty();
    let mut section = Section::None;
    let mut saw_outputs = false;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let mut body = line;
        let mut col = 1;
        let trimmed = line.trim_start();
        if trimmed.starts_with('[') && !trimmed.starts_with("[]") {
            let close = trimmed.find(']').ok_or_else(|| {
                LtlError::syntax(line_no, 1, "unterminated section header")
            })?;
            let name = &trimmed[1..close];
            section = match name {
                "INPUTS" => Section::Inputs,
                "OUTPUTS" => {
                    saw_outputs = true;
                    Section::Outputs
                }
                "ASSUME" => Section::Assume,
                "FAIRNESS" => Section::Fairness,
                "GUARANTEE" => Section::Guarantee,
                "MUTEX" => Section::Mutex,
                "ROLE" => Section::Role,
                other => {
                    return Err(LtlError::syntax(
                        line_no,
                        1,
                        format!("unknown section [{other}]"),
                    ))
                }
            };
            let consumed = line.len() - trimmed.len() + close + 1;
            body = &line[consumed..];
            col = consumed + 1;
            if body.trim().is_empty() {
                continue;
            }
        }
        match section {
            Section::None => {
                return Err(LtlError::syntax(line_no, 1, "content before any section"))
            }
            Section::Inputs => {
                let (l, g) = parse_signal_decl(body, line_no)?;
                spec.local_inputs.extend(l);
                spec.global_inputs.extend(g);
            }
            Section::Outputs => {
                let (l, g) = parse_signal_decl(body, line_no)?;
                spec.outputs.extend(l);
                spec.global_outputs.extend(g);
            }
            Section::Mutex => spec.mutex = Some(body.trim().to_string()),
            Section::Role => {
                spec.role = match body.trim() {
                    "generic" => Role::GenericProcess,
                    "zero" => Role::ZeroProcess,
                    "monolithic" => Role::MonolithicAfterHub,
                    other => {
                        return Err(LtlError::syntax(
                            line_no,
                            col,
                            format!("unknown role '{other}'"),
                        ))
                    }
                }
            }
            Section::Assume | Section::Fairness | Section::Guarantee => {
                let (label, offset) = split_label(body);
                let formula = parse_formula_at(&body[offset..], line_no, col + offset)?;
                let clause = Clause {
                    label,
                    formula,
                    line: line_no,
                };
                match section {
                    Section::Assume => spec.assumptions.push(clause),
                    Section::Fairness => spec.fairness.push(clause),
                    _ => spec.guarantees.push(clause),
                }
            }
        }
    }
    if !saw_outputs {
        return Err(LtlError::MissingSection("OUTPUTS".into()));
    }
    spec.validate()?;
    Ok(spec)
}

/// Atom over a declared signal with its declared local tag.
pub fn local_atom(spec: &ParamSpec, name: &str) -> Formula {
    Formula::Atom(Atom::new(name, spec.local_tag()))
}
