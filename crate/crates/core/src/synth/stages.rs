//! Decompositional synthesis: each stage solves its process spec under extra
//! invariant assumptions and the next stage starts from its model.
//!
//! Stage file format:
//!
//! ```text
//! # comment
//! [STAGE lock-burst4]
//! spec: amba_i.spec
//! assume: G(hlock_i & hburst_b4_i)
//! [STAGE full]
//! spec: amba_i.spec
//! ```
//!
//! A stage may also carry `model: file.json` (template interchange format);
//! that stage is then taken as solved and only its model is carried on.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use super::decode::template_pins;
use super::driver::{build_system, synthesize_pinned, Outcome, SynthOptions, SynthesisResult};
use super::SynthError;
use crate::automata::{classify_gr1, Gr1Class, Guard};
use crate::ltl::{hub_reduce, parse_formula_at, Atom, Clause, Formula, ParamSpec};
use crate::machine::ProcessTemplate;

#[derive(Debug, Clone, PartialEq)]
pub struct StageDef {
    pub label: String,
    pub spec_path: PathBuf,
    pub extra: Vec<Formula>,
    pub model_path: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Stage {
    pub label: String,
    /// One-indexed spec, without the extra assumptions.
    pub spec: ParamSpec,
    pub extra: Vec<Formula>,
    /// A model from an earlier run that stands in for synthesis.
    pub model: Option<ProcessTemplate>,
}

impl Stage {
    /// The stage spec: `spec` with `extra` added as assumptions.
    pub fn constrained_spec(&self) -> ParamSpec {
        let mut s = self.spec.clone();
        for (k, f) in self.extra.iter().enumerate() {
            s.assumptions
                .push(Clause::new(&format!("{}.{}", self.label, k + 1), f.clone()));
        }
        s
    }
}

/// Parses a stage file; relative paths are resolved against `base`.
pub fn parse_stage_file(text: &str, base: &Path) -> Result<Vec<StageDef>, SynthError> {
    let mut stages: Vec<StageDef> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| SynthError::StageFile {
            line: line_no,
            message: msg.to_string(),
        };
        if let Some(rest) = line.strip_prefix("[STAGE") {
            let label = rest
                .strip_suffix(']')
                .ok_or_else(|| bad("expected ']'"))?
                .trim();
            let label = if label.is_empty() {
                format!("stage{}", stages.len() + 1)
            } else {
                label.to_string()
            };
            stages.push(StageDef {
                label,
                spec_path: PathBuf::new(),
                extra: vec![],
                model_path: None,
            });
            continue;
        }
        let stage = stages.last_mut().ok_or_else(|| bad("entry before the first [STAGE]"))?;
        let (key, value) = line.split_once(':').ok_or_else(|| bad("expected 'key: value'"))?;
        let value = value.trim();
        match key.trim() {
            "spec" => stage.spec_path = base.join(value),
            "model" => stage.model_path = Some(base.join(value)),
            "assume" => {
                let col = raw.find(value).unwrap_or(0) + 1;
                let f = parse_formula_at(value, line_no, col)
                    .map_err(|e| bad(&e.to_string()))?;
                stage.extra.push(f);
            }
            other => return Err(bad(&format!("unknown key '{other}'"))),
        }
    }
    if let Some(s) = stages.iter().find(|s| s.spec_path.as_os_str().is_empty()) {
        return Err(SynthError::StageFile {
            line: 0,
            message: format!("stage '{}' has no spec", s.label),
        });
    }
    if stages.is_empty() {
        return Err(SynthError::StageFile {
            line: 0,
            message: "no stages".into(),
        });
    }
    Ok(stages)
}

/// Guard over the stage system's input bits for the invariant bodies of
/// `extra`. Every extra assumption must be `G α` with `α` over inputs.
fn invariant_filter(spec: &ParamSpec, extra: &[Formula]) -> Result<(Vec<Atom>, Guard), SynthError> {
    let inputs: BTreeSet<String> = spec.inputs().into_iter().collect();
    let atoms: Vec<Atom> = spec
        .inputs()
        .iter()
        .map(|s| Atom::global(s.as_str()))
        .collect();
    let mut guard = Guard::True;
    for f in extra {
        let erased = f.retag(|_| crate::ltl::IndexTag::Global);
        match classify_gr1(&erased, &inputs) {
            Gr1Class::SimpleAssumption(alpha) => {
                let g = Guard::from_formula(&alpha, &atoms).expect("propositional body");
                guard = Guard::and(guard, g);
            }
            _ => return Err(SynthError::StageAssumption(f.to_string())),
        }
    }
    Ok((atoms, guard))
}

/// Pins carrying `prev` into the next stage: its outputs, and its
/// transitions on inputs that satisfy the previous stage's assumptions.
pub fn stage_pins(
    cs: &super::ConstraintSystem,
    prev: &ProcessTemplate,
    prev_stage: &Stage,
) -> Result<Vec<super::Pin>, SynthError> {
    let (_, guard) = invariant_filter(&prev_stage.spec, &prev_stage.extra)?;
    let inputs = prev_stage.spec.inputs();
    // guard variables follow the declared input order; map to the system's
    let order: Vec<Option<usize>> = inputs.iter().map(|s| cs.input_bit(s)).collect();
    template_pins(cs, prev, |i| {
        let mut v = 0u64;
        for (k, b) in order.iter().enumerate() {
            if b.is_some_and(|b| i >> b & 1 == 1) {
                v |= 1 << k;
            }
        }
        guard.eval(v)
    })
}

/// Runs the stages in order. Stage 1 starts from scratch; stage `k` searches
/// bounds from the previous model's size up and pins that model.
pub fn decompose_synthesize(
    stages: &[Stage],
    bounds: RangeInclusive<usize>,
    opts: &SynthOptions,
) -> Result<Vec<SynthesisResult>, SynthError> {
    let mut results = Vec::new();
    let mut prev: Option<(ProcessTemplate, &Stage)> = None;
    for (k, stage) in stages.iter().enumerate() {
        let spec = stage.constrained_spec();
        let mono = hub_reduce(&spec)?;
        if let Some(model) = &stage.model {
            prev = Some((model.clone(), stage));
            continue;
        }
        let lo = prev
            .as_ref()
            .map_or(*bounds.start(), |(t, _)| t.num_states().max(*bounds.start()));
        let range = lo..=*bounds.end().max(&lo);
        let result = match &prev {
            None => synthesize_pinned(&mono, range, opts, &[])?,
            Some((t, ps)) => {
                // pins depend on the bound only through the state count
                let probe = build_system(&mono, lo, false, false, &[])?;
                let pins = stage_pins(&probe, t, ps)?;
                synthesize_pinned(&mono, range, opts, &pins)?
            }
        };
        match &result.outcome {
            Outcome::Model { template, .. } => {
                prev = Some((template.clone(), stage));
                results.push(result);
            }
            _ if k > 0 => {
                return Err(SynthError::StageRegression {
                    stage: stage.label.clone(),
                    detail: outcome_text(&result.outcome),
                })
            }
            _ => {
                results.push(result);
                return Ok(results);
            }
        }
    }
    Ok(results)
}

fn outcome_text(o: &Outcome) -> String {
    match o {
        Outcome::Model { bound, .. } => format!("model with {bound} states"),
        Outcome::NotFoundUpTo(b) => format!("not found up to {b}"),
        Outcome::Unknown { bound, reason } => format!("unknown at bound {bound}: {reason}"),
    }
}
