use std::ops::RangeInclusive;
use std::time::Duration;

use serde::Serialize;

use super::decode::decode_model;
use super::encode::{apply_gr1_direct, encode, hardcode_token, ConstraintSystem, Pin};
use super::SynthError;
use crate::ltl::{Formula, ParamSpec};
use crate::machine::{ProcessTemplate, Timing};
use crate::solve::{
    check_assignment, emit_smtlib, run_external, solve_builtin, BuiltinOptions, SolverOutcome,
    SolverStatus,
};
use crate::verify::{check_token_release, verify_parameterized, Report, VerifyOptions};

#[derive(Debug, Clone)]
pub enum SolverChoice {
    Builtin(BuiltinOptions),
    External { cmd: String, timeout: Duration },
}

impl Default for SolverChoice {
    fn default() -> Self {
        SolverChoice::Builtin(BuiltinOptions::default())
    }
}

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub gr1_direct: bool,
    pub hardcode_token: bool,
    pub solver: SolverChoice,
    /// Run parameterized verification on the model before reporting it.
    pub verify: bool,
    pub timing: Timing,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            gr1_direct: false,
            hardcode_token: false,
            solver: SolverChoice::default(),
            verify: true,
            timing: Timing::Synchronous,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundStatus {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundStat {
    pub bound: usize,
    pub gr1_direct: bool,
    pub status: BoundStatus,
    pub millis: u128,
    pub constraints: usize,
    pub automaton_states: usize,
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Model { template: ProcessTemplate, bound: usize },
    NotFoundUpTo(usize),
    Unknown { bound: usize, reason: String },
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub outcome: Outcome,
    pub stats: Vec<BoundStat>,
    /// Verification of the returned model, when requested.
    pub report: Option<Report>,
}

impl SynthesisResult {
    pub fn model(&self) -> Option<&ProcessTemplate> {
        match &self.outcome {
            Outcome::Model { template, .. } => Some(template),
            _ => None,
        }
    }
}

/// The constraint system for one bound with the requested optimizations.
pub fn build_system(
    spec: &ParamSpec,
    bound: usize,
    gr1_direct: bool,
    hardcode: bool,
    pins: &[Pin],
) -> Result<ConstraintSystem, SynthError> {
    let mut cs = encode(spec, bound)?;
    if gr1_direct {
        let classes = cs.gr1_classes();
        cs = apply_gr1_direct(&cs, &classes);
    }
    if hardcode {
        cs = hardcode_token(&cs);
    }
    cs.pin(pins.iter().copied())?;
    Ok(cs)
}

pub fn run_solver(cs: &ConstraintSystem, choice: &SolverChoice) -> Result<SolverOutcome, SynthError> {
    Ok(match choice {
        SolverChoice::Builtin(o) => solve_builtin(cs, *o)?,
        SolverChoice::External { cmd, timeout } => run_external(cs, cmd, &emit_smtlib(cs), *timeout)?,
    })
}

/// Assumptions a process's token release may rely on: the `G` conjuncts.
pub fn release_assumptions(spec: &ParamSpec) -> Vec<Formula> {
    spec.assumptions
        .iter()
        .map(|c| &c.formula)
        .filter(|f| matches!(f, Formula::Globally(_)))
        .cloned()
        .collect()
}

/// Checks a synthesized template against its source formulas.
pub fn post_verify(
    t: &ProcessTemplate,
    spec: &ParamSpec,
    timing: Timing,
) -> Result<Report, SynthError> {
    match &spec.origin {
        Some(origin) => Ok(verify_parameterized(
            t,
            None,
            origin,
            VerifyOptions {
                timing,
                all_instances: false,
            },
        )?),
        None => Ok(Report {
            verdicts: vec![check_token_release(t, &release_assumptions(spec))],
        }),
    }
}

/// Searches bounds in ascending order; see [`synthesize_pinned`].
pub fn synthesize(
    spec: &ParamSpec,
    bounds: RangeInclusive<usize>,
    opts: &SynthOptions,
) -> Result<SynthesisResult, SynthError> {
    synthesize_pinned(spec, bounds, opts, &[])
}

/// Bounded synthesis for a hub-reduced spec with extra pins. The first
/// satisfiable bound gives the model. If the direct GR(1) encoding finds
/// nothing in the range, the range is searched again without it.
pub fn synthesize_pinned(
    spec: &ParamSpec,
    bounds: RangeInclusive<usize>,
    opts: &SynthOptions,
    pins: &[Pin],
) -> Result<SynthesisResult, SynthError> {
    if bounds.is_empty() {
        return Err(SynthError::EmptyBoundRange);
    }
    let mut stats = Vec::new();
    let passes: &[bool] = if opts.gr1_direct { &[true, false] } else { &[false] };
    for &gr1 in passes {
        for bound in bounds.clone() {
            let cs = build_system(spec, bound, gr1, opts.hardcode_token, pins)?;
            let outcome = run_solver(&cs, &opts.solver)?;
            let status = match outcome.status {
                SolverStatus::Sat(_) => BoundStatus::Sat,
                SolverStatus::Unsat => BoundStatus::Unsat,
                SolverStatus::Unknown(_) => BoundStatus::Unknown,
            };
            stats.push(BoundStat {
                bound,
                gr1_direct: gr1,
                status,
                millis: outcome.millis,
                constraints: cs.constraints.len(),
                automaton_states: cs.nba.num_states(),
            });
            match outcome.status {
                SolverStatus::Unsat => continue,
                SolverStatus::Unknown(reason) => {
                    return Ok(SynthesisResult {
                        outcome: Outcome::Unknown { bound, reason },
                        stats,
                        report: None,
                    })
                }
                SolverStatus::Sat(asg) => {
                    if let Err(e) = check_assignment(&cs, &asg) {
                        return Err(SynthError::InconsistentAssignment(format!("{e:?}")));
                    }
                    let template = decode_model(&cs, &asg)?;
                    let report = if opts.verify {
                        let r = post_verify(&template, spec, opts.timing)?;
                        if !r.passed() {
                            return Err(SynthError::VerificationFailed(r.to_text()));
                        }
                        Some(r)
                    } else {
                        None
                    };
                    return Ok(SynthesisResult {
                        outcome: Outcome::Model { template, bound },
                        stats,
                        report,
                    });
                }
            }
        }
    }
    Ok(SynthesisResult {
        outcome: Outcome::NotFoundUpTo(*bounds.end()),
        stats,
        report: None,
    })
}
