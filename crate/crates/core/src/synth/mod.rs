//! Bounded synthesis of process templates from hub-reduced specs.

mod decode;
mod driver;
mod encode;
mod stages;

pub use decode::{decode_model, template_pins};
pub use driver::{
    build_system, post_verify, release_assumptions, run_solver, synthesize, synthesize_pinned,
    BoundStat, BoundStatus, Outcome, SolverChoice, SynthOptions, SynthesisResult,
};
pub use encode::{
    apply_gr1_direct, encode, hardcode_token, ConstraintSystem, Constraint, Pin, Problem,
};
pub use stages::{decompose_synthesize, parse_stage_file, stage_pins, Stage, StageDef};

use crate::ltl::LtlError;
use crate::solve::SolveError;
use crate::verify::VerifyError;

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("state bound {0} is too small: a template needs a token and a non-token state")]
    BoundTooSmall(usize),
    #[error("empty bound range")]
    EmptyBoundRange,
    #[error("synthesis needs a hub-reduced (monolithic) spec")]
    NotMonolithic,
    #[error("spec lacks the token signals tok, snd and rcv")]
    MissingTokenSignals,
    #[error("conflicting pin {0}")]
    ConflictingPin(String),
    #[error("signal '{0}' does not match between model and spec")]
    SignalMismatch(String),
    #[error("assignment does not decode to a well-formed template: {0}")]
    InconsistentAssignment(String),
    #[error("synthesized model failed verification:\n{0}")]
    VerificationFailed(String),
    #[error("stage file line {line}: {message}")]
    StageFile { line: usize, message: String },
    #[error("stage assumption must be an invariant over inputs: {0}")]
    StageAssumption(String),
    #[error("stage '{stage}' could not extend the previous model: {detail}")]
    StageRegression { stage: String, detail: String },
    #[error(transparent)]
    Spec(#[from] LtlError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}
