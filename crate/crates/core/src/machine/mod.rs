//! Process templates and token rings built from them.

mod io;
mod ring;
mod run;
mod template;

pub use io::{template_from_json, template_to_dot, template_to_json, TemplateIoError};
pub use ring::{compose_ring, Move, RingError, RingSystem, SysInput, Timing, Transition};
pub use run::{project_local_run, LocalRun, Run, RunStep};
pub use template::{minimal_template, ProcessTemplate, Violation};

/// Free-function form of [`ProcessTemplate::validate`].
pub fn validate_template(t: &ProcessTemplate) -> Vec<Violation> {
    t.validate()
}
