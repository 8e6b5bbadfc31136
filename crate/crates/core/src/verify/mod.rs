//! Model checking of composed rings and parameterized verification at the
//! cutoff sizes.

mod check;
mod cutoff;
mod param;
mod product;
mod structure;

pub use check::{
    as_single_process, counterexample_violates, model_check, model_check_process, split_invariants,
    Counterexample, Status, Verdict,
};
pub use cutoff::{cutoff_for, AssumptionClass, Indexing, SpecShape};
pub use param::{check_token_release, verify_parameterized, Report, VerifyError, VerifyOptions};
pub use product::{find_accepting_lasso, Lasso, LassoStep, ProductOptions, Structure, SysEdge};
pub use structure::{Filter, HubStructure, RingStructure};
