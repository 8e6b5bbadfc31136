//! Backends for bounded-synthesis constraint systems.

mod builtin;
mod external;
mod smtlib;

use serde::{Deserialize, Serialize};

pub use builtin::{solve_builtin, BuiltinOptions};
pub use external::{parse_model, run_external};
pub use smtlib::emit_smtlib;

use crate::synth::{ConstraintSystem, Constraint, Pin};

/// Values for every function cell of a constraint system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    /// `delta[q][i]`.
    pub delta: Vec<Vec<usize>>,
    /// `out[q]`, a bitmask over the system's outputs.
    pub out: Vec<u64>,
    /// `rank[a][q]`, `-1` for unreachable pairs.
    pub rank: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverStatus {
    Sat(Assignment),
    Unsat,
    Unknown(String),
}

#[derive(Debug, Clone)]
pub struct SolverOutcome {
    pub status: SolverStatus,
    pub millis: u128,
    pub backend: String,
}

impl SolverOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self.status, SolverStatus::Sat(_))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("instance has {cells} transition cells, over the built-in cap of {cap}")]
    TooLarge { cells: usize, cap: usize },
    #[error("could not start solver '{cmd}': {message}")]
    Spawn { cmd: String, message: String },
    #[error("malformed solver output: {0}")]
    MalformedModel(String),
}

/// Why an assignment fails a constraint system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckFailure {
    Shape(String),
    Range(String),
    Pin(Pin),
    Constraint(usize, Constraint),
}

/// Evaluates every constraint and pin directly under `asg`.
pub fn check_assignment(cs: &ConstraintSystem, asg: &Assignment) -> Result<(), CheckFailure> {
    let n = cs.bound;
    let letters = cs.num_letters() as usize;
    let na = cs.nba.num_states();
    if asg.delta.len() != n || asg.delta.iter().any(|r| r.len() != letters) {
        return Err(CheckFailure::Shape("delta table".into()));
    }
    if asg.out.len() != n {
        return Err(CheckFailure::Shape("out table".into()));
    }
    if asg.rank.len() != na || asg.rank.iter().any(|r| r.len() != n) {
        return Err(CheckFailure::Shape("rank table".into()));
    }
    if let Some(t) = asg.delta.iter().flatten().find(|&&t| t >= n) {
        return Err(CheckFailure::Range(format!("delta value {t}")));
    }
    if asg.out.iter().any(|&o| o >> cs.num_outputs() != 0) {
        return Err(CheckFailure::Range("out value".into()));
    }
    let ceiling = cs.rank_ceiling();
    if let Some(r) = asg.rank.iter().flatten().find(|&&r| r < -1 || r > ceiling) {
        return Err(CheckFailure::Range(format!("rank value {r}")));
    }
    for p in &cs.pins {
        let ok = match *p {
            Pin::Delta { q, i, to } => asg.delta[q][i as usize] == to,
            Pin::Out { q, bit, value } => (asg.out[q] >> bit & 1 == 1) == value,
        };
        if !ok {
            return Err(CheckFailure::Pin(*p));
        }
    }
    let m = cs.num_outputs();
    for (k, c) in cs.constraints.iter().enumerate() {
        let ok = match c {
            Constraint::Reach { a, q } => asg.rank[*a][*q] >= 0,
            Constraint::Rank {
                q,
                i,
                a,
                b,
                guard,
                strict,
            } => {
                let r = asg.rank[*a][*q];
                if r >= 0 && guard.eval(asg.out[*q]) {
                    let t = asg.delta[*q][*i as usize];
                    let r2 = asg.rank[*b][t];
                    if *strict {
                        r2 > r
                    } else {
                        r2 >= r
                    }
                } else {
                    true
                }
            }
            Constraint::Step { q, i, guard } => {
                let t = asg.delta[*q][*i as usize];
                guard.eval(asg.out[*q] | asg.out[t] << m)
            }
            Constraint::State { q, guard } => guard.eval(asg.out[*q]),
        };
        if !ok {
            return Err(CheckFailure::Constraint(k, c.clone()));
        }
    }
    Ok(())
}
