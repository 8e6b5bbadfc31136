use serde::Serialize;

use super::check::{model_check, model_check_process, Status, Verdict};
use crate::ltl::{Formula, IndexTag, ParamSpec, SND, TOK};
use crate::machine::{compose_ring, ProcessTemplate, RingError, Timing};

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Checks that every reachable token state eventually sends, for inputs
/// satisfying `assumptions` (one-indexed or untagged).
pub fn check_token_release(t: &ProcessTemplate, assumptions: &[Formula]) -> Verdict {
    let tok = Formula::var(TOK, IndexTag::Global);
    let snd = Formula::var(SND, IndexTag::Global);
    let prop = Formula::globally(Formula::implies(tok, Formula::eventually(snd)));
    model_check_process(t, "token-release", &prop, assumptions)
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub timing: Timing,
    /// Instantiate every vertex and pair instead of relying on rotation.
    pub all_instances: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            timing: Timing::Synchronous,
            all_instances: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(Verdict::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.passed())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let status = match v.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Unsupported => "UNSUPPORTED",
            };
            let at: Vec<String> = v.vertices.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!(
                "{status:<11} {:<16} n={} {:?} at [{}]",
                v.property,
                v.size,
                v.timing,
                at.join(",")
            ));
            if let Some(note) = &v.note {
                out.push_str(&format!("  ({note})"));
            }
            out.push('\n');
        }
        let bad = self.failures().count();
        out.push_str(&format!("{} checks, {} not passed\n", self.verdicts.len(), bad));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn formulas(cs: &[crate::ltl::Clause]) -> Vec<Formula> {
    cs.iter().map(|c| c.formula.clone()).collect()
}

/// Assumptions of the form `G ...` that constrain a process on its own,
/// leaving out initial-state assumptions and the token-arrival fairness.
fn release_assumptions(spec: &ParamSpec) -> Vec<Formula> {
    spec.assumptions
        .iter()
        .map(|c| &c.formula)
        .filter(|f| matches!(f, Formula::Globally(_)))
        .cloned()
        .collect()
}

/// Per-clause one-indexed checks of `spec` at vertex `v`.
fn one_indexed(
    ring: &crate::machine::RingSystem,
    spec: &ParamSpec,
    v: usize,
    out: &mut Vec<Verdict>,
) {
    let ass = formulas(&spec.assumptions);
    let mut ass_fair = ass.clone();
    ass_fair.extend(formulas(&spec.fairness));
    for c in spec.token_ring_guarantees() {
        out.push(model_check(ring, &c.name(), &c.formula, v, None, &ass));
    }
    for c in &spec.guarantees {
        if !c.formula.index_tags().contains(&IndexTag::J) {
            out.push(model_check(ring, &c.name(), &c.formula, v, None, &ass_fair));
        }
    }
}

fn pairs(n: usize, all: bool) -> Vec<(usize, usize)> {
    if all {
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect()
    } else {
        (1..n).map(|j| (0, j)).collect()
    }
}

/// Verifies the templates against their specifications at the cutoff sizes:
/// token release on each template, one-indexed clauses at size 2, and
/// two-indexed clauses plus mutual exclusion of the mutex output at size 4.
///
/// With a zero template, vertex 0 runs it and is checked against
/// `zero_spec`; every other vertex runs `generic`. Rotation symmetry no
/// longer holds then, so all pairs are checked.
pub fn verify_parameterized(
    generic: &ProcessTemplate,
    zero: Option<(&ProcessTemplate, &ParamSpec)>,
    spec: &ParamSpec,
    opts: VerifyOptions,
) -> Result<Report, VerifyError> {
    let mut verdicts = Vec::new();
    let mut release = check_token_release(generic, &release_assumptions(spec));
    release.property = "token-release".into();
    verdicts.push(release);
    if let Some((tz, sz)) = zero {
        let mut r = check_token_release(tz, &release_assumptions(sz));
        r.property = "token-release[zero]".into();
        verdicts.push(r);
    }

    let ring2 = compose_ring(generic, zero.map(|z| z.0), 2, opts.timing)?;
    match zero {
        Some((_, sz)) => {
            one_indexed(&ring2, sz, 0, &mut verdicts);
            one_indexed(&ring2, spec, 1, &mut verdicts);
        }
        None => {
            let vs: Vec<usize> = if opts.all_instances { vec![0, 1] } else { vec![0] };
            for v in vs {
                one_indexed(&ring2, spec, v, &mut verdicts);
            }
        }
    }

    let mut two: Vec<(String, Formula)> = spec
        .guarantees
        .iter()
        .filter(|c| c.formula.index_tags().contains(&IndexTag::J))
        .map(|c| (c.name(), c.formula.clone()))
        .collect();
    if let Some(m) = &spec.mutex {
        let f = Formula::globally(Formula::not(Formula::and(
            Formula::var(m, IndexTag::I),
            Formula::var(m, IndexTag::J),
        )));
        two.push((format!("mutex({m})"), f));
    }
    if !two.is_empty() {
        let ring4 = compose_ring(generic, zero.map(|z| z.0), 4, opts.timing)?;
        let mut ass = formulas(&spec.assumptions);
        ass.extend(formulas(&spec.fairness));
        let all = opts.all_instances || zero.is_some();
        for (i, j) in pairs(4, all) {
            if all && i > j {
                continue;
            }
            for (id, f) in &two {
                verdicts.push(model_check(&ring4, id, f, i, Some(j), &ass));
            }
        }
    }
    Ok(Report { verdicts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_spec;
    use crate::machine::minimal_template;

    const SPEC: &str = "\
[INPUTS]
local: r, rcv
[OUTPUTS]
g, tok, snd
[FAIRNESS]
A5: G F tok_i
[GUARANTEE]
G12: G(g_i -> tok_i)
[MUTEX]
g
";

    fn granter() -> ProcessTemplate {
        let mut t = minimal_template(&["r", "rcv"], &[], &["g", "snd"]);
        t.labels[1] |= 1;
        t
    }

    #[test]
    fn token_release() {
        assert!(check_token_release(&granter(), &[]).passed());
        // a token state that never sends
        let mut t = granter();
        t.labels[1] &= !0b10;
        t.delta[1] = t.delta[1].iter().map(|x| x.map(|_| 1)).collect();
        assert!(t.validate().is_empty());
        assert_eq!(check_token_release(&t, &[]).status, Status::Fail);
    }

    #[test]
    fn unreachable_token_state_is_ignored() {
        let mut t = granter();
        t.token.push(true);
        t.labels.push(0);
        t.delta.push(t.delta[1].iter().map(|x| x.map(|_| 2)).collect());
        assert!(t.validate().is_empty());
        assert!(check_token_release(&t, &[]).passed());
    }

    #[test]
    fn granter_verifies() {
        let spec = parse_spec(SPEC).unwrap();
        let r = verify_parameterized(&granter(), None, &spec, VerifyOptions::default()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.verdicts.iter().any(|v| v.property == "mutex(g)" && v.size == 4));
    }

    #[test]
    fn g12_violation_found() {
        let spec = parse_spec(SPEC).unwrap();
        let mut t = granter();
        t.labels[0] |= 1;
        let r = verify_parameterized(&t, None, &spec, VerifyOptions::default()).unwrap();
        let failed: Vec<&str> = r.failures().map(|v| v.property.as_str()).collect();
        assert!(failed.contains(&"G12"));
        assert!(failed.contains(&"mutex(g)"));
        assert!(r.to_json()["verdicts"].as_array().unwrap().len() > 3);
    }
}
