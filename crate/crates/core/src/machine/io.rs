//! Template interchange: JSON and DOT.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::template::ProcessTemplate;

#[derive(Debug, Serialize, Deserialize)]
struct StateJson {
    id: usize,
    token: bool,
    outputs: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TransitionJson {
    from: usize,
    to: usize,
    /// One character per input, `1` for set, in the order local then global.
    input: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct TemplateJson {
    local_inputs: Vec<String>,
    global_inputs: Vec<String>,
    outputs: Vec<String>,
    initial_token: usize,
    initial_no_token: usize,
    states: Vec<StateJson>,
    transitions: Vec<TransitionJson>,
}

#[derive(Debug, thiserror::Error)]
pub enum TemplateIoError {
    #[error("malformed template JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

fn bits_to_string(x: u64, width: usize) -> String {
    (0..width)
        .map(|k| if x >> k & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn template_to_json(t: &ProcessTemplate) -> String {
    let states = (0..t.num_states())
        .map(|q| StateJson {
            id: q,
            token: t.token[q],
            outputs: t
                .outputs
                .iter()
                .enumerate()
                .filter(|(b, _)| t.labels[q] >> b & 1 == 1)
                .map(|(_, n)| n.clone())
                .collect(),
        })
        .collect();
    let mut transitions = Vec::new();
    for q in 0..t.num_states() {
        for i in 0..t.num_letters() {
            if let Some(to) = t.step(q, i) {
                transitions.push(TransitionJson {
                    from: q,
                    to,
                    input: bits_to_string(i, t.num_inputs()),
                });
            }
        }
    }
    let j = TemplateJson {
        local_inputs: t.local_inputs.clone(),
        global_inputs: t.global_inputs.clone(),
        outputs: t.outputs.clone(),
        initial_token: t.init_token,
        initial_no_token: t.init_no_token,
        states,
        transitions,
    };
    serde_json::to_string_pretty(&j).expect("template serializes") + "\n"
}

/// Reads a template. Missing transitions stay undefined; `validate` reports them.
pub fn template_from_json(text: &str) -> Result<ProcessTemplate, TemplateIoError> {
    let j: TemplateJson = serde_json::from_str(text)?;
    let n = j.states.len();
    let width = j.local_inputs.len() + j.global_inputs.len();
    if width > 20 {
        return Err(TemplateIoError::Invalid(format!("{width} inputs is too many")));
    }
    let mut t = ProcessTemplate {
        local_inputs: j.local_inputs,
        global_inputs: j.global_inputs,
        outputs: j.outputs,
        token: vec![false; n],
        labels: vec![0; n],
        delta: vec![vec![None; 1 << width]; n],
        init_token: j.initial_token,
        init_no_token: j.initial_no_token,
    };
    for s in &j.states {
        if s.id >= n {
            return Err(TemplateIoError::Invalid(format!("state id {} out of range", s.id)));
        }
        t.token[s.id] = s.token;
        for o in &s.outputs {
            let b = t
                .output_bit(o)
                .ok_or_else(|| TemplateIoError::Invalid(format!("unknown output '{o}'")))?;
            t.labels[s.id] |= 1 << b;
        }
    }
    for tr in &j.transitions {
        if tr.from >= n || tr.to >= n {
            return Err(TemplateIoError::Invalid(format!(
                "transition {} -> {} out of range",
                tr.from, tr.to
            )));
        }
        if tr.input.len() != width || !tr.input.chars().all(|c| c == '0' || c == '1') {
            return Err(TemplateIoError::Invalid(format!("bad input string '{}'", tr.input)));
        }
        let i: u64 = tr
            .input
            .chars()
            .enumerate()
            .filter(|(_, c)| *c == '1')
            .map(|(k, _)| 1u64 << k)
            .sum();
        t.delta[tr.from][i as usize] = Some(tr.to);
    }
    Ok(t)
}

/// Merges input valuations into cubes: (care mask, values).
fn cubes(inputs: &[u64], width: usize) -> Vec<(u64, u64)> {
    let full = if width == 64 { u64::MAX } else { (1 << width) - 1 };
    let mut cur: Vec<(u64, u64)> = inputs.iter().map(|&i| (full, i)).collect();
    loop {
        let mut merged = false;
        let mut next: Vec<(u64, u64)> = Vec::new();
        let mut used = vec![false; cur.len()];
        for a in 0..cur.len() {
            for b in a + 1..cur.len() {
                let ((ma, va), (mb, vb)) = (cur[a], cur[b]);
                let diff = va ^ vb;
                if ma == mb && diff.count_ones() == 1 && diff & ma != 0 {
                    let c = (ma & !diff, va & !diff);
                    if !next.contains(&c) {
                        next.push(c);
                    }
                    used[a] = true;
                    used[b] = true;
                    merged = true;
                }
            }
        }
        for (k, c) in cur.iter().enumerate() {
            if !used[k] && !next.contains(c) {
                next.push(*c);
            }
        }
        if !merged {
            return next;
        }
        cur = next;
    }
}

pub fn template_to_dot(t: &ProcessTemplate) -> String {
    let names = t.input_names();
    let mut out = String::from("digraph template {\n");
    for q in 0..t.num_states() {
        let shape = if t.token[q] { "doublecircle" } else { "circle" };
        let label = format!("t{q}\\n{}", t.label_names(q).join(" "));
        let _ = writeln!(out, "  t{q} [shape={shape}, label=\"{label}\"];");
    }
    let _ = writeln!(out, "  init [shape=point];\n  init -> t{};", t.init_token);
    let _ = writeln!(out, "  init_n [shape=point];\n  init_n -> t{};", t.init_no_token);
    for q in 0..t.num_states() {
        let mut by_target: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
        for i in 0..t.num_letters() {
            if let Some(to) = t.step(q, i) {
                by_target.entry(to).or_default().push(i);
            }
        }
        for (to, ins) in by_target {
            let guard: Vec<String> = cubes(&ins, names.len())
                .into_iter()
                .map(|(mask, val)| {
                    let lits: Vec<String> = (0..names.len())
                        .filter(|b| mask >> b & 1 == 1)
                        .map(|b| {
                            if val >> b & 1 == 1 {
                                names[b].clone()
                            } else {
                                format!("!{}", names[b])
                            }
                        })
                        .collect();
                    if lits.is_empty() {
                        "true".to_string()
                    } else {
                        lits.join(" & ")
                    }
                })
                .collect();
            let _ = writeln!(out, "  t{q} -> t{to} [label=\"{}\"];", guard.join(" | "));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::template::minimal_template;

    #[test]
    fn json_round_trip() {
        let t = minimal_template(&["r", "rcv"], &["x"], &["g", "snd"]);
        let back = template_from_json(&template_to_json(&t)).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn dot_merges_cubes() {
        let t = minimal_template(&["r", "rcv"], &[], &["g", "snd"]);
        let dot = template_to_dot(&t);
        assert!(dot.contains("t0 -> t1 [label=\"rcv\"]"), "{dot}");
        assert!(dot.contains("t1 -> t0 [label=\"!rcv\"]"), "{dot}");
    }

    #[test]
    fn bad_json_rejected() {
        assert!(template_from_json("{").is_err());
    }
}
