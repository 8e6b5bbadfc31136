use super::encode::{ConstraintSystem, Pin};
use super::SynthError;
use crate::ltl::TOK;
use crate::machine::ProcessTemplate;
use crate::solve::Assignment;

/// Turns a solver assignment into a template. Token states get no
/// transition on inputs carrying `rcv`.
pub fn decode_model(cs: &ConstraintSystem, asg: &Assignment) -> Result<ProcessTemplate, SynthError> {
    let n = cs.bound;
    let tok = cs.tok_bit();
    let rcv = cs.rcv_mask();
    if asg.delta.len() != n || asg.out.len() != n {
        return Err(SynthError::InconsistentAssignment("table sizes differ from the bound".into()));
    }
    let outputs: Vec<String> = cs.outputs.iter().filter(|o| *o != TOK).cloned().collect();
    let bits: Vec<usize> = outputs
        .iter()
        .map(|o| cs.output_bit(o).expect("declared output"))
        .collect();
    let token: Vec<bool> = asg.out.iter().map(|o| o >> tok & 1 == 1).collect();
    let labels = asg
        .out
        .iter()
        .map(|o| {
            bits.iter()
                .enumerate()
                .filter(|(_, &b)| o >> b & 1 == 1)
                .map(|(k, _)| 1u64 << k)
                .sum()
        })
        .collect();
    let delta = (0..n)
        .map(|q| {
            (0..cs.num_letters())
                .map(|i| {
                    if token[q] && i & rcv != 0 {
                        None
                    } else {
                        asg.delta[q].get(i as usize).copied()
                    }
                })
                .collect()
        })
        .collect();
    let t = ProcessTemplate {
        local_inputs: cs.local_inputs.clone(),
        global_inputs: cs.global_inputs.clone(),
        outputs,
        token,
        labels,
        delta,
        init_token: 1,
        init_no_token: 0,
    };
    let violations = t.validate();
    if !violations.is_empty() {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(SynthError::InconsistentAssignment(msgs.join("; ")));
    }
    Ok(t)
}

/// Pins that force the constraint system's `delta` and `out` to describe
/// `t` (its first states), matching signals by name. `letters` limits which
/// input valuations get their transition pinned.
pub fn template_pins(
    cs: &ConstraintSystem,
    t: &ProcessTemplate,
    letters: impl Fn(u64) -> bool,
) -> Result<Vec<Pin>, SynthError> {
    if t.num_states() > cs.bound {
        return Err(SynthError::BoundTooSmall(cs.bound));
    }
    if t.init_no_token != 0 || t.init_token != 1 {
        return Err(SynthError::InconsistentAssignment(
            "pinned templates need state 0 as the initial state without the token and 1 with it".into(),
        ));
    }
    let inputs = cs.inputs();
    let map_in: Vec<usize> = inputs
        .iter()
        .map(|s| {
            t.input_bit(s)
                .ok_or_else(|| SynthError::SignalMismatch(s.clone()))
        })
        .collect::<Result<_, _>>()?;
    if map_in.len() != t.num_inputs() {
        return Err(SynthError::SignalMismatch("input count".into()));
    }
    let mut pins = Vec::new();
    for q in 0..t.num_states() {
        for (bit, name) in cs.outputs.iter().enumerate() {
            let value = t
                .output(q, name)
                .ok_or_else(|| SynthError::SignalMismatch(name.clone()))?;
            pins.push(Pin::Out { q, bit, value });
        }
        for i in 0..cs.num_letters() {
            if !letters(i) || cs.dont_care(t.token[q], i) {
                continue;
            }
            let ti: u64 = map_in
                .iter()
                .enumerate()
                .filter(|(k, _)| i >> k & 1 == 1)
                .map(|(_, &b)| 1u64 << b)
                .sum();
            if let Some(to) = t.step(q, ti) {
                pins.push(Pin::Delta { q, i, to });
            }
        }
    }
    Ok(pins)
}
