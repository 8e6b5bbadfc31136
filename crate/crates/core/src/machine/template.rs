use std::fmt;

use serde::Serialize;

use crate::ltl::{RCV, SND, TOK};

/// Moore-style process template with a token partition.
///
/// Input valuations are bitmasks over `local_inputs` followed by
/// `global_inputs`; output valuations are bitmasks over `outputs`. The token
/// flag is kept separately in `token` and is not an entry of `outputs`.
/// `delta[q][i]` is `None` where the template has no transition, which is
/// required for token states on inputs carrying `rcv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessTemplate {
    pub local_inputs: Vec<String>,
    pub global_inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub token: Vec<bool>,
    pub labels: Vec<u64>,
    pub delta: Vec<Vec<Option<usize>>>,
    pub init_token: usize,
    pub init_no_token: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    MissingSignal(&'static str),
    /// The token or non-token partition is empty.
    EmptyPartition { token: bool },
    BadInitial { state: usize, token: bool },
    SndWithoutToken { state: usize },
    Typing { state: usize, input: u64, target: usize },
    NonTerminating { state: usize, input: u64 },
    ReceiveWithToken { state: usize, input: u64 },
    OutOfRange { state: usize, input: u64, target: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingSignal(s) => write!(f, "template lacks signal {s}"),
            Violation::EmptyPartition { token: true } => write!(f, "(i) no token state"),
            Violation::EmptyPartition { token: false } => write!(f, "(i) no non-token state"),
            Violation::BadInitial { state, token } => {
                write!(f, "(ii) initial state {state} has token={}", !token)
            }
            Violation::SndWithoutToken { state } => write!(f, "(iii) snd in non-token state {state}"),
            Violation::Typing { state, input, target } => {
                write!(f, "(iv) transition {state} -[{input:#b}]-> {target} breaks token typing")
            }
            Violation::NonTerminating { state, input } => {
                write!(f, "(iv) state {state} has no successor on input {input:#b}")
            }
            Violation::ReceiveWithToken { state, input } => {
                write!(f, "(iv) token state {state} moves on rcv input {input:#b}")
            }
            Violation::OutOfRange { state, input, target } => {
                write!(f, "transition {state} -[{input:#b}]-> {target} leaves the state set")
            }
        }
    }
}

impl ProcessTemplate {
    pub fn num_states(&self) -> usize {
        self.token.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.local_inputs.len() + self.global_inputs.len()
    }

    pub fn num_letters(&self) -> u64 {
        1 << self.num_inputs()
    }

    pub fn input_names(&self) -> Vec<String> {
        self.local_inputs
            .iter()
            .chain(&self.global_inputs)
            .cloned()
            .collect()
    }

    pub fn input_bit(&self, name: &str) -> Option<usize> {
        self.local_inputs
            .iter()
            .chain(&self.global_inputs)
            .position(|s| s == name)
    }

    pub fn output_bit(&self, name: &str) -> Option<usize> {
        self.outputs.iter().position(|s| s == name)
    }

    pub fn rcv_mask(&self) -> u64 {
        self.input_bit(RCV).map_or(0, |b| 1 << b)
    }

    pub fn sends(&self, q: usize) -> bool {
        self.output_bit(SND)
            .is_some_and(|b| self.labels[q] >> b & 1 == 1)
    }

    /// Value of an output signal, or of `tok`, in state `q`.
    pub fn output(&self, q: usize, name: &str) -> Option<bool> {
        if name == TOK {
            return Some(self.token[q]);
        }
        self.output_bit(name).map(|b| self.labels[q] >> b & 1 == 1)
    }

    pub fn step(&self, q: usize, input: u64) -> Option<usize> {
        self.delta[q][input as usize]
    }

    /// Lists the violated well-formedness conditions, empty iff well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let Some(_) = self.input_bit(RCV) else {
            out.push(Violation::MissingSignal(RCV));
            return out;
        };
        if self.output_bit(SND).is_none() {
            out.push(Violation::MissingSignal(SND));
            return out;
        }
        let n = self.num_states();
        for tok in [true, false] {
            if !self.token.contains(&tok) {
                out.push(Violation::EmptyPartition { token: tok });
            }
        }
        if self.init_token >= n || !self.token[self.init_token] {
            out.push(Violation::BadInitial {
                state: self.init_token,
                token: true,
            });
        }
        if self.init_no_token >= n || self.token[self.init_no_token] {
            out.push(Violation::BadInitial {
                state: self.init_no_token,
                token: false,
            });
        }
        let rcv = self.rcv_mask();
        for q in 0..n {
            if !self.token[q] && self.sends(q) {
                out.push(Violation::SndWithoutToken { state: q });
            }
            for input in 0..self.num_letters() {
                let has_rcv = input & rcv != 0;
                match self.step(q, input) {
                    None => {
                        if !(self.token[q] && has_rcv) {
                            out.push(Violation::NonTerminating { state: q, input });
                        }
                    }
                    Some(t) if t >= n => out.push(Violation::OutOfRange {
                        state: q,
                        input,
                        target: t,
                    }),
                    Some(t) => {
                        let want_token = match (self.token[q], has_rcv) {
                            (true, true) => {
                                out.push(Violation::ReceiveWithToken { state: q, input });
                                continue;
                            }
                            (true, false) => !self.sends(q),
                            (false, true) => true,
                            (false, false) => false,
                        };
                        if self.token[t] != want_token {
                            out.push(Violation::Typing {
                                state: q,
                                input,
                                target: t,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// States reachable from either initial state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.init_token, self.init_no_token];
        while let Some(q) = stack.pop() {
            if q >= seen.len() || seen[q] {
                continue;
            }
            seen[q] = true;
            stack.extend(self.delta[q].iter().flatten().copied());
        }
        seen
    }

    /// Names of the outputs set in state `q`, with `tok` first when held.
    pub fn label_names(&self, q: usize) -> Vec<String> {
        let mut v = Vec::new();
        if self.token[q] {
            v.push(TOK.to_string());
        }
        for (b, name) in self.outputs.iter().enumerate() {
            if self.labels[q] >> b & 1 == 1 {
                v.push(name.clone());
            }
        }
        v
    }
}

/// Two-state template: the token state sends, the other waits for `rcv`.
/// Extra outputs are constant false.
pub fn minimal_template(local: &[&str], global: &[&str], outputs: &[&str]) -> ProcessTemplate {
    let local_inputs: Vec<String> = local.iter().map(|s| s.to_string()).collect();
    let outputs: Vec<String> = outputs.iter().map(|s| s.to_string()).collect();
    let mut t = ProcessTemplate {
        local_inputs,
        global_inputs: global.iter().map(|s| s.to_string()).collect(),
        outputs,
        token: vec![false, true],
        labels: vec![0, 0],
        delta: vec![],
        init_token: 1,
        init_no_token: 0,
    };
    let snd = t.output_bit(SND).expect("snd output");
    t.labels[1] = 1 << snd;
    let rcv = t.rcv_mask();
    let letters = t.num_letters();
    t.delta = vec![
        (0..letters)
            .map(|i| Some(if i & rcv != 0 { 1 } else { 0 }))
            .collect(),
        (0..letters)
            .map(|i| if i & rcv != 0 { None } else { Some(0) })
            .collect(),
    ];
    t
}
