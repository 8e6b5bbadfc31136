use serde::{Deserialize, Serialize};

use super::ring::{RingSystem, SysInput};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStep {
    pub state: Vec<usize>,
    pub input: SysInput,
    /// Bitmask of the vertices that move on this step.
    pub moved: u64,
}

/// A finite run, or a lasso when `loop_start` is set: after the last step
/// the run continues at `steps[loop_start]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub steps: Vec<RunStep>,
    pub loop_start: Option<usize>,
}

/// Local run of one process: (local state, template-order input) pairs.
/// `cycle` is empty when the process moves only finitely often.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LocalRun {
    pub stem: Vec<(usize, u64)>,
    pub cycle: Vec<(usize, u64)>,
}

impl LocalRun {
    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Run {
    /// Checks that the run starts in `S_0` and that every step is a
    /// transition of the ring.
    pub fn is_run_of(&self, ring: &RingSystem) -> bool {
        let Some(first) = self.steps.first() else {
            return true;
        };
        if !ring.initial_states().contains(&first.state) {
            return false;
        }
        let n = self.steps.len();
        (0..n).all(|k| {
            let next = if k + 1 < n {
                Some(&self.steps[k + 1].state)
            } else {
                self.loop_start.map(|l| &self.steps[l].state)
            };
            let Some(next) = next else { return true };
            let step = &self.steps[k];
            ring.moves(&step.state).iter().any(|m| {
                m.moved == step.moved
                    && rcv_consistent(ring, m.moved, ring.receiver(m), &step.input)
                    && ring.apply(&step.state, m, &step.input).as_ref() == Some(next)
            })
        })
    }
}

fn rcv_consistent(ring: &RingSystem, moved: u64, receiver: Option<usize>, input: &SysInput) -> bool {
    (0..ring.n).all(|v| {
        let has = input.local[v] & ring.templates[v].rcv_mask() != 0;
        moved >> v & 1 == 0 || has == (Some(v) == receiver)
    })
}

/// Projects a run onto the steps where vertex `j` moves.
pub fn project_local_run(ring: &RingSystem, run: &Run, j: usize) -> LocalRun {
    let proj = |steps: &[RunStep]| -> Vec<(usize, u64)> {
        steps
            .iter()
            .filter(|s| s.moved >> j & 1 == 1)
            .map(|s| (s.state[j], ring.vertex_input(j, &s.input)))
            .collect()
    };
    match run.loop_start {
        None => LocalRun {
            stem: proj(&run.steps),
            cycle: vec![],
        },
        Some(l) => {
            let cycle = proj(&run.steps[l..]);
            let mut stem = proj(&run.steps[..l]);
            if cycle.is_empty() {
                stem.extend(cycle);
                LocalRun { stem, cycle: vec![] }
            } else {
                LocalRun { stem, cycle }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::ring::{compose_ring, Timing};
    use crate::machine::template::minimal_template;

    fn ring(timing: Timing) -> RingSystem {
        let t = minimal_template(&["r", "rcv"], &[], &["g", "snd"]);
        compose_ring(&t, None, 2, timing).unwrap()
    }

    fn step(state: [usize; 2], local: [u64; 2], moved: u64) -> RunStep {
        RunStep {
            state: state.to_vec(),
            input: SysInput {
                local: local.to_vec(),
                global: 0,
            },
            moved,
        }
    }

    #[test]
    fn synchronous_projection_keeps_everything() {
        let r = ring(Timing::Synchronous);
        let run = Run {
            steps: vec![step([1, 0], [0, 2], 3), step([0, 1], [2, 0], 3)],
            loop_start: Some(0),
        };
        assert!(run.is_run_of(&r));
        let l = project_local_run(&r, &run, 0);
        assert_eq!(l.cycle, vec![(1, 0), (0, 2)]);
    }

    #[test]
    fn interleaving_projection_filters() {
        let r = ring(Timing::Interleaving);
        let run = Run {
            steps: vec![
                step([0, 1], [1, 0], 1),
                step([0, 1], [0, 0], 2),
                step([0, 1], [0, 0], 1),
            ],
            loop_start: None,
        };
        assert_eq!(project_local_run(&r, &run, 0).stem.len(), 2);
        assert_eq!(project_local_run(&r, &run, 1).stem, vec![(1, 0)]);
        let idle = Run {
            steps: vec![step([0, 1], [0, 0], 1)],
            loop_start: Some(0),
        };
        assert!(project_local_run(&r, &idle, 1).is_empty());
    }
}
