//! Trajectory generation: sorting by repeated greedy insertion.
//!
//! At every step the agent scores all `d^2` insertion actions by their value
//! residual, applies the best one and records the result. It stops when the
//! value of the current array, as measured through its comparator, is zero.

use serde::{Deserialize, Serialize};

use crate::comparator::{Comparator, Reliable};
use crate::error::{Error, Result};
use crate::valuation::{features, residual_at, ValueParams};
use crate::varspace::{insert_in_place, StateVector};

/// Insertion action, 1-based: move element `from` to position `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Action {
    pub from: usize,
    pub to: usize,
}

impl Action {
    pub fn is_identity(&self) -> bool {
        self.from == self.to
    }
}

/// The greedy policy. Scans `(k, l)` in lexicographic order and keeps the
/// first maximizer, so ties resolve to the smallest action.
pub fn greedy_action<C: Comparator>(x: &[f64], vp: &ValueParams, cmp: &mut C) -> Action {
    let d = x.len();
    let mut best = Action { from: 1, to: 1 };
    let mut best_gain = f64::NEG_INFINITY;
    for from in 0..d {
        for to in 0..d {
            let gain = residual_at(x, from, to, vp, cmp);
            if gain > best_gain {
                best_gain = gain;
                best = Action {
                    from: from + 1,
                    to: to + 1,
                };
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The comparator reported no displaced pairs.
    SortedDetected,
    StepCap,
    Interrupted,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::SortedDetected => "sorted_detected",
            Termination::StepCap => "step_cap",
            Termination::Interrupted => "interrupted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    /// 1-based; step `k` produced the `k`-th array after the initial one.
    pub step: usize,
    pub action: Action,
    /// Ground-truth value of the array after this step (reliable features).
    pub value_after: f64,
    pub f1_after: f64,
    pub snapshot: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub initial: Vec<f64>,
    pub initial_value: f64,
    pub initial_f1: f64,
    pub steps: Vec<TraceStep>,
    pub termination: Termination,
    /// Number of applied non-identity actions.
    pub moves: usize,
    pub snapshots: bool,
}

impl Trace {
    /// `[V(x_0), V(x_1), ...]`.
    pub fn values(&self) -> Vec<f64> {
        std::iter::once(self.initial_value)
            .chain(self.steps.iter().map(|s| s.value_after))
            .collect()
    }

    /// Per-step CSV with header `step,i,j,value,f1`. Step 0 is the initial array.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,i,j,value,f1\n");
        out.push_str(&format!("0,,,{},{}\n", self.initial_value, self.initial_f1));
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.step, s.action.from, s.action.to, s.value_after, s.f1_after
            ));
        }
        out
    }

    /// One row per array state, initial array first; the heatmap layout.
    pub fn heatmap_csv(&self) -> Result<String> {
        if !self.snapshots {
            return Err(Error::SnapshotsDisabled);
        }
        let d = self.initial.len();
        let mut out = String::from("step");
        for k in 1..=d {
            out.push_str(&format!(",x{k}"));
        }
        out.push('\n');
        let rows = std::iter::once((0, &self.initial)).chain(
            self.steps
                .iter()
                .filter_map(|s| s.snapshot.as_ref().map(|snap| (s.step, snap))),
        );
        for (step, row) in rows {
            out.push_str(&step.to_string());
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Upper bound on steps; `None` means `10 * d^2`.
    pub step_cap: Option<usize>,
    pub snapshots: bool,
}

pub fn default_step_cap(d: usize) -> usize {
    (10 * d * d).max(1)
}

/// Sorts `x0` with the greedy policy.
///
/// The termination test and each action scan draw their own comparisons.
/// Per-step values in the trace are ground truth and consume no draws.
pub fn rl_sort<C: Comparator>(
    x0: &StateVector,
    vp: &ValueParams,
    cmp: &mut C,
    opts: RunOptions,
) -> (StateVector, Trace) {
    let step_cap = opts.step_cap.unwrap_or_else(|| default_step_cap(x0.dim()));
    let mut x = x0.clone().into_vec();
    let truth = |x: &[f64]| {
        let f = features(x, &mut Reliable);
        (vp.dot(f), f.f1)
    };
    let (initial_value, initial_f1) = truth(&x);
    let mut steps = Vec::new();
    let mut moves = 0;
    let termination = loop {
        if vp.dot(features(&x, cmp)) == 0.0 {
            break Termination::SortedDetected;
        }
        if steps.len() >= step_cap {
            break Termination::StepCap;
        }
        let action = greedy_action(&x, vp, cmp);
        insert_in_place(&mut x, action.from - 1, action.to - 1);
        if !action.is_identity() {
            moves += 1;
        }
        let (value_after, f1_after) = truth(&x);
        steps.push(TraceStep {
            step: steps.len() + 1,
            action,
            value_after,
            f1_after,
            snapshot: opts.snapshots.then(|| x.clone()),
        });
    };
    let trace = Trace {
        initial: x0.to_vec(),
        initial_value,
        initial_f1,
        steps,
        termination,
        moves,
        snapshots: opts.snapshots,
    };
    (StateVector::new(x).expect("non-empty"), trace)
}

/// The array as it stood after `at_step` steps of a recorded run.
pub fn interrupt(trace: &Trace, at_step: usize) -> Result<StateVector> {
    if !trace.snapshots {
        return Err(Error::SnapshotsDisabled);
    }
    if at_step > trace.steps.len() {
        return Err(Error::StepOutOfRange {
            requested: at_step,
            len: trace.steps.len(),
        });
    }
    let elems = if at_step == 0 {
        trace.initial.clone()
    } else {
        trace.steps[at_step - 1]
            .snapshot
            .clone()
            .ok_or(Error::SnapshotsDisabled)?
    };
    StateVector::new(elems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparator::FaultModel;
    use crate::valuation::value;

    const THETA: [f64; 2] = [-1.4298, -0.4216];

    fn sv(v: &[f64]) -> StateVector {
        StateVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn tie_break_is_lexicographic() {
        let vp = ValueParams::new([-1.0, -1.0], 0.9);
        assert_eq!(
            greedy_action(&[2.0, 1.0], &vp, &mut Reliable),
            Action { from: 1, to: 2 }
        );
    }

    #[test]
    fn greedy_maximizes_over_all_actions() {
        let vp = ValueParams::new(THETA, 0.9);
        let x = [1.0, 3.0, 2.0, 4.0];
        let a = greedy_action(&x, &vp, &mut Reliable);
        let gain = |f: usize, t: usize| residual_at(&x, f, t, &vp, &mut Reliable);
        let best = (0..4)
            .flat_map(|f| (0..4).map(move |t| (f, t)))
            .map(|(f, t)| gain(f, t))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(gain(a.from - 1, a.to - 1), best);
        assert!(best > 0.0);
        let mut y = x;
        insert_in_place(&mut y, a.from - 1, a.to - 1);
        assert_eq!(y, [1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn sorted_array_has_no_improving_action() {
        let vp = ValueParams::new(THETA, 0.9);
        let x = [0.1, 0.2, 0.5, 0.7];
        let a = greedy_action(&x, &vp, &mut Reliable);
        assert_eq!(
            residual_at(&x, a.from - 1, a.to - 1, &vp, &mut Reliable),
            0.0
        );
    }

    #[test]
    fn sorted_input_needs_no_moves() {
        let vp = ValueParams::new(THETA, 0.9);
        let (out, trace) = rl_sort(
            &sv(&[1.0, 2.0, 3.0]),
            &vp,
            &mut Reliable,
            RunOptions::default(),
        );
        assert_eq!(out.as_slice(), &[1.0, 2.0, 3.0]);
        assert_eq!(trace.moves, 0);
        assert!(trace.steps.is_empty());
        assert_eq!(trace.termination, Termination::SortedDetected);
    }

    #[test]
    fn sorts_small_example() {
        let vp = ValueParams::new(THETA, 0.9);
        let (out, trace) = rl_sort(
            &sv(&[3.0, 1.0, 2.0]),
            &vp,
            &mut Reliable,
            RunOptions::default(),
        );
        assert_eq!(out.as_slice(), &[1.0, 2.0, 3.0]);
        assert_eq!(trace.termination, Termination::SortedDetected);
        assert_eq!(
            trace.moves,
            trace
                .steps
                .iter()
                .filter(|s| !s.action.is_identity())
                .count()
        );
    }

    #[test]
    fn interrupt_returns_intermediate_states() {
        let vp = ValueParams::new(THETA, 0.9);
        let x0 = sv(&[0.9, 0.3, 0.7, 0.1, 0.5, 0.8, 0.2]);
        let opts = RunOptions {
            snapshots: true,
            ..Default::default()
        };
        let (out, trace) = rl_sort(&x0, &vp, &mut Reliable, opts);
        assert_eq!(interrupt(&trace, 0).unwrap(), x0);
        assert_eq!(interrupt(&trace, trace.steps.len()).unwrap(), out);
        let v0 = value(&x0, &vp, &mut Reliable);
        for k in 0..=trace.steps.len() {
            let xk = interrupt(&trace, k).unwrap();
            assert!(value(&xk, &vp, &mut Reliable) >= v0);
        }
        assert!(matches!(
            interrupt(&trace, trace.steps.len() + 1),
            Err(Error::StepOutOfRange { .. })
        ));
    }

    #[test]
    fn interrupt_needs_snapshots() {
        let vp = ValueParams::new(THETA, 0.9);
        let (_, trace) = rl_sort(&sv(&[2.0, 1.0]), &vp, &mut Reliable, RunOptions::default());
        assert!(matches!(
            interrupt(&trace, 0),
            Err(Error::SnapshotsDisabled)
        ));
        assert!(trace.heatmap_csv().is_err());
    }

    #[test]
    fn step_cap_is_recorded() {
        let vp = ValueParams::new(THETA, 0.9);
        let x0 = sv(&[0.4, 0.3, 0.2, 0.1]);
        let opts = RunOptions {
            step_cap: Some(2),
            snapshots: false,
        };
        let (out, trace) = rl_sort(&x0, &vp, &mut Reliable, opts);
        assert_eq!(trace.termination, Termination::StepCap);
        assert_eq!(trace.steps.len(), 2);
        assert!(!out.is_sorted());
    }

    #[test]
    fn always_lying_comparator_sorts_descending() {
        let vp = ValueParams::new(THETA, 0.9);
        let mut fm = FaultModel::new(1.0, 1).unwrap();
        let (out, trace) = rl_sort(
            &sv(&[0.1, 0.2, 0.3, 0.4]),
            &vp,
            &mut fm,
            RunOptions::default(),
        );
        assert_eq!(trace.termination, Termination::SortedDetected);
        assert_eq!(out.as_slice(), &[0.4, 0.3, 0.2, 0.1]);
    }

    #[test]
    fn csv_layouts() {
        let vp = ValueParams::new([-1.0, -1.0], 0.9);
        let opts = RunOptions {
            snapshots: true,
            ..Default::default()
        };
        let (_, trace) = rl_sort(&sv(&[2.0, 1.0]), &vp, &mut Reliable, opts);
        assert_eq!(trace.to_csv(), "step,i,j,value,f1\n0,,,-2,1\n1,1,2,0,0\n");
        assert_eq!(trace.heatmap_csv().unwrap(), "step,x1,x2\n0,2,1\n1,1,2\n");
    }

    #[test]
    fn seeded_runs_repeat() {
        let vp = ValueParams::new(THETA, 0.9);
        let x0 = sv(&[0.5, 0.2, 0.9, 0.4, 0.1, 0.7]);
        let run = |seed| {
            let mut fm = FaultModel::new(0.1, seed).unwrap();
            rl_sort(&x0, &vp, &mut fm, RunOptions::default()).1
        };
        assert_eq!(run(3), run(3));
    }
}
