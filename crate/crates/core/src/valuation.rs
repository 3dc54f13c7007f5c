//! Features, reward and the linear state-value function.
//!
//! Every adjacent pair `(x_{i-1}, x_i)` is tested once for being out of order.
//! That single test drives both features: the displaced-pair count `f1` and the
//! sum of squared negative gaps `f2`. All tests go through a [`Comparator`], so
//! the same code measures an array reliably or through a faulty comparison.

use serde::{Deserialize, Serialize};

use crate::comparator::Comparator;
use crate::error::{Error, Result};
use crate::varspace::StateVector;

/// Reward bonus for reaching a sorted array.
pub const SORTED_BONUS: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    /// Number of displaced adjacent pairs.
    pub f1: f64,
    /// Sum of squared gaps over displaced adjacent pairs.
    pub f2: f64,
}

impl FeatureVector {
    pub fn is_zero(&self) -> bool {
        self.f1 == 0.0 && self.f2 == 0.0
    }
}

/// Weights of `V(x) = theta . F(x)` plus the discount used while learning them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueParams {
    pub theta: [f64; 2],
    pub gamma: f64,
}

impl ValueParams {
    pub fn new(theta: [f64; 2], gamma: f64) -> Self {
        Self { theta, gamma }
    }

    /// Both weights strictly negative. Under this condition greedy insertion
    /// increases the value on every step and stops only at a sorted array.
    pub fn is_stabilizing(&self) -> bool {
        self.theta[0] < 0.0 && self.theta[1] < 0.0
    }

    pub fn dot(&self, f: FeatureVector) -> f64 {
        // adding 0.0 normalises -0.0
        self.theta[0] * f.f1 + self.theta[1] * f.f2 + 0.0
    }
}

/// Contribution of the adjacent pair `(prev, next)` to the value.
#[inline]
fn pair_term<C: Comparator>(prev: f64, next: f64, theta: &[f64; 2], cmp: &mut C) -> f64 {
    let gap = next - prev;
    if cmp.eval(gap < 0.0) {
        theta[0] + theta[1] * gap * gap
    } else {
        0.0
    }
}

pub fn features<C: Comparator>(x: &[f64], cmp: &mut C) -> FeatureVector {
    let mut f = FeatureVector::default();
    for w in x.windows(2) {
        let gap = w[1] - w[0];
        if cmp.eval(gap < 0.0) {
            f.f1 += 1.0;
            f.f2 += gap * gap;
        }
    }
    f
}

/// Sum of the negative adjacent gaps, plus [`SORTED_BONUS`] when no pair is
/// judged displaced.
pub fn reward<C: Comparator>(x: &[f64], cmp: &mut C) -> f64 {
    let mut gaps = 0.0;
    let mut displaced = 0usize;
    for w in x.windows(2) {
        let gap = w[1] - w[0];
        if cmp.eval(gap < 0.0) {
            gaps += gap;
            displaced += 1;
        }
    }
    if displaced == 0 {
        gaps + SORTED_BONUS
    } else {
        gaps
    }
}

pub fn value<C: Comparator>(x: &[f64], vp: &ValueParams, cmp: &mut C) -> f64 {
    vp.dot(features(x, cmp))
}

/// `V(M_{i,j} x) - V(x)` for the insertion action moving element `i` to
/// position `j` (1-based), computed from the handful of adjacent pairs the
/// move creates or destroys.
pub fn residual<C: Comparator>(
    x: &StateVector,
    i: usize,
    j: usize,
    vp: &ValueParams,
    cmp: &mut C,
) -> Result<f64> {
    let d = x.dim();
    for index in [i, j] {
        if index == 0 || index > d {
            return Err(Error::IndexOutOfRange { index, dim: d });
        }
    }
    Ok(residual_at(x, i - 1, j - 1, vp, cmp))
}

/// 0-based form of [`residual`] without bounds checks beyond slice indexing.
///
/// Removing `v = x[from]` destroys the pairs on either side of it and joins its
/// neighbours. Inserting `v` at `to` splits one pair of the shortened array.
/// Pairs that would involve positions outside the array are omitted.
#[inline]
pub fn residual_at<C: Comparator>(
    x: &[f64],
    from: usize,
    to: usize,
    vp: &ValueParams,
    cmp: &mut C,
) -> f64 {
    if from == to {
        return 0.0;
    }
    let th = &vp.theta;
    let d = x.len();
    let v = x[from];
    let before = (from > 0).then(|| x[from - 1]);
    let after = (from + 1 < d).then(|| x[from + 1]);

    let mut delta = 0.0;
    if let Some(b) = before {
        delta -= pair_term(b, v, th, cmp);
    }
    if let Some(a) = after {
        delta -= pair_term(v, a, th, cmp);
    }
    if let (Some(b), Some(a)) = (before, after) {
        delta += pair_term(b, a, th, cmp);
    }

    // Neighbours of the insertion slot, in the array with `v` removed.
    let (left, right) = if from < to {
        (Some(x[to]), x.get(to + 1).copied())
    } else {
        ((to > 0).then(|| x[to - 1]), Some(x[to]))
    };
    if let (Some(l), Some(r)) = (left, right) {
        delta -= pair_term(l, r, th, cmp);
    }
    if let Some(l) = left {
        delta += pair_term(l, v, th, cmp);
    }
    if let Some(r) = right {
        delta += pair_term(v, r, th, cmp);
    }
    delta
}
