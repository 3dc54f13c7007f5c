//! Stability and resiliency checks for the greedy agent.
//!
//! Without faults and with negative weights the value increases on every step
//! and `W(x) = -V(x)` is a control Lyapunov function whose only zero is the
//! sorted array. With a p-faulty comparison the agent can stop early (the
//! faulty feature evaluation reports no displaced pair) or pick an action that
//! lowers the value; this module computes both quantities.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::Trace;
use crate::comparator::{FaultModel, Reliable};
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::valuation::{features, residual_at, value, ValueParams};
use crate::varspace::StateVector;

/// Positions `k >= 1` of `values` where `values[k] <= values[k - 1]`.
pub fn monotonic_violations(values: &[f64]) -> Vec<usize> {
    values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1].partial_cmp(&w[0]) != Some(Ordering::Greater))
        .map(|(k, _)| k + 1)
        .collect()
}

/// Steps at which the recorded value failed to strictly increase.
pub fn check_monotonic(trace: &Trace) -> Vec<usize> {
    monotonic_violations(&trace.values())
}

/// `W(x) = -V(x)` with reliable comparison.
pub fn lyapunov_w(x: &[f64], vp: &ValueParams) -> f64 {
    -value(x, vp, &mut Reliable)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, m| acc * (n - m) as f64 / (m + 1) as f64)
}

/// The closed form `C(d, k) p^k (1 - p)^(d - k)` for early termination with
/// `k` displaced pairs.
pub fn termination_prob_closed_form(d: usize, k: usize, p: f64) -> f64 {
    binomial(d, k) * p.powi(k as i32) * (1.0 - p).powi((d - k.min(d)) as i32)
}

/// Probability that all `d - 1` independent pair tests answer "in order":
/// the `k` displaced pairs must each be flipped and the rest must not be.
pub fn termination_prob_product(d: usize, k: usize, p: f64) -> f64 {
    let pairs = d.saturating_sub(1);
    p.powi(k as i32) * (1.0 - p).powi(pairs.saturating_sub(k) as i32)
}

/// Monte Carlo estimate of the chance that one faulty evaluation of the
/// displaced-pair count over `x` comes out zero. Trial `t` uses its own
/// stream derived from `(seed, t)`.
pub fn termination_prob_mc(x: &[f64], p: f64, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    FaultModel::new(p, seed)?;
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut fm = FaultModel::new(
                p,
                derive_seed(seed, &[b"termination", &(t as u64).to_le_bytes()]),
            )
            .expect("validated");
            features(x, &mut fm).f1 == 0.0
        })
        .count();
    Ok(hits as f64 / trials as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionPartition {
    /// Actions that strictly increase the value.
    pub g: usize,
    /// Actions that leave it unchanged.
    pub n: usize,
    /// Actions that strictly decrease it.
    pub w: usize,
}

/// Classifies all `d^2` insertion actions by the sign of their reliable residual.
pub fn partition_gnw(x: &[f64], vp: &ValueParams) -> ActionPartition {
    let d = x.len();
    let mut part = ActionPartition { g: 0, n: 0, w: 0 };
    for from in 0..d {
        for to in 0..d {
            let r = residual_at(x, from, to, vp, &mut Reliable);
            if r > 0.0 {
                part.g += 1;
            } else if r < 0.0 {
                part.w += 1;
            } else {
                part.n += 1;
            }
        }
    }
    part
}

/// `(w / d^4) p_v`: chance that a worsening action both looks best and is
/// picked, given the probability `p_v` that an action changes class.
pub fn wrong_action_prob(x: &[f64], vp: &ValueParams, p_v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_v) {
        return Err(Error::InvalidProbability(p_v));
    }
    let w = partition_gnw(x, vp).w as f64;
    let d = x.len() as f64;
    Ok(w / d.powi(4) * p_v)
}

/// An array of length `d` with exactly `k` displaced adjacent pairs
/// (`k < d`): `k + 1` ascending runs, each run above the next.
pub fn array_with_displaced_pairs(d: usize, k: usize) -> Result<StateVector> {
    if d == 0 || k >= d {
        return Err(Error::InvalidConfig(format!(
            "need 0 <= k < d, got d = {d}, k = {k}"
        )));
    }
    let runs = k + 1;
    let mut out = Vec::with_capacity(d);
    let mut next = d;
    // run r gets the values just below those of run r - 1
    for r in 0..runs {
        let len = d / runs + usize::from(r < d % runs);
        let lo = next - len;
        out.extend((lo..next).map(|v| (v + 1) as f64));
        next = lo;
    }
    StateVector::new(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub dim: usize,
    /// Displaced adjacent pairs of the analysed array.
    pub k: usize,
    pub g: usize,
    pub n: usize,
    pub w: usize,
    pub p: f64,
    pub p_v: f64,
    /// Early-termination probability from the closed form.
    pub p_term_closed_form: f64,
    /// Early-termination probability from the independent-pair product.
    pub p_term_product: f64,
    pub p_term_mc: f64,
    pub mc_trials: usize,
    pub p_wrong_action: f64,
    pub lyapunov_w: f64,
    /// Present when a trace was analysed.
    pub monotonic_violations: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeParams {
    pub p: f64,
    pub p_v: f64,
    pub trials: usize,
    pub seed: u64,
}

pub fn analyze(
    x: &[f64],
    vp: &ValueParams,
    params: &AnalyzeParams,
    trace: Option<&Trace>,
) -> Result<AnalysisReport> {
    let d = x.len();
    let k = features(x, &mut Reliable).f1 as usize;
    let part = partition_gnw(x, vp);
    Ok(AnalysisReport {
        dim: d,
        k,
        g: part.g,
        n: part.n,
        w: part.w,
        p: params.p,
        p_v: params.p_v,
        p_term_closed_form: termination_prob_closed_form(d, k, params.p),
        p_term_product: termination_prob_product(d, k, params.p),
        p_term_mc: termination_prob_mc(x, params.p, params.trials, params.seed)?,
        mc_trials: params.trials,
        p_wrong_action: wrong_action_prob(x, vp, params.p_v)?,
        lyapunov_w: lyapunov_w(x, vp),
        monotonic_violations: trace.map(check_monotonic),
    })
}
