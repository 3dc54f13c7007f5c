//! Approximate value iteration for the feature weights.
//!
//! Each iteration draws small random arrays, computes one-step backup targets
//! `T(x) = R(x) + gamma * max_u V(M_u x)` under the current weights (the
//! expectation step) and refits the weights by least squares of the targets
//! onto `[f1, f2]` (the maximization step). There is no intercept: a sorted
//! array has zero features and therefore value zero by construction, so the
//! sorted bonus only reaches the fit through `R` one step before sorting.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::comparator::Reliable;
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::valuation::{features, residual_at, reward, value, FeatureVector, ValueParams};
use crate::varspace::StateVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnConfig {
    /// Length of the sampled training arrays.
    pub sample_dim: usize,
    pub samples_per_iter: usize,
    pub iterations: usize,
    pub gamma: f64,
    pub seed: u64,
    /// Draw a fresh sample set every iteration. When `false` the first set is
    /// reused, which makes the iteration a fixed-point map on one sample.
    pub resample: bool,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            sample_dim: 6,
            samples_per_iter: 1000,
            iterations: 15,
            gamma: 0.9,
            seed: 0,
            resample: true,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if self.sample_dim < 2 {
            return Err(Error::InvalidConfig("sample_dim must be at least 2".into()));
        }
        if self.samples_per_iter < 2 {
            return Err(Error::InvalidConfig(
                "samples_per_iter must be at least 2".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidConfig(format!(
                "gamma {} is outside [0, 1]",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Training arrays for one iteration, coordinates i.i.d. uniform on the open
/// interval (0, 1).
pub fn sample_states(cfg: &LearnConfig, iteration: usize) -> Vec<StateVector> {
    let stream = if cfg.resample { iteration as u64 } else { 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
        cfg.seed,
        &[b"avi-samples", &stream.to_le_bytes()],
    ));
    (0..cfg.samples_per_iter)
        .map(|_| {
            let elems = (0..cfg.sample_dim).map(|_| rng.sample(Open01)).collect();
            StateVector::new(elems).expect("sample_dim >= 2")
        })
        .collect()
}

/// Best successor value over every insertion action, identity included.
fn best_successor_value(x: &[f64], vp: &ValueParams) -> f64 {
    let d = x.len();
    let mut best = 0.0f64;
    for from in 0..d {
        for to in 0..d {
            best = best.max(residual_at(x, from, to, vp, &mut Reliable));
        }
    }
    value(x, vp, &mut Reliable) + best
}

/// One-step backup `R(x) + gamma * max_u V(M_u x)`, reliable comparison.
pub fn bellman_target(x: &StateVector, vp: &ValueParams) -> f64 {
    reward(x, &mut Reliable) + vp.gamma * best_successor_value(x, vp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeastSquaresFit {
    pub theta: [f64; 2],
    /// Euclidean norm of the fit residuals.
    pub residual_norm: f64,
}

/// Ordinary least squares of `targets` onto `[f1, f2]`, no intercept.
pub fn fit_least_squares(rows: &[FeatureVector], targets: &[f64]) -> Result<LeastSquaresFit> {
    if rows.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            found: targets.len(),
        });
    }
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (f, &t) in rows.iter().zip(targets) {
        a11 += f.f1 * f.f1;
        a12 += f.f1 * f.f2;
        a22 += f.f2 * f.f2;
        b1 += f.f1 * t;
        b2 += f.f2 * t;
    }
    let det = a11 * a22 - a12 * a12;
    // relative test: det / (a11 a22) is 1 - cos^2 of the angle between the columns
    if det.partial_cmp(&(1e-12 * a11 * a22)) != Some(std::cmp::Ordering::Greater)
        || a11 == 0.0
        || a22 == 0.0
    {
        return Err(Error::SingularRegression {
            samples: rows.len(),
            determinant: det,
        });
    }
    let theta = [(a22 * b1 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det];
    let residual_norm = rows
        .iter()
        .zip(targets)
        .map(|(f, &t)| {
            let r = t - (theta[0] * f.f1 + theta[1] * f.f2);
            r * r
        })
        .sum::<f64>()
        .sqrt();
    Ok(LeastSquaresFit {
        theta,
        residual_norm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub theta: [f64; 2],
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnReport {
    pub params: ValueParams,
    pub history: Vec<IterationRecord>,
}

/// Runs the learning phase and keeps the per-iteration weights and fit residuals.
pub fn avi_learn_report(cfg: &LearnConfig) -> Result<LearnReport> {
    cfg.validate()?;
    let mut vp = ValueParams::new([0.0, 0.0], cfg.gamma);
    let mut history = Vec::with_capacity(cfg.iterations);
    for iteration in 0..cfg.iterations {
        let states = sample_states(cfg, iteration);
        let (rows, targets): (Vec<FeatureVector>, Vec<f64>) = states
            .par_iter()
            .map(|x| (features(x, &mut Reliable), bellman_target(x, &vp)))
            .unzip();
        let fit = fit_least_squares(&rows, &targets)?;
        vp.theta = fit.theta;
        history.push(IterationRecord {
            iteration,
            theta: fit.theta,
            residual_norm: fit.residual_norm,
        });
    }
    Ok(LearnReport {
        params: vp,
        history,
    })
}

pub fn avi_learn(cfg: &LearnConfig) -> Result<ValueParams> {
    avi_learn_report(cfg).map(|r| r.params)
}
