//! Experiment harness: configuration, benchmark and resilience sweeps, and the
//! file formats the command-line tool reads and writes.
//!
//! Every trial is reproducible on its own. The array for trial `t` depends on
//! `(master seed, dataset, dim, t)` only, so all algorithms and fault rates see
//! the same inputs. The fault stream additionally mixes in the algorithm and
//! the fault rate, so adding an algorithm never shifts another one's draws.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::{rl_sort, RunOptions};
use crate::avi::{avi_learn_report, LearnConfig};
use crate::baselines::{bubble_sort, quick_sort, selection_sort};
use crate::comparator::FaultModel;
use crate::error::{Error, Result};
use crate::experiment::{
    error_distance, gen_array, summarize, DatasetKind, DatasetParams, StatSummary,
};
use crate::seed::derive_seed;
use crate::valuation::ValueParams;
use crate::varspace::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Rl,
    Bubble,
    Quick,
    Selection,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Rl,
        Algorithm::Bubble,
        Algorithm::Quick,
        Algorithm::Selection,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Rl => "rl",
            Algorithm::Bubble => "bubble",
            Algorithm::Quick => "quick",
            Algorithm::Selection => "selection",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown algorithm '{s}'")))
    }
}

fn check_rates(rates: &[f64]) -> Result<()> {
    match rates.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        Some(&p) => Err(Error::InvalidProbability(p)),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub datasets: Vec<DatasetKind>,
    pub dims: Vec<usize>,
    pub fault_rates: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub data: DatasetParams,
    /// The agent's step cap is this multiple of `d^2`.
    pub step_cap_multiplier: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            datasets: DatasetKind::ALL.to_vec(),
            dims: vec![5, 10, 50, 100],
            fault_rates: vec![0.0, 0.05],
            trials: 100,
            seed: 0,
            data: DatasetParams::default(),
            step_cap_multiplier: 10,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.dims.contains(&0) {
            return Err(Error::InvalidConfig("dims must be positive".into()));
        }
        if self.step_cap_multiplier == 0 {
            return Err(Error::InvalidConfig(
                "step_cap_multiplier must be at least 1".into(),
            ));
        }
        check_rates(&self.fault_rates)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResilienceConfig {
    pub algorithms: Vec<Algorithm>,
    pub dataset: DatasetKind,
    pub dims: Vec<usize>,
    pub fault_rates: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub data: DatasetParams,
    pub step_cap_multiplier: usize,
}

impl Default for ResilienceConfig {
    fn default() -> Self {
        Self {
            algorithms: vec![Algorithm::Rl, Algorithm::Bubble, Algorithm::Quick],
            dataset: DatasetKind::Random,
            dims: vec![10],
            fault_rates: (0..=10).map(|k| k as f64 * 0.05).collect(),
            trials: 100,
            seed: 0,
            data: DatasetParams::default(),
            step_cap_multiplier: 10,
        }
    }
}

impl ResilienceConfig {
    pub fn validate(&self) -> Result<()> {
        self.as_bench().validate()
    }

    fn as_bench(&self) -> BenchConfig {
        BenchConfig {
            algorithms: self.algorithms.clone(),
            datasets: vec![self.dataset],
            dims: self.dims.clone(),
            fault_rates: self.fault_rates.clone(),
            trials: self.trials,
            seed: self.seed,
            data: self.data,
            step_cap_multiplier: self.step_cap_multiplier,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    /// Comparison fault rate for the early-termination probabilities.
    pub p: f64,
    /// Probability that a faulty evaluation moves an action to another class.
    pub p_v: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self {
            p: 0.05,
            p_v: 0.1,
            trials: 10_000,
            seed: 0,
        }
    }
}

/// The single JSON document describing an experiment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    pub learn: LearnConfig,
    pub bench: BenchConfig,
    pub resilience: ResilienceConfig,
    pub analyze: AnalyzeConfig,
}

impl HarnessConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: String,
    pub sample_dim: usize,
    pub samples_per_iter: usize,
    pub iterations: usize,
    pub resample: bool,
    pub final_residual_norm: f64,
    pub generator: String,
}

/// The weight file written by `learn` and read by every other command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub theta: [f64; 2],
    pub gamma: f64,
    pub seed: u64,
    pub provenance: Provenance,
}

impl ParamsFile {
    pub fn learn(cfg: &LearnConfig) -> Result<Self> {
        let report = avi_learn_report(cfg)?;
        let final_residual_norm = report.history.last().map_or(0.0, |r| r.residual_norm);
        Ok(Self {
            theta: report.params.theta,
            gamma: report.params.gamma,
            seed: cfg.seed,
            provenance: Provenance {
                method: "approximate value iteration, least squares on [f1, f2]".into(),
                sample_dim: cfg.sample_dim,
                samples_per_iter: cfg.samples_per_iter,
                iterations: cfg.iterations,
                resample: cfg.resample,
                final_residual_norm,
                generator: concat!("rlsort ", env!("CARGO_PKG_VERSION")).into(),
            },
        })
    }

    pub fn params(&self) -> ValueParams {
        ValueParams::new(self.theta, self.gamma)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Parses a whitespace-separated list of reals.
pub fn parse_array(text: &str) -> Result<StateVector> {
    let elems = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("'{tok}' is not a finite number")))
        })
        .collect::<Result<Vec<_>>>()?;
    StateVector::new(elems).map_err(|_| Error::Parse("no numbers in input".into()))
}

/// Reads the `value` column of a per-step trace CSV.
pub fn parse_trace_values(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty trace".into()))?;
    let col = header
        .split(',')
        .position(|h| h.trim() == "value")
        .ok_or_else(|| Error::Parse("trace header has no 'value' column".into()))?;
    lines
        .enumerate()
        .map(|(row, line)| {
            line.split(',')
                .nth(col)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("trace row {} is malformed", row + 1)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub output: StateVector,
    pub moves: usize,
    pub error: f64,
    pub success: bool,
    /// A step, pass or recursion cap ended the run.
    pub capped: bool,
}

pub fn trial_seed(
    master: u64,
    alg: Algorithm,
    kind: DatasetKind,
    dim: usize,
    p: f64,
    trial: usize,
) -> u64 {
    derive_seed(
        master,
        &[
            b"faults",
            alg.as_str().as_bytes(),
            kind.as_str().as_bytes(),
            &(dim as u64).to_le_bytes(),
            &p.to_bits().to_le_bytes(),
            &(trial as u64).to_le_bytes(),
        ],
    )
}

/// Sorts one array with one algorithm through a comparator of fault rate `p`.
pub fn run_trial(
    alg: Algorithm,
    x: &StateVector,
    vp: &ValueParams,
    p: f64,
    fault_seed: u64,
    step_cap_multiplier: usize,
) -> Result<TrialOutcome> {
    let mut cmp = FaultModel::new(p, fault_seed)?;
    let (output, moves, capped) = match alg {
        Algorithm::Rl => {
            let d = x.dim();
            let opts = RunOptions {
                step_cap: Some((step_cap_multiplier * d * d).max(1)),
                snapshots: false,
            };
            let (out, trace) = rl_sort(x, vp, &mut cmp, opts);
            let capped = trace.termination == crate::agent::Termination::StepCap;
            (out, trace.moves, capped)
        }
        Algorithm::Bubble => {
            let o = bubble_sort(x, &mut cmp);
            (o.result, o.moves, o.capped)
        }
        Algorithm::Quick => {
            let o = quick_sort(x, &mut cmp);
            (o.result, o.moves, o.capped)
        }
        Algorithm::Selection => {
            let o = selection_sort(x, &mut cmp);
            (o.result, o.moves, o.capped)
        }
    };
    let reference = x.sorted();
    let error = error_distance(&output, &reference)?;
    Ok(TrialOutcome {
        output,
        moves,
        error,
        success: error == 0.0,
        capped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub algorithm: Algorithm,
    pub dataset: DatasetKind,
    pub dim: usize,
    pub p: f64,
    pub moves: StatSummary,
    pub error: StatSummary,
    pub success_rate: f64,
    /// Trials ended by a step, pass or recursion cap.
    pub capped: usize,
}

/// Runs `trials` trials of one (algorithm, dataset, dim, p) cell in parallel.
/// Results are reduced in trial order.
#[allow(clippy::too_many_arguments)]
pub fn run_cell(
    alg: Algorithm,
    kind: DatasetKind,
    dim: usize,
    p: f64,
    trials: usize,
    seed: u64,
    params: &DatasetParams,
    vp: &ValueParams,
    step_cap_multiplier: usize,
) -> Result<CellSummary> {
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let x = gen_array(kind, dim, t, params, seed)?;
            run_trial(
                alg,
                &x,
                vp,
                p,
                trial_seed(seed, alg, kind, dim, p, t),
                step_cap_multiplier,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let moves: Vec<f64> = outcomes.iter().map(|o| o.moves as f64).collect();
    let errors: Vec<f64> = outcomes.iter().map(|o| o.error).collect();
    let successes = outcomes.iter().filter(|o| o.success).count();
    Ok(CellSummary {
        algorithm: alg,
        dataset: kind,
        dim,
        p,
        moves: summarize(&moves)?,
        error: summarize(&errors)?,
        success_rate: successes as f64 / trials as f64,
        capped: outcomes.iter().filter(|o| o.capped).count(),
    })
}

/// Every (algorithm, dataset, dim, fault rate) cell of the benchmark, in
/// configuration order.
pub fn run_bench(cfg: &BenchConfig, vp: &ValueParams) -> Result<Vec<CellSummary>> {
    cfg.validate()?;
    let params = cfg.data;
    let mut rows = Vec::new();
    for &alg in &cfg.algorithms {
        for &kind in &cfg.datasets {
            for &dim in &cfg.dims {
                for &p in &cfg.fault_rates {
                    rows.push(run_cell(
                        alg,
                        kind,
                        dim,
                        p,
                        cfg.trials,
                        cfg.seed,
                        &params,
                        vp,
                        cfg.step_cap_multiplier,
                    )?);
                }
            }
        }
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[CellSummary]) -> String {
    let mut out = String::from(
        "algorithm,dataset,dim,p,moves_mean,moves_stddev,error_mean,error_stddev,success_rate,trials,capped\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.algorithm,
            r.dataset,
            r.dim,
            r.p,
            r.moves.mean,
            r.moves.stddev,
            r.error.mean,
            r.error.stddev,
            r.success_rate,
            r.moves.n,
            r.capped
        ));
    }
    out
}

/// Success rate and error over a grid of fault rates.
pub fn run_resilience(cfg: &ResilienceConfig, vp: &ValueParams) -> Result<Vec<CellSummary>> {
    cfg.validate()?;
    run_bench(&cfg.as_bench(), vp)
}

pub fn resilience_csv(rows: &[CellSummary]) -> String {
    let mut out = String::from("algorithm,dim,p,success_rate,error_mean,error_stddev,trials\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.algorithm, r.dim, r.p, r.success_rate, r.error.mean, r.error.stddev, r.error.n
        ));
    }
    out
}
