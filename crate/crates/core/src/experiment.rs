//! Datasets, error metrics and summary statistics for the evaluation protocol.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::varspace::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Sorted,
    Reversed,
    /// Sorted, then every element displaced by zero-mean Gaussian noise.
    Gaussian,
    Random,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 4] = [
        DatasetKind::Sorted,
        DatasetKind::Reversed,
        DatasetKind::Gaussian,
        DatasetKind::Random,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            DatasetKind::Sorted => "sorted",
            DatasetKind::Reversed => "reversed",
            DatasetKind::Gaussian => "gaussian",
            DatasetKind::Random => "random",
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DatasetKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown dataset kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetParams {
    /// Values are drawn uniformly from the open interval `(0, scale)`.
    pub scale: f64,
    /// Standard deviation of the Gaussian displacement, as a fraction of `scale`.
    pub sigma: f64,
}

impl Default for DatasetParams {
    fn default() -> Self {
        Self {
            scale: 1000.0,
            sigma: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub kind: DatasetKind,
    pub dim: usize,
    pub count: usize,
    pub seed: u64,
    pub params: DatasetParams,
    pub arrays: Vec<StateVector>,
}

/// Array `index` of a dataset. Each array has its own stream keyed by
/// `(seed, kind, dim, index)`, so any single array can be regenerated alone.
pub fn gen_array(
    kind: DatasetKind,
    dim: usize,
    index: usize,
    params: &DatasetParams,
    seed: u64,
) -> Result<StateVector> {
    if dim == 0 {
        return Err(Error::EmptyState);
    }
    if !(params.scale > 0.0 && params.scale.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "scale {} must be positive",
            params.scale
        )));
    }
    if params.sigma.is_nan() || params.sigma < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "sigma {} must be >= 0",
            params.sigma
        )));
    }
    let stream = derive_seed(
        seed,
        &[
            b"dataset",
            kind.as_str().as_bytes(),
            &(dim as u64).to_le_bytes(),
            &(index as u64).to_le_bytes(),
        ],
    );
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    let mut v: Vec<f64> = (0..dim)
        .map(|_| params.scale * rng.sample::<f64, _>(Open01))
        .collect();
    match kind {
        DatasetKind::Random => {}
        DatasetKind::Sorted => v.sort_by(f64::total_cmp),
        DatasetKind::Reversed => v.sort_by(|a, b| b.total_cmp(a)),
        DatasetKind::Gaussian => {
            v.sort_by(f64::total_cmp);
            let noise = Normal::new(0.0, params.sigma * params.scale)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            for e in &mut v {
                *e += noise.sample(&mut rng);
            }
        }
    }
    StateVector::new(v)
}

pub fn gen_dataset(
    kind: DatasetKind,
    dim: usize,
    count: usize,
    params: DatasetParams,
    seed: u64,
) -> Result<Dataset> {
    if count == 0 {
        return Err(Error::InvalidConfig("count must be at least 1".into()));
    }
    let arrays = (0..count)
        .map(|k| gen_array(kind, dim, k, &params, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        kind,
        dim,
        count,
        seed,
        params,
        arrays,
    })
}

#[derive(Serialize, Deserialize)]
struct DatasetHeader {
    kind: DatasetKind,
    dim: usize,
    count: usize,
    seed: u64,
    params: DatasetParams,
}

#[derive(Serialize, Deserialize)]
struct DatasetLine {
    index: usize,
    values: StateVector,
}

impl Dataset {
    /// Line-delimited JSON: one header object, then one object per array.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        let header = DatasetHeader {
            kind: self.kind,
            dim: self.dim,
            count: self.count,
            seed: self.seed,
            params: self.params,
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for (index, values) in self.arrays.iter().enumerate() {
            serde_json::to_writer(
                &mut w,
                &DatasetLine {
                    index,
                    values: values.clone(),
                },
            )?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Dataset> {
        let mut lines = r.lines();
        let header: DatasetHeader = match lines.next() {
            Some(line) => serde_json::from_str(&line?)?,
            None => return Err(Error::Parse("empty dataset file".into())),
        };
        let mut arrays = Vec::with_capacity(header.count);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: DatasetLine = serde_json::from_str(&line)?;
            if entry.index != arrays.len() || entry.values.dim() != header.dim {
                return Err(Error::Parse(format!(
                    "malformed dataset entry {}",
                    entry.index
                )));
            }
            arrays.push(entry.values);
        }
        if arrays.len() != header.count {
            return Err(Error::Parse(format!(
                "dataset header declares {} arrays, found {}",
                header.count,
                arrays.len()
            )));
        }
        Ok(Dataset {
            kind: header.kind,
            dim: header.dim,
            count: header.count,
            seed: header.seed,
            params: header.params,
            arrays,
        })
    }
}

/// Euclidean distance `||x_out - x_ref||`.
pub fn error_distance(x_out: &[f64], x_ref: &[f64]) -> Result<f64> {
    if x_out.len() != x_ref.len() {
        return Err(Error::DimensionMismatch {
            expected: x_ref.len(),
            found: x_out.len(),
        });
    }
    Ok(x_out
        .iter()
        .zip(x_ref)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Exact agreement with the reference.
pub fn success(x_out: &[f64], x_ref: &[f64]) -> bool {
    matches!(error_distance(x_out, x_ref), Ok(e) if e == 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); zero for a single value.
    pub stddev: f64,
    pub n: usize,
}

pub fn summarize(values: &[f64]) -> Result<StatSummary> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let stddev = if n == 1 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    Ok(StatSummary { mean, stddev, n })
}
