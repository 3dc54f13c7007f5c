//! Reliable and p-faulty comparison primitives.
//!
//! Every decision the agent and the baseline sorters make goes through a
//! [`Comparator`]. The reliable one evaluates conditions as given; the
//! [`FaultModel`] flips each answer independently with probability `p`,
//! drawing from a seeded ChaCha stream so runs replay exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Indicator function: `1.0` when `cond` holds, `0.0` otherwise.
pub fn id(cond: bool) -> f64 {
    if cond {
        1.0
    } else {
        0.0
    }
}

/// Indicator routed through a fault model.
pub fn id_p(cond: bool, fm: &mut FaultModel) -> f64 {
    id(fm.eval(cond))
}

/// A source of boolean decisions.
pub trait Comparator {
    /// Returns the comparator's verdict on a condition whose true value is `cond`.
    fn eval(&mut self, cond: bool) -> bool;

    /// Strict `a < b`. Ties compare as "in order".
    fn less(&mut self, a: f64, b: f64) -> bool {
        self.eval(a < b)
    }
}

impl<C: Comparator + ?Sized> Comparator for &mut C {
    fn eval(&mut self, cond: bool) -> bool {
        (**self).eval(cond)
    }
}

/// Error-free comparison.
#[derive(Debug, Clone, Copy, Default)]
pub struct Reliable;

impl Comparator for Reliable {
    #[inline]
    fn eval(&mut self, cond: bool) -> bool {
        cond
    }
}

/// A comparison that lies with probability `p`, independently on every call.
///
/// Exactly one uniform draw is consumed per call, including when `p == 0`,
/// so the draw index of a given comparison does not depend on `p`.
#[derive(Debug, Clone)]
pub struct FaultModel {
    p: f64,
    seed: u64,
    rng: ChaCha8Rng,
    calls: u64,
    flips: u64,
}

impl FaultModel {
    pub fn new(p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(Self {
            p,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            calls: 0,
            flips: 0,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of comparisons evaluated so far.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    /// Number of comparisons that returned the wrong answer.
    pub fn flips(&self) -> u64 {
        self.flips
    }
}

impl Comparator for FaultModel {
    #[inline]
    fn eval(&mut self, cond: bool) -> bool {
        self.calls += 1;
        // random::<f64>() is in [0, 1), so p = 1 always flips and p = 0 never does.
        let flip = self.rng.random::<f64>() < self.p;
        if flip {
            self.flips += 1;
        }
        cond ^ flip
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator() {
        assert_eq!(id(true), 1.0);
        assert_eq!(id(false), 0.0);
        assert_eq!(id(0.1 < 0.2), 1.0);
    }

    #[test]
    fn degenerate_fault_rates() {
        let mut never = FaultModel::new(0.0, 7).unwrap();
        let mut always = FaultModel::new(1.0, 7).unwrap();
        for k in 0..1000 {
            let cond = k % 3 == 0;
            assert_eq!(id_p(cond, &mut never), id(cond));
            assert_eq!(id_p(cond, &mut always), 1.0 - id(cond));
        }
        assert_eq!(never.calls(), 1000);
        assert_eq!(never.flips(), 0);
        assert_eq!(always.flips(), 1000);
    }

    #[test]
    fn flip_rate_near_p() {
        let mut fm = FaultModel::new(0.3, 2024).unwrap();
        let n = 100_000;
        let flipped = (0..n).filter(|_| id_p(true, &mut fm) == 0.0).count();
        let frac = flipped as f64 / n as f64;
        assert!((0.28..=0.32).contains(&frac), "flip fraction {frac}");
    }

    #[test]
    fn same_seed_same_answers() {
        let mut a = FaultModel::new(0.4, 99).unwrap();
        let mut b = FaultModel::new(0.4, 99).unwrap();
        let xs: Vec<bool> = (0..500).map(|k| a.less(k as f64, 250.0)).collect();
        let ys: Vec<bool> = (0..500).map(|k| b.less(k as f64, 250.0)).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn ties_are_in_order() {
        assert!(!Reliable.less(1.0, 1.0));
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(matches!(
            FaultModel::new(1.5, 0),
            Err(Error::InvalidProbability(_))
        ));
        assert!(FaultModel::new(-0.1, 0).is_err());
        assert!(FaultModel::new(f64::NAN, 0).is_err());
    }
}
