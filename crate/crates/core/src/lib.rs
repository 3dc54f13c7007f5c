//! A sorting agent that learns a linear value function over two features of
//! an array and sorts by greedy insertion, together with the fault-injected
//! comparator, baseline sorters and stability analysis used to evaluate it.
//!
//! ```
//! use rlsort::{rl_sort, Reliable, RunOptions, StateVector, ValueParams};
//!
//! let vp = ValueParams::new([-1.4298, -0.4216], 0.9);
//! let x = StateVector::new(vec![0.3, 0.1, 0.2]).unwrap();
//! let (sorted, trace) = rl_sort(&x, &vp, &mut Reliable, RunOptions::default());
//! assert!(sorted.is_sorted());
//! assert_eq!(trace.moves, 1);
//! ```

pub mod agent;
pub mod analysis;
pub mod avi;
pub mod baselines;
pub mod comparator;
pub mod error;
pub mod experiment;
pub mod harness;
pub mod seed;
pub mod valuation;
pub mod varspace;

pub use agent::{greedy_action, interrupt, rl_sort, Action, RunOptions, Termination, Trace};
pub use avi::{avi_learn, LearnConfig};
pub use comparator::{Comparator, FaultModel, Reliable};
pub use error::{Error, Result};
pub use valuation::{features, residual, reward, value, FeatureVector, ValueParams};
pub use varspace::{list_insert, ActionMatrix, StateVector};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/variable-space.md")]
    mod variable_space {}
    #[doc = include_str!("../../../book/src/value-function.md")]
    mod value_function {}
    #[doc = include_str!("../../../book/src/learning.md")]
    mod learning {}
    #[doc = include_str!("../../../book/src/agent.md")]
    mod agent {}
    #[doc = include_str!("../../../book/src/faults.md")]
    mod faults {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
