//! Instrumented baseline sorters.
//!
//! Bubble sort, three-way Quicksort and Selection sort with every comparison
//! routed through a [`Comparator`] and every element move counted. Faults
//! change the order decisions but never the contents of the array.

use serde::{Deserialize, Serialize};

use crate::comparator::Comparator;
use crate::varspace::{insert_in_place, StateVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortOutcome {
    pub result: StateVector,
    pub moves: usize,
    pub comparisons: usize,
    /// A pass or recursion cap stopped the run before its own termination rule.
    pub capped: bool,
}

/// Repeated full passes swapping adjacent pairs judged out of order, until a
/// pass makes no swap. One swap is one move. Passes are capped at `10 d`.
pub fn bubble_sort<C: Comparator>(x: &StateVector, cmp: &mut C) -> SortOutcome {
    let mut a = x.to_vec();
    let d = a.len();
    let max_passes = (10 * d).max(1);
    let (mut moves, mut comparisons) = (0, 0);
    let mut capped = true;
    for _ in 0..max_passes {
        let mut swapped = false;
        for k in 1..d {
            comparisons += 1;
            if cmp.less(a[k], a[k - 1]) {
                a.swap(k - 1, k);
                moves += 1;
                swapped = true;
            }
        }
        if !swapped {
            capped = false;
            break;
        }
    }
    SortOutcome {
        result: StateVector::new(a).expect("non-empty"),
        moves,
        comparisons,
        capped,
    }
}

struct QuickState<'c, C> {
    cmp: &'c mut C,
    moves: usize,
    comparisons: usize,
    max_depth: usize,
    capped: bool,
}

impl<C: Comparator> QuickState<'_, C> {
    fn sort(&mut self, items: Vec<f64>, depth: usize) -> Vec<f64> {
        if items.len() <= 1 {
            return items;
        }
        if depth >= self.max_depth {
            self.capped = true;
            return items;
        }
        let mid = items.len() / 2;
        let pivot = items[mid];
        let mut less = Vec::new();
        let mut equal = vec![pivot];
        let mut greater = Vec::new();
        self.moves += 1;
        for (k, &e) in items.iter().enumerate() {
            if k == mid {
                continue;
            }
            self.comparisons += 1;
            if self.cmp.less(e, pivot) {
                less.push(e);
            } else {
                self.comparisons += 1;
                if self.cmp.less(pivot, e) {
                    greater.push(e);
                } else {
                    equal.push(e);
                }
            }
            self.moves += 1;
        }
        let mut out = self.sort(less, depth + 1);
        out.extend(equal);
        out.extend(self.sort(greater, depth + 1));
        out
    }
}

/// Single-pass three-way Quicksort with the middle element as pivot.
///
/// Each element placed into a `less`/`equal`/`greater` sublist counts as one
/// move; concatenating the sorted sublists is not counted. No section is
/// revisited after it has been partitioned. Recursion depth is capped at
/// `4 log2(d) + 8`; a sublist reaching the cap is left as is.
pub fn quick_sort<C: Comparator>(x: &StateVector, cmp: &mut C) -> SortOutcome {
    let d = x.dim();
    let max_depth = (4.0 * (d as f64).log2()).floor() as usize + 8;
    let mut st = QuickState {
        cmp,
        moves: 0,
        comparisons: 0,
        max_depth,
        capped: false,
    };
    let result = st.sort(x.to_vec(), 0);
    SortOutcome {
        result: StateVector::new(result).expect("non-empty"),
        moves: st.moves,
        comparisons: st.comparisons,
        capped: st.capped,
    }
}

/// For each position, find the minimum of the remaining suffix and move it
/// to the front of the suffix (remove and reinsert, shifting the rest). A move
/// is counted only when the minimum is not already in place.
pub fn selection_sort<C: Comparator>(x: &StateVector, cmp: &mut C) -> SortOutcome {
    let mut a = x.to_vec();
    let d = a.len();
    let (mut moves, mut comparisons) = (0, 0);
    for start in 0..d.saturating_sub(1) {
        let mut min = start;
        for k in start + 1..d {
            comparisons += 1;
            if cmp.less(a[k], a[min]) {
                min = k;
            }
        }
        if min != start {
            insert_in_place(&mut a, min, start);
            moves += 1;
        }
    }
    SortOutcome {
        result: StateVector::new(a).expect("non-empty"),
        moves,
        comparisons,
        capped: false,
    }
}
