//! Program variables as vectors, program operations as matrices.
//!
//! An array of `d` reals is a point in `R^d`. Each of the primitive operations
//! (assignment, constant assignment, two-term summation, swap and list
//! insertion) is a linear map on that space, so running a program is iterating
//! `x_{n+1} = M x_n` for a sequence of action matrices `M`.
//!
//! Indices in this module's public API are 1-based. The agent itself never
//! materializes insertion matrices; it calls [`insert_in_place`] directly.
//! [`insertion_matrix`] exists so that equivalence can be checked.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The array being sorted, viewed as the state of a dynamical system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(elems: Vec<f64>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::EmptyState);
        }
        Ok(Self(elems))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `true` when the elements are in non-decreasing order.
    pub fn is_sorted(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    /// A reliably sorted copy, used as the ground-truth reference.
    pub fn sorted(&self) -> StateVector {
        let mut v = self.0.clone();
        v.sort_by(f64::total_cmp);
        StateVector(v)
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl Deref for StateVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for StateVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        StateVector::new(v)
    }
}

impl From<StateVector> for Vec<f64> {
    fn from(s: StateVector) -> Self {
        s.0
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Which program operation a matrix realizes. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionKind {
    Identity,
    /// Remove element `from`, reinsert it so that it lands at position `to`.
    Insertion {
        from: usize,
        to: usize,
    },
    /// `x_dest <- x_src`
    Assignment {
        dest: usize,
        src: usize,
    },
    /// `x_index <- c * x_index`; with `c = 0` the slot is cleared.
    ConstAssignment {
        index: usize,
        c: f64,
    },
    /// `x_dest <- x_lhs + x_rhs`
    Summation {
        dest: usize,
        lhs: usize,
        rhs: usize,
    },
    Swap {
        a: usize,
        b: usize,
    },
}

/// A dense `d x d` transformation matrix together with the operation it encodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionMatrix {
    kind: ActionKind,
    dim: usize,
    // row-major
    entries: Vec<f64>,
}

impl ActionMatrix {
    fn identity_entries(dim: usize) -> Vec<f64> {
        let mut entries = vec![0.0; dim * dim];
        for k in 0..dim {
            entries[k * dim + k] = 1.0;
        }
        entries
    }

    pub fn kind(&self) -> ActionKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Entry at 1-based `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[(row - 1) * self.dim + (col - 1)]
    }

    /// Exactly one `1` in every row and every column, zeros elsewhere.
    pub fn is_permutation(&self) -> bool {
        let d = self.dim;
        if self.entries.iter().any(|&e| e != 0.0 && e != 1.0) {
            return false;
        }
        let rows_ok = (0..d).all(|r| self.entries[r * d..(r + 1) * d].iter().sum::<f64>() == 1.0);
        let cols_ok = (0..d).all(|c| (0..d).map(|r| self.entries[r * d + c]).sum::<f64>() == 1.0);
        rows_ok && cols_ok
    }

    pub fn is_identity(&self) -> bool {
        self.entries == Self::identity_entries(self.dim)
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::EmptyState);
    }
    Ok(())
}

fn check_index(index: usize, dim: usize) -> Result<()> {
    if index == 0 || index > dim {
        return Err(Error::IndexOutOfRange { index, dim });
    }
    Ok(())
}

pub fn identity_matrix(d: usize) -> Result<ActionMatrix> {
    check_dim(d)?;
    Ok(ActionMatrix {
        kind: ActionKind::Identity,
        dim: d,
        entries: ActionMatrix::identity_entries(d),
    })
}

/// Moves element `from` to position `to`, 0-based, shifting everything in
/// between by one. This is the hot-path form of an insertion action.
pub fn insert_in_place(x: &mut [f64], from: usize, to: usize) {
    if from < to {
        x[from..=to].rotate_left(1);
    } else if to < from {
        x[to..=from].rotate_right(1);
    }
}

/// Removes the `i`-th element and reinserts it at position `j` (1-based).
pub fn list_insert(x: &StateVector, i: usize, j: usize) -> Result<StateVector> {
    check_index(i, x.dim())?;
    check_index(j, x.dim())?;
    let mut out = x.clone();
    insert_in_place(out.as_mut_slice(), i - 1, j - 1);
    Ok(out)
}

/// The permutation matrix `M` with `M x == list_insert(x, i, j)` for every `x`.
///
/// Built by pushing the coordinate indices through the insertion, so row `k`
/// holds its single `1` in the column of the element that ends up at `k`.
pub fn insertion_matrix(i: usize, j: usize, d: usize) -> Result<ActionMatrix> {
    check_dim(d)?;
    check_index(i, d)?;
    check_index(j, d)?;
    let mut source: Vec<usize> = (0..d).collect();
    if i < j {
        source[i - 1..j].rotate_left(1);
    } else if j < i {
        source[j - 1..i].rotate_right(1);
    }
    let mut entries = vec![0.0; d * d];
    for (row, &col) in source.iter().enumerate() {
        entries[row * d + col] = 1.0;
    }
    Ok(ActionMatrix {
        kind: ActionKind::Insertion { from: i, to: j },
        dim: d,
        entries,
    })
}

/// Differs from the identity only in row `i`, which selects column `j`.
pub fn assign_matrix(i: usize, j: usize, d: usize) -> Result<ActionMatrix> {
    check_dim(d)?;
    check_index(i, d)?;
    check_index(j, d)?;
    let mut entries = ActionMatrix::identity_entries(d);
    let row = (i - 1) * d;
    entries[row + (i - 1)] = 0.0;
    entries[row + (j - 1)] = 1.0;
    Ok(ActionMatrix {
        kind: ActionKind::Assignment { dest: i, src: j },
        dim: d,
        entries,
    })
}

/// Identity with the diagonal entry `(i, i)` replaced by `c`.
pub fn const_assign_matrix(i: usize, c: f64, d: usize) -> Result<ActionMatrix> {
    check_dim(d)?;
    check_index(i, d)?;
    let mut entries = ActionMatrix::identity_entries(d);
    entries[(i - 1) * d + (i - 1)] = c;
    Ok(ActionMatrix {
        kind: ActionKind::ConstAssignment { index: i, c },
        dim: d,
        entries,
    })
}

/// Row `i` holds ones in columns `j1` and `j2`. When `j1 == j2` the entry is
/// 2, so the product still equals `x_j1 + x_j2`.
pub fn sum_matrix(i: usize, j1: usize, j2: usize, d: usize) -> Result<ActionMatrix> {
    check_dim(d)?;
    check_index(i, d)?;
    check_index(j1, d)?;
    check_index(j2, d)?;
    let mut entries = ActionMatrix::identity_entries(d);
    let row = (i - 1) * d;
    entries[row..row + d].fill(0.0);
    entries[row + (j1 - 1)] += 1.0;
    entries[row + (j2 - 1)] += 1.0;
    Ok(ActionMatrix {
        kind: ActionKind::Summation {
            dest: i,
            lhs: j1,
            rhs: j2,
        },
        dim: d,
        entries,
    })
}

pub fn swap_matrix(i: usize, j: usize, d: usize) -> Result<ActionMatrix> {
    check_dim(d)?;
    check_index(i, d)?;
    check_index(j, d)?;
    let mut entries = ActionMatrix::identity_entries(d);
    if i != j {
        let (a, b) = (i - 1, j - 1);
        entries[a * d + a] = 0.0;
        entries[b * d + b] = 0.0;
        entries[a * d + b] = 1.0;
        entries[b * d + a] = 1.0;
    }
    Ok(ActionMatrix {
        kind: ActionKind::Swap { a: i, b: j },
        dim: d,
        entries,
    })
}

/// Matrix-vector product `M x`.
pub fn apply(m: &ActionMatrix, x: &StateVector) -> Result<StateVector> {
    if m.dim != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim,
            found: x.dim(),
        });
    }
    let d = m.dim;
    let out = m
        .entries
        .chunks_exact(d)
        .map(|row| row.iter().zip(x.iter()).map(|(a, b)| a * b).sum())
        .collect();
    Ok(StateVector(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[f64]) -> StateVector {
        StateVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn insertion_no_op_is_identity() {
        assert!(insertion_matrix(2, 2, 3).unwrap().is_identity());
    }

    #[test]
    fn insertion_matrix_moves_forward_and_back() {
        let x = sv(&[1.0, 2.0, 3.0]);
        let fwd = apply(&insertion_matrix(1, 3, 3).unwrap(), &x).unwrap();
        assert_eq!(fwd.as_slice(), &[2.0, 3.0, 1.0]);
        let back = apply(&insertion_matrix(3, 1, 3).unwrap(), &x).unwrap();
        assert_eq!(back.as_slice(), &[3.0, 1.0, 2.0]);
    }

    #[test]
    fn list_insert_rotations() {
        assert_eq!(
            list_insert(&sv(&[5.0, 6.0, 7.0]), 2, 2).unwrap().as_slice(),
            &[5.0, 6.0, 7.0]
        );
        let x = sv(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(
            list_insert(&x, 4, 1).unwrap().as_slice(),
            &[4.0, 1.0, 2.0, 3.0]
        );
        assert_eq!(
            list_insert(&x, 1, 4).unwrap().as_slice(),
            &[2.0, 3.0, 4.0, 1.0]
        );
    }

    #[test]
    fn program_operation_matrices() {
        let x = sv(&[7.0, 8.0, 9.0]);
        assert_eq!(
            apply(&assign_matrix(1, 3, 3).unwrap(), &x)
                .unwrap()
                .as_slice(),
            &[9.0, 8.0, 9.0]
        );
        assert_eq!(
            apply(&const_assign_matrix(2, 0.0, 3).unwrap(), &x)
                .unwrap()
                .as_slice(),
            &[7.0, 0.0, 9.0]
        );
        assert_eq!(
            apply(&swap_matrix(1, 3, 3).unwrap(), &x)
                .unwrap()
                .as_slice(),
            &[9.0, 8.0, 7.0]
        );
        assert_eq!(
            apply(&swap_matrix(1, 2, 2).unwrap(), &sv(&[3.0, 9.0]))
                .unwrap()
                .as_slice(),
            &[9.0, 3.0]
        );
        assert_eq!(
            apply(&sum_matrix(1, 2, 3, 3).unwrap(), &sv(&[1.0, 2.0, 3.0]))
                .unwrap()
                .as_slice(),
            &[5.0, 2.0, 3.0]
        );
        assert_eq!(
            apply(&sum_matrix(3, 1, 1, 3).unwrap(), &sv(&[1.0, 2.0, 3.0]))
                .unwrap()
                .as_slice(),
            &[1.0, 2.0, 2.0]
        );
    }

    #[test]
    fn identity_apply() {
        let x = sv(&[0.3, -1.0, 4.5]);
        assert_eq!(apply(&identity_matrix(3).unwrap(), &x).unwrap(), x);
    }

    #[test]
    fn out_of_range_indices() {
        assert!(matches!(
            insertion_matrix(0, 1, 3),
            Err(Error::IndexOutOfRange { index: 0, .. })
        ));
        assert!(matches!(
            insertion_matrix(1, 4, 3),
            Err(Error::IndexOutOfRange { index: 4, .. })
        ));
        assert!(list_insert(&sv(&[1.0]), 1, 2).is_err());
        assert!(assign_matrix(4, 1, 3).is_err());
        assert!(sum_matrix(1, 2, 9, 3).is_err());
        assert!(swap_matrix(1, 0, 3).is_err());
        assert!(const_assign_matrix(5, 1.0, 3).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let m = identity_matrix(3).unwrap();
        assert!(matches!(
            apply(&m, &sv(&[1.0, 2.0])),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn empty_state_rejected() {
        assert!(matches!(StateVector::new(vec![]), Err(Error::EmptyState)));
        assert!(serde_json::from_str::<StateVector>("[]").is_err());
    }

    #[test]
    fn display_is_space_separated() {
        assert_eq!(sv(&[1.0, 2.5, 3.0]).to_string(), "1 2.5 3");
    }
}
