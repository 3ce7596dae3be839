use std::fmt;
use std::ops::{Add, Index, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{MomentError, Result};

/// A multi-index `k = (k_1, ..., k_n)` of nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn splat(n: usize, v: usize) -> Self {
        MultiIndex(vec![v; n])
    }

    /// The Kronecker multi-index `1_l`.
    pub fn unit(n: usize, axis: usize) -> Self {
        let mut e = vec![0; n];
        e[axis] = 1;
        MultiIndex(e)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// `|k|`
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise minimum.
    pub fn min(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    /// Number of multi-indices `m <= self`, i.e. `prod(k_l + 1)`.
    pub fn box_len(&self) -> usize {
        self.0.iter().map(|k| k + 1).product()
    }

    /// Shape `(k_1 + 1, ..., k_n + 1)` of the box below `self`.
    pub fn box_shape(&self) -> Vec<usize> {
        self.0.iter().map(|k| k + 1).collect()
    }

    /// All `m <= self` in row-major (lexicographic) order.
    pub fn box_iter(&self) -> BoxIter {
        BoxIter::new(self.clone())
    }

    pub fn check_arity(&self, n: usize) -> Result<()> {
        if self.arity() != n {
            return Err(MomentError::Dimension {
                expected: n,
                found: self.arity(),
            });
        }
        Ok(())
    }

    /// Errors with the first axis on which `self > bounds`.
    pub fn check_within(&self, bounds: &MultiIndex) -> Result<()> {
        self.check_arity(bounds.arity())?;
        for (axis, (&k, &b)) in self.0.iter().zip(&bounds.0).enumerate() {
            if k > b {
                return Err(MomentError::OutOfBounds {
                    axis,
                    requested: k,
                    bound: b,
                });
            }
        }
        Ok(())
    }

    /// Componentwise difference, `None` if any entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }
}

impl Index<usize> for MultiIndex {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MultiIndex {
    type Output = MultiIndex;

    fn sub(self, rhs: &MultiIndex) -> MultiIndex {
        self.checked_sub(rhs).expect("multi-index subtraction underflow")
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

impl<const N: usize> From<[usize; N]> for MultiIndex {
    fn from(v: [usize; N]) -> Self {
        MultiIndex(v.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Row-major odometer over `0 <= m <= upper`.
pub struct BoxIter {
    upper: MultiIndex,
    next: Option<Vec<usize>>,
}

impl BoxIter {
    fn new(upper: MultiIndex) -> Self {
        let next = Some(vec![0; upper.arity()]);
        BoxIter { upper, next }
    }
}

impl Iterator for BoxIter {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut axis = succ.len();
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            if succ[axis] < self.upper[axis] {
                succ[axis] += 1;
                self.next = Some(succ);
                break;
            }
            succ[axis] = 0;
        }
        Some(MultiIndex(current))
    }
}
