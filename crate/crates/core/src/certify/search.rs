//! Maximization of `|sum_m a^(1)_{m_1} ... a^(n)_{m_n} lambda_m|` over sign
//! vectors, the objective shared by weak bounds and semivariation.
//!
//! The objective is multilinear in the per-axis weights, so the box supremum
//! is attained at a `±1` vertex. The last axis is solved in closed form
//! (`a_{m_n} = sign` of its partial coefficient), and flipping every sign on
//! an enumerated axis leaves the value unchanged, so the first entry of each
//! enumerated axis is pinned to `+1`.
//!
//! Exact search runs in two passes. A Gray-code walk in `f64` finds the float
//! maximum; a second walk re-evaluates in the exact field every vertex whose
//! float value lies within twice the rounding bound of that maximum. The exact
//! maximizer is always among those candidates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SignAssignment;
use crate::scalar::Real;
use crate::tensor::Tensor;

/// Exact enumeration limit: `sum_{l<n} (k_l + 1) <= 20` sign variables.
pub const EXACT_BUDGET_BITS: usize = 20;
pub const DEFAULT_SWEEPS: usize = 64;
pub const DEFAULT_STARTS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SignOptimum<T> {
    pub value: T,
    pub signs: SignAssignment,
}

/// Number of `±1` variables on the enumerated axes (all but the last).
pub fn vertex_bits(shape: &[usize]) -> usize {
    shape[..shape.len().saturating_sub(1)].iter().sum()
}

fn signs_to_field<T: Real>(s: &[i8]) -> Vec<T> {
    s.iter().map(|&v| if v < 0 { -T::one() } else { T::one() }).collect()
}

/// Contracts all axes but the last with the given signs, returning the
/// partial coefficient vector over the last axis.
fn last_axis_coefficients<T: Real>(lambda: &Tensor<T>, signs: &[Vec<i8>]) -> Vec<T> {
    let mut t = lambda.clone();
    for s in signs {
        t = t.contract_along(0, &signs_to_field::<T>(s));
    }
    t.into_data()
}

/// Value at a vertex given on the enumerated axes, completing the last axis
/// analytically.
pub fn complete_vertex<T: Real>(lambda: &Tensor<T>, enumerated: &[Vec<i8>]) -> SignOptimum<T> {
    let c = last_axis_coefficients(lambda, enumerated);
    let value = c.iter().fold(T::zero(), |acc, x| acc + x.abs_val());
    let mut signs = enumerated.to_vec();
    signs.push(c.iter().map(|x| x.sign()).collect());
    SignOptimum {
        value,
        signs: SignAssignment::new(signs),
    }
}

/// `|sum_m a_m lambda_m|` for a full product sign assignment.
pub fn evaluate_signs<T: Real>(lambda: &Tensor<T>, signs: &SignAssignment) -> T {
    let vs: Vec<Vec<T>> = signs.axes().iter().map(|s| signs_to_field::<T>(s)).collect();
    lambda.contract_all(&vs).abs_val()
}

/// Float Gray-code walk over the enumerated axes; calls `visit` with the float
/// value and the current enumerated signs at every vertex.
struct FloatWalk {
    shape: Vec<usize>,
    /// `levels[j]`: lambda contracted over axes `0..j`, flattened.
    levels: Vec<Vec<f64>>,
    signs: Vec<Vec<f64>>,
    c: Vec<f64>,
}

impl FloatWalk {
    fn new(lambda: &[f64], shape: &[usize]) -> Self {
        let n = shape.len();
        let signs: Vec<Vec<f64>> = shape[..n - 1].iter().map(|&d| vec![1.0; d]).collect();
        let mut walk = FloatWalk {
            shape: shape.to_vec(),
            levels: vec![lambda.to_vec()],
            signs,
            c: Vec::new(),
        };
        walk.levels.resize(n - 1, Vec::new());
        walk.resync(0);
        walk
    }

    fn contract_first(t: &[f64], d: usize, s: &[f64]) -> Vec<f64> {
        let inner = t.len() / d;
        let mut out = vec![0.0; inner];
        for (m, &sm) in s.iter().enumerate() {
            let row = &t[m * inner..(m + 1) * inner];
            for (o, &x) in out.iter_mut().zip(row) {
                *o += sm * x;
            }
        }
        out
    }

    /// Recomputes every level below axis `from` (inclusive) from scratch.
    fn resync(&mut self, from: usize) {
        let n = self.shape.len();
        for j in from..n - 1 {
            let next = Self::contract_first(&self.levels[j], self.shape[j], &self.signs[j]);
            if j + 1 < n - 1 {
                self.levels[j + 1] = next;
            } else {
                self.c = next;
            }
        }
    }

    fn value(&self) -> f64 {
        self.c.iter().map(|x| x.abs()).sum()
    }

    /// Flips entry `m` on axis `axis`.
    fn flip(&mut self, axis: usize, m: usize) {
        let n = self.shape.len();
        let s = -self.signs[axis][m];
        self.signs[axis][m] = s;
        if axis == n - 2 {
            let inner = self.c.len();
            let row = &self.levels[axis][m * inner..(m + 1) * inner];
            for (o, &x) in self.c.iter_mut().zip(row) {
                *o += 2.0 * s * x;
            }
        } else {
            self.resync(axis);
        }
    }

    fn run(mut self, mut visit: impl FnMut(f64, &[Vec<f64>])) {
        let n = self.shape.len();
        // Free bits, innermost enumerated axis first so it flips most often.
        let mut bits: Vec<(usize, usize)> = Vec::new();
        for axis in (0..n - 1).rev() {
            for m in 1..self.shape[axis] {
                bits.push((axis, m));
            }
        }
        visit(self.value(), &self.signs);
        let total: u64 = 1u64 << bits.len();
        for i in 1..total {
            let (axis, m) = bits[i.trailing_zeros() as usize];
            self.flip(axis, m);
            visit(self.value(), &self.signs);
        }
    }
}

fn to_i8(signs: &[Vec<f64>]) -> Vec<Vec<i8>> {
    signs
        .iter()
        .map(|s| s.iter().map(|&x| if x < 0.0 { -1 } else { 1 }).collect())
        .collect()
}

/// Lexicographic tie-break key: `+1` before `-1`.
fn tie_key(signs: &[Vec<i8>]) -> Vec<i8> {
    signs.iter().flatten().map(|&s| if s < 0 { 1 } else { 0 }).collect()
}

/// Exact supremum over all sign vertices. The caller enforces the budget.
pub fn maximize<T: Real>(lambda: &Tensor<T>) -> SignOptimum<T> {
    let shape = lambda.shape().to_vec();
    let n = shape.len();
    if n == 1 {
        return complete_vertex(lambda, &[]);
    }
    if lambda.data().iter().all(|x| x.is_zero()) {
        let enumerated: Vec<Vec<i8>> = shape[..n - 1].iter().map(|&d| vec![1; d]).collect();
        return complete_vertex(lambda, &enumerated);
    }

    let lf: Vec<f64> = lambda.data().iter().map(|x| x.to_f64()).collect();
    let scale: f64 = lf.iter().map(|x| x.abs()).sum();
    if !scale.is_finite() {
        return maximize_exhaustive(lambda);
    }
    // Rounding bound on any computed vertex value: conversion, fresh
    // contractions over at most sum(d) terms, and the incremental updates on
    // the innermost enumerated axis between resyncs.
    let updates = (1u64 << (shape[n - 2] - 1)) as f64;
    let depth = shape.iter().sum::<usize>() as f64 + 8.0;
    let eps = 4.0 * scale * f64::EPSILON * (4.0 * (updates + 1.0) * depth + 16.0) + f64::MIN_POSITIVE;

    let mut float_max = f64::NEG_INFINITY;
    FloatWalk::new(&lf, &shape).run(|v, _| float_max = float_max.max(v));
    let threshold = float_max - 2.0 * eps;

    let mut best: Option<(SignOptimum<T>, Vec<i8>)> = None;
    FloatWalk::new(&lf, &shape).run(|v, signs| {
        if v < threshold {
            return;
        }
        let enumerated = to_i8(signs);
        let cand = complete_vertex(lambda, &enumerated);
        let key = tie_key(&enumerated);
        let better = match &best {
            None => true,
            Some((b, bk)) => cand.value > b.value || (cand.value == b.value && key < *bk),
        };
        if better {
            best = Some((cand, key));
        }
    });
    best.expect("the float maximizer is always a candidate").0
}

/// Plain enumeration of every pinned vertex in the exact field.
pub fn maximize_exhaustive<T: Real>(lambda: &Tensor<T>) -> SignOptimum<T> {
    let shape = lambda.shape();
    let n = shape.len();
    if n == 1 {
        return complete_vertex(lambda, &[]);
    }
    let free: Vec<usize> = shape[..n - 1].iter().map(|d| d - 1).collect();
    let bits: usize = free.iter().sum();
    let mut best: Option<(SignOptimum<T>, Vec<i8>)> = None;
    for mask in 0u64..(1u64 << bits) {
        let mut enumerated = Vec::with_capacity(n - 1);
        let mut off = 0;
        for (axis, &f) in free.iter().enumerate() {
            let mut s = vec![1i8; shape[axis]];
            for m in 0..f {
                if mask >> (off + m) & 1 == 1 {
                    s[m + 1] = -1;
                }
            }
            off += f;
            enumerated.push(s);
        }
        let cand = complete_vertex(lambda, &enumerated);
        let key = tie_key(&enumerated);
        let better = match &best {
            None => true,
            Some((b, bk)) => cand.value > b.value || (cand.value == b.value && key < *bk),
        };
        if better {
            best = Some((cand, key));
        }
    }
    best.unwrap().0
}

/// Coordinate ascent lower bound: each sweep fixes all axes but one and sets
/// the free axis to the signs of its linear coefficients. The first start is
/// all-ones; the rest are drawn from `seed`.
pub fn coordinate_ascent<T: Real>(lambda: &Tensor<T>, sweeps: usize, starts: usize, seed: u64) -> SignOptimum<T> {
    let shape = lambda.shape().to_vec();
    let n = shape.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<SignOptimum<T>> = None;
    for start in 0..starts.max(1) {
        let mut signs: Vec<Vec<i8>> = shape
            .iter()
            .map(|&d| {
                (0..d)
                    .map(|_| if start == 0 || rng.random_bool(0.5) { 1 } else { -1 })
                    .collect()
            })
            .collect();
        let mut value = evaluate_signs(lambda, &SignAssignment::new(signs.clone()));
        for _ in 0..sweeps {
            let mut changed = false;
            for axis in 0..n {
                let mut t = lambda.clone();
                // Contract every other axis, highest first so indices stay valid.
                for other in (0..n).rev().filter(|&a| a != axis) {
                    t = t.contract_along(other, &signs_to_field::<T>(&signs[other]));
                }
                let g = t.into_data();
                let next: Vec<i8> = g.iter().map(|x| x.sign()).collect();
                value = g.iter().fold(T::zero(), |acc, x| acc + x.abs_val());
                if next != signs[axis] {
                    signs[axis] = next;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let cand = SignOptimum {
            value,
            signs: SignAssignment::new(signs),
        };
        if best.as_ref().is_none_or(|b| cand.value > b.value) {
            best = Some(cand);
        }
    }
    best.unwrap()
}
