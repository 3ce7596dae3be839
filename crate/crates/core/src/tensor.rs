//! Dense row-major tensors and the mode-wise products the rest of the crate
//! is built from: moment maps, Bernstein transforms and functional
//! evaluation are all separable along axes.

use std::ops::Mul;

use num_traits::Zero;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

impl<T: Clone> Tensor<T> {
    pub fn from_vec(shape: Vec<usize>, data: Vec<T>) -> Self {
        assert_eq!(
            shape.iter().product::<usize>(),
            data.len(),
            "shape/data length mismatch"
        );
        Tensor { shape, data }
    }

    pub fn filled(shape: Vec<usize>, value: T) -> Self {
        let len = shape.iter().product();
        Tensor {
            shape,
            data: vec![value; len],
        }
    }

    /// Builds a tensor by evaluating `f` at every index in row-major order.
    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0; shape.len()];
        for _ in 0..len {
            data.push(f(&idx));
            for axis in (0..shape.len()).rev() {
                idx[axis] += 1;
                if idx[axis] < shape[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
        Tensor { shape, data }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        let mut off = 0;
        for (i, (&k, &d)) in idx.iter().zip(&self.shape).enumerate() {
            debug_assert!(k < d, "index {k} out of range on axis {i}");
            off = off * d + k;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: T) {
        let off = self.offset(idx);
        self.data[off] = v;
    }

    /// Decodes a flat offset back into a multi-index.
    pub fn unravel(&self, mut off: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for axis in (0..self.shape.len()).rev() {
            idx[axis] = off % self.shape[axis];
            off /= self.shape[axis];
        }
        idx
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Tensor<U> {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    /// The leading sub-box with the given extents (each `<=` the current one).
    pub fn leading_box(&self, extents: &[usize]) -> Tensor<T> {
        assert_eq!(extents.len(), self.shape.len());
        if extents == self.shape.as_slice() {
            return self.clone();
        }
        Tensor::from_fn(extents.to_vec(), |idx| self.get(idx).clone())
    }
}

impl<T: Clone + Zero + Mul<Output = T>> Tensor<T> {
    /// Mode-`axis` product: `out[.., i, ..] = sum_j m[i][j] * self[.., j, ..]`.
    ///
    /// Zero matrix entries are skipped, which matters for the triangular
    /// Bernstein transforms.
    pub fn apply_along(&self, axis: usize, m: &[Vec<T>]) -> Tensor<T> {
        let d_in = self.shape[axis];
        let d_out = m.len();
        let st = strides(&self.shape);
        let inner = st[axis];
        let outer: usize = self.shape[..axis].iter().product();
        let mut shape = self.shape.clone();
        shape[axis] = d_out;
        let mut data = vec![T::zero(); outer * d_out * inner];
        for o in 0..outer {
            for (i, row) in m.iter().enumerate() {
                debug_assert_eq!(row.len(), d_in);
                let out_base = (o * d_out + i) * inner;
                for (j, coef) in row.iter().enumerate() {
                    if coef.is_zero() {
                        continue;
                    }
                    let in_base = (o * d_in + j) * inner;
                    for r in 0..inner {
                        let term = coef.clone() * self.data[in_base + r].clone();
                        let slot = &mut data[out_base + r];
                        *slot = std::mem::replace(slot, T::zero()) + term;
                    }
                }
            }
        }
        Tensor { shape, data }
    }

    /// Contracts `axis` against `v`, removing that axis.
    pub fn contract_along(&self, axis: usize, v: &[T]) -> Tensor<T> {
        let reduced = self.apply_along(axis, &[v.to_vec()]);
        let mut shape = reduced.shape;
        shape.remove(axis);
        Tensor {
            shape,
            data: reduced.data,
        }
    }

    /// Full contraction against one vector per axis.
    pub fn contract_all(&self, vs: &[Vec<T>]) -> T {
        assert_eq!(vs.len(), self.ndim());
        let mut t = self.clone();
        for v in vs.iter().rev() {
            let last = t.ndim() - 1;
            t = t.contract_along(last, v);
        }
        t.data.into_iter().next().unwrap_or_else(T::zero)
    }
}
