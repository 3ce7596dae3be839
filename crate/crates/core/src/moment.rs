//! Multi-index moment sequences and the finite-difference machinery on them.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{MomentError, Result};
use crate::index::MultiIndex;
use crate::polynomial::Polynomial;
use crate::scalar::{binomial, binomial_row, Field, Rational, Real, ScalarMode, FLOAT_REL_TOL};
use crate::tensor::Tensor;

/// A moment sequence `mu_k` truncated at `k <= bounds`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTensor<T> {
    bounds: MultiIndex,
    values: Tensor<T>,
}

impl<T: Field> MomentTensor<T> {
    pub fn from_fn(bounds: MultiIndex, mut f: impl FnMut(&MultiIndex) -> T) -> Self {
        assert!(bounds.arity() >= 1, "moment tensors need at least one axis");
        let values = Tensor::from_fn(bounds.box_shape(), |k| f(&MultiIndex::new(k.to_vec())));
        MomentTensor { bounds, values }
    }

    /// Wraps a tensor whose shape is `bounds + 1` on every axis.
    pub fn from_tensor(values: Tensor<T>) -> Self {
        assert!(values.ndim() >= 1, "moment tensors need at least one axis");
        let bounds = MultiIndex::new(values.shape().iter().map(|d| d - 1).collect());
        MomentTensor { bounds, values }
    }

    pub fn zeros(bounds: MultiIndex) -> Self {
        Self::from_fn(bounds, |_| T::zero())
    }

    pub fn arity(&self) -> usize {
        self.bounds.arity()
    }

    pub fn bounds(&self) -> &MultiIndex {
        &self.bounds
    }

    pub fn values(&self) -> &Tensor<T> {
        &self.values
    }

    pub fn mode(&self) -> ScalarMode {
        T::mode()
    }

    pub fn get(&self, k: &MultiIndex) -> Result<&T> {
        k.check_within(&self.bounds)?;
        Ok(self.values.get(k.as_slice()))
    }

    /// Unchecked access for indices already known to be in bounds.
    pub(crate) fn at(&self, k: &[usize]) -> &T {
        self.values.get(k)
    }

    pub fn map<U: Field>(&self, f: impl FnMut(&T) -> U) -> MomentTensor<U> {
        MomentTensor {
            bounds: self.bounds.clone(),
            values: self.values.map(f),
        }
    }

    /// Restriction to `k <= new_bounds`.
    pub fn truncate(&self, new_bounds: &MultiIndex) -> Result<MomentTensor<T>> {
        new_bounds.check_within(&self.bounds)?;
        Ok(MomentTensor {
            bounds: new_bounds.clone(),
            values: self.values.leading_box(&new_bounds.box_shape()),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, &T)> + '_ {
        self.bounds.box_iter().zip(self.values.data())
    }
}

/// Bernstein coefficients `lambda_(k;m)` for one order `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinTensor<T> {
    pub k: MultiIndex,
    pub lambda: Tensor<T>,
}

impl<T: Field> BernsteinTensor<T> {
    pub fn get(&self, m: &MultiIndex) -> &T {
        self.lambda.get(m.as_slice())
    }
}

impl<T: Real> BernsteinTensor<T> {
    /// `sum_m |lambda_(k;m)|`
    pub fn abs_sum(&self) -> T {
        self.lambda.data().iter().fold(T::zero(), |acc, x| acc + x.abs_val())
    }
}

/// `nabla^r mu_s = sum_{l <= r} (-1)^{|l|} C(r, l) mu_{s + l}`.
pub fn forward_difference<T: Field>(mu: &MomentTensor<T>, r: &MultiIndex, s: &MultiIndex) -> Result<T> {
    let n = mu.arity();
    r.check_arity(n)?;
    s.check_arity(n)?;
    (r + s).check_within(mu.bounds())?;
    let rows: Vec<Vec<BigInt>> = r.as_slice().iter().map(|&ri| binomial_row(ri)).collect();
    let mut acc = T::zero();
    for l in r.box_iter() {
        let mut c = BigInt::one();
        for (axis, &li) in l.as_slice().iter().enumerate() {
            c *= &rows[axis][li];
        }
        if l.total() % 2 == 1 {
            c = -c;
        }
        let idx = s + &l;
        acc = acc + T::from_bigint(&c) * mu.at(idx.as_slice()).clone();
    }
    Ok(acc)
}

/// Row `m`, column `j` of the order-`k` transform sending moments to Bernstein
/// coefficients: `C(k, m) (-1)^(j-m) C(k-m, j-m)` for `j >= m`.
fn bernstein_matrix<T: Field>(k: usize) -> Vec<Vec<T>> {
    let outer = binomial_row(k);
    (0..=k)
        .map(|m| {
            let inner = binomial_row(k - m);
            (0..=k)
                .map(|j| {
                    if j < m {
                        T::zero()
                    } else {
                        let mut c = &outer[m] * &inner[j - m];
                        if (j - m) % 2 == 1 {
                            c = -c;
                        }
                        T::from_bigint(&c)
                    }
                })
                .collect()
        })
        .collect()
}

/// `lambda_(k;m) = C(k, m) nabla^{k-m} mu_m` for every `m <= k`, computed
/// axis by axis.
pub fn bernstein_coefficients<T: Field>(mu: &MomentTensor<T>, k: &MultiIndex) -> Result<BernsteinTensor<T>> {
    k.check_within(mu.bounds())?;
    let mut t = mu.values.leading_box(&k.box_shape());
    for (axis, &ka) in k.as_slice().iter().enumerate() {
        t = t.apply_along(axis, &bernstein_matrix::<T>(ka));
    }
    Ok(BernsteinTensor {
        k: k.clone(),
        lambda: t,
    })
}

/// Every difference `nabla^r mu_s` with `r + s <= max`, computed once so that
/// Bernstein tensors at all orders below `max` are lookups.
#[derive(Debug, Clone)]
pub struct DifferenceTable<T> {
    max: MultiIndex,
    diffs: Tensor<T>,
}

/// Position of `(r, s)` in [`difference_pairs`]`(max)`.
fn pair_position(max: usize, r: usize, s: usize) -> usize {
    // rows r' < r contribute (max + 1 - r') pairs each
    r * (max + 1) - r * (r.saturating_sub(1)) / 2 + s
}

impl<T: Field> DifferenceTable<T> {
    pub fn new(mu: &MomentTensor<T>, max: &MultiIndex) -> Result<Self> {
        max.check_within(mu.bounds())?;
        let base = mu.values.leading_box(&max.box_shape());
        let diffs = match T::common_denominator(base.data()) {
            Some((nums, den)) => {
                let mut t = Tensor::from_vec(base.shape().to_vec(), nums);
                for axis in 0..mu.arity() {
                    t = t.apply_along(axis, &integer_difference_matrix(max[axis], false));
                }
                t.map(|x| T::from_rational(&Rational::new(x.clone(), den.clone())))
            }
            None => {
                let mut t = base;
                for axis in 0..mu.arity() {
                    t = t.apply_along(axis, &difference_matrix::<T>(max[axis], false));
                }
                t
            }
        };
        Ok(DifferenceTable {
            max: max.clone(),
            diffs,
        })
    }

    pub fn difference(&self, r: &MultiIndex, s: &MultiIndex) -> Result<&T> {
        (r + s).check_within(&self.max)?;
        let idx: Vec<usize> = (0..self.max.arity())
            .map(|a| pair_position(self.max[a], r[a], s[a]))
            .collect();
        Ok(self.diffs.get(&idx))
    }

    /// Same result as [`bernstein_coefficients`] for any `k <= max`.
    pub fn bernstein(&self, k: &MultiIndex) -> Result<BernsteinTensor<T>> {
        k.check_within(&self.max)?;
        let rows: Vec<Vec<BigInt>> = k.as_slice().iter().map(|&ka| binomial_row(ka)).collect();
        let lambda = Tensor::from_fn(k.box_shape(), |m| {
            let mut c = BigInt::one();
            let idx: Vec<usize> = m
                .iter()
                .enumerate()
                .map(|(a, &ma)| {
                    c *= &rows[a][ma];
                    pair_position(self.max[a], k[a] - ma, ma)
                })
                .collect();
            let d = self.diffs.get(&idx).clone();
            if c.is_one() {
                d
            } else {
                T::from_bigint(&c) * d
            }
        });
        Ok(BernsteinTensor { k: k.clone(), lambda })
    }
}

/// Witness `(r, s)` of a tested finite difference.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceWitness<T> {
    pub r: MultiIndex,
    pub s: MultiIndex,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MonotoneVerdict<T> {
    /// Every difference with `r + s <= order` is nonnegative.
    Holds { order: MultiIndex },
    /// Lexicographically first negative difference.
    Violated(DifferenceWitness<T>),
    /// Float mode only: a difference within tolerance of zero and no definite violation.
    Indeterminate(DifferenceWitness<T>),
}

impl<T> MonotoneVerdict<T> {
    pub fn holds(&self) -> bool {
        matches!(self, MonotoneVerdict::Holds { .. })
    }
}

/// Per-axis matrix mapping `x_0..x_M` to `nabla^r x_s` for every pair `r + s <= M`,
/// rows in `(r, s)` lexicographic order.
fn difference_pairs(max: usize) -> Vec<(usize, usize)> {
    (0..=max).flat_map(|r| (0..=max - r).map(move |s| (r, s))).collect()
}

fn integer_difference_matrix(max: usize, absolute: bool) -> Vec<Vec<BigInt>> {
    difference_pairs(max)
        .into_iter()
        .map(|(r, s)| {
            let mut out = vec![BigInt::zero(); max + 1];
            for (j, c) in binomial_row(r).into_iter().enumerate() {
                out[s + j] = if !absolute && j % 2 == 1 { -c } else { c };
            }
            out
        })
        .collect()
}

fn difference_matrix<T: Field>(max: usize, absolute: bool) -> Vec<Vec<T>> {
    integer_difference_matrix(max, absolute)
        .iter()
        .map(|row| row.iter().map(T::from_bigint).collect())
        .collect()
}

/// `(r, s)` of a difference, as plain index vectors.
type PairKey = (Vec<usize>, Vec<usize>);

/// Tests `nabla^r mu_s >= 0` for all `(r, s)` with `r + s <= max_order`.
///
/// Pairs are ordered row-major on the concatenation `(r_1..r_n, s_1..s_n)`.
pub fn check_completely_monotone<T: Real>(mu: &MomentTensor<T>, max_order: &MultiIndex) -> Result<MonotoneVerdict<T>> {
    max_order.check_within(mu.bounds())?;
    let n = mu.arity();
    let base = mu.values.leading_box(&max_order.box_shape());
    let diffs = DifferenceTable::new(mu, max_order)?.diffs;
    let scales = if T::is_exact() {
        None
    } else {
        let mut s = base.map(|x| x.abs_val());
        for axis in 0..n {
            s = s.apply_along(axis, &difference_matrix::<T>(max_order[axis], true));
        }
        Some(s)
    };

    let pairs: Vec<Vec<(usize, usize)>> = (0..n).map(|a| difference_pairs(max_order[a])).collect();
    let key_of = |off: usize| -> PairKey {
        let idx = diffs.unravel(off);
        let r = idx.iter().enumerate().map(|(a, &p)| pairs[a][p].0).collect();
        let s = idx.iter().enumerate().map(|(a, &p)| pairs[a][p].1).collect();
        (r, s)
    };

    let mut violated: Option<(PairKey, T)> = None;
    let mut unresolved: Option<(PairKey, T)> = None;
    for (off, v) in diffs.data().iter().enumerate() {
        let tol = scales
            .as_ref()
            .map(|s| FLOAT_REL_TOL * s.data()[off].to_f64())
            .unwrap_or(0.0);
        let definite_negative = if T::is_exact() {
            *v < T::zero()
        } else {
            v.to_f64() < -tol
        };
        let slot = if definite_negative {
            &mut violated
        } else if !T::is_exact() && v.to_f64().abs() <= tol {
            &mut unresolved
        } else {
            continue;
        };
        let key = key_of(off);
        let take = match slot {
            None => true,
            Some((k, _)) => {
                let a = key.0.iter().chain(&key.1);
                let b = k.0.iter().chain(&k.1);
                a.lt(b)
            }
        };
        if take {
            *slot = Some((key, v.clone()));
        }
    }
    let witness = |((r, s), value): (PairKey, T)| DifferenceWitness {
        r: MultiIndex::new(r),
        s: MultiIndex::new(s),
        value,
    };
    Ok(match (violated, unresolved) {
        (Some(v), _) => MonotoneVerdict::Violated(witness(v)),
        (None, Some(u)) => MonotoneVerdict::Indeterminate(witness(u)),
        (None, None) => MonotoneVerdict::Holds {
            order: max_order.clone(),
        },
    })
}

/// `L_mu(p_1, ..., p_n)`, the multilinear extension of `L(t^k1, ..., t^kn) = mu_k`.
pub fn evaluate_functional<T: Field>(mu: &MomentTensor<T>, polys: &[Polynomial<T>]) -> Result<T> {
    let n = mu.arity();
    if polys.len() != n {
        return Err(MomentError::Dimension {
            expected: n,
            found: polys.len(),
        });
    }
    if polys.iter().any(|p| p.is_zero()) {
        return Ok(T::zero());
    }
    let degrees = MultiIndex::new(polys.iter().map(|p| p.degree()).collect());
    degrees.check_within(mu.bounds())?;
    let sub = mu.values.leading_box(&degrees.box_shape());
    let vs: Vec<Vec<T>> = polys.iter().map(|p| p.coeffs()[..=p.degree()].to_vec()).collect();
    Ok(sub.contract_all(&vs))
}

/// `C(k, m) = prod_l C(k_l, m_l)`.
pub fn multi_binomial(k: &MultiIndex, m: &MultiIndex) -> BigInt {
    k.as_slice()
        .iter()
        .zip(m.as_slice())
        .map(|(&a, &b)| binomial(a, b))
        .fold(BigInt::one(), |acc, c| acc * c)
}

/// True when every Bernstein coefficient with order `<= max_order` is `>= 0`.
pub fn all_bernstein_nonnegative<T: Real>(mu: &MomentTensor<T>, max_order: &MultiIndex) -> Result<bool> {
    for k in max_order.box_iter() {
        let b = bernstein_coefficients(mu, &k)?;
        if b.lambda.data().iter().any(|x| *x < T::zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sum of all Bernstein coefficients of order `k`; equals `mu_0` by telescoping.
pub fn bernstein_mass<T: Field>(b: &BernsteinTensor<T>) -> T {
    b.lambda.data().iter().fold(T::zero(), |acc, x| acc + x.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::Zero;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    fn lebesgue(n: usize, bound: usize) -> MomentTensor<Rational> {
        MomentTensor::from_fn(MultiIndex::splat(n, bound), |k| {
            k.as_slice()
                .iter()
                .fold(Rational::one(), |acc, &ki| acc * q(1, ki as i64 + 1))
        })
    }

    #[test]
    fn difference_table_matches_direct_computation() {
        let mu = MomentTensor::from_fn(MultiIndex::from([4, 3]), |k| q(k[0] as i64 * 3 - 5, k[1] as i64 + 2));
        let table = DifferenceTable::new(&mu, &MultiIndex::from([4, 3])).unwrap();
        for k in MultiIndex::from([4, 3]).box_iter() {
            assert_eq!(table.bernstein(&k).unwrap(), bernstein_coefficients(&mu, &k).unwrap());
            for s in k.box_iter() {
                let r = k.checked_sub(&s).unwrap();
                assert_eq!(
                    table.difference(&r, &s).unwrap(),
                    &forward_difference(&mu, &r, &s).unwrap()
                );
            }
        }
        assert!(table.bernstein(&MultiIndex::from([5, 0])).is_err());
    }

    #[test]
    fn difference_of_constant_vanishes() {
        let mu = MomentTensor::from_fn(MultiIndex::from([5]), |_| Rational::one());
        assert_eq!(
            forward_difference(&mu, &[3].into(), &[0].into()).unwrap(),
            Rational::zero()
        );
    }

    #[test]
    fn differences_of_lebesgue_moments() {
        // 1 - 2*(1/2) + 1/3
        let mu = lebesgue(1, 4);
        assert_eq!(forward_difference(&mu, &[2].into(), &[0].into()).unwrap(), q(1, 3));
        // (1 - 1/2)^2 by the four-term expansion 1 - 1/2 - 1/2 + 1/4
        let mu2 = lebesgue(2, 3);
        assert_eq!(
            forward_difference(&mu2, &[1, 1].into(), &[0, 0].into()).unwrap(),
            q(1, 4)
        );
    }

    #[test]
    fn difference_errors() {
        let mu = lebesgue(2, 3);
        assert_eq!(
            forward_difference(&mu, &[2, 2].into(), &[0, 2].into()).unwrap_err(),
            MomentError::OutOfBounds {
                axis: 1,
                requested: 4,
                bound: 3
            }
        );
        assert!(matches!(
            forward_difference(&mu, &[1].into(), &[0].into()),
            Err(MomentError::Dimension { .. })
        ));
    }

    #[test]
    fn bernstein_examples() {
        let ones = MomentTensor::from_fn(MultiIndex::from([4]), |_| Rational::one());
        let b = bernstein_coefficients(&ones, &[4].into()).unwrap();
        assert_eq!(b.lambda.data(), &[0, 0, 0, 0, 1].map(|v| q(v, 1)));

        let leb = lebesgue(1, 3);
        let b = bernstein_coefficients(&leb, &[3].into()).unwrap();
        assert_eq!(b.lambda.data(), &vec![q(1, 4); 4][..]);

        let pow2 = MomentTensor::from_fn(MultiIndex::from([2]), |k| q(1 << k[0], 1));
        let b = bernstein_coefficients(&pow2, &[2].into()).unwrap();
        assert_eq!(b.lambda.data(), &[q(1, 1), q(-4, 1), q(4, 1)]);
    }

    #[test]
    fn bernstein_matches_direct_definition() {
        let mu = MomentTensor::from_fn(MultiIndex::from([3, 2]), |k| q((k[0] * 7 + k[1] * 3) as i64 % 5 - 2, 3));
        let k = MultiIndex::from([3, 2]);
        let b = bernstein_coefficients(&mu, &k).unwrap();
        for m in k.box_iter() {
            let direct =
                Rational::from_integer(multi_binomial(&k, &m)) * forward_difference(&mu, &(&k - &m), &m).unwrap();
            assert_eq!(b.get(&m), &direct, "m = {m}");
        }
    }

    #[test]
    fn monotone_examples() {
        let zero = MomentTensor::<Rational>::zeros(MultiIndex::from([4]));
        assert!(check_completely_monotone(&zero, &[4].into()).unwrap().holds());

        let leb = lebesgue(1, 8);
        assert!(check_completely_monotone(&leb, &[8].into()).unwrap().holds());

        let pow2 = MomentTensor::from_fn(MultiIndex::from([4]), |k| q(1 << k[0], 1));
        match check_completely_monotone(&pow2, &[4].into()).unwrap() {
            MonotoneVerdict::Violated(w) => {
                assert_eq!(w.r, MultiIndex::from([1]));
                assert_eq!(w.s, MultiIndex::from([0]));
                assert_eq!(w.value, q(-1, 1));
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn float_mode_zero_differences_are_indeterminate() {
        let ones = MomentTensor::from_fn(MultiIndex::from([3]), |_| 1.0f64);
        assert!(matches!(
            check_completely_monotone(&ones, &[3].into()).unwrap(),
            MonotoneVerdict::Indeterminate(_)
        ));
        let pow2 = MomentTensor::from_fn(MultiIndex::from([3]), |k| (1u32 << k[0]) as f64);
        assert!(matches!(
            check_completely_monotone(&pow2, &[3].into()).unwrap(),
            MonotoneVerdict::Violated(_)
        ));
    }

    #[test]
    fn functional_examples() {
        let mu = lebesgue(2, 3);
        let mono = |k: usize| Polynomial::monomial(k);
        assert_eq!(evaluate_functional(&mu, &[mono(2), mono(3)]).unwrap(), q(1, 12));
        let zero = Polynomial::<Rational>::zero();
        assert_eq!(evaluate_functional(&mu, &[zero, mono(1)]).unwrap(), Rational::zero());
        let p = Polynomial::new(vec![q(1, 1), q(1, 1)]);
        assert_eq!(evaluate_functional(&mu, &[p.clone(), p]).unwrap(), q(9, 4));
        assert!(matches!(
            evaluate_functional(&mu, &[mono(4), mono(0)]),
            Err(MomentError::OutOfBounds { axis: 0, .. })
        ));
    }
}
