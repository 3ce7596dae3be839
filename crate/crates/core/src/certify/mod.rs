//! Boundedness and weak boundedness certificates for truncated moment
//! sequences.
//!
//! A sequence is *bounded* with constant `C` when `sum_m |lambda_(k;m)| <= C`
//! for every order `k`, and *weakly bounded* when the sign-weighted sums
//! `|sum_m a^(1)_{m_1} ... a^(n)_{m_n} lambda_(k;m)|` stay below `C`. Only
//! finitely many orders are ever scanned, so a positive verdict records the
//! order up to which it holds; a violation against a claimed constant is
//! conclusive.

pub mod search;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MomentError, Result};
use crate::index::MultiIndex;
use crate::moment::{bernstein_coefficients, BernsteinTensor, DifferenceTable, MomentTensor};
use crate::scalar::{Real, ScalarMode, FLOAT_REL_TOL};
use search::{coordinate_ascent, maximize, vertex_bits, DEFAULT_STARTS, DEFAULT_SWEEPS, EXACT_BUDGET_BITS};

/// Per-axis sign vectors `a^(l)`, one entry per `m_l = 0..=k_l`.
///
/// Witnesses produced here are always `±1` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignAssignment(Vec<Vec<i8>>);

impl SignAssignment {
    pub fn new(axes: Vec<Vec<i8>>) -> Self {
        debug_assert!(axes.iter().flatten().all(|s| *s == 1 || *s == -1));
        SignAssignment(axes)
    }

    pub fn axes(&self) -> &[Vec<i8>] {
        &self.0
    }

    pub fn shape(&self) -> Vec<usize> {
        self.0.iter().map(Vec::len).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Bounded,
    WeaklyBounded,
}

impl CertificateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateKind::Bounded => "bounded",
            CertificateKind::WeaklyBounded => "weakly-bounded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Heuristic,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<T> {
    HoldsUpToOrder,
    /// First order (row-major) whose value exceeds the claimed constant.
    Violated {
        order: MultiIndex,
        value: T,
        claimed: T,
    },
    Inconclusive,
}

impl<T> Verdict<T> {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::HoldsUpToOrder => "holds-up-to-order",
            Verdict::Violated { .. } => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport<T> {
    pub kind: CertificateKind,
    pub mode: ScalarMode,
    pub scanned_order: MultiIndex,
    /// Maximum over the scanned orders.
    pub constant: T,
    pub witness_order: MultiIndex,
    pub witness_signs: Option<SignAssignment>,
    pub method: Method,
    pub verdict: Verdict<T>,
    /// `2^n * constant`, the extension-norm bound for polynomial tuples.
    pub extension_norm_bound: T,
}

impl<T: Real> CertificateReport<T> {
    pub fn holds(&self) -> bool {
        matches!(self.verdict, Verdict::HoldsUpToOrder)
    }

    pub fn violated(&self) -> bool {
        matches!(self.verdict, Verdict::Violated { .. })
    }

    /// Recomputes the value at the witness order from `mu`.
    pub fn reevaluate(&self, mu: &MomentTensor<T>) -> Result<T> {
        let b = bernstein_coefficients(mu, &self.witness_order)?;
        Ok(match &self.witness_signs {
            Some(signs) => search::evaluate_signs(&b.lambda, signs),
            None => b.abs_sum(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOptions<T> {
    pub claimed: Option<T>,
    pub budget_bits: usize,
    pub sweeps: usize,
    pub starts: usize,
    pub seed: u64,
}

impl<T> Default for CertifyOptions<T> {
    fn default() -> Self {
        CertifyOptions {
            claimed: None,
            budget_bits: EXACT_BUDGET_BITS,
            sweeps: DEFAULT_SWEEPS,
            starts: DEFAULT_STARTS,
            seed: 0,
        }
    }
}

impl<T> CertifyOptions<T> {
    pub fn with_claim(claimed: Option<T>) -> Self {
        CertifyOptions {
            claimed,
            ..Default::default()
        }
    }
}

struct OrderValue<T> {
    k: MultiIndex,
    value: T,
    signs: Option<SignAssignment>,
    method: Method,
}

/// Float Bernstein tensors with entries indistinguishable from zero.
fn has_near_zero<T: Real>(b: &BernsteinTensor<T>) -> bool {
    if T::is_exact() {
        return false;
    }
    let scale = b.lambda.data().iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
    b.lambda
        .data()
        .iter()
        .any(|x| x.to_f64().abs() <= FLOAT_REL_TOL * scale)
}

fn assemble<T: Real>(
    kind: CertificateKind,
    n: usize,
    max_order: &MultiIndex,
    orders: Vec<OrderValue<T>>,
    claimed: Option<&T>,
) -> CertificateReport<T> {
    let mut best = 0;
    for (i, o) in orders.iter().enumerate() {
        if o.value > orders[best].value {
            best = i;
        }
    }
    let method = orders.iter().map(|o| o.method).max().unwrap_or(Method::Exact);
    let mut verdict = if method == Method::Heuristic {
        Verdict::Inconclusive
    } else {
        Verdict::HoldsUpToOrder
    };
    if let Some(c) = claimed {
        let margin = if T::is_exact() {
            0.0
        } else {
            FLOAT_REL_TOL * c.to_f64().abs()
        };
        let mut near = false;
        for o in &orders {
            let excess = (o.value.clone() - c.clone()).to_f64();
            if o.value > *c && (T::is_exact() || excess > margin) {
                verdict = Verdict::Violated {
                    order: o.k.clone(),
                    value: o.value.clone(),
                    claimed: c.clone(),
                };
                near = false;
                break;
            }
            if !T::is_exact() && excess.abs() <= margin {
                near = true;
            }
        }
        if near {
            verdict = Verdict::Inconclusive;
        }
    }
    let w = &orders[best];
    let constant = w.value.clone();
    let factor = T::from_i64(1i64 << n);
    CertificateReport {
        kind,
        mode: T::mode(),
        scanned_order: max_order.clone(),
        extension_norm_bound: factor * constant.clone(),
        constant,
        witness_order: w.k.clone(),
        witness_signs: w.signs.clone(),
        method,
        verdict,
    }
}

/// `max_{k <= max_order} sum_m |lambda_(k;m)|`.
pub fn bounded_constant<T: Real>(mu: &MomentTensor<T>, max_order: &MultiIndex) -> Result<CertificateReport<T>> {
    bounded_certificate(mu, max_order, None)
}

/// [`bounded_constant`] checked against a claimed constant.
pub fn bounded_certificate<T: Real>(
    mu: &MomentTensor<T>,
    max_order: &MultiIndex,
    claimed: Option<&T>,
) -> Result<CertificateReport<T>> {
    max_order.check_within(mu.bounds())?;
    let table = DifferenceTable::new(mu, max_order)?;
    let ks: Vec<MultiIndex> = max_order.box_iter().collect();
    let orders = ks
        .into_par_iter()
        .map(|k| {
            let b = table.bernstein(&k)?;
            let method = if has_near_zero(&b) {
                Method::Heuristic
            } else {
                Method::Exact
            };
            Ok(OrderValue {
                value: b.abs_sum(),
                k,
                signs: None,
                method,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(
        CertificateKind::Bounded,
        mu.arity(),
        max_order,
        orders,
        claimed,
    ))
}

/// Exact `sup_{|a| <= 1} |sum_m a_m^k lambda_(k;m)|` at one order, with the
/// maximizing sign vertex.
pub fn weak_bound_exact<T: Real>(mu: &MomentTensor<T>, k: &MultiIndex) -> Result<(T, SignAssignment)> {
    weak_bound_exact_with_budget(mu, k, EXACT_BUDGET_BITS)
}

pub fn weak_bound_exact_with_budget<T: Real>(
    mu: &MomentTensor<T>,
    k: &MultiIndex,
    budget_bits: usize,
) -> Result<(T, SignAssignment)> {
    k.check_within(mu.bounds())?;
    let bits = vertex_bits(&k.box_shape());
    if bits > budget_bits {
        return Err(MomentError::BudgetExceeded {
            bits,
            limit: budget_bits,
        });
    }
    let b = bernstein_coefficients(mu, k)?;
    let opt = maximize(&b.lambda);
    Ok((opt.value, opt.signs))
}

/// Coordinate-ascent lower bound on the weak bound at one order.
pub fn weak_bound_estimate<T: Real>(
    mu: &MomentTensor<T>,
    k: &MultiIndex,
    sweeps: usize,
    seed: u64,
) -> Result<(T, SignAssignment)> {
    k.check_within(mu.bounds())?;
    let b = bernstein_coefficients(mu, k)?;
    let opt = coordinate_ascent(&b.lambda, sweeps, DEFAULT_STARTS, seed);
    Ok((opt.value, opt.signs))
}

/// Scans every order `k <= max_order`, exactly where the vertex budget allows
/// and heuristically beyond it.
pub fn certify_weakly_bounded<T: Real>(
    mu: &MomentTensor<T>,
    max_order: &MultiIndex,
    claimed: Option<&T>,
) -> Result<CertificateReport<T>> {
    certify_weakly_bounded_with(mu, max_order, &CertifyOptions::with_claim(claimed.cloned()))
}

pub fn certify_weakly_bounded_with<T: Real>(
    mu: &MomentTensor<T>,
    max_order: &MultiIndex,
    opts: &CertifyOptions<T>,
) -> Result<CertificateReport<T>> {
    max_order.check_within(mu.bounds())?;
    let table = DifferenceTable::new(mu, max_order)?;
    let ks: Vec<MultiIndex> = max_order.box_iter().collect();
    let orders = ks
        .into_par_iter()
        .map(|k| {
            let b = table.bernstein(&k)?;
            let exact = vertex_bits(&k.box_shape()) <= opts.budget_bits;
            let opt = if exact {
                maximize(&b.lambda)
            } else {
                coordinate_ascent(&b.lambda, opts.sweeps, opts.starts, opts.seed)
            };
            let method = if exact && !has_near_zero(&b) {
                Method::Exact
            } else {
                Method::Heuristic
            };
            Ok(OrderValue {
                k,
                value: opt.value,
                signs: Some(opt.signs),
                method,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(
        CertificateKind::WeaklyBounded,
        mu.arity(),
        max_order,
        orders,
        opts.claimed.as_ref(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::{One, Zero};

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    fn pow_seq(base: i64, bound: usize) -> MomentTensor<Rational> {
        MomentTensor::from_fn(MultiIndex::from([bound]), |k| q(base.pow(k[0] as u32), 1))
    }

    #[test]
    fn bounded_examples() {
        let ones = MomentTensor::from_fn(MultiIndex::from([6]), |_| Rational::one());
        assert_eq!(bounded_constant(&ones, &[6].into()).unwrap().constant, Rational::one());

        let leb = MomentTensor::from_fn(MultiIndex::from([5, 5]), |k| q(1, ((k[0] + 1) * (k[1] + 1)) as i64));
        assert_eq!(
            bounded_constant(&leb, &[5, 5].into()).unwrap().constant,
            Rational::one()
        );

        let r = bounded_constant(&pow_seq(2, 3), &[3].into()).unwrap();
        assert_eq!(r.constant, q(27, 1));
        assert_eq!(r.witness_order, MultiIndex::from([3]));
        assert!(r.witness_signs.is_none());
        assert_eq!(r.reevaluate(&pow_seq(2, 3)).unwrap(), q(27, 1));
    }

    #[test]
    fn weak_certificate_examples() {
        let dirac = MomentTensor::from_fn(MultiIndex::from([4, 4]), |k| q(1, 1 << (k[0] + k[1])));
        let r = certify_weakly_bounded(&dirac, &[4, 4].into(), None).unwrap();
        assert_eq!(r.constant, Rational::one());
        assert!(r.holds());
        assert_eq!(r.extension_norm_bound, q(4, 1));

        let r = certify_weakly_bounded(&pow_seq(2, 5), &[5].into(), Some(&q(10, 1))).unwrap();
        match r.verdict {
            Verdict::Violated { order, value, .. } => {
                assert_eq!(order, MultiIndex::from([3]));
                assert_eq!(value, q(27, 1));
            }
            v => panic!("expected violation, got {v:?}"),
        }

        let zero = MomentTensor::<Rational>::zeros(MultiIndex::from([3, 3]));
        assert!(certify_weakly_bounded(&zero, &[3, 3].into(), None)
            .unwrap()
            .constant
            .is_zero());
    }

    #[test]
    fn one_axis_weak_equals_abs_sum() {
        let mu = MomentTensor::from_fn(MultiIndex::from([6]), |k| q((k[0] as i64 * 5) % 7 - 3, 4));
        for k in 0..=6 {
            let (w, _) = weak_bound_exact(&mu, &[k].into()).unwrap();
            let b = bernstein_coefficients(&mu, &[k].into()).unwrap();
            assert_eq!(w, b.abs_sum());
        }
    }

    #[test]
    fn budget_is_enforced() {
        let mu = MomentTensor::<Rational>::zeros(MultiIndex::from([25, 1]));
        assert!(matches!(
            weak_bound_exact(&mu, &[25, 1].into()),
            Err(MomentError::BudgetExceeded { bits: 26, limit: 20 })
        ));
        // over budget: certification falls back to the heuristic
        let r = certify_weakly_bounded(&mu, &[25, 1].into(), None).unwrap();
        assert_eq!(r.method, Method::Heuristic);
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn estimate_from_all_ones_on_positive_coefficients() {
        let dirac = MomentTensor::from_fn(MultiIndex::from([3, 3]), |k| q(1, 1 << (k[0] + k[1])));
        let (est, signs) = weak_bound_estimate(&dirac, &[3, 3].into(), 1, 7).unwrap();
        let b = bernstein_coefficients(&dirac, &[3, 3].into()).unwrap();
        assert_eq!(est, crate::moment::bernstein_mass(&b));
        assert!(signs.axes().iter().flatten().all(|&s| s == 1));
        let zero = MomentTensor::<Rational>::zeros(MultiIndex::from([2, 2]));
        assert!(weak_bound_estimate(&zero, &[2, 2].into(), 4, 0).unwrap().0.is_zero());
    }

    #[test]
    fn float_claims_near_the_constant_are_inconclusive() {
        let mu = MomentTensor::from_fn(MultiIndex::from([3]), |k| 2f64.powi(k[0] as i32));
        let r = certify_weakly_bounded(&mu, &[3].into(), Some(&27.0)).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        let r = certify_weakly_bounded(&mu, &[3].into(), Some(&20.0)).unwrap();
        assert!(r.violated());
    }
}
