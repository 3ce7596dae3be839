//! Strong (diagonal) moment problem: the Hankel test, the diagonal sequence,
//! and Bernstein-weight reconstruction of the representing measure.

use std::fmt;

use num_traits::Zero;

use crate::certify::{bounded_certificate, CertificateReport};
use crate::error::{MomentError, Result};
use crate::index::MultiIndex;
use crate::moment::{
    bernstein_coefficients, check_completely_monotone, evaluate_functional, MomentTensor, MonotoneVerdict,
};
use crate::polymeasure::{DiscreteMeasure, DiscretePolymeasure};
use crate::polynomial::Polynomial;
use crate::scalar::{binomial_row, Field, Rational, Real, FLOAT_REL_TOL};
use crate::tensor::Tensor;

/// Default reconstruction order.
pub const DEFAULT_N: usize = 256;

/// Exact equality in rational mode, relative tolerance in float mode.
pub(crate) fn same_value<T: Field>(a: &T, b: &T) -> bool {
    if T::is_exact() {
        a == b
    } else {
        let scale = a.magnitude().max(b.magnitude());
        (a.clone() - b.clone()).magnitude() <= FLOAT_REL_TOL * scale
    }
}

/// `mu_{k + 1_axis}` differs from `mu_{k + 1_{axis+1}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelWitness<T> {
    pub k: MultiIndex,
    pub axis: usize,
    pub left: T,
    pub right: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HankelReport<T> {
    pub witness: Option<HankelWitness<T>>,
    pub scanned_order: MultiIndex,
}

impl<T> HankelReport<T> {
    pub fn is_hankel(&self) -> bool {
        self.witness.is_none()
    }
}

/// The two entries compared by the Hankel relation at `(k, axis)`.
pub fn hankel_pair<T: Field>(mu: &MomentTensor<T>, k: &MultiIndex, axis: usize) -> Result<(T, T)> {
    let n = mu.arity();
    if axis + 1 >= n {
        return Err(MomentError::Input(format!(
            "Hankel axis {axis} needs a successor among {n} axes"
        )));
    }
    let left = mu.get(&(k + &MultiIndex::unit(n, axis)))?.clone();
    let right = mu.get(&(k + &MultiIndex::unit(n, axis + 1)))?.clone();
    Ok((left, right))
}

/// Scans `mu_{k+1_l} = mu_{k+1_{l+1}}` over adjacent axes for every `k` whose
/// shifted indices stay within `max_order` (clamped to the tensor bounds).
/// The witness is the first failure with `k` row-major, then `l`.
pub fn check_hankel<T: Field>(mu: &MomentTensor<T>, max_order: &MultiIndex) -> Result<HankelReport<T>> {
    let n = mu.arity();
    max_order.check_arity(n)?;
    let order = max_order.min(mu.bounds());
    let report = |witness| HankelReport {
        witness,
        scanned_order: order.clone(),
    };
    if n == 1 {
        return Ok(report(None));
    }
    for k in order.box_iter() {
        for axis in 0..n - 1 {
            if k[axis] + 1 > order[axis] || k[axis + 1] + 1 > order[axis + 1] {
                continue;
            }
            let (left, right) = hankel_pair(mu, &k, axis)?;
            if !same_value(&left, &right) {
                return Ok(report(Some(HankelWitness { k, axis, left, right })));
            }
        }
    }
    Ok(report(None))
}

/// First in-bounds index of total degree `j`, filling axes from the left.
fn diagonal_representative(bounds: &MultiIndex, j: usize) -> Option<MultiIndex> {
    let mut rest = j;
    let k: Vec<usize> = bounds
        .as_slice()
        .iter()
        .map(|&b| {
            let take = rest.min(b);
            rest -= take;
            take
        })
        .collect();
    (rest == 0).then(|| MultiIndex::new(k))
}

/// `nu_j = mu_k` for `|k| = j`, asserting that every in-bounds `k` of the same
/// total degree carries the same value.
pub fn diagonal_sequence<T: Field>(mu: &MomentTensor<T>, max_degree: usize) -> Result<Vec<T>> {
    let bounds = mu.bounds();
    let mut reps = Vec::with_capacity(max_degree + 1);
    for j in 0..=max_degree {
        let k = diagonal_representative(bounds, j).ok_or_else(|| {
            MomentError::Input(format!(
                "no moment of total degree {j} within bounds {bounds}; the diagonal needs total bound >= {max_degree}"
            ))
        })?;
        reps.push(k);
    }
    for (k, v) in mu.iter() {
        let j = k.total();
        if j > max_degree {
            continue;
        }
        let first = mu.at(reps[j].as_slice());
        if !same_value(first, v) {
            return Err(MomentError::DiagonalInconsistent {
                first: reps[j].clone(),
                second: k,
                first_value: format!("{first:?}"),
                second_value: format!("{v:?}"),
            });
        }
    }
    Ok(reps.iter().map(|k| mu.at(k.as_slice()).clone()).collect())
}

/// Classical Bernstein-weight reconstruction: mass `C(N,m) nabla^{N-m} nu_m`
/// at node `m/N`.
pub fn reconstruct_univariate<T: Field>(nu: &[T], n_recon: usize) -> Result<DiscreteMeasure<T>> {
    if n_recon == 0 {
        return Err(MomentError::Input("reconstruction order must be positive".into()));
    }
    if nu.len() <= n_recon {
        return Err(MomentError::OutOfBounds {
            axis: 0,
            requested: n_recon,
            bound: nu.len().saturating_sub(1),
        });
    }
    // row r of the difference table holds nabla^r nu_s for s = 0..=N-r;
    // the weight at m reads nabla^{N-m} nu_m off the anti-diagonal.
    let mut row: Vec<T> = nu[..=n_recon].to_vec();
    let mut diffs = vec![T::zero(); n_recon + 1];
    diffs[n_recon] = row[n_recon].clone();
    for r in 1..=n_recon {
        for s in 0..=n_recon - r {
            row[s] = row[s].clone() - row[s + 1].clone();
        }
        diffs[n_recon - r] = row[n_recon - r].clone();
    }
    let binom = binomial_row(n_recon);
    let weights = diffs
        .into_iter()
        .zip(&binom)
        .map(|(d, c)| T::from_bigint(c) * d)
        .collect();
    DiscreteMeasure::new(grid_nodes(n_recon), weights)
}

fn grid_nodes(n: usize) -> Vec<Rational> {
    (0..=n).map(|m| Rational::new(m.into(), n.into())).collect()
}

/// Tensor Bernstein weights `lambda_(N;m)` placed at `(m_1/N_1, ..., m_n/N_n)`.
pub fn reconstruct_multivariate<T: Field>(
    mu: &MomentTensor<T>,
    n_recon: &MultiIndex,
) -> Result<DiscretePolymeasure<T>> {
    n_recon.check_arity(mu.arity())?;
    if let Some(axis) = n_recon.as_slice().iter().position(|&x| x == 0) {
        return Err(MomentError::Input(format!(
            "reconstruction order on axis {axis} must be positive"
        )));
    }
    let b = bernstein_coefficients(mu, n_recon)?;
    let atoms = n_recon.as_slice().iter().map(|&n| grid_nodes(n)).collect();
    DiscretePolymeasure::new(atoms, b.lambda)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub k: MultiIndex,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongSolution<T> {
    pub measure: DiscreteMeasure<T>,
    pub n_recon: usize,
    pub residuals: Vec<Residual>,
    pub bounded: CertificateReport<T>,
    pub monotone: MonotoneVerdict<T>,
}

impl<T> StrongSolution<T> {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.r).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StrongRefusal<T> {
    Invalid(MomentError),
    NotHankel(HankelReport<T>),
    BoundViolated(CertificateReport<T>),
}

impl<T> From<MomentError> for StrongRefusal<T> {
    fn from(e: MomentError) -> Self {
        StrongRefusal::Invalid(e)
    }
}

impl<T: fmt::Debug> fmt::Display for StrongRefusal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrongRefusal::Invalid(e) => e.fmt(f),
            StrongRefusal::NotHankel(r) => {
                let w = r.witness.as_ref().expect("refusal carries a witness");
                write!(
                    f,
                    "not Hankel at k = {} on axes ({}, {}): {:?} vs {:?}",
                    w.k,
                    w.axis,
                    w.axis + 1,
                    w.left,
                    w.right
                )
            }
            StrongRefusal::BoundViolated(c) => {
                write!(
                    f,
                    "bounded constant {:?} exceeds the claim at order {}",
                    c.constant, c.witness_order
                )
            }
        }
    }
}

impl<T: fmt::Debug> std::error::Error for StrongRefusal<T> {}

#[derive(Debug, Clone)]
pub struct StrongOptions<T> {
    /// Largest total degree whose residual is reported.
    pub max_degree: usize,
    pub n_recon: usize,
    /// Orders scanned by the bounded and monotone checks; defaults to
    /// `min(bounds, 8)` per axis.
    pub check_order: Option<MultiIndex>,
    pub claimed: Option<T>,
}

impl<T> Default for StrongOptions<T> {
    fn default() -> Self {
        StrongOptions {
            max_degree: 8,
            n_recon: DEFAULT_N,
            check_order: None,
            claimed: None,
        }
    }
}

/// Hankel-audited reconstruction of `mu_k = int t^{|k|} dmu` from the
/// diagonal sequence. Never returns a measure for non-Hankel input.
pub fn solve_strong<T: Real>(
    mu: &MomentTensor<T>,
    opts: &StrongOptions<T>,
) -> std::result::Result<StrongSolution<T>, StrongRefusal<T>> {
    let n = mu.arity();
    let bounds = mu.bounds();
    let hankel = check_hankel(mu, bounds)?;
    if !hankel.is_hankel() {
        return Err(StrongRefusal::NotHankel(hankel));
    }
    let check_order = match &opts.check_order {
        Some(c) => c.clone(),
        None => bounds.min(&MultiIndex::splat(n, 8)),
    };
    let bounded = bounded_certificate(mu, &check_order, opts.claimed.as_ref())?;
    if bounded.violated() {
        return Err(StrongRefusal::BoundViolated(bounded));
    }
    let monotone = check_completely_monotone(mu, &check_order)?;

    let nu = diagonal_sequence(mu, opts.n_recon.max(opts.max_degree))?;
    let measure = reconstruct_univariate(&nu, opts.n_recon)?;
    let recon = measure.moments(opts.max_degree);
    let residuals = mu
        .iter()
        .filter(|(k, _)| k.total() <= opts.max_degree)
        .map(|(k, v)| Residual {
            r: (v.clone() - recon[k.total()].clone()).abs_val().to_f64(),
            k,
        })
        .collect();
    Ok(StrongSolution {
        measure,
        n_recon: opts.n_recon,
        residuals,
        bounded,
        monotone,
    })
}

/// `|L_mu(p_1, ..., p_n) - sum_atoms w * p_1(x) ... p_n(x)|`.
pub fn verify_strong_identity<T: Real>(
    measure: &DiscreteMeasure<T>,
    mu: &MomentTensor<T>,
    polys: &[Polynomial<T>],
) -> Result<T> {
    let lhs = evaluate_functional(mu, polys)?;
    let rhs = measure
        .atoms
        .iter()
        .zip(&measure.weights)
        .fold(T::zero(), |acc, (x, w)| {
            let x = T::from_rational(x);
            acc + polys.iter().fold(w.clone(), |p, q| p * q.eval(&x))
        });
    Ok((lhs - rhs).abs_val())
}

/// `P_L(p) = L(p, ..., p)`.
pub fn evaluate_diagonal<T: Field>(mu: &MomentTensor<T>, p: &Polynomial<T>) -> Result<T> {
    evaluate_functional(mu, &vec![p.clone(); mu.arity()])
}

/// `sum_m w_m h(x_m)^n` for a value table `h` aligned with the atoms.
pub fn diagonal_power<T: Field>(measure: &DiscreteMeasure<T>, values: &[T], n: usize) -> Result<T> {
    if values.len() != measure.atoms.len() {
        return Err(MomentError::Input(format!(
            "value table has {} entries for {} atoms",
            values.len(),
            measure.atoms.len()
        )));
    }
    Ok(measure.weights.iter().zip(values).fold(T::zero(), |acc, (w, h)| {
        acc + (0..n).fold(w.clone(), |p, _| p * h.clone())
    }))
}

/// The diagonal polymeasure `sum w_m delta_{x_m} x ... x delta_{x_m}` (`n` slots).
pub fn diagonal_polymeasure<T: Field>(measure: &DiscreteMeasure<T>, n: usize) -> Result<DiscretePolymeasure<T>> {
    let terms: Vec<(Vec<Rational>, T)> = measure
        .atoms
        .iter()
        .zip(&measure.weights)
        .map(|(x, w)| (vec![x.clone(); n], w.clone()))
        .collect();
    if terms.is_empty() {
        return DiscretePolymeasure::new(vec![vec![Rational::zero()]; n], Tensor::filled(vec![1; n], T::zero()));
    }
    DiscretePolymeasure::from_terms(n, &terms)
}
