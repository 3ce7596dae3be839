//! Hausdorff bimeasures and the covariance kernels of weakly harmonizable
//! processes.
//!
//! Transform convention: `g(t, t') = int e^{-its} e^{it's'} gamma(ds, ds')`.
//! Expanding both exponentials gives the power series
//! `sum_{n,m} (-i)^n i^m / (n! m!) mu_{nm} t^n t'^m`, and the moments are
//! recovered as `mu_{nm} = i^n (-i)^m n! m! [t^n t'^m]`.

use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::certify::{certify_weakly_bounded, CertificateReport, Verdict};
use crate::error::{MomentError, Result};
use crate::index::MultiIndex;
use crate::moment::MomentTensor;
use crate::polymeasure::DiscretePolymeasure;
use crate::scalar::{factorial, Field, Rational, Real};
use crate::strong::{check_hankel, HankelReport};
use crate::tensor::Tensor;

/// Absolute tolerance for `|G_{ij} - conj(G_{ji})|`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalue floor: absolute for bimeasure Gram matrices, relative to the
/// spectral norm for sampled kernels.
pub const EIGEN_TOL: f64 = 1e-10;

pub const DEFAULT_TRUNCATION: usize = 30;

/// A bimeasure on `[0,1]^2` with complex coefficients.
pub type ComplexBimeasure<R> = DiscretePolymeasure<Complex<R>>;

pub fn lift_complex<R: Real>(mu: &MomentTensor<R>) -> MomentTensor<Complex<R>> {
    mu.map(|x| Complex::new(x.clone(), R::zero()))
}

pub fn lift_bimeasure<R: Real>(gamma: &DiscretePolymeasure<R>) -> ComplexBimeasure<R> {
    gamma.map(|x| Complex::new(x.clone(), R::zero()))
}

/// `n` points evenly spaced on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn check_bimeasure<T: Field>(gamma: &DiscretePolymeasure<T>) -> Result<()> {
    if gamma.arity() != 2 {
        return Err(MomentError::Dimension {
            expected: 2,
            found: gamma.arity(),
        });
    }
    Ok(())
}

/// `sum coeff * e^{-i t s} e^{i t' s'}` over the atoms.
pub fn fourier_stieltjes<T: Field>(gamma: &DiscretePolymeasure<T>, t: f64, t2: f64) -> Result<Complex64> {
    check_bimeasure(gamma)?;
    let row: Vec<Complex64> = gamma.atoms()[0]
        .iter()
        .map(|s| Complex64::from_polar(1.0, -t * Real::to_f64(s)))
        .collect();
    let col: Vec<Complex64> = gamma.atoms()[1]
        .iter()
        .map(|s| Complex64::from_polar(1.0, t2 * Real::to_f64(s)))
        .collect();
    let coeffs = gamma.coeffs();
    let width = col.len();
    Ok(coeffs
        .data()
        .iter()
        .enumerate()
        .map(|(off, c)| c.to_complex64() * row[off / width] * col[off % width])
        .sum())
}

/// Coefficients `a_{nm}` of `sum a_{nm} t^n t'^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries2<T> {
    pub coeffs: Tensor<T>,
}

impl<T: Field> PowerSeries2<T> {
    pub fn order(&self) -> MultiIndex {
        MultiIndex::new(self.coeffs.shape().iter().map(|d| d - 1).collect())
    }
}

fn i_power<R: Real>(k: usize, conj: bool) -> Complex<R> {
    let (one, zero) = (R::one(), R::zero());
    let i = if conj { zero.clone() - one.clone() } else { one.clone() };
    match k % 4 {
        0 => Complex::new(one, zero),
        1 => Complex::new(zero, i),
        2 => Complex::new(zero - one, R::zero()),
        _ => Complex::new(R::zero(), R::zero() - i),
    }
}

fn inverse_factorial<R: Real>(n: usize) -> R {
    R::from_rational(&Rational::new(1.into(), factorial(n)))
}

fn check_truncation<T: Field>(mu: &MomentTensor<T>, trunc: usize) -> Result<()> {
    if mu.arity() != 2 {
        return Err(MomentError::Dimension {
            expected: 2,
            found: mu.arity(),
        });
    }
    MultiIndex::from([trunc, trunc]).check_within(mu.bounds())
}

/// Series coefficients `(-i)^n i^m / (n! m!) mu_{nm}` for `n + m <= trunc`,
/// zero beyond.
pub fn kernel_coefficients<R: Real>(mu: &MomentTensor<Complex<R>>, trunc: usize) -> Result<PowerSeries2<Complex<R>>> {
    check_truncation(mu, trunc)?;
    let coeffs = Tensor::from_fn(vec![trunc + 1, trunc + 1], |nm| {
        let (n, m) = (nm[0], nm[1]);
        if n + m > trunc {
            return Complex::zero();
        }
        let scale = inverse_factorial::<R>(n) * inverse_factorial::<R>(m);
        i_power::<R>(n, true) * i_power::<R>(m, false) * mu.at(nm).clone() * Complex::new(scale, R::zero())
    });
    Ok(PowerSeries2 { coeffs })
}

/// `mu_{nm} = i^n (-i)^m n! m! a_{nm}` for `(n, m) <= max_order`.
pub fn moments_from_kernel<R: Real>(
    series: &PowerSeries2<Complex<R>>,
    max_order: &MultiIndex,
) -> Result<MomentTensor<Complex<R>>> {
    max_order.check_arity(2)?;
    max_order.check_within(&series.order())?;
    Ok(MomentTensor::from_fn(max_order.clone(), |k| {
        let (n, m) = (k[0], k[1]);
        let scale = R::from_bigint(&(factorial(n) * factorial(m)));
        i_power::<R>(n, false)
            * i_power::<R>(m, true)
            * series.coeffs.get(&[n, m]).clone()
            * Complex::new(scale, R::zero())
    }))
}

/// A truncated series value with a bound on its distance from the full sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// `mu_sup * sum_{n+m > T} |t|^n |t'|^m / (n! m!)`.
    pub tail_bound: f64,
    /// Floating-point evaluation error of the retained terms.
    pub rounding_bound: f64,
}

impl SeriesValue {
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

/// `sum_{d > T} x^d / d!`, summed from the first omitted term.
fn exp_tail(x: f64, trunc: usize) -> f64 {
    let mut term = (1..=trunc + 1).fold(1.0, |acc, d| acc * x / d as f64);
    let mut sum = 0.0;
    let mut d = trunc + 1;
    while term > 0.0 && (term > sum * f64::EPSILON || (d as f64) < x) && d < trunc + 2000 {
        sum += term;
        d += 1;
        term *= x / d as f64;
    }
    sum
}

/// Truncated kernel series at `(t, t')`. `mu_sup` in the tail bound is the
/// largest `|mu_{nm}|` present in the tensor.
pub fn kernel_series<R: Real>(mu: &MomentTensor<Complex<R>>, t: f64, t2: f64, trunc: usize) -> Result<SeriesValue> {
    let series = kernel_coefficients(mu, trunc)?;
    let mu_sup = mu.values().data().iter().map(Field::magnitude).fold(0.0, f64::max);
    Ok(evaluate_series(&series, mu_sup, t, t2, trunc))
}

fn evaluate_series<R: Real>(
    series: &PowerSeries2<Complex<R>>,
    mu_sup: f64,
    t: f64,
    t2: f64,
    trunc: usize,
) -> SeriesValue {
    let mut value = Complex64::zero();
    let mut abs_sum = 0.0;
    let mut tn = 1.0;
    for n in 0..=trunc {
        let mut tm = 1.0;
        for m in 0..=trunc - n {
            let term = series.coeffs.get(&[n, m]).to_complex64() * (tn * tm);
            value += term;
            abs_sum += term.norm();
            tm *= t2;
        }
        tn *= t;
    }
    // Each retained term carries O(T) relative error from its powers,
    // factorials and the running sum.
    let rounding_bound = 16.0 * (2 * trunc + 8) as f64 * f64::EPSILON * abs_sum;
    SeriesValue {
        value,
        tail_bound: mu_sup * exp_tail(t.abs() + t2.abs(), trunc),
        rounding_bound,
    }
}

/// Kernel values `Phi(t_l, t_k)` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSamples {
    pub grid: Vec<f64>,
    pub values: DMatrix<Complex64>,
}

impl KernelSamples {
    pub fn from_fn(grid: Vec<f64>, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let r = grid.len();
        let values = DMatrix::from_fn(r, r, |l, k| f(grid[l], grid[k]));
        KernelSamples { grid, values }
    }
}

/// Samples the transform of `gamma` on `grid x grid`.
pub fn sample_transform<T: Field>(gamma: &DiscretePolymeasure<T>, grid: &[f64]) -> Result<KernelSamples> {
    check_bimeasure(gamma)?;
    Ok(KernelSamples::from_fn(grid.to_vec(), |t, t2| {
        fourier_stieltjes(gamma, t, t2).expect("arity checked")
    }))
}

/// Samples the truncated series on `grid x grid`; returns the largest error bound.
pub fn sample_series<R: Real>(
    mu: &MomentTensor<Complex<R>>,
    grid: &[f64],
    trunc: usize,
) -> Result<(KernelSamples, f64)> {
    let series = kernel_coefficients(mu, trunc)?;
    let mu_sup = mu.values().data().iter().map(Field::magnitude).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    let samples = KernelSamples::from_fn(grid.to_vec(), |t, t2| {
        let v = evaluate_series(&series, mu_sup, t, t2, trunc);
        worst = worst.max(v.error_bound());
        v.value
    });
    Ok((samples, worst))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsdVerdict {
    PositiveDefinite,
    NotPositiveDefinite,
    Indeterminate,
}

impl PsdVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            PsdVerdict::PositiveDefinite => "positive-definite",
            PsdVerdict::NotPositiveDefinite => "not-positive-definite",
            PsdVerdict::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsdReport {
    pub verdict: PsdVerdict,
    /// Smallest eigenvalue of the Hermitian part; absent when the matrix is
    /// rejected as non-Hermitian.
    pub min_eigenvalue: Option<f64>,
    pub spectral_norm: f64,
    pub max_asymmetry: f64,
    pub note: Option<String>,
}

impl PsdReport {
    pub fn is_positive_definite(&self) -> bool {
        self.verdict == PsdVerdict::PositiveDefinite
    }
}

fn max_asymmetry(g: &DMatrix<Complex64>) -> f64 {
    let r = g.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..r {
        for j in i..r {
            worst = worst.max((g[(i, j)] - g[(j, i)].conj()).norm());
        }
    }
    worst
}

fn eigen_report(g: &DMatrix<Complex64>, asym: f64, floor: impl Fn(f64) -> f64) -> PsdReport {
    if g.nrows() == 0 {
        return PsdReport {
            verdict: PsdVerdict::PositiveDefinite,
            min_eigenvalue: None,
            spectral_norm: 0.0,
            max_asymmetry: 0.0,
            note: None,
        };
    }
    let hermitian = (g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = hermitian.symmetric_eigen().eigenvalues;
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let norm = eig.iter().map(|x| x.abs()).fold(0.0, f64::max);
    PsdReport {
        verdict: if min >= floor(norm) {
            PsdVerdict::PositiveDefinite
        } else {
            PsdVerdict::NotPositiveDefinite
        },
        min_eigenvalue: Some(min),
        spectral_norm: norm,
        max_asymmetry: asym,
        note: None,
    }
}

fn non_hermitian(asym: f64) -> PsdReport {
    PsdReport {
        verdict: PsdVerdict::NotPositiveDefinite,
        min_eigenvalue: None,
        spectral_norm: 0.0,
        max_asymmetry: asym,
        note: Some(format!("not Hermitian: max |G_ij - conj(G_ji)| = {asym:e}")),
    }
}

/// Positive definiteness of an atomic bimeasure via its Gram matrix
/// `G_ij = gamma({s_i}, {s_j})` over the union of both axes' atoms.
///
/// Every test family `sum conj(a_i) a_j gamma(A_i, A_j)` is a quadratic form in
/// `G`, so the bimeasure is positive definite iff `G` is Hermitian PSD.
pub fn check_positive_definite_bimeasure<R: Real>(gamma: &ComplexBimeasure<R>) -> Result<PsdReport> {
    check_bimeasure(gamma)?;
    let mut atoms: Vec<Rational> = gamma.atoms().concat();
    atoms.sort();
    atoms.dedup();
    let r = atoms.len();
    let pos = |axis: usize| -> Vec<usize> {
        gamma.atoms()[axis]
            .iter()
            .map(|a| atoms.binary_search(a).expect("atom in union"))
            .collect()
    };
    let (rows, cols) = (pos(0), pos(1));
    let mut exact = vec![Complex::<R>::zero(); r * r];
    for (i, &pi) in rows.iter().enumerate() {
        for (j, &pj) in cols.iter().enumerate() {
            exact[pi * r + pj] = gamma.coeffs().get(&[i, j]).clone();
        }
    }
    if R::is_exact() {
        let hermitian = (0..r).all(|i| (0..r).all(|j| exact[i * r + j] == exact[j * r + i].conj()));
        if !hermitian {
            let g = DMatrix::from_fn(r, r, |i, j| exact[i * r + j].to_complex64());
            return Ok(non_hermitian(max_asymmetry(&g)));
        }
    }
    let g = DMatrix::from_fn(r, r, |i, j| exact[i * r + j].to_complex64());
    let asym = max_asymmetry(&g);
    if asym > HERMITIAN_TOL {
        return Ok(non_hermitian(asym));
    }
    Ok(eigen_report(&g, asym, |_| -EIGEN_TOL))
}

/// Hermitian check and smallest eigenvalue of a sampled kernel Gram matrix;
/// passes iff the smallest eigenvalue is at least `-1e-10` times the spectral norm.
pub fn check_positive_definite_kernel(samples: &KernelSamples) -> Result<PsdReport> {
    let g = &samples.values;
    if g.nrows() != samples.grid.len() || g.ncols() != samples.grid.len() {
        return Err(MomentError::Input(format!(
            "kernel matrix is {}x{} for a grid of {} points",
            g.nrows(),
            g.ncols(),
            samples.grid.len()
        )));
    }
    if g.nrows() == 0 {
        return Err(MomentError::Input("kernel grid is empty".into()));
    }
    let asym = max_asymmetry(g);
    if asym > HERMITIAN_TOL {
        return Ok(non_hermitian(asym));
    }
    Ok(eigen_report(g, asym, |norm| -EIGEN_TOL * norm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    HarmonizableHausdorff,
    NotHarmonizable,
    Indeterminate,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::HarmonizableHausdorff => "harmonizable-hausdorff",
            Classification::NotHarmonizable => "not-harmonizable",
            Classification::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonizableReport<R> {
    /// Weak bound of the real and imaginary parts; their sum bounds the
    /// complex sequence.
    pub weak_re: CertificateReport<R>,
    pub weak_im: CertificateReport<R>,
    pub weak_constant: R,
    pub psd: PsdReport,
    pub kernel_error_bound: f64,
    pub stationary: HankelReport<Complex<R>>,
    pub classification: Classification,
}

impl<R: Real> HarmonizableReport<R> {
    pub fn weak_holds(&self) -> bool {
        self.weak_re.holds() && self.weak_im.holds()
    }

    pub fn weak_violated(&self) -> bool {
        self.weak_re.violated() || self.weak_im.violated()
    }
}

#[derive(Debug, Clone)]
pub struct CovarianceOptions<R> {
    pub grid: Vec<f64>,
    pub max_order: MultiIndex,
    pub trunc: usize,
    /// Claimed weak-bound constant, checked against each part.
    pub claimed: Option<R>,
}

impl<R> Default for CovarianceOptions<R> {
    fn default() -> Self {
        CovarianceOptions {
            grid: uniform_grid(0.0, 2.0, 8),
            max_order: MultiIndex::from([8, 8]),
            trunc: DEFAULT_TRUNCATION,
            claimed: None,
        }
    }
}

/// A failed check on samples carrying entrywise error `err` is only
/// conclusive when the failure exceeds what the error can explain: the
/// asymmetry by more than `2 err`, the eigenvalues (Weyl) by more than `r err`.
fn demote_within_error(mut psd: PsdReport, r: usize, err: f64) -> PsdReport {
    if psd.verdict != PsdVerdict::NotPositiveDefinite {
        return psd;
    }
    let explained = match psd.min_eigenvalue {
        Some(min) => min >= -EIGEN_TOL * psd.spectral_norm - r as f64 * err,
        None => psd.max_asymmetry <= HERMITIAN_TOL + 2.0 * err,
    };
    if explained {
        psd.verdict = PsdVerdict::Indeterminate;
        psd.note = Some(format!(
            "failure is within the kernel sampling error {err:e}; increase the truncation"
        ));
    }
    psd
}

/// Classifies `mu_{nm}` as the moment sequence of a positive definite
/// Hausdorff bimeasure (weakly bounded, PSD kernel), and reports stationarity
/// as the Hankel property.
pub fn covariance_check<R: Real>(
    mu: &MomentTensor<Complex<R>>,
    opts: &CovarianceOptions<R>,
) -> Result<HarmonizableReport<R>> {
    check_truncation(mu, opts.trunc)?;
    opts.max_order.check_within(mu.bounds())?;
    let re = mu.map(|z| z.re.clone());
    let im = mu.map(|z| z.im.clone());
    let weak_re = certify_weakly_bounded(&re, &opts.max_order, opts.claimed.as_ref())?;
    let weak_im = certify_weakly_bounded(&im, &opts.max_order, opts.claimed.as_ref())?;
    let weak_constant = weak_re.constant.clone() + weak_im.constant.clone();

    let (samples, kernel_error_bound) = sample_series(mu, &opts.grid, opts.trunc)?;
    let psd = demote_within_error(
        check_positive_definite_kernel(&samples)?,
        samples.grid.len(),
        kernel_error_bound,
    );
    let stationary = check_hankel(mu, &opts.max_order)?;

    let violated = [&weak_re, &weak_im]
        .iter()
        .any(|c| matches!(c.verdict, Verdict::Violated { .. }));
    let holds = weak_re.holds() && weak_im.holds();
    let classification = if violated || psd.verdict == PsdVerdict::NotPositiveDefinite {
        Classification::NotHarmonizable
    } else if holds && psd.is_positive_definite() {
        Classification::HarmonizableHausdorff
    } else {
        Classification::Indeterminate
    };
    Ok(HarmonizableReport {
        weak_re,
        weak_im,
        weak_constant,
        psd,
        kernel_error_bound,
        stationary,
        classification,
    })
}
