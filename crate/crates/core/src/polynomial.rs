//! Univariate polynomials in the monomial basis.

use num_bigint::BigInt;

use crate::scalar::{binomial_row, Field, Rational, Real};

/// `sum_j coeffs[j] t^j`, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Field> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(k: usize) -> Self {
        let mut c = vec![T::zero(); k + 1];
        c[k] = T::one();
        Polynomial { coeffs: c }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest index with a nonzero coefficient; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, t: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| T::from_i64(j as i64) * c.clone())
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn map<U: Field>(&self, f: impl FnMut(&T) -> U) -> Polynomial<U> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T: Real> Polynomial<T> {
    /// `max_{t in [0,1]} |p(t)|`: endpoints plus the real roots of `p'`,
    /// located by bisection to `1e-12`.
    pub fn sup_norm(&self) -> f64 {
        let c: Vec<f64> = self.coeffs.iter().map(|x| x.to_f64()).collect();
        let mut best = horner(&c, 0.0).abs().max(horner(&c, 1.0).abs());
        for t in unit_roots(&derivative_f64(&c)) {
            best = best.max(horner(&c, t).abs());
        }
        best
    }

    /// `sum_j |coeffs[j]|`
    pub fn l1_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).sum()
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, x| acc * t + x)
}

fn derivative_f64(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(j, x)| j as f64 * x).collect()
}

/// Real roots in `[0, 1]`, found between consecutive critical points where
/// the polynomial is monotone.
fn unit_roots(c: &[f64]) -> Vec<f64> {
    let mut c = c.to_vec();
    while c.last().is_some_and(|x| *x == 0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut knots = vec![0.0];
    knots.extend(unit_roots(&derivative_f64(&c)));
    knots.push(1.0);
    let mut roots: Vec<f64> = Vec::new();
    let push = |t: f64, roots: &mut Vec<f64>| {
        if roots.last().is_none_or(|r| (t - r).abs() > 1e-12) {
            roots.push(t);
        }
    };
    for w in knots.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (horner(&c, a), horner(&c, b));
        if fa == 0.0 {
            push(a, &mut roots);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        let sa = fa.signum();
        while b - a > 1e-12 {
            let mid = 0.5 * (a + b);
            let fm = horner(&c, mid);
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if fm.signum() == sa {
                a = mid;
            } else {
                b = mid;
            }
        }
        push(0.5 * (a + b), &mut roots);
    }
    if horner(&c, 1.0) == 0.0 {
        push(1.0, &mut roots);
    }
    roots
}

/// The degree-`n` Bernstein polynomial `B_n(p)(t) = sum_m p(m/n) C(n,m) t^m (1-t)^(n-m)`,
/// expanded in the monomial basis.
///
/// The coefficient of `t^i` is `C(n, i)` times the `i`-th forward difference
/// of the samples `p(0/n), ..., p(i/n)`.
pub fn bernstein_polynomial<T: Field>(p: &Polynomial<T>, n: usize) -> Polynomial<T> {
    assert!(n >= 1, "Bernstein order must be positive");
    let samples: Vec<T> = (0..=n)
        .map(|m| p.eval(&T::from_rational(&Rational::new(BigInt::from(m), BigInt::from(n)))))
        .collect();
    let outer = binomial_row(n);
    let coeffs = (0..=n)
        .map(|i| {
            let row = binomial_row(i);
            let delta = (0..=i).fold(T::zero(), |acc, m| {
                let term = T::from_bigint(&row[m]) * samples[m].clone();
                if (i - m) % 2 == 1 {
                    acc - term
                } else {
                    acc + term
                }
            });
            T::from_bigint(&outer[i]) * delta
        })
        .collect();
    Polynomial::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    #[test]
    fn bernstein_fixes_constants_and_lines() {
        let one = Polynomial::constant(Rational::one());
        for n in 1..6 {
            assert_eq!(bernstein_polynomial(&one, n), one);
        }
        let t = Polynomial::<Rational>::monomial(1);
        assert_eq!(bernstein_polynomial(&t, 5), t);
    }

    #[test]
    fn bernstein_of_square() {
        // t^2 + t(1-t)/2 = t/2 + t^2/2
        let b = bernstein_polynomial(&Polynomial::<Rational>::monomial(2), 2);
        assert_eq!(b.coeffs(), &[q(0, 1), q(1, 2), q(1, 2)]);
    }

    #[test]
    fn bernstein_float_matches_defining_sum() {
        let p = Polynomial::new(vec![0.3, -1.2, 0.7, 2.0]);
        let n = 9;
        let b = bernstein_polynomial(&p, n);
        let row = binomial_row(n);
        for i in 0..64 {
            let t = i as f64 / 63.0;
            let direct: f64 = (0..=n)
                .map(|m| {
                    p.eval(&(m as f64 / n as f64))
                        * f64::from_bigint(&row[m])
                        * t.powi(m as i32)
                        * (1.0 - t).powi((n - m) as i32)
                })
                .sum();
            let got = b.eval(&t);
            assert!(
                (got - direct).abs() <= 1e-12 * direct.abs().max(1.0),
                "t={t}: {got} vs {direct}"
            );
        }
    }

    #[test]
    fn sup_norm_finds_interior_extremum() {
        // 4t(1-t) peaks at 1 for t = 1/2
        let p = Polynomial::new(vec![0.0, 4.0, -4.0]);
        assert!((p.sup_norm() - 1.0).abs() < 1e-12);
        // (t - 1/3)(t - 2/3) t has interior extrema only
        let r = Polynomial::new(vec![0.0, 2.0 / 9.0, -1.0, 1.0]);
        let grid = (0..=100_000)
            .map(|i| r.eval(&(i as f64 / 1e5)).abs())
            .fold(0.0, f64::max);
        assert!((r.sup_norm() - grid).abs() < 1e-9);
        assert_eq!(Polynomial::<f64>::zero().sup_norm(), 0.0);
    }

    #[test]
    fn derivative_and_product() {
        let p = Polynomial::new(vec![q(1, 1), q(2, 1), q(3, 1)]);
        assert_eq!(p.derivative().coeffs(), &[q(2, 1), q(6, 1)]);
        let sq = Polynomial::new(vec![q(1, 1), q(1, 1)]).mul(&Polynomial::new(vec![q(1, 1), q(1, 1)]));
        assert_eq!(sq.coeffs(), &[q(1, 1), q(2, 1), q(1, 1)]);
        assert_eq!(Polynomial::new(vec![q(0, 1)]).degree(), 0);
        assert!(Polynomial::new(vec![q(0, 1)]).is_zero());
    }
}
