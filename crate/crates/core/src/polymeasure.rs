//! Atomic polymeasures on `[0,1]^n`: exact witnesses and brute-force oracles
//! for the moment problems.
//!
//! An atomic polymeasure is a coefficient tensor indexed by tuples of atoms;
//! its value on a product of Borel sets is the sum of the coefficients whose
//! atom tuple lies in the product, which makes it separately additive by
//! construction.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certify::search::{self, coordinate_ascent, vertex_bits, DEFAULT_STARTS, DEFAULT_SWEEPS, EXACT_BUDGET_BITS};
use crate::certify::{Method, SignAssignment};
use crate::error::{MomentError, Result};
use crate::index::MultiIndex;
use crate::moment::MomentTensor;
use crate::scalar::{Field, Rational, Real};
use crate::tensor::Tensor;

/// Denominator of the atom grid used by [`random_polymeasure`].
pub const ATOM_GRID: i64 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePolymeasure<T> {
    atoms: Vec<Vec<Rational>>,
    coeffs: Tensor<T>,
}

fn check_atoms(axis: usize, atoms: &[Rational]) -> Result<()> {
    if atoms.is_empty() {
        return Err(MomentError::Input(format!("axis {axis} has no atoms")));
    }
    for a in atoms {
        if *a < Rational::zero() || *a > Rational::one() {
            return Err(MomentError::Input(format!(
                "atom {a} on axis {axis} lies outside [0,1]"
            )));
        }
    }
    if atoms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MomentError::Input(format!(
            "atoms on axis {axis} are not strictly increasing"
        )));
    }
    Ok(())
}

impl<T: Field> DiscretePolymeasure<T> {
    pub fn new(atoms: Vec<Vec<Rational>>, coeffs: Tensor<T>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(MomentError::Input("polymeasure needs at least one axis".into()));
        }
        for (axis, a) in atoms.iter().enumerate() {
            check_atoms(axis, a)?;
        }
        let shape: Vec<usize> = atoms.iter().map(Vec::len).collect();
        if shape != coeffs.shape() {
            return Err(MomentError::Input(format!(
                "coefficient shape {:?} does not match atom counts {:?}",
                coeffs.shape(),
                shape
            )));
        }
        Ok(DiscretePolymeasure { atoms, coeffs })
    }

    /// Sums point masses `coeff * delta_{p_1} x ... x delta_{p_n}`; repeated
    /// points merge.
    pub fn from_terms(n: usize, terms: &[(Vec<Rational>, T)]) -> Result<Self> {
        let mut axes: Vec<BTreeSet<Rational>> = vec![BTreeSet::new(); n];
        for (point, _) in terms {
            if point.len() != n {
                return Err(MomentError::Dimension {
                    expected: n,
                    found: point.len(),
                });
            }
            for (axis, x) in point.iter().enumerate() {
                axes[axis].insert(x.clone());
            }
        }
        let atoms: Vec<Vec<Rational>> = axes.into_iter().map(|s| s.into_iter().collect()).collect();
        let shape: Vec<usize> = atoms.iter().map(Vec::len).collect();
        let mut coeffs = Tensor::filled(shape, T::zero());
        for (point, c) in terms {
            let idx: Vec<usize> = point
                .iter()
                .enumerate()
                .map(|(axis, x)| atoms[axis].binary_search(x).unwrap())
                .collect();
            let cur = coeffs.get(&idx).clone();
            coeffs.set(&idx, cur + c.clone());
        }
        Self::new(atoms, coeffs)
    }

    pub fn arity(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Vec<Rational>] {
        &self.atoms
    }

    pub fn coeffs(&self) -> &Tensor<T> {
        &self.coeffs
    }

    pub fn map<U: Field>(&self, f: impl FnMut(&T) -> U) -> DiscretePolymeasure<U> {
        DiscretePolymeasure {
            atoms: self.atoms.clone(),
            coeffs: self.coeffs.map(f),
        }
    }

    /// `mu_k = sum over atom tuples of coeff * prod_l atom_l^{k_l}`.
    pub fn moments(&self, bounds: &MultiIndex) -> Result<MomentTensor<T>> {
        bounds.check_arity(self.arity())?;
        let mut t = self.coeffs.clone();
        for (axis, atoms) in self.atoms.iter().enumerate() {
            let powers: Vec<Vec<T>> = (0..=bounds[axis])
                .map(|k| {
                    atoms
                        .iter()
                        .map(|a| T::from_rational(&num_traits::pow(a.clone(), k)))
                        .collect()
                })
                .collect();
            t = t.apply_along(axis, &powers);
        }
        Ok(MomentTensor::from_tensor(t))
    }

    /// `sum coeff * prod_l f_l(atom_l)` with one value table per axis, aligned
    /// with that axis's atoms.
    pub fn integrate(&self, tables: &[Vec<T>]) -> Result<T> {
        if tables.len() != self.arity() {
            return Err(MomentError::Dimension {
                expected: self.arity(),
                found: tables.len(),
            });
        }
        for (axis, (table, atoms)) in tables.iter().zip(&self.atoms).enumerate() {
            if table.len() != atoms.len() {
                return Err(MomentError::Input(format!(
                    "value table on axis {axis} has {} entries but the axis has {} atoms",
                    table.len(),
                    atoms.len()
                )));
            }
        }
        Ok(self.coeffs.contract_all(tables))
    }

    /// `gamma([0,1], ..., [0,1])`
    pub fn total(&self) -> T {
        self.coeffs.data().iter().fold(T::zero(), |acc, c| acc + c.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Semivariation<T> {
    pub value: T,
    pub signs: SignAssignment,
    pub method: Method,
}

impl<T: Real> DiscretePolymeasure<T> {
    /// Sum of `|coeff|`: the finest partition isolates every atom.
    pub fn variation(&self) -> T {
        self.coeffs.data().iter().fold(T::zero(), |acc, c| acc + c.abs_val())
    }

    /// Supremum of `|sum a^(1)_{i_1} ... a^(n)_{i_n} coeff_i|` over `±1` weights
    /// per atom, exact within the vertex budget and a flagged lower bound past it.
    pub fn semivariation(&self) -> Semivariation<T> {
        if vertex_bits(self.coeffs.shape()) <= EXACT_BUDGET_BITS {
            let opt = search::maximize(&self.coeffs);
            Semivariation {
                value: opt.value,
                signs: opt.signs,
                method: Method::Exact,
            }
        } else {
            let opt = coordinate_ascent(&self.coeffs, DEFAULT_SWEEPS, DEFAULT_STARTS, 0);
            Semivariation {
                value: opt.value,
                signs: opt.signs,
                method: Method::Heuristic,
            }
        }
    }
}

/// One-axis signed measure with atoms in `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<T> {
    pub atoms: Vec<Rational>,
    pub weights: Vec<T>,
}

impl<T: Field> DiscreteMeasure<T> {
    pub fn new(atoms: Vec<Rational>, weights: Vec<T>) -> Result<Self> {
        check_atoms(0, &atoms)?;
        if atoms.len() != weights.len() {
            return Err(MomentError::Input(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        Ok(DiscreteMeasure { atoms, weights })
    }

    pub fn mass(&self) -> T {
        self.weights.iter().fold(T::zero(), |acc, w| acc + w.clone())
    }

    /// `int t^j dmu` for `j = 0..=max_degree`.
    pub fn moments(&self, max_degree: usize) -> Vec<T> {
        let mut pows: Vec<T> = self.weights.clone();
        let xs: Vec<T> = self.atoms.iter().map(T::from_rational).collect();
        let mut out = Vec::with_capacity(max_degree + 1);
        for _ in 0..=max_degree {
            out.push(pows.iter().fold(T::zero(), |acc, w| acc + w.clone()));
            for (p, x) in pows.iter_mut().zip(&xs) {
                *p = p.clone() * x.clone();
            }
        }
        out
    }

    pub fn into_polymeasure(self) -> DiscretePolymeasure<T> {
        let n = self.weights.len();
        DiscretePolymeasure {
            atoms: vec![self.atoms],
            coeffs: Tensor::from_vec(vec![n], self.weights),
        }
    }
}

impl<T: Real> DiscreteMeasure<T> {
    pub fn total_variation(&self) -> T {
        self.weights.iter().fold(T::zero(), |acc, w| acc + w.abs_val())
    }
}

/// Deterministic random atomic polymeasure: atoms on the `1/64` grid, rational
/// coefficients on a 32-step grid across `coeff_range`.
pub fn random_polymeasure(
    n: usize,
    atoms_per_axis: usize,
    coeff_range: (Rational, Rational),
    seed: u64,
) -> DiscretePolymeasure<Rational> {
    assert!(n >= 1 && atoms_per_axis >= 1, "need at least one axis and one atom");
    assert!(
        atoms_per_axis as i64 <= ATOM_GRID + 1,
        "at most 65 distinct grid atoms per axis"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms: Vec<Vec<Rational>> = (0..n)
        .map(|_| {
            let mut picks = sample(&mut rng, (ATOM_GRID + 1) as usize, atoms_per_axis).into_vec();
            picks.sort_unstable();
            picks
                .into_iter()
                .map(|j| Rational::new((j as i64).into(), ATOM_GRID.into()))
                .collect()
        })
        .collect();
    let (lo, hi) = coeff_range;
    let step = (hi - lo.clone()) / Rational::from_integer(32.into());
    let coeffs = Tensor::from_fn(vec![atoms_per_axis; n], |_| {
        lo.clone() + step.clone() * Rational::from_integer(rng.random_range(0..=32i64).into())
    });
    DiscretePolymeasure { atoms, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    fn antisymmetric() -> DiscretePolymeasure<Rational> {
        DiscretePolymeasure::from_terms(
            2,
            &[(vec![q(1, 3), q(2, 3)], q(1, 1)), (vec![q(2, 3), q(1, 3)], q(-1, 1))],
        )
        .unwrap()
    }

    #[test]
    fn dirac_moments() {
        let g = DiscretePolymeasure::from_terms(2, &[(vec![q(1, 2), q(1, 2)], q(1, 1))]).unwrap();
        let mu = g.moments(&[3, 3].into()).unwrap();
        for (k, v) in mu.iter() {
            assert_eq!(*v, q(1, 1 << k.total()));
        }
        let one = DiscretePolymeasure::from_terms(1, &[(vec![q(1, 1)], q(1, 1))]).unwrap();
        assert!(one.moments(&[5].into()).unwrap().iter().all(|(_, v)| *v == q(1, 1)));
    }

    #[test]
    fn antisymmetric_moments() {
        let mu = antisymmetric().moments(&[3, 3].into()).unwrap();
        for (k, v) in mu.iter() {
            let (a, b) = (k[0] as u32, k[1] as u32);
            let expect = num_traits::pow(q(1, 3), a as usize) * num_traits::pow(q(2, 3), b as usize)
                - num_traits::pow(q(2, 3), a as usize) * num_traits::pow(q(1, 3), b as usize);
            assert_eq!(*v, expect);
        }
        assert_eq!(*mu.get(&[1, 1].into()).unwrap(), q(0, 1));
    }

    #[test]
    fn variation_and_semivariation_examples() {
        let single = DiscretePolymeasure::from_terms(2, &[(vec![q(1, 4), q(3, 4)], q(-3, 1))]).unwrap();
        assert_eq!(single.variation(), q(3, 1));
        assert_eq!(single.semivariation().value, q(3, 1));
        assert_eq!(antisymmetric().variation(), q(2, 1));
        assert_eq!(antisymmetric().semivariation().value, q(2, 1));

        let pos = DiscretePolymeasure::from_terms(
            2,
            &[(vec![q(0, 1), q(1, 1)], q(1, 2)), (vec![q(1, 2), q(1, 4)], q(3, 2))],
        )
        .unwrap();
        assert_eq!(pos.variation(), q(2, 1));
        assert_eq!(pos.semivariation().value, q(2, 1));
    }

    #[test]
    fn rank_one_semivariation_factorizes() {
        let u = [q(1, 1), q(-2, 1), q(1, 2)];
        let v = [q(3, 1), q(-1, 1)];
        let coeffs = Tensor::from_fn(vec![3, 2], |i| u[i[0]].clone() * v[i[1]].clone());
        let atoms = vec![vec![q(0, 1), q(1, 2), q(1, 1)], vec![q(1, 4), q(3, 4)]];
        let g = DiscretePolymeasure::new(atoms, coeffs).unwrap();
        assert_eq!(g.semivariation().value, q(7, 2) * q(4, 1));
    }

    #[test]
    fn integrate_examples() {
        let g = antisymmetric();
        let ones = vec![vec![q(1, 1); 2], vec![q(1, 1); 2]];
        assert_eq!(g.integrate(&ones).unwrap(), g.total());
        // f_l = t^k reproduces moments
        let mu = g.moments(&[2, 3].into()).unwrap();
        let tables: Vec<Vec<Rational>> = g
            .atoms()
            .iter()
            .zip([2usize, 3])
            .map(|(a, k)| a.iter().map(|x| num_traits::pow(x.clone(), k)).collect())
            .collect();
        assert_eq!(g.integrate(&tables).unwrap(), *mu.get(&[2, 3].into()).unwrap());
        // the semivariation witness attains the bound
        let sv = g.semivariation();
        let signs: Vec<Vec<Rational>> = sv
            .signs
            .axes()
            .iter()
            .map(|s| s.iter().map(|&x| q(x as i64, 1)).collect())
            .collect();
        assert_eq!(g.integrate(&signs).unwrap().abs_val(), q(2, 1));
        assert!(g.integrate(&[vec![q(1, 1)], vec![q(1, 1); 2]]).is_err());
    }

    #[test]
    fn atoms_are_validated() {
        let bad = DiscretePolymeasure::new(vec![vec![q(1, 2), q(1, 4)]], Tensor::filled(vec![2], q(1, 1)));
        assert!(bad.is_err());
        let outside = DiscretePolymeasure::new(vec![vec![q(3, 2)]], Tensor::filled(vec![1], q(1, 1)));
        assert!(outside.is_err());
    }

    #[test]
    fn generator_is_deterministic() {
        let range = (q(-2, 1), q(2, 1));
        let a = random_polymeasure(3, 4, range.clone(), 11);
        assert_eq!(a, random_polymeasure(3, 4, range.clone(), 11));
        assert_ne!(a, random_polymeasure(3, 4, range, 12));
        for axis in a.atoms() {
            for x in axis {
                assert_eq!((x * Rational::from_integer(64.into())).denom(), &1.into());
            }
        }
        let dirac = random_polymeasure(2, 1, (q(1, 1), q(1, 1)), 3);
        assert_eq!(dirac.coeffs().data(), &[q(1, 1)]);
    }

    #[test]
    fn merged_atoms_leave_moments_unchanged() {
        let p = vec![q(1, 4), q(1, 2)];
        let split = DiscretePolymeasure::from_terms(2, &[(p.clone(), q(1, 3)), (p.clone(), q(2, 3))]).unwrap();
        let whole = DiscretePolymeasure::from_terms(2, &[(p, q(1, 1))]).unwrap();
        let b = MultiIndex::from([3, 3]);
        assert_eq!(split.moments(&b).unwrap(), whole.moments(&b).unwrap());
    }

    #[test]
    fn measure_helpers() {
        let m = DiscreteMeasure::new(vec![q(0, 1), q(1, 2)], vec![q(1, 1), q(-2, 1)]).unwrap();
        assert_eq!(m.mass(), q(-1, 1));
        assert_eq!(m.total_variation(), q(3, 1));
        assert_eq!(m.moments(2), vec![q(-1, 1), q(-1, 1), q(-1, 2)]);
    }
}
