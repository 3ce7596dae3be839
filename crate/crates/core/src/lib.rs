//! Multilinear Hausdorff moment problems on `[0,1]^n`.
//!
//! A moment tensor `mu_k` is tested for the classical (bounded), weak
//! (weakly bounded) and strong (Hankel) variants of the Hausdorff problem.
//! Positive verdicts are certificates up to the scanned order; violations
//! come with explicit witnesses. Exact rational arithmetic is the default.

pub mod certify;
pub mod cli;
pub mod error;
pub mod harmonizable;
pub mod index;
pub mod io;
pub mod moment;
pub mod polymeasure;
pub mod polynomial;
pub mod scalar;
pub mod strong;
pub mod tensor;

pub use certify::{
    bounded_constant, certify_weakly_bounded, weak_bound_estimate, weak_bound_exact, CertificateReport, Verdict,
};
pub use error::{MomentError, Result};
pub use index::MultiIndex;
pub use moment::{
    bernstein_coefficients, check_completely_monotone, evaluate_functional, forward_difference, MomentTensor,
};
pub use polymeasure::{random_polymeasure, DiscreteMeasure, DiscretePolymeasure};
pub use polynomial::Polynomial;
pub use scalar::{Field, Rational, Real, ScalarMode};
pub use strong::{check_hankel, diagonal_sequence, reconstruct_multivariate, reconstruct_univariate, solve_strong};
