//! Bifibrations of affine cubic surfaces, matching paths, and the
//! Picard–Lefschetz computation of the first homology of a total space
//! (the Painlevé cubic family).

pub mod analysis;
pub mod fibration;
pub mod lattice;
pub mod mcg;
pub mod painleve;
pub mod poly;
pub mod roots;
pub mod scalar;
pub mod tracking;

use num_complex::Complex;
use num_rational::BigRational;

/// Double-precision complex polynomials: the working type everywhere.
pub type Poly = poly::MultiPoly<num_complex::Complex64>;
pub type Poly32 = poly::MultiPoly<Complex<f32>>;
/// Exact Gaussian-rational polynomials.
pub type ExactPoly = poly::MultiPoly<Complex<BigRational>>;
pub type LinearForm = poly::LinearForm<num_complex::Complex64>;

pub use lattice::IntMatrix;
