//! Exact arithmetic: rationals, Gaussian rationals, dense matrices and the
//! exterior algebra.

mod exterior;
mod gauss;
mod matrix;
mod rational;

pub use exterior::{derivation_map, grade_basis, induced_map, wedge_map, Blade, ExtElement, MAX_RANK};
pub use gauss::GaussRational;
pub use matrix::{Echelon, GaussMatrix, Matrix, RatMatrix};
pub use rational::{binomial, common_denominator, Field, Rational};
