//! Exact computations on flat complex tori with B-field: the doubled-lattice
//! complex structures, lattice criteria for isomorphism, mirror symmetry and
//! derived equivalence, T-duality, Fourier–Mukai transport of rational
//! cohomology, coisotropic A-brane checks and truncated oscillator Fock
//! spaces.
//!
//! Every computation is carried out in exact rational or Gaussian-rational
//! arithmetic.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod exact;
pub mod fock;
pub mod abranes;
pub mod cli;
pub mod cohomology;
pub mod equivalence;
pub mod tduality;
pub mod torus;

pub use error::{HmsError, Result};
