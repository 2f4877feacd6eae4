//! Potential theory and extremal polynomials on finite unions of real intervals.
//!
//! The crate computes capacities, equilibrium measures and Green functions of
//! band sets, weighted Chebyshev and orthogonal polynomials with their Widom
//! factors, Szego factors of structured weights, and the exact quantities of
//! a family of quadratic-preimage Cantor sets.

pub mod cantor;
pub mod chebyshev;
pub mod error;
pub mod harness;
pub mod lp;
pub mod orthopoly;
pub mod potential;
pub mod quadrature;
pub mod realsets;
pub mod weights;

pub use error::{Error, Result};
