//! Generalized Böttcher coordinates for polarized polynomial correspondences `g(y) = f(x)`.
//!
//! The crate builds the uniformizing series `ξ` and its inverse `γ` over exact
//! rationals, checks them formally and at p-adic points of the path space, and
//! computes the orbit counts that follow from the torus isomorphism and Kummer
//! theory.

pub mod numeric;
pub mod series;
pub mod boettcher;
pub mod padic;
pub mod iso;
pub mod orbits;
pub mod random;
