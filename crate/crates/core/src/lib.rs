//! Exact-rational construction of Crouzeix-Raviart finite element spaces of
//! arbitrary polynomial order `k` on conforming simplicial meshes in dimension
//! `d >= 2`.
//!
//! Everything on the construction and verification path runs in exact
//! arbitrary-precision rational arithmetic: barycentric polynomial algebra,
//! Jacobi and simplex orthogonal polynomials, simplex/facet integration,
//! fraction-free linear solves, basis assembly, bidual degrees of freedom and
//! the interpolation operators. A binary64 evaluation path exists only for
//! tabulation; no verification decision ever touches a float.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the command
//! line front end live in the companion `crspace-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod basis;
pub mod complex;
pub mod dofs;
pub mod error;
pub mod fe;
pub mod integrate;
pub mod jacobi;
pub mod linalg;
pub mod mesh;
pub mod num;
pub mod orthopoly;
pub mod poly;
pub mod verify;

pub use error::Error;
pub use num::Rational;
