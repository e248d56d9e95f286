//! Computational machinery for super automorphic forms on the complex unit
//! ball `B ⊂ ℂⁿ` with `r` odd coordinates.
//!
//! Layers, bottom up:
//! - [`grassmann`]: exterior algebra of the odd generators;
//! - [`group`]: `sS(U(n,1) × U(r))`, the Cayley matrix, Möbius actions and cocycles;
//! - [`domain`]: `B`, the half plane `H`, Jordan triple determinants, `Ψ` coordinates;
//! - [`measure`]: finite-difference Jacobians and quasi-Monte Carlo checks of the invariant measure;
//! - [`superfunc`]: component families `{f_I}` with slash actions and the lift;
//! - [`fourier`]: cusp Fourier coefficients on twisted frequency lattices;
//! - [`satake`]: `L^s` norms near a cusp and the integrability classifier.

pub mod domain;
pub mod error;
pub mod fourier;
pub mod grassmann;
pub mod group;
pub mod linalg;
pub mod measure;
pub mod quadrature;
pub mod sampling;
pub mod satake;
pub mod superfunc;

pub use error::{Error, Result};
