//! Computational Wigner-Mackey theory for the inhomogeneous Lorentz group.
//!
//! The crate covers, in verification-grade form:
//!
//! - Minkowski geometry and the two-fold covering `SL(2,C) -> L`
//!   ([`minkowski`]);
//! - the finite-dimensional spin representations and generalized
//!   sigma/gamma matrices ([`irreps`]);
//! - orbits, boost sections, little groups and Wigner rotations
//!   ([`orbits`]);
//! - the unitary irreducible representations `(m, s)` realized on quadrature
//!   grids over the mass shell ([`wigner_rep`]);
//! - exact verification of the induced-representation machinery on finite
//!   semidirect products ([`mackey_finite`]);
//! - classical free fields for arbitrary spin ([`fields`]);
//! - truncated Fock spaces, mode-sum quantum fields and the numerical
//!   spin-statistics verdict ([`spinstat`]).
//!
//! All numerical code is generic over the real scalar type via
//! [`scalar::Scalar`]; the aliases below fix `f64`, which is what every
//! documented tolerance refers to.

// Index-based loops are the clearer idiom for the dense matrix code here.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::type_complexity)]

pub mod error;
pub mod fields;
pub mod irreps;
pub mod linalg;
pub mod mackey_finite;
pub mod minkowski;
pub mod orbits;
pub mod scalar;
pub mod schema;
pub mod spinstat;
pub mod verification;
pub mod wigner_rep;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` four-vector.
pub type FourVector64 = minkowski::FourVector<f64>;
/// `f64` SL(2,C) element.
pub type SL2C64 = minkowski::SL2C<f64>;
/// `f64` restricted Lorentz matrix.
pub type LorentzMatrix64 = minkowski::LorentzMatrix<f64>;
/// `f64` dense complex matrix.
pub type CMat64 = linalg::CMat<f64>;
/// `f64` momentum grid.
pub type MomentumGrid64 = wigner_rep::MomentumGrid<f64>;
/// `f64` wave function.
pub type WaveFunction64 = wigner_rep::WaveFunction<f64>;
