//! Fundamental tones of the Laplace and Dirac operators on surfaces of
//! revolution `dt² + f(t)² dφ²`, and checks of classical spectral lower
//! bounds against them.
//!
//! The pipeline is: a [`geometry::WarpedSurface`] is split into Fourier
//! modes ([`spin_fourier`]), each mode is discretized into a tridiagonal
//! generalized eigenproblem ([`operators`]), solved and extrapolated
//! ([`eigensolve`]), and compared against bound formulas ([`bounds`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod eigensolve;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod operators;
pub mod quadrature;
pub mod scenarios;
pub mod spin_fourier;
pub mod spline;

pub use error::{Error, Result};
