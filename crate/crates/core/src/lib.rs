//! Resonance geometry for convex nearly-integrable Hamiltonians
//! `H(y, x) = h(y) + eps f(x)`.
//!
//! * [`lattice`]: generators of rational directions and unimodular frames.
//! * [`model`]: convex integrable part `h`, its domain and constants, and the
//!   Fourier cutoffs / small-divisor threshold derived from `(eps, K, K0)`.
//! * [`covering`]: non-resonant, simply-resonant and residual zones, Monte Carlo
//!   zone measures, and the explicit residual-zone bound.
//! * [`resgraph`]: rotated model along a resonance, resonance graphs, base
//!   cubes, contraction and non-resonance checks.
//! * [`secular`]: fast-angle averages and first-order standard-form data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covering;
pub mod error;
pub mod lattice;
pub mod model;
pub mod resgraph;
pub mod rng;
pub mod secular;

pub use error::{Error, Result};
