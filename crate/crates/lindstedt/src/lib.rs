//! Perturbative construction and verification of codimension-1 invariant
//! tori for rotator systems with an angle-only coupling.
//!
//! The crate computes the formal expansion of the quasi-periodic response in
//! the coupling strength, re-derives every coefficient independently from a
//! labeled-tree enumeration, builds the multiscale resummed propagators with
//! their symmetry structure, solves the bifurcation equation for the
//! surviving torus, and cross-checks the assembled solution against direct
//! numerical integration of the equations of motion.
//!
//! Entry points by theme:
//! - [`smalldiv`]: divisor minima, Bryuno sums, scale sequences, cutoffs;
//! - [`fourier`] / [`jet`]: sparse trigonometric algebra and forward jets;
//! - [`series`]: the order-by-order recursion and its zero modes;
//! - [`trees`]: labeled-tree and self-energy enumeration plus the symmetry
//!   and counting check suites;
//! - [`resum`]: scale-recursive propagators, symbolic coupling-order
//!   tracking, the regularised switch chain;
//! - [`torus`]: bifurcation roots and branches, torus assembly, residual
//!   and integration checks;
//! - [`cli`]: batch configuration and the command implementations behind
//!   the thin binary.

pub mod cli;
pub mod linalg;
pub mod eps;
pub mod error;
pub mod fourier;
pub mod jet;
pub mod resum;
pub mod series;
pub mod smalldiv;
pub mod torus;
pub mod trees;

pub use error::{Error, Result};
pub use fourier::{BetaPoly, TrigPoly};
pub use jet::Jet2;
pub use smalldiv::{Frequency, ScaleSystem};
