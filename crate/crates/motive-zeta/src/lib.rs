//! Exact zeta- and L-function workbench for varieties over finite fields.
//!
//! The crate is organized in layers:
//!
//! * [`poly`], [`ratfunc`], [`series`] — exact arithmetic over ℚ: dense
//!   polynomials, reduced rational functions, truncated power series, and
//!   Padé-style rational reconstruction.
//! * [`field`] — finite fields `F_{p^e}` with deterministic moduli, extension
//!   towers, and explicit embeddings.
//! * [`variety`] — varieties presented by explicit polynomial systems, point
//!   counting over extension towers, fiber decompositions, Weierstrass
//!   curves, and Kummer twist families.
//! * [`motive`] — virtual classes: signed multisets of polynomial atoms
//!   carrying the factored Z-function, with sum, tensor, dual, Tate twist,
//!   Euler characteristic, Frobenius determinant, functional-equation
//!   checking, and weight analysis.
//! * [`dirichlet`] — truncated formal Dirichlet series: products, inverses,
//!   Euler factors and products, the shift-equation solver, and the
//!   convergence-abscissa bound.
//! * [`lfun`] — places and local-to-global assembly: total and nearby local
//!   factors, the q-orbit solver, the elliptic global L-series, Gamma factors
//!   and the completed xi, function-field assembly with its functional
//!   equation, and the prime density scan.
//! * [`expr`], [`cmd`] — the expression language and the subcommand
//!   implementations behind the `mzeta` binary.
//!
//! All core arithmetic is exact (`BigRational`); floating point enters only
//! in numeric evaluation (`dirichlet::evaluate`, Gamma factors) and in the
//! root-modulus estimates of `motive::weight_profile`.

pub mod arith;
pub mod cmd;
pub mod dirichlet;
pub mod error;
pub mod expr;
pub mod field;
pub mod jsonq;
pub mod lfun;
pub mod motive;
pub mod poly;
pub mod ratfunc;
pub mod series;
pub mod variety;

pub use error::{Error, Result};
