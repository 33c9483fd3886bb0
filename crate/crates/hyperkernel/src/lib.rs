//! Symbolic toolkit for multivariate hypergeometric structures.
//!
//! The crate is organised in six layers:
//!
//! * [`algebra`] — exact rationals, multivariate polynomials over Q with a
//!   graded lexicographic order, reduced rational functions, gcd, light
//!   factorisation, integer root extraction and exact linear solving.
//! * [`expr`] — a small expression language (Pochhammer symbols, factorials,
//!   finite sums and products, harmonic sums) with a parser, a canonical
//!   printer and capture-checked substitution.
//! * [`taylor`] — conversion between differential operators acting on a
//!   power series and the difference equations satisfied by its Taylor
//!   coefficients, plus a catalog of named series for classification.
//! * [`hypsolve`] — solving first order coupled recurrence systems in
//!   nested-product form and rewriting the products with Pochhammer symbols.
//! * [`epsex`] — Laurent expansion in a small parameter of products of the
//!   kind produced by [`hypsolve`], and truncated high precision evaluation.
//! * [`plde`] — spread/dispersion analysis, denominator bounds and ansatz
//!   driven solving of partial linear difference equations.

pub mod algebra;
pub mod epsex;
pub mod expr;
pub mod hypsolve;
pub mod taylor;
