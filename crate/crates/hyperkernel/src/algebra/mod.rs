//! Exact arithmetic kernel.
//!
//! Provides:
//!
//! * [`Rational`] — arbitrary precision rationals (always reduced, positive
//!   denominator).
//! * [`Symbol`] / [`SymbolKind`] — interned names with a deterministic
//!   canonical order (shift variables, then series variables, then
//!   parameters, alphabetical within a kind).
//! * [`Monomial`] and [`Polynomial`] — sparse multivariate polynomials over
//!   the rationals ordered graded-lexicographically.
//! * [`RationalFunction`] — reduced fractions of polynomials with a
//!   normalised denominator.
//! * gcd, square-free decomposition, linear/quadratic factor extraction,
//!   integer and rational root finding, and exact linear system solving.

mod symbol;
mod poly;
mod ratfun;
mod gcd;
mod roots;
mod factor;
mod linalg;

pub use symbol::{Symbol, SymbolKind};
pub use poly::{Monomial, Polynomial};
pub use ratfun::RationalFunction;
pub use gcd::{multiplicity, poly_gcd, poly_gcd_many, poly_lcm};
pub use roots::{integer_roots, rational_roots, IntegerRoots};
pub use factor::{factor_lin_quad, full_factor, poly_sqrt, square_free_in, LinQuadFactors};
pub use linalg::{solve_linear, Field, LinearSolution};

pub type Rational = num_rational::BigRational;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Rational from an integer.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational from a numerator/denominator pair.
pub fn qr(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn q_is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

pub(crate) fn q_to_i64(x: &Rational) -> Option<i64> {
    if !q_is_integer(x) {
        return None;
    }
    let n = x.numer();
    if n.bits() > 62 {
        return None;
    }
    let mut v: i64 = 0;
    for (i, d) in n.iter_u64_digits().enumerate() {
        if i > 0 {
            return None;
        }
        v = d as i64;
    }
    if n.sign() == num_bigint::Sign::Minus {
        v = -v;
    }
    Some(v)
}

/// gcd of two rationals in the lattice sense: gcd(a/b, c/d) with positive
/// result, used for extracting the rational content of a polynomial.
pub(crate) fn q_gcd(a: &Rational, b: &Rational) -> Rational {
    use num_integer::Integer;
    if a.is_zero() {
        return if b.is_zero() { Rational::zero() } else { b0_abs(b) };
    }
    if b.is_zero() {
        return b0_abs(a);
    }
    let num = a.numer().gcd(b.numer());
    let den = a.denom().lcm(b.denom());
    Rational::new(num, den)
}

fn b0_abs(x: &Rational) -> Rational {
    if x < &Rational::zero() {
        -x.clone()
    } else {
        x.clone()
    }
}
