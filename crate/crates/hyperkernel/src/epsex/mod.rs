//! Laurent expansion of hypergeometric products in a small parameter.
//!
//! The expansion parameter is the dedicated series symbol `ep` returned by
//! [`epsilon_symbol`]. The module provides:
//!
//! * [`LaurentSeries`] — a truncated Laurent series in `ep` whose
//!   coefficients are symbolic [`Expression`]s, with addition, Cauchy
//!   multiplication and inversion that track the truncation order exactly;
//! * [`ProductAtom`] and [`series_for_product`] — expansion of a finite
//!   product `prod(h(ep,i), i, l, n)` with rational multiplicand into a
//!   Laurent series whose coefficients are built from Pochhammer symbols,
//!   factorials, harmonic sums and, where no closed form applies, explicit
//!   finite sums;
//! * [`expand_pochhammer`] — the expansion of a shifted Pochhammer symbol
//!   `(a + r*ep)_n` as a special case of the above;
//! * [`hurwitz_identity`] — reduction of a single Hurwitz harmonic sum to a
//!   difference of harmonic sums at shifted arguments;
//! * [`eval_truncated`] — high-precision numeric evaluation of expressions
//!   with explicit truncation of infinite sums, for spot checks of series
//!   data.
//!
//! Expansion works factor by factor: the multiplicand is factored over the
//! rationals, every factor is certified nonzero on the summation range at
//! `ep = 0` (initial positions where a factor vanishes are split off into a
//! rational prefactor), and each factor's logarithmic derivative tower is
//! summed in closed form where the denominators factor linearly. The
//! coefficients of distinct factors combine by Cauchy multiplication, so
//! the result is deterministic for a given factor order.

mod eval;
mod series;

pub use eval::{eval_truncated, EvalError, Truncated};
pub use series::{series_for_product, ProductAtom};

use crate::algebra::{Rational, RationalFunction, Symbol};
use crate::expr::Expression;
use num_traits::{One, Signed, Zero};

/// The expansion parameter used throughout this module.
pub fn epsilon_symbol() -> Symbol {
    Symbol::series("ep")
}

/// The running index a [`ProductAtom`] multiplicand is written in.
pub fn index_symbol() -> Symbol {
    Symbol::shift("i")
}

/// Marker for an infinite upper summation bound. [`eval_truncated`]
/// replaces it with the requested truncation point; exact evaluation of a
/// sum with this bound fails, which is the intended behaviour.
pub fn infinity_symbol() -> Symbol {
    Symbol::param("inf")
}

/// Reasons an expansion request is rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EpsexError {
    /// The multiplicand is identically zero.
    ZeroMultiplicand,
    /// The multiplicand (or an expression that should become one) is not
    /// rational in the expansion parameter and the running index.
    NonRationalMultiplicand,
    /// The zero positions of the multiplicand at `ep = 0` cannot be
    /// certified: the lower bound is not an explicit integer, a factor
    /// vanishes identically at `ep = 0`, or its integer roots cannot be
    /// decided. Refusing is preferred over silently expanding around a
    /// vanishing factor.
    UndecidablePrefactor,
}

impl std::fmt::Display for EpsexError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EpsexError::ZeroMultiplicand => write!(f, "multiplicand is identically zero"),
            EpsexError::NonRationalMultiplicand => {
                write!(f, "multiplicand is not rational in the expansion symbols")
            }
            EpsexError::UndecidablePrefactor => {
                write!(f, "cannot certify the multiplicand nonzero on the range")
            }
        }
    }
}

impl std::error::Error for EpsexError {}

/// A Laurent series `sum_k c_k ep^k` known exactly for `order <= k <=
/// truncation`. The leading stored coefficient is canonically nonzero; a
/// series that is zero through its truncation stores no coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    order: i64,
    coeffs: Vec<Expression>,
    truncation: i64,
}

impl LaurentSeries {
    /// Series with the given coefficients for `ep^order, ep^(order+1), ...`;
    /// the truncation is implied by the coefficient count.
    pub fn new(order: i64, coeffs: Vec<Expression>) -> LaurentSeries {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        let truncation = order + coeffs.len() as i64 - 1;
        LaurentSeries::with_truncation(order, coeffs, truncation)
    }

    /// The zero series, known to vanish through `ep^truncation`.
    pub fn zero(truncation: i64) -> LaurentSeries {
        LaurentSeries {
            order: truncation + 1,
            coeffs: Vec::new(),
            truncation,
        }
    }

    /// Series from explicit coefficients and an independently known
    /// truncation. Coefficients beyond the list (through the truncation)
    /// are zero.
    pub(crate) fn with_truncation(
        order: i64,
        coeffs: Vec<Expression>,
        truncation: i64,
    ) -> LaurentSeries {
        let mut coeffs: Vec<Expression> =
            coeffs.into_iter().map(|c| c.canonicalize()).collect();
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => LaurentSeries::zero(truncation),
            Some(k) => {
                coeffs.drain(..k);
                let order = order + k as i64;
                debug_assert!(order + coeffs.len() as i64 - 1 <= truncation);
                LaurentSeries {
                    order,
                    coeffs,
                    truncation,
                }
            }
        }
    }

    /// Exponent of the leading stored coefficient. For a zero series this
    /// is `truncation + 1`.
    pub fn order(&self) -> i64 {
        self.order
    }

    /// Highest exponent whose coefficient is known.
    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `ep^k`. Panics above the truncation, where the
    /// coefficient is unknown.
    pub fn coefficient(&self, k: i64) -> Expression {
        assert!(
            k <= self.truncation,
            "coefficient of ep^{k} is beyond the truncation {}",
            self.truncation
        );
        if k < self.order || (k - self.order) as usize >= self.coeffs.len() {
            return Expression::zero();
        }
        self.coeffs[(k - self.order) as usize].clone()
    }

    /// The stored coefficients, lowest exponent first.
    pub fn coefficients(&self) -> &[Expression] {
        &self.coeffs
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        let truncation = self.truncation.min(other.truncation);
        let order = self.order.min(other.order).min(truncation + 1);
        let coeffs = (order..=truncation)
            .map(|k| {
                Expression::add(vec![
                    self.coefficient_or_zero(k),
                    other.coefficient_or_zero(k),
                ])
            })
            .collect();
        LaurentSeries::with_truncation(order, coeffs, truncation)
    }

    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        let truncation = (self.truncation + other.order).min(other.truncation + self.order);
        if self.is_zero() || other.is_zero() {
            return LaurentSeries::zero(truncation);
        }
        let order = self.order + other.order;
        let coeffs = (order..=truncation)
            .map(|k| {
                let lo = self.order.max(k - other.truncation);
                let hi = self.truncation.min(k - other.order);
                let terms = (lo..=hi)
                    .map(|a| {
                        Expression::mul(vec![
                            self.coefficient(a),
                            other.coefficient(k - a),
                        ])
                    })
                    .collect();
                Expression::add(terms)
            })
            .collect();
        LaurentSeries::with_truncation(order, coeffs, truncation)
    }

    /// Multiplicative inverse, or `None` for a series with no visible
    /// leading coefficient. The result is exact through `truncation -
    /// 2*order`.
    pub fn invert(&self) -> Option<LaurentSeries> {
        if self.is_zero() {
            return None;
        }
        let span = (self.truncation - self.order) as usize;
        let lead = Expression::div(Expression::one(), self.coeffs[0].clone());
        let mut inv: Vec<Expression> = vec![lead.clone()];
        for k in 1..=span {
            let acc = (1..=k)
                .map(|j| {
                    Expression::mul(vec![
                        self.coefficient_or_zero(self.order + j as i64),
                        inv[k - j].clone(),
                    ])
                })
                .collect();
            inv.push(Expression::mul(vec![
                Expression::int(-1),
                lead.clone(),
                Expression::add(acc),
            ]));
        }
        Some(LaurentSeries::with_truncation(
            -self.order,
            inv,
            self.truncation - 2 * self.order,
        ))
    }

    /// Multiply every coefficient by `factor`.
    pub fn scale(&self, factor: &Expression) -> LaurentSeries {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| Expression::mul(vec![factor.clone(), c.clone()]))
            .collect();
        LaurentSeries::with_truncation(self.order, coeffs, self.truncation)
    }

    /// Forget coefficients above `truncation`.
    pub fn truncate_to(&self, truncation: i64) -> LaurentSeries {
        assert!(
            truncation <= self.truncation,
            "cannot extend a truncation from {} to {truncation}",
            self.truncation
        );
        let keep = ((truncation - self.order + 1).max(0) as usize).min(self.coeffs.len());
        LaurentSeries::with_truncation(self.order, self.coeffs[..keep].to_vec(), truncation)
    }

    /// The series as a plain expression in `ep`, with the truncation
    /// dropped.
    pub fn to_expression(&self) -> Expression {
        let ep = Expression::sym(epsilon_symbol());
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                Expression::mul(vec![
                    c.clone(),
                    Expression::pow(ep.clone(), self.order + j as i64),
                ])
            })
            .collect();
        Expression::add(terms)
    }

    fn coefficient_or_zero(&self, k: i64) -> Expression {
        if k < self.order || (k - self.order) as usize >= self.coeffs.len() {
            Expression::zero()
        } else {
            self.coeffs[(k - self.order) as usize].clone()
        }
    }
}

/// Rewrite the single Hurwitz sum `HS(l; a; n)` as `S(l; a+n) - S(l; a)`.
/// The word must be a single positive entry.
pub fn hurwitz_identity(l: i64, a: &Expression, n: &Expression) -> Expression {
    assert!(l >= 1, "hurwitz_identity needs a positive weight, got {l}");
    Expression::sub(
        Expression::harmonic(vec![l], Expression::add(vec![a.clone(), n.clone()])),
        Expression::harmonic(vec![l], a.clone()),
    )
}

/// Expansion of `poch(a + r*ep, n)` around `ep = 0` through `ep^up_to`.
///
/// `a` must be free of the expansion parameter and of `n`, and rational in
/// its remaining symbols. The order-zero coefficient is `poch(a, n)`.
pub fn expand_pochhammer(
    a: &Expression,
    r: &Rational,
    n: Symbol,
    up_to: i64,
) -> Result<LaurentSeries, EpsexError> {
    let free = a.free_symbols();
    assert!(
        !free.contains(&epsilon_symbol()) && !free.contains(&n),
        "the Pochhammer base must not involve the expansion parameter or the count"
    );
    let a_rf = a
        .to_rational_function()
        .ok_or(EpsexError::NonRationalMultiplicand)?;
    if r.is_zero() {
        let poch = Expression::poch(a.clone(), Expression::sym(n));
        return Ok(LaurentSeries::with_truncation(0, vec![poch], up_to));
    }
    let i = RationalFunction::var(index_symbol());
    let ep = RationalFunction::var(epsilon_symbol());
    let r_rf = RationalFunction::constant(r.clone());
    let one = RationalFunction::one();
    let multiplicand = &(&(&a_rf + &i) - &one) + &(&ep * &r_rf);
    let atom = ProductAtom {
        multiplicand,
        lower: Expression::one(),
        upper: Expression::sym(n),
        inverse: false,
    };
    series_for_product(&atom, up_to)
}

/// Exact harmonic number `sum_{t=1}^{m} 1/t^rho` as a rational.
pub(crate) fn harmonic_number(rho: u32, m: i64) -> Rational {
    assert!(m >= 0, "harmonic number at negative argument {m}");
    let mut acc = Rational::zero();
    for t in 1..=m {
        acc += Rational::one() / crate::algebra::q(t).pow(rho as i32);
    }
    acc
}

pub(crate) fn rational_abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use std::collections::BTreeMap;

    fn e(src: &str) -> Expression {
        parse(src).unwrap()
    }

    #[test]
    fn series_bookkeeping_through_add_and_mul() {
        epsilon_symbol();
        let a = LaurentSeries::new(-1, vec![e("1"), e("n"), e("n^2")]);
        assert_eq!(a.order(), -1);
        assert_eq!(a.truncation(), 1);
        let b = LaurentSeries::new(0, vec![e("2"), e("3")]);
        let sum = a.add(&b);
        assert_eq!(sum.order(), -1);
        assert_eq!(sum.truncation(), 1);
        assert_eq!(sum.coefficient(0), e("n+2"));
        let prod = a.mul(&b);
        assert_eq!(prod.order(), -1);
        assert_eq!(prod.truncation(), 0);
        assert_eq!(prod.coefficient(-1), e("2"));
        assert_eq!(prod.coefficient(0), e("2*n+3"));
    }

    #[test]
    fn leading_zero_coefficients_are_trimmed() {
        let s = LaurentSeries::new(0, vec![e("n-n"), e("5"), e("0")]);
        assert_eq!(s.order(), 1);
        assert_eq!(s.truncation(), 2);
        assert_eq!(s.coefficient(2), Expression::zero());
        let z = LaurentSeries::new(0, vec![e("0"), e("0")]);
        assert!(z.is_zero());
        assert_eq!(z.order(), 2);
        assert_eq!(z.truncation(), 1);
    }

    #[test]
    fn inversion_of_a_geometric_series() {
        epsilon_symbol();
        let s = LaurentSeries::new(0, vec![e("1"), e("-1"), e("0"), e("0")]);
        let inv = s.invert().unwrap();
        assert_eq!(inv.order(), 0);
        assert_eq!(inv.truncation(), 3);
        for k in 0..=3 {
            assert_eq!(inv.coefficient(k), Expression::one());
        }
        let back = s.mul(&inv);
        assert_eq!(back.coefficient(0), Expression::one());
        for k in 1..=3 {
            assert!(back.coefficient(k).is_zero());
        }
    }

    #[test]
    fn inversion_tracks_the_order_shift() {
        let s = LaurentSeries::new(2, vec![e("3"), e("n")]);
        let inv = s.invert().unwrap();
        assert_eq!(inv.order(), -2);
        assert_eq!(inv.truncation(), -1);
        assert_eq!(inv.coefficient(-2), e("1/3"));
        assert_eq!(inv.coefficient(-1), e("-n/9"));
        assert!(s.invert().unwrap().invert().unwrap() == s.truncate_to(3));
    }

    #[test]
    fn hurwitz_identity_at_symbolic_offset() {
        let a = e("a");
        let n = e("n");
        let got = hurwitz_identity(2, &a, &n);
        assert_eq!(got, e("S(2;a+n) - S(2;a)"));
        assert!(hurwitz_identity(1, &a, &Expression::zero()).is_zero());
    }

    #[test]
    fn hurwitz_identity_matches_the_explicit_sum() {
        let got = hurwitz_identity(1, &e("2"), &e("3"));
        let v = got.eval_rational(&BTreeMap::new()).unwrap();
        assert_eq!(v, crate::algebra::qr(47, 60));
        let direct: Rational = (3..=5).map(|t| crate::algebra::qr(1, t)).sum();
        assert_eq!(v, direct);
    }

    #[test]
    fn pochhammer_expansion_with_zero_rate_is_exact() {
        let n = Symbol::shift("n");
        let s = expand_pochhammer(&e("a"), &Rational::zero(), n, 3).unwrap();
        assert_eq!(s.order(), 0);
        assert_eq!(s.truncation(), 3);
        assert_eq!(s.coefficient(0), e("poch(a,n)"));
        for k in 1..=3 {
            assert!(s.coefficient(k).is_zero());
        }
    }

    #[test]
    fn pochhammer_expansion_first_order() {
        epsilon_symbol();
        let n = Symbol::shift("n");
        let r = crate::algebra::qr(5, 3);
        let s = expand_pochhammer(&e("a"), &r, n, 1).unwrap();
        assert_eq!(s.coefficient(0), e("poch(a,n)"));
        let want = e("(5/3) * poch(a,n) * (n/(a*(a+n)) - S(1;a) + S(1;a+n))");
        assert_eq!(s.coefficient(1), want);
    }

    #[test]
    fn pochhammer_expansion_second_order() {
        epsilon_symbol();
        let n = Symbol::shift("n");
        let r = crate::algebra::qr(5, 3);
        let s = expand_pochhammer(&e("a"), &r, n, 2).unwrap();
        let want = e(
            "(5/3)^2 * poch(a,n) * ( -n/(a*(a+n)^2) \
             + (-n/(a*(a+n)) - S(1;a+n))*S(1;a) + (1/2)*S(1;a)^2 \
             + n*S(1;a+n)/(a*(a+n)) \
             + (1/2)*(S(1;a+n)^2 + S(2;a) - S(2;a+n)) )",
        );
        assert_eq!(s.coefficient(2), want);
    }

    #[test]
    fn pochhammer_expansion_third_order() {
        epsilon_symbol();
        let n = Symbol::shift("n");
        let r = crate::algebra::qr(5, 3);
        let s = expand_pochhammer(&e("a"), &r, n, 3).unwrap();
        let want = e(
            "(5/3)^3 * poch(a,n) * ( n/(a*(a+n)^3) \
             + (n/(a*(a+n)^2) - n*S(1;a+n)/(a*(a+n)) \
                - (1/2)*(S(1;a+n)^2 + S(2;a) - S(2;a+n)))*S(1;a) \
             + (n/(2*a*(a+n)) + (1/2)*S(1;a+n))*S(1;a)^2 \
             - (1/6)*S(1;a)^3 \
             + (-n/(a*(a+n)^2) + (1/2)*S(2;a) - (1/2)*S(2;a+n))*S(1;a+n) \
             + n*S(1;a+n)^2/(2*a*(a+n)) + (1/6)*S(1;a+n)^3 \
             + n*S(2;a)/(2*a*(a+n)) - n*S(2;a+n)/(2*a*(a+n)) \
             - (1/3)*S(3;a) + (1/3)*S(3;a+n) )",
        );
        assert_eq!(s.coefficient(3), want);
    }

    #[test]
    fn unit_base_reduces_to_a_factorial_and_single_harmonic() {
        epsilon_symbol();
        let n = Symbol::shift("n");
        let r = crate::algebra::qr(5, 3);
        let s = expand_pochhammer(&Expression::one(), &r, n, 1).unwrap();
        assert_eq!(s.coefficient(0), e("fact(n)"));
        assert_eq!(s.coefficient(1), e("(5/3) * fact(n) * S(1;n)"));
    }

    #[test]
    fn first_order_coefficient_matches_a_difference_quotient() {
        // d/dep prod(j + r*ep, j, 1, n) at ep = 0 equals the ep^1
        // coefficient; a central difference of the exact rational product
        // agrees to O(h^2).
        epsilon_symbol();
        let n_sym = Symbol::shift("n");
        let r = crate::algebra::qr(5, 3);
        let s = expand_pochhammer(&Expression::one(), &r, n_sym, 1).unwrap();
        let c1 = s.coefficient(1);
        let h = crate::algebra::qr(1, 1_000_000);
        let product = e("prod(j + (5/3)*ep, j, 1, n)");
        for n in 1..=6 {
            let mut bind = BTreeMap::new();
            bind.insert(n_sym, crate::algebra::q(n));
            bind.insert(epsilon_symbol(), h.clone());
            let plus = product.eval_rational(&bind).unwrap();
            bind.insert(epsilon_symbol(), -h.clone());
            let minus = product.eval_rational(&bind).unwrap();
            let quotient = (plus - minus) / (crate::algebra::q(2) * h.clone());
            bind.remove(&epsilon_symbol());
            let exact = c1.eval_rational(&bind).unwrap();
            let err = rational_abs(&(quotient - exact));
            assert!(
                err < crate::algebra::qr(1, 10_000_000),
                "difference quotient off by {err} at n = {n}"
            );
        }
    }

    #[test]
    fn harmonic_number_values() {
        assert_eq!(harmonic_number(1, 0), Rational::zero());
        assert_eq!(harmonic_number(1, 4), crate::algebra::qr(25, 12));
        assert_eq!(harmonic_number(2, 3), crate::algebra::qr(49, 36));
    }
}
