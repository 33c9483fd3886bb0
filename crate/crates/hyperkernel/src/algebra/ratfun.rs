use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{poly_gcd, Polynomial, Rational, Symbol};

/// Quotient of two polynomials, kept in lowest terms. The denominator is
/// primitive with a positive leading coefficient; its unit is folded into
/// the numerator, so equal quotients compare equal structurally.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> RationalFunction {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = RationalFunction { num, den };
        r.reduce();
        r
    }

    pub fn from_poly(p: Polynomial) -> RationalFunction {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn constant(c: Rational) -> RationalFunction {
        RationalFunction::from_poly(Polynomial::constant(c))
    }

    pub fn int(n: i64) -> RationalFunction {
        RationalFunction::from_poly(Polynomial::int(n))
    }

    pub fn zero() -> RationalFunction {
        RationalFunction::from_poly(Polynomial::zero())
    }

    pub fn one() -> RationalFunction {
        RationalFunction::from_poly(Polynomial::one())
    }

    pub fn var(s: Symbol) -> RationalFunction {
        RationalFunction::from_poly(Polynomial::var(s))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn inv(&self) -> RationalFunction {
        assert!(!self.is_zero(), "inverse of zero");
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i32) -> RationalFunction {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let e = e.unsigned_abs();
        RationalFunction {
            num: base.num.pow(e),
            den: base.den.pow(e),
        }
    }

    pub fn scale(&self, c: &Rational) -> RationalFunction {
        if c.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn subst(&self, v: Symbol, value: &RationalFunction) -> RationalFunction {
        let dn = self.num.degree_in(v);
        let dd = self.den.degree_in(v);
        let n = subst_poly(&self.num, v, value);
        let d = subst_poly(&self.den, v, value);
        assert!(!d.is_zero(), "substitution pole in denominator");
        RationalFunction::new(&n * &value.den.pow(dd), &d * &value.den.pow(dn))
    }

    pub fn shift(&self, v: Symbol, offset: i64) -> RationalFunction {
        RationalFunction::new(self.num.shift(v, offset), self.den.shift(v, offset))
    }

    pub fn shift_all(&self, shifts: &[(Symbol, i64)]) -> RationalFunction {
        RationalFunction::new(self.num.shift_all(shifts), self.den.shift_all(shifts))
    }

    pub fn eval(&self, bind: &BTreeMap<Symbol, Rational>) -> Option<Rational> {
        let d = self.den.eval(bind)?;
        if d.is_zero() {
            return None;
        }
        let n = self.num.eval(bind)?;
        Some(n / d)
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Symbol> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn contains_var(&self, s: Symbol) -> bool {
        self.num.contains_var(s) || self.den.contains_var(s)
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Polynomial::one();
            return;
        }
        let g = poly_gcd(&self.num, &self.den);
        if !g.is_one() {
            self.num = self.num.exact_div(&g).unwrap();
            self.den = self.den.exact_div(&g).unwrap();
        }
        let (u, pp) = self.den.primitive();
        self.den = pp;
        let inv = Rational::one() / u;
        self.num = self.num.scale(&inv);
    }
}

/// Substitute `value` for `v` in `p` and clear denominators: returns
/// `p(v -> value) * value.den^deg_v(p)` as a polynomial.
fn subst_poly(p: &Polynomial, v: Symbol, value: &RationalFunction) -> Polynomial {
    if !p.contains_var(v) {
        return p.clone();
    }
    let coeffs = p.coeffs_in(v);
    let d = coeffs.len() - 1;
    let mut acc = Polynomial::zero();
    for (k, c) in coeffs.iter().enumerate().rev() {
        acc = &(&acc * &value.num) + &(c * &value.den.pow((d - k) as u32));
    }
    acc
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        // cross-reduce before multiplying to keep intermediates small
        let g1 = poly_gcd(&self.num, &rhs.den);
        let g2 = poly_gcd(&rhs.num, &self.den);
        let n1 = self.num.exact_div(&g1).unwrap();
        let d2 = rhs.den.exact_div(&g1).unwrap();
        let n2 = rhs.num.exact_div(&g2).unwrap();
        let d1 = self.den.exact_div(&g2).unwrap();
        RationalFunction::new(&n1 * &n2, &d1 * &d2)
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self * &rhs.inv()
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Polynomial| {
            if p.num_terms() > 1 {
                format!("({})", p)
            } else {
                format!("{}", p)
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}
