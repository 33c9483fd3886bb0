use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{q, q_gcd, Rational, Symbol};

/// A power product of symbols. Exponents are strictly positive and the
/// factor list is sorted in the canonical symbol order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(s: Symbol) -> Monomial {
        Monomial(vec![(s, 1)])
    }

    pub fn power(s: Symbol, e: u32) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(s, e)])
        }
    }

    pub fn from_pairs(mut pairs: Vec<(Symbol, u32)>) -> Monomial {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        Monomial(pairs)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.0
            .iter()
            .find(|&&(v, _)| v == s)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Divide by `other` when every exponent of `other` is covered.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            let mut e = e;
            while j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                if other.0[j].1 > e {
                    return None;
                }
                e -= other.0[j].1;
                j += 1;
            }
            if e > 0 {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Remove a symbol entirely (used when splitting off one variable).
    pub fn without(&self, s: Symbol) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&(v, _)| v != s).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Monomial) -> Ordering {
        // Graded lexicographic: total degree first, then the first symbol
        // (in canonical order) with a differing exponent decides, larger
        // exponent winning.
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match self.0[i].1.cmp(&other.0[j].1) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    ord => return ord,
                },
            }
        }
        match (i < self.0.len(), j < other.0.len()) {
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Monomial) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial over the rationals. Stored terms never
/// carry a zero coefficient; the term map is keyed by the graded
/// lexicographic monomial order. The derived ordering is arbitrary but
/// total, enabling polynomial-keyed maps.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial { terms }
    }

    pub fn int(n: i64) -> Polynomial {
        Polynomial::constant(q(n))
    }

    pub fn var(s: Symbol) -> Polynomial {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(s), Rational::one());
        Polynomial { terms }
    }

    pub fn monomial(m: Monomial, c: Rational) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (Monomial, Rational)>) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in pairs {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_one() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.terms.keys().map(|m| m.degree_in(s)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for &(v, _) in m.factors() {
                out.insert(v);
            }
        }
        out
    }

    pub fn contains_var(&self, s: Symbol) -> bool {
        self.terms.keys().any(|m| m.degree_in(s) > 0)
    }

    /// Leading term in the graded lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `v^k` as a polynomial in the remaining symbols.
    pub fn coeff_of(&self, v: Symbol, k: u32) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in &self.terms {
            if m.degree_in(v) == k {
                p.add_term(m.without(v), c.clone());
            }
        }
        p
    }

    /// All coefficients with respect to `v`, index = power of `v`.
    pub fn coeffs_in(&self, v: Symbol) -> Vec<Polynomial> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Polynomial::zero(); d + 1];
        for (m, c) in &self.terms {
            let k = m.degree_in(v) as usize;
            out[k].add_term(m.without(v), c.clone());
        }
        out
    }

    /// Rebuild from coefficients with respect to `v`.
    pub fn from_coeffs_in(v: Symbol, coeffs: &[Polynomial]) -> Polynomial {
        let mut p = Polynomial::zero();
        for (k, c) in coeffs.iter().enumerate() {
            let mv = Monomial::power(v, k as u32);
            for (m, q) in &c.terms {
                p.add_term(m.mul(&mv), q.clone());
            }
        }
        p
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, q)| (m.clone(), q * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitute a polynomial for a symbol (Horner scheme in `v`).
    pub fn subst(&self, v: Symbol, value: &Polynomial) -> Polynomial {
        if !self.contains_var(v) {
            return self.clone();
        }
        let coeffs = self.coeffs_in(v);
        let mut acc = Polynomial::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    /// Shift one symbol by an integer: v -> v + offset.
    pub fn shift(&self, v: Symbol, offset: i64) -> Polynomial {
        if offset == 0 {
            return self.clone();
        }
        let repl = &Polynomial::var(v) + &Polynomial::int(offset);
        self.subst(v, &repl)
    }

    /// Shift several symbols at once: v_i -> v_i + s_i.
    pub fn shift_all(&self, shifts: &[(Symbol, i64)]) -> Polynomial {
        let mut p = self.clone();
        for &(v, s) in shifts {
            p = p.shift(v, s);
        }
        p
    }

    pub fn derivative(&self, v: Symbol) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.degree_in(v);
            if e == 0 {
                continue;
            }
            let mut pairs: Vec<(Symbol, u32)> = m.factors().to_vec();
            for p in pairs.iter_mut() {
                if p.0 == v {
                    p.1 -= 1;
                }
            }
            out.add_term(Monomial::from_pairs(pairs), c * q(e as i64));
        }
        out
    }

    /// Evaluate with every symbol bound.
    pub fn eval(&self, bind: &BTreeMap<Symbol, Rational>) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.factors() {
                let x = bind.get(&v)?;
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        Some(acc)
    }

    /// Evaluate the symbols present in the map, keep the rest symbolic.
    pub fn eval_partial(&self, bind: &BTreeMap<Symbol, Rational>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in m.factors() {
                if let Some(x) = bind.get(&v) {
                    for _ in 0..e {
                        t *= x;
                    }
                } else {
                    rest.push((v, e));
                }
            }
            out.add_term(Monomial::from_pairs(rest), t);
        }
        out
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients. Zero polynomial has content zero.
    pub fn content(&self) -> Rational {
        let mut acc = Rational::zero();
        for c in self.terms.values() {
            acc = q_gcd(&acc, c);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    /// `self / content`, with the leading coefficient made positive.
    /// Returns the pair (unit, primitive part) with `unit * pp == self`.
    pub fn primitive(&self) -> (Rational, Polynomial) {
        if self.is_zero() {
            return (Rational::one(), Polynomial::zero());
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        let inv = Rational::one() / c.clone();
        (c, self.scale(&inv))
    }

    /// Exact polynomial division; `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Polynomial) -> Option<Polynomial> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            let inv = Rational::one() / c;
            return Some(self.scale(&inv));
        }
        let mut rem = self.clone();
        let mut quo = Polynomial::zero();
        let (dm, dc) = {
            let (m, c) = d.leading().unwrap();
            (m.clone(), c.clone())
        };
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            let m = rm.try_div(&dm)?;
            let c = rc / dc.clone();
            let t = Polynomial::monomial(m, c);
            quo = &quo + &t;
            rem = &rem - &(&t * d);
        }
        Some(quo)
    }

    pub fn divides(&self, other: &Polynomial) -> bool {
        other.exact_div(self).is_some()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    f.write_str("-")?;
                }
                first = false;
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                write!(f, "{}", abs)?;
            } else {
                let mut lead = true;
                if !abs.is_one() {
                    write!(f, "{}", abs)?;
                    lead = false;
                }
                for &(v, e) in m.factors() {
                    if !lead {
                        f.write_str("*")?;
                    }
                    lead = false;
                    if e == 1 {
                        write!(f, "{}", v)?;
                    } else {
                        write!(f, "{}^{}", v, e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qr;

    fn n() -> Symbol {
        Symbol::shift("n")
    }
    fn k() -> Symbol {
        Symbol::shift("k")
    }

    #[test]
    fn graded_lex_order() {
        // total degree dominates, then earlier symbol with larger exponent wins
        let nk = Monomial::var(n()).mul(&Monomial::var(k()));
        let n2 = Monomial::power(n(), 2);
        let k2 = Monomial::power(k(), 2);
        // canonical symbol order: k < n
        assert!(k2 > nk);
        assert!(nk > n2);
        assert!(Monomial::power(n(), 3) > k2);
    }

    #[test]
    fn arithmetic_and_normalisation() {
        let p = &(&Polynomial::var(n()) + &Polynomial::int(1)) * &(&Polynomial::var(n()) - &Polynomial::int(1));
        let expected = &Polynomial::monomial(Monomial::power(n(), 2), q(1)) + &Polynomial::int(-1);
        assert_eq!(p, expected);
        let z = &p - &p;
        assert!(z.is_zero());
        assert_eq!(z.num_terms(), 0);
    }

    #[test]
    fn subst_and_shift() {
        // (n^2 + k) with n -> n+1 gives n^2 + 2n + 1 + k
        let p = &Polynomial::monomial(Monomial::power(n(), 2), q(1)) + &Polynomial::var(k());
        let s = p.shift(n(), 1);
        let expect = Polynomial::from_terms(vec![
            (Monomial::power(n(), 2), q(1)),
            (Monomial::var(n()), q(2)),
            (Monomial::var(k()), q(1)),
            (Monomial::one(), q(1)),
        ]);
        assert_eq!(s, expect);
    }

    #[test]
    fn content_and_primitive() {
        let p = Polynomial::from_terms(vec![
            (Monomial::var(n()), qr(-4, 3)),
            (Monomial::one(), qr(-2, 9)),
        ]);
        let (u, pp) = p.primitive();
        assert_eq!(u, qr(-2, 9));
        assert_eq!(
            pp,
            Polynomial::from_terms(vec![(Monomial::var(n()), q(6)), (Monomial::one(), q(1))])
        );
        assert_eq!(pp.scale(&u), p);
    }

    #[test]
    fn exact_division() {
        let a = &Polynomial::var(n()) + &Polynomial::int(3);
        let b = &Polynomial::var(n()) - &Polynomial::var(k());
        let prod = &a * &b;
        assert_eq!(prod.exact_div(&a).unwrap(), b);
        assert_eq!(prod.exact_div(&b).unwrap(), a);
        assert!(prod.exact_div(&(&a + &Polynomial::int(1))).is_none());
    }

    #[test]
    fn derivative_in_variable() {
        // d/dn (n^3 + k*n) = 3n^2 + k
        let p = Polynomial::from_terms(vec![
            (Monomial::power(n(), 3), q(1)),
            (Monomial::var(n()).mul(&Monomial::var(k())), q(1)),
        ]);
        let d = p.derivative(n());
        let expect = Polynomial::from_terms(vec![
            (Monomial::power(n(), 2), q(3)),
            (Monomial::var(k()), q(1)),
        ]);
        assert_eq!(d, expect);
    }
}
