//! Symbolic expression trees and their canonical form.
//!
//! Everything the toolkit exchanges between modules and with the user is an
//! [`Expression`]: a tree of rational literals, symbols, arithmetic, and a
//! small set of opaque special-function atoms:
//!
//! * `poch(a,n)` Pochhammer symbols, `fact(n)` factorials, `gamma(a)`;
//! * `prod(body,i,lo,hi)` and `sum(body,i,lo,hi)` with a bound index;
//! * `S(a1,...,ak; n)` nested harmonic sums with nonzero integer word
//!   entries, where the sign of an entry selects an alternating sign and
//!   its absolute value the power;
//! * `HS(a1,...,ak; a; n)` their Hurwitz generalization with offset `a`.
//!
//! Canonicalization rewrites a tree into a reduced fraction of expanded
//! polynomials over its atoms: atoms are canonicalized recursively, mapped
//! to polynomial variables in a structural order, the arithmetic layer is
//! normalized by exact rational-function arithmetic, and the result is read
//! back into a tree whose sums and products are flattened and sorted. Bound
//! indices are renamed level by level (`i1`, `i2`, ...) so alpha-equivalent
//! inputs canonicalize identically. No rewriting crosses an atom boundary:
//! `gamma(a+1)` and `a*gamma(a)` stay distinct here, and any such identity
//! is applied only by explicit operations elsewhere in the toolkit.
//!
//! Structural equality of canonical trees is the toolkit-wide notion of
//! expression equality.

mod parse;
mod print;

pub use parse::{parse, SyntaxError};

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::{
    q, Polynomial, Rational, RationalFunction, Symbol, SymbolKind,
};

/// A symbolic expression. Construct through the helper methods, which
/// canonicalize; pattern-match freely, the variants are the canonical
/// shapes described in the module documentation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Expression {
    Rational(Rational),
    Sym(Symbol),
    Add(Vec<Expression>),
    Mul(Vec<Expression>),
    Pow(Box<Expression>, i64),
    Poch(Box<Expression>, Box<Expression>),
    Factorial(Box<Expression>),
    Gamma(Box<Expression>),
    Product(Binder),
    Sum(Binder),
    HarmonicS(Vec<i64>, Box<Expression>),
    HurwitzS(Vec<i64>, Box<Expression>, Box<Expression>),
}

/// The shared shape of `prod` and `sum`: a body with one bound index
/// ranging from `lo` to `hi` inclusive. The index is bound in `body` only;
/// `lo` and `hi` are evaluated in the enclosing scope.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Binder {
    pub body: Box<Expression>,
    pub index: Symbol,
    pub lo: Box<Expression>,
    pub hi: Box<Expression>,
}

/// A substitution would move a symbol into the scope of a bound index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaptureError {
    /// The bound index that would capture.
    pub index: Symbol,
    /// The symbol being replaced when the capture was detected.
    pub binding: Symbol,
}

impl std::fmt::Display for CaptureError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "substituting {} would capture the bound index {}",
            self.binding, self.index
        )
    }
}

impl std::error::Error for CaptureError {}

impl Expression {
    pub fn int(v: i64) -> Expression {
        Expression::Rational(q(v))
    }

    pub fn rational(v: Rational) -> Expression {
        Expression::Rational(v)
    }

    pub fn sym(s: Symbol) -> Expression {
        Expression::Sym(s)
    }

    pub fn add(terms: Vec<Expression>) -> Expression {
        Expression::Add(terms).canonicalize()
    }

    pub fn mul(factors: Vec<Expression>) -> Expression {
        Expression::Mul(factors).canonicalize()
    }

    pub fn pow(base: Expression, exp: i64) -> Expression {
        Expression::Pow(Box::new(base), exp).canonicalize()
    }

    pub fn div(num: Expression, den: Expression) -> Expression {
        Expression::Mul(vec![num, Expression::Pow(Box::new(den), -1)]).canonicalize()
    }

    pub fn sub(a: Expression, b: Expression) -> Expression {
        Expression::Add(vec![
            a,
            Expression::Mul(vec![Expression::int(-1), b]),
        ])
        .canonicalize()
    }

    pub fn poch(base: Expression, count: Expression) -> Expression {
        Expression::Poch(Box::new(base), Box::new(count)).canonicalize()
    }

    pub fn fact(arg: Expression) -> Expression {
        Expression::Factorial(Box::new(arg)).canonicalize()
    }

    pub fn gamma(arg: Expression) -> Expression {
        Expression::Gamma(Box::new(arg)).canonicalize()
    }

    pub fn product(body: Expression, index: Symbol, lo: Expression, hi: Expression) -> Expression {
        Expression::Product(Binder {
            body: Box::new(body),
            index,
            lo: Box::new(lo),
            hi: Box::new(hi),
        })
        .canonicalize()
    }

    pub fn finite_sum(body: Expression, index: Symbol, lo: Expression, hi: Expression) -> Expression {
        Expression::Sum(Binder {
            body: Box::new(body),
            index,
            lo: Box::new(lo),
            hi: Box::new(hi),
        })
        .canonicalize()
    }

    pub fn harmonic(word: Vec<i64>, arg: Expression) -> Expression {
        assert!(
            !word.is_empty() && word.iter().all(|&a| a != 0),
            "harmonic sum word entries must be nonzero"
        );
        Expression::HarmonicS(word, Box::new(arg)).canonicalize()
    }

    pub fn hurwitz(word: Vec<i64>, offset: Expression, arg: Expression) -> Expression {
        assert!(
            !word.is_empty() && word.iter().all(|&a| a != 0),
            "harmonic sum word entries must be nonzero"
        );
        Expression::HurwitzS(word, Box::new(offset), Box::new(arg)).canonicalize()
    }

    pub fn zero() -> Expression {
        Expression::int(0)
    }

    pub fn one() -> Expression {
        Expression::int(1)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expression::Rational(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expression::Rational(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Expression::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Free symbols: everything except bound product/sum indices.
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expression::Rational(_) => {}
            Expression::Sym(s) => {
                out.insert(*s);
            }
            Expression::Add(xs) | Expression::Mul(xs) => {
                for x in xs {
                    x.collect_free(out);
                }
            }
            Expression::Pow(b, _) => b.collect_free(out),
            Expression::Poch(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Expression::Factorial(x) | Expression::Gamma(x) => x.collect_free(out),
            Expression::Product(b) | Expression::Sum(b) => {
                let mut inner = BTreeSet::new();
                b.body.collect_free(&mut inner);
                inner.remove(&b.index);
                out.extend(inner);
                b.lo.collect_free(out);
                b.hi.collect_free(out);
            }
            Expression::HarmonicS(_, n) => n.collect_free(out),
            Expression::HurwitzS(_, a, n) => {
                a.collect_free(out);
                n.collect_free(out);
            }
        }
    }

    /// Rewrite into the canonical form described in the module docs.
    /// Idempotent; structural equality of the results is expression
    /// equality.
    pub fn canonicalize(&self) -> Expression {
        canon_at_depth(self, 1)
    }

    /// Simultaneous substitution of symbols by expressions, followed by
    /// canonicalization. Bound indices shadow bindings of the same symbol.
    pub fn substitute(
        &self,
        bindings: &BTreeMap<Symbol, Expression>,
    ) -> Result<Expression, CaptureError> {
        Ok(subst_raw(self, bindings)?.canonicalize())
    }

    /// Exact evaluation over the rationals. `None` when a leaf is unbound,
    /// a special function needs a non-rational value (like `gamma` away
    /// from the positive integers), a pole is hit, or an iteration bound
    /// would overflow.
    pub fn eval_rational(&self, bindings: &BTreeMap<Symbol, Rational>) -> Option<Rational> {
        eval_rat(self, bindings)
    }

    /// View the tree as a rational function when every atom is a plain
    /// symbol; `None` as soon as a special-function atom appears.
    pub fn to_rational_function(&self) -> Option<RationalFunction> {
        to_ratfun_symbols_only(&canon_at_depth(self, 1))
    }

    /// Embed a rational function as a canonical expression tree.
    pub fn from_rational_function(r: &RationalFunction) -> Expression {
        rebuild(r, &|s| Expression::Sym(s))
    }

    /// Embed a polynomial as a canonical expression tree.
    pub fn from_polynomial(p: &Polynomial) -> Expression {
        Expression::from_rational_function(&RationalFunction::from_poly(p.clone()))
    }
}

impl std::fmt::Display for Expression {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print::print(self))
    }
}

// ---------------------------------------------------------------------------
// canonicalization
// ---------------------------------------------------------------------------

fn atom_symbol(k: usize) -> Symbol {
    Symbol::new(&format!("#{k}"), SymbolKind::Shift)
}


fn canon_at_depth(e: &Expression, depth: usize) -> Expression {
    let prepared = prepare(e, depth);
    let mut atoms = BTreeSet::new();
    collect_atoms(&prepared, &mut atoms);
    let list: Vec<Expression> = atoms.into_iter().collect();
    let table: BTreeMap<Expression, Symbol> = list
        .iter()
        .enumerate()
        .map(|(k, a)| (a.clone(), atom_symbol(k)))
        .collect();
    let r = to_ratfun_with(&prepared, &table);
    let lookup = |s: Symbol| -> Expression {
        let name = s.name();
        let k: usize = name[1..].parse().expect("atom symbol name");
        list[k].clone()
    };
    rebuild(&r, &lookup)
}

/// Canonicalize every atom in place, leaving the arithmetic layer above
/// them untouched. Binder indices are renamed here.
fn prepare(e: &Expression, depth: usize) -> Expression {
    match e {
        Expression::Rational(_) | Expression::Sym(_) => e.clone(),
        Expression::Add(xs) => {
            Expression::Add(xs.iter().map(|x| prepare(x, depth)).collect())
        }
        Expression::Mul(xs) => {
            Expression::Mul(xs.iter().map(|x| prepare(x, depth)).collect())
        }
        Expression::Pow(b, k) => Expression::Pow(Box::new(prepare(b, depth)), *k),
        Expression::Poch(a, b) => Expression::Poch(
            Box::new(canon_at_depth(a, depth)),
            Box::new(canon_at_depth(b, depth)),
        ),
        Expression::Factorial(x) => {
            Expression::Factorial(Box::new(canon_at_depth(x, depth)))
        }
        Expression::Gamma(x) => Expression::Gamma(Box::new(canon_at_depth(x, depth))),
        Expression::Product(b) => Expression::Product(canon_binder(b, depth)),
        Expression::Sum(b) => Expression::Sum(canon_binder(b, depth)),
        Expression::HarmonicS(w, n) => {
            Expression::HarmonicS(w.clone(), Box::new(canon_at_depth(n, depth)))
        }
        Expression::HurwitzS(w, a, n) => Expression::HurwitzS(
            w.clone(),
            Box::new(canon_at_depth(a, depth)),
            Box::new(canon_at_depth(n, depth)),
        ),
    }
}

fn canon_binder(b: &Binder, depth: usize) -> Binder {
    let lo = canon_at_depth(&b.lo, depth);
    let hi = canon_at_depth(&b.hi, depth);
    let mut avoid = b.body.free_symbols();
    avoid.remove(&b.index);
    avoid.extend(lo.free_symbols());
    avoid.extend(hi.free_symbols());
    let mut k = depth;
    let index = loop {
        let cand = Symbol::new(&format!("i{k}"), SymbolKind::Shift);
        if !avoid.contains(&cand) {
            break cand;
        }
        k += 1;
    };
    let body = if index == b.index {
        (*b.body).clone()
    } else {
        rename_free(&b.body, b.index, index)
    };
    Binder {
        body: Box::new(canon_at_depth(&body, depth + 1)),
        index,
        lo: Box::new(lo),
        hi: Box::new(hi),
    }
}

/// Rename free occurrences of `from` to `to`. When descending past an
/// inner binder that already uses `to` as its index while `from` occurs
/// free below it, the inner index is first moved to a fresh temporary so
/// the renamed occurrences cannot be captured. Temporaries never survive:
/// canonicalization replaces every binder index afterwards.
fn rename_free(e: &Expression, from: Symbol, to: Symbol) -> Expression {
    use std::sync::atomic::{AtomicU32, Ordering};
    static TEMP: AtomicU32 = AtomicU32::new(0);

    match e {
        Expression::Rational(_) => e.clone(),
        Expression::Sym(s) => Expression::Sym(if *s == from { to } else { *s }),
        Expression::Add(xs) => {
            Expression::Add(xs.iter().map(|x| rename_free(x, from, to)).collect())
        }
        Expression::Mul(xs) => {
            Expression::Mul(xs.iter().map(|x| rename_free(x, from, to)).collect())
        }
        Expression::Pow(b, k) => Expression::Pow(Box::new(rename_free(b, from, to)), *k),
        Expression::Poch(a, b) => Expression::Poch(
            Box::new(rename_free(a, from, to)),
            Box::new(rename_free(b, from, to)),
        ),
        Expression::Factorial(x) => {
            Expression::Factorial(Box::new(rename_free(x, from, to)))
        }
        Expression::Gamma(x) => Expression::Gamma(Box::new(rename_free(x, from, to))),
        Expression::Product(b) | Expression::Sum(b) => {
            let (index, body) = if b.index == from {
                (b.index, (*b.body).clone())
            } else if b.index == to && b.body.free_symbols().contains(&from) {
                let fresh = Symbol::new(
                    &format!("#t{}", TEMP.fetch_add(1, Ordering::Relaxed)),
                    SymbolKind::Shift,
                );
                let moved = rename_free(&b.body, b.index, fresh);
                (fresh, rename_free(&moved, from, to))
            } else {
                (b.index, rename_free(&b.body, from, to))
            };
            let nb = Binder {
                body: Box::new(body),
                index,
                lo: Box::new(rename_free(&b.lo, from, to)),
                hi: Box::new(rename_free(&b.hi, from, to)),
            };
            match e {
                Expression::Product(_) => Expression::Product(nb),
                _ => Expression::Sum(nb),
            }
        }
        Expression::HarmonicS(w, n) => {
            Expression::HarmonicS(w.clone(), Box::new(rename_free(n, from, to)))
        }
        Expression::HurwitzS(w, a, n) => Expression::HurwitzS(
            w.clone(),
            Box::new(rename_free(a, from, to)),
            Box::new(rename_free(n, from, to)),
        ),
    }
}

fn collect_atoms(e: &Expression, out: &mut BTreeSet<Expression>) {
    match e {
        Expression::Rational(_) => {}
        Expression::Add(xs) | Expression::Mul(xs) => {
            for x in xs {
                collect_atoms(x, out);
            }
        }
        Expression::Pow(b, _) => collect_atoms(b, out),
        _ => {
            out.insert(e.clone());
        }
    }
}

fn to_ratfun_with(e: &Expression, table: &BTreeMap<Expression, Symbol>) -> RationalFunction {
    match e {
        Expression::Rational(r) => RationalFunction::constant(r.clone()),
        Expression::Add(xs) => {
            let mut acc = RationalFunction::zero();
            for x in xs {
                acc = &acc + &to_ratfun_with(x, table);
            }
            acc
        }
        Expression::Mul(xs) => {
            let mut acc = RationalFunction::one();
            for x in xs {
                acc = &acc * &to_ratfun_with(x, table);
            }
            acc
        }
        Expression::Pow(b, k) => {
            let base = to_ratfun_with(b, table);
            let k32: i32 = (*k).try_into().expect("power exponent out of range");
            base.pow(k32)
        }
        atom => RationalFunction::var(*table.get(atom).expect("atom missing from table")),
    }
}

fn to_ratfun_symbols_only(e: &Expression) -> Option<RationalFunction> {
    match e {
        Expression::Rational(r) => Some(RationalFunction::constant(r.clone())),
        Expression::Sym(s) => Some(RationalFunction::var(*s)),
        Expression::Add(xs) => {
            let mut acc = RationalFunction::zero();
            for x in xs {
                acc = &acc + &to_ratfun_symbols_only(x)?;
            }
            Some(acc)
        }
        Expression::Mul(xs) => {
            let mut acc = RationalFunction::one();
            for x in xs {
                acc = &acc * &to_ratfun_symbols_only(x)?;
            }
            Some(acc)
        }
        Expression::Pow(b, k) => {
            let base = to_ratfun_symbols_only(b)?;
            let k32: i32 = (*k).try_into().ok()?;
            if base.is_zero() && k32 < 0 {
                return None;
            }
            Some(base.pow(k32))
        }
        _ => None,
    }
}

/// Read a reduced rational function back into a canonical tree. `lookup`
/// maps each polynomial variable to the expression it stands for.
fn rebuild(r: &RationalFunction, lookup: &dyn Fn(Symbol) -> Expression) -> Expression {
    if r.is_zero() {
        return Expression::int(0);
    }
    let num = r.num();
    let den = r.den();

    let num_terms = poly_term_exprs(num, lookup);
    let num_expr = if num_terms.len() == 1 {
        num_terms.into_iter().next().unwrap()
    } else {
        Expression::Add(num_terms)
    };

    if den.is_one() {
        return num_expr;
    }

    let den_factors: Vec<Expression> = if den.num_terms() == 1 {
        let (mono, coeff) = den.leading().expect("nonzero denominator");
        debug_assert!(coeff.is_one(), "primitive single-term denominator");
        mono.factors()
            .iter()
            .map(|&(s, e)| Expression::Pow(Box::new(lookup(s)), -(e as i64)))
            .collect()
    } else {
        let terms = poly_term_exprs(den, lookup);
        let den_expr = if terms.len() == 1 {
            terms.into_iter().next().unwrap()
        } else {
            Expression::Add(terms)
        };
        vec![Expression::Pow(Box::new(den_expr), -1)]
    };

    let mut factors = match num_expr {
        Expression::Mul(fs) => fs,
        other => vec![other],
    };
    factors.extend(den_factors);
    if factors.len() == 1 {
        factors.into_iter().next().unwrap()
    } else {
        Expression::Mul(factors)
    }
}

/// One expression per polynomial term, in descending monomial order.
fn poly_term_exprs(p: &Polynomial, lookup: &dyn Fn(Symbol) -> Expression) -> Vec<Expression> {
    let mut terms: Vec<_> = p.terms().collect();
    terms.reverse();
    terms
        .into_iter()
        .map(|(mono, coeff)| {
            let mut factors: Vec<Expression> = Vec::new();
            if !coeff.is_one() || mono.is_one() {
                factors.push(Expression::Rational(coeff.clone()));
            }
            for &(s, e) in mono.factors() {
                let base = lookup(s);
                factors.push(if e == 1 {
                    base
                } else {
                    Expression::Pow(Box::new(base), e as i64)
                });
            }
            if factors.len() == 1 {
                factors.into_iter().next().unwrap()
            } else {
                Expression::Mul(factors)
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// substitution
// ---------------------------------------------------------------------------

fn subst_raw(
    e: &Expression,
    map: &BTreeMap<Symbol, Expression>,
) -> Result<Expression, CaptureError> {
    if map.is_empty() {
        return Ok(e.clone());
    }
    Ok(match e {
        Expression::Rational(_) => e.clone(),
        Expression::Sym(s) => match map.get(s) {
            Some(v) => v.clone(),
            None => e.clone(),
        },
        Expression::Add(xs) => Expression::Add(
            xs.iter().map(|x| subst_raw(x, map)).collect::<Result<_, _>>()?,
        ),
        Expression::Mul(xs) => Expression::Mul(
            xs.iter().map(|x| subst_raw(x, map)).collect::<Result<_, _>>()?,
        ),
        Expression::Pow(b, k) => Expression::Pow(Box::new(subst_raw(b, map)?), *k),
        Expression::Poch(a, b) => Expression::Poch(
            Box::new(subst_raw(a, map)?),
            Box::new(subst_raw(b, map)?),
        ),
        Expression::Factorial(x) => Expression::Factorial(Box::new(subst_raw(x, map)?)),
        Expression::Gamma(x) => Expression::Gamma(Box::new(subst_raw(x, map)?)),
        Expression::Product(b) | Expression::Sum(b) => {
            let body_free = b.body.free_symbols();
            let mut inner = map.clone();
            inner.remove(&b.index);
            for (key, value) in &inner {
                if body_free.contains(key) && value.free_symbols().contains(&b.index) {
                    return Err(CaptureError {
                        index: b.index,
                        binding: *key,
                    });
                }
            }
            let nb = Binder {
                body: Box::new(subst_raw(&b.body, &inner)?),
                index: b.index,
                lo: Box::new(subst_raw(&b.lo, map)?),
                hi: Box::new(subst_raw(&b.hi, map)?),
            };
            match e {
                Expression::Product(_) => Expression::Product(nb),
                _ => Expression::Sum(nb),
            }
        }
        Expression::HarmonicS(w, n) => {
            Expression::HarmonicS(w.clone(), Box::new(subst_raw(n, map)?))
        }
        Expression::HurwitzS(w, a, n) => Expression::HurwitzS(
            w.clone(),
            Box::new(subst_raw(a, map)?),
            Box::new(subst_raw(n, map)?),
        ),
    })
}

// ---------------------------------------------------------------------------
// exact evaluation
// ---------------------------------------------------------------------------

const EVAL_ITERATION_CAP: i64 = 4_000_000;

fn eval_rat(e: &Expression, env: &BTreeMap<Symbol, Rational>) -> Option<Rational> {
    match e {
        Expression::Rational(r) => Some(r.clone()),
        Expression::Sym(s) => env.get(s).cloned(),
        Expression::Add(xs) => {
            let mut acc = Rational::zero();
            for x in xs {
                acc += eval_rat(x, env)?;
            }
            Some(acc)
        }
        Expression::Mul(xs) => {
            let mut acc = Rational::one();
            for x in xs {
                acc *= eval_rat(x, env)?;
            }
            Some(acc)
        }
        Expression::Pow(b, k) => {
            let base = eval_rat(b, env)?;
            if *k < 0 && base.is_zero() {
                return None;
            }
            let abs = base.pow((*k).unsigned_abs().try_into().ok()?);
            Some(if *k < 0 { abs.recip() } else { abs })
        }
        Expression::Poch(a, c) => {
            let a = eval_rat(a, env)?;
            let count = as_i64(&eval_rat(c, env)?)?;
            pochhammer_rational(&a, count)
        }
        Expression::Factorial(x) => {
            let n = as_i64(&eval_rat(x, env)?)?;
            if !(0..=EVAL_ITERATION_CAP).contains(&n) {
                return None;
            }
            let mut acc = Rational::one();
            for j in 2..=n {
                acc *= q(j);
            }
            Some(acc)
        }
        Expression::Gamma(x) => {
            let n = as_i64(&eval_rat(x, env)?)?;
            if !(1..=EVAL_ITERATION_CAP).contains(&n) {
                return None;
            }
            let mut acc = Rational::one();
            for j in 2..n {
                acc *= q(j);
            }
            Some(acc)
        }
        Expression::Product(b) | Expression::Sum(b) => {
            let lo = as_i64(&eval_rat(&b.lo, env)?)?;
            let hi = as_i64(&eval_rat(&b.hi, env)?)?;
            let is_product = matches!(e, Expression::Product(_));
            let mut acc = if is_product { Rational::one() } else { Rational::zero() };
            if hi >= lo {
                if hi - lo > EVAL_ITERATION_CAP {
                    return None;
                }
                let mut inner = env.clone();
                for i in lo..=hi {
                    inner.insert(b.index, q(i));
                    let v = eval_rat(&b.body, &inner)?;
                    if is_product {
                        acc *= v;
                    } else {
                        acc += v;
                    }
                }
            }
            Some(acc)
        }
        Expression::HarmonicS(word, n) => {
            let n = as_i64(&eval_rat(n, env)?)?;
            if !(0..=EVAL_ITERATION_CAP).contains(&n) {
                return None;
            }
            Some(harmonic_value(word, n))
        }
        Expression::HurwitzS(word, a, n) => {
            let a = eval_rat(a, env)?;
            let n = as_i64(&eval_rat(n, env)?)?;
            if !(0..=EVAL_ITERATION_CAP).contains(&n) {
                return None;
            }
            hurwitz_value(word, &a, n)
        }
    }
}

fn as_i64(r: &Rational) -> Option<i64> {
    if !r.is_integer() {
        return None;
    }
    r.numer().to_i64()
}

/// (a)_c for integer c: the rising factorial for c >= 0, and
/// (a)_{-m} = 1/((a-1)(a-2)...(a-m)) for c = -m < 0. `None` on a pole.
pub fn pochhammer_rational(a: &Rational, count: i64) -> Option<Rational> {
    if count >= 0 {
        if count > EVAL_ITERATION_CAP {
            return None;
        }
        let mut acc = Rational::one();
        for j in 0..count {
            acc *= a + q(j);
        }
        Some(acc)
    } else {
        let m = -count;
        if m > EVAL_ITERATION_CAP {
            return None;
        }
        let mut acc = Rational::one();
        for j in 1..=m {
            let f = a - q(j);
            if f.is_zero() {
                return None;
            }
            acc *= f;
        }
        Some(acc.recip())
    }
}

/// S_{b,word}(n) = sum_{k=1}^{n} sign(b)^k / k^{|b|} * S_{word}(k), with
/// the empty-word sum equal to 1.
pub fn harmonic_value(word: &[i64], n: i64) -> Rational {
    match word.split_first() {
        None => Rational::one(),
        Some((&b, rest)) => {
            let mut acc = Rational::zero();
            let p = b.unsigned_abs() as u32;
            for k in 1..=n {
                let mut term = q(k).pow(p as i32).recip();
                if b < 0 && k % 2 == 1 {
                    term = -term;
                }
                acc += term * harmonic_value(rest, k);
            }
            acc
        }
    }
}

/// S_{c,word}(a; n) = sum_{k=1}^{n} sign(c)^k / (a+k)^{|c|} * S_{word}(a; k).
/// `None` when the offset puts a pole inside the range.
pub fn hurwitz_value(word: &[i64], a: &Rational, n: i64) -> Option<Rational> {
    match word.split_first() {
        None => Some(Rational::one()),
        Some((&c, rest)) => {
            let mut acc = Rational::zero();
            let p = c.unsigned_abs() as u32;
            for k in 1..=n {
                let base = a + q(k);
                if base.is_zero() {
                    return None;
                }
                let mut term = base.pow(p as i32).recip();
                if c < 0 && k % 2 == 1 {
                    term = -term;
                }
                acc += term * hurwitz_value(rest, a, k)?;
            }
            Some(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qr;

    fn p(text: &str) -> Expression {
        parse(text).expect("parses")
    }

    #[test]
    fn canonical_orders_and_flattens() {
        let e = p("y*2 + x");
        assert_eq!(print::print(&e), "x + 2*y");
        let f = p("x + y + y");
        assert_eq!(print::print(&f), "x + 2*y");
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let samples = [
            "poch(a,n)*poch(b,n)/(poch(c,n)*fact(n))",
            "(x+1)*(x-1)",
            "prod((2+B-C-(3+B)*j+j^2), j, 1, n)",
            "1/(n*(n+1)) + S(1;n)^2",
            "sum(prod(k+m, m, 1, j), j, 1, n)",
        ];
        for s in samples {
            let e = p(s);
            assert_eq!(e, e.canonicalize(), "not idempotent for {s}");
        }
    }

    #[test]
    fn arithmetic_equalities_canonicalize_together() {
        assert_eq!(p("(x+1)*(x-1)"), p("x^2-1"));
        assert_eq!(p("x/(x*y)"), p("1/y"));
        assert_eq!(p("poch(a,n)+poch(a,n)"), p("2*poch(a,n)"));
        assert_ne!(p("gamma(a+1)"), p("a*gamma(a)"));
    }

    #[test]
    fn alpha_equivalence_of_bound_indices() {
        assert_eq!(p("prod(j^2+1, j, 1, n)"), p("prod(m^2+1, m, 1, n)"));
        assert_eq!(
            p("sum(sum(a+b, b, 1, a), a, 1, n)"),
            p("sum(sum(s+t, t, 1, s), s, 1, n)")
        );
    }

    #[test]
    fn substitute_and_capture() {
        let a = Symbol::param("a");
        let j = Symbol::shift("jcap");
        let e = p("prod(a + jcap, jcap, 1, n)");
        let mut ok = BTreeMap::new();
        ok.insert(a, p("b+1"));
        let done = e.substitute(&ok).unwrap();
        assert_eq!(done, p("prod(b + 1 + jcap, jcap, 1, n)"));

        let mut bad = BTreeMap::new();
        bad.insert(a, Expression::Sym(Symbol::new("i1", SymbolKind::Shift)));
        let err = e.substitute(&bad).unwrap_err();
        assert_eq!(err.binding, a);
        let _ = j;
    }

    #[test]
    fn empty_substitution_is_identity() {
        let e = p("poch(a,n)/fact(n) + S(1,2;n)");
        assert_eq!(e.substitute(&BTreeMap::new()).unwrap(), e);
    }

    #[test]
    fn substitution_commutes_with_evaluation() {
        let a = Symbol::param("a");
        let n = Symbol::shift("n");
        let e = p("poch(a,n)*S(1;n) + a^2/(a+1)");
        let mut bind = BTreeMap::new();
        bind.insert(a, p("3/2"));
        let substituted = e.substitute(&bind).unwrap();
        for nv in 0..6 {
            let mut env = BTreeMap::new();
            env.insert(n, q(nv));
            let direct = substituted.eval_rational(&env).unwrap();
            env.insert(a, qr(3, 2));
            let late = e.eval_rational(&env).unwrap();
            assert_eq!(direct, late);
        }
    }

    #[test]
    fn rational_function_round_trip() {
        let e = p("(n^2 - 1)/(n + 1)");
        let r = e.to_rational_function().unwrap();
        let n = Symbol::lookup("n").unwrap();
        assert_eq!(r, {
            let num = &Polynomial::var(n) - &Polynomial::one();
            RationalFunction::from_poly(num)
        });
        assert_eq!(Expression::from_rational_function(&r), p("n - 1"));
        assert!(p("S(1;n)").to_rational_function().is_none());
    }

    #[test]
    fn evaluation_of_special_atoms() {
        let env = BTreeMap::new();
        assert_eq!(p("fact(5)").eval_rational(&env).unwrap(), q(120));
        assert_eq!(p("gamma(6)").eval_rational(&env).unwrap(), q(120));
        assert_eq!(p("poch(3, 4)").eval_rational(&env).unwrap(), q(360));
        assert_eq!(
            p("poch(1/2, 2)").eval_rational(&env).unwrap(),
            qr(3, 4)
        );
        // (a)_{-2} = 1/((a-1)(a-2)) at a = 5: 1/12
        assert_eq!(p("poch(5, -2)").eval_rational(&env).unwrap(), qr(1, 12));
        assert_eq!(p("S(1; 4)").eval_rational(&env).unwrap(), qr(25, 12));
        // S_{-2}(3) = -1 + 1/4 - 1/9
        assert_eq!(p("S(-2; 3)").eval_rational(&env).unwrap(), qr(-31, 36));
        // S_{1,1}(3) = 1*S_1(1) + (1/2)*S_1(2) + (1/3)*S_1(3)
        assert_eq!(p("S(1,1; 3)").eval_rational(&env).unwrap(), qr(85, 36));
        assert_eq!(
            p("prod(j, j, 1, 5)").eval_rational(&env).unwrap(),
            q(120)
        );
        assert_eq!(
            p("sum(j^2, j, 1, 4)").eval_rational(&env).unwrap(),
            q(30)
        );
    }

    #[test]
    fn hurwitz_depth_one_matches_shift_identity() {
        // S_l(a;n) = S_l(a+n) - S_l(a) for integer offsets
        let env = BTreeMap::new();
        for l in 1..=3 {
            for a in 0..4 {
                for n in 0..5 {
                    let lhs = hurwitz_value(&[l], &q(a), n).unwrap();
                    let rhs = harmonic_value(&[l], a + n) - harmonic_value(&[l], a);
                    assert_eq!(lhs, rhs, "l={l} a={a} n={n}");
                }
            }
        }
        // S_1(2;3) = 1/3 + 1/4 + 1/5
        assert_eq!(p("HS(1; 2; 3)").eval_rational(&env).unwrap(), qr(47, 60));
    }

    #[test]
    fn hurwitz_rational_offset() {
        // S_1(1/2; 2) = 1/(3/2) + 1/(5/2) = 2/3 + 2/5 = 16/15
        assert_eq!(hurwitz_value(&[1], &qr(1, 2), 2).unwrap(), qr(16, 15));
        // pole at a = -1, k = 1
        assert!(hurwitz_value(&[1], &q(-1), 2).is_none());
    }

    #[test]
    fn binder_bounds_stay_outside_scope() {
        let e = p("prod(j + n, j, 1, n)");
        let free = e.free_symbols();
        assert!(free.contains(&Symbol::lookup("n").unwrap()));
        assert_eq!(free.len(), 1);
    }
}
