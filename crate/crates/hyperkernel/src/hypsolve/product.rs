//! Nested-product solutions of first-order recurrence systems.
//!
//! Solving proceeds in three stages:
//!
//! - [`check_compatibility`] tests the mixed-shift identity
//!   R_i(..., n_j + 1, ...) R_j(n) = R_j(..., n_i + 1, ...) R_i(n) for every
//!   pair i < j, returning the offending pair and the nonzero difference
//!   when it fails.
//! - [`compute_lambdas`] picks the product lower bounds: one plus the
//!   largest integer root any numerator or denominator factor has in the
//!   relevant variable. Factors whose roots cannot be decided exactly fall
//!   back to a bounded grid scan, and the result is flagged as scanned.
//! - [`solve_first_order_system`] freezes the leading coordinates of each
//!   ratio at their lower bounds and shifts the running coordinate down by
//!   one, producing one multiplicand per nesting level.
//!
//! [`to_pochhammer`] then rewrites each level's multiplicand as Pochhammer
//! symbols and factorials where linear factors permit, merging across
//! levels (count addition, unit-absorbing reflection, and Gauss
//! duplication) so that standard series come out in their catalog shape.
//! Irreducible pieces stay behind as explicit finite products.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::Signed;

use crate::algebra::{
    factor_lin_quad, integer_roots, q, IntegerRoots, Polynomial, Rational, RationalFunction,
    Symbol,
};
use crate::expr::{Binder, Expression};

use super::HypSystem;

/// Default upper corner for the grid scan used when exact root analysis
/// cannot certify the lower bounds.
pub const DEFAULT_SCAN_BOUND: i64 = 50;

/// Witness of a failed compatibility check: the pair of ratios and the
/// nonzero difference of the two mixed-shift products.
#[derive(Clone, Debug)]
pub struct Incompatibility {
    pub i: usize,
    pub j: usize,
    pub difference: RationalFunction,
}

impl std::fmt::Display for Incompatibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ratios {} and {} violate the compatibility identity; difference {}",
            self.i, self.j, self.difference
        )
    }
}

/// Verify R_i(..., n_j+1, ...) / R_i = R_j(..., n_i+1, ...) / R_j for all
/// i < j, as exact rational-function identities. Arity one is vacuous.
pub fn check_compatibility(sys: &HypSystem) -> Result<(), Incompatibility> {
    let vars = sys.vars();
    for i in 0..sys.arity() {
        for j in (i + 1)..sys.arity() {
            let lhs = &sys.ratio(i).shift(vars[j], 1) * sys.ratio(j);
            let rhs = &sys.ratio(j).shift(vars[i], 1) * sys.ratio(i);
            if lhs != rhs {
                return Err(Incompatibility {
                    i,
                    j,
                    difference: &lhs - &rhs,
                });
            }
        }
    }
    Ok(())
}

/// How the product lower bounds were certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaCertificate {
    /// Every relevant factor was decided by exact integer-root analysis.
    Exact,
    /// At least one factor was certified only on the scan grid; zeros
    /// beyond the scan bound cannot be excluded.
    Scanned,
}

/// Product lower bounds with their certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lambdas {
    pub values: Vec<i64>,
    pub certificate: LambdaCertificate,
}

#[derive(Clone, Debug)]
pub enum SolveError {
    Incompatible(Incompatibility),
    UndecidableLambda,
}

impl std::fmt::Display for SolveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveError::Incompatible(w) => write!(f, "incompatible system: {w}"),
            SolveError::UndecidableLambda => {
                write!(f, "no product lower bound could be certified within the scan bound")
            }
        }
    }
}

impl std::error::Error for SolveError {}

/// Choose lower bounds so every numerator and denominator stays nonzero
/// on the domain n_i >= lambda_i. Factors containing free parameters are
/// generically nonzero at integer points and impose no constraint.
pub fn compute_lambdas(sys: &HypSystem, scan_bound: i64) -> Result<Lambdas, SolveError> {
    assert!(scan_bound >= 0, "scan bound must be nonnegative");
    let vars = sys.vars();
    let position: BTreeMap<Symbol, usize> =
        vars.iter().enumerate().map(|(k, v)| (*v, k)).collect();
    let mut lambda = vec![0i64; sys.arity()];
    let mut scan_targets: Vec<Polynomial> = Vec::new();

    for r in sys.ratios() {
        for poly in [r.num(), r.den()] {
            let (_, factors) = crate::algebra::full_factor(poly);
            for (f, _) in factors {
                let fvars = f.vars();
                let idx: Vec<Symbol> =
                    fvars.iter().copied().filter(|s| position.contains_key(s)).collect();
                if idx.is_empty() {
                    continue;
                }
                let has_params = fvars.iter().any(|s| !position.contains_key(s));
                if idx.len() == 1 {
                    let v = idx[0];
                    match integer_roots(&f, v) {
                        IntegerRoots::Exact(roots) => {
                            for root in roots {
                                let slot = &mut lambda[position[&v]];
                                *slot = (*slot).max(root + 1).max(0);
                            }
                        }
                        IntegerRoots::Parametric { integers, .. } => {
                            for root in integers {
                                let slot = &mut lambda[position[&v]];
                                *slot = (*slot).max(root + 1).max(0);
                            }
                        }
                        IntegerRoots::Undecidable => {
                            if has_params {
                                continue;
                            }
                            scan_targets.push(f);
                        }
                    }
                } else if !has_params {
                    scan_targets.push(f);
                }
            }
        }
    }

    if scan_targets.is_empty() {
        return Ok(Lambdas {
            values: lambda,
            certificate: LambdaCertificate::Exact,
        });
    }

    for f in &scan_targets {
        let fidx: Vec<Symbol> = f.vars().into_iter().collect();
        let mut chosen = None;
        'corner: for v in 0..=scan_bound {
            let lows: Vec<i64> = fidx
                .iter()
                .map(|s| lambda[position[s]].max(v))
                .collect();
            if lows.iter().any(|lo| *lo > scan_bound) {
                break;
            }
            let mut point: Vec<i64> = lows.clone();
            loop {
                let bind: BTreeMap<Symbol, Rational> = fidx
                    .iter()
                    .copied()
                    .zip(point.iter().map(|k| q(*k)))
                    .collect();
                let value = f.eval(&bind).expect("scan factor is closed over its variables");
                if value == q(0) {
                    continue 'corner;
                }
                let mut axis = 0;
                loop {
                    if axis == point.len() {
                        chosen = Some(v);
                        break 'corner;
                    }
                    point[axis] += 1;
                    if point[axis] <= scan_bound {
                        break;
                    }
                    point[axis] = lows[axis];
                    axis += 1;
                }
            }
        }
        match chosen {
            Some(v) => {
                for s in &fidx {
                    let slot = &mut lambda[position[s]];
                    *slot = (*slot).max(v);
                }
            }
            None => return Err(SolveError::UndecidableLambda),
        }
    }

    Ok(Lambdas {
        values: lambda,
        certificate: LambdaCertificate::Scanned,
    })
}

/// The symbol standing for the seed value A(lambda_1, ..., lambda_r) in a
/// freshly solved system.
pub fn seed_symbol() -> Symbol {
    Symbol::param("A0")
}

/// A sequence written as `constant * prod_i prod_{k=lambda_i+1}^{n_i}
/// h_i(k, n_{i+1}, ..., n_r)`, with one multiplicand per nesting level.
#[derive(Clone, Debug)]
pub struct ProductSolution {
    vars: Vec<Symbol>,
    lambdas: Vec<i64>,
    constant: Expression,
    multiplicands: Vec<RationalFunction>,
    certificate: LambdaCertificate,
}

impl ProductSolution {
    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[Symbol] {
        &self.vars
    }

    pub fn lambdas(&self) -> &[i64] {
        &self.lambdas
    }

    /// The seed value A(lambda), symbolic unless replaced.
    pub fn constant(&self) -> &Expression {
        &self.constant
    }

    /// Multiplicand of nesting level i, a rational function in the level's
    /// own variable (playing the running index) and the later variables.
    pub fn multiplicands(&self) -> &[RationalFunction] {
        &self.multiplicands
    }

    pub fn certificate(&self) -> LambdaCertificate {
        self.certificate
    }

    /// Replace the symbolic seed value.
    pub fn with_constant(mut self, constant: Expression) -> ProductSolution {
        self.constant = constant;
        self
    }

    /// Exact evaluation of the nested product at an integer point with the
    /// given parameter bindings (which must also cover whatever the
    /// constant needs). None below the lower bounds or on a pole.
    pub fn value_at(
        &self,
        point: &[i64],
        bind: &BTreeMap<Symbol, Rational>,
    ) -> Option<Rational> {
        assert_eq!(point.len(), self.arity(), "point arity mismatch");
        if point.iter().zip(&self.lambdas).any(|(p, l)| p < l) {
            return None;
        }
        let mut acc = self.constant.eval_rational(bind)?;
        for i in 0..self.arity() {
            let mut env = bind.clone();
            for j in (i + 1)..self.arity() {
                env.insert(self.vars[j], q(point[j]));
            }
            for k in (self.lambdas[i] + 1)..=point[i] {
                env.insert(self.vars[i], q(k));
                acc *= self.multiplicands[i].eval(&env)?;
            }
        }
        Some(acc)
    }

    /// The solution as an expression tree of nested finite products.
    pub fn to_expression(&self) -> Expression {
        let mut factors = vec![self.constant.clone()];
        for i in 0..self.arity() {
            if self.multiplicands[i].is_one() {
                continue;
            }
            let upper = self.vars[i];
            let index = fresh_bound(&self.multiplicands[i].vars(), i);
            let renamed = self
                .multiplicands[i]
                .subst(upper, &RationalFunction::from_poly(Polynomial::var(index)));
            factors.push(Expression::Product(Binder {
                body: Box::new(Expression::from_rational_function(&renamed)),
                index,
                lo: Box::new(Expression::int(self.lambdas[i] + 1)),
                hi: Box::new(Expression::Sym(upper)),
            }));
        }
        Expression::mul(factors).canonicalize()
    }
}

fn fresh_bound(avoid: &std::collections::BTreeSet<Symbol>, level: usize) -> Symbol {
    let avoid_names: Vec<&str> = avoid.iter().map(|s| s.name()).collect();
    let preferred = ["i", "j", "k", "l"];
    if let Some(&name) = preferred.get(level) {
        if !avoid_names.contains(&name) {
            return Symbol::shift(name);
        }
    }
    let mut k = level;
    loop {
        let name = format!("i{k}");
        if !avoid_names.iter().any(|n| *n == name) {
            return Symbol::new(&name, crate::algebra::SymbolKind::Shift);
        }
        k += 1;
    }
}

/// Solve a compatible system into nested-product form. Level i freezes the
/// earlier coordinates at their lower bounds and shifts its own coordinate
/// down by one, so that h_i(k, ...) = R_i(lambda_1, ..., k-1, ...).
pub fn solve_first_order_system(sys: &HypSystem) -> Result<ProductSolution, SolveError> {
    check_compatibility(sys).map_err(SolveError::Incompatible)?;
    let lam = compute_lambdas(sys, DEFAULT_SCAN_BOUND)?;
    let vars = sys.vars().to_vec();
    let mut multiplicands = Vec::with_capacity(sys.arity());
    for i in 0..sys.arity() {
        let mut h = sys.ratio(i).shift(vars[i], -1);
        for j in 0..i {
            h = h.subst(vars[j], &RationalFunction::int(lam.values[j]));
        }
        multiplicands.push(h);
    }
    Ok(ProductSolution {
        vars,
        lambdas: lam.values,
        constant: Expression::Sym(seed_symbol()),
        multiplicands,
        certificate: lam.certificate,
    })
}

/// Iterate the ratio system itself from the seed, raising coordinates in
/// order (first coordinate first). Compatibility makes this path
/// independent, so it serves as an oracle for [`ProductSolution::value_at`],
/// which walks the coordinates in the opposite order.
pub fn forward_value(
    sys: &HypSystem,
    lambdas: &[i64],
    point: &[i64],
    seed: &Rational,
    bind: &BTreeMap<Symbol, Rational>,
) -> Option<Rational> {
    assert_eq!(point.len(), sys.arity(), "point arity mismatch");
    assert_eq!(lambdas.len(), sys.arity(), "lambda arity mismatch");
    if point.iter().zip(lambdas).any(|(p, l)| p < l) {
        return None;
    }
    let vars = sys.vars();
    let mut acc = seed.clone();
    for i in 0..sys.arity() {
        let mut env = bind.clone();
        for (j, var) in vars.iter().enumerate() {
            if j < i {
                env.insert(*var, q(point[j]));
            } else {
                env.insert(*var, q(lambdas[j]));
            }
        }
        for k in lambdas[i]..point[i] {
            env.insert(vars[i], q(k));
            acc *= sys.ratio(i).eval(&env)?;
        }
    }
    Some(acc)
}

struct PochAtom {
    base: Polynomial,
    count: Polynomial,
    exp: i64,
}

struct ResidualProduct {
    body: Polynomial,
    running: Symbol,
    lo: i64,
    upper: Symbol,
    exp: i64,
}

#[derive(Default)]
struct UnitPool {
    /// Exponent of (-1), kept with coefficients reduced mod 2.
    sign: Polynomial,
    /// Exponent polynomial per base; bases are primes except for
    /// magnitudes too large to factor, which are kept whole.
    magnitude: BTreeMap<BigInt, Polynomial>,
}

impl UnitPool {
    fn push(&mut self, c: &Rational, count: &Polynomial) {
        if c.is_negative() {
            self.sign = parity_reduce(&(&self.sign + count));
        }
        let mut bases: Vec<(BigInt, i64)> = Vec::new();
        for (big, direction) in [(c.numer().abs(), 1i64), (c.denom().abs(), -1i64)] {
            if big == BigInt::from(1) {
                continue;
            }
            match i64::try_from(&big) {
                Ok(small) => {
                    for (prime, e) in prime_powers(small) {
                        bases.push((BigInt::from(prime), e * direction));
                    }
                }
                Err(_) => bases.push((big, direction)),
            }
        }
        for (base, e) in bases {
            let entry = self
                .magnitude
                .entry(base.clone())
                .or_insert_with(Polynomial::zero);
            *entry = &*entry + &count.scale(&q(e));
            if entry.is_zero() {
                self.magnitude.remove(&base);
            }
        }
    }

    fn covers_two(&self, need: &Polynomial) -> bool {
        match self.magnitude.get(&BigInt::from(2)) {
            Some(have) => (have - need).terms().all(|(_, c)| !c.is_negative()),
            None => need.is_zero(),
        }
    }

    fn consume_two(&mut self, need: &Polynomial) {
        let two = BigInt::from(2);
        let entry = self.magnitude.entry(two.clone()).or_insert_with(Polynomial::zero);
        *entry = &*entry - need;
        if entry.is_zero() {
            self.magnitude.remove(&two);
        }
    }
}

fn parity_reduce(p: &Polynomial) -> Polynomial {
    let mut out = Polynomial::zero();
    for (m, c) in p.terms() {
        if !c.is_integer() {
            return p.clone();
        }
        if c.to_integer().is_odd() {
            out = &out + &Polynomial::monomial(m.clone(), q(1));
        }
    }
    out
}

fn prime_powers(mut n: i64) -> Vec<(i64, i64)> {
    assert!(n > 0);
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn push_atom(atoms: &mut Vec<PochAtom>, base: Polynomial, count: Polynomial, exp: i64) {
    if exp == 0 || count.is_zero() {
        return;
    }
    if let Some(existing) = atoms
        .iter_mut()
        .find(|a| a.base == base && a.count == count)
    {
        existing.exp += exp;
        atoms.retain(|a| a.exp != 0);
        return;
    }
    atoms.push(PochAtom { base, count, exp });
}

/// One count-addition step: P(b, v) P(b+v, w) -> P(b, v+w) among atoms of
/// the same sign.
fn try_addition(atoms: &mut Vec<PochAtom>) -> bool {
    for i in 0..atoms.len() {
        for j in 0..atoms.len() {
            if i == j || atoms[i].exp.signum() != atoms[j].exp.signum() {
                continue;
            }
            let chained = &atoms[i].base + &atoms[i].count;
            if chained == atoms[j].base {
                let s = atoms[i].exp.signum();
                let base = atoms[i].base.clone();
                let count = &atoms[i].count + &atoms[j].count;
                atoms[i].exp -= s;
                atoms[j].exp -= s;
                atoms.retain(|a| a.exp != 0);
                push_atom(atoms, base, count, s);
                return true;
            }
        }
    }
    false
}

/// One duplication step: 2^(2v) P(b, v) P(b+1/2, v) -> P(2b, 2v), applied
/// only in the numerator and only when the unit pool covers 2^(2v).
fn try_duplication(atoms: &mut Vec<PochAtom>, pool: &mut UnitPool) -> bool {
    for i in 0..atoms.len() {
        for j in 0..atoms.len() {
            if i == j || atoms[i].exp <= 0 || atoms[j].exp <= 0 {
                continue;
            }
            if atoms[i].count != atoms[j].count {
                continue;
            }
            let half = Polynomial::constant(crate::algebra::qr(1, 2));
            if &atoms[i].base + &half != atoms[j].base {
                continue;
            }
            let need = atoms[i].count.scale(&q(2));
            if !pool.covers_two(&need) {
                continue;
            }
            pool.consume_two(&need);
            let base = atoms[i].base.scale(&q(2));
            let count = atoms[i].count.scale(&q(2));
            atoms[i].exp -= 1;
            atoms[j].exp -= 1;
            atoms.retain(|a| a.exp != 0);
            push_atom(atoms, base, count, 1);
            return true;
        }
    }
    false
}

/// One reflection step: P(b, v) = (-1)^v P(1-b, -v)^(-1). Applied only
/// when the flipped atom immediately chains with an existing atom, so the
/// follow-up addition strictly shrinks the atom list.
fn try_reflection(atoms: &mut Vec<PochAtom>, pool: &mut UnitPool) -> bool {
    for i in 0..atoms.len() {
        let flipped_base = &Polynomial::one() - &atoms[i].base;
        let flipped_count = -&atoms[i].count;
        let flipped_sign = -atoms[i].exp.signum();
        let chains = atoms.iter().enumerate().any(|(j, other)| {
            j != i
                && other.exp.signum() == flipped_sign
                && (&flipped_base + &flipped_count == other.base
                    || &other.base + &other.count == flipped_base)
        });
        if !chains {
            continue;
        }
        let s = atoms[i].exp.signum();
        pool.sign = parity_reduce(&(&pool.sign + &atoms[i].count));
        atoms[i].exp -= s;
        let base = flipped_base;
        let count = flipped_count;
        atoms.retain(|a| a.exp != 0);
        push_atom(atoms, base, count, -s);
        return true;
    }
    false
}

fn poly_expr(p: &Polynomial) -> Expression {
    Expression::from_rational_function(&RationalFunction::from_poly(p.clone()))
}

/// Split an exponent polynomial into parts with nonnegative coefficients:
/// `p = plus - minus`.
fn coeff_split(p: &Polynomial) -> (Polynomial, Polynomial) {
    let mut plus = Polynomial::zero();
    let mut minus = Polynomial::zero();
    for (m, c) in p.terms() {
        if c.is_negative() {
            minus = &minus + &Polynomial::monomial(m.clone(), -c.clone());
        } else {
            plus = &plus + &Polynomial::monomial(m.clone(), c.clone());
        }
    }
    (plus, minus)
}

/// A finite product with constant base: base^(count), written as
/// prod(base, j, 1, count) when the exponent is not a plain integer.
fn power_unit(base: Rational, count: &Polynomial) -> Expression {
    if let Some(c) = count.as_constant() {
        let e = c.to_integer().try_into().unwrap_or(0i64);
        return Expression::Pow(Box::new(Expression::Rational(base)), e);
    }
    let index = fresh_bound(&count.vars(), 1);
    Expression::Product(Binder {
        body: Box::new(Expression::Rational(base)),
        index,
        lo: Box::new(Expression::int(1)),
        hi: Box::new(poly_expr(count)),
    })
}

/// Rewrite a product solution with Pochhammer symbols and factorials.
/// Linear factors a(k + alpha) over k = lambda+1 .. n contribute
/// a^(n-lambda) (alpha + lambda + 1)_(n-lambda); merging then restores
/// composite counts like (a)_(m+n). Factors of higher degree, or with a
/// nonconstant leading coefficient in the running index, stay as finite
/// products.
pub fn to_pochhammer(sol: &ProductSolution) -> Expression {
    let mut atoms: Vec<PochAtom> = Vec::new();
    let mut pool = UnitPool::default();
    let mut residuals: Vec<ResidualProduct> = Vec::new();

    for (i, h) in sol.multiplicands().iter().enumerate() {
        let v = sol.vars()[i];
        let lam = sol.lambdas()[i];
        let count = &Polynomial::var(v) - &Polynomial::int(lam);
        for (poly, e) in [(h.num(), 1i64), (h.den(), -1i64)] {
            if poly.is_one() {
                continue;
            }
            let f = factor_lin_quad(poly, v);
            if f.unit != q(1) {
                pool.push(&f.unit, &count.scale(&q(e)));
            }
            if !f.content.is_one() {
                residuals.push(ResidualProduct {
                    body: f.content.clone(),
                    running: v,
                    lo: lam + 1,
                    upper: v,
                    exp: e,
                });
            }
            for (lin, mult) in &f.linear {
                let lead = lin.coeff_of(v, 1);
                match lead.as_constant() {
                    Some(c) => {
                        let total = e * (*mult as i64);
                        if c != q(1) {
                            pool.push(&c, &count.scale(&q(total)));
                        }
                        let alpha = lin.coeff_of(v, 0).scale(&(q(1) / c.clone()));
                        let base = &alpha + &Polynomial::int(lam + 1);
                        push_atom(&mut atoms, base, count.clone(), total);
                    }
                    None => {
                        residuals.push(ResidualProduct {
                            body: lin.clone(),
                            running: v,
                            lo: lam + 1,
                            upper: v,
                            exp: e * (*mult as i64),
                        });
                    }
                }
            }
            for (quad, mult) in &f.quadratic {
                residuals.push(ResidualProduct {
                    body: quad.clone(),
                    running: v,
                    lo: lam + 1,
                    upper: v,
                    exp: e * (*mult as i64),
                });
            }
            if !f.residual.is_one() {
                residuals.push(ResidualProduct {
                    body: f.residual.clone(),
                    running: v,
                    lo: lam + 1,
                    upper: v,
                    exp: e,
                });
            }
        }
    }

    let mut rounds = 0;
    loop {
        rounds += 1;
        if rounds > 500 {
            break;
        }
        if try_addition(&mut atoms) {
            continue;
        }
        if try_duplication(&mut atoms, &mut pool) {
            continue;
        }
        if try_reflection(&mut atoms, &mut pool) {
            continue;
        }
        break;
    }

    let mut factors = vec![sol.constant().clone()];

    if !pool.sign.is_zero() {
        match pool.sign.as_constant() {
            Some(c) => {
                if c.to_integer().is_odd() {
                    factors.push(Expression::int(-1));
                }
            }
            None => factors.push(power_unit(q(-1), &pool.sign)),
        }
    }
    for (base, exponent) in &pool.magnitude {
        let base_rat = Rational::from_integer(base.clone());
        let (plus, minus) = coeff_split(exponent);
        if !plus.is_zero() {
            factors.push(power_unit(base_rat.clone(), &plus));
        }
        if !minus.is_zero() {
            factors.push(power_unit(q(1) / base_rat, &minus));
        }
    }

    for atom in &atoms {
        let count = poly_expr(&atom.count);
        let piece = if atom.base.is_one() {
            Expression::Factorial(Box::new(count))
        } else {
            Expression::Poch(Box::new(poly_expr(&atom.base)), Box::new(count))
        };
        factors.push(if atom.exp == 1 {
            piece
        } else {
            Expression::Pow(Box::new(piece), atom.exp)
        });
    }

    for res in &residuals {
        let mut avoid = res.body.vars();
        avoid.insert(res.upper);
        let index = fresh_bound(&avoid, 0);
        let body = res.body.subst(res.running, &Polynomial::var(index));
        let piece = Expression::Product(Binder {
            body: Box::new(poly_expr(&body)),
            index,
            lo: Box::new(Expression::int(res.lo)),
            hi: Box::new(Expression::Sym(res.upper)),
        });
        factors.push(if res.exp == 1 {
            piece
        } else {
            Expression::Pow(Box::new(piece), res.exp)
        });
    }

    Expression::mul(factors).canonicalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn pvar(name: &str) -> Polynomial {
        Polynomial::var(Symbol::param(name))
    }

    fn svar(name: &str) -> Polynomial {
        Polynomial::var(Symbol::shift(name))
    }

    fn f1_system() -> HypSystem {
        let (m, n) = (Symbol::shift("m"), Symbol::shift("n"));
        let (a, b, b1, c) = (pvar("a"), pvar("b"), pvar("b1"), pvar("c"));
        let mn = &svar("m") + &svar("n");
        let r1 = RationalFunction::new(
            &(&a + &mn) * &(&b + &svar("m")),
            &(&c + &mn) * &(&svar("m") + &Polynomial::one()),
        );
        let r2 = RationalFunction::new(
            &(&a + &mn) * &(&b1 + &svar("n")),
            &(&c + &mn) * &(&svar("n") + &Polynomial::one()),
        );
        HypSystem::new(vec![m, n], vec![r1, r2]).unwrap()
    }

    #[test]
    fn appell_ratios_are_compatible() {
        assert!(check_compatibility(&f1_system()).is_ok());
    }

    #[test]
    fn single_ratio_is_vacuously_compatible() {
        let n = Symbol::shift("n");
        let sys = HypSystem::new(
            vec![n],
            vec![RationalFunction::from_poly(&svar("n") + &pvar("a"))],
        )
        .unwrap();
        assert!(check_compatibility(&sys).is_ok());
    }

    #[test]
    fn perturbed_system_reports_witness() {
        let sys = f1_system();
        let bad = RationalFunction::new(
            sys.ratio(1).num() + &Polynomial::one(),
            sys.ratio(1).den().clone(),
        );
        let sys = HypSystem::new(sys.vars().to_vec(), vec![sys.ratio(0).clone(), bad]).unwrap();
        let err = check_compatibility(&sys).unwrap_err();
        assert_eq!((err.i, err.j), (0, 1));
        assert!(!err.difference.is_zero());
    }

    #[test]
    fn lambdas_zero_for_generic_gauss() {
        let n = Symbol::shift("n");
        let num = &(&svar("n") + &Polynomial::one()) * &(&svar("n") + &Polynomial::one());
        let den = &(&svar("n") + &Polynomial::one()) * &(&svar("n") + &Polynomial::int(2));
        let sys = HypSystem::new(vec![n], vec![RationalFunction::new(num, den)]).unwrap();
        let lam = compute_lambdas(&sys, DEFAULT_SCAN_BOUND).unwrap();
        assert_eq!(lam.values, vec![0]);
        assert_eq!(lam.certificate, LambdaCertificate::Exact);
    }

    #[test]
    fn integer_root_in_denominator_raises_lambda() {
        let n = Symbol::shift("n");
        let num = &svar("n") + &pvar("a");
        let den = &svar("n") - &Polynomial::int(3);
        let sys = HypSystem::new(vec![n], vec![RationalFunction::new(num, den)]).unwrap();
        let lam = compute_lambdas(&sys, DEFAULT_SCAN_BOUND).unwrap();
        assert_eq!(lam.values, vec![4]);
        assert_eq!(lam.certificate, LambdaCertificate::Exact);
    }

    #[test]
    fn mixed_index_factor_falls_back_to_scan() {
        let (m, n) = (Symbol::shift("m"), Symbol::shift("n"));
        let gap = &(&svar("m") - &svar("n")) + &Polynomial::int(5);
        let r1 = RationalFunction::new(Polynomial::one(), gap);
        let sys = HypSystem::new(vec![m, n], vec![r1, RationalFunction::one()]).unwrap();
        let lam = compute_lambdas(&sys, DEFAULT_SCAN_BOUND).unwrap();
        assert_eq!(lam.certificate, LambdaCertificate::Scanned);
        assert_eq!(lam.values, vec![46, 46]);
    }

    #[test]
    fn diagonal_zero_set_is_undecidable() {
        let (m, n) = (Symbol::shift("m"), Symbol::shift("n"));
        let gap = &svar("m") - &svar("n");
        let r1 = RationalFunction::new(Polynomial::one(), gap);
        let sys = HypSystem::new(vec![m, n], vec![r1, RationalFunction::one()]).unwrap();
        match compute_lambdas(&sys, DEFAULT_SCAN_BOUND) {
            Err(SolveError::UndecidableLambda) => {}
            other => panic!("expected undecidable, got {other:?}"),
        }
    }

    #[test]
    fn gauss_product_has_t1_shape() {
        let n = Symbol::shift("n");
        let (cc, b1, a1) = (pvar("C"), pvar("B1"), pvar("A1"));
        let nv = svar("n");
        let num = -&(&(&cc + &(&b1 * &nv)) - &(&nv * &(&nv - &Polynomial::one())));
        let den = &(&nv + &Polynomial::one()) * &(&nv + &a1);
        let sys = HypSystem::new(vec![n], vec![RationalFunction::new(num, den)]).unwrap();
        let sol = solve_first_order_system(&sys)
            .unwrap()
            .with_constant(Expression::int(1));
        let got = to_pochhammer(&sol);
        let want = parse("prod(-C+B1*(1-i)+(1-i)*(2-i), i, 1, n) / (fact(n) * poch(A1, n))")
            .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn gauss_product_after_substitution_is_pochhammer() {
        let n = Symbol::shift("n");
        let (a, b, c) = (pvar("a"), pvar("b"), pvar("c"));
        let nv = svar("n");
        let num = &(&nv + &a) * &(&nv + &b);
        let den = &(&nv + &Polynomial::one()) * &(&nv + &c);
        let sys = HypSystem::new(vec![n], vec![RationalFunction::new(num, den)]).unwrap();
        let sol = solve_first_order_system(&sys)
            .unwrap()
            .with_constant(Expression::int(1));
        let got = to_pochhammer(&sol);
        let want = parse("poch(a,n) * poch(b,n) / (poch(c,n) * fact(n))").unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn appell_f1_product_merges_counts() {
        let sol = solve_first_order_system(&f1_system())
            .unwrap()
            .with_constant(Expression::int(1));
        let got = to_pochhammer(&sol);
        let want = parse(
            "poch(a,m+n) * poch(b,m) * poch(b1,n) / (poch(c,m+n) * fact(m) * fact(n))",
        )
        .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn constant_system_solves_to_constant() {
        let n = Symbol::shift("n");
        let sys = HypSystem::new(vec![n], vec![RationalFunction::one()]).unwrap();
        let sol = solve_first_order_system(&sys).unwrap();
        assert_eq!(sol.to_expression(), Expression::Sym(seed_symbol()));
        assert_eq!(to_pochhammer(&sol), Expression::Sym(seed_symbol()));
    }

    #[test]
    fn irreducible_quadratic_stays_a_product() {
        let n = Symbol::shift("n");
        let nv = svar("n");
        let body = &(&(&nv * &nv) + &nv) + &Polynomial::one();
        let sys =
            HypSystem::new(vec![n], vec![RationalFunction::from_poly(body)]).unwrap();
        let sol = solve_first_order_system(&sys)
            .unwrap()
            .with_constant(Expression::int(1));
        let got = to_pochhammer(&sol);
        let want = parse("prod(1 - i + i^2, i, 1, n)").unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn nested_product_matches_forward_iteration() {
        let sys = f1_system();
        let sol = solve_first_order_system(&sys)
            .unwrap()
            .with_constant(Expression::int(1));
        let bind: BTreeMap<Symbol, Rational> = [
            (Symbol::param("a"), crate::algebra::qr(1, 3)),
            (Symbol::param("b"), crate::algebra::qr(2, 5)),
            (Symbol::param("b1"), crate::algebra::qr(-3, 7)),
            (Symbol::param("c"), crate::algebra::qr(9, 4)),
        ]
        .into_iter()
        .collect();
        let seed = q(1);
        for mm in 0..4 {
            for nn in 0..4 {
                let direct = sol.value_at(&[mm, nn], &bind).unwrap();
                let walked =
                    forward_value(&sys, sol.lambdas(), &[mm, nn], &seed, &bind).unwrap();
                assert_eq!(direct, walked, "mismatch at ({mm},{nn})");
            }
        }
    }

    #[test]
    fn pochhammer_form_evaluates_like_the_product() {
        let sys = f1_system();
        let sol = solve_first_order_system(&sys)
            .unwrap()
            .with_constant(Expression::int(1));
        let poch = to_pochhammer(&sol);
        let mut bind: BTreeMap<Symbol, Rational> = [
            (Symbol::param("a"), crate::algebra::qr(5, 2)),
            (Symbol::param("b"), crate::algebra::qr(-1, 2)),
            (Symbol::param("b1"), crate::algebra::qr(4, 3)),
            (Symbol::param("c"), crate::algebra::qr(7, 6)),
        ]
        .into_iter()
        .collect();
        for mm in 0..4 {
            for nn in 0..4 {
                bind.insert(Symbol::shift("m"), q(mm));
                bind.insert(Symbol::shift("n"), q(nn));
                let via_poch = poch.eval_rational(&bind).unwrap();
                bind.remove(&Symbol::shift("m"));
                bind.remove(&Symbol::shift("n"));
                let via_product = sol.value_at(&[mm, nn], &bind).unwrap();
                assert_eq!(via_poch, via_product, "mismatch at ({mm},{nn})");
            }
        }
    }
}
