use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::{
    full_factor, integer_roots, solve_linear, IntegerRoots, Polynomial, Rational,
    RationalFunction, Symbol, SymbolKind,
};
use crate::expr::Expression;

use super::{epsilon_symbol, harmonic_number, index_symbol, EpsexError, LaurentSeries};

/// A finite product `prod(h(ep,i), i, lower, upper)`, or its reciprocal
/// when `inverse` is set. The multiplicand is rational in the expansion
/// parameter and the running index [`index_symbol`]; any further symbols
/// are carried along as exact coefficients.
///
/// [`series_for_product`] certifies for itself that the multiplicand does
/// not vanish at `ep = 0` on the tail of the range: positions at the start
/// of the range where some factor has an integer zero are split off into a
/// rational prefactor, and a multiplicand whose zero set cannot be decided
/// is rejected.
#[derive(Clone, Debug)]
pub struct ProductAtom {
    pub multiplicand: RationalFunction,
    pub lower: Expression,
    pub upper: Expression,
    pub inverse: bool,
}

/// Laurent expansion of a [`ProductAtom`] around `ep = 0`, exact through
/// `ep^up_to`.
///
/// The multiplicand is factored over the rationals. Each factor `f` with
/// signed exponent `z` contributes its value at `ep = 0` (a product that
/// is rewritten with factorials and Pochhammer symbols where the factor is
/// linear in the index) times the exponential of `z * sum_i log(f/f|0)`,
/// whose Taylor coefficients are sums of rational functions of the index.
/// Those sums are recognized as harmonic sums after a partial fraction
/// decomposition; pieces with an irreducible denominator of higher degree
/// stay behind as explicit finite sums.
pub fn series_for_product(p: &ProductAtom, up_to: i64) -> Result<LaurentSeries, EpsexError> {
    if p.multiplicand.is_zero() {
        return Err(EpsexError::ZeroMultiplicand);
    }
    let ep = epsilon_symbol();
    let idx = index_symbol();
    for bound in [&p.lower, &p.upper] {
        let free = bound.free_symbols();
        assert!(
            !free.contains(&ep) && !free.contains(&idx),
            "product bounds must not involve the expansion parameter or the index"
        );
    }
    let lower = integer_lower(&p.lower)?;
    let sign = if p.inverse { -1i64 } else { 1 };

    let (u_num, num_factors) = full_factor(p.multiplicand.num());
    let (u_den, den_factors) = full_factor(p.multiplicand.den());
    let unit = u_num / u_den;
    let mut staged: Vec<(Polynomial, Polynomial, i64)> = Vec::new();
    let mut cut = lower;
    let zero_eps = {
        let mut m = BTreeMap::new();
        m.insert(ep, Rational::zero());
        m
    };
    let factors = num_factors
        .into_iter()
        .map(|(f, m)| (f, m as i64 * sign))
        .chain(den_factors.into_iter().map(|(f, m)| (f, -(m as i64) * sign)));
    for (f, z) in factors {
        let f0 = f.eval_partial(&zero_eps);
        if f0.is_zero() {
            return Err(EpsexError::UndecidablePrefactor);
        }
        for root in certified_roots(&f0, idx)? {
            if root >= lower {
                cut = cut.max(root + 1);
            }
        }
        staged.push((f, f0, z));
    }

    let mut prefactor = RationalFunction::one();
    for (f, _, z) in &staged {
        for at in lower..cut {
            let mut bind = BTreeMap::new();
            bind.insert(idx, crate::algebra::q(at));
            let value = f.eval_partial(&bind);
            prefactor = &prefactor * &RationalFunction::from_poly(value).pow(*z as i32);
        }
    }
    if !unit.is_one() {
        let e = (sign * (cut - lower)) as i32;
        prefactor = &prefactor * &RationalFunction::constant(unit.clone()).pow(e);
    }
    if prefactor.is_zero() {
        return Ok(LaurentSeries::zero(up_to));
    }

    let shift = eps_order(&prefactor, ep);
    if up_to < shift {
        return Ok(LaurentSeries::zero(up_to));
    }
    let terms = (up_to - shift) as usize;
    let mut acc = laurent_of_rational(&prefactor, ep, shift, terms);

    let mut pool = unit.pow(sign as i32);
    for (f, f0, z) in &staged {
        let (content, rest) = emit_base_product(f0, idx, cut, &p.upper);
        pool *= content.pow(*z as i32);
        let base = Expression::pow(rest, *z);
        if f == f0 {
            acc = acc.scale(&base);
        } else {
            let fs = factor_series(f, *z, idx, cut, &p.upper, terms as i64, base);
            acc = acc.mul(&fs);
        }
    }
    if !pool.is_one() {
        acc = acc.scale(&power_over_range(Expression::rational(pool), cut, &p.upper));
    }
    Ok(acc.truncate_to(up_to))
}

fn integer_lower(e: &Expression) -> Result<i64, EpsexError> {
    let r = e.as_rational().ok_or(EpsexError::UndecidablePrefactor)?;
    if !r.is_integer() {
        return Err(EpsexError::UndecidablePrefactor);
    }
    i64::try_from(&r.to_integer()).map_err(|_| EpsexError::UndecidablePrefactor)
}

/// Integer zeros of `f0` that constrain the range. Roots that exist only
/// for special parameter values are ignored: parameters are treated as
/// generic, matching the solver's convention. A zero set that moves with
/// another non-parameter symbol cannot be cut off and is rejected.
fn certified_roots(f0: &Polynomial, idx: Symbol) -> Result<Vec<i64>, EpsexError> {
    if !f0.contains_var(idx) {
        return Ok(Vec::new());
    }
    match integer_roots(f0, idx) {
        IntegerRoots::Exact(roots) => Ok(roots),
        IntegerRoots::Parametric { integers, .. } => Ok(integers),
        IntegerRoots::Undecidable => {
            let has_param = f0
                .vars()
                .into_iter()
                .any(|s| s.kind() == SymbolKind::Parameter);
            if has_param {
                Ok(Vec::new())
            } else {
                Err(EpsexError::UndecidablePrefactor)
            }
        }
    }
}

fn eps_order(r: &RationalFunction, ep: Symbol) -> i64 {
    let low = |p: &Polynomial| {
        p.coeffs_in(ep)
            .iter()
            .position(|c| !c.is_zero())
            .expect("nonzero polynomial") as i64
    };
    low(r.num()) - low(r.den())
}

/// Laurent coefficients of a rational function of `ep`, starting at
/// `ep^shift` with `terms + 1` coefficients.
fn laurent_of_rational(
    r: &RationalFunction,
    ep: Symbol,
    shift: i64,
    terms: usize,
) -> LaurentSeries {
    let series_part = |p: &Polynomial| -> Vec<RationalFunction> {
        let cs = p.coeffs_in(ep);
        let start = cs.iter().position(|c| !c.is_zero()).unwrap();
        cs[start..]
            .iter()
            .map(|c| RationalFunction::from_poly(c.clone()))
            .collect()
    };
    let num = series_part(r.num());
    let den = series_part(r.den());
    let at = |v: &[RationalFunction], k: usize| {
        v.get(k).cloned().unwrap_or_else(RationalFunction::zero)
    };
    let mut coeffs: Vec<RationalFunction> = Vec::with_capacity(terms + 1);
    for k in 0..=terms {
        let mut c = at(&num, k);
        for j in 1..=k {
            c = &c - &(&at(&den, j) * &coeffs[k - j]);
        }
        coeffs.push(&c / &den[0]);
    }
    let exprs = coeffs
        .iter()
        .map(Expression::from_rational_function)
        .collect();
    LaurentSeries::with_truncation(shift, exprs, shift + terms as i64)
}

/// Expansion of `prod(f(ep,i)^z, i, cut, upper)` relative to its value at
/// `ep = 0`, multiplied back by `base = (prod f(0,i))^z`.
fn factor_series(
    f: &Polynomial,
    z: i64,
    idx: Symbol,
    cut: i64,
    upper: &Expression,
    order: i64,
    base: Expression,
) -> LaurentSeries {
    let ep = epsilon_symbol();
    let mut lambdas: Vec<Expression> = Vec::new();
    let mut g = RationalFunction::new(f.derivative(ep), f.clone());
    for j in 0..order {
        let d = at_eps_zero(&g, ep);
        let s_j = recognize_sum(&d, idx, cut, upper);
        lambdas.push(Expression::mul(vec![Expression::int(z), s_j]));
        if j + 1 < order {
            g = rf_derivative(&g, ep);
        }
    }
    let taylor = exp_taylor(&lambdas, order as usize);
    let coeffs = taylor
        .into_iter()
        .enumerate()
        .map(|(r, p_r)| {
            Expression::mul(vec![
                base.clone(),
                Expression::rational(Rational::one() / factorial_rational(r as i64)),
                p_r,
            ])
        })
        .collect();
    LaurentSeries::with_truncation(0, coeffs, order)
}

fn rf_derivative(g: &RationalFunction, v: Symbol) -> RationalFunction {
    let n = g.num();
    let d = g.den();
    RationalFunction::new(
        &(&n.derivative(v) * d) - &(n * &d.derivative(v)),
        d * d,
    )
}

fn at_eps_zero(g: &RationalFunction, ep: Symbol) -> RationalFunction {
    RationalFunction::new(g.num().coeff_of(ep, 0), g.den().coeff_of(ep, 0))
}

/// Taylor coefficients `P_0, ..., P_order` of `exp(G(ep))` with `G(0) = 0`
/// and `G^(j+1)(0) = lambdas[j]`, as polynomials in the lambdas; the `1/r!`
/// is left to the caller. Uses `P_{r+1} = sum_k C(r,k) lambda_k P_{r-k}`.
fn exp_taylor(lambdas: &[Expression], order: usize) -> Vec<Expression> {
    let mut levels: Vec<BTreeMap<Vec<u32>, Rational>> = Vec::with_capacity(order + 1);
    let mut unit = BTreeMap::new();
    unit.insert(Vec::new(), Rational::one());
    levels.push(unit);
    for r in 0..order {
        let mut next: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for k in 0..=r {
            let c = binomial(r, k);
            for (mono, coeff) in &levels[r - k] {
                let mut bumped = mono.clone();
                if bumped.len() <= k {
                    bumped.resize(k + 1, 0);
                }
                bumped[k] += 1;
                let entry = next.entry(bumped).or_insert_with(Rational::zero);
                *entry += coeff * &c;
            }
        }
        levels.push(next);
    }
    levels
        .into_iter()
        .map(|terms| {
            let parts = terms
                .into_iter()
                .map(|(mono, coeff)| {
                    let mut factors = vec![Expression::rational(coeff)];
                    for (j, &e) in mono.iter().enumerate() {
                        if e > 0 {
                            factors.push(Expression::pow(lambdas[j].clone(), e as i64));
                        }
                    }
                    Expression::mul(factors)
                })
                .collect();
            Expression::add(parts)
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> Rational {
    let mut acc = Rational::one();
    for t in 0..k {
        acc = acc * crate::algebra::q((n - t) as i64) / crate::algebra::q((t + 1) as i64);
    }
    acc
}

fn factorial_rational(m: i64) -> Rational {
    assert!(m >= 0);
    let mut acc = Rational::one();
    for t in 2..=m {
        acc *= crate::algebra::q(t);
    }
    acc
}

/// Closed form for `sum(d(i), i, lo, upper)` with `d` rational in `i`.
/// Polynomial parts are summed exactly, simple poles become harmonic sums
/// (or a Hurwitz sum for a non-integer rational offset), and anything with
/// an irreducible higher degree denominator is kept as an explicit sum.
fn recognize_sum(d: &RationalFunction, idx: Symbol, lo: i64, upper: &Expression) -> Expression {
    if d.is_zero() {
        return Expression::zero();
    }
    let (den_unit, den_facs) = full_factor(d.den());
    let mut param_den = Polynomial::constant(den_unit);
    let mut blocks: Vec<(Polynomial, u32)> = Vec::new();
    for (f, m) in den_facs {
        if f.contains_var(idx) {
            blocks.push((f, m));
        } else {
            param_den = &param_den * &f.pow(m);
        }
    }
    let scale = Expression::from_rational_function(&RationalFunction::new(
        Polynomial::one(),
        param_den,
    ));

    if blocks.is_empty() {
        let coeffs: Vec<RationalFunction> = d
            .num()
            .coeffs_in(idx)
            .into_iter()
            .map(RationalFunction::from_poly)
            .collect();
        return Expression::mul(vec![scale, faulhaber(&coeffs, lo, upper)]);
    }

    let (poly_part, block_parts) = partial_fractions(d.num(), &blocks, idx);
    let mut pieces: Vec<Expression> = Vec::new();
    if !poly_part.is_empty() {
        pieces.push(faulhaber(&poly_part, lo, upper));
    }
    for (b, per_rho) in block_parts.iter().enumerate() {
        let (f, _) = &blocks[b];
        let cs = f.coeffs_in(idx);
        let linear = cs.len() == 2;
        for (rho0, numer) in per_rho.iter().enumerate() {
            let rho = rho0 as u32 + 1;
            if numer.iter().all(|c| c.is_zero()) {
                continue;
            }
            if linear {
                let offset = &RationalFunction::from_poly(cs[0].clone())
                    / &RationalFunction::from_poly(cs[1].clone());
                let kappa = &numer[0]
                    / &RationalFunction::from_poly(cs[1].clone()).pow(rho as i32);
                pieces.push(Expression::mul(vec![
                    Expression::from_rational_function(&kappa),
                    power_sum(rho, &offset, lo, upper),
                ]));
            } else {
                let mut body = RationalFunction::zero();
                for (s, c) in numer.iter().enumerate() {
                    let mono = RationalFunction::from_poly(Polynomial::var(idx).pow(s as u32));
                    body = &body + &(c * &mono);
                }
                body = &body / &RationalFunction::from_poly(f.clone()).pow(rho as i32);
                pieces.push(Expression::finite_sum(
                    Expression::from_rational_function(&body),
                    idx,
                    Expression::int(lo),
                    upper.clone(),
                ));
            }
        }
    }
    Expression::mul(vec![scale, Expression::add(pieces)])
}

/// Partial fraction decomposition of `num / prod(blocks)` with respect to
/// the index: a polynomial part (empty when the degree drops) and, for
/// each block `f^m`, numerators for `1/f, ..., 1/f^m`, each a coefficient
/// vector in the index of length `deg f`.
fn partial_fractions(
    num: &Polynomial,
    blocks: &[(Polynomial, u32)],
    idx: Symbol,
) -> (Vec<RationalFunction>, Vec<Vec<Vec<RationalFunction>>>) {
    let mut d_til = Polynomial::one();
    for (f, m) in blocks {
        d_til = &d_til * &f.pow(*m);
    }
    let deg_num = num.degree_in(idx) as i64;
    let deg_til = d_til.degree_in(idx) as i64;
    let deg_p = deg_num - deg_til;

    enum Tag {
        Poly(usize),
        Block { b: usize, rho: u32, s: usize },
    }
    let mut tags: Vec<Tag> = Vec::new();
    let mut multipliers: Vec<Polynomial> = Vec::new();
    if deg_p >= 0 {
        for k in 0..=deg_p as u32 {
            tags.push(Tag::Poly(k as usize));
            multipliers.push(&d_til * &Polynomial::var(idx).pow(k));
        }
    }
    for (b, (f, m)) in blocks.iter().enumerate() {
        let mut others = Polynomial::one();
        for (b2, (f2, m2)) in blocks.iter().enumerate() {
            if b2 != b {
                others = &others * &f2.pow(*m2);
            }
        }
        let deg_f = f.degree_in(idx);
        for rho in 1..=*m {
            let lifted = &others * &f.pow(m - rho);
            for s in 0..deg_f {
                tags.push(Tag::Block { b, rho, s: s as usize });
                multipliers.push(&lifted * &Polynomial::var(idx).pow(s));
            }
        }
    }

    let rows = (deg_num.max(deg_til + deg_p.max(0)) + 1) as usize;
    let column = |p: &Polynomial| -> Vec<RationalFunction> {
        let mut cs: Vec<RationalFunction> = p
            .coeffs_in(idx)
            .into_iter()
            .map(RationalFunction::from_poly)
            .collect();
        cs.resize(rows, RationalFunction::zero());
        cs
    };
    let cols: Vec<Vec<RationalFunction>> = multipliers.iter().map(|m| column(m)).collect();
    let rhs = column(num);
    let matrix: Vec<Vec<RationalFunction>> = (0..rows)
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect();
    let solution = solve_linear(&matrix, &rhs)
        .expect("partial fraction system is always consistent")
        .particular;

    let mut poly_part = if deg_p >= 0 {
        vec![RationalFunction::zero(); deg_p as usize + 1]
    } else {
        Vec::new()
    };
    let mut block_parts: Vec<Vec<Vec<RationalFunction>>> = blocks
        .iter()
        .map(|(f, m)| {
            (0..*m)
                .map(|_| vec![RationalFunction::zero(); f.degree_in(idx) as usize])
                .collect()
        })
        .collect();
    for (tag, value) in tags.into_iter().zip(solution) {
        match tag {
            Tag::Poly(k) => poly_part[k] = value,
            Tag::Block { b, rho, s } => block_parts[b][(rho - 1) as usize][s] = value,
        }
    }
    (poly_part, block_parts)
}

/// `sum(P(i), i, lo, upper)` for a polynomial with the given coefficients:
/// Newton's forward difference form of the running sum, evaluated at the
/// symbolic upper bound, minus its value at `lo - 1`.
fn faulhaber(coeffs: &[RationalFunction], lo: i64, upper: &Expression) -> Expression {
    let value_at = |t: i64| -> RationalFunction {
        let mut acc = RationalFunction::zero();
        let mut power = RationalFunction::one();
        let t_rf = RationalFunction::constant(crate::algebra::q(t));
        for c in coeffs {
            acc = &acc + &(c * &power);
            power = &power * &t_rf;
        }
        acc
    };
    let d = coeffs.len().saturating_sub(1);
    let mut table: Vec<RationalFunction> = (0..=d as i64).map(value_at).collect();
    let mut deltas: Vec<RationalFunction> = vec![table[0].clone()];
    for _ in 0..d {
        let next: Vec<RationalFunction> = table.windows(2).map(|w| &w[1] - &w[0]).collect();
        table = next;
        deltas.push(table[0].clone());
    }

    let mut symbolic: Vec<Expression> = Vec::new();
    let mut exact = RationalFunction::zero();
    for (k, delta) in deltas.iter().enumerate() {
        if delta.is_zero() {
            continue;
        }
        let delta_expr = Expression::from_rational_function(delta);
        let mut prod = vec![
            delta_expr,
            Expression::rational(Rational::one() / factorial_rational(k as i64 + 1)),
        ];
        for t in 0..=k as i64 {
            prod.push(Expression::add(vec![
                upper.clone(),
                Expression::int(1 - t),
            ]));
        }
        symbolic.push(Expression::mul(prod));

        let mut c_low = Rational::one() / factorial_rational(k as i64 + 1);
        for t in 0..=k as i64 {
            c_low *= crate::algebra::q(lo - t);
        }
        exact = &exact + &(delta * &RationalFunction::constant(c_low));
    }
    symbolic.push(Expression::mul(vec![
        Expression::int(-1),
        Expression::from_rational_function(&exact),
    ]));
    Expression::add(symbolic)
}

/// `sum(1/(i + c)^rho, i, lo, upper)` as harmonic sums. For an integer
/// offset the result is `S(rho; upper)` shifted plus an exact rational;
/// for a non-integer rational offset a single Hurwitz sum; for a symbolic
/// offset a difference of harmonic sums at the offset and the shifted
/// offset, normalized so the harmonic arguments carry no integer part.
fn power_sum(rho: u32, c: &RationalFunction, lo: i64, upper: &Expression) -> Expression {
    let word = rho as i64;
    if let Some(q) = c.as_constant() {
        if q.is_integer() {
            let j = i64::try_from(&q.to_integer()).expect("offset fits");
            assert!(
                lo + j >= 1,
                "pole at index {} inside the summation range",
                -j
            );
            let head = harmonic_shift_base(rho, upper, j);
            let tail = harmonic_number(rho, lo - 1 + j);
            return Expression::sub(head, Expression::rational(tail));
        }
        let base = Expression::rational(q + crate::algebra::q(lo - 1));
        let count = Expression::add(vec![upper.clone(), Expression::int(1 - lo)]);
        return Expression::hurwitz(vec![word], base, count);
    }
    let j = integer_offset(c);
    let c0 = Expression::sub(
        Expression::from_rational_function(c),
        Expression::int(j),
    );
    let head = harmonic_shift_base(
        rho,
        &Expression::add(vec![c0.clone(), upper.clone()]),
        j,
    );
    let at_base = harmonic_shift_base(rho, &c0, j);
    let skirt = explicit_power_range(rho, c, 1, lo - 1);
    Expression::sub(Expression::sub(head, at_base), skirt)
}

/// Integer part of the constant coefficient when `c` is a polynomial;
/// zero otherwise. Only used to normalize harmonic arguments, so skipping
/// the normalization is always sound.
fn integer_offset(c: &RationalFunction) -> i64 {
    let den = match c.den().eval(&BTreeMap::new()) {
        Some(v) if !v.is_zero() => v,
        _ => return 0,
    };
    let constant = c
        .num()
        .terms()
        .find(|(m, _)| m.degree() == 0)
        .map(|(_, v)| v.clone())
        .unwrap_or_else(Rational::zero);
    let q = constant / den;
    i64::try_from(&q.floor().to_integer()).unwrap_or(0)
}

/// `S(rho; base + j)` written on the argument `base`.
fn harmonic_shift_base(rho: u32, base: &Expression, j: i64) -> Expression {
    let word = rho as i64;
    let s = Expression::harmonic(vec![word], base.clone());
    if j == 0 {
        return s;
    }
    let correction = |t: i64| {
        Expression::pow(
            Expression::add(vec![base.clone(), Expression::int(t)]),
            -(rho as i64),
        )
    };
    if j > 0 {
        let mut terms = vec![s];
        terms.extend((1..=j).map(correction));
        Expression::add(terms)
    } else {
        let mut terms = vec![s];
        terms.extend((j + 1..=0).map(|t| Expression::mul(vec![
            Expression::int(-1),
            correction(t),
        ])));
        Expression::add(terms)
    }
}

/// `sum(1/(i+c)^rho, i, a, b)` for concrete `a`, `b` with the formal
/// convention `sum_{a}^{b} = -sum_{b+1}^{a-1}` when the range is inverted.
fn explicit_power_range(rho: u32, c: &RationalFunction, a: i64, b: i64) -> Expression {
    let term = |t: i64| {
        Expression::pow(
            Expression::add(vec![
                Expression::from_rational_function(c),
                Expression::int(t),
            ]),
            -(rho as i64),
        )
    };
    if b >= a {
        Expression::add((a..=b).map(term).collect())
    } else if b == a - 1 {
        Expression::zero()
    } else {
        Expression::mul(vec![
            Expression::int(-1),
            Expression::add((b + 1..=a - 1).map(term).collect()),
        ])
    }
}

/// `prod(f0(i), i, cut, upper)` in closed form, split as a rational
/// content (returned separately so reciprocal contents from other factors
/// can cancel exactly) times an expression: factors linear in the index
/// become factorials (integer offset) or Pochhammer symbols, and
/// everything else stays a product atom.
fn emit_base_product(
    f0: &Polynomial,
    idx: Symbol,
    cut: i64,
    upper: &Expression,
) -> (Rational, Expression) {
    if !f0.contains_var(idx) {
        if let Some(v) = f0.eval(&BTreeMap::new()) {
            return (v, Expression::one());
        }
        return (
            Rational::one(),
            power_over_range(poly_expr(f0), cut, upper),
        );
    }
    let (u, facs) = full_factor(f0);
    let mut content = u;
    let mut parts: Vec<Expression> = Vec::new();
    for (q, m) in facs {
        if !q.contains_var(idx) {
            parts.push(Expression::pow(
                power_over_range(poly_expr(&q), cut, upper),
                m as i64,
            ));
            continue;
        }
        if q.degree_in(idx) == 1 {
            let cs = q.coeffs_in(idx);
            let lead = RationalFunction::from_poly(cs[1].clone());
            let offset = &RationalFunction::from_poly(cs[0].clone()) / &lead;
            match lead.as_constant() {
                Some(a) => content *= a.pow(m as i32),
                None => parts.push(Expression::pow(
                    power_over_range(
                        Expression::from_rational_function(&lead),
                        cut,
                        upper,
                    ),
                    m as i64,
                )),
            }
            parts.push(Expression::pow(
                offset_range_product(&offset, cut, upper),
                m as i64,
            ));
            continue;
        }
        parts.push(Expression::pow(
            Expression::product(poly_expr(&q), idx, Expression::int(cut), upper.clone()),
            m as i64,
        ));
    }
    (content, Expression::mul(parts))
}

/// `prod(i + c, i, cut, upper)` for an index-free offset `c`.
fn offset_range_product(offset: &RationalFunction, cut: i64, upper: &Expression) -> Expression {
    if let Some(val) = offset.as_constant() {
        if val.is_integer() {
            let j = i64::try_from(&val.to_integer()).expect("offset fits");
            assert!(cut + j >= 1, "zero factor left of the certified cut");
            return Expression::mul(vec![
                fact_shifted(upper, j),
                Expression::rational(Rational::one() / factorial_rational(cut + j - 1)),
            ]);
        }
    }
    let c_expr = Expression::from_rational_function(offset);
    let mut parts = vec![Expression::poch(
        Expression::add(vec![c_expr.clone(), Expression::one()]),
        upper.clone(),
    )];
    if cut > 1 {
        parts.push(Expression::pow(shifted_range_product(&c_expr, 1, cut - 1), -1));
    } else if cut < 1 {
        parts.push(shifted_range_product(&c_expr, cut, 0));
    }
    Expression::mul(parts)
}

/// `fact(upper + j)` written on `fact(upper)` times a polynomial shift.
fn fact_shifted(upper: &Expression, j: i64) -> Expression {
    let fact = Expression::fact(upper.clone());
    if j == 0 {
        return fact;
    }
    if j > 0 {
        Expression::mul(vec![fact, shifted_range_product(upper, 1, j)])
    } else {
        Expression::div(fact, shifted_range_product(upper, j + 1, 0))
    }
}

/// `prod(c + t, t, a, b)` for concrete `a <= b`.
fn shifted_range_product(c: &Expression, a: i64, b: i64) -> Expression {
    Expression::mul(
        (a..=b)
            .map(|t| Expression::add(vec![c.clone(), Expression::int(t)]))
            .collect(),
    )
}

fn poly_expr(p: &Polynomial) -> Expression {
    Expression::from_rational_function(&RationalFunction::from_poly(p.clone()))
}

/// `base^(upper - lo + 1)`: an integer power when the bound is concrete,
/// otherwise a product binder over a fresh index.
fn power_over_range(base: Expression, lo: i64, upper: &Expression) -> Expression {
    if base.is_one() {
        return Expression::one();
    }
    if let Some(u) = upper.as_rational() {
        if u.is_integer() {
            if let Ok(hi) = i64::try_from(&u.to_integer()) {
                return Expression::pow(base, hi - lo + 1);
            }
        }
    }
    let mut avoid = base.free_symbols();
    avoid.extend(upper.free_symbols());
    let index = ["t", "u", "v", "w"]
        .iter()
        .map(|name| Symbol::shift(name))
        .find(|s| !avoid.contains(s))
        .expect("a free index name");
    Expression::product(base, index, Expression::int(lo), upper.clone())
}
