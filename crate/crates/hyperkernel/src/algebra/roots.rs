use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{
    factor_lin_quad, q_is_integer, q_to_i64, square_free_in, Polynomial, Rational,
    RationalFunction, Symbol, SymbolKind,
};

/// Result of an exact integer-root search. `Exact` is the complete set.
/// `Parametric` arises when extra symbols occur but every factor is
/// linear in the root variable: the integer roots listed are exact and
/// the remaining roots depend on parameters (generically non-integer).
/// `Undecidable` means the set cannot be determined; callers fall back to
/// scanning a fixed window.
#[derive(Clone, Debug, PartialEq)]
pub enum IntegerRoots {
    Exact(Vec<i64>),
    Parametric {
        integers: Vec<i64>,
        generic: Vec<RationalFunction>,
    },
    Undecidable,
}

/// All integer roots of `p` with respect to `v`. Fully decided when `p`
/// is univariate in `v` over the rationals; with extra symbols, decided
/// only when every factor involving `v` is linear in it.
pub fn integer_roots(p: &Polynomial, v: Symbol) -> IntegerRoots {
    if p.is_zero() {
        return IntegerRoots::Undecidable;
    }
    if !p.contains_var(v) {
        return IntegerRoots::Exact(vec![]);
    }
    let sf = square_free_in(p, v);
    if sf.vars().into_iter().any(|s| s != v) {
        return multivariate_integer_roots(&sf, v);
    }
    univariate_integer_roots(&sf, v)
}

fn multivariate_integer_roots(sf: &Polynomial, v: Symbol) -> IntegerRoots {
    let f = factor_lin_quad(sf, v);
    if !f.residual.is_one() || !f.quadratic.is_empty() {
        return IntegerRoots::Undecidable;
    }
    let mut integers = Vec::new();
    let mut generic = Vec::new();
    for (l, _) in &f.linear {
        let cs = l.coeffs_in(v);
        let root = RationalFunction::new(-&cs[0], cs[1].clone());
        if let Some(c) = root.as_constant() {
            if q_is_integer(&c) {
                if let Some(r) = q_to_i64(&c) {
                    integers.push(r);
                } else {
                    return IntegerRoots::Undecidable;
                }
            }
            continue;
        }
        let has_param = root
            .vars()
            .into_iter()
            .any(|s| s.kind() == SymbolKind::Parameter);
        if has_param {
            generic.push(root);
        } else {
            // the root moves with another shift or series variable and
            // can hit integers; the exact set is not enumerable
            return IntegerRoots::Undecidable;
        }
    }
    integers.sort_unstable();
    integers.dedup();
    if generic.is_empty() {
        IntegerRoots::Exact(integers)
    } else {
        IntegerRoots::Parametric { integers, generic }
    }
}

fn univariate_integer_roots(p: &Polynomial, v: Symbol) -> IntegerRoots {
    let coeffs = match int_coeffs(p, v) {
        Some(c) => c,
        None => return IntegerRoots::Undecidable,
    };
    let k0 = coeffs.iter().position(|c| !c.is_zero()).unwrap();
    let mut roots = Vec::new();
    if k0 > 0 {
        roots.push(0);
    }
    let reduced = &coeffs[k0..];
    if reduced.len() == 1 {
        roots.sort_unstable();
        return IntegerRoots::Exact(roots);
    }
    let trailing = reduced[0].magnitude().clone();
    if let Some(t) = trailing.to_u64() {
        for d in divisors(t) {
            let d = match i64::try_from(d) {
                Ok(d) => d,
                Err(_) => continue,
            };
            for &cand in &[d, -d] {
                if eval_int(reduced, cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
        roots.sort_unstable();
        roots.dedup();
        return IntegerRoots::Exact(roots);
    }
    // Trailing coefficient too large to factor; scan when the root bound
    // is small, otherwise give up.
    match cauchy_bound(reduced) {
        Some(b) if b <= 1 << 16 => {
            for cand in -(b as i64)..=(b as i64) {
                if cand != 0 && eval_int(reduced, cand).is_zero() {
                    roots.push(cand);
                }
            }
            roots.sort_unstable();
            roots.dedup();
            IntegerRoots::Exact(roots)
        }
        _ => IntegerRoots::Undecidable,
    }
}

/// All rational roots, or `None` when the candidate set cannot be
/// enumerated. Same univariate contract as `integer_roots`.
pub fn rational_roots(p: &Polynomial, v: Symbol) -> Option<Vec<Rational>> {
    if p.is_zero() {
        return None;
    }
    let coeffs = int_coeffs(p, v)?;
    let k0 = coeffs.iter().position(|c| !c.is_zero()).unwrap();
    let mut roots = Vec::new();
    if k0 > 0 {
        roots.push(Rational::zero());
    }
    let reduced = &coeffs[k0..];
    if reduced.len() == 1 {
        return Some(roots);
    }
    let t = reduced[0].magnitude().to_u64()?;
    let l = reduced[reduced.len() - 1].magnitude().to_u64()?;
    let num_divs = divisors(t);
    let den_divs = divisors(l);
    for &nd in &num_divs {
        for &dd in &den_divs {
            if num_integer::Integer::gcd(&nd, &dd) != 1 {
                continue;
            }
            for sign in [1i64, -1] {
                let cand = Rational::new(
                    BigInt::from(sign) * BigInt::from(nd),
                    BigInt::from(dd),
                );
                if eval_rat(reduced, &cand).is_zero() {
                    roots.push(cand.clone());
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    Some(roots)
}

/// Coefficient vector of `p` in `v`, scaled to integers. `None` when a
/// coefficient still contains a symbol.
fn int_coeffs(p: &Polynomial, v: Symbol) -> Option<Vec<BigInt>> {
    let rat: Vec<Rational> = p
        .coeffs_in(v)
        .into_iter()
        .map(|c| c.as_constant())
        .collect::<Option<Vec<_>>>()?;
    let mut lcm = num_bigint::BigInt::from(1);
    for c in &rat {
        lcm = num_integer::Integer::lcm(&lcm, c.denom());
    }
    Some(
        rat.into_iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect(),
    )
}

fn eval_int(coeffs: &[BigInt], x: i64) -> BigInt {
    let x = BigInt::from(x);
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = acc * &x + c;
    }
    acc
}

fn eval_rat(coeffs: &[BigInt], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + Rational::from(c.clone());
    }
    acc
}

/// 1 + max |a_i / a_d| rounded up; every root has absolute value below it.
fn cauchy_bound(coeffs: &[BigInt]) -> Option<u64> {
    let lead = coeffs.last().unwrap().magnitude();
    let mut best: u64 = 0;
    for c in &coeffs[..coeffs.len() - 1] {
        let ratio = (c.magnitude() + lead - 1u32) / lead;
        best = best.max(ratio.to_u64()?);
    }
    Some(best + 1)
}

/// All divisors of `n` (n >= 1).
fn divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return vec![];
    }
    let mut divs = vec![1u64];
    for (p, e) in factor_u64(n) {
        let prev = divs.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for d in &prev {
                divs.push(d * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut d = 7u64;
    let wheel = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut w = 0;
    while d <= 1 << 20 && d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += wheel[w];
        w = (w + 1) % wheel.len();
    }
    if n > 1 {
        let mut stack = vec![n];
        let mut bigs = Vec::new();
        while let Some(m) = stack.pop() {
            if m == 1 {
                continue;
            }
            if is_prime_u64(m) {
                bigs.push(m);
                continue;
            }
            let f = pollard_rho(m);
            stack.push(f);
            stack.push(m / f);
        }
        bigs.sort_unstable();
        let mut i = 0;
        while i < bigs.len() {
            let p = bigs[i];
            let mut e = 0;
            while i < bigs.len() && bigs[i] == p {
                e += 1;
                i += 1;
            }
            out.push((p, e));
        }
        out.sort_unstable();
    }
    out
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent-style rho; `n` must be odd, composite, with no factor below 2^20.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut count = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = num_integer::Integer::gcd(&x.abs_diff(y), &n);
            count += 1;
            if count > 1 << 24 {
                break;
            }
        }
        if d != n && d != 1 {
            return d;
        }
        c += 1;
    }
}
