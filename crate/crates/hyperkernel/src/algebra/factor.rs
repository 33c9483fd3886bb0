use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{poly_gcd, poly_gcd_many, q, rational_roots, Polynomial, Rational, Symbol};

/// Factorization of a polynomial with respect to one main variable:
/// `unit * content * prod(linear^e) * prod(quadratic^e) * residual == p`.
/// `content` is the part free of the main variable; linear factors have
/// degree 1 in it. Quadratics whose discriminant is a perfect square are
/// split into linears, so the quadratic bucket is only populated by
/// callers that refuse the split; everything else lands in `residual`.
#[derive(Clone, Debug)]
pub struct LinQuadFactors {
    pub unit: Rational,
    pub content: Polynomial,
    pub linear: Vec<(Polynomial, u32)>,
    pub quadratic: Vec<(Polynomial, u32)>,
    pub residual: Polynomial,
}

impl LinQuadFactors {
    pub fn recombine(&self) -> Polynomial {
        let mut acc = self.content.scale(&self.unit);
        for (f, e) in self.linear.iter().chain(&self.quadratic) {
            acc = &acc * &f.pow(*e);
        }
        &acc * &self.residual
    }
}

pub fn factor_lin_quad(p: &Polynomial, v: Symbol) -> LinQuadFactors {
    assert!(!p.is_zero(), "factoring the zero polynomial");
    let content = poly_gcd_many(p.coeffs_in(v).iter());
    let mut rest = p.exact_div(&content).unwrap();
    let mut linear: BTreeMap<Polynomial, u32> = BTreeMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x8f4a_2c1d);
    loop {
        while rest.contains_var(v) && rest.coeff_of(v, 0).is_zero() {
            rest = rest.exact_div(&Polynomial::var(v)).unwrap();
            *linear.entry(Polynomial::var(v)).or_default() += 1;
        }
        let d = rest.degree_in(v);
        if d == 0 {
            break;
        }
        if d == 1 {
            *linear.entry(rest.primitive().1).or_default() += 1;
            rest = Polynomial::one();
            break;
        }
        let cand = if d == 2 {
            split_quadratic(&rest, v).map(|(l1, _)| l1)
        } else {
            linear_factor_candidate(&rest, v, &mut rng)
        };
        match cand {
            Some(l) => {
                let mut extracted = false;
                while let Some(qt) = rest.exact_div(&l) {
                    rest = qt;
                    *linear.entry(l.clone()).or_default() += 1;
                    extracted = true;
                }
                assert!(extracted, "candidate factor does not divide");
            }
            None => break,
        }
    }
    let residual = if rest.degree_in(v) == 0 {
        Polynomial::one()
    } else {
        rest.primitive().1
    };
    let out = LinQuadFactors {
        unit: Rational::one(),
        content,
        linear: linear.into_iter().collect(),
        quadratic: Vec::new(),
        residual,
    };
    let recomb = out.recombine();
    let unit = p.leading_coeff() / recomb.leading_coeff();
    let out = LinQuadFactors { unit, ..out };
    assert_eq!(out.recombine(), *p, "factorization must recombine to the input");
    out
}

/// Full recursive factorization over all variables: rational unit times
/// irreducible-or-unsplit factors with multiplicities. Residual pieces
/// that no main-variable choice can split are returned whole.
pub fn full_factor(p: &Polynomial) -> (Rational, Vec<(Polynomial, u32)>) {
    assert!(!p.is_zero(), "factoring the zero polynomial");
    let mut unit = Rational::one();
    let mut done: BTreeMap<Polynomial, u32> = BTreeMap::new();
    let mut work: Vec<(Polynomial, u32)> = vec![(p.clone(), 1)];
    while let Some((cur, mult)) = work.pop() {
        let (u, pp) = cur.primitive();
        for _ in 0..mult {
            unit *= &u;
        }
        if pp.is_one() {
            continue;
        }
        let mut split = false;
        for v in pp.vars() {
            let f = factor_lin_quad(&pp, v);
            let trivial = f.content.is_one() && f.linear.is_empty() && f.quadratic.is_empty();
            if trivial {
                continue;
            }
            let whole_input = f.content.is_one()
                && f.residual.is_one()
                && f.quadratic.is_empty()
                && f.linear.len() == 1
                && f.linear[0].1 == 1;
            if whole_input {
                // pp is its own single linear factor: irreducible, done
                continue;
            }
            for _ in 0..mult {
                unit *= &f.unit;
            }
            if !f.content.is_one() {
                work.push((f.content, mult));
            }
            for (l, e) in f.linear {
                work.push((l, e * mult));
            }
            if !f.residual.is_one() {
                work.push((f.residual, mult));
            }
            split = true;
            break;
        }
        if !split {
            *done.entry(pp).or_default() += mult;
        }
    }
    (unit, done.into_iter().collect())
}

/// Squarefree part with respect to `v`, normalized primitive.
pub fn square_free_in(p: &Polynomial, v: Symbol) -> Polynomial {
    if !p.contains_var(v) {
        return p.primitive().1;
    }
    let g = poly_gcd(p, &p.derivative(v));
    p.exact_div(&g).unwrap().primitive().1
}

/// Exact square root of a polynomial, if it is a perfect square.
pub fn poly_sqrt(p: &Polynomial) -> Option<Polynomial> {
    if p.is_zero() {
        return Some(Polynomial::zero());
    }
    if let Some(c) = p.as_constant() {
        return rational_sqrt(&c).map(Polynomial::constant);
    }
    let v = *p.vars().iter().next().unwrap();
    let coeffs = p.coeffs_in(v);
    let d2 = coeffs.len() - 1;
    if d2 % 2 != 0 {
        return None;
    }
    let d = d2 / 2;
    let lead = poly_sqrt(&coeffs[d2])?;
    if lead.is_zero() {
        return None;
    }
    let two_lead = lead.scale(&q(2));
    let mut b = vec![Polynomial::zero(); d + 1];
    b[d] = lead;
    for j in (0..d).rev() {
        // coefficient of v^(d+j): c = 2 b_d b_j + sum over inner pairs
        let mut inner = Polynomial::zero();
        for i in (j + 1)..d {
            let i2 = d + j - i;
            if i2 > i || i2 <= j {
                continue;
            }
            let prod = &b[i] * &b[i2];
            inner = if i2 == i {
                &inner + &prod
            } else {
                &inner + &prod.scale(&q(2))
            };
        }
        let num = &coeffs[d + j] - &inner;
        b[j] = num.exact_div(&two_lead)?;
    }
    let root = Polynomial::from_coeffs_in(v, &b);
    if &root * &root == *p {
        Some(root)
    } else {
        None
    }
}

fn rational_sqrt(c: &Rational) -> Option<Rational> {
    if c.is_negative() {
        return None;
    }
    let int_sqrt = |n: &BigInt| -> Option<BigInt> {
        let s = n.sqrt();
        if &(&s * &s) == n {
            Some(s)
        } else {
            None
        }
    };
    let n = int_sqrt(c.numer())?;
    let d = int_sqrt(c.denom())?;
    Some(Rational::new(n, d))
}

/// Split a quadratic in `v` into two linear factors when its discriminant
/// is a perfect square in the coefficient ring.
fn split_quadratic(p: &Polynomial, v: Symbol) -> Option<(Polynomial, Polynomial)> {
    let cs = p.coeffs_in(v);
    let disc = &(&cs[1] * &cs[1]) - &(&cs[2] * &cs[0]).scale(&q(4));
    let s = poly_sqrt(&disc)?;
    let two_c2_v = Polynomial::var(v).scale(&q(2));
    let base = &two_c2_v * &cs[2];
    let l1 = normalize_in(&(&base + &(&cs[1] - &s)), v);
    let l2 = normalize_in(&(&base + &(&cs[1] + &s)), v);
    Some((l1, l2))
}

/// Strip the `v`-free polynomial content and the rational content.
fn normalize_in(p: &Polynomial, v: Symbol) -> Polynomial {
    let cont = poly_gcd_many(p.coeffs_in(v).iter());
    p.exact_div(&cont).unwrap().primitive().1
}

/// Search for a factor of degree 1 in `v` of a polynomial of `v`-degree
/// at least 3, by combining the rational-root bound over the coefficient
/// ring with random specialization of the remaining symbols.
fn linear_factor_candidate(p: &Polynomial, v: Symbol, rng: &mut ChaCha8Rng) -> Option<Polynomial> {
    let coeffs = p.coeffs_in(v);
    let c0 = coeffs[0].clone();
    let cd = coeffs.last().unwrap().clone();
    let others: Vec<Symbol> = p.vars().into_iter().filter(|&s| s != v).collect();
    if others.is_empty() {
        let roots = rational_roots(p, v)?;
        let r = roots.first()?;
        let den = Rational::from(r.denom().clone());
        let num = Rational::from(r.numer().clone());
        return Some(
            &Polynomial::var(v).scale(&den) - &Polynomial::constant(num),
        );
    }
    let (_, f0) = full_factor(&c0);
    let (_, fd) = full_factor(&cd);
    let b_cands = divisor_products(&f0, 256);
    let a_cands = divisor_products(&fd, 256);
    for _attempt in 0..24 {
        let mut bind = BTreeMap::new();
        for &s in &others {
            bind.insert(s, q(rng.gen_range(2..=60)));
        }
        let c0v = c0.eval(&bind).unwrap();
        let cdv = cd.eval(&bind).unwrap();
        if c0v.is_zero() || cdv.is_zero() {
            continue;
        }
        let pv = p.eval_partial(&bind);
        let roots = match rational_roots(&pv, v) {
            Some(r) => r,
            None => continue,
        };
        if roots.is_empty() {
            // a degree-preserving specialization with no rational root
            // rules out any linear factor over the coefficient field
            return None;
        }
        for r in &roots {
            for a_div in &a_cands {
                let a_val = a_div.eval(&bind).unwrap();
                if a_val.is_zero() {
                    continue;
                }
                for b_div in &b_cands {
                    let b_val = b_div.eval(&bind).unwrap();
                    if b_val.is_zero() {
                        continue;
                    }
                    let c = -(r * &a_val / &b_val);
                    if c.is_zero() {
                        continue;
                    }
                    let cand = &(&Polynomial::var(v) * a_div) + &b_div.scale(&c);
                    let cand = normalize_in(&cand, v);
                    if cand.degree_in(v) == 1 && p.exact_div(&cand).is_some() {
                        return Some(cand);
                    }
                }
            }
        }
        return None;
    }
    None
}

/// Products of sub-multisets of the given factors (capped).
fn divisor_products(factors: &[(Polynomial, u32)], cap: usize) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::one()];
    for (f, m) in factors {
        if f.is_constant() {
            continue;
        }
        let mut next = Vec::new();
        for d in &out {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..*m {
                acc = &acc * f;
                next.push(acc.clone());
                if next.len() >= cap {
                    break;
                }
            }
            if next.len() >= cap {
                break;
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sh(name: &str) -> Symbol {
        Symbol::shift(name)
    }
    fn pm(name: &str) -> Symbol {
        Symbol::param(name)
    }

    fn lin(v: Symbol, a: i64, b: i64) -> Polynomial {
        &Polynomial::var(v).scale(&q(a)) + &Polynomial::int(b)
    }

    #[test]
    fn consecutive_linear_factors() {
        // x(x+1)(x+2) factors completely
        let x = sh("x");
        let p = &(&Polynomial::var(x) * &lin(x, 1, 1)) * &lin(x, 1, 2);
        let f = factor_lin_quad(&p, x);
        let mut names: Vec<Polynomial> = f.linear.iter().map(|(l, _)| l.clone()).collect();
        names.sort();
        let mut want = vec![Polynomial::var(x), lin(x, 1, 1), lin(x, 1, 2)];
        want.sort();
        assert_eq!(names, want);
        assert!(f.residual.is_one());
        assert!(f.content.is_one());
        assert!(f.unit.is_one());
    }

    #[test]
    fn irreducible_quadratic_stays_residual() {
        // 1 - i + i^2 has non-square discriminant
        let i = sh("i");
        let p = &(&Polynomial::monomial(crate::algebra::Monomial::power(i, 2), q(1))
            - &Polynomial::var(i))
            + &Polynomial::int(1);
        let f = factor_lin_quad(&p, i);
        assert!(f.linear.is_empty());
        assert_eq!(f.residual, p);
    }

    #[test]
    fn constant_goes_to_unit() {
        let v = sh("v");
        let f = factor_lin_quad(&Polynomial::constant(crate::algebra::qr(7, 3)), v);
        assert_eq!(f.unit, crate::algebra::qr(7, 3));
        assert!(f.residual.is_one() && f.content.is_one() && f.linear.is_empty());
    }

    #[test]
    fn parametric_quadratic_splits() {
        // (i + a - 1)(i + b - 1) expanded, discriminant (a-b)^2
        let i = sh("i");
        let (a, b) = (pm("a"), pm("b"));
        let fa = &(&Polynomial::var(i) + &Polynomial::var(a)) - &Polynomial::int(1);
        let fb = &(&Polynomial::var(i) + &Polynomial::var(b)) - &Polynomial::int(1);
        let p = &fa * &fb;
        let f = factor_lin_quad(&p, i);
        assert_eq!(f.linear.len(), 2);
        assert!(f.residual.is_one());
        let got: Vec<Polynomial> = f.linear.iter().map(|(l, _)| l.clone()).collect();
        assert!(got.contains(&fa) && got.contains(&fb));
    }

    #[test]
    fn cubic_with_shift_parameter_mix() {
        // (m + a + n)(m + c + n)(m + b) in main variable m
        let (m, n) = (sh("m"), sh("n"));
        let (a, b, c) = (pm("a"), pm("b"), pm("c"));
        let f1 = &(&Polynomial::var(m) + &Polynomial::var(a)) + &Polynomial::var(n);
        let f2 = &(&Polynomial::var(m) + &Polynomial::var(c)) + &Polynomial::var(n);
        let f3 = &Polynomial::var(m) + &Polynomial::var(b);
        let p = &(&f1 * &f2) * &f3;
        let f = factor_lin_quad(&p, m);
        assert_eq!(f.linear.len(), 3);
        assert!(f.residual.is_one());
        let got: Vec<Polynomial> = f.linear.iter().map(|(l, _)| l.clone()).collect();
        assert!(got.contains(&f1) && got.contains(&f2) && got.contains(&f3));
    }

    #[test]
    fn content_and_leading_parameter() {
        // (d*i + c - d + g*n) * i in main variable i, content-free check
        let i = sh("i");
        let n = sh("n");
        let (c, d, g) = (pm("c"), pm("d"), pm("g"));
        let factor = Polynomial::from_terms(vec![
            (crate::algebra::Monomial::var(d).mul(&crate::algebra::Monomial::var(i)), q(1)),
            (crate::algebra::Monomial::var(c), q(1)),
            (crate::algebra::Monomial::var(d), q(-1)),
            (crate::algebra::Monomial::var(g).mul(&crate::algebra::Monomial::var(n)), q(1)),
        ]);
        let p = &factor * &Polynomial::var(i);
        let f = factor_lin_quad(&p, i);
        let got: Vec<Polynomial> = f.linear.iter().map(|(l, _)| l.clone()).collect();
        assert!(got.contains(&Polynomial::var(i)));
        assert!(got.contains(&factor));
        assert!(f.residual.is_one());
    }

    #[test]
    fn multiplicities_tracked() {
        let x = sh("x");
        let p = &lin(x, 1, 1).pow(3) * &lin(x, 2, -1).pow(2);
        let f = factor_lin_quad(&p, x);
        let mut mults: Vec<(Polynomial, u32)> = f.linear.clone();
        mults.sort();
        let mut want = vec![(lin(x, 1, 1), 3), (lin(x, 2, -1), 2)];
        want.sort();
        assert_eq!(mults, want);
    }

    #[test]
    fn sqrt_of_squares() {
        let (n, k) = (sh("n"), sh("k"));
        let s = &(&Polynomial::var(n) + &Polynomial::var(k)) + &Polynomial::int(1);
        let p = &s * &s;
        assert_eq!(poly_sqrt(&p), Some(s));
        let not_square = &p + &Polynomial::int(1);
        assert_eq!(poly_sqrt(&not_square), None);
    }

    #[test]
    fn squarefree_part() {
        let n = sh("n");
        let p = &lin(n, 1, 1).pow(2) * &lin(n, 1, 2);
        assert_eq!(square_free_in(&p, n), &lin(n, 1, 1) * &lin(n, 1, 2));
    }

    #[test]
    fn full_factor_multivariate() {
        let (n, k) = (sh("n"), sh("k"));
        let s = &Polynomial::var(n) + &Polynomial::var(k);
        let quad = Polynomial::from_terms(vec![
            (crate::algebra::Monomial::power(n, 2), q(1)),
            (crate::algebra::Monomial::var(k), q(1)),
            (crate::algebra::Monomial::one(), q(6)),
        ]);
        let p = &(&Polynomial::var(k).pow(2) * &s) * &quad;
        let (u, factors) = full_factor(&p);
        assert!(u.is_one());
        let mut sorted = factors.clone();
        sorted.sort();
        let mut want = vec![(Polynomial::var(k), 2), (s, 1), (quad, 1)];
        want.sort();
        assert_eq!(sorted, want);
    }

    #[test]
    fn factoring_across_variables() {
        // (k + n^2)(k + n^2 + 1) is quartic in n but quadratic in k
        let (n, k) = (sh("n"), sh("k"));
        let a = &Polynomial::var(k) + &Polynomial::monomial(crate::algebra::Monomial::power(n, 2), q(1));
        let b = &a + &Polynomial::int(1);
        let p = &a * &b;
        let (_, factors) = full_factor(&p);
        let mut got: Vec<Polynomial> = factors.iter().map(|(f, _)| f.clone()).collect();
        got.sort();
        let mut want = vec![a, b];
        want.sort();
        assert_eq!(got, want);
    }
}
