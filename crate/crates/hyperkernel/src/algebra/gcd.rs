use super::{Polynomial, Symbol};

/// Greatest common divisor of multivariate polynomials over the rationals,
/// normalised to coprime integer coefficients with a positive leading
/// coefficient. Nonzero constants are units, so their gcd is 1.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return normalise(b);
    }
    if b.is_zero() {
        return normalise(a);
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one();
    }
    let vars: Vec<Symbol> = a.vars().union(&b.vars()).copied().collect();
    let v = *vars
        .iter()
        .min_by_key(|&&v| a.degree_in(v).max(b.degree_in(v)))
        .unwrap();
    if !a.contains_var(v) || !b.contains_var(v) {
        // v occurs in only one input; the gcd lives in the v-free content.
        let ca = content_in(a, v);
        let cb = content_in(b, v);
        return poly_gcd(&ca, &cb);
    }
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let pa = div_coeffs(a.coeffs_in(v), &ca);
    let pb = div_coeffs(b.coeffs_in(v), &cb);
    let cont = poly_gcd(&ca, &cb);
    let prim = subresultant_gcd(pa, pb, v);
    normalise(&(&cont * &prim))
}

/// gcd of an arbitrary list; zero for an empty list.
pub fn poly_gcd_many<'a>(polys: impl IntoIterator<Item = &'a Polynomial>) -> Polynomial {
    let mut acc = Polynomial::zero();
    for p in polys {
        acc = poly_gcd(&acc, p);
        if acc.is_one() {
            break;
        }
    }
    acc
}

pub fn poly_lcm(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero();
    }
    let g = poly_gcd(a, b);
    let q = a.exact_div(&g).expect("gcd divides its input");
    normalise(&(&q * b))
}

fn normalise(p: &Polynomial) -> Polynomial {
    p.primitive().1
}

/// gcd of the coefficients of `p` with respect to `v`.
fn content_in(p: &Polynomial, v: Symbol) -> Polynomial {
    poly_gcd_many(p.coeffs_in(v).iter())
}

fn div_coeffs(coeffs: Vec<Polynomial>, d: &Polynomial) -> Vec<Polynomial> {
    coeffs
        .into_iter()
        .map(|c| c.exact_div(d).expect("content divides coefficients"))
        .collect()
}

fn deg(p: &[Polynomial]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

fn trim(mut p: Vec<Polynomial>) -> Vec<Polynomial> {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

/// Pseudo-remainder of `a` by `b` as dense coefficient vectors in one
/// variable: lc(b)^(deg a - deg b + 1) * a = q * b + rem.
fn pseudo_rem(a: &[Polynomial], b: &[Polynomial]) -> Vec<Polynomial> {
    let db = deg(b).expect("nonzero divisor");
    let lcb = b[db].clone();
    let mut r: Vec<Polynomial> = a.to_vec();
    let da = deg(&r).expect("nonzero dividend");
    let mut e = (da - db + 1) as i64;
    while let Some(dr) = deg(&r) {
        if dr < db {
            break;
        }
        let lead = r[dr].clone();
        let shift = dr - db;
        let mut next = vec![Polynomial::zero(); dr.max(db + shift) + 1];
        for (i, c) in r.iter().enumerate() {
            next[i] = &lcb * c;
        }
        for (i, c) in b.iter().enumerate() {
            next[i + shift] = &next[i + shift] - &(&lead * c);
        }
        r = trim(next);
        e -= 1;
    }
    for _ in 0..e {
        for c in r.iter_mut() {
            *c = &lcb * c;
        }
    }
    r
}

/// Primitive gcd of two primitive univariate-in-`v` polynomials given as
/// coefficient vectors, via the subresultant remainder sequence.
fn subresultant_gcd(a: Vec<Polynomial>, b: Vec<Polynomial>, v: Symbol) -> Polynomial {
    let (mut a, mut b) = (trim(a), trim(b));
    if deg(&a) < deg(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = Polynomial::one();
    let mut h = Polynomial::one();
    loop {
        let da = deg(&a).unwrap();
        let db = match deg(&b) {
            Some(d) => d,
            None => {
                let p = Polynomial::from_coeffs_in(v, &a);
                let c = content_in(&p, v);
                return p.exact_div(&c).unwrap();
            }
        };
        if db == 0 {
            return Polynomial::one();
        }
        let delta = (da - db) as u32;
        let r = pseudo_rem(&a, &b);
        let divisor = &g * &h.pow(delta);
        a = b;
        b = r
            .into_iter()
            .map(|c| c.exact_div(&divisor).expect("subresultant division is exact"))
            .collect();
        b = trim(b);
        g = a[deg(&a).unwrap()].clone();
        if delta == 0 {
            // h unchanged when the degree drop is zero... the update rule
            // h = h^(1-delta) g^delta gives h for delta = 0.
        } else {
            let gd = g.pow(delta);
            h = if delta == 1 {
                gd
            } else {
                gd.exact_div(&h.pow(delta - 1)).expect("subresultant h update")
            };
        }
    }
}

/// Convenience: squarefree-aware divisibility count. Returns the largest
/// `k` with `d^k | p` (0 when `d` does not divide `p` or is a unit).
pub fn multiplicity(p: &Polynomial, d: &Polynomial) -> u32 {
    if d.is_constant() {
        return 0;
    }
    let mut k = 0;
    let mut cur = p.clone();
    while let Some(q) = cur.exact_div(d) {
        k += 1;
        cur = q;
        if cur.is_constant() {
            break;
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    fn n() -> Symbol {
        Symbol::shift("n")
    }
    fn k() -> Symbol {
        Symbol::shift("k")
    }

    fn lin(v: Symbol, a: i64, b: i64) -> Polynomial {
        &Polynomial::var(v).scale(&q(a)) + &Polynomial::int(b)
    }

    #[test]
    fn univariate_gcd() {
        // (n+1)^2 (n-3) vs (n+1)(n+5) share n+1
        let a = &(&lin(n(), 1, 1) * &lin(n(), 1, 1)) * &lin(n(), 1, -3);
        let b = &lin(n(), 1, 1) * &lin(n(), 1, 5);
        assert_eq!(poly_gcd(&a, &b), lin(n(), 1, 1));
    }

    #[test]
    fn coprime_gcd_is_one() {
        let a = lin(n(), 1, 1);
        let b = lin(n(), 1, 2);
        assert_eq!(poly_gcd(&a, &b), Polynomial::one());
        assert_eq!(poly_gcd(&a, &Polynomial::int(7)), Polynomial::one());
    }

    #[test]
    fn multivariate_gcd() {
        // (n + k)(n - k) and (n + k)(n + 1) share n + k
        let s = &Polynomial::var(n()) + &Polynomial::var(k());
        let d = &Polynomial::var(n()) - &Polynomial::var(k());
        let a = &s * &d;
        let b = &s * &lin(n(), 1, 1);
        assert_eq!(poly_gcd(&a, &b), s);
    }

    #[test]
    fn content_is_shared() {
        // k(n+1) and k(n+2) share exactly k
        let a = &Polynomial::var(k()) * &lin(n(), 1, 1);
        let b = &Polynomial::var(k()) * &lin(n(), 1, 2);
        assert_eq!(poly_gcd(&a, &b), Polynomial::var(k()));
    }

    #[test]
    fn gcd_normalisation() {
        // scale invariance and positive leading coefficient
        let a = lin(n(), -2, -2);
        let b = lin(n(), 4, 4);
        assert_eq!(poly_gcd(&a, &b), lin(n(), 1, 1));
    }

    #[test]
    fn lcm_and_multiplicity() {
        let a = lin(n(), 1, 1);
        let sq = &a * &a;
        let p = &sq * &lin(n(), 1, 2);
        assert_eq!(multiplicity(&p, &a), 2);
        let l = poly_lcm(&sq, &(&a * &lin(n(), 1, 5)));
        assert_eq!(l, &sq * &lin(n(), 1, 5));
    }
}
