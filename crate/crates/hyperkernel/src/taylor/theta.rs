use std::collections::BTreeMap;

use crate::algebra::{q, Monomial, Polynomial, Rational, Symbol};

use super::DiffOperator;

/// Stirling number of the second kind S(k, j): the number of ways to
/// partition k objects into j nonempty blocks.
pub fn stirling2(k: u32, j: u32) -> Rational {
    if j > k {
        return q(0);
    }
    if k == 0 {
        return q(1);
    }
    if j == 0 {
        return q(0);
    }
    // S(k, j) = j S(k-1, j) + S(k-1, j-1)
    let mut row: Vec<Rational> = vec![q(1)];
    for _ in 1..=k {
        let mut next = vec![q(0); row.len() + 1];
        for (i, v) in row.iter().enumerate() {
            next[i] = &next[i] + &(v * &q(i as i64));
            next[i + 1] = &next[i + 1] + v;
        }
        row = next;
    }
    row.get(j as usize).cloned().unwrap_or_else(|| q(0))
}

/// Expands theta^k, with theta = x d/dx, into the sum of
/// S(k, j) x^j d^j over j. Returned as (j, S(k, j)) pairs with nonzero
/// coefficients; theta^0 yields [(0, 1)].
pub fn theta_expand(power: u32) -> Vec<(u32, Rational)> {
    if power == 0 {
        return vec![(0, q(1))];
    }
    (1..=power)
        .map(|j| (j, stirling2(power, j)))
        .filter(|(_, c)| *c != q(0))
        .collect()
}

/// Rewrites a polynomial in the theta variables as a differential operator
/// with polynomial coefficients. `theta_vars[i]` stands for
/// x_i d/dx_i, with x_i = `series_vars[i]`; every other symbol in the
/// polynomial rides along inside the coefficients.
pub fn theta_to_operator(
    p: &Polynomial,
    theta_vars: &[Symbol],
    series_vars: &[Symbol],
) -> DiffOperator {
    assert_eq!(theta_vars.len(), series_vars.len(), "theta arity mismatch");
    let r = theta_vars.len();
    let mut acc: BTreeMap<Vec<u32>, Polynomial> = BTreeMap::new();
    for (mono, coeff) in p.terms() {
        let mut theta_exps = vec![0u32; r];
        let mut rest: Vec<(Symbol, u32)> = Vec::new();
        for &(s, e) in mono.factors() {
            match theta_vars.iter().position(|t| *t == s) {
                Some(i) => theta_exps[i] = e,
                None => rest.push((s, e)),
            }
        }
        let base = Polynomial::monomial(Monomial::from_pairs(rest), coeff.clone());
        // Cross product of the per-variable expansions.
        let mut partial: Vec<(Vec<u32>, Polynomial)> = vec![(vec![0u32; r], base)];
        for i in 0..r {
            let expansion = theta_expand(theta_exps[i]);
            let mut next = Vec::with_capacity(partial.len() * expansion.len());
            for (d, c) in &partial {
                for (j, s2) in &expansion {
                    let mut d2 = d.clone();
                    d2[i] = *j;
                    let xj = Polynomial::monomial(
                        Monomial::power(series_vars[i], *j),
                        s2.clone(),
                    );
                    next.push((d2, c * &xj));
                }
            }
            partial = next;
        }
        for (d, c) in partial {
            let slot = acc.entry(d).or_insert_with(Polynomial::zero);
            *slot = &*slot + &c;
        }
    }
    DiffOperator::new(r, acc.into_iter().map(|(d, c)| (c, d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_theta_expansions() {
        assert_eq!(theta_expand(0), vec![(0, q(1))]);
        assert_eq!(theta_expand(1), vec![(1, q(1))]);
        assert_eq!(theta_expand(2), vec![(1, q(1)), (2, q(1))]);
        assert_eq!(theta_expand(3), vec![(1, q(1)), (2, q(3)), (3, q(1))]);
        assert_eq!(
            theta_expand(4),
            vec![(1, q(1)), (2, q(7)), (3, q(6)), (4, q(1))]
        );
        assert_eq!(
            theta_expand(5),
            vec![(1, q(1)), (2, q(15)), (3, q(25)), (4, q(10)), (5, q(1))]
        );
    }

    #[test]
    fn stirling_recurrence() {
        for k in 0..10u32 {
            for j in 1..=k + 1 {
                let lhs = stirling2(k + 1, j);
                let rhs = &(&q(j as i64) * &stirling2(k, j)) + &stirling2(k, j - 1);
                assert_eq!(lhs, rhs, "S({},{})", k + 1, j);
            }
        }
    }

    #[test]
    fn theta_operator_on_two_variables() {
        // theta_x theta_y -> x y dx dy, and theta_x^2 -> x dx + x^2 dx^2.
        let m = Symbol::shift("m");
        let n = Symbol::shift("n");
        let x = Symbol::series("x");
        let y = Symbol::series("y");
        let p = &Polynomial::var(m) * &Polynomial::var(n);
        let op = theta_to_operator(&p, &[m, n], &[x, y]);
        let xy = &Polynomial::var(x) * &Polynomial::var(y);
        assert_eq!(op, DiffOperator::new(2, vec![(xy, vec![1, 1])]));

        let p2 = &Polynomial::var(m) * &Polynomial::var(m);
        let op2 = theta_to_operator(&p2, &[m, n], &[x, y]);
        let xv = Polynomial::var(x);
        assert_eq!(
            op2,
            DiffOperator::new(
                2,
                vec![(xv.clone(), vec![1, 0]), (&xv * &xv, vec![2, 0])]
            )
        );
    }

    #[test]
    fn theta_operator_keeps_parameters() {
        // (a + theta) -> a + x dx with a symbolic.
        let nv = Symbol::shift("n");
        let x = Symbol::series("x");
        let a = Symbol::param("a");
        let p = &Polynomial::var(nv) + &Polynomial::var(a);
        let op = theta_to_operator(&p, &[nv], &[x]);
        assert_eq!(
            op,
            DiffOperator::new(
                1,
                vec![
                    (Polynomial::var(a), vec![0]),
                    (Polynomial::var(x), vec![1]),
                ]
            )
        );
    }
}
