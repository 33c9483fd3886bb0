use std::collections::BTreeMap;

use crate::algebra::{Monomial, Polynomial, Symbol, SymbolKind};
use crate::hypsolve::HypSystem;

use super::theta::theta_to_operator;
use super::{DiffOperator, PLDE};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConversionError {
    /// An operator coefficient involves a shift-kind symbol, so it cannot
    /// be read as a polynomial in the series variables.
    NonPolynomialCoefficient { symbol: Symbol },
    ArityMismatch { expected: usize, found: usize },
}

impl std::fmt::Display for ConversionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConversionError::NonPolynomialCoefficient { symbol } => {
                write!(f, "operator coefficient contains index symbol {symbol}")
            }
            ConversionError::ArityMismatch { expected, found } => {
                write!(f, "expected arity {expected}, found {found}")
            }
        }
    }
}

impl std::error::Error for ConversionError {}

/// Coefficient comparison of the formal power series ansatz: carries a
/// differential operator to the difference equations obeyed by the series
/// coefficients. A term c x^g d^d contributes, at shift s = d - g, the
/// coefficient c multiplied by the falling factorial of (n + s) of length
/// d in every coordinate. The result is normalized to minimal support
/// (shifts translated so each coordinate starts at zero), cleared of
/// polynomial content, and sign-fixed.
///
/// The zero operator yields the trivial equation 0 = 0.
pub fn find_re(
    op: &DiffOperator,
    series_vars: &[Symbol],
    index_vars: &[Symbol],
) -> Result<Vec<PLDE>, ConversionError> {
    let r = series_vars.len();
    if index_vars.len() != r {
        return Err(ConversionError::ArityMismatch { expected: r, found: index_vars.len() });
    }
    if op.arity() != r {
        return Err(ConversionError::ArityMismatch { expected: r, found: op.arity() });
    }
    if op.is_zero() {
        return Ok(vec![PLDE::trivial(r)]);
    }
    for (coeff, _) in op.terms() {
        for v in coeff.vars() {
            if v.kind() == SymbolKind::Shift {
                return Err(ConversionError::NonPolynomialCoefficient { symbol: v });
            }
        }
    }

    let mut acc: BTreeMap<Vec<i64>, Polynomial> = BTreeMap::new();
    for (coeff, d) in op.terms() {
        for (mono, c) in coeff.terms() {
            let mut g = vec![0u32; r];
            let mut rest: Vec<(Symbol, u32)> = Vec::new();
            for &(s, e) in mono.factors() {
                match series_vars.iter().position(|x| *x == s) {
                    Some(i) => g[i] = e,
                    None => rest.push((s, e)),
                }
            }
            let shift: Vec<i64> =
                d.iter().zip(&g).map(|(&di, &gi)| di as i64 - gi as i64).collect();
            let mut term = Polynomial::monomial(Monomial::from_pairs(rest), c.clone());
            for j in 0..r {
                let nj = Polynomial::var(index_vars[j]);
                for t in 0..d[j] {
                    let factor = &nj + &Polynomial::int(shift[j] - t as i64);
                    term = &term * &factor;
                }
            }
            let slot = acc.entry(shift).or_insert_with(Polynomial::zero);
            *slot = &*slot + &term;
        }
    }
    acc.retain(|_, c| !c.is_zero());
    if acc.is_empty() {
        return Ok(vec![PLDE::trivial(r)]);
    }

    // Translate so every coordinate's minimal shift is zero; the
    // coefficients move along with the index substitution n -> n - min.
    let mins: Vec<i64> = (0..r)
        .map(|j| acc.keys().map(|s| s[j]).min().unwrap())
        .collect();
    let moves: Vec<(Symbol, i64)> = index_vars
        .iter()
        .copied()
        .zip(mins.iter().map(|m| -m))
        .collect();
    let terms = acc.into_iter().map(|(s, c)| {
        let shifted: Vec<i64> = s.iter().zip(&mins).map(|(a, m)| a - m).collect();
        (c.shift_all(&moves), shifted)
    });
    let plde = PLDE::new(r, terms, Polynomial::zero()).normalized();
    Ok(vec![plde])
}

/// Builds the annihilating operator system of a first-order hypergeometric
/// ratio system: for each coordinate the operator
/// x_i s_i(theta) - t_i(theta_1, ..., theta_i - 1, ..., theta_r),
/// expanded into polynomial coefficients via the Stirling identities.
pub fn find_de(sys: &HypSystem, series_vars: &[Symbol]) -> Vec<DiffOperator> {
    assert_eq!(
        series_vars.len(),
        sys.arity(),
        "series variable list must match system arity"
    );
    let vars = sys.vars();
    (0..sys.arity())
        .map(|i| {
            let s_part = theta_to_operator(sys.s(i), vars, series_vars)
                .scale(&Polynomial::var(series_vars[i]));
            let t_shifted = sys.t(i).shift(vars[i], -1);
            let t_part = theta_to_operator(&t_shifted, vars, series_vars);
            s_part.sub(&t_part)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, RationalFunction};

    fn sym(name: &str) -> Symbol {
        Symbol::param(name)
    }

    fn v(s: Symbol) -> Polynomial {
        Polynomial::var(s)
    }

    fn gauss_operator() -> (DiffOperator, Symbol) {
        // x(1-x) d^2 + (A1 + B1 x) d + C
        let x = Symbol::series("x");
        let (a1, b1, c) = (sym("A1"), sym("B1"), sym("C"));
        let xv = v(x);
        let op = DiffOperator::new(
            1,
            vec![
                (&xv - &(&xv * &xv), vec![2]),
                (&v(a1) + &(&v(b1) * &xv), vec![1]),
                (v(c), vec![0]),
            ],
        );
        (op, x)
    }

    #[test]
    fn gauss_recurrence() {
        let (op, x) = gauss_operator();
        let n = Symbol::shift("n");
        let got = find_re(&op, &[x], &[n]).unwrap();
        assert_eq!(got.len(), 1);
        let (a1, b1, c) = (sym("A1"), sym("B1"), sym("C"));
        let nv = v(n);
        // (C + n(1 - n + B1)) f[n] + (1 + n)(n + A1) f[n + 1] = 0
        let c0 = &v(c) + &(&nv * &(&(&Polynomial::one() - &nv) + &v(b1)));
        let c1 = &(&Polynomial::one() + &nv) * &(&nv + &v(a1));
        let expect = PLDE::new(1, vec![(c0, vec![0]), (c1, vec![1])], Polynomial::zero())
            .normalized();
        assert_eq!(got[0], expect);
    }

    #[test]
    fn f32_recurrence() {
        // x^2(1-x) d^3 + x(A2 + B2 x) d^2 + (A1 + B1 x) d + C
        let x = Symbol::series("x");
        let n = Symbol::shift("n");
        let (a1, a2, b1, b2, c) = (sym("A1"), sym("A2"), sym("B1"), sym("B2"), sym("C"));
        let xv = v(x);
        let x2 = &xv * &xv;
        let op = DiffOperator::new(
            1,
            vec![
                (&x2 - &(&x2 * &xv), vec![3]),
                (&(&xv * &v(a2)) + &(&x2 * &v(b2)), vec![2]),
                (&v(a1) + &(&xv * &v(b1)), vec![1]),
                (v(c), vec![0]),
            ],
        );
        let got = find_re(&op, &[x], &[n]).unwrap();
        let nv = v(n);
        let one = Polynomial::one();
        // (n B1 + (n-1)n B2 + C - (n-2)(n-1)n) f[n]
        //   + ((n+1)A1 + n(n+1)A2 + (n-1)n(n+1)) f[n+1] = 0
        let nm1 = &nv - &one;
        let nm2 = &nv - &Polynomial::int(2);
        let np1 = &nv + &one;
        let c0 = &(&(&nv * &v(b1)) + &(&(&nm1 * &nv) * &v(b2)))
            + &(&v(c) - &(&(&nm2 * &nm1) * &nv));
        let c1 = &(&(&np1 * &v(a1)) + &(&(&nv * &np1) * &v(a2))) + &(&(&nm1 * &nv) * &np1);
        let expect = PLDE::new(1, vec![(c0, vec![0]), (c1, vec![1])], Polynomial::zero())
            .normalized();
        assert_eq!(got[0], expect);
    }

    #[test]
    fn zero_operator_gives_trivial_equation() {
        let n = Symbol::shift("n");
        let x = Symbol::series("x");
        let got = find_re(&DiffOperator::zero(1), &[x], &[n]).unwrap();
        assert_eq!(got, vec![PLDE::trivial(1)]);
    }

    #[test]
    fn index_symbol_in_coefficient_is_rejected() {
        let n = Symbol::shift("n");
        let x = Symbol::series("x");
        let op = DiffOperator::new(1, vec![(v(n), vec![1])]);
        let err = find_re(&op, &[x], &[n]).unwrap_err();
        assert_eq!(err, ConversionError::NonPolynomialCoefficient { symbol: n });
    }

    #[test]
    fn gauss_ratios_to_operator() {
        // s = (a+n)(b+n), t = (n+1)(c+n) gives
        // (x^3 - x^2) d^2 + ((a+b+1)x^2 - c x) d + a b x.
        let n = Symbol::shift("n");
        let x = Symbol::series("x");
        let (a, b, c) = (sym("a"), sym("b"), sym("c"));
        let nv = v(n);
        let s = &(&v(a) + &nv) * &(&v(b) + &nv);
        let t = &(&nv + &Polynomial::one()) * &(&v(c) + &nv);
        let sys = HypSystem::new(vec![n], vec![RationalFunction::new(s, t)]).unwrap();
        let ops = find_de(&sys, &[x]);
        assert_eq!(ops.len(), 1);

        let xv = v(x);
        let x2 = &xv * &xv;
        let x3 = &x2 * &xv;
        let d2 = &x3 - &x2;
        let d1 = &(&x2 * &(&(&v(a) + &v(b)) + &Polynomial::one())) - &(&xv * &v(c));
        let d0 = &(&v(a) * &v(b)) * &xv;
        let expect = DiffOperator::new(1, vec![(d2, vec![2]), (d1, vec![1]), (d0, vec![0])]);
        assert_eq!(ops[0], expect);
    }

    #[test]
    fn find_de_round_trips_through_find_re() {
        // The recurrence recovered from the generated operator is exactly
        // t(n) f[n+1] - s(n) f[n] = 0 after normalization.
        let n = Symbol::shift("n");
        let x = Symbol::series("x");
        let (a, b, c) = (sym("a"), sym("b"), sym("c"));
        let nv = v(n);
        let s = &(&v(a) + &nv) * &(&v(b) + &nv);
        let t = &(&nv + &Polynomial::one()) * &(&v(c) + &nv);
        let sys =
            HypSystem::new(vec![n], vec![RationalFunction::new(s.clone(), t.clone())]).unwrap();
        let ops = find_de(&sys, &[x]);
        let re = find_re(&ops[0], &[x], &[n]).unwrap();
        let expect =
            PLDE::new(1, vec![(-&s, vec![0]), (t, vec![1])], Polynomial::zero()).normalized();
        assert_eq!(re[0], expect);
    }

    #[test]
    fn constant_ratio_system() {
        // r = 1, s = t = 1: operator x - 1 applied to sum f[n] x^n forces
        // f[n+1] = f[n]; find_re yields f[1] - f[0] shape.
        let n = Symbol::shift("n");
        let x = Symbol::series("x");
        let sys = HypSystem::new(vec![n], vec![RationalFunction::one()]).unwrap();
        let ops = find_de(&sys, &[x]);
        let expect = DiffOperator::new(
            1,
            vec![(&v(x) - &Polynomial::one(), vec![0])],
        );
        assert_eq!(ops[0], expect);
        let re = find_re(&ops[0], &[x], &[n]).unwrap();
        let eq = &re[0];
        assert_eq!(eq.coefficient_of(&[1]).unwrap(), &Polynomial::one());
        assert_eq!(eq.coefficient_of(&[0]).unwrap(), &(-&Polynomial::one()));
        let _ = q(1);
    }
}
