//! Differential operators, difference equations, and the function catalog.
//!
//! A formal power series sum f[k_1,...,k_r] x_1^{k_1}...x_r^{k_r} links two
//! finite descriptions of the same object:
//!
//! - [`DiffOperator`]: a linear differential operator with polynomial
//!   coefficients that annihilates the series.
//! - [`PLDE`]: a partial linear difference equation satisfied by the
//!   coefficient sequence f.
//!
//! [`find_re`] carries an operator to the recurrence side by coefficient
//! comparison: a term x^a d^d shifts the coefficient index by d - a and
//! contributes a falling-factorial coefficient. [`find_de`] goes the other
//! way, building the operator x_i s_i(theta) - t_i(theta_i - 1) from a
//! first-order ratio system, where theta_i = x_i d/dx_i, and expanding
//! theta powers into x^j d^j via Stirling numbers ([`theta_expand`]).
//!
//! The module also hosts the named-function catalog: Pochhammer-ratio
//! summands with convergence data, loaded from line-oriented data files,
//! together with a [`classify`] operation that recognizes a summand up to
//! parameter renaming, and the general operator families whose parameter
//! specializations reproduce the named functions ([`families`],
//! [`matching`]).

pub mod catalog;
pub mod convert;
pub mod families;
pub mod matching;
pub mod theta;

pub use catalog::{
    catalog, classify, convergence_region, converges_at, Catalog, CatalogEntry, CatalogError,
    Classification, Inequality, NoData,
};
pub use convert::{find_de, find_re, ConversionError};
pub use families::OperatorFamily;
pub use matching::{matching_case, matching_cases, MatchingCase};
pub use theta::{stirling2, theta_expand};

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{poly_gcd_many, Polynomial, Symbol};

/// A linear differential operator with polynomial coefficients. Each term
/// pairs a coefficient with a derivative multi-index over the series
/// variables; terms are kept sorted by multi-index with duplicates merged
/// and zero coefficients dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator {
    arity: usize,
    terms: Vec<(Polynomial, Vec<u32>)>,
}

impl DiffOperator {
    pub fn new(arity: usize, terms: impl IntoIterator<Item = (Polynomial, Vec<u32>)>) -> Self {
        let mut map: BTreeMap<Vec<u32>, Polynomial> = BTreeMap::new();
        for (coeff, d) in terms {
            assert_eq!(d.len(), arity, "derivative multi-index has wrong arity");
            let slot = map.entry(d).or_insert_with(Polynomial::zero);
            *slot = &*slot + &coeff;
        }
        map.retain(|_, c| !c.is_zero());
        DiffOperator {
            arity,
            terms: map.into_iter().map(|(d, c)| (c, d)).collect(),
        }
    }

    pub fn zero(arity: usize) -> Self {
        DiffOperator { arity, terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[(Polynomial, Vec<u32>)] {
        &self.terms
    }

    /// Total derivative order of the highest term.
    pub fn order(&self) -> u32 {
        self.terms
            .iter()
            .map(|(_, d)| d.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Left-multiplies every coefficient by a polynomial.
    pub fn scale(&self, p: &Polynomial) -> Self {
        DiffOperator::new(
            self.arity,
            self.terms.iter().map(|(c, d)| (c * p, d.clone())),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "operator arity mismatch");
        DiffOperator::new(
            self.arity,
            self.terms.iter().chain(other.terms.iter()).cloned(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "operator arity mismatch");
        DiffOperator::new(
            self.arity,
            self.terms.iter().cloned().chain(
                other
                    .terms
                    .iter()
                    .map(|(c, d)| (-c, d.clone())),
            ),
        )
    }

    /// Applies the operator to a polynomial in the series variables.
    pub fn apply_poly(&self, p: &Polynomial, series_vars: &[Symbol]) -> Polynomial {
        assert_eq!(series_vars.len(), self.arity, "series variable arity mismatch");
        let mut out = Polynomial::zero();
        for (coeff, d) in &self.terms {
            let mut part = p.clone();
            for (j, &k) in d.iter().enumerate() {
                for _ in 0..k {
                    part = part.derivative(series_vars[j]);
                }
            }
            out = &out + &(&part * coeff);
        }
        out
    }
}

impl std::fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, d)| {
                if d.iter().all(|&k| k == 0) {
                    format!("({c})")
                } else {
                    format!("({c})*d{d:?}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A partial linear difference equation
/// sum over shifts s of c_s(n) f[n + s] = rhs(n).
/// Shift terms are kept sorted with duplicates merged and zero coefficients
/// dropped; the structure set is derived from the stored terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLDE {
    arity: usize,
    shift_terms: Vec<(Polynomial, Vec<i64>)>,
    rhs: Polynomial,
}

impl PLDE {
    pub fn new(
        arity: usize,
        terms: impl IntoIterator<Item = (Polynomial, Vec<i64>)>,
        rhs: Polynomial,
    ) -> Self {
        let mut map: BTreeMap<Vec<i64>, Polynomial> = BTreeMap::new();
        for (coeff, s) in terms {
            assert_eq!(s.len(), arity, "shift vector has wrong arity");
            let slot = map.entry(s).or_insert_with(Polynomial::zero);
            *slot = &*slot + &coeff;
        }
        map.retain(|_, c| !c.is_zero());
        PLDE {
            arity,
            shift_terms: map.into_iter().map(|(s, c)| (c, s)).collect(),
            rhs,
        }
    }

    /// The degenerate equation 0 = 0.
    pub fn trivial(arity: usize) -> Self {
        PLDE { arity, shift_terms: Vec::new(), rhs: Polynomial::zero() }
    }

    pub fn is_trivial(&self) -> bool {
        self.shift_terms.is_empty() && self.rhs.is_zero()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn shift_terms(&self) -> &[(Polynomial, Vec<i64>)] {
        &self.shift_terms
    }

    pub fn rhs(&self) -> &Polynomial {
        &self.rhs
    }

    pub fn structure_set(&self) -> BTreeSet<Vec<i64>> {
        self.shift_terms.iter().map(|(_, s)| s.clone()).collect()
    }

    pub fn coefficient_of(&self, shift: &[i64]) -> Option<&Polynomial> {
        self.shift_terms
            .iter()
            .find(|(_, s)| s == shift)
            .map(|(c, _)| c)
    }

    /// Divides out the polynomial content common to all coefficients and
    /// the right-hand side, then fixes the sign so the coefficient at the
    /// largest shift has a positive leading coefficient. Shifts are not
    /// moved. Two equations with the same solutions and the same structure
    /// set normalize to the same representative.
    pub fn normalized(&self) -> PLDE {
        if self.shift_terms.is_empty() {
            return self.clone();
        }
        let mut polys: Vec<Polynomial> =
            self.shift_terms.iter().map(|(c, _)| c.clone()).collect();
        if !self.rhs.is_zero() {
            polys.push(self.rhs.clone());
        }
        let common = poly_gcd_many(&polys);
        let mut scalar = crate::algebra::q(0);
        for p in &polys {
            let reduced = p
                .exact_div(&common)
                .expect("common factor divides every coefficient");
            scalar = crate::algebra::q_gcd(&scalar, &reduced.content());
        }
        if scalar == crate::algebra::q(0) {
            scalar = crate::algebra::q(1);
        }
        let content = common.scale(&scalar);
        let divide = |p: &Polynomial| -> Polynomial {
            p.exact_div(&content)
                .expect("content divides every coefficient")
        };
        let mut terms: Vec<(Polynomial, Vec<i64>)> = self
            .shift_terms
            .iter()
            .map(|(c, s)| (divide(c), s.clone()))
            .collect();
        let mut rhs = if self.rhs.is_zero() { Polynomial::zero() } else { divide(&self.rhs) };
        let top = terms
            .iter()
            .max_by(|a, b| a.1.cmp(&b.1))
            .expect("nonempty");
        if top.0.leading_coeff() < crate::algebra::q(0) {
            for (c, _) in terms.iter_mut() {
                *c = -&*c;
            }
            rhs = -&rhs;
        }
        PLDE { arity: self.arity, shift_terms: terms, rhs }
    }
}

impl std::fmt::Display for PLDE {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.shift_terms.is_empty() {
            return write!(f, "0 = {}", self.rhs);
        }
        let parts: Vec<String> = self
            .shift_terms
            .iter()
            .map(|(c, s)| format!("({c})*f{s:?}"))
            .collect();
        write!(f, "{} = {}", parts.join(" + "), self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    fn n() -> Symbol {
        Symbol::shift("n")
    }

    fn x() -> Symbol {
        Symbol::series("x")
    }

    #[test]
    fn operator_merges_duplicate_indices() {
        let p = Polynomial::var(x());
        let op = DiffOperator::new(
            1,
            vec![
                (p.clone(), vec![1]),
                (p.clone(), vec![1]),
                (-&p, vec![0]),
            ],
        );
        assert_eq!(op.terms().len(), 2);
        assert_eq!(op.order(), 1);
        let doubled = p.scale(&q(2));
        assert_eq!(op.terms()[1], (doubled, vec![1]));
    }

    #[test]
    fn operator_apply_poly() {
        // (x d/dx) x^3 = 3 x^3
        use crate::algebra::Monomial;
        let op = DiffOperator::new(1, vec![(Polynomial::var(x()), vec![1])]);
        let p = Polynomial::monomial(Monomial::power(x(), 3), q(1));
        let got = op.apply_poly(&p, &[x()]);
        assert_eq!(got, p.scale(&q(3)));
    }

    #[test]
    fn plde_structure_set_tracks_nonzero_terms() {
        let nv = Polynomial::var(n());
        let eq = PLDE::new(
            1,
            vec![
                (nv.clone(), vec![0]),
                (Polynomial::zero(), vec![2]),
                (Polynomial::one(), vec![1]),
            ],
            Polynomial::zero(),
        );
        let shifts: Vec<Vec<i64>> = eq.structure_set().into_iter().collect();
        assert_eq!(shifts, vec![vec![0], vec![1]]);
    }

    #[test]
    fn normalization_clears_content_and_sign() {
        let nv = Polynomial::var(n());
        let two_n = nv.scale(&q(2));
        let eq = PLDE::new(
            1,
            vec![
                (&two_n * &nv, vec![0]),
                (-&(&two_n + &two_n), vec![1]),
            ],
            Polynomial::zero(),
        );
        let norm = eq.normalized();
        // content 2n divides out, then the sign flips so f[1] has a
        // positive coefficient.
        assert_eq!(norm.coefficient_of(&[1]), Some(&Polynomial::int(2)));
        assert_eq!(norm.coefficient_of(&[0]), Some(&(-&nv)));
    }

    #[test]
    fn trivial_plde() {
        let eq = PLDE::trivial(2);
        assert!(eq.is_trivial());
        assert!(eq.structure_set().is_empty());
        assert_eq!(eq.normalized(), eq);
    }
}
