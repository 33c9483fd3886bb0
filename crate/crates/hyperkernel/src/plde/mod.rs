//! Rational and nested-sum solving of partial linear difference equations.
//!
//! An equation is a finite sum, over integer shift vectors s, of polynomial
//! coefficients a_s times the shifted unknown y(n + s), equal to a rational
//! right-hand side. This module provides:
//!
//! - [`Plde`]: the equation itself, over an explicit list of shift
//!   variables.
//! - [`spread`] and [`dispersion`]: which integer shifts make two
//!   polynomials share a factor, split into finitely many witness points
//!   and generators of infinite shift families.
//! - [`denominator_bound`]: an Abramov-style gcd chain between extreme
//!   coefficients per coordinate direction bounds the aperiodic part of
//!   any solution denominator; periodic factors are collected at the
//!   corner points of the structure set, and the ones that cannot be
//!   pinned down are reported as candidate factors plus the lattice
//!   directions along which they can move.
//! - [`solve_plde`]: numerator ansatz over the bounded denominator, with
//!   power products of harmonic sums and Pochhammer symbols, linear
//!   constraints from random evaluation, exact verification of every
//!   returned solution, and initial-value matching.
//! - [`expand_hyperg_pref`]: transforms the equation so that a
//!   hypergeometric prefactor of the solution is divided out.
//! - [`solve_expand`]: order-by-order Laurent expansion of the solution
//!   in a parameter, solving one parameter-free equation per order.

mod bound;
mod expand;
mod objects;
mod prefactor;
mod solve;
mod spreads;

pub use bound::{denominator_bound, DenominatorBound};
pub use expand::{solve_expand, ExpansionStep};
pub use prefactor::{expand_hyperg_pref, shift_quotient};
pub use solve::{solve_plde, AnsatzSpec, SolutionSet};
pub use spreads::{dispersion, spread, Dispersion, SpreadResult};

use crate::algebra::{Polynomial, RationalFunction, Symbol};

/// Half-width of the brute-force shift box used when a factor pair cannot
/// be matched by exact linear algebra.
pub const DEFAULT_WINDOW: i64 = 20;

/// A partial linear difference equation: sum of `coeff * y(vars + shift)`
/// over the structure set, equal to `rhs`. Coefficients are polynomials in
/// the shift variables and any extra parameters; the right-hand side is a
/// rational function of the same.
#[derive(Clone, Debug, PartialEq)]
pub struct Plde {
    vars: Vec<Symbol>,
    terms: Vec<(Vec<i64>, Polynomial)>,
    rhs: RationalFunction,
}

impl Plde {
    /// Build an equation, merging duplicate shifts and dropping zero
    /// coefficients. Fails when no nonzero term remains or when a shift
    /// vector does not match the variable count.
    pub fn new(
        vars: Vec<Symbol>,
        terms: Vec<(Vec<i64>, Polynomial)>,
        rhs: RationalFunction,
    ) -> Result<Plde, PldeError> {
        let mut merged: std::collections::BTreeMap<Vec<i64>, Polynomial> =
            std::collections::BTreeMap::new();
        for (s, c) in terms {
            if s.len() != vars.len() {
                return Err(PldeError::ShapeMismatch);
            }
            let entry = merged.entry(s).or_insert_with(Polynomial::zero);
            *entry = &*entry + &c;
        }
        merged.retain(|_, c| !c.is_zero());
        if merged.is_empty() {
            return Err(PldeError::ShapeMismatch);
        }
        Ok(Plde {
            vars,
            terms: merged.into_iter().collect(),
            rhs,
        })
    }

    pub fn vars(&self) -> &[Symbol] {
        &self.vars
    }

    pub fn terms(&self) -> &[(Vec<i64>, Polynomial)] {
        &self.terms
    }

    pub fn rhs(&self) -> &RationalFunction {
        &self.rhs
    }

    /// The structure set: every shift vector with a nonzero coefficient.
    pub fn structure_set(&self) -> Vec<Vec<i64>> {
        self.terms.iter().map(|(s, _)| s.clone()).collect()
    }

    pub(crate) fn is_homogeneous(&self) -> bool {
        self.rhs.is_zero()
    }
}

/// Everything that can go wrong while bounding denominators, building the
/// ansatz, or iterating an expansion.
#[derive(Clone, Debug, PartialEq)]
pub enum PldeError {
    /// A shift vector length disagrees with the variable list, or the
    /// equation has no nonzero term.
    ShapeMismatch,
    /// All shifts of the structure set coincide, so no direction exists
    /// to bound anything along.
    DegenerateStructureSet,
    /// A prefactor's shift quotient does not simplify to a rational
    /// function; the payload names the offending subexpression.
    NotHypergeometric(String),
    /// Shifting an ansatz object leaves the linear span of the declared
    /// object list; the payload names the sums that would be needed.
    NotShiftStable { missing: Vec<String> },
    /// An ansatz object is of a shape the rewrite rules do not cover.
    UnsupportedObject(String),
    /// The ansatz admits no solution; the denominator bound is attached
    /// so the caller can enlarge the search.
    NoSolutionInAnsatz { bound: Box<DenominatorBound> },
    /// A candidate produced by the linear solve failed exact verification.
    UnverifiedSolution,
    /// An initial-value binding hits a pole or an unbound symbol.
    InitialValueUnevaluable,
    /// The initial values contradict the solution space.
    InitialValuesInconsistent,
    /// Matching initial values needed coefficient rational functions of a
    /// higher degree in the parameters than allowed.
    SymbolDegreeExceeded { needed: u32, allowed: u32 },
    /// A nonzero right-hand side cannot be divided by a non-rational
    /// prefactor.
    InhomogeneousPrefactor,
    /// Every coefficient vanishes at parameter zero; an overall power of
    /// the expansion parameter must be factored out first.
    EpsilonDegenerate,
    /// The right-hand side has the expansion parameter in its
    /// denominator.
    NonPolynomialEpsilon,
    /// Expansion failed at a specific order.
    OrderFailed { order: i64, source: Box<PldeError> },
}

impl std::fmt::Display for PldeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PldeError::ShapeMismatch => write!(f, "equation shape mismatch"),
            PldeError::DegenerateStructureSet => {
                write!(f, "all shifts of the structure set coincide")
            }
            PldeError::NotHypergeometric(what) => {
                write!(f, "shift quotient of {what} is not rational")
            }
            PldeError::NotShiftStable { missing } => {
                write!(f, "object list is not shift-stable; missing {}", missing.join(", "))
            }
            PldeError::UnsupportedObject(what) => {
                write!(f, "no shift rewrite rule for object {what}")
            }
            PldeError::NoSolutionInAnsatz { .. } => {
                write!(f, "no solution within the ansatz bounds")
            }
            PldeError::UnverifiedSolution => {
                write!(f, "candidate solution failed exact verification")
            }
            PldeError::InitialValueUnevaluable => {
                write!(f, "initial value cannot be evaluated")
            }
            PldeError::InitialValuesInconsistent => {
                write!(f, "initial values are inconsistent with the solution space")
            }
            PldeError::SymbolDegreeExceeded { needed, allowed } => {
                write!(f, "symbol degree {needed} exceeds the allowed {allowed}")
            }
            PldeError::InhomogeneousPrefactor => {
                write!(f, "cannot divide a nonzero right-hand side by a non-rational prefactor")
            }
            PldeError::EpsilonDegenerate => {
                write!(f, "all coefficients vanish at parameter zero")
            }
            PldeError::NonPolynomialEpsilon => {
                write!(f, "right-hand side denominator depends on the expansion parameter")
            }
            PldeError::OrderFailed { order, source } => {
                write!(f, "expansion failed at order {order}: {source}")
            }
        }
    }
}

impl std::error::Error for PldeError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;
    use crate::expr::parse;
    use num_traits::One;

    fn nk() -> (Symbol, Symbol) {
        (Symbol::shift("n"), Symbol::shift("k"))
    }

    fn pp(src: &str) -> Polynomial {
        let rf = parse(src).unwrap().to_rational_function().unwrap();
        let den = rf.den().as_constant().expect("polynomial input");
        rf.num().scale(&(crate::algebra::Rational::one() / den))
    }

    #[test]
    fn duplicate_shifts_merge_and_zero_terms_drop() {
        let (n, k) = nk();
        let eq = Plde::new(
            vec![n, k],
            vec![
                (vec![0, 0], pp("n")),
                (vec![0, 0], pp("k")),
                (vec![1, 0], pp("n - n")),
                (vec![0, 1], Polynomial::one()),
            ],
            RationalFunction::zero(),
        )
        .unwrap();
        assert_eq!(eq.terms().len(), 2);
        assert_eq!(eq.structure_set(), vec![vec![0, 0], vec![0, 1]]);
        assert_eq!(eq.terms()[0].1, pp("n + k"));
    }

    #[test]
    fn empty_and_ragged_equations_are_rejected() {
        let (n, k) = nk();
        let zero = Plde::new(
            vec![n, k],
            vec![(vec![0, 0], Polynomial::zero())],
            RationalFunction::zero(),
        );
        assert_eq!(zero.unwrap_err(), PldeError::ShapeMismatch);
        let ragged = Plde::new(
            vec![n, k],
            vec![(vec![0], Polynomial::one())],
            RationalFunction::zero(),
        );
        assert_eq!(ragged.unwrap_err(), PldeError::ShapeMismatch);
    }

    #[test]
    fn error_messages_name_the_failure() {
        let err = PldeError::NotShiftStable {
            missing: vec!["S(1;k)".into()],
        };
        assert_eq!(
            err.to_string(),
            "object list is not shift-stable; missing S(1;k)"
        );
        let err = PldeError::OrderFailed {
            order: -2,
            source: Box::new(PldeError::InitialValuesInconsistent),
        };
        assert!(err.to_string().contains("order -2"));
        let _ = q(0);
    }
}
