//! First-order hypergeometric recurrence systems and their product solutions.
//!
//! A multivariate sequence A(n_1, ..., n_r) is hypergeometric when every
//! coordinate shift changes it by a rational-function factor,
//!
//!   A(n_1, ..., n_i + 1, ..., n_r) = R_i(n_1, ..., n_r) * A(n_1, ..., n_r).
//!
//! This module provides:
//!
//! - [`HypSystem`]: the ratio system itself, with coprime numerator and
//!   denominator per coordinate.
//! - [`check_compatibility`]: the mixed-shift consistency test that decides
//!   whether the ratios can belong to a single sequence.
//! - [`compute_lambdas`] and [`solve_first_order_system`]: the recursive
//!   product construction, which writes A as a constant times nested
//!   products of the ratio multiplicands.
//! - [`to_pochhammer`]: factorization of those products into Pochhammer
//!   symbols, factorials, and irreducible residual products.
//! - [`ratios_of_summand`]: extraction of the ratio system from a
//!   Pochhammer-ratio expression, used to round-trip catalog entries.

mod product;
mod summand;

pub use product::{
    check_compatibility, compute_lambdas, forward_value, seed_symbol,
    solve_first_order_system, to_pochhammer, Incompatibility, LambdaCertificate, Lambdas,
    ProductSolution, SolveError, DEFAULT_SCAN_BOUND,
};
pub use summand::{decompose_summand, ratios_of_summand, FactorKind, PochFactor};

use crate::algebra::{Polynomial, RationalFunction, Symbol};

/// A first-order hypergeometric recurrence system: one shift ratio per
/// index variable, each stored as a reduced rational function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypSystem {
    vars: Vec<Symbol>,
    ratios: Vec<RationalFunction>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemError {
    ArityMismatch { vars: usize, ratios: usize },
    ZeroRatio { index: usize },
}

impl std::fmt::Display for SystemError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SystemError::ArityMismatch { vars, ratios } => {
                write!(f, "system has {vars} variables but {ratios} ratios")
            }
            SystemError::ZeroRatio { index } => {
                write!(f, "ratio {index} is identically zero")
            }
        }
    }
}

impl std::error::Error for SystemError {}

impl HypSystem {
    pub fn new(vars: Vec<Symbol>, ratios: Vec<RationalFunction>) -> Result<Self, SystemError> {
        if vars.len() != ratios.len() {
            return Err(SystemError::ArityMismatch { vars: vars.len(), ratios: ratios.len() });
        }
        if let Some(i) = ratios.iter().position(|r| r.num().is_zero()) {
            return Err(SystemError::ZeroRatio { index: i });
        }
        Ok(HypSystem { vars, ratios })
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[Symbol] {
        &self.vars
    }

    pub fn ratios(&self) -> &[RationalFunction] {
        &self.ratios
    }

    pub fn ratio(&self, i: usize) -> &RationalFunction {
        &self.ratios[i]
    }

    /// Numerator s_i of the stored ratio, so that
    /// s_i(n) A(n) = t_i(n) A(n + e_i).
    pub fn s(&self, i: usize) -> &Polynomial {
        self.ratios[i].num()
    }

    /// Denominator t_i of the stored ratio.
    pub fn t(&self, i: usize) -> &Polynomial {
        self.ratios[i].den()
    }

    /// The rational function A(n + shift) / A(n), assembled by walking one
    /// coordinate at a time. Well defined as written only when the system
    /// is compatible; callers that have not checked compatibility get the
    /// ratio along the coordinate-by-coordinate path.
    pub fn shift_ratio(&self, shift: &[i64]) -> RationalFunction {
        assert_eq!(shift.len(), self.arity(), "shift arity mismatch");
        let mut acc = RationalFunction::one();
        let mut offset: Vec<i64> = vec![0; self.arity()];
        for i in 0..self.arity() {
            let step = shift[i];
            if step >= 0 {
                for _ in 0..step {
                    let here = self.ratios[i].shift_all(&pairs(&self.vars, &offset));
                    acc = &acc * &here;
                    offset[i] += 1;
                }
            } else {
                for _ in 0..(-step) {
                    offset[i] -= 1;
                    let here = self.ratios[i].shift_all(&pairs(&self.vars, &offset));
                    acc = &acc / &here;
                }
            }
        }
        acc
    }
}

fn pairs(vars: &[Symbol], offset: &[i64]) -> Vec<(Symbol, i64)> {
    vars.iter().copied().zip(offset.iter().copied()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, Polynomial, RationalFunction, Symbol};

    fn rf(num: Polynomial, den: Polynomial) -> RationalFunction {
        RationalFunction::new(num, den)
    }

    #[test]
    fn system_validation() {
        let n = Symbol::shift("n");
        let one = RationalFunction::one();
        assert!(HypSystem::new(vec![n], vec![one.clone(), one.clone()]).is_err());
        let zero = RationalFunction::zero();
        assert_eq!(
            HypSystem::new(vec![n], vec![zero]),
            Err(SystemError::ZeroRatio { index: 0 })
        );
    }

    #[test]
    fn shift_ratio_matches_iteration() {
        // A(n) = n! has ratio n + 1, so A(n+3)/A(n) = (n+1)(n+2)(n+3).
        let n = Symbol::shift("n");
        let np1 = &Polynomial::var(n) + &Polynomial::one();
        let sys = HypSystem::new(vec![n], vec![rf(np1, Polynomial::one())]).unwrap();
        let r3 = sys.shift_ratio(&[3]);
        let nv = Polynomial::var(n);
        let expect = &(&(&nv + &Polynomial::int(1)) * &(&nv + &Polynomial::int(2)))
            * &(&nv + &Polynomial::int(3));
        assert_eq!(r3, RationalFunction::from_poly(expect));

        let back = sys.shift_ratio(&[-1]);
        assert_eq!(back, rf(Polynomial::one(), Polynomial::var(n)));
    }

    #[test]
    fn shift_ratio_two_variables() {
        // A(m,n) = m! n! moves independently in each coordinate.
        let m = Symbol::shift("m");
        let n = Symbol::shift("n");
        let mp1 = &Polynomial::var(m) + &Polynomial::one();
        let np1 = &Polynomial::var(n) + &Polynomial::one();
        let sys = HypSystem::new(
            vec![m, n],
            vec![
                rf(mp1.clone(), Polynomial::one()),
                rf(np1.clone(), Polynomial::one()),
            ],
        )
        .unwrap();
        let r = sys.shift_ratio(&[1, 1]);
        assert_eq!(r, RationalFunction::from_poly(&mp1 * &np1));
        let q2 = sys.shift_ratio(&[2, 0]);
        let mv = Polynomial::var(m);
        let expect = &(&mv + &Polynomial::int(1)) * &(&mv + &Polynomial::int(2));
        assert_eq!(q2, RationalFunction::from_poly(expect));
        let _ = q(1);
    }
}
