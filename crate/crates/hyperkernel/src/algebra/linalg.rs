use num_traits::{One, Zero};

use super::{Rational, RationalFunction};

/// The coefficient fields we eliminate over: exact rationals and rational
/// functions. Methods carry an `f_` prefix so they never shadow the
/// inherent or num-traits names on the implementing types. `f_size`
/// guides pivot choice toward small entries.
pub trait Field: Clone + PartialEq + std::fmt::Debug {
    fn f_zero() -> Self;
    fn f_one() -> Self;
    fn f_is_zero(&self) -> bool;
    fn f_add(&self, other: &Self) -> Self;
    fn f_sub(&self, other: &Self) -> Self;
    fn f_mul(&self, other: &Self) -> Self;
    fn f_div(&self, other: &Self) -> Self;
    fn f_neg(&self) -> Self {
        Self::f_zero().f_sub(self)
    }
    fn f_size(&self) -> usize {
        1
    }
}

impl Field for Rational {
    fn f_zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn f_one() -> Self {
        <Rational as One>::one()
    }
    fn f_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn f_add(&self, other: &Self) -> Self {
        self + other
    }
    fn f_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn f_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn f_div(&self, other: &Self) -> Self {
        self / other
    }
    fn f_size(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }
}

impl Field for RationalFunction {
    fn f_zero() -> Self {
        RationalFunction::zero()
    }
    fn f_one() -> Self {
        RationalFunction::one()
    }
    fn f_is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn f_add(&self, other: &Self) -> Self {
        self + other
    }
    fn f_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn f_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn f_div(&self, other: &Self) -> Self {
        self / other
    }
    fn f_size(&self) -> usize {
        self.num().num_terms() + self.den().num_terms()
    }
}

/// Affine solution space of A x = b: one particular solution (free
/// variables set to zero) plus a basis of the homogeneous nullspace.
#[derive(Clone, Debug)]
pub struct LinearSolution<F> {
    pub particular: Vec<F>,
    pub nullspace: Vec<Vec<F>>,
}

/// Exact Gauss-Jordan elimination. `None` when the system is
/// inconsistent. Pivots are chosen by smallest entry size to keep
/// rational-function intermediates from blowing up.
pub fn solve_linear<F: Field>(a: &[Vec<F>], b: &[F]) -> Option<LinearSolution<F>> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "matrix/rhs dimension mismatch");
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut m: Vec<Vec<F>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), cols, "ragged matrix");
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut rank = 0;
    for col in 0..cols {
        let pivot_row = (rank..rows)
            .filter(|&r| !m[r][col].f_is_zero())
            .min_by_key(|&r| m[r][col].f_size());
        let pr = match pivot_row {
            Some(r) => r,
            None => continue,
        };
        m.swap(rank, pr);
        let inv_pivot = F::f_one().f_div(&m[rank][col]);
        for j in col..=cols {
            m[rank][j] = m[rank][j].f_mul(&inv_pivot);
        }
        for r in 0..rows {
            if r == rank || m[r][col].f_is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for j in col..=cols {
                let delta = factor.f_mul(&m[rank][j]);
                m[r][j] = m[r][j].f_sub(&delta);
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }

    for row in m.iter().skip(rank) {
        if !row[cols].f_is_zero() {
            return None;
        }
    }

    let mut particular = vec![F::f_zero(); cols];
    for col in 0..cols {
        if let Some(r) = pivot_of_col[col] {
            particular[col] = m[r][cols].clone();
        }
    }

    let mut nullspace = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![F::f_zero(); cols];
        v[free] = F::f_one();
        for col in 0..cols {
            if let Some(r) = pivot_of_col[col] {
                v[col] = m[r][free].f_neg();
            }
        }
        nullspace.push(v);
    }

    Some(LinearSolution {
        particular,
        nullspace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, qr, Polynomial, Symbol};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    fn vec_q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| q(x)).collect()
    }

    fn check<F: Field>(a: &[Vec<F>], b: &[F], sol: &LinearSolution<F>) {
        let apply = |x: &[F]| -> Vec<F> {
            a.iter()
                .map(|row| {
                    row.iter()
                        .zip(x)
                        .fold(F::f_zero(), |acc, (c, xi)| acc.f_add(&c.f_mul(xi)))
                })
                .collect()
        };
        let got = apply(&sol.particular);
        assert!(got.iter().zip(b).all(|(g, e)| g == e), "particular fails");
        for v in &sol.nullspace {
            assert!(apply(v).iter().all(|g| g.f_is_zero()), "nullspace fails");
        }
    }

    #[test]
    fn identity_system() {
        let a = mat(&[&[1, 0], &[0, 1]]);
        let b = vec_q(&[3, -7]);
        let s = solve_linear(&a, &b).unwrap();
        assert_eq!(s.particular, b);
        assert!(s.nullspace.is_empty());
        check(&a, &b, &s);
    }

    #[test]
    fn underdetermined_nullspace() {
        // x + y = 0 has nullspace basis {(1, -1)}
        let a = mat(&[&[1, 1]]);
        let b = vec_q(&[0]);
        let s = solve_linear(&a, &b).unwrap();
        assert_eq!(s.nullspace.len(), 1);
        assert_eq!(s.nullspace[0], vec![q(-1), q(1)]);
        check(&a, &b, &s);
    }

    #[test]
    fn inconsistent_detected() {
        let a = mat(&[&[1, 1], &[2, 2]]);
        let b = vec_q(&[1, 3]);
        assert!(solve_linear(&a, &b).is_none());
    }

    #[test]
    fn cramer_oracle_4x4() {
        let a = mat(&[
            &[2, 1, 0, 3],
            &[1, -1, 4, 0],
            &[0, 5, 1, -2],
            &[3, 0, -1, 1],
        ]);
        // x = (1, -2, 3, 4) gives b by multiplication
        let x = vec_q(&[1, -2, 3, 4]);
        let b: Vec<Rational> = a
            .iter()
            .map(|row| row.iter().zip(&x).map(|(c, xi)| c * xi).sum())
            .collect();
        let s = solve_linear(&a, &b).unwrap();
        assert_eq!(s.particular, x);
        assert!(s.nullspace.is_empty());
    }

    #[test]
    fn rational_function_field() {
        let n = Symbol::shift("n");
        let x = RationalFunction::var(n);
        let one = RationalFunction::one();
        // [[n, 1], [1, n]] x = [n+1, n+1] has solution (1, 1) for n != 1
        let a = vec![
            vec![x.clone(), one.clone()],
            vec![one.clone(), x.clone()],
        ];
        let rhs_val = RationalFunction::from_poly(
            &Polynomial::var(n) + &Polynomial::one(),
        );
        let b = vec![rhs_val.clone(), rhs_val];
        let s = solve_linear(&a, &b).unwrap();
        assert_eq!(s.particular, vec![RationalFunction::one(), RationalFunction::one()]);
        check(&a, &b, &s);
    }

    #[test]
    fn pivot_handles_fractions() {
        let a = vec![vec![qr(1, 2), qr(1, 3)], vec![qr(1, 5), qr(1, 7)]];
        let b = vec![qr(5, 6), qr(12, 35)];
        let s = solve_linear(&a, &b).unwrap();
        assert_eq!(s.particular, vec![q(1), q(1)]);
    }
}
