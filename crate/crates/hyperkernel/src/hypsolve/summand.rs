use super::{HypSystem, SystemError};
use crate::algebra::{Polynomial, RationalFunction, Symbol};
use crate::expr::Expression;

/// One multiplicative factor of a Pochhammer-ratio summand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PochFactor {
    pub kind: FactorKind,
    /// Integer coefficients of the index variables in the count.
    pub coeffs: Vec<i64>,
    /// Constant part of the count.
    pub offset: i64,
    pub exponent: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorKind {
    Pochhammer { parameter: Expression },
    Factorial,
}

impl PochFactor {
    fn count_poly(&self, indices: &[Symbol]) -> Polynomial {
        let mut p = Polynomial::int(self.offset);
        for (c, v) in self.coeffs.iter().zip(indices) {
            if *c != 0 {
                p = &p + &Polynomial::var(*v).scale(&crate::algebra::q(*c));
            }
        }
        p
    }

    fn parameter_ratfun(&self) -> Option<RationalFunction> {
        match &self.kind {
            FactorKind::Pochhammer { parameter } => parameter.to_rational_function(),
            FactorKind::Factorial => Some(RationalFunction::one()),
        }
    }
}

/// Splits a summand into Pochhammer and factorial factors whose counts are
/// integer-linear in the index variables. Index-free factors are dropped as
/// constants. Returns None when any index-dependent factor is not of that
/// shape.
pub fn decompose_summand(summand: &Expression, indices: &[Symbol]) -> Option<Vec<PochFactor>> {
    let canon = summand.canonicalize();
    let parts: Vec<Expression> = match canon {
        Expression::Mul(fs) => fs,
        other => vec![other],
    };
    let mut out = Vec::new();
    for part in parts {
        let (base, exponent) = match part {
            Expression::Pow(b, k) => (*b, k),
            other => (other, 1),
        };
        if let Expression::Rational(_) = base {
            continue;
        }
        let touches_index = base.free_symbols().iter().any(|s| indices.contains(s));
        if !touches_index {
            continue;
        }
        match base {
            Expression::Poch(param, count) => {
                if param.free_symbols().iter().any(|s| indices.contains(s)) {
                    return None;
                }
                let (coeffs, offset) = linear_count(&count, indices)?;
                out.push(PochFactor {
                    kind: FactorKind::Pochhammer { parameter: *param },
                    coeffs,
                    offset,
                    exponent,
                });
            }
            Expression::Factorial(arg) => {
                let (coeffs, offset) = linear_count(&arg, indices)?;
                out.push(PochFactor { kind: FactorKind::Factorial, coeffs, offset, exponent });
            }
            _ => return None,
        }
    }
    Some(out)
}

/// Reads the count expression as an integer-linear form over the indices.
fn linear_count(count: &Expression, indices: &[Symbol]) -> Option<(Vec<i64>, i64)> {
    let rf = count.to_rational_function()?;
    if !rf.den().is_one() {
        return None;
    }
    let p = rf.num();
    let mut coeffs = vec![0i64; indices.len()];
    let mut offset = 0i64;
    for (mono, c) in p.terms() {
        if !c.is_integer() {
            return None;
        }
        let cint = i64::try_from(c.to_integer()).ok()?;
        if mono.is_one() {
            offset = cint;
            continue;
        }
        let factors = mono.factors();
        if factors.len() != 1 || factors[0].1 != 1 {
            return None;
        }
        let pos = indices.iter().position(|s| *s == factors[0].0)?;
        coeffs[pos] = cint;
    }
    Some((coeffs, offset))
}

/// Extracts the first-order ratio system A(n + e_i)/A(n) of a
/// Pochhammer-ratio summand, one rational function per index variable.
pub fn ratios_of_summand(summand: &Expression, indices: &[Symbol]) -> Option<HypSystem> {
    let factors = decompose_summand(summand, indices)?;
    let mut ratios = Vec::with_capacity(indices.len());
    for i in 0..indices.len() {
        let mut acc = RationalFunction::one();
        for f in &factors {
            let step = f.coeffs[i];
            if step == 0 {
                continue;
            }
            let a = f.parameter_ratfun()?;
            let count = RationalFunction::from_poly(f.count_poly(indices));
            let mut contrib = RationalFunction::one();
            if step > 0 {
                for t in 0..step {
                    let term = &(&a + &count) + &RationalFunction::int(t);
                    contrib = &contrib * &term;
                }
            } else {
                for t in 1..=(-step) {
                    let term = &(&a + &count) - &RationalFunction::int(t);
                    contrib = &contrib / &term;
                }
            }
            let e = i32::try_from(f.exponent).ok()?;
            acc = &acc * &contrib.pow(e);
        }
        ratios.push(acc);
    }
    match HypSystem::new(indices.to_vec(), ratios) {
        Ok(sys) => Some(sys),
        Err(SystemError::ZeroRatio { .. }) | Err(SystemError::ArityMismatch { .. }) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Symbol;
    use crate::expr::parse;

    fn shift_syms(names: &[&str]) -> Vec<Symbol> {
        names.iter().map(|n| Symbol::shift(n)).collect()
    }

    #[test]
    fn gauss_summand_ratio() {
        let idx = shift_syms(&["n"]);
        let s = parse("poch(a,n)*poch(b,n)/(poch(c,n)*fact(n))").unwrap();
        let sys = ratios_of_summand(&s, &idx).unwrap();
        let expect = parse("(a+n)*(b+n)/((1+n)*(c+n))").unwrap().to_rational_function().unwrap();
        assert_eq!(sys.ratio(0), &expect);
    }

    #[test]
    fn appell_f1_ratios() {
        let idx = shift_syms(&["m", "n"]);
        let s = parse("poch(a,m+n)*poch(b,m)*poch(b1,n)/(fact(m)*fact(n)*poch(c,m+n))").unwrap();
        let sys = ratios_of_summand(&s, &idx).unwrap();
        let r1 = parse("(a+m+n)*(b+m)/((1+m)*(c+m+n))").unwrap().to_rational_function().unwrap();
        let r2 = parse("(a+m+n)*(b1+n)/((1+n)*(c+m+n))").unwrap().to_rational_function().unwrap();
        assert_eq!(sys.ratio(0), &r1);
        assert_eq!(sys.ratio(1), &r2);
    }

    #[test]
    fn negative_count_direction() {
        // (a)_{m-n} loses a factor when n grows.
        let idx = shift_syms(&["m", "n"]);
        let s = parse("poch(a,m-n)").unwrap();
        let sys = ratios_of_summand(&s, &idx).unwrap();
        let r1 = parse("a+m-n").unwrap().to_rational_function().unwrap();
        let r2 = parse("1/(a+m-n-1)").unwrap().to_rational_function().unwrap();
        assert_eq!(sys.ratio(0), &r1);
        assert_eq!(sys.ratio(1), &r2);
    }

    #[test]
    fn exponential_summand_still_has_ratios() {
        let idx = shift_syms(&["m", "n"]);
        let s = parse("1/(fact(m)*fact(n))").unwrap();
        let sys = ratios_of_summand(&s, &idx).unwrap();
        let r1 = parse("1/(1+m)").unwrap().to_rational_function().unwrap();
        assert_eq!(sys.ratio(0), &r1);
    }

    #[test]
    fn rejects_non_pochhammer_factors() {
        let idx = shift_syms(&["m"]);
        let s = parse("m*poch(a,m)").unwrap();
        assert!(ratios_of_summand(&s, &idx).is_none());
        let g = parse("gamma(m)").unwrap();
        assert!(ratios_of_summand(&g, &idx).is_none());
    }

    #[test]
    fn constant_factors_are_ignored() {
        let idx = shift_syms(&["m"]);
        let s = parse("3*gamma(a)*poch(a,m)/fact(m)").unwrap();
        let sys = ratios_of_summand(&s, &idx).unwrap();
        let r = parse("(a+m)/(1+m)").unwrap().to_rational_function().unwrap();
        assert_eq!(sys.ratio(0), &r);
    }
}
