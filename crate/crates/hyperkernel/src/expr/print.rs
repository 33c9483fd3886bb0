//! Canonical text for expression trees. The output always reparses to the
//! tree it came from (after canonicalization), so the exact formatting
//! choices here are free; they are tuned for readability of the shapes the
//! canonical form produces.

use num_traits::{One, Signed};

use super::Expression;
use crate::algebra::Rational;

pub fn print(e: &Expression) -> String {
    match e {
        Expression::Rational(r) => rational_str(r),
        Expression::Sym(s) => s.name().to_string(),
        Expression::Add(terms) => {
            let mut out = String::new();
            for (i, t) in terms.iter().enumerate() {
                let (neg, body) = signed_term(t);
                if i == 0 {
                    if neg {
                        out.push('-');
                    }
                } else {
                    out.push_str(if neg { " - " } else { " + " });
                }
                out.push_str(&body);
            }
            out
        }
        Expression::Mul(factors) => {
            let (neg, body) = signed_term(e);
            let _ = factors;
            if neg {
                format!("-{body}")
            } else {
                body
            }
        }
        Expression::Pow(b, k) => {
            if *k < 0 {
                format!("1/{}", pow_str(b, -*k))
            } else {
                pow_str(b, *k)
            }
        }
        Expression::Poch(a, n) => format!("poch({},{})", print(a), print(n)),
        Expression::Factorial(x) => format!("fact({})", print(x)),
        Expression::Gamma(x) => format!("gamma({})", print(x)),
        Expression::Product(b) => format!(
            "prod({},{},{},{})",
            print(&b.body),
            b.index.name(),
            print(&b.lo),
            print(&b.hi)
        ),
        Expression::Sum(b) => format!(
            "sum({},{},{},{})",
            print(&b.body),
            b.index.name(),
            print(&b.lo),
            print(&b.hi)
        ),
        Expression::HarmonicS(w, n) => format!("S({};{})", word_str(w), print(n)),
        Expression::HurwitzS(w, a, n) => {
            format!("HS({};{};{})", word_str(w), print(a), print(n))
        }
    }
}

fn word_str(w: &[i64]) -> String {
    w.iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn rational_str(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A term with its sign pulled out, so sums can render `a - b`.
fn signed_term(t: &Expression) -> (bool, String) {
    match t {
        Expression::Rational(r) => (r.is_negative(), rational_str(&r.abs())),
        Expression::Mul(fs) => {
            if let Some(Expression::Rational(c)) = fs.first() {
                if c.is_negative() {
                    return (true, product_str(&-c, &fs[1..]));
                }
                return (false, product_str(c, &fs[1..]));
            }
            (false, product_str(&Rational::one(), fs))
        }
        _ => (false, atom_or_pow_str(t)),
    }
}

/// Renders `coeff * factors`, folding negative powers into a `/` group.
fn product_str(coeff: &Rational, factors: &[Expression]) -> String {
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();

    if !coeff.numer().is_one() {
        num.push(coeff.numer().to_string());
    }
    if !coeff.denom().is_one() {
        den.push(coeff.denom().to_string());
    }

    for f in factors {
        match f {
            Expression::Pow(b, k) if *k < 0 => den.push(pow_str(b, -*k)),
            Expression::Pow(b, k) => num.push(pow_str(b, *k)),
            other => num.push(atom_or_pow_str(other)),
        }
    }

    let num_s = if num.is_empty() {
        "1".to_string()
    } else {
        num.join("*")
    };
    match den.len() {
        0 => num_s,
        1 => format!("{}/{}", num_s, den[0]),
        _ => format!("{}/({})", num_s, den.join("*")),
    }
}

fn pow_str(base: &Expression, exp: i64) -> String {
    if exp == 1 {
        return atom_or_pow_str(base);
    }
    let b = match base {
        Expression::Sym(_)
        | Expression::Poch(_, _)
        | Expression::Factorial(_)
        | Expression::Gamma(_)
        | Expression::Product(_)
        | Expression::Sum(_)
        | Expression::HarmonicS(_, _)
        | Expression::HurwitzS(_, _, _) => print(base),
        _ => format!("({})", print(base)),
    };
    format!("{b}^{exp}")
}

/// A factor inside a product: self-delimiting forms print bare, composite
/// forms get parentheses.
fn atom_or_pow_str(e: &Expression) -> String {
    match e {
        Expression::Add(_) | Expression::Mul(_) => format!("({})", print(e)),
        Expression::Rational(r) => {
            if r.is_negative() || !r.denom().is_one() {
                format!("({})", rational_str(r))
            } else {
                rational_str(r)
            }
        }
        _ => print(e),
    }
}
