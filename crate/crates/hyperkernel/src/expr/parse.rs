//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := '-' factor | postfix
//! postfix  := primary ('^' exponent)*
//! primary  := integer | '(' expr ')' | call | symbol
//! call     := poch(expr, expr) | fact(expr) | gamma(expr)
//!           | prod(expr, symbol, expr, expr) | sum(expr, symbol, expr, expr)
//!           | S(word; expr) | HS(word; expr; expr)
//! word     := signed nonzero integer (',' signed nonzero integer)*
//! exponent := ['-'] integer | '(' ['-'] integer ')'
//! ```
//!
//! Whitespace is insignificant everywhere. Names resolve to already
//! interned symbols when one exists, otherwise they intern as parameters;
//! the CLI declares its shift and series variables before parsing so they
//! resolve with the right kinds. The result is canonicalized, so printing
//! it and parsing again is the identity.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{Binder, Expression};
use crate::algebra::{Rational, Symbol};

/// A parse failure: 1-based position of the offending token, what stood
/// there, and which token classes would have been accepted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: u32,
    pub col: u32,
    pub found: String,
    pub expected: Vec<String>,
}

impl std::fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}:{}: found {}, expected {}",
            self.line,
            self.col,
            self.found,
            self.expected.join(" | ")
        )
    }
}

impl std::error::Error for SyntaxError {}

/// Parse a single expression and canonicalize it.
pub fn parse(text: &str) -> Result<Expression, SyntaxError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e.canonicalize())
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Semi,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("integer {n}"),
            Tok::Ident(s) => format!("name '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: u32,
    col: u32,
}

fn lex(text: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars);
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                let n: BigInt = digits.parse().expect("digits parse");
                out.push(Spanned { tok: Tok::Num(n), line: tl, col: tc });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        name.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Ident(name), line: tl, col: tc });
            }
            _ => {
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    other => {
                        return Err(SyntaxError {
                            line: tl,
                            col: tc,
                            found: format!("character '{other}'"),
                            expected: vec!["expression token".into()],
                        })
                    }
                };
                bump(&mut chars);
                out.push(Spanned { tok, line: tl, col: tc });
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Spanned {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, SyntaxError> {
        let at = self.peek();
        Err(SyntaxError {
            line: at.line,
            col: at.col,
            found: at.tok.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn eat(&mut self, tok: Tok, expected: &str) -> Result<(), SyntaxError> {
        if self.peek().tok == tok {
            self.advance();
            Ok(())
        } else {
            self.error(&[expected])
        }
    }

    fn expect_eof(&self) -> Result<(), SyntaxError> {
        if self.peek().tok == Tok::Eof {
            Ok(())
        } else {
            self.error(&["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"])
        }
    }

    fn expr(&mut self) -> Result<Expression, SyntaxError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.advance();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.advance();
                    let t = self.term()?;
                    terms.push(Expression::Mul(vec![Expression::int(-1), t]));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.into_iter().next().unwrap()
        } else {
            Expression::Add(terms)
        })
    }

    fn term(&mut self) -> Result<Expression, SyntaxError> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.advance();
                    factors.push(self.factor()?);
                }
                Tok::Slash => {
                    self.advance();
                    let f = self.factor()?;
                    factors.push(Expression::Pow(Box::new(f), -1));
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.into_iter().next().unwrap()
        } else {
            Expression::Mul(factors)
        })
    }

    fn factor(&mut self) -> Result<Expression, SyntaxError> {
        if self.peek().tok == Tok::Minus {
            self.advance();
            let f = self.factor()?;
            return Ok(Expression::Mul(vec![Expression::int(-1), f]));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expression, SyntaxError> {
        let mut e = self.primary()?;
        while self.peek().tok == Tok::Caret {
            self.advance();
            let exp = self.exponent()?;
            e = Expression::Pow(Box::new(e), exp);
        }
        Ok(e)
    }

    fn exponent(&mut self) -> Result<i64, SyntaxError> {
        let parens = self.peek().tok == Tok::LParen;
        if parens {
            self.advance();
        }
        let neg = self.peek().tok == Tok::Minus;
        if neg {
            self.advance();
        }
        let v = match &self.peek().tok {
            Tok::Num(n) => match n.to_i64() {
                Some(v) => v,
                None => return self.error(&["integer exponent in 64-bit range"]),
            },
            _ => return self.error(&["integer exponent"]),
        };
        self.advance();
        if parens {
            self.eat(Tok::RParen, "')'")?;
        }
        Ok(if neg { -v } else { v })
    }

    fn primary(&mut self) -> Result<Expression, SyntaxError> {
        match self.peek().tok.clone() {
            Tok::Num(n) => {
                self.advance();
                Ok(Expression::Rational(Rational::from(n)))
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.eat(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if self.tokens[self.pos + 1].tok == Tok::LParen {
                    self.call(&name)
                } else {
                    self.advance();
                    Ok(Expression::Sym(resolve(&name)))
                }
            }
            _ => self.error(&[
                "integer",
                "name",
                "'('",
                "'-'",
                "poch(...)",
                "fact(...)",
                "gamma(...)",
                "prod(...)",
                "sum(...)",
                "S(...)",
                "HS(...)",
            ]),
        }
    }

    fn call(&mut self, name: &str) -> Result<Expression, SyntaxError> {
        match name {
            "poch" | "fact" | "gamma" | "prod" | "sum" | "S" | "HS" => {}
            _ => {
                return self.error(&[
                    "poch", "fact", "gamma", "prod", "sum", "S", "HS",
                    "a name not followed by '('",
                ])
            }
        }
        self.advance();
        self.eat(Tok::LParen, "'('")?;
        let e = match name {
            "poch" => {
                let a = self.expr()?;
                self.eat(Tok::Comma, "','")?;
                let n = self.expr()?;
                Expression::Poch(Box::new(a), Box::new(n))
            }
            "fact" => Expression::Factorial(Box::new(self.expr()?)),
            "gamma" => Expression::Gamma(Box::new(self.expr()?)),
            "prod" | "sum" => {
                let body = self.expr()?;
                self.eat(Tok::Comma, "','")?;
                let index = match self.peek().tok.clone() {
                    Tok::Ident(s) => {
                        self.advance();
                        resolve(&s)
                    }
                    _ => return self.error(&["index name"]),
                };
                self.eat(Tok::Comma, "','")?;
                let lo = self.expr()?;
                self.eat(Tok::Comma, "','")?;
                let hi = self.expr()?;
                let b = Binder {
                    body: Box::new(body),
                    index,
                    lo: Box::new(lo),
                    hi: Box::new(hi),
                };
                if name == "prod" {
                    Expression::Product(b)
                } else {
                    Expression::Sum(b)
                }
            }
            "S" => {
                let word = self.word()?;
                self.eat(Tok::Semi, "';'")?;
                let n = self.expr()?;
                Expression::HarmonicS(word, Box::new(n))
            }
            "HS" => {
                let word = self.word()?;
                self.eat(Tok::Semi, "';'")?;
                let a = self.expr()?;
                self.eat(Tok::Semi, "';'")?;
                let n = self.expr()?;
                Expression::HurwitzS(word, Box::new(a), Box::new(n))
            }
            _ => unreachable!(),
        };
        self.eat(Tok::RParen, "')'")?;
        Ok(e)
    }

    fn word(&mut self) -> Result<Vec<i64>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            let neg = self.peek().tok == Tok::Minus;
            if neg {
                self.advance();
            }
            match self.peek().tok.clone() {
                Tok::Num(n) => {
                    if n.is_zero() || n.abs().to_i64().is_none() {
                        return self.error(&["nonzero integer word entry"]);
                    }
                    self.advance();
                    let v = n.to_i64().unwrap();
                    out.push(if neg { -v } else { v });
                }
                _ => return self.error(&["nonzero integer word entry"]),
            }
            if self.peek().tok == Tok::Comma {
                self.advance();
            } else {
                return Ok(out);
            }
        }
    }
}

fn resolve(name: &str) -> Symbol {
    Symbol::lookup(name).unwrap_or_else(|| Symbol::param(name))
}

#[cfg(test)]
mod tests {
    use super::super::print::print;
    use super::*;

    #[test]
    fn hypergeometric_coefficient_shape() {
        let e = parse("poch(a,n)*poch(b,n)/(poch(c,n)*fact(n))").unwrap();
        let a = Expression::Sym(resolve("a"));
        let b = Expression::Sym(resolve("b"));
        let c = Expression::Sym(resolve("c"));
        let n = Expression::Sym(resolve("n"));
        let want = Expression::div(
            Expression::mul(vec![
                Expression::poch(a, n.clone()),
                Expression::poch(b, n.clone()),
            ]),
            Expression::mul(vec![
                Expression::poch(c, n.clone()),
                Expression::fact(n),
            ]),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn harmonic_sum_node() {
        let e = parse("S(1;n)").unwrap();
        match &e {
            Expression::HarmonicS(w, _) => assert_eq!(w, &vec![1]),
            other => panic!("expected a harmonic sum, got {other:?}"),
        }
        let e = parse("S(-2,1;n)").unwrap();
        match &e {
            Expression::HarmonicS(w, _) => assert_eq!(w, &vec![-2, 1]),
            other => panic!("expected a harmonic sum, got {other:?}"),
        }
    }

    #[test]
    fn finite_product_node() {
        let e = parse("prod((2+B-C-(3+B)*j+j^2), j, 1, n)").unwrap();
        match &e {
            Expression::Product(b) => {
                assert!(b.lo.is_one());
                assert_eq!(*b.hi, Expression::Sym(resolve("n")));
            }
            other => panic!("expected a product, got {other:?}"),
        }
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(
            parse("poch( a ,\n  n )").unwrap(),
            parse("poch(a,n)").unwrap()
        );
    }

    #[test]
    fn error_location_is_one_based() {
        let err = parse("poch(a").unwrap_err();
        assert_eq!((err.line, err.col), (1, 7));
        assert!(err.expected.contains(&"','".to_string()));

        let err = parse("x +\n* y").unwrap_err();
        assert_eq!((err.line, err.col), (2, 1));

        let err = parse("S(0;n)").unwrap_err();
        assert_eq!(err.expected, vec!["nonzero integer word entry".to_string()]);

        let err = parse("foo(x)").unwrap_err();
        assert!(err.expected.iter().any(|e| e == "poch"));
    }

    #[test]
    fn print_then_parse_is_identity() {
        let samples = [
            "poch(a,n)*poch(b,n)/(poch(c,n)*fact(n))",
            "x + 2*y",
            "1 - x^2/2 + x^4/24",
            "prod(2 + B - C - (3+B)*j + j^2, j, 1, n)",
            "sum(S(1;i1)/i1, i1, 1, n)",
            "HS(2,1; a; n) - S(3;n)",
            "gamma(a+n)/gamma(a)",
            "-x - 3/4",
            "1/(n*(n+1))",
            "poch(1/2 + a, n)^2",
        ];
        for s in samples {
            let e = parse(s).expect(s);
            let text = print(&e);
            let back = parse(&text).expect(&text);
            assert_eq!(back, e, "round trip failed for {s} printed as {text}");
        }
    }

    #[test]
    fn division_chains_associate_left() {
        assert_eq!(parse("a/b/c").unwrap(), parse("a/(b*c)").unwrap());
        assert_eq!(parse("a/b*c").unwrap(), parse("(a*c)/b").unwrap());
    }
}
