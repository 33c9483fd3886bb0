//! Data-driven catalog of classical hypergeometric series:
//!
//! * summand shapes for one to four summation indices, loaded from the
//!   bundled data files (overridable per file through `HYPERKERNEL_DATA`),
//! * convergence regions as lists of strict inequalities in the absolute
//!   values of the series variables,
//! * [`classify`], which recognizes a user summand as one of the catalog
//!   shapes and reports the parameter binding.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_traits::ToPrimitive;

use crate::algebra::{Rational, Symbol};
use crate::expr::{parse, Expression};
use crate::hypsolve::{decompose_summand, FactorKind, PochFactor};

/// Arithmetic over absolute values of series variables, used to state
/// convergence conditions.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvExpr {
    Num(Rational),
    Abs(String),
    Sqrt(Box<ConvExpr>),
    Neg(Box<ConvExpr>),
    Add(Vec<ConvExpr>),
    Mul(Vec<ConvExpr>),
    Div(Box<ConvExpr>, Box<ConvExpr>),
}

impl ConvExpr {
    /// Numeric value at a point. Panics if the point does not bind every
    /// variable appearing in the expression.
    pub fn eval(&self, point: &BTreeMap<String, f64>) -> f64 {
        match self {
            ConvExpr::Num(r) => r.to_f64().expect("rational fits in f64"),
            ConvExpr::Abs(name) => point
                .get(name)
                .unwrap_or_else(|| panic!("convergence test point does not bind '{name}'"))
                .abs(),
            ConvExpr::Sqrt(e) => e.eval(point).sqrt(),
            ConvExpr::Neg(e) => -e.eval(point),
            ConvExpr::Add(parts) => parts.iter().map(|e| e.eval(point)).sum(),
            ConvExpr::Mul(parts) => parts.iter().map(|e| e.eval(point)).product(),
            ConvExpr::Div(a, b) => a.eval(point) / b.eval(point),
        }
    }

    fn is_atom(&self) -> bool {
        matches!(
            self,
            ConvExpr::Num(_) | ConvExpr::Abs(_) | ConvExpr::Sqrt(_)
        )
    }
}

impl std::fmt::Display for ConvExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConvExpr::Num(r) => write!(f, "{r}"),
            ConvExpr::Abs(name) => write!(f, "abs({name})"),
            ConvExpr::Sqrt(e) => write!(f, "sqrt({e})"),
            ConvExpr::Neg(e) => {
                if e.is_atom() {
                    write!(f, "-{e}")
                } else {
                    write!(f, "-({e})")
                }
            }
            ConvExpr::Add(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i == 0 {
                        write!(f, "{p}")?;
                    } else if let ConvExpr::Neg(inner) = p {
                        if inner.is_atom() {
                            write!(f, " - {inner}")?;
                        } else {
                            write!(f, " - ({inner})")?;
                        }
                    } else {
                        write!(f, " + {p}")?;
                    }
                }
                Ok(())
            }
            ConvExpr::Mul(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    if p.is_atom() {
                        write!(f, "{p}")?;
                    } else {
                        write!(f, "({p})")?;
                    }
                }
                Ok(())
            }
            ConvExpr::Div(a, b) => {
                if a.is_atom() {
                    write!(f, "{a}/")?;
                } else {
                    write!(f, "({a})/")?;
                }
                if b.is_atom() {
                    write!(f, "{b}")
                } else {
                    write!(f, "({b})")
                }
            }
        }
    }
}

/// A strict inequality `lhs < rhs` between convergence expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct Inequality {
    pub lhs: ConvExpr,
    pub rhs: ConvExpr,
}

impl Inequality {
    pub fn holds(&self, point: &BTreeMap<String, f64>) -> bool {
        self.lhs.eval(point) < self.rhs.eval(point)
    }
}

impl std::fmt::Display for Inequality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} < {}", self.lhs, self.rhs)
    }
}

/// Returned when a catalog entry has no recorded convergence region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoData {
    pub label: String,
}

impl std::fmt::Display for NoData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "no convergence data recorded for '{}'", self.label)
    }
}

impl std::error::Error for NoData {}

/// Malformed catalog data: file, 1-based line, and what went wrong.
#[derive(Clone, Debug)]
pub struct CatalogError {
    pub file: String,
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for CatalogError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.line, self.message)
    }
}

impl std::error::Error for CatalogError {}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    label: String,
    arity: usize,
    summand: Option<Expression>,
    parameters: Vec<Symbol>,
    convergence: Option<Vec<Inequality>>,
}

impl CatalogEntry {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn summand(&self) -> Option<&Expression> {
        self.summand.as_ref()
    }

    pub fn parameters(&self) -> &[Symbol] {
        &self.parameters
    }

    pub fn convergence(&self) -> Option<&[Inequality]> {
        self.convergence.as_deref()
    }
}

#[derive(Debug)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
    by_label: BTreeMap<String, usize>,
}

impl Catalog {
    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, label: &str) -> Option<&CatalogEntry> {
        self.by_label.get(label).map(|&i| &self.entries[i])
    }
}

/// Summation index symbols used by catalog summands of the given arity.
pub fn catalog_indices(arity: usize) -> Vec<Symbol> {
    let names: &[&str] = match arity {
        1 => &["n"],
        2 => &["m", "n"],
        3 => &["m", "n", "p"],
        4 => &["l", "m", "n", "p"],
        other => panic!("catalog arity {other} out of range"),
    };
    names.iter().map(|n| Symbol::shift(n)).collect()
}

/// Series variable symbols paired with [`catalog_indices`] positionally.
pub fn catalog_series_vars(arity: usize) -> Vec<Symbol> {
    let names: &[&str] = match arity {
        1 => &["x"],
        2 => &["x", "y"],
        3 => &["x", "y", "z"],
        4 => &["x", "y", "z", "t"],
        other => panic!("catalog arity {other} out of range"),
    };
    names.iter().map(|n| Symbol::series(n)).collect()
}

static CATALOG: OnceLock<Catalog> = OnceLock::new();

/// The process-wide catalog, loaded on first use. Index symbols are
/// interned as shift symbols before the summands are parsed so that names
/// like `n` resolve with the right kind everywhere.
pub fn catalog() -> &'static Catalog {
    CATALOG.get_or_init(|| match load() {
        Ok(c) => c,
        Err(e) => panic!("catalog data: {e}"),
    })
}

fn file_text(name: &str, embedded: &'static str) -> String {
    if let Ok(dir) = std::env::var("HYPERKERNEL_DATA") {
        let path = std::path::Path::new(&dir).join(name);
        if let Ok(text) = std::fs::read_to_string(&path) {
            return text;
        }
    }
    embedded.to_string()
}

fn load() -> Result<Catalog, CatalogError> {
    for arity in 1..=4 {
        let _ = catalog_indices(arity);
    }
    let mut entries: Vec<CatalogEntry> = Vec::new();
    let sources: [(&str, &'static str, usize); 4] = [
        ("cases1.txt", include_str!("../../data/cases1.txt"), 1),
        ("cases2.txt", include_str!("../../data/cases2.txt"), 2),
        ("cases3.txt", include_str!("../../data/cases3.txt"), 3),
        ("cases4.txt", include_str!("../../data/cases4.txt"), 4),
    ];
    for (name, embedded, arity) in sources {
        let text = file_text(name, embedded);
        load_cases(&text, name, arity, &mut entries)?;
    }
    let text = file_text("converg3.txt", include_str!("../../data/converg3.txt"));
    load_extra_convergence(&text, "converg3.txt", 3, &mut entries)?;

    let mut by_label = BTreeMap::new();
    for (i, e) in entries.iter().enumerate() {
        if by_label.insert(e.label.clone(), i).is_some() {
            return Err(CatalogError {
                file: "catalog".into(),
                line: 0,
                message: format!("duplicate label '{}'", e.label),
            });
        }
    }
    Ok(Catalog { entries, by_label })
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn load_cases(
    text: &str,
    file: &str,
    arity: usize,
    entries: &mut Vec<CatalogEntry>,
) -> Result<(), CatalogError> {
    let err = |line: usize, message: String| CatalogError {
        file: file.into(),
        line,
        message,
    };
    let indices = catalog_indices(arity);
    for (lineno, line) in data_lines(text) {
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(err(
                lineno,
                format!("expected 4 '|'-separated fields, found {}", fields.len()),
            ));
        }
        let label = fields[0].to_string();
        if label.is_empty() {
            return Err(err(lineno, "empty label".into()));
        }
        let summand = parse(fields[1])
            .map_err(|e| err(lineno, format!("summand: {e}")))?;
        let parameters: Vec<Symbol> = if fields[2].is_empty() {
            Vec::new()
        } else {
            fields[2]
                .split(',')
                .map(|s| Symbol::param(s.trim()))
                .collect()
        };
        let convergence = parse_convergence_field(fields[3])
            .map_err(|m| err(lineno, m))?;

        let allowed: std::collections::BTreeSet<Symbol> = parameters
            .iter()
            .copied()
            .chain(indices.iter().copied())
            .collect();
        for s in summand.free_symbols() {
            if !allowed.contains(&s) {
                return Err(err(
                    lineno,
                    format!("summand of '{label}' uses undeclared symbol '{s}'"),
                ));
            }
        }
        if decompose_summand(&summand, &indices).is_none() {
            return Err(err(
                lineno,
                format!("summand of '{label}' is not a factorial-Pochhammer product"),
            ));
        }
        entries.push(CatalogEntry {
            label,
            arity,
            summand: Some(summand),
            parameters,
            convergence,
        });
    }
    Ok(())
}

fn load_extra_convergence(
    text: &str,
    file: &str,
    arity: usize,
    entries: &mut Vec<CatalogEntry>,
) -> Result<(), CatalogError> {
    for (lineno, line) in data_lines(text) {
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(CatalogError {
                file: file.into(),
                line: lineno,
                message: format!("expected 2 '|'-separated fields, found {}", fields.len()),
            });
        }
        let label = fields[0].to_string();
        let convergence = parse_convergence_field(fields[1]).map_err(|m| CatalogError {
            file: file.into(),
            line: lineno,
            message: m,
        })?;
        match entries.iter_mut().find(|e| e.label == label) {
            Some(e) => e.convergence = convergence,
            None => entries.push(CatalogEntry {
                label,
                arity,
                summand: None,
                parameters: Vec::new(),
                convergence,
            }),
        }
    }
    Ok(())
}

fn parse_convergence_field(field: &str) -> Result<Option<Vec<Inequality>>, String> {
    if field.is_empty() || field == "-" {
        return Ok(None);
    }
    field
        .split(';')
        .map(|part| parse_inequality(part.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

/// Parses `lhs < rhs` over the convergence grammar.
pub fn parse_inequality(text: &str) -> Result<Inequality, String> {
    let mut sides = text.split('<');
    let (lhs, rhs) = match (sides.next(), sides.next(), sides.next()) {
        (Some(l), Some(r), None) => (l, r),
        _ => return Err(format!("expected exactly one '<' in '{text}'")),
    };
    Ok(Inequality {
        lhs: parse_conv_expr(lhs)?,
        rhs: parse_conv_expr(rhs)?,
    })
}

/// Parses the `+ - * / sqrt abs` arithmetic used in convergence regions.
pub fn parse_conv_expr(text: &str) -> Result<ConvExpr, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut p = ConvParser { chars, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(format!("trailing input at position {}", p.pos + 1));
    }
    Ok(e)
}

struct ConvParser {
    chars: Vec<char>,
    pos: usize,
}

impl ConvParser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> Result<(), String> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected '{c}' at position {}", self.pos + 1))
        }
    }

    fn expr(&mut self) -> Result<ConvExpr, String> {
        let mut parts = vec![self.term()?];
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    parts.push(self.term()?);
                }
                Some('-') => {
                    self.pos += 1;
                    parts.push(ConvExpr::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            ConvExpr::Add(parts)
        })
    }

    fn term(&mut self) -> Result<ConvExpr, String> {
        let mut out = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    out = match out {
                        ConvExpr::Mul(mut parts) => {
                            parts.push(rhs);
                            ConvExpr::Mul(parts)
                        }
                        other => ConvExpr::Mul(vec![other, rhs]),
                    };
                }
                Some('/') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    out = ConvExpr::Div(Box::new(out), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(out)
    }

    fn unary(&mut self) -> Result<ConvExpr, String> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(ConvExpr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ConvExpr, String> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.eat(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let mut digits = String::new();
                while let Some(&d) = self.chars.get(self.pos) {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let n: i64 = digits
                    .parse()
                    .map_err(|_| format!("number '{digits}' out of range"))?;
                Ok(ConvExpr::Num(Rational::from_integer(n.into())))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(&d) = self.chars.get(self.pos) {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        name.push(d);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                match name.as_str() {
                    "abs" => {
                        self.eat('(')?;
                        let mut var = String::new();
                        while let Some(&d) = self.chars.get(self.pos) {
                            if d.is_ascii_alphanumeric() || d == '_' {
                                var.push(d);
                                self.pos += 1;
                            } else {
                                break;
                            }
                        }
                        if var.is_empty() {
                            return Err("abs() needs a variable name".into());
                        }
                        self.eat(')')?;
                        Ok(ConvExpr::Abs(var))
                    }
                    "sqrt" => {
                        self.eat('(')?;
                        let e = self.expr()?;
                        self.eat(')')?;
                        Ok(ConvExpr::Sqrt(Box::new(e)))
                    }
                    other => Err(format!("unknown function or bare name '{other}'")),
                }
            }
            Some(c) => Err(format!("unexpected character '{c}'")),
            None => Err("unexpected end of input".into()),
        }
    }
}

/// Convergence region of a catalog entry as a list of inequalities that
/// must all hold.
pub fn convergence_region(label: &str) -> Result<&'static [Inequality], NoData> {
    match catalog().get(label).and_then(|e| e.convergence()) {
        Some(region) => Ok(region),
        None => Err(NoData { label: label.into() }),
    }
}

/// Tests a numeric point against the recorded convergence region. The
/// point must bind every series variable the region mentions.
pub fn converges_at(label: &str, point: &BTreeMap<String, f64>) -> Result<bool, NoData> {
    let region = convergence_region(label)?;
    Ok(region.iter().all(|ineq| ineq.holds(point)))
}

/// Result of looking a summand up in the catalog: the matched label with
/// the binding of catalog parameters to user expressions, or no match.
#[derive(Clone, Debug, PartialEq)]
pub enum Classification {
    Match {
        label: String,
        binding: BTreeMap<Symbol, Expression>,
    },
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct AtomKey {
    factorial: bool,
    coeffs: Vec<i64>,
    offset: i64,
    inverse: bool,
}

fn atom_groups(factors: &[PochFactor]) -> BTreeMap<AtomKey, Vec<Option<Expression>>> {
    let mut groups: BTreeMap<AtomKey, Vec<Option<Expression>>> = BTreeMap::new();
    for f in factors {
        if f.exponent == 0 {
            continue;
        }
        let (factorial, param) = match &f.kind {
            FactorKind::Factorial => (true, None),
            FactorKind::Pochhammer { parameter } => (false, Some(parameter.clone())),
        };
        let key = AtomKey {
            factorial,
            coeffs: f.coeffs.clone(),
            offset: f.offset,
            inverse: f.exponent < 0,
        };
        for _ in 0..f.exponent.unsigned_abs() {
            groups.entry(key.clone()).or_default().push(param.clone());
        }
    }
    groups
}

/// Recognizes a summand as a catalog shape. The summand is decomposed
/// into factorial and Pochhammer factors whose counts are read relative
/// to `indices`; counts are compared positionally against the catalog
/// index list of the same arity, and parameters are matched by searching
/// for a consistent assignment of catalog parameters to user expressions.
/// The first catalog entry that matches wins.
pub fn classify(summand: &Expression, indices: &[Symbol]) -> Classification {
    let Some(user_factors) = decompose_summand(summand, indices) else {
        return Classification::Unknown;
    };
    let user_groups = atom_groups(&user_factors);
    let cat_indices = catalog_indices(indices.len());
    for entry in catalog().entries() {
        if entry.arity() != indices.len() {
            continue;
        }
        let Some(cat_summand) = entry.summand() else {
            continue;
        };
        let cat_factors = decompose_summand(cat_summand, &cat_indices)
            .expect("catalog summands decompose by the load-time check");
        let cat_groups = atom_groups(&cat_factors);
        if let Some(binding) = match_entry(&cat_groups, &user_groups) {
            return Classification::Match {
                label: entry.label().to_string(),
                binding,
            };
        }
    }
    Classification::Unknown
}

fn match_entry(
    cat_groups: &BTreeMap<AtomKey, Vec<Option<Expression>>>,
    user_groups: &BTreeMap<AtomKey, Vec<Option<Expression>>>,
) -> Option<BTreeMap<Symbol, Expression>> {
    if cat_groups.len() != user_groups.len() {
        return None;
    }
    let mut poch_groups: Vec<(Vec<Symbol>, Vec<Expression>)> = Vec::new();
    for ((ck, cv), (uk, uv)) in cat_groups.iter().zip(user_groups.iter()) {
        if ck != uk || cv.len() != uv.len() {
            return None;
        }
        if ck.factorial {
            continue;
        }
        let mut cats: Vec<Symbol> = Vec::with_capacity(cv.len());
        for p in cv {
            match p {
                Some(Expression::Sym(s)) => cats.push(*s),
                _ => return None,
            }
        }
        let users: Vec<Expression> = uv.iter().map(|p| p.clone().unwrap()).collect();
        poch_groups.push((cats, users));
    }
    let mut used: Vec<Vec<bool>> = poch_groups
        .iter()
        .map(|(_, us)| vec![false; us.len()])
        .collect();
    let mut binding = BTreeMap::new();
    if solve_groups(&poch_groups, 0, 0, &mut used, &mut binding) {
        Some(binding)
    } else {
        None
    }
}

fn solve_groups(
    groups: &[(Vec<Symbol>, Vec<Expression>)],
    gi: usize,
    pos: usize,
    used: &mut Vec<Vec<bool>>,
    binding: &mut BTreeMap<Symbol, Expression>,
) -> bool {
    if gi == groups.len() {
        return true;
    }
    let (cats, users) = &groups[gi];
    if pos == cats.len() {
        return solve_groups(groups, gi + 1, 0, used, binding);
    }
    let c = cats[pos];
    for u in 0..users.len() {
        if used[gi][u] {
            continue;
        }
        let e = &users[u];
        let prior = binding.get(&c).cloned();
        if let Some(p) = &prior {
            if p != e {
                continue;
            }
        }
        used[gi][u] = true;
        binding.insert(c, e.clone());
        if solve_groups(groups, gi, pos + 1, used, binding) {
            return true;
        }
        used[gi][u] = false;
        match prior {
            Some(p) => {
                binding.insert(c, p);
            }
            None => {
                binding.remove(&c);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_loads_every_section() {
        let cat = catalog();
        assert_eq!(cat.entries().iter().filter(|e| e.arity() == 1).count(), 3);
        assert_eq!(cat.entries().iter().filter(|e| e.arity() == 2).count(), 16);
        assert_eq!(cat.entries().iter().filter(|e| e.arity() == 3).count(), 21);
        assert_eq!(cat.entries().iter().filter(|e| e.arity() == 4).count(), 21);
        for label in ["2F1", "F1", "F4", "G3", "H7", "S2", "FE", "f27b", "K1", "K21"] {
            assert!(cat.get(label).is_some(), "missing {label}");
        }
    }

    #[test]
    fn every_summand_decomposes_and_uses_declared_symbols() {
        for entry in catalog().entries() {
            let Some(summand) = entry.summand() else {
                continue;
            };
            let indices = catalog_indices(entry.arity());
            let factors = decompose_summand(summand, &indices);
            assert!(factors.is_some(), "{} does not decompose", entry.label());
        }
    }

    #[test]
    fn classify_recognizes_appell_f1_with_renamed_parameters() {
        let indices = catalog_indices(2);
        let summand = parse(
            "poch(A,m+n)*poch(B,m)*poch(B2,n)/(poch(G,m+n)*fact(m)*fact(n))",
        )
        .unwrap();
        match classify(&summand, &indices) {
            Classification::Match { label, binding } => {
                assert_eq!(label, "F1");
                let a = Symbol::param("a");
                assert_eq!(binding[&a], parse("A").unwrap());
                let c = Symbol::param("c");
                assert_eq!(binding[&c], parse("G").unwrap());
            }
            Classification::Unknown => panic!("expected F1"),
        }
    }

    #[test]
    fn classify_recognizes_gauss_with_composite_parameters() {
        let indices = catalog_indices(1);
        let summand = parse(
            "poch(e1+1,n)*poch(e2-e3,n)/(poch(2*e1,n)*fact(n))",
        )
        .unwrap();
        match classify(&summand, &indices) {
            Classification::Match { label, binding } => {
                assert_eq!(label, "2F1");
                assert_eq!(binding.len(), 3);
            }
            Classification::Unknown => panic!("expected 2F1"),
        }
    }

    #[test]
    fn bare_factorial_summand_is_unknown() {
        let indices = catalog_indices(2);
        let summand = parse("1/(fact(m)*fact(n))").unwrap();
        assert_eq!(classify(&summand, &indices), Classification::Unknown);
    }

    #[test]
    fn non_product_summand_is_unknown() {
        let indices = catalog_indices(1);
        let summand = parse("poch(a,n) + 1").unwrap();
        assert_eq!(classify(&summand, &indices), Classification::Unknown);
    }

    #[test]
    fn repeated_user_parameter_binds_non_injectively() {
        let indices = catalog_indices(2);
        // F4 with both numerator parameters equal.
        let summand = parse(
            "poch(w,m+n)^2/(poch(u,m)*poch(v,n)*fact(m)*fact(n))",
        )
        .unwrap();
        match classify(&summand, &indices) {
            Classification::Match { label, binding } => {
                assert_eq!(label, "F4");
                assert_eq!(binding[&Symbol::param("a")], parse("w").unwrap());
                assert_eq!(binding[&Symbol::param("b")], parse("w").unwrap());
            }
            Classification::Unknown => panic!("expected F4"),
        }
    }

    #[test]
    fn convergence_regions_match_recorded_shapes() {
        let f4 = convergence_region("F4").unwrap();
        assert_eq!(f4.len(), 1);
        assert_eq!(f4[0].to_string(), "sqrt(abs(x)) + sqrt(abs(y)) < 1");

        let f1 = convergence_region("F1").unwrap();
        assert_eq!(f1.len(), 2);
        assert_eq!(f1[0].to_string(), "abs(x) < 1");
        assert_eq!(f1[1].to_string(), "abs(y) < 1");

        let missing = convergence_region("K16").unwrap_err();
        assert_eq!(missing.label, "K16");
    }

    #[test]
    fn convergence_predicate_at_points() {
        let point = |x: f64, y: f64| {
            BTreeMap::from([("x".to_string(), x), ("y".to_string(), y)])
        };
        assert!(converges_at("F4", &point(0.09, 0.09)).unwrap());
        assert!(!converges_at("F4", &point(0.5, 0.5)).unwrap());
        assert!(converges_at("F2", &point(0.3, 0.3)).unwrap());
        assert!(!converges_at("F2", &point(0.7, 0.4)).unwrap());
    }

    #[test]
    fn extra_convergence_entry_without_summand() {
        let entry = catalog().get("f26f").expect("f26f present");
        assert!(entry.summand().is_none());
        assert_eq!(entry.arity(), 3);
        let region = entry.convergence().unwrap();
        assert_eq!(region.len(), 3);
        let point = BTreeMap::from([
            ("x".to_string(), 0.1),
            ("y".to_string(), 0.1),
            ("z".to_string(), 0.01),
        ]);
        assert!(region.iter().all(|i| i.holds(&point)));
        let outside = BTreeMap::from([
            ("x".to_string(), 0.1),
            ("y".to_string(), 0.1),
            ("z".to_string(), 0.3),
        ]);
        assert!(!region.iter().all(|i| i.holds(&outside)));
    }

    #[test]
    fn conv_expr_display_reparses_to_same_value() {
        let texts = [
            "abs(x) + abs(y)",
            "sqrt(abs(x))+sqrt(abs(y))",
            "1/(1+2*sqrt(abs(z)))",
            "sqrt(1+abs(x)*(1+2*sqrt(abs(z))))-sqrt(abs(x)*(1+2*sqrt(abs(z))))",
            "1/4",
            "-abs(x)*3+2",
        ];
        let point = BTreeMap::from([
            ("x".to_string(), 0.37),
            ("y".to_string(), -0.21),
            ("z".to_string(), 0.11),
        ]);
        for t in texts {
            let e = parse_conv_expr(t).expect(t);
            let shown = e.to_string();
            let back = parse_conv_expr(&shown).expect(&shown);
            let (a, b) = (e.eval(&point), back.eval(&point));
            assert!(
                (a - b).abs() <= 1e-12 * (1.0 + a.abs()),
                "{t} -> {shown}: {a} vs {b}"
            );
        }
    }
}
