use std::collections::{BTreeMap, HashMap};

use dashu_float::{ops::Abs, FBig};

use crate::algebra::{Rational, Symbol};
use crate::expr::{Binder, Expression};

use super::infinity_symbol;

/// Result of a truncated evaluation: the value, and a crude tail estimate
/// for the truncated infinite sums and products (the magnitude of the last
/// retained increment, maximized over all truncation points). The estimate
/// is meaningful for ranges whose terms decay; it is zero when nothing was
/// truncated.
#[derive(Clone, Debug)]
pub struct Truncated {
    pub value: FBig,
    pub tail: FBig,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    /// A free symbol had no binding.
    Unbound(Symbol),
    /// A binder endpoint, power, count or harmonic argument did not
    /// evaluate to an admissible integer.
    NonIntegerArgument,
    /// Division by zero, or a factorial / Pochhammer / gamma pole.
    Pole,
    /// Cancellation in a sum ate more than half of the requested digits.
    PrecisionLoss,
    /// An atom outside the numeric fragment.
    Unsupported(&'static str),
}

impl std::fmt::Display for EvalError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvalError::Unbound(s) => write!(f, "no binding for symbol {s}"),
            EvalError::NonIntegerArgument => {
                write!(f, "an argument did not evaluate to an admissible integer")
            }
            EvalError::Pole => write!(f, "evaluation hit a pole"),
            EvalError::PrecisionLoss => {
                write!(f, "cancellation exceeded half of the working digits")
            }
            EvalError::Unsupported(what) => write!(f, "cannot evaluate {what} numerically"),
        }
    }
}

impl std::error::Error for EvalError {}

/// Evaluate `e` to at least `digits` significant digits, replacing every
/// infinite bound by `truncate_at`. Finite sums and products are evaluated
/// by direct iteration; factorials, Pochhammer symbols, harmonic sums and
/// the running ranges of binders are extended incrementally across calls
/// within the same evaluation, so an outer truncated sum over an inner
/// product costs linear, not quadratic, work.
pub fn eval_truncated(
    e: &Expression,
    bindings: &BTreeMap<Symbol, FBig>,
    truncate_at: i64,
    digits: usize,
) -> Result<Truncated, EvalError> {
    let mut ev = Evaluator::new(truncate_at, digits);
    let mut env = bindings.clone();
    let value = ev.eval(e, &mut env)?;
    Ok(Truncated {
        value,
        tail: ev.tail,
    })
}

fn digits_to_bits(digits: usize) -> usize {
    digits * 3322 / 1000 + 32
}

fn f_zero() -> FBig {
    FBig::ZERO
}

struct RangeCache {
    hi: i64,
    acc: FBig,
    max_abs: FBig,
    last_step: FBig,
}

struct HarmonicCache {
    upto: i64,
    levels: Vec<FBig>,
}

struct Evaluator {
    prec: usize,
    truncate_at: i64,
    loss_threshold: FBig,
    tail: FBig,
    factorials: Vec<FBig>,
    ranges: HashMap<(usize, String), RangeCache>,
    pochhammers: HashMap<(usize, String), (i64, FBig)>,
    harmonics: HashMap<(usize, String), HarmonicCache>,
}

impl Evaluator {
    fn new(truncate_at: i64, digits: usize) -> Evaluator {
        let prec = digits_to_bits(digits);
        let mut ev = Evaluator {
            prec,
            truncate_at,
            loss_threshold: FBig::ZERO,
            tail: FBig::ZERO,
            factorials: Vec::new(),
            ranges: HashMap::new(),
            pochhammers: HashMap::new(),
            harmonics: HashMap::new(),
        };
        ev.loss_threshold = ev.ipow(&ev.f_int(10), (digits / 2) as u64);
        ev.factorials.push(ev.f_int(1));
        ev
    }

    fn f_int(&self, v: i64) -> FBig {
        FBig::from(v).with_precision(self.prec).value()
    }

    fn f_big(&self, n: &num_bigint::BigInt) -> FBig {
        if let Ok(v) = i64::try_from(n) {
            return self.f_int(v);
        }
        let (sign, bytes) = n.to_bytes_be();
        let base = FBig::from(256i64).with_precision(0).value();
        let mut acc = FBig::ZERO;
        for byte in bytes {
            acc = &acc * &base + FBig::from(byte as i64).with_precision(0).value();
        }
        if sign == num_bigint::Sign::Minus {
            acc = -acc;
        }
        acc.with_precision(self.prec).value()
    }

    fn f_rat(&self, r: &Rational) -> FBig {
        let num = self.f_big(r.numer());
        if r.is_integer() {
            return num;
        }
        &num / &self.f_big(r.denom())
    }

    fn ipow(&self, base: &FBig, e: u64) -> FBig {
        let mut acc = self.f_int(1);
        let mut sq = base.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        acc
    }

    fn as_index(&self, v: &FBig) -> Result<i64, EvalError> {
        let approx = v.to_f64().value();
        if !approx.is_finite() || approx.abs() > 9.0e15 {
            return Err(EvalError::NonIntegerArgument);
        }
        let rounded = approx.round();
        if (approx - rounded).abs() > 1e-6 {
            return Err(EvalError::NonIntegerArgument);
        }
        Ok(rounded as i64)
    }

    fn factorial(&mut self, k: i64) -> Result<FBig, EvalError> {
        if k < 0 {
            return Err(EvalError::Pole);
        }
        while (self.factorials.len() as i64) <= k {
            let t = self.factorials.len() as i64;
            let next = self.factorials.last().unwrap() * &self.f_int(t);
            self.factorials.push(next);
        }
        Ok(self.factorials[k as usize].clone())
    }

    fn fingerprint(values: &[&FBig]) -> String {
        let mut out = String::new();
        for v in values {
            let repr = v.repr();
            out.push_str(&format!("{}@{};", repr.significand(), repr.exponent()));
        }
        out
    }

    fn check_loss(&self, total: &FBig, max_abs: &FBig) -> Result<(), EvalError> {
        if *max_abs == f_zero() {
            return Ok(());
        }
        let scaled = total.clone().abs() * &self.loss_threshold;
        if *max_abs > scaled {
            return Err(EvalError::PrecisionLoss);
        }
        Ok(())
    }

    fn eval(
        &mut self,
        e: &Expression,
        env: &mut BTreeMap<Symbol, FBig>,
    ) -> Result<FBig, EvalError> {
        match e {
            Expression::Rational(r) => Ok(self.f_rat(r)),
            Expression::Sym(s) => {
                if *s == infinity_symbol() {
                    return Err(EvalError::Unsupported("a bare infinite bound"));
                }
                env.get(s).cloned().ok_or(EvalError::Unbound(*s))
            }
            Expression::Add(xs) => {
                let mut acc = FBig::ZERO.with_precision(self.prec).value();
                for x in xs {
                    let v = self.eval(x, env)?;
                    acc = &acc + &v;
                }
                Ok(acc)
            }
            Expression::Mul(xs) => {
                let mut acc = self.f_int(1);
                for x in xs {
                    let v = self.eval(x, env)?;
                    acc = &acc * &v;
                }
                Ok(acc)
            }
            Expression::Pow(b, k) => {
                let base = self.eval(b, env)?;
                if *k >= 0 {
                    Ok(self.ipow(&base, *k as u64))
                } else {
                    if base == f_zero() {
                        return Err(EvalError::Pole);
                    }
                    let p = self.ipow(&base, k.unsigned_abs());
                    Ok(&self.f_int(1) / &p)
                }
            }
            Expression::Poch(a, count) => {
                let a_v = self.eval(a, env)?;
                let count_v = self.eval(count, env)?;
                let m = self.as_index(&count_v)?;
                self.pochhammer(e as *const Expression as usize, &a_v, m)
            }
            Expression::Factorial(x) => {
                let v = self.eval(x, env)?;
                let k = self.as_index(&v)?;
                self.factorial(k)
            }
            Expression::Gamma(x) => {
                let v = self.eval(x, env)?;
                let k = self.as_index(&v).map_err(|_| {
                    EvalError::Unsupported("the gamma function at a non-integer argument")
                })?;
                if k < 1 {
                    return Err(EvalError::Pole);
                }
                self.factorial(k - 1)
            }
            Expression::Product(b) => self.range(e, b, env, false),
            Expression::Sum(b) => self.range(e, b, env, true),
            Expression::HarmonicS(word, arg) => {
                let v = self.eval(arg, env)?;
                let n = self.as_index(&v)?;
                if n < 0 {
                    return Err(EvalError::NonIntegerArgument);
                }
                self.harmonic(e as *const Expression as usize, word, None, n)
            }
            Expression::HurwitzS(word, offset, arg) => {
                let off = self.eval(offset, env)?;
                let v = self.eval(arg, env)?;
                let n = self.as_index(&v)?;
                if n < 0 {
                    return Err(EvalError::NonIntegerArgument);
                }
                self.harmonic(e as *const Expression as usize, word, Some(&off), n)
            }
        }
    }

    fn pochhammer(&mut self, key: usize, a: &FBig, m: i64) -> Result<FBig, EvalError> {
        if m < 0 {
            let mut den = self.f_int(1);
            for t in 1..=(-m) {
                den = &den * &(a - &self.f_int(t));
            }
            if den == f_zero() {
                return Err(EvalError::Pole);
            }
            return Ok(&self.f_int(1) / &den);
        }
        let fp = Evaluator::fingerprint(&[a]);
        let cached = self.pochhammers.get(&(key, fp.clone()));
        let (mut from, mut acc) = match cached {
            Some((c, v)) if *c <= m => (*c, v.clone()),
            _ => (0, self.f_int(1)),
        };
        while from < m {
            acc = &acc * &(a + &self.f_int(from));
            from += 1;
        }
        self.pochhammers.insert((key, fp), (m, acc.clone()));
        Ok(acc)
    }

    fn range(
        &mut self,
        node: &Expression,
        b: &Binder,
        env: &mut BTreeMap<Symbol, FBig>,
        additive: bool,
    ) -> Result<FBig, EvalError> {
        let lo_v = self.eval(&b.lo, env)?;
        let lo = self.as_index(&lo_v)?;
        let infinite = *b.hi == Expression::Sym(infinity_symbol());
        let hi = if infinite {
            self.truncate_at
        } else {
            let hi_v = self.eval(&b.hi, env)?;
            self.as_index(&hi_v)?
        };

        let mut free: Vec<Symbol> = b
            .body
            .free_symbols()
            .into_iter()
            .filter(|s| *s != b.index)
            .collect();
        free.sort();
        let mut parts: Vec<&FBig> = Vec::new();
        for s in &free {
            match env.get(s) {
                Some(v) => parts.push(v),
                None => return Err(EvalError::Unbound(*s)),
            }
        }
        let mut fp = Evaluator::fingerprint(&parts);
        fp.push_str(&format!("lo={lo};{}", additive));
        let key = (node as *const Expression as usize, fp);

        let neutral = if additive {
            FBig::ZERO.with_precision(self.prec).value()
        } else {
            self.f_int(1)
        };
        let (mut from, mut acc, mut max_abs, mut last_step) = match self.ranges.get(&key) {
            Some(c) if c.hi <= hi => {
                (c.hi + 1, c.acc.clone(), c.max_abs.clone(), c.last_step.clone())
            }
            _ => (lo, neutral.clone(), FBig::ZERO, FBig::ZERO),
        };

        let saved = env.get(&b.index).cloned();
        let mut failure = None;
        while from <= hi {
            env.insert(b.index, self.f_int(from));
            let term = match self.eval(&b.body, env) {
                Ok(v) => v,
                Err(err) => {
                    failure = Some(err);
                    break;
                }
            };
            if additive {
                last_step = term.clone().abs();
                acc = &acc + &term;
                let a = acc.clone().abs();
                if a > max_abs {
                    max_abs = a;
                }
            } else {
                let next = &acc * &term;
                last_step = (&next - &acc).abs();
                acc = next;
            }
            from += 1;
        }
        match saved {
            Some(v) => {
                env.insert(b.index, v);
            }
            None => {
                env.remove(&b.index);
            }
        }
        if let Some(err) = failure {
            return Err(err);
        }

        if hi >= lo {
            self.ranges.insert(
                key,
                RangeCache {
                    hi,
                    acc: acc.clone(),
                    max_abs: max_abs.clone(),
                    last_step: last_step.clone(),
                },
            );
        }
        if additive {
            self.check_loss(&acc, &max_abs)?;
        }
        if infinite && hi >= lo && last_step > self.tail {
            self.tail = last_step;
        }
        Ok(acc)
    }

    fn harmonic(
        &mut self,
        key: usize,
        word: &[i64],
        offset: Option<&FBig>,
        n: i64,
    ) -> Result<FBig, EvalError> {
        assert!(!word.is_empty());
        let fp = match offset {
            Some(v) => Evaluator::fingerprint(&[v]),
            None => String::new(),
        };
        let depth = word.len();
        let cache_key = (key, fp);
        let (mut from, mut levels) = match self.harmonics.get(&cache_key) {
            Some(c) if c.upto <= n => (c.upto + 1, c.levels.clone()),
            _ => (1, vec![FBig::ZERO.with_precision(self.prec).value(); depth]),
        };
        while from <= n {
            let base = match offset {
                Some(a) => a + &self.f_int(from),
                None => self.f_int(from),
            };
            if base == f_zero() {
                return Err(EvalError::Pole);
            }
            for d in (0..depth).rev() {
                let entry = word[d];
                let mut term = &self.f_int(1) / &self.ipow(&base, entry.unsigned_abs());
                if entry < 0 && from % 2 != 0 {
                    term = -term;
                }
                if d + 1 < depth {
                    term = &term * &levels[d + 1];
                }
                levels[d] = &levels[d] + &term;
            }
            from += 1;
        }
        let result = levels[0].clone();
        self.harmonics.insert(
            cache_key,
            HarmonicCache {
                upto: n,
                levels,
            },
        );
        Ok(result)
    }
}
