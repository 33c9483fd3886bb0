//! Parameterized differential-operator families annihilating the classical
//! hypergeometric series in one to four variables, with generic symbolic
//! coefficients. Each family knows its series variables, its recurrence
//! index variables, and the parameter symbols appearing in the operators.

use crate::algebra::{q, Monomial, Polynomial, RationalFunction, Symbol};
use crate::hypsolve::HypSystem;

use super::convert::{find_de, find_re};
use super::{DiffOperator, PLDE};

#[derive(Clone, Debug)]
pub struct OperatorFamily {
    label: String,
    operators: Vec<DiffOperator>,
    series_vars: Vec<Symbol>,
    index_vars: Vec<Symbol>,
    parameters: Vec<Symbol>,
}

impl OperatorFamily {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn operators(&self) -> &[DiffOperator] {
        &self.operators
    }

    pub fn series_vars(&self) -> &[Symbol] {
        &self.series_vars
    }

    pub fn index_vars(&self) -> &[Symbol] {
        &self.index_vars
    }

    pub fn parameters(&self) -> &[Symbol] {
        &self.parameters
    }

    pub fn arity(&self) -> usize {
        self.series_vars.len()
    }

    /// The coefficient recurrences of every operator in the family.
    pub fn recurrences(&self) -> Vec<PLDE> {
        self.operators
            .iter()
            .flat_map(|op| {
                find_re(op, &self.series_vars, &self.index_vars)
                    .expect("family operators have polynomial coefficients")
            })
            .collect()
    }

    /// Reads the two-term recurrences as term ratios A(n + e_i)/A(n). Each
    /// family operator must produce a recurrence supported on exactly the
    /// shifts 0 and e_i for its own coordinate.
    pub fn ratio_system(&self) -> Option<HypSystem> {
        let r = self.arity();
        let recs = self.recurrences();
        if recs.len() != r {
            return None;
        }
        let mut ratios = Vec::with_capacity(r);
        for (i, rec) in recs.iter().enumerate() {
            let mut unit = vec![0i64; r];
            unit[i] = 1;
            let support = rec.structure_set();
            if support.len() != 2 || !support.contains(&vec![0; r]) || !support.contains(&unit) {
                return None;
            }
            let c0 = rec.coefficient_of(&vec![0; r])?.clone();
            let c1 = rec.coefficient_of(&unit)?.clone();
            ratios.push(RationalFunction::new(-&c0, c1));
        }
        HypSystem::new(self.index_vars.clone(), ratios).ok()
    }
}

fn pvar(name: &str) -> Polynomial {
    Polynomial::var(Symbol::param(name))
}

fn cx(name: &str, pows: &[(Symbol, u32)]) -> Polynomial {
    &pvar(name) * &Polynomial::monomial(Monomial::from_pairs(pows.to_vec()), q(1))
}

fn params(names: &[&str]) -> Vec<Symbol> {
    names.iter().map(|n| Symbol::param(n)).collect()
}

/// The second-order family x(1-x) d^2 + (A1 + B1 x) d + C.
pub fn gauss_family() -> OperatorFamily {
    let mut fam = pfq_family(1);
    fam.label = "2F1".into();
    fam
}

/// The third-order one-variable family.
pub fn f32_family() -> OperatorFamily {
    let mut fam = pfq_family(2);
    fam.label = "3F2".into();
    fam
}

/// The order-(p+1) one-variable family
/// x^p (1-x) d^(p+1) + sum_k x^(k-1) (Ak + Bk x) d^k + C.
pub fn pfq_family(p: usize) -> OperatorFamily {
    assert!(p >= 1, "family needs order at least two");
    let x = Symbol::series("x");
    let n = Symbol::shift("n");
    let xv = Polynomial::var(x);
    let mut terms = Vec::new();
    let top = &xv.pow(p as u32) - &xv.pow(p as u32 + 1);
    terms.push((top, vec![p as u32 + 1]));
    let mut names = Vec::new();
    for k in 1..=p {
        let ak = format!("A{k}");
        let bk = format!("B{k}");
        let coeff = &(&pvar(&ak) + &(&pvar(&bk) * &xv)) * &xv.pow(k as u32 - 1);
        terms.push((coeff, vec![k as u32]));
        names.push(ak);
        names.push(bk);
    }
    terms.push((pvar("C"), vec![0]));
    names.push("C".into());
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    OperatorFamily {
        label: format!("{}F{}", p + 1, p),
        operators: vec![DiffOperator::new(1, terms)],
        series_vars: vec![x],
        index_vars: vec![n],
        parameters: params(&name_refs),
    }
}

/// The pair of second-order bivariate operators with generic linear
/// coefficients covering the Appell and Horn series.
pub fn horn_family() -> OperatorFamily {
    let x = Symbol::series("x");
    let y = Symbol::series("y");
    OperatorFamily {
        label: "horn".into(),
        operators: vec![horn_first(x, y), horn_second(x, y)],
        series_vars: vec![x, y],
        index_vars: vec![Symbol::shift("m"), Symbol::shift("n")],
        parameters: params(&[
            "a", "b", "c", "d", "e", "f", "g", "h", "j", "a1", "b1", "c1", "d1", "e1", "f1",
            "g1", "h1", "j1",
        ]),
    }
}

fn horn_first(x: Symbol, y: Symbol) -> DiffOperator {
    DiffOperator::new(
        2,
        vec![
            (pvar("a"), vec![0, 0]),
            (&cx("b", &[(x, 1)]) + &pvar("c"), vec![1, 0]),
            (&cx("d", &[(x, 1)]) + &cx("e", &[(x, 2)]), vec![2, 0]),
            (cx("f", &[(y, 1)]), vec![0, 1]),
            (&cx("g", &[(y, 1)]) + &cx("h", &[(x, 1), (y, 1)]), vec![1, 1]),
            (cx("j", &[(y, 2)]), vec![0, 2]),
        ],
    )
}

fn horn_second(x: Symbol, y: Symbol) -> DiffOperator {
    DiffOperator::new(
        2,
        vec![
            (pvar("a1"), vec![0, 0]),
            (&cx("b1", &[(y, 1)]) + &pvar("c1"), vec![0, 1]),
            (&cx("d1", &[(y, 1)]) + &cx("e1", &[(y, 2)]), vec![0, 2]),
            (cx("f1", &[(x, 1)]), vec![1, 0]),
            (&cx("g1", &[(x, 1)]) + &cx("h1", &[(x, 1), (y, 1)]), vec![1, 1]),
            (cx("j1", &[(x, 2)]), vec![2, 0]),
        ],
    )
}

fn cubic_first(x: Symbol, y: Symbol) -> DiffOperator {
    DiffOperator::new(
        2,
        vec![
            (pvar("a"), vec![0, 0]),
            (&pvar("c") + &cx("b", &[(x, 1)]), vec![1, 0]),
            (&cx("d", &[(x, 1)]) + &cx("e", &[(x, 2)]), vec![2, 0]),
            (&cx("l", &[(x, 2)]) + &cx("p", &[(x, 3)]), vec![3, 0]),
            (cx("f", &[(y, 1)]), vec![0, 1]),
            (&cx("q", &[(x, 1), (y, 1)]) + &cx("r", &[(x, 2), (y, 1)]), vec![2, 1]),
            (cx("j", &[(y, 2)]), vec![0, 2]),
            (cx("s", &[(x, 1), (y, 2)]), vec![1, 2]),
            (&cx("g", &[(y, 1)]) + &cx("h", &[(x, 1), (y, 1)]), vec![1, 1]),
        ],
    )
}

/// Bivariate family whose first operator carries third-order terms in the
/// first variable; the second operator is the generic second-order one.
pub fn s1_family() -> OperatorFamily {
    let x = Symbol::series("x");
    let y = Symbol::series("y");
    OperatorFamily {
        label: "s1".into(),
        operators: vec![cubic_first(x, y), horn_second(x, y)],
        series_vars: vec![x, y],
        index_vars: vec![Symbol::shift("m"), Symbol::shift("n")],
        parameters: params(&[
            "a", "b", "c", "d", "e", "f", "g", "h", "j", "l", "p", "q", "r", "s", "a1", "b1",
            "c1", "d1", "e1", "f1", "g1", "h1", "j1",
        ]),
    }
}

/// Bivariate family with third-order terms in both operators.
pub fn s2_family() -> OperatorFamily {
    let x = Symbol::series("x");
    let y = Symbol::series("y");
    let second = DiffOperator::new(
        2,
        vec![
            (pvar("a1"), vec![0, 0]),
            (cx("f1", &[(x, 1)]), vec![1, 0]),
            (&pvar("c1") + &cx("b1", &[(y, 1)]), vec![0, 1]),
            (cx("j1", &[(x, 2)]), vec![2, 1]),
            (&cx("d1", &[(y, 1)]) + &cx("e1", &[(y, 2)]), vec![0, 2]),
            (cx("q1", &[(x, 1), (y, 1)]), vec![1, 2]),
            (cx("p1", &[(y, 2)]), vec![0, 3]),
            (&cx("g1", &[(x, 1)]) + &cx("h1", &[(x, 1), (y, 1)]), vec![1, 1]),
        ],
    );
    OperatorFamily {
        label: "s2".into(),
        operators: vec![cubic_first(x, y), second],
        series_vars: vec![x, y],
        index_vars: vec![Symbol::shift("m"), Symbol::shift("n")],
        parameters: params(&[
            "a", "b", "c", "d", "e", "f", "g", "h", "j", "l", "p", "q", "r", "s", "a1", "b1",
            "c1", "d1", "e1", "f1", "g1", "h1", "j1", "p1", "q1",
        ]),
    }
}

/// The two-variable family of Kampe de Feriet type with upper parameter
/// blocks of sizes (p, q, k) and lower blocks of sizes (l, m, n). The
/// operators are generated from the term ratios of the double series.
pub fn kdf_family(p: usize, qn: usize, k: usize, l: usize, m: usize, n: usize) -> OperatorFamily {
    let r_sym = Symbol::shift("r");
    let s_sym = Symbol::shift("s");
    let x = Symbol::series("x");
    let y = Symbol::series("y");
    let rv = Polynomial::var(r_sym);
    let sv = Polynomial::var(s_sym);
    let rps = &rv + &sv;
    let block = |base: &Polynomial, stem: &str, count: usize| -> Polynomial {
        (1..=count).fold(Polynomial::one(), |acc, j| {
            &acc * &(base + &pvar(&format!("{stem}{j}")))
        })
    };
    let s1 = &block(&rps, "a", p) * &block(&rv, "b", qn);
    let t1 = &(&(&rv + &Polynomial::one()) * &block(&rps, "alpha", l)) * &block(&rv, "beta", m);
    let s2 = &block(&rps, "a", p) * &block(&sv, "c", k);
    let t2 = &(&(&sv + &Polynomial::one()) * &block(&rps, "alpha", l)) * &block(&sv, "gamma", n);
    let sys = HypSystem::new(
        vec![r_sym, s_sym],
        vec![RationalFunction::new(s1, t1), RationalFunction::new(s2, t2)],
    )
    .expect("ratio construction is well formed");
    let operators = find_de(&sys, &[x, y]);
    let mut names = Vec::new();
    for (stem, count) in [("a", p), ("b", qn), ("c", k), ("alpha", l), ("beta", m), ("gamma", n)]
    {
        for j in 1..=count {
            names.push(format!("{stem}{j}"));
        }
    }
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    OperatorFamily {
        label: "kdf".into(),
        operators,
        series_vars: vec![x, y],
        index_vars: vec![r_sym, s_sym],
        parameters: params(&name_refs),
    }
}

/// The generic three-variable second-order family.
pub fn triple_family() -> OperatorFamily {
    let x = Symbol::series("x");
    let y = Symbol::series("y");
    let z = Symbol::series("z");
    let first = DiffOperator::new(
        3,
        vec![
            (pvar("A"), vec![0, 0, 0]),
            (&pvar("B0") + &cx("B1", &[(x, 1)]), vec![1, 0, 0]),
            (&cx("E0", &[(x, 1)]) + &cx("E1", &[(x, 2)]), vec![2, 0, 0]),
            (cx("C1", &[(y, 1)]), vec![0, 1, 0]),
            (cx("F1", &[(y, 2)]), vec![0, 2, 0]),
            (&cx("H0", &[(y, 1)]) + &cx("H1", &[(x, 1), (y, 1)]), vec![1, 1, 0]),
            (cx("D1", &[(z, 1)]), vec![0, 0, 1]),
            (cx("G1", &[(z, 2)]), vec![0, 0, 2]),
            (&cx("L0", &[(z, 1)]) + &cx("L1", &[(x, 1), (z, 1)]), vec![1, 0, 1]),
            (cx("S1", &[(y, 1), (z, 1)]), vec![0, 1, 1]),
        ],
    );
    let second = DiffOperator::new(
        3,
        vec![
            (pvar("Ap"), vec![0, 0, 0]),
            (cx("Bp1", &[(x, 1)]), vec![1, 0, 0]),
            (cx("Ep1", &[(x, 2)]), vec![2, 0, 0]),
            (&pvar("Cp0") + &cx("Cp1", &[(y, 1)]), vec![0, 1, 0]),
            (&cx("Fp0", &[(y, 1)]) + &cx("Fp1", &[(y, 2)]), vec![0, 2, 0]),
            (&cx("Hp2", &[(x, 1)]) + &cx("Hp1", &[(x, 1), (y, 1)]), vec![1, 1, 0]),
            (cx("Dp1", &[(z, 1)]), vec![0, 0, 1]),
            (cx("Gp1", &[(z, 2)]), vec![0, 0, 2]),
            (cx("Lp1", &[(x, 1), (z, 1)]), vec![1, 0, 1]),
            (&cx("Sp0", &[(z, 1)]) + &cx("Sp1", &[(y, 1), (z, 1)]), vec![0, 1, 1]),
        ],
    );
    let third = DiffOperator::new(
        3,
        vec![
            (pvar("App"), vec![0, 0, 0]),
            (cx("Bpp1", &[(x, 1)]), vec![1, 0, 0]),
            (cx("Epp1", &[(x, 2)]), vec![2, 0, 0]),
            (cx("Cpp1", &[(y, 1)]), vec![0, 1, 0]),
            (cx("Fpp1", &[(y, 2)]), vec![0, 2, 0]),
            (cx("Hpp1", &[(x, 1), (y, 1)]), vec![1, 1, 0]),
            (&pvar("Dpp0") + &cx("Dpp1", &[(z, 1)]), vec![0, 0, 1]),
            (&cx("Gpp0", &[(z, 1)]) + &cx("Gpp1", &[(z, 2)]), vec![0, 0, 2]),
            (&cx("Lpp2", &[(x, 1)]) + &cx("Lpp1", &[(x, 1), (z, 1)]), vec![1, 0, 1]),
            (&cx("Spp2", &[(y, 1)]) + &cx("Spp1", &[(y, 1), (z, 1)]), vec![0, 1, 1]),
        ],
    );
    OperatorFamily {
        label: "triple".into(),
        operators: vec![first, second, third],
        series_vars: vec![x, y, z],
        index_vars: vec![Symbol::shift("m"), Symbol::shift("n"), Symbol::shift("p")],
        parameters: params(&[
            "A", "B0", "B1", "C1", "D1", "E0", "E1", "F1", "G1", "H0", "H1", "L0", "L1", "S1",
            "Ap", "Bp1", "Cp0", "Cp1", "Dp1", "Ep1", "Fp0", "Fp1", "Gp1", "Hp1", "Hp2", "Lp1",
            "Sp0", "Sp1", "App", "Bpp1", "Cpp1", "Dpp0", "Dpp1", "Epp1", "Fpp1", "Gpp0",
            "Gpp1", "Hpp1", "Lpp1", "Lpp2", "Spp1", "Spp2",
        ]),
    }
}

/// The generic four-variable second-order family.
pub fn quadruple_family() -> OperatorFamily {
    let x = Symbol::series("x");
    let y = Symbol::series("y");
    let z = Symbol::series("z");
    let t = Symbol::series("t");
    let first = DiffOperator::new(
        4,
        vec![
            (pvar("A"), vec![0, 0, 0, 0]),
            (cx("E1", &[(t, 1)]), vec![0, 0, 0, 1]),
            (cx("L1", &[(t, 2)]), vec![0, 0, 0, 2]),
            (&pvar("B0") + &cx("B1", &[(x, 1)]), vec![1, 0, 0, 0]),
            (&cx("F0", &[(x, 1)]) + &cx("F1", &[(x, 2)]), vec![2, 0, 0, 0]),
            (&cx("P0", &[(t, 1)]) + &cx("P1", &[(x, 1), (t, 1)]), vec![1, 0, 0, 1]),
            (cx("C1", &[(y, 1)]), vec![0, 1, 0, 0]),
            (cx("G1", &[(y, 2)]), vec![0, 2, 0, 0]),
            (cx("R1", &[(t, 1), (y, 1)]), vec![0, 1, 0, 1]),
            (&cx("M0", &[(y, 1)]) + &cx("M1", &[(x, 1), (y, 1)]), vec![1, 1, 0, 0]),
            (cx("D1", &[(z, 1)]), vec![0, 0, 1, 0]),
            (cx("H1", &[(z, 2)]), vec![0, 0, 2, 0]),
            (cx("S1", &[(t, 1), (z, 1)]), vec![0, 0, 1, 1]),
            (&cx("N0", &[(z, 1)]) + &cx("N1", &[(x, 1), (z, 1)]), vec![1, 0, 1, 0]),
            (cx("Q1", &[(y, 1), (z, 1)]), vec![0, 1, 1, 0]),
        ],
    );
    let second = DiffOperator::new(
        4,
        vec![
            (pvar("Ap"), vec![0, 0, 0, 0]),
            (cx("Ep1", &[(t, 1)]), vec![0, 0, 0, 1]),
            (cx("Lp1", &[(t, 2)]), vec![0, 0, 0, 2]),
            (cx("Bp1", &[(x, 1)]), vec![1, 0, 0, 0]),
            (cx("Fp1", &[(x, 2)]), vec![2, 0, 0, 0]),
            (cx("Pp1", &[(t, 1), (x, 1)]), vec![1, 0, 0, 1]),
            (&pvar("Cp0") + &cx("Cp1", &[(y, 1)]), vec![0, 1, 0, 0]),
            (&cx("Gp0", &[(y, 1)]) + &cx("Gp1", &[(y, 2)]), vec![0, 2, 0, 0]),
            (&cx("Rp0", &[(t, 1)]) + &cx("Rp1", &[(t, 1), (y, 1)]), vec![0, 1, 0, 1]),
            (&cx("Mp2", &[(x, 1)]) + &cx("Mp1", &[(x, 1), (y, 1)]), vec![1, 1, 0, 0]),
            (cx("Dp1", &[(z, 1)]), vec![0, 0, 1, 0]),
            (cx("Hp1", &[(z, 2)]), vec![0, 0, 2, 0]),
            (cx("Sp1", &[(t, 1), (z, 1)]), vec![0, 0, 1, 1]),
            (cx("Np1", &[(x, 1), (z, 1)]), vec![1, 0, 1, 0]),
            (&cx("Qp0", &[(z, 1)]) + &cx("Qp1", &[(y, 1), (z, 1)]), vec![0, 1, 1, 0]),
        ],
    );
    let third = DiffOperator::new(
        4,
        vec![
            (pvar("App"), vec![0, 0, 0, 0]),
            (cx("Epp1", &[(t, 1)]), vec![0, 0, 0, 1]),
            (cx("Lpp1", &[(t, 2)]), vec![0, 0, 0, 2]),
            (cx("Bpp1", &[(x, 1)]), vec![1, 0, 0, 0]),
            (cx("Fpp1", &[(x, 2)]), vec![2, 0, 0, 0]),
            (cx("Ppp1", &[(t, 1), (x, 1)]), vec![1, 0, 0, 1]),
            (cx("Cpp1", &[(y, 1)]), vec![0, 1, 0, 0]),
            (cx("Gpp1", &[(y, 2)]), vec![0, 2, 0, 0]),
            (cx("Rpp1", &[(t, 1), (y, 1)]), vec![0, 1, 0, 1]),
            (cx("Mpp1", &[(x, 1), (y, 1)]), vec![1, 1, 0, 0]),
            (&pvar("Dpp0") + &cx("Dpp1", &[(z, 1)]), vec![0, 0, 1, 0]),
            (&cx("Hpp0", &[(z, 1)]) + &cx("Hpp1", &[(z, 2)]), vec![0, 0, 2, 0]),
            (&cx("Spp0", &[(t, 1)]) + &cx("Spp1", &[(t, 1), (z, 1)]), vec![0, 0, 1, 1]),
            (&cx("Npp2", &[(x, 1)]) + &cx("Npp1", &[(x, 1), (z, 1)]), vec![1, 0, 1, 0]),
            (&cx("Qpp2", &[(y, 1)]) + &cx("Qpp1", &[(y, 1), (z, 1)]), vec![0, 1, 1, 0]),
        ],
    );
    let fourth = DiffOperator::new(
        4,
        vec![
            (pvar("Appp"), vec![0, 0, 0, 0]),
            (&pvar("Eppp0") + &cx("Eppp1", &[(t, 1)]), vec![0, 0, 0, 1]),
            (&cx("Lppp0", &[(t, 1)]) + &cx("Lppp1", &[(t, 2)]), vec![0, 0, 0, 2]),
            (cx("Bppp1", &[(x, 1)]), vec![1, 0, 0, 0]),
            (cx("Fppp1", &[(x, 2)]), vec![2, 0, 0, 0]),
            (&cx("Pppp2", &[(x, 1)]) + &cx("Pppp1", &[(t, 1), (x, 1)]), vec![1, 0, 0, 1]),
            (cx("Cppp1", &[(y, 1)]), vec![0, 1, 0, 0]),
            (cx("Gppp1", &[(y, 2)]), vec![0, 2, 0, 0]),
            (&cx("Rppp2", &[(y, 1)]) + &cx("Rppp1", &[(t, 1), (y, 1)]), vec![0, 1, 0, 1]),
            (cx("Mppp1", &[(x, 1), (y, 1)]), vec![1, 1, 0, 0]),
            (cx("Dppp1", &[(z, 1)]), vec![0, 0, 1, 0]),
            (cx("Hppp1", &[(z, 2)]), vec![0, 0, 2, 0]),
            (&cx("Sppp2", &[(z, 1)]) + &cx("Sppp1", &[(t, 1), (z, 1)]), vec![0, 0, 1, 1]),
            (cx("Nppp1", &[(x, 1), (z, 1)]), vec![1, 0, 1, 0]),
            (cx("Qppp1", &[(y, 1), (z, 1)]), vec![0, 1, 1, 0]),
        ],
    );
    OperatorFamily {
        label: "quadruple".into(),
        operators: vec![first, second, third, fourth],
        series_vars: vec![x, y, z, t],
        index_vars: vec![
            Symbol::shift("m"),
            Symbol::shift("n"),
            Symbol::shift("p"),
            Symbol::shift("q"),
        ],
        parameters: params(&[
            "A", "B0", "B1", "C1", "D1", "E1", "F0", "F1", "G1", "H1", "L1", "M0", "M1", "N0",
            "N1", "P0", "P1", "Q1", "R1", "S1", "Ap", "Bp1", "Cp0", "Cp1", "Dp1", "Ep1", "Fp1",
            "Gp0", "Gp1", "Hp1", "Lp1", "Mp1", "Mp2", "Np1", "Pp1", "Qp0", "Qp1", "Rp0", "Rp1",
            "Sp1", "App", "Bpp1", "Cpp1", "Dpp0", "Dpp1", "Epp1", "Fpp1", "Gpp1", "Hpp0",
            "Hpp1", "Lpp1", "Mpp1", "Npp1", "Npp2", "Ppp1", "Qpp1", "Qpp2", "Rpp1", "Spp0",
            "Spp1", "Appp", "Bppp1", "Cppp1", "Dppp1", "Eppp0", "Eppp1", "Fppp1", "Gppp1",
            "Hppp1", "Lppp0", "Lppp1", "Mppp1", "Nppp1", "Pppp1", "Pppp2", "Qppp1", "Rppp1",
            "Rppp2", "Sppp1", "Sppp2",
        ]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Polynomial {
        pvar(name)
    }

    #[test]
    fn horn_first_recurrence_matches_expected_form() {
        let fam = horn_family();
        let recs = fam.recurrences();
        assert_eq!(recs.len(), 2);
        let m = Polynomial::var(Symbol::shift("m"));
        let n = Polynomial::var(Symbol::shift("n"));
        let one = Polynomial::one();
        // [a + bm + e(m-1)m + fn + hmn + j(n-1)n] f[m,n]
        //   + (1+m)(c + dm + gn) f[1+m,n] = 0
        let c00 = &(&(&v("a") + &(&v("b") * &m)) + &(&v("e") * &(&(&m - &one) * &m)))
            + &(&(&(&v("f") * &n) + &(&v("h") * &(&m * &n))) + &(&v("j") * &(&(&n - &one) * &n)));
        let c10 = &(&one + &m) * &(&(&v("c") + &(&v("d") * &m)) + &(&v("g") * &n));
        let expect = PLDE::new(
            2,
            vec![(c00, vec![0, 0]), (c10, vec![1, 0])],
            Polynomial::zero(),
        )
        .normalized();
        assert_eq!(recs[0], expect);
    }

    #[test]
    fn horn_second_recurrence_matches_expected_form() {
        let fam = horn_family();
        let recs = fam.recurrences();
        let m = Polynomial::var(Symbol::shift("m"));
        let n = Polynomial::var(Symbol::shift("n"));
        let one = Polynomial::one();
        // [a1 + f1 m + j1(m-1)m + n(b1 + h1 m + e1(n-1))] f[m,n]
        //   + (1+n)(c1 + g1 m + d1 n) f[m,1+n] = 0
        let inner = &(&v("b1") + &(&v("h1") * &m)) + &(&v("e1") * &(&n - &one));
        let c00 = &(&(&v("a1") + &(&v("f1") * &m)) + &(&v("j1") * &(&(&m - &one) * &m)))
            + &(&n * &inner);
        let c01 = &(&one + &n) * &(&(&v("c1") + &(&v("g1") * &m)) + &(&v("d1") * &n));
        let expect = PLDE::new(
            2,
            vec![(c00, vec![0, 0]), (c01, vec![0, 1])],
            Polynomial::zero(),
        )
        .normalized();
        assert_eq!(recs[1], expect);
    }

    #[test]
    fn ratio_system_reads_two_term_recurrences() {
        let fam = gauss_family();
        let sys = fam.ratio_system().unwrap();
        assert_eq!(sys.arity(), 1);
        let n = Polynomial::var(Symbol::shift("n"));
        let one = Polynomial::one();
        // R(n) = (n(n - 1) - B1 n - C) / ((1+n)(n+A1))
        let num = &(&n * &(&n - &one)) - &(&(&v("B1") * &n) + &v("C"));
        let den = &(&one + &n) * &(&n + &v("A1"));
        assert_eq!(sys.ratio(0), &RationalFunction::new(num, den));
    }

    #[test]
    fn kdf_small_case_recurrence() {
        let fam = kdf_family(1, 1, 1, 1, 1, 1);
        assert_eq!(fam.arity(), 2);
        let recs = fam.recurrences();
        let r = Polynomial::var(Symbol::shift("r"));
        let s = Polynomial::var(Symbol::shift("s"));
        let one = Polynomial::one();
        // (r+s+a1)(r+b1) f[r,s] - (r+1)(r+s+alpha1)(r+beta1) f[r+1,s] = 0
        let c00 = &(&(&r + &s) + &v("a1")) * &(&r + &v("b1"));
        let c10 = &(&(&r + &one) * &(&(&r + &s) + &v("alpha1"))) * &(&r + &v("beta1"));
        let expect = PLDE::new(
            2,
            vec![(c00, vec![0, 0]), (-&c10, vec![1, 0])],
            Polynomial::zero(),
        )
        .normalized();
        assert_eq!(recs[0], expect);
    }

    #[test]
    fn triple_family_recurrences_are_two_term() {
        let fam = triple_family();
        let sys = fam.ratio_system().unwrap();
        assert_eq!(sys.arity(), 3);
        let recs = fam.recurrences();
        let m = Polynomial::var(Symbol::shift("m"));
        let n = Polynomial::var(Symbol::shift("n"));
        let p = Polynomial::var(Symbol::shift("p"));
        let one = Polynomial::one();
        let shifted = &(&one + &p)
            * &(&(&(&v("Dpp0") + &(&v("Lpp2") * &m)) + &(&v("Gpp0") * &p)) + &(&v("Spp2") * &n));
        assert_eq!(recs[2].coefficient_of(&[0, 0, 1]).unwrap(), &shifted);
    }

    #[test]
    fn quadruple_family_recurrences_are_two_term() {
        let fam = quadruple_family();
        let recs = fam.recurrences();
        assert_eq!(recs.len(), 4);
        let m = Polynomial::var(Symbol::shift("m"));
        let n = Polynomial::var(Symbol::shift("n"));
        let p = Polynomial::var(Symbol::shift("p"));
        let qv = Polynomial::var(Symbol::shift("q"));
        let one = Polynomial::one();
        let shifted = &(&one + &qv)
            * &(&(&(&(&v("Eppp0") + &(&v("Pppp2") * &m)) + &(&v("Lppp0") * &qv))
                + &(&v("Rppp2") * &n))
                + &(&v("Sppp2") * &p));
        assert_eq!(recs[3].coefficient_of(&[0, 0, 0, 1]).unwrap(), &shifted);
        assert!(fam.ratio_system().is_some());
    }

    #[test]
    fn pfq_reduces_to_gauss() {
        let g = gauss_family();
        let p1 = pfq_family(1);
        assert_eq!(g.operators(), p1.operators());
    }
}
