//! Parameter maps that specialize the generic operator families to
//! catalog series.
//!
//! Each [`MatchingCase`] carries:
//!
//! - the catalog label it targets,
//! - the generic [`OperatorFamily`] whose recurrences it specializes,
//! - a substitution map sending every family parameter to a polynomial in
//!   the target series' own parameters,
//! - a binding that renames catalog parameter symbols to the names used in
//!   the map's values.
//!
//! [`MatchingCase::verify`] substitutes the map into the family's term
//! ratios and compares them, coordinate by coordinate, with the term
//! ratios of the bound catalog summand. Since a hypergeometric summand is
//! determined by its ratios together with the unit value at the origin,
//! ratio agreement certifies the whole correspondence.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{Polynomial, RationalFunction, Symbol};
use crate::expr::{parse, Expression};
use crate::hypsolve::{ratios_of_summand, HypSystem};

use super::catalog::{catalog, catalog_indices};
use super::families::{horn_family, quadruple_family, s1_family, triple_family, OperatorFamily};

/// A catalog series realized as a parameter specialization of a generic
/// operator family.
#[derive(Clone, Debug)]
pub struct MatchingCase {
    label: String,
    family: OperatorFamily,
    map: BTreeMap<Symbol, Polynomial>,
    binding: BTreeMap<Symbol, Symbol>,
}

impl MatchingCase {
    /// Catalog label of the target series.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// The generic family being specialized.
    pub fn family(&self) -> &OperatorFamily {
        &self.family
    }

    /// Family parameter -> polynomial in the target parameters.
    pub fn map(&self) -> &BTreeMap<Symbol, Polynomial> {
        &self.map
    }

    /// Catalog parameter -> symbol used in the map's values. Parameters
    /// absent from the binding keep their catalog names.
    pub fn binding(&self) -> &BTreeMap<Symbol, Symbol> {
        &self.binding
    }

    /// Term ratios of the family recurrences after applying the map.
    pub fn mapped_ratio_system(&self) -> Option<HypSystem> {
        let sys = self.family.ratio_system()?;
        let vars = sys.vars().to_vec();
        let mut ratios = Vec::new();
        for r in sys.ratios() {
            let mut num = r.num().clone();
            let mut den = r.den().clone();
            for (param, value) in &self.map {
                num = num.subst(*param, value);
                den = den.subst(*param, value);
            }
            if den.is_zero() {
                return None;
            }
            ratios.push(RationalFunction::new(num, den));
        }
        HypSystem::new(vars, ratios).ok()
    }

    /// Term ratios of the catalog summand, with catalog parameters renamed
    /// through the binding and catalog indices renamed positionally to the
    /// family's index variables.
    pub fn catalog_ratio_system(&self) -> Option<HypSystem> {
        let entry = catalog().get(&self.label)?;
        let summand = entry.summand()?;
        let mut renames: BTreeMap<Symbol, Expression> = self
            .binding
            .iter()
            .map(|(from, to)| (*from, Expression::Sym(*to)))
            .collect();
        let from_indices = catalog_indices(entry.arity());
        let to_indices = self.family.index_vars();
        for (from, to) in from_indices.iter().zip(to_indices) {
            renames.insert(*from, Expression::Sym(*to));
        }
        let bound = summand.substitute(&renames).ok()?;
        ratios_of_summand(&bound, to_indices)
    }

    /// Check that the mapped family ratios equal the catalog summand's
    /// ratios in every coordinate.
    pub fn verify(&self) -> Result<(), String> {
        let mapped = self
            .mapped_ratio_system()
            .ok_or_else(|| format!("{}: family ratios do not specialize", self.label))?;
        let target = self
            .catalog_ratio_system()
            .ok_or_else(|| format!("{}: catalog summand has no ratio system", self.label))?;
        for i in 0..mapped.arity() {
            if mapped.ratio(i) != target.ratio(i) {
                return Err(format!(
                    "{}: ratio mismatch in coordinate {}: {} vs {}",
                    self.label,
                    i,
                    mapped.ratio(i),
                    target.ratio(i)
                ));
            }
        }
        Ok(())
    }
}

fn pol(text: &str) -> Polynomial {
    let e = parse(text).expect("map value parses");
    let r = e.to_rational_function().expect("map value is rational");
    assert!(r.den().is_one(), "map value must be polynomial: {text}");
    r.num().clone()
}

fn build_map(groups: &[(&[&str], &str)]) -> BTreeMap<Symbol, Polynomial> {
    let mut map = BTreeMap::new();
    for (keys, value) in groups {
        let v = pol(value);
        for key in *keys {
            let prev = map.insert(Symbol::param(key), v.clone());
            assert!(prev.is_none(), "duplicate map key {key}");
        }
    }
    map
}

fn case(
    label: &str,
    family: OperatorFamily,
    groups: &[(&[&str], &str)],
    binding: &[(&str, &str)],
) -> MatchingCase {
    let map = build_map(groups);
    let covered: BTreeSet<Symbol> = map.keys().copied().collect();
    let expected: BTreeSet<Symbol> = family.parameters().iter().copied().collect();
    assert_eq!(
        covered, expected,
        "{label}: map must cover the family parameters exactly"
    );
    let binding = binding
        .iter()
        .map(|(from, to)| (Symbol::param(from), Symbol::param(to)))
        .collect();
    MatchingCase {
        label: label.to_string(),
        family,
        map,
        binding,
    }
}

fn f1_case() -> MatchingCase {
    case(
        "F1",
        horn_family(),
        &[
            (&["a"], "alpha*beta"),
            (&["b"], "alpha+beta+1"),
            (&["c", "c1"], "-gamma"),
            (&["d", "g", "d1", "g1"], "-1"),
            (&["e", "h", "e1", "h1"], "1"),
            (&["f"], "beta"),
            (&["j", "j1"], "0"),
            (&["a1"], "alpha*beta1"),
            (&["b1"], "alpha+beta1+1"),
            (&["f1"], "beta1"),
        ],
        &[("a", "alpha"), ("b", "beta"), ("b1", "beta1"), ("c", "gamma")],
    )
}

fn h1_case() -> MatchingCase {
    case(
        "H1",
        horn_family(),
        &[
            (&["a"], "alpha*beta"),
            (&["b"], "alpha+beta+1"),
            (&["c"], "-delta"),
            (&["d", "j", "g1"], "-1"),
            (&["e", "d1", "e1", "h1"], "1"),
            (&["f"], "alpha-beta-1"),
            (&["g", "h", "j1"], "0"),
            (&["a1"], "beta*gamma"),
            (&["b1"], "beta+gamma+1"),
            (&["c1"], "1-alpha"),
            (&["f1"], "gamma"),
        ],
        &[("a", "alpha"), ("b", "beta"), ("c", "gamma"), ("d", "delta")],
    )
}

fn s1_case() -> MatchingCase {
    case(
        "S1",
        s1_family(),
        &[
            (&["a"], "alpha*alpha1*beta"),
            (&["b"], "(1+alpha1)*(1+beta)+alpha*(1+alpha1+beta)"),
            (&["c"], "-gamma*delta"),
            (&["d"], "-1-gamma-delta"),
            (&["e"], "3+alpha+alpha1+beta"),
            (&["f"], "(1+alpha+alpha1)*beta"),
            (&["g"], "-delta"),
            (&["h"], "3+alpha+alpha1+2*beta"),
            (&["j"], "beta"),
            (&["l", "q", "d1", "g1"], "-1"),
            (&["p", "s", "e1", "j1"], "1"),
            (&["r", "h1"], "2"),
            (&["a1"], "alpha*alpha1"),
            (&["b1", "f1"], "1+alpha+alpha1"),
            (&["c1"], "-gamma"),
        ],
        &[
            ("a", "alpha"),
            ("a1", "alpha1"),
            ("b", "beta"),
            ("c", "gamma"),
            ("d", "delta"),
        ],
    )
}

fn f1b_case() -> MatchingCase {
    case(
        "f1b",
        triple_family(),
        &[
            (&["A"], "b1*b2"),
            (&["B0"], "-c"),
            (&["B1"], "1+b1+b2"),
            (&["C1"], "-b2"),
            (&["D1"], "-b1"),
            (&["E0", "H1", "L1", "Hp2", "Lpp2"], "-1"),
            (&["E1", "S1", "Fp0", "Fp1", "Gpp0", "Gpp1"], "1"),
            (
                &[
                    "F1", "G1", "H0", "L0", "Bp1", "Dp1", "Ep1", "Gp1", "Hp1", "Lp1", "Sp0",
                    "Sp1", "Bpp1", "Cpp1", "Epp1", "Fpp1", "Hpp1", "Lpp1", "Spp1", "Spp2",
                ],
                "0",
            ),
            (&["Ap"], "a1*a2"),
            (&["Cp0"], "1-b1"),
            (&["Cp1"], "1+a1+a2"),
            (&["App"], "a3*a4"),
            (&["Dpp0"], "1-b2"),
            (&["Dpp1"], "1+a3+a4"),
        ],
        &[],
    )
}

fn f21a_case() -> MatchingCase {
    case(
        "f21a",
        triple_family(),
        &[
            (&["A", "Ap"], "a1*a2"),
            (&["B0"], "-c1"),
            (&["B1", "C1", "Bp1", "Cp1"], "1+a1+a2"),
            (&["D1", "Dp1"], "a2"),
            (&["E0", "Fp0", "Sp0", "Gpp0", "Spp2"], "-1"),
            (
                &[
                    "E1", "F1", "L1", "S1", "Ep1", "Fp1", "Lp1", "Sp1", "Gpp1", "Lpp1", "Spp1",
                ],
                "1",
            ),
            (
                &["G1", "H0", "L0", "Gp1", "Hp2", "Epp1", "Fpp1", "Hpp1", "Lpp2"],
                "0",
            ),
            (&["H1", "Hp1"], "2"),
            (&["Cp0", "Dpp0"], "-c2"),
            (&["App"], "a1*a3"),
            (&["Bpp1", "Cpp1"], "a3"),
            (&["Dpp1"], "1+a1+a3"),
        ],
        &[],
    )
}

fn f27b_case() -> MatchingCase {
    case(
        "f27b",
        triple_family(),
        &[
            (&["A"], "a1*a2"),
            (&["B0", "Cp0"], "1-b"),
            (&["B1"], "1+a1+a2"),
            (&["C1"], "a2"),
            (
                &[
                    "D1", "F1", "G1", "L1", "S1", "Dp1", "Ep1", "Gp1", "Lp1", "Sp1", "Lpp2",
                    "Spp2",
                ],
                "0",
            ),
            (
                &["E0", "E1", "H0", "H1", "Fp0", "Fp1", "Hp1", "Hp2", "Epp1", "Fpp1"],
                "1",
            ),
            (&["L0", "Sp0"], "-2"),
            (&["Ap"], "a1*a3"),
            (&["Bp1"], "a3"),
            (&["Cp1"], "1+a1+a3"),
            (&["App"], "b*(1+b)"),
            (&["Bpp1", "Cpp1"], "-2*b"),
            (&["Dpp0"], "-c"),
            (&["Dpp1"], "2*(3+2*b)"),
            (&["Gpp0"], "-1"),
            (&["Gpp1"], "4"),
            (&["Hpp1"], "2"),
            (&["Lpp1", "Spp1"], "-4"),
        ],
        &[],
    )
}

fn k1_case() -> MatchingCase {
    case(
        "K1",
        quadruple_family(),
        &[
            (&["A", "Ap", "App"], "a*b1"),
            (&["B0", "Eppp0"], "-c1"),
            (
                &["B1", "C1", "D1", "Bp1", "Cp1", "Dp1", "Bpp1", "Cpp1", "Dpp1"],
                "1+a+b1",
            ),
            (&["E1", "Ep1", "Epp1"], "b1"),
            (&["F0", "P0", "Gp0", "Hpp0", "Lppp0", "Pppp2"], "-1"),
            (
                &[
                    "F1", "G1", "H1", "P1", "R1", "S1", "Fp1", "Gp1", "Hp1", "Pp1", "Rp1",
                    "Sp1", "Fpp1", "Gpp1", "Hpp1", "Ppp1", "Rpp1", "Spp1", "Lppp1", "Pppp1",
                    "Rppp1", "Sppp1",
                ],
                "1",
            ),
            (
                &[
                    "L1", "M0", "N0", "Lp1", "Mp2", "Qp0", "Rp0", "Lpp1", "Npp2", "Qpp2",
                    "Spp0", "Fppp1", "Gppp1", "Hppp1", "Mppp1", "Nppp1", "Qppp1", "Rppp2",
                    "Sppp2",
                ],
                "0",
            ),
            (
                &["M1", "N1", "Q1", "Mp1", "Np1", "Qp1", "Mpp1", "Npp1", "Qpp1"],
                "2",
            ),
            (&["Cp0"], "-c2"),
            (&["Dpp0"], "-c3"),
            (&["Appp"], "a*b2"),
            (&["Bppp1", "Cppp1", "Dppp1"], "b2"),
            (&["Eppp1"], "1+a+b2"),
        ],
        &[],
    )
}

fn k21_case() -> MatchingCase {
    case(
        "K21",
        quadruple_family(),
        &[
            (&["A"], "a*b1"),
            (&["B0", "Cp0", "Dpp0", "Eppp0"], "-c1"),
            (&["B1"], "1+a+b1"),
            (&["C1"], "b1"),
            (
                &[
                    "D1", "E1", "G1", "H1", "L1", "N1", "P1", "Q1", "R1", "S1", "Dp1", "Ep1",
                    "Fp1", "Hp1", "Lp1", "Np1", "Pp1", "Qp1", "Rp1", "Sp1", "Bpp1", "Cpp1",
                    "Epp1", "Fpp1", "Gpp1", "Lpp1", "Mpp1", "Npp1", "Ppp1", "Qpp1", "Rpp1",
                    "Spp1", "Bppp1", "Cppp1", "Dppp1", "Fppp1", "Gppp1", "Hppp1", "Mppp1",
                    "Nppp1", "Pppp1", "Qppp1", "Rppp1", "Sppp1",
                ],
                "0",
            ),
            (
                &[
                    "F0", "M0", "N0", "P0", "Gp0", "Mp2", "Qp0", "Rp0", "Hpp0", "Npp2",
                    "Qpp2", "Spp0", "Lppp0", "Pppp2", "Rppp2", "Sppp2",
                ],
                "-1",
            ),
            (&["F1", "M1", "Gp1", "Mp1", "Hpp1", "Lppp1"], "1"),
            (&["Ap"], "a*b2"),
            (&["Bp1"], "b2"),
            (&["Cp1"], "1+a+b2"),
            (&["App"], "b3*b5"),
            (&["Dpp1"], "1+b3+b5"),
            (&["Appp"], "b4*b6"),
            (&["Eppp1"], "1+b4+b6"),
        ],
        &[],
    )
}

/// All catalog correspondences with a recorded parameter map.
pub fn matching_cases() -> Vec<MatchingCase> {
    vec![
        f1_case(),
        h1_case(),
        s1_case(),
        f1b_case(),
        f21a_case(),
        f27b_case(),
        k1_case(),
        k21_case(),
    ]
}

/// Look up a single correspondence by catalog label.
pub fn matching_case(label: &str) -> Option<MatchingCase> {
    matching_cases().into_iter().find(|c| c.label() == label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_cases_present() {
        let labels: Vec<&str> = vec!["F1", "H1", "S1", "f1b", "f21a", "f27b", "K1", "K21"];
        let cases = matching_cases();
        assert_eq!(cases.len(), labels.len());
        for (case, label) in cases.iter().zip(&labels) {
            assert_eq!(case.label(), *label);
        }
        assert!(matching_case("K21").is_some());
        assert!(matching_case("F4").is_none());
    }

    #[test]
    fn appell_f1_map_reproduces_catalog_ratios() {
        f1_case().verify().unwrap();
    }

    #[test]
    fn horn_h1_map_reproduces_catalog_ratios() {
        h1_case().verify().unwrap();
    }

    #[test]
    fn cubic_s1_map_reproduces_catalog_ratios() {
        s1_case().verify().unwrap();
    }

    #[test]
    fn triple_series_maps_reproduce_catalog_ratios() {
        for label in ["f1b", "f21a", "f27b"] {
            matching_case(label).unwrap().verify().unwrap();
        }
    }

    #[test]
    fn quadruple_series_maps_reproduce_catalog_ratios() {
        for label in ["K1", "K21"] {
            matching_case(label).unwrap().verify().unwrap();
        }
    }

    #[test]
    fn mapped_system_keeps_family_indices() {
        let sys = k1_case().mapped_ratio_system().unwrap();
        let names: Vec<&str> = sys.vars().iter().map(|v| v.name()).collect();
        assert_eq!(names, vec!["m", "n", "p", "q"]);
    }
}
