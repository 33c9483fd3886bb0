use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::algebra::{
    full_factor, poly_gcd, solve_linear, Polynomial, Rational, Symbol,
};

/// Integer shifts at which a translate of one polynomial shares a factor
/// with another. Isolated hits land in `finite_shifts`; infinite families
/// are reported through `lattice_generators` (a basis of the directions
/// along which matches repeat). `complete` is true when every factor pair
/// was settled exactly rather than by a windowed scan.
#[derive(Clone, Debug, PartialEq)]
pub struct SpreadResult {
    pub finite_shifts: BTreeSet<Vec<i64>>,
    pub lattice_generators: Vec<Vec<i64>>,
    pub complete: bool,
}

impl SpreadResult {
    /// True when no infinite family of matching shifts was found.
    pub fn is_finite(&self) -> bool {
        self.lattice_generators.is_empty()
    }
}

/// Componentwise maximum of the spread, when it is bounded.
#[derive(Clone, Debug, PartialEq)]
pub enum Dispersion {
    Empty,
    Finite(Vec<i64>),
    Infinite,
}

/// All integer shift vectors s (within reach, see [`SpreadResult`]) such
/// that p shifted by s and q share a common factor involving at least one
/// of `vars`. Factor pairs that are linear in `vars` are solved exactly as
/// an affine lattice; other pairs fall back to a scan of the box
/// `|s_i| <= window` and mark the result incomplete.
pub fn spread(p: &Polynomial, q: &Polynomial, vars: &[Symbol], window: i64) -> SpreadResult {
    let mut finite: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut gens: Vec<Vec<i64>> = Vec::new();
    let mut complete = true;

    let pf = var_factors(p, vars);
    let qf = var_factors(q, vars);
    for u in &pf {
        for w in &qf {
            match (linear_form(u, vars), linear_form(w, vars)) {
                (Some(lu), Some(lw)) => {
                    if let Some((point, kernel)) = affine_match(&lu, &lw) {
                        if kernel.is_empty() {
                            finite.insert(point);
                        } else {
                            gens.extend(kernel);
                        }
                    }
                }
                _ => {
                    if !proportional(&top_form(u, vars), &top_form(w, vars)) {
                        continue;
                    }
                    complete = false;
                    scan_box(u, w, vars, window, &mut finite);
                }
            }
        }
    }

    let zero = vec![0i64; vars.len()];
    if !finite.contains(&zero) && involves(&poly_gcd(p, q), vars) {
        finite.insert(zero);
    }
    SpreadResult {
        finite_shifts: finite,
        lattice_generators: lattice_basis(&gens),
        complete,
    }
}

/// Componentwise maximum of [`spread`], or `Infinite` when matches repeat
/// along a lattice direction.
pub fn dispersion(p: &Polynomial, q: &Polynomial, vars: &[Symbol], window: i64) -> Dispersion {
    let spr = spread(p, q, vars, window);
    if !spr.is_finite() {
        return Dispersion::Infinite;
    }
    if spr.finite_shifts.is_empty() {
        return Dispersion::Empty;
    }
    let mut max = vec![i64::MIN; vars.len()];
    for s in &spr.finite_shifts {
        for (m, &v) in max.iter_mut().zip(s) {
            *m = (*m).max(v);
        }
    }
    Dispersion::Finite(max)
}

pub(super) fn involves(p: &Polynomial, vars: &[Symbol]) -> bool {
    vars.iter().any(|v| p.contains_var(*v))
}

/// Irreducible factors of p that involve at least one shift variable,
/// without multiplicity.
pub(super) fn var_factors(p: &Polynomial, vars: &[Symbol]) -> Vec<Polynomial> {
    let (_, factors) = full_factor(p);
    factors
        .into_iter()
        .map(|(f, _)| f)
        .filter(|f| involves(f, vars))
        .collect()
}

/// A polynomial of total degree at most one in the shift variables, with
/// rational coefficients on the variables themselves.
pub(super) struct LinearForm {
    pub coeffs: Vec<Rational>,
    pub rest: Polynomial,
}

pub(super) fn linear_form(p: &Polynomial, vars: &[Symbol]) -> Option<LinearForm> {
    let mut coeffs = vec![Rational::zero(); vars.len()];
    let mut rest = Polynomial::zero();
    'terms: for (m, c) in p.terms() {
        let vdeg: u32 = vars.iter().map(|v| m.degree_in(*v)).sum();
        if vdeg == 0 {
            rest.add_term(m.clone(), c.clone());
            continue;
        }
        if vdeg > 1 || m.degree() > 1 {
            return None;
        }
        for (i, v) in vars.iter().enumerate() {
            if m.degree_in(*v) == 1 {
                coeffs[i] = &coeffs[i] + c;
                continue 'terms;
            }
        }
        unreachable!("monomial of variable degree one names a variable");
    }
    Some(LinearForm { coeffs, rest })
}

/// Shift vectors s with `N_s u` proportional to `w`, for linear forms.
/// Returns a witness point and a basis of the direction lattice, or None
/// when no shift matches.
fn affine_match(u: &LinearForm, w: &LinearForm) -> Option<(Vec<i64>, Vec<Vec<i64>>)> {
    let mut ratio: Option<Rational> = None;
    for (a, b) in u.coeffs.iter().zip(&w.coeffs) {
        match (a.is_zero(), b.is_zero()) {
            (true, true) => {}
            (false, false) => {
                let c = a / b;
                match &ratio {
                    None => ratio = Some(c),
                    Some(r) if *r == c => {}
                    _ => return None,
                }
            }
            _ => return None,
        }
    }
    let c = ratio?;
    let diff = &w.rest.scale(&c) - &u.rest;
    let d = diff.as_constant()?;

    let denoms = u
        .coeffs
        .iter()
        .chain(std::iter::once(&d))
        .map(|x| x.denom().clone())
        .fold(num_bigint::BigInt::one(), |acc, x| {
            num_integer::lcm(acc, x)
        });
    let scale = Rational::from(denoms);
    let row: Option<Vec<i128>> = u
        .coeffs
        .iter()
        .map(|x| i128::try_from((x * &scale).to_integer()).ok())
        .collect();
    let target = i128::try_from((&d * &scale).to_integer()).ok()?;
    let (point, kernel) = solve_diophantine_row(&row?, target)?;
    let point: Option<Vec<i64>> = point.into_iter().map(|x| i64::try_from(x).ok()).collect();
    let kernel: Option<Vec<Vec<i64>>> = kernel
        .into_iter()
        .map(|v| v.into_iter().map(|x| i64::try_from(x).ok()).collect())
        .collect();
    Some((point?, kernel?))
}

/// The terms of maximal total degree in the shift variables, kept with
/// their full monomials. Invariant under shifts, which makes it a cheap
/// exact filter before scanning.
pub(super) fn top_form(p: &Polynomial, vars: &[Symbol]) -> Polynomial {
    let vdeg =
        |m: &crate::algebra::Monomial| -> u32 { vars.iter().map(|v| m.degree_in(*v)).sum() };
    let top = p.terms().map(|(m, _)| vdeg(m)).max().unwrap_or(0);
    let mut out = Polynomial::zero();
    for (m, c) in p.terms() {
        if vdeg(m) == top {
            out.add_term(m.clone(), c.clone());
        }
    }
    out
}

pub(super) fn proportional(a: &Polynomial, b: &Polynomial) -> bool {
    if a.is_zero() || b.is_zero() {
        return a.is_zero() && b.is_zero();
    }
    let (ma, ca) = a.leading();
    let (mb, cb) = b.leading();
    if ma != mb {
        return false;
    }
    a == &b.scale(&(ca / cb))
}

fn scan_box(
    u: &Polynomial,
    w: &Polynomial,
    vars: &[Symbol],
    window: i64,
    hits: &mut BTreeSet<Vec<i64>>,
) {
    let r = vars.len();
    let mut shift = vec![-window; r];
    loop {
        let pairs: Vec<(Symbol, i64)> = vars.iter().copied().zip(shift.iter().copied()).collect();
        if proportional(&u.shift_all(&pairs), w) {
            hits.insert(shift.clone());
        }
        let mut i = 0;
        loop {
            if i == r {
                return;
            }
            shift[i] += 1;
            if shift[i] <= window {
                break;
            }
            shift[i] = -window;
            i += 1;
        }
    }
}

/// Integer solutions of `sum a_i s_i = d`: a particular point and a basis
/// of the homogeneous kernel. None when the gcd does not divide d.
pub(super) fn solve_diophantine_row(a: &[i128], d: i128) -> Option<(Vec<i128>, Vec<Vec<i128>>)> {
    let r = a.len();
    let mut b = a.to_vec();
    let mut u: Vec<Vec<i128>> = (0..r)
        .map(|i| {
            let mut col = vec![0i128; r];
            col[i] = 1;
            col
        })
        .collect();
    loop {
        let nz: Vec<usize> = (0..r).filter(|&i| b[i] != 0).collect();
        if nz.is_empty() {
            return if d == 0 { Some((vec![0; r], u)) } else { None };
        }
        if nz.len() == 1 {
            let p = nz[0];
            if d % b[p] != 0 {
                return None;
            }
            let t = d / b[p];
            let point = u[p].iter().map(|x| x * t).collect();
            let kernel = (0..r).filter(|&i| i != p).map(|i| u[i].clone()).collect();
            return Some((point, kernel));
        }
        let p = *nz.iter().min_by_key(|&&i| b[i].abs()).unwrap();
        for &j in &nz {
            if j == p {
                continue;
            }
            let q = b[j] / b[p];
            b[j] -= q * b[p];
            for t in 0..r {
                u[j][t] -= q * u[p][t];
            }
        }
    }
}

/// Row-style Hermite basis of the lattice spanned by the given vectors:
/// pivots positive, entries above each pivot reduced into `[0, pivot)`.
pub(super) fn lattice_basis(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut work: Vec<Vec<i64>> = rows
        .iter()
        .filter(|row| row.iter().any(|&x| x != 0))
        .cloned()
        .collect();
    let Some(r) = work.first().map(|row| row.len()) else {
        return Vec::new();
    };
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for col in 0..r {
        loop {
            let mut idxs: Vec<usize> = (0..work.len()).filter(|&i| work[i][col] != 0).collect();
            if idxs.len() <= 1 {
                break;
            }
            idxs.sort_by_key(|&i| work[i][col].abs());
            let p = idxs[0];
            for &j in &idxs[1..] {
                let q = work[j][col] / work[p][col];
                for t in 0..r {
                    work[j][t] -= q * work[p][t];
                }
            }
            work.retain(|row| row.iter().any(|&x| x != 0));
        }
        if let Some(i) = (0..work.len()).find(|&i| work[i][col] != 0) {
            let mut piv = work.remove(i);
            if piv[col] < 0 {
                for t in piv.iter_mut() {
                    *t = -*t;
                }
            }
            basis.push(piv);
        }
    }
    for j in (0..basis.len()).rev() {
        let cj = basis[j].iter().position(|&x| x != 0).unwrap();
        let pv = basis[j][cj];
        for i in 0..j {
            let q = basis[i][cj].div_euclid(pv);
            if q != 0 {
                for t in 0..basis[j].len() {
                    basis[i][t] -= q * basis[j][t];
                }
            }
        }
    }
    basis
}

/// Does the lattice spanned by `basis` contain `v`?
pub(super) fn lattice_contains(basis: &[Vec<i64>], v: &[i64]) -> bool {
    if v.iter().all(|&x| x == 0) {
        return true;
    }
    let mut rows: Vec<Vec<i64>> = basis.to_vec();
    rows.push(v.to_vec());
    lattice_basis(&rows) == lattice_basis(basis)
}

pub(super) enum Periodicity {
    Aperiodic { exact: bool },
    Periodic { generators: Vec<Vec<i64>> },
}

/// Decide whether an irreducible factor admits a nonzero shift with
/// `N_s u = u`. Linear factors are exact; for nonlinear ones the
/// candidate directions come from the rational kernel of
/// `sum s_i d/dv_i (top form) = 0`. A one-dimensional kernel is still
/// exact: a polynomial with any nonzero period along a line repeats with
/// the primitive step already, so one equality test settles it.
pub(super) fn classify_factor(u: &Polynomial, vars: &[Symbol]) -> Periodicity {
    if let Some(lf) = linear_form(u, vars) {
        let denoms = lf
            .coeffs
            .iter()
            .map(|x| x.denom().clone())
            .fold(num_bigint::BigInt::one(), |acc, x| num_integer::lcm(acc, x));
        let scale = Rational::from(denoms);
        let row: Vec<i128> = lf
            .coeffs
            .iter()
            .map(|x| i128::try_from((x * &scale).to_integer()).expect("small coefficients"))
            .collect();
        let (_, kernel) = solve_diophantine_row(&row, 0).expect("homogeneous row is solvable");
        let gens: Vec<Vec<i64>> = kernel
            .into_iter()
            .map(|v| v.into_iter().map(|x| x as i64).collect())
            .collect();
        let gens = lattice_basis(&gens);
        if gens.is_empty() {
            return Periodicity::Aperiodic { exact: true };
        }
        return Periodicity::Periodic { generators: gens };
    }

    let form = top_form(u, vars);
    let partials: Vec<Polynomial> = vars.iter().map(|v| form.derivative(*v)).collect();
    let mut monomials: BTreeSet<crate::algebra::Monomial> = BTreeSet::new();
    for p in &partials {
        for (m, _) in p.terms() {
            monomials.insert(m.clone());
        }
    }
    let rows: Vec<Vec<Rational>> = monomials
        .iter()
        .map(|m| {
            partials
                .iter()
                .map(|p| {
                    p.terms()
                        .find(|(pm, _)| *pm == m)
                        .map(|(_, c)| c.clone())
                        .unwrap_or_else(Rational::zero)
                })
                .collect()
        })
        .collect();
    let zeros = vec![Rational::zero(); monomials.len()];
    let kernel = solve_linear(&rows, &zeros)
        .expect("homogeneous system is consistent")
        .nullspace;
    if kernel.is_empty() {
        return Periodicity::Aperiodic { exact: true };
    }

    let dirs: Vec<Vec<i64>> = kernel.iter().map(|v| primitive_direction(v)).collect();
    let mut candidates: Vec<Vec<i64>> = dirs.clone();
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            let sum: Vec<i64> = dirs[i].iter().zip(&dirs[j]).map(|(a, b)| a + b).collect();
            let diff: Vec<i64> = dirs[i].iter().zip(&dirs[j]).map(|(a, b)| a - b).collect();
            candidates.push(sum);
            candidates.push(diff);
        }
    }
    let mut found: Vec<Vec<i64>> = Vec::new();
    for cand in candidates {
        if cand.iter().all(|&x| x == 0) {
            continue;
        }
        let pairs: Vec<(Symbol, i64)> = vars.iter().copied().zip(cand.iter().copied()).collect();
        if &u.shift_all(&pairs) == u {
            found.push(cand);
        }
    }
    if found.is_empty() {
        Periodicity::Aperiodic {
            exact: kernel.len() == 1,
        }
    } else {
        Periodicity::Periodic {
            generators: lattice_basis(&found),
        }
    }
}

fn primitive_direction(v: &[Rational]) -> Vec<i64> {
    let denoms = v
        .iter()
        .map(|x| x.denom().clone())
        .fold(num_bigint::BigInt::one(), |acc, x| num_integer::lcm(acc, x));
    let scale = Rational::from(denoms);
    let ints: Vec<num_bigint::BigInt> = v.iter().map(|x| (x * &scale).to_integer()).collect();
    let g = ints
        .iter()
        .fold(num_bigint::BigInt::zero(), |acc, x| num_integer::gcd(acc, x.clone()));
    if g.is_zero() {
        return vec![0; v.len()];
    }
    ints.iter()
        .map(|x| i64::try_from(x / &g).expect("small direction"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use num_traits::One;

    fn nk() -> (Symbol, Symbol) {
        (Symbol::shift("n"), Symbol::shift("k"))
    }

    fn pp(src: &str) -> Polynomial {
        let rf = parse(src).unwrap().to_rational_function().unwrap();
        let den = rf.den().as_constant().expect("polynomial input");
        rf.num().scale(&(Rational::one() / den))
    }

    #[test]
    fn linear_self_spread_is_a_lattice() {
        let (n, k) = nk();
        let p = pp("n + k + 2");
        let spr = spread(&p, &p, &[n, k], super::super::DEFAULT_WINDOW);
        assert!(spr.finite_shifts.contains(&vec![0, 0]));
        assert_eq!(spr.lattice_generators, vec![vec![1, -1]]);
        assert!(spr.complete);
        assert!(!spr.is_finite());
    }

    #[test]
    fn curved_self_spread_is_only_the_origin() {
        let (n, k) = nk();
        let p = pp("n^2 + k + 6");
        let spr = spread(&p, &p, &[n, k], 5);
        assert_eq!(spr.finite_shifts.into_iter().collect::<Vec<_>>(), vec![vec![0, 0]]);
        assert!(spr.lattice_generators.is_empty());
        assert!(!spr.complete);
    }

    #[test]
    fn single_variable_offset_is_found_exactly() {
        let n = Symbol::shift("n");
        let spr = spread(&pp("n"), &pp("n + 5"), &[n], super::super::DEFAULT_WINDOW);
        assert_eq!(spr.finite_shifts.into_iter().collect::<Vec<_>>(), vec![vec![5]]);
        assert!(spr.complete);
        assert_eq!(
            dispersion(&pp("n"), &pp("n + 5"), &[n], super::super::DEFAULT_WINDOW),
            Dispersion::Finite(vec![5])
        );
    }

    #[test]
    fn affine_family_without_origin_reports_only_generators() {
        let (n, k) = nk();
        let spr = spread(&pp("n + k"), &pp("n + k + 1"), &[n, k], 5);
        assert!(spr.finite_shifts.is_empty());
        assert_eq!(spr.lattice_generators, vec![vec![1, -1]]);
        assert_eq!(
            dispersion(&pp("n + k"), &pp("n + k + 1"), &[n, k], 5),
            Dispersion::Infinite
        );
    }

    #[test]
    fn disjoint_polynomials_have_empty_dispersion() {
        let (n, k) = nk();
        assert_eq!(
            dispersion(&pp("n"), &pp("k"), &[n], super::super::DEFAULT_WINDOW),
            Dispersion::Empty
        );
        let _ = k;
    }

    #[test]
    fn mismatched_degrees_skip_the_scan() {
        let (n, k) = nk();
        let spr = spread(&pp("n^2 + k"), &pp("n + k"), &[n, k], 3);
        assert!(spr.finite_shifts.is_empty());
        assert!(spr.complete);
    }

    #[test]
    fn hermite_basis_is_canonical() {
        assert_eq!(lattice_basis(&[vec![-1, 1]]), vec![vec![1, -1]]);
        assert_eq!(
            lattice_basis(&[vec![2, 0], vec![0, 2], vec![1, 1]]),
            vec![vec![1, 1], vec![0, 2]]
        );
        assert!(lattice_contains(&[vec![1, -1]], &[-3, 3]));
        assert!(!lattice_contains(&[vec![1, -1]], &[1, 1]));
    }

    #[test]
    fn diophantine_rows_solve_exactly() {
        let (point, kernel) = solve_diophantine_row(&[1, 1], 1).unwrap();
        assert_eq!(point.iter().sum::<i128>(), 1);
        assert_eq!(kernel.len(), 1);
        assert_eq!(kernel[0][0] + kernel[0][1], 0);
        assert!(solve_diophantine_row(&[2, 4], 3).is_none());
        let (point, kernel) = solve_diophantine_row(&[6, 10, 15], 1).unwrap();
        assert_eq!(6 * point[0] + 10 * point[1] + 15 * point[2], 1);
        assert_eq!(kernel.len(), 2);
        for v in kernel {
            assert_eq!(6 * v[0] + 10 * v[1] + 15 * v[2], 0);
        }
    }

    #[test]
    fn factor_classification_separates_periodic_from_aperiodic() {
        let (n, k) = nk();
        match classify_factor(&pp("n - k"), &[n, k]) {
            Periodicity::Periodic { generators } => assert_eq!(generators, vec![vec![1, 1]]),
            _ => panic!("linear difference is periodic"),
        }
        match classify_factor(&pp("n^2 + k"), &[n, k]) {
            Periodicity::Aperiodic { exact } => assert!(exact),
            _ => panic!("curved factor is aperiodic"),
        }
        match classify_factor(&pp("(n - k)^2 + n - k + 3"), &[n, k]) {
            Periodicity::Periodic { generators } => assert_eq!(generators, vec![vec![1, 1]]),
            _ => panic!("diagonal quadratic is periodic"),
        }
        match classify_factor(&pp("n^2 + 2*k"), &[n]) {
            Periodicity::Aperiodic { exact } => assert!(exact),
            _ => panic!("single shift variable in a square is aperiodic"),
        }
    }
}
