//! The three expansions of `P_λ` and `Q_λ`, the `P`/`Q` normalization, and
//! the `t = 0` / `t = 1` oracles.

mod compression;
mod segments;

pub use compression::{
    compression_report, count_admissible, table_row, table_rows, CompressionFactor, TableRow, TABLE_INSTANCES,
};
pub use segments::{check_prop_a, check_prop_b, check_prop_c, check_prop_d, segment_report, straddling_cinv};

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::chains::LambdaChain;
use crate::combinatorics::{min_coset_reps, Partition};
use crate::error::{HlError, Result};
use crate::fillings::{for_each_with_rightmost, rightmost_columns, FillingClass};
use crate::report::Report;
use crate::tpoly::{t_quantum_factorial, ExponentVector, SymPoly, TPoly, TermAccumulator};
use crate::walks::{
    enumerate_admissible, folded_hyperplane_level, for_each_admissible_from, level_from_filling, weight_by_affine_map,
    Budget, Orientation, Starts,
};

/// Leaves visited between two charges against the shared budget.
const CHARGE_BATCH: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PAlcove,
    PFillings,
    QHhl,
    PFromQ,
    Schur,
    Monomial,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::PAlcove, Method::PFillings, Method::QHhl, Method::PFromQ, Method::Schur, Method::Monomial];

    pub fn name(self) -> &'static str {
        match self {
            Method::PAlcove => "p-alcove",
            Method::PFillings => "p-fillings",
            Method::QHhl => "q-hhl",
            Method::PFromQ => "p-from-q",
            Method::Schur => "schur",
            Method::Monomial => "monomial",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HlError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| HlError::Parse(format!("unknown method {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormulaResult {
    pub lambda: Partition,
    pub n: usize,
    pub method: Method,
    pub poly: SymPoly,
    /// Summands before collection.
    pub term_count: u64,
}

impl FormulaResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda": self.lambda.parts(),
            "n": self.n,
            "method": self.method.name(),
            "poly": self.poly.to_json(),
            "term_count": self.term_count,
        })
    }
}

/// Charges the budget in batches from inside an enumeration callback.
struct Meter<'a> {
    budget: &'a Budget,
    pending: u64,
    error: Option<HlError>,
}

impl<'a> Meter<'a> {
    fn new(budget: &'a Budget) -> Self {
        Meter { budget, pending: 0, error: None }
    }

    #[inline]
    fn tick(&mut self) -> ControlFlow<()> {
        self.pending += 1;
        if self.pending == CHARGE_BATCH {
            return self.flush();
        }
        ControlFlow::Continue(())
    }

    fn flush(&mut self) -> ControlFlow<()> {
        let k = std::mem::take(&mut self.pending);
        match self.budget.charge(k) {
            Ok(()) => ControlFlow::Continue(()),
            Err(e) => {
                self.error = Some(e);
                ControlFlow::Break(())
            }
        }
    }

    fn finish(mut self) -> Result<()> {
        if self.error.is_none() {
            let _ = self.flush();
        }
        match self.error {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn merge_all(parts: Vec<Result<TermAccumulator>>) -> Result<TermAccumulator> {
    let mut acc = TermAccumulator::new();
    for p in parts {
        acc = acc.merge(p?);
    }
    Ok(acc)
}

fn finish(lambda: &Partition, n: usize, method: Method, acc: TermAccumulator) -> Result<FormulaResult> {
    let term_count = acc.total();
    Ok(FormulaResult { lambda: lambda.clone(), n, method, poly: acc.into_sympoly(n)?, term_count })
}

fn to_exponents(weight: &[i64]) -> Result<ExponentVector> {
    weight
        .iter()
        .map(|&x| u32::try_from(x).map_err(|_| HlError::Inconsistent(format!("negative weight {weight:?}"))))
        .collect::<Result<Vec<_>>>()
        .map(ExponentVector)
}

/// `P_λ` as a sum over admissible pairs: each `(w, J)` contributes
/// `t^{(ℓ(w)+ℓ(wφ(J))-|J|)/2} (1-t)^{|J|} x^{w(μ(J))}`.
pub fn p_alcove(lambda: &Partition, n: usize, budget: &Budget) -> Result<FormulaResult> {
    lambda.check_fits(n)?;
    let chain = LambdaChain::new(lambda, n)?;
    let starts = min_coset_reps(lambda, n);
    let parts: Vec<Result<TermAccumulator>> = starts
        .par_iter()
        .map(|w| {
            let mut acc = TermAccumulator::new();
            let mut meter = Meter::new(budget);
            let mut bad = None;
            let lw = w.length();
            let _ = for_each_admissible_from(chain.roots(), None, Orientation::Decreasing, w, &mut |pos, end| {
                let weight = weight_by_affine_map(&chain, w, pos);
                match to_exponents(&weight) {
                    Ok(ev) => acc.push(ev, ((lw + end.length() - pos.len()) / 2) as u32, pos.len() as u32),
                    Err(e) => {
                        bad = Some(e);
                        return ControlFlow::Break(());
                    }
                }
                meter.tick()
            });
            if let Some(e) = bad {
                return Err(e);
            }
            meter.finish()?;
            Ok(acc)
        })
        .collect();
    finish(lambda, n, Method::PAlcove, merge_all(parts)?)
}

fn filling_sum(lambda: &Partition, n: usize, class: FillingClass, budget: &Budget) -> Result<TermAccumulator> {
    lambda.check_fits(n)?;
    let extra = match class {
        FillingClass::AllValid => lambda.length() as u32,
        FillingClass::Fhat => 0,
    };
    let firsts = rightmost_columns(lambda, n, class);
    let parts: Vec<Result<TermAccumulator>> = firsts
        .into_par_iter()
        .map(|first| {
            let mut acc = TermAccumulator::new();
            let mut meter = Meter::new(budget);
            let _ = for_each_with_rightmost(lambda, n, first, &mut |f| {
                acc.push(f.content(n), f.cinv() as u32, extra + f.des() as u32);
                meter.tick()
            });
            meter.finish()?;
            Ok(acc)
        })
        .collect();
    merge_all(parts)
}

/// `Q_λ = Σ_{σ ∈ ℱ(λ,n)} t^{cinv(σ)} (1-t)^{ℓ(λ)+des(σ)} x^{ct(σ)}`.
pub fn q_hhl(lambda: &Partition, n: usize, budget: &Budget) -> Result<FormulaResult> {
    let acc = filling_sum(lambda, n, FillingClass::AllValid, budget)?;
    finish(lambda, n, Method::QHhl, acc)
}

/// `P_λ = Σ_{σ ∈ ℱ̂(λ,n)} t^{cinv(σ)} (1-t)^{des(σ)} x^{ct(σ)}`.
pub fn p_fillings(lambda: &Partition, n: usize, budget: &Budget) -> Result<FormulaResult> {
    let acc = filling_sum(lambda, n, FillingClass::Fhat, budget)?;
    finish(lambda, n, Method::PFillings, acc)
}

/// `(1-t)^{ℓ(λ)} Π_i [m_i]_t!`, the ratio `Q_λ / P_λ`.
pub fn q_over_p(lambda: &Partition) -> TPoly {
    lambda
        .multiplicities()
        .iter()
        .fold(TPoly::one_minus_t_pow(lambda.length()), |acc, &(_, m)| acc * t_quantum_factorial(m))
}

/// Recovers `P_λ` from `Q_λ` by exact division.
pub fn p_from_q(q: &FormulaResult, lambda: &Partition, n: usize) -> Result<SymPoly> {
    if q.lambda != *lambda || q.n != n {
        return Err(HlError::Domain(format!(
            "Q was computed for ({}) with n = {}, not ({lambda}) with n = {n}",
            q.lambda, q.n
        )));
    }
    q.poly.div_exact(&q_over_p(lambda))
}

/// Computes one of the six polynomials by name.
pub fn compute(method: Method, lambda: &Partition, n: usize, budget: &Budget) -> Result<FormulaResult> {
    match method {
        Method::PAlcove => p_alcove(lambda, n, budget),
        Method::PFillings => p_fillings(lambda, n, budget),
        Method::QHhl => q_hhl(lambda, n, budget),
        Method::PFromQ => {
            let q = q_hhl(lambda, n, budget)?;
            let poly = p_from_q(&q, lambda, n)?;
            Ok(FormulaResult { method: Method::PFromQ, poly, ..q })
        }
        Method::Schur | Method::Monomial => {
            lambda.check_fits(n)?;
            let (poly, count) = if method == Method::Schur { schur_ssyt(lambda, n) } else { monomial(lambda, n) };
            Ok(FormulaResult { lambda: lambda.clone(), n, method, poly, term_count: count })
        }
    }
}

/// Schur polynomial `s_λ(x_1..x_n)` by enumerating semistandard tableaux.
/// Returns the polynomial and the number of tableaux.
pub fn schur_ssyt(lambda: &Partition, n: usize) -> (SymPoly, u64) {
    let mut out = SymPoly::new(n);
    let mut count = 0u64;
    if lambda.length() > n {
        return (out, 0);
    }
    let rows: Vec<usize> = lambda.parts().to_vec();
    let mut tab: Vec<Vec<u8>> = rows.iter().map(|&r| Vec::with_capacity(r)).collect();
    let mut content = vec![0u32; n];
    fn rec(
        rows: &[usize],
        n: usize,
        i: usize,
        tab: &mut Vec<Vec<u8>>,
        content: &mut Vec<u32>,
        out: &mut SymPoly,
        count: &mut u64,
    ) {
        if i == rows.len() {
            *count += 1;
            let _ = out.accumulate(ExponentVector(content.clone()), &TPoly::one());
            return;
        }
        let j = tab[i].len();
        if j == rows[i] {
            return rec(rows, n, i + 1, tab, content, out, count);
        }
        let left = if j > 0 { tab[i][j - 1] } else { 1 };
        let above = if i > 0 { tab[i - 1][j] + 1 } else { 1 };
        for x in left.max(above)..=n as u8 {
            tab[i].push(x);
            content[x as usize - 1] += 1;
            rec(rows, n, i, tab, content, out, count);
            content[x as usize - 1] -= 1;
            tab[i].pop();
        }
    }
    rec(&rows, n, 0, &mut tab, &mut content, &mut out, &mut count);
    (out, count)
}

/// Monomial symmetric polynomial `m_λ(x_1..x_n)`: one term per distinct
/// rearrangement of the padded parts.
pub fn monomial(lambda: &Partition, n: usize) -> (SymPoly, u64) {
    let mut out = SymPoly::new(n);
    if lambda.length() > n {
        return (out, 0);
    }
    let mut v: Vec<u32> = lambda.padded_exponents(n).0;
    v.sort_unstable();
    let mut count = 0;
    loop {
        count += 1;
        let _ = out.accumulate(ExponentVector(v.clone()), &TPoly::one());
        // next lexicographic permutation of the multiset
        let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else { break };
        let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
        v.swap(i - 1, j);
        v[i..].reverse();
    }
    (out, count)
}

fn lambda_json(lambda: &Partition) -> Option<Vec<usize>> {
    Some(lambda.parts().to_vec())
}

fn diff_witness(a: &SymPoly, b: &SymPoly, la: &str, lb: &str) -> serde_json::Value {
    let mut rows = Vec::new();
    let mut keys: Vec<&ExponentVector> = a.terms().map(|(e, _)| e).chain(b.terms().map(|(e, _)| e)).collect();
    keys.sort();
    keys.dedup();
    for e in keys {
        let (x, y) = (a.coefficient(e).unwrap_or_default(), b.coefficient(e).unwrap_or_default());
        if x != y {
            rows.push(serde_json::json!({ "exps": e.0, la: x.to_string(), lb: y.to_string() }));
        }
        if rows.len() == 5 {
            break;
        }
    }
    serde_json::Value::Array(rows)
}

/// `p_alcove = p_fillings = p_from_q(q_hhl)`, plus symmetry and degree of
/// every computed `P` and `Q`.
pub fn cross_check(lambda: &Partition, n: usize, budget: &Budget) -> Result<Report> {
    let mut r = Report::new("cross", lambda_json(lambda), n);
    let alcove = p_alcove(lambda, n, budget)?;
    let fill = p_fillings(lambda, n, budget)?;
    let q = q_hhl(lambda, n, budget)?;
    let from_q = p_from_q(&q, lambda, n)?;
    r.check(
        alcove.poly == fill.poly,
        || "p-alcove differs from p-fillings".into(),
        || diff_witness(&alcove.poly, &fill.poly, "p-alcove", "p-fillings"),
    );
    r.check(
        alcove.poly == from_q,
        || "p-alcove differs from p-from-q".into(),
        || diff_witness(&alcove.poly, &from_q, "p-alcove", "p-from-q"),
    );
    let degree = lambda.size() as u64;
    for (name, poly) in
        [("p-alcove", &alcove.poly), ("p-fillings", &fill.poly), ("q-hhl", &q.poly), ("p-from-q", &from_q)]
    {
        r.check(poly.is_symmetric(), || format!("{name} is not symmetric"), || serde_json::json!(name));
        r.check(
            poly.is_homogeneous(degree),
            || format!("{name} is not homogeneous of degree {degree}"),
            || serde_json::json!(name),
        );
    }
    r.set_detail("pairs", alcove.term_count);
    r.set_detail("fhat_fillings", fill.term_count);
    r.set_detail("fillings", q.term_count);
    Ok(r)
}

/// `P_λ(t = 0) = s_λ` and `P_λ(t = 1) = m_λ`.
pub fn specialization_check(lambda: &Partition, n: usize, budget: &Budget) -> Result<Report> {
    let mut r = Report::new("specialize", lambda_json(lambda), n);
    let p = p_alcove(lambda, n, budget)?;
    let (s, _) = schur_ssyt(lambda, n);
    let (m, _) = monomial(lambda, n);
    let (p0, p1) = (p.poly.at_t_zero(), p.poly.at_t_one());
    r.check(p0 == s, || "P at t=0 differs from the Schur polynomial".into(), || diff_witness(&p0, &s, "p", "schur"));
    r.check(
        p1 == m,
        || "P at t=1 differs from the monomial polynomial".into(),
        || diff_witness(&p1, &m, "p", "monomial"),
    );
    Ok(r)
}

/// Compares the folded hyperplane level with the filling count at every
/// position of every admissible pair.
pub fn level_check(lambda: &Partition, n: usize, budget: &Budget) -> Result<Report> {
    lambda.check_fits(n)?;
    let mut r = Report::new("levels", lambda_json(lambda), n);
    let chain = LambdaChain::new(lambda, n)?;
    let pairs = enumerate_admissible(&chain, &Starts::MinCosetReps, budget)?;
    for p in &pairs {
        for k in 0..chain.len() {
            let geo = folded_hyperplane_level(&chain, p, k)?;
            let fil = level_from_filling(&chain, p, k)?;
            r.check(
                geo == fil,
                || format!("level mismatch at position {}", k + 1),
                || {
                    serde_json::json!({
                        "pair": p.to_json(),
                        "k": k + 1,
                        "geometric": [geo.c, geo.d, geo.level],
                        "filling": [fil.c, fil.d, fil.level],
                    })
                },
            );
        }
    }
    r.set_detail("pairs", pairs.len());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn ev(v: &[u32]) -> ExponentVector {
        ExponentVector(v.to_vec())
    }

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn single_box() {
        let l = part(&[1]);
        let p = p_alcove(&l, 2, &b()).unwrap();
        assert_eq!(p.term_count, 3);
        assert_eq!(p.poly.to_string(), "x2 + x1");
        assert_eq!(p_fillings(&l, 2, &b()).unwrap().poly, p.poly);
        let q = q_hhl(&l, 2, &b()).unwrap();
        assert_eq!(q.poly.coefficient(&ev(&[1, 0])).unwrap(), TPoly::from_i64s(&[1, -1]));
        assert_eq!(q.poly.coefficient(&ev(&[0, 1])).unwrap(), TPoly::from_i64s(&[1, -1]));
        assert_eq!(p_from_q(&q, &l, 2).unwrap(), p.poly);
    }

    #[test]
    fn zero_partition_gives_one() {
        let l = Partition::empty();
        for m in [Method::PAlcove, Method::PFillings, Method::QHhl, Method::PFromQ, Method::Schur, Method::Monomial] {
            let r = compute(m, &l, 3, &b()).unwrap();
            assert_eq!(r.poly, SymPoly::one(3), "{m}");
        }
    }

    #[test]
    fn three_rows_of_two_coefficient() {
        let l = part(&[2, 2, 2]);
        let x = ev(&[2, 1, 2, 1]);
        let one_minus_t = TPoly::from_i64s(&[1, -1]);
        for m in [Method::PAlcove, Method::PFillings, Method::PFromQ] {
            let r = compute(m, &l, 4, &b()).unwrap();
            assert_eq!(r.poly.coefficient(&x).unwrap(), one_minus_t, "{m}");
        }
        let q = q_hhl(&l, 4, &b()).unwrap();
        let expect = TPoly::one_minus_t_pow(4) * TPoly::from_i64s(&[1, 1]) * TPoly::from_i64s(&[1, 1, 1]);
        assert_eq!(q.poly.coefficient(&x).unwrap(), expect);
    }

    #[test]
    fn q_over_p_examples() {
        assert_eq!(q_over_p(&part(&[1])), TPoly::from_i64s(&[1, -1]));
        assert_eq!(q_over_p(&part(&[2, 2, 2])), TPoly::one_minus_t_pow(3) * t_quantum_factorial(3));
        assert_eq!(q_over_p(&Partition::empty()), TPoly::one());
    }

    #[test]
    fn p_from_q_rejects_mismatch() {
        let q = q_hhl(&part(&[1]), 2, &b()).unwrap();
        assert!(matches!(p_from_q(&q, &part(&[1]), 3), Err(HlError::Domain(_))));
    }

    #[test]
    fn schur_examples() {
        let (s, c) = schur_ssyt(&part(&[2, 1]), 3);
        assert_eq!(c, 8);
        assert_eq!(s.coefficient(&ev(&[1, 1, 1])).unwrap(), TPoly::constant(2));
        let (s, _) = schur_ssyt(&part(&[1]), 2);
        assert_eq!(s.to_string(), "x2 + x1");
    }

    /// Brute force: all fillings of the diagram with rows weakly increasing
    /// and columns strictly increasing.
    #[test]
    fn schur_matches_brute_force() {
        for (parts, n) in [(vec![2, 1], 3), (vec![2, 2], 3), (vec![3, 1], 3), (vec![2, 1, 1], 4)] {
            let l = part(&parts);
            let cells: Vec<(usize, usize)> =
                parts.iter().enumerate().flat_map(|(i, &r)| (0..r).map(move |j| (i, j))).collect();
            let mut brute = SymPoly::new(n);
            let total = n.pow(cells.len() as u32);
            for code in 0..total {
                let mut c = code;
                let mut t = vec![vec![0u8; parts[0]]; parts.len()];
                for &(i, j) in &cells {
                    t[i][j] = (c % n) as u8 + 1;
                    c /= n;
                }
                let ok =
                    cells.iter().all(|&(i, j)| (j == 0 || t[i][j - 1] <= t[i][j]) && (i == 0 || t[i - 1][j] < t[i][j]));
                if ok {
                    let mut content = vec![0u32; n];
                    for &(i, j) in &cells {
                        content[t[i][j] as usize - 1] += 1;
                    }
                    brute.accumulate(ExponentVector(content), &TPoly::one()).unwrap();
                }
            }
            assert_eq!(schur_ssyt(&l, n).0, brute);
        }
    }

    #[test]
    fn monomial_examples() {
        let (m, c) = monomial(&part(&[2, 2]), 2);
        assert_eq!(c, 1);
        assert_eq!(m.to_string(), "x1^2*x2^2");
        let (m, c) = monomial(&part(&[2, 1]), 3);
        assert_eq!(c, 6);
        assert!(m.is_symmetric());
        let (_, c) = monomial(&part(&[1, 1]), 4);
        assert_eq!(c, 6);
    }

    #[test]
    fn budget_errors_surface() {
        let r = p_alcove(&part(&[2, 1]), 4, &Budget::new(10));
        assert_eq!(r.unwrap_err(), HlError::BudgetExceeded { budget: 10 });
        let r = q_hhl(&part(&[2, 1]), 4, &Budget::new(10));
        assert_eq!(r.unwrap_err(), HlError::BudgetExceeded { budget: 10 });
    }

    #[test]
    fn too_many_parts_rejected() {
        assert!(matches!(p_alcove(&part(&[1, 1, 1]), 3, &b()), Err(HlError::TooManyParts { .. })));
        assert!(matches!(q_hhl(&part(&[1, 1, 1]), 3, &b()), Err(HlError::TooManyParts { .. })));
    }

    #[test]
    fn small_cross_checks() {
        for (parts, n) in [(vec![2, 1], 3), (vec![2, 2], 3), (vec![3, 1], 4), (vec![2, 1, 1], 4)] {
            let l = part(&parts);
            assert!(cross_check(&l, n, &b()).unwrap().passed());
            assert!(specialization_check(&l, n, &b()).unwrap().passed());
        }
    }

    #[test]
    fn levels_small() {
        let r = level_check(&part(&[2, 1]), 3, &b()).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn json_shape() {
        let r = p_fillings(&part(&[1]), 2, &b()).unwrap();
        let j = r.to_json();
        assert_eq!(j["lambda"], serde_json::json!([1]));
        assert_eq!(j["method"], "p-fillings");
        assert_eq!(j["term_count"], 2);
        assert_eq!(SymPoly::from_json(2, &j["poly"]).unwrap(), r.poly);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("p-magic".parse::<Method>().is_err());
    }
}
