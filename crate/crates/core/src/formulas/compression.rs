//! Grouping admissible pairs by their filling, and the compression factor
//! `c(λ) = #𝒜(λ) / t(λ)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::ControlFlow;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::Meter;
use crate::chains::LambdaChain;
use crate::combinatorics::{min_coset_reps, Partition};
use crate::error::{HlError, Result};
use crate::fillings::{count_fillings, enumerate_fillings, Filling, FillingClass};
use crate::report::Report;
use crate::tpoly::TPoly;
use crate::walks::{filling_map, for_each_admissible_from, AdmissiblePair, Budget, FillingMode, Orientation};

/// The instances of the compression-factor table, as `(λ, n)`.
pub const TABLE_INSTANCES: [(&[usize], usize); 5] =
    [(&[4, 2, 1], 4), (&[4, 2, 1], 5), (&[4, 2, 1], 6), (&[4, 3, 2, 1], 5), (&[4, 3, 2, 1], 6)];

/// The exact ratio `pairs / fillings`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CompressionFactor {
    pub pairs: u64,
    pub fillings: u64,
}

impl CompressionFactor {
    /// Reduced numerator and denominator.
    pub fn reduced(&self) -> (u64, u64) {
        let g = self.pairs.gcd(&self.fillings).max(1);
        (self.pairs / g, self.fillings / g)
    }

    /// Rounded half-up to one decimal, as tenths.
    pub fn rounded_tenths(&self) -> u64 {
        let (p, t) = (self.pairs as u128, self.fillings.max(1) as u128);
        ((20 * p + t) / (2 * t)) as u64
    }

    pub fn rounded(&self) -> String {
        let r = self.rounded_tenths();
        format!("{}.{}", r / 10, r % 10)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (p, q) = self.reduced();
        serde_json::json!({ "exact": format!("{p}/{q}"), "rounded": self.rounded() })
    }
}

impl fmt::Display for CompressionFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = self.reduced();
        write!(f, "{p}/{q} ≈ {}", self.rounded())
    }
}

/// `#𝒜(λ)`: admissible pairs with `w ∈ W^λ`.
pub fn count_admissible(lambda: &Partition, n: usize, budget: &Budget) -> Result<u64> {
    lambda.check_fits(n)?;
    let chain = LambdaChain::new(lambda, n)?;
    let counts: Vec<Result<u64>> = min_coset_reps(lambda, n)
        .par_iter()
        .map(|w| {
            let mut count = 0u64;
            let mut meter = Meter::new(budget);
            let _ = for_each_admissible_from(chain.roots(), None, Orientation::Decreasing, w, &mut |_, _| {
                count += 1;
                meter.tick()
            });
            meter.finish()?;
            Ok(count)
        })
        .collect();
    counts.into_iter().sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub lambda: Vec<usize>,
    pub n: usize,
    /// `t(λ) = |ℱ̂(λ, n)|`.
    pub fillings: u64,
    pub factor: CompressionFactor,
}

impl TableRow {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda": self.lambda,
            "n": self.n,
            "t": self.fillings,
            "pairs": self.factor.pairs,
            "c": self.factor.to_json(),
        })
    }
}

pub fn table_row(lambda: &Partition, n: usize, budget: &Budget) -> Result<TableRow> {
    let pairs = count_admissible(lambda, n, budget)?;
    let fillings = count_fillings(lambda, n, FillingClass::Fhat) as u64;
    Ok(TableRow { lambda: lambda.parts().to_vec(), n, fillings, factor: CompressionFactor { pairs, fillings } })
}

pub fn table_rows(budget: &Budget) -> Result<Vec<TableRow>> {
    TABLE_INSTANCES.iter().map(|(parts, n)| table_row(&Partition::new(parts.to_vec())?, *n, budget)).collect()
}

/// Per-filling sums of `t^{(ℓ(w)+ℓ(wφ(J))-|J|)/2} (1-t)^{|J|}`, keyed by
/// `(e, d)` with multiplicities.
type Groups = HashMap<Filling, (BTreeMap<(usize, usize), u64>, AdmissiblePair)>;

fn group_by_filling(chain: &LambdaChain, budget: &Budget) -> Result<(Groups, u64)> {
    let lambda = chain.lambda();
    let parts: Vec<Result<(Groups, u64)>> = min_coset_reps(lambda, chain.n())
        .par_iter()
        .map(|w| {
            let mut groups: Groups = HashMap::new();
            let mut meter = Meter::new(budget);
            let mut count = 0u64;
            let mut bad = None;
            let lw = w.length();
            let _ = for_each_admissible_from(chain.roots(), None, Orientation::Decreasing, w, &mut |pos, end| {
                let pair = AdmissiblePair { w: w.clone(), positions: pos.to_vec() };
                let f = match filling_map(chain, &pair, FillingMode::Forward) {
                    Ok(f) => f,
                    Err(e) => {
                        bad = Some(e);
                        return ControlFlow::Break(());
                    }
                };
                let key = ((lw + end.length() - pos.len()) / 2, pos.len());
                let entry = groups.entry(f).or_insert_with(|| (BTreeMap::new(), pair));
                *entry.0.entry(key).or_insert(0) += 1;
                count += 1;
                meter.tick()
            });
            if let Some(e) = bad {
                return Err(e);
            }
            meter.finish()?;
            Ok((groups, count))
        })
        .collect();
    let mut all: Groups = HashMap::new();
    let mut total = 0;
    for p in parts {
        let (g, c) = p?;
        total += c;
        for (f, (m, witness)) in g {
            let entry = all.entry(f).or_insert_with(|| (BTreeMap::new(), witness.clone()));
            if witness < entry.1 {
                entry.1 = witness;
            }
            for (k, v) in m {
                *entry.0.entry(k).or_insert(0) += v;
            }
        }
    }
    Ok((all, total))
}

fn collect(terms: &BTreeMap<(usize, usize), u64>) -> TPoly {
    let mut acc = TPoly::zero();
    for (&(e, d), &c) in terms {
        acc += &TPoly::t_one_minus_t(e, d).scale(&c.into());
    }
    acc
}

/// Groups `𝒜(λ)` by the filling map and checks, for every `σ ∈ ℱ(λ, n)`,
/// that the group is nonempty and sums to `t^{cinv(σ)} (1-t)^{des(σ)}`.
/// Requires `n - 1` distinct nonzero parts.
pub fn compression_report(lambda: &Partition, n: usize, budget: &Budget) -> Result<Report> {
    lambda.check_fits(n)?;
    if !lambda.is_regular(n) {
        return Err(HlError::Domain(format!(
            "compression needs n - 1 = {} distinct nonzero parts, got ({lambda})",
            n.saturating_sub(1)
        )));
    }
    let chain = LambdaChain::new(lambda, n)?;
    let (groups, pairs) = group_by_filling(&chain, budget)?;
    let fillings = enumerate_fillings(lambda, n, FillingClass::AllValid);
    let mut r = Report::new("compress", Some(lambda.parts().to_vec()), n);
    let mut per_filling = Vec::with_capacity(fillings.len());
    for sigma in &fillings {
        let expect = TPoly::t_one_minus_t(sigma.cinv(), sigma.des());
        let got = groups.get(sigma).map(|(terms, _)| collect(terms));
        per_filling.push(serde_json::json!({
            "filling": sigma.to_json(),
            "collected": got.as_ref().map(|g| g.to_string()),
            "expected": expect.to_string(),
            "pass": got.as_ref() == Some(&expect),
        }));
        match groups.get(sigma) {
            None => r.fail("empty preimage".into(), serde_json::json!({ "filling": sigma.to_json() })),
            Some((_, witness)) => {
                let got = got.unwrap_or_default();
                r.check(
                    got == expect,
                    || "group sum differs from t^cinv (1-t)^des".into(),
                    || {
                        serde_json::json!({
                            "filling": sigma.to_json(),
                            "pair": witness.to_json(),
                            "got": got.to_string(),
                            "expected": expect.to_string(),
                        })
                    },
                );
            }
        }
    }
    let valid: std::collections::HashSet<&Filling> = fillings.iter().collect();
    let mut strays: Vec<_> = groups.iter().filter(|(f, _)| !valid.contains(f)).collect();
    strays.sort_by(|a, b| a.0.cmp(b.0));
    for (f, (_, witness)) in strays {
        r.fail(
            "filling map leaves the valid fillings".into(),
            serde_json::json!({ "filling": f.to_json(), "pair": witness.to_json() }),
        );
    }
    let factor = CompressionFactor { pairs, fillings: fillings.len() as u64 };
    r.set_detail("pairs", pairs);
    r.set_detail("fillings", fillings.len());
    r.set_detail("compression_factor", factor.to_json());
    r.set_detail("per_filling", per_filling);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rounding_is_half_up() {
        let f = |p, t| CompressionFactor { pairs: p, fillings: t }.rounded();
        assert_eq!(f(29, 10), "2.9");
        assert_eq!(f(285, 100), "2.9");
        assert_eq!(f(284, 100), "2.8");
        assert_eq!(f(9, 1), "9.0");
        assert_eq!(f(1, 20), "0.1");
        assert_eq!(CompressionFactor { pairs: 6, fillings: 4 }.reduced(), (3, 2));
    }

    #[test]
    fn compression_small_regular() {
        for (parts, n) in [(vec![2, 1], 3), (vec![3, 1], 3), (vec![1], 2)] {
            let r = compression_report(&part(&parts), n, &Budget::default()).unwrap();
            assert!(r.passed(), "{:?}", r.failures);
        }
    }

    #[test]
    fn compression_needs_regular() {
        assert!(matches!(compression_report(&part(&[2, 2]), 3, &Budget::default()), Err(HlError::Domain(_))));
    }

    #[test]
    fn small_table_row() {
        let row = table_row(&part(&[1]), 2, &Budget::default()).unwrap();
        assert_eq!(row.fillings, 2);
        assert_eq!(row.factor.pairs, 3);
        assert_eq!(row.factor.rounded(), "1.5");
    }

    #[test]
    fn first_table_row() {
        let row = table_row(&part(&[4, 2, 1]), 4, &Budget::default()).unwrap();
        assert_eq!(row.fillings, 366);
        assert_eq!(row.factor.rounded(), "2.9");
    }
}
