//! Exhaustive checks of the sums over `ω_k`-chain segments that add up to
//! the compression identity.

use std::collections::{BTreeMap, HashMap};
use std::ops::ControlFlow;

use crate::chains::{
    omega_chain_reversed, omega_chain_reversed_tail, omega_chain_tail, LambdaChain, Layout, Transposition,
};
use crate::combinatorics::{count_below, count_between, inversions, Partition, Permutation};
use crate::error::Result;
use crate::fillings::{enumerate_fillings, Filling, FillingClass};
use crate::report::Report;
use crate::tpoly::TPoly;
use crate::walks::{filling_map, for_each_admissible_from, n_stat, AdmissiblePair, FillingMode, Orientation};

/// Sums `t^{e}(1-t)^{|T|}` over the walks from `w`, where `weight` returns
/// `Some(e)` for the walks that take part.
fn walk_sum<F>(roots: &[Transposition], orientation: Orientation, w: &Permutation, mut weight: F) -> TPoly
where
    F: FnMut(&[usize], &Permutation) -> Option<usize>,
{
    let mut terms: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let _ = for_each_admissible_from(roots, None, orientation, w, &mut |pos, end| {
        if let Some(e) = weight(pos, end) {
            *terms.entry((e, pos.len())).or_insert(0) += 1;
        }
        ControlFlow::Continue(())
    });
    let mut acc = TPoly::zero();
    for ((e, d), c) in terms {
        acc += &TPoly::t_one_minus_t(e, d).scale(&c.into());
    }
    acc
}

fn picked(roots: &[Transposition], pos: &[usize]) -> Vec<Transposition> {
    pos.iter().map(|&p| roots[p]).collect()
}

/// Over `Γ(k, p)` with any start `w = w_1 w_2 w_3` (`|w_1| = k`, `|w_3| = p`):
/// `Σ t^{(ℓ(w)+ℓ(wT)-|T|)/2} (1-t)^{|T|} = t^{ℓ(w_1)+ℓ(w_2 w_3)+N_{w(1)}(w_3)}`.
pub fn check_prop_a(n: usize) -> Result<Report> {
    let mut r = Report::new("segments-a", None, n);
    for k in 1..n {
        for p in 0..=n - k {
            let roots = omega_chain_tail(k, n, p)?;
            for w in Permutation::all(n) {
                let lw = w.length();
                let got =
                    walk_sum(&roots, Orientation::Decreasing, &w, |pos, end| Some((lw + end.length() - pos.len()) / 2));
                let s = w.word();
                let (w1, w23, w3) = (&s[..k], &s[k..], &s[n - p..]);
                let e = inversions(w1) + inversions(w23) + count_below(w3, s[0]);
                let expect = TPoly::monomial(1, e);
                r.check(got == expect, || "segment sum mismatch".into(), || {
                    serde_json::json!({ "k": k, "p": p, "w": w.to_string(), "got": got.to_string(), "expected": expect.to_string() })
                });
            }
        }
    }
    Ok(r)
}

/// Over `Γ^r(1, p)` with `a = w(1) ≤ b` and `p < w^{-1}(b) - 1`, restricted to
/// `wT(1) = b`: `Σ t^{N(w,T)} (1-t)^{|T|} = t^{N_{ab}(w[2,p+1])} (1-t)^{1-δ_{ab}}`.
pub fn check_prop_b(n: usize) -> Result<Report> {
    let mut r = Report::new("segments-b", None, n);
    for w in Permutation::all(n) {
        let a = w.at(1);
        for b in a..=n as u8 {
            let pos_b = w.position_of(b);
            for p in 0..pos_b.saturating_sub(1) {
                let roots = omega_chain_reversed_tail(1, n, p)?;
                let got = walk_sum(&roots, Orientation::Increasing, &w, |pos, end| {
                    (end.at(1) == b).then(|| n_stat(&w, &picked(&roots, pos)))
                });
                let e = count_between(&w.word()[1..=p], a, b);
                let expect = TPoly::t_one_minus_t(e, usize::from(a != b));
                r.check(got == expect, || "row sum mismatch".into(), || {
                    serde_json::json!({ "w": w.to_string(), "b": b, "p": p, "got": got.to_string(), "expected": expect.to_string() })
                });
            }
        }
    }
    Ok(r)
}

/// All sequences of `k` distinct values in `1..=n`, lexicographically.
fn injections(k: usize, n: usize) -> Vec<Vec<u8>> {
    fn rec(k: usize, n: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in 1..=n as u8 {
            if !cur.contains(&x) {
                cur.push(x);
                rec(k, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(k, n, &mut Vec::new(), &mut out);
    out
}

/// The part of `cinv` of the two-column filling `left right` coming from
/// triples that straddle both columns; the remaining `ℓ(left)` belongs to the
/// left column alone. The right column is cut to the left column's length.
pub fn straddling_cinv(left: &[u8], right: &[u8]) -> Result<usize> {
    let k = left.len();
    let f = Filling::from_columns(Partition::new(vec![2; k])?, vec![right[..k].to_vec(), left.to_vec()])?;
    Ok(f.cinv() - inversions(left))
}

/// Permutations whose first entries are `prefix`.
fn with_prefix(prefix: &[u8], n: usize) -> impl Iterator<Item = Permutation> + '_ {
    Permutation::all(n).into_iter().filter(move |w| w.word().starts_with(prefix))
}

/// Over `Γ^r(k)`, for `C_1 ≤ C_2` componentwise with `C_2 C_1` a valid
/// two-column filling and `w[1,k] = C_1`, restricted to `wT[1,k] = C_2`:
/// `Σ t^{N(w,T)} (1-t)^{|T|} = t^{ℓ(C_2)-ℓ(C_1)+c} (1-t)^{des(C_2 C_1)}`, with
/// `c` the straddling part of `cinv(C_2 C_1)`.
pub fn check_prop_c(n: usize) -> Result<Report> {
    let mut r = Report::new("segments-c", None, n);
    let mut skipped = 0u64;
    for k in 1..n {
        let roots = omega_chain_reversed(k, n)?;
        let shape = Partition::new(vec![2; k])?;
        let seqs = injections(k, n);
        for c1 in &seqs {
            for c2 in seqs.iter().filter(|c2| c2.iter().zip(c1).all(|(x, y)| x >= y)) {
                let f = Filling::from_columns(shape.clone(), vec![c1.clone(), c2.clone()])?;
                if !f.is_valid() {
                    skipped += 1;
                    continue;
                }
                let e = (inversions(c2) + straddling_cinv(c2, c1)?) as i64 - inversions(c1) as i64;
                for w in with_prefix(c1, n) {
                    let got = walk_sum(&roots, Orientation::Increasing, &w, |pos, end| {
                        (end.word()[..k] == c2[..]).then(|| n_stat(&w, &picked(&roots, pos)))
                    });
                    let expect = if e >= 0 { TPoly::t_one_minus_t(e as usize, f.des()) } else { TPoly::zero() };
                    r.check(
                        e >= 0 && got == expect,
                        || "two-column sum mismatch".into(),
                        || {
                            serde_json::json!({
                                "k": k, "C1": c1, "C2": c2, "w": w.to_string(),
                                "got": got.to_string(), "expected": expect.to_string(),
                            })
                        },
                    );
                }
            }
        }
    }
    r.set_detail("invalid_column_pairs_skipped", skipped);
    Ok(r)
}

/// Over the reversed `λ`-chain, for `σ ∈ ℱ(λ, n)` with rightmost column `C`
/// and `w[1, λ'_1] = C`: `Σ_{(f^r)^{-1}(σ)} t^{N(w,T)} (1-t)^{|T|} =
/// t^{cinv(σ)-ℓ(C)} (1-t)^{des(σ)}`.
pub fn check_prop_d(lambda: &Partition, n: usize) -> Result<Report> {
    lambda.check_fits(n)?;
    let mut r = Report::new("segments-d", Some(lambda.parts().to_vec()), n);
    let chain = LambdaChain::new(lambda, n)?.variant(Layout::Reversed)?;
    let fillings = enumerate_fillings(lambda, n, FillingClass::AllValid);
    let height = lambda.column_length(1);
    for w in Permutation::all(n) {
        let mut groups: HashMap<Filling, BTreeMap<(usize, usize), u64>> = HashMap::new();
        let mut err = None;
        let _ = for_each_admissible_from(chain.roots(), None, Orientation::Increasing, &w, &mut |pos, _| {
            let pair = AdmissiblePair { w: w.clone(), positions: pos.to_vec() };
            match filling_map(&chain, &pair, FillingMode::Reverse) {
                Ok(f) => {
                    let e = n_stat(&w, &pair.transpositions(chain.roots()));
                    *groups.entry(f).or_default().entry((e, pos.len())).or_insert(0) += 1;
                    ControlFlow::Continue(())
                }
                Err(e) => {
                    err = Some(e);
                    ControlFlow::Break(())
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let prefix = &w.word()[..height];
        for sigma in fillings.iter().filter(|s| s.column(1) == prefix) {
            let mut got = TPoly::zero();
            for (&(e, d), &c) in groups.get(sigma).into_iter().flatten() {
                got += &TPoly::t_one_minus_t(e, d).scale(&c.into());
            }
            let e = sigma.cinv() as i64 - inversions(prefix) as i64;
            let expect = if e >= 0 { TPoly::t_one_minus_t(e as usize, sigma.des()) } else { TPoly::zero() };
            r.check(
                e >= 0 && got == expect,
                || "reversed-chain fibre sum mismatch".into(),
                || {
                    serde_json::json!({
                        "w": w.to_string(), "filling": sigma.to_json(),
                        "got": got.to_string(), "expected": expect.to_string(),
                    })
                },
            );
        }
    }
    Ok(r)
}

/// All four checks for `n`; the last one runs on `lambdas`.
pub fn segment_report(n: usize, lambdas: &[Partition]) -> Result<Report> {
    let mut r = Report::new("segments", None, n);
    let mut parts = vec![check_prop_a(n)?, check_prop_b(n)?, check_prop_c(n)?];
    for l in lambdas {
        parts.push(check_prop_d(l, n)?);
    }
    let mut summary = Vec::new();
    for p in parts {
        summary.push(serde_json::json!({ "kind": p.kind, "lambda": p.lambda, "checked": p.checked, "failures": p.failure_count }));
        r.absorb(p);
    }
    r.set_detail("parts", summary);
    Ok(r)
}
