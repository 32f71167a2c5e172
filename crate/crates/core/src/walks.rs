//! Admissible pairs `(w, J)`: the combinatorial encoding of positively folded
//! alcove walks, as Bruhat chains `w > w r_{j_1} > ... > w φ(J)` (or
//! increasing chains for reversed chains).
//!
//! Positions in `J` are 0-based internally and 1-based in JSON.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::chains::{
    omega_chain_reversed_row, omega_chain_reversed_tail, omega_chain_tail, AffineReflection, LambdaChain, Layout,
    Transposition,
};
use crate::combinatorics::{count_between, min_coset_reps, Partition, Permutation};
use crate::error::{HlError, Result};
use crate::fillings::Filling;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Shared cap on the number of enumerated items.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: AtomicU64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit: limit.max(1), used: AtomicU64::new(0) }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    /// Records `k` more items; fails once the running total passes the limit.
    #[inline]
    pub fn charge(&self, k: u64) -> Result<()> {
        let prev = self.used.fetch_add(k, Ordering::Relaxed);
        if prev.saturating_add(k) > self.limit {
            Err(HlError::BudgetExceeded { budget: self.limit })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Length drops at every step.
    Decreasing,
    /// Length rises at every step.
    Increasing,
}

impl Orientation {
    /// Whether right multiplication of `u` by `(a, b)` moves in this direction.
    #[inline]
    pub fn allows(self, u: &Permutation, r: Transposition) -> bool {
        let (x, y) = (u.at(r.a()), u.at(r.b()));
        match self {
            Orientation::Decreasing => x > y,
            Orientation::Increasing => x < y,
        }
    }
}

/// Segments of `ω_k`-chains used by the segment-sum identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainSegmentSpec {
    /// `Γ(k, p)`.
    Omega { k: usize, p: usize },
    /// `Γ^r(k, p)`.
    OmegaReversed { k: usize, p: usize },
    /// Row `i` of `Γ^r(k)`.
    OmegaReversedRow { k: usize, i: usize },
}

impl ChainSegmentSpec {
    pub fn roots(self, n: usize) -> Result<Vec<Transposition>> {
        match self {
            ChainSegmentSpec::Omega { k, p } => omega_chain_tail(k, n, p),
            ChainSegmentSpec::OmegaReversed { k, p } => omega_chain_reversed_tail(k, n, p),
            ChainSegmentSpec::OmegaReversedRow { k, i } => omega_chain_reversed_row(k, n, i),
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            ChainSegmentSpec::Omega { .. } => Orientation::Decreasing,
            _ => Orientation::Increasing,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissiblePair {
    pub w: Permutation,
    /// Sorted 0-based chain positions.
    pub positions: Vec<usize>,
}

impl AdmissiblePair {
    pub fn new(w: Permutation, mut positions: Vec<usize>) -> Self {
        positions.sort_unstable();
        positions.dedup();
        AdmissiblePair { w, positions }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn transpositions(&self, roots: &[Transposition]) -> Vec<Transposition> {
        self.positions.iter().map(|&p| roots[p]).collect()
    }

    /// `w φ(J)`.
    pub fn end(&self, roots: &[Transposition]) -> Permutation {
        let mut u = self.w.clone();
        for &p in &self.positions {
            u.swap_positions(roots[p].a(), roots[p].b());
        }
        u
    }

    pub fn satisfies(&self, roots: &[Transposition], orientation: Orientation) -> bool {
        let mut u = self.w.clone();
        for &p in &self.positions {
            if p >= roots.len() || !orientation.allows(&u, roots[p]) {
                return false;
            }
            u.swap_positions(roots[p].a(), roots[p].b());
        }
        true
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j: Vec<usize> = self.positions.iter().map(|p| p + 1).collect();
        serde_json::json!({ "w": self.w.to_string(), "J": j })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            w: String,
            #[serde(rename = "J")]
            j: Vec<usize>,
        }
        let raw: Raw = serde_json::from_value(v.clone()).map_err(|e| HlError::Parse(e.to_string()))?;
        if raw.j.contains(&0) {
            return Err(HlError::Parse("positions are 1-based".into()));
        }
        Ok(AdmissiblePair::new(raw.w.parse()?, raw.j.into_iter().map(|p| p - 1).collect()))
    }
}

/// Depth-first walk over the chain: at each position skip first, then take
/// the root when the length moves in the required direction. Calls `visit`
/// with the chosen positions and the end permutation.
pub fn for_each_admissible_from<F>(
    roots: &[Transposition],
    mask: Option<&[bool]>,
    orientation: Orientation,
    start: &Permutation,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize], &Permutation) -> ControlFlow<()>,
{
    let mut u = start.clone();
    let mut pos = Vec::new();
    dfs(roots, mask, orientation, 0, &mut u, &mut pos, visit)
}

fn dfs<F>(
    roots: &[Transposition],
    mask: Option<&[bool]>,
    orientation: Orientation,
    k: usize,
    u: &mut Permutation,
    pos: &mut Vec<usize>,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize], &Permutation) -> ControlFlow<()>,
{
    if k == roots.len() {
        return visit(pos, u);
    }
    dfs(roots, mask, orientation, k + 1, u, pos, visit)?;
    let r = roots[k];
    if mask.is_none_or(|m| m[k]) && orientation.allows(u, r) {
        u.swap_positions(r.a(), r.b());
        pos.push(k);
        let res = dfs(roots, mask, orientation, k + 1, u, pos, visit);
        pos.pop();
        u.swap_positions(r.a(), r.b());
        res?;
    }
    ControlFlow::Continue(())
}

/// Which starting permutations to enumerate from.
#[derive(Clone, Debug)]
pub enum Starts {
    /// `W^λ`: minimal coset representatives.
    MinCosetReps,
    /// All of `S_n`.
    All,
    Fixed(Vec<Permutation>),
}

impl Starts {
    pub fn resolve(&self, lambda: &Partition, n: usize) -> Vec<Permutation> {
        match self {
            Starts::MinCosetReps => min_coset_reps(lambda, n),
            Starts::All => Permutation::all(n),
            Starts::Fixed(v) => v.clone(),
        }
    }
}

/// Collects every admissible pair on `roots` for the given starts, in order of
/// start, then depth-first with skip before take.
pub fn enumerate_on_roots(
    roots: &[Transposition],
    mask: Option<&[bool]>,
    orientation: Orientation,
    starts: &[Permutation],
    budget: &Budget,
) -> Result<Vec<AdmissiblePair>> {
    let mut out = Vec::new();
    let mut err = None;
    for w in starts {
        let flow = for_each_admissible_from(roots, mask, orientation, w, &mut |p, _| {
            if let Err(e) = budget.charge(1) {
                err = Some(e);
                return ControlFlow::Break(());
            }
            out.push(AdmissiblePair { w: w.clone(), positions: p.to_vec() });
            ControlFlow::Continue(())
        });
        if flow.is_break() {
            return Err(err.unwrap_or(HlError::BudgetExceeded { budget: budget.limit() }));
        }
    }
    Ok(out)
}

/// Admissible pairs on a `λ`-chain. Forward chains use the decreasing
/// condition, reversed ones the increasing condition.
pub fn enumerate_admissible(chain: &LambdaChain, starts: &Starts, budget: &Budget) -> Result<Vec<AdmissiblePair>> {
    let orientation = chain_orientation(chain);
    let starts = starts.resolve(chain.lambda(), chain.n());
    enumerate_on_roots(chain.roots(), None, orientation, &starts, budget)
}

pub fn chain_orientation(chain: &LambdaChain) -> Orientation {
    match chain.layout() {
        Layout::Forward => Orientation::Decreasing,
        _ => Orientation::Increasing,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetEvaluation {
    /// `w φ(J)`.
    pub end: Permutation,
    /// `μ(J) = r̂_{j_1} ... r̂_{j_s}(λ)`.
    pub mu: Vec<i64>,
    /// `w(μ(J))`.
    pub weight: Vec<i64>,
}

/// Applies the composed affine reflections to `λ`, rightmost first.
pub fn evaluate_subset(chain: &LambdaChain, pair: &AdmissiblePair) -> SubsetEvaluation {
    let mut mu = chain.lambda().padded(chain.n());
    for &p in pair.positions.iter().rev() {
        AffineReflection::new(chain.root(p), chain.level_of(p)).apply(&mut mu);
    }
    let weight = pair.w.act_on(&mu);
    SubsetEvaluation { end: pair.end(chain.roots()), mu, weight }
}

/// `w(μ(J))` computed left to right by tracking the affine map
/// `w r̂_{j_1} ... r̂_{j_i}` as a permutation plus a translation.
pub fn weight_by_affine_map(chain: &LambdaChain, w: &Permutation, positions: &[usize]) -> Vec<i64> {
    let n = chain.n();
    let mut u = w.clone();
    let mut shift = vec![0i64; n];
    for &p in positions {
        let r = chain.root(p);
        let l = chain.level_of(p);
        shift[u.at(r.a()) as usize - 1] += l;
        shift[u.at(r.b()) as usize - 1] -= l;
        u.swap_positions(r.a(), r.b());
    }
    let base = u.act_on(&chain.lambda().padded(n));
    base.iter().zip(&shift).map(|(x, y)| x + y).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FillingMode {
    /// `f` on the forward chain.
    Forward,
    /// `f^r(w, T) = f(wT, rev(T))` on a reversed chain.
    Reverse,
}

/// The filling whose column `j` lists the first `λ'_j` entries of the partial
/// product for that column.
pub fn filling_map(chain: &LambdaChain, pair: &AdmissiblePair, mode: FillingMode) -> Result<Filling> {
    let lambda = chain.lambda();
    match (mode, chain.layout()) {
        (FillingMode::Forward, Layout::Forward) => {}
        (FillingMode::Reverse, Layout::Reversed | Layout::ReversedReordered(_)) => {}
        _ => {
            return Err(HlError::Domain(format!(
                "filling mode {mode:?} does not match chain layout {:?}",
                chain.layout()
            )))
        }
    }
    let mut cols = vec![Vec::new(); lambda.width()];
    let mut u = pair.w.clone();
    let mut idx = 0;
    for (col, range) in chain.segments() {
        let take = |u: &Permutation| u.word()[..lambda.column_length(*col)].to_vec();
        if mode == FillingMode::Forward {
            cols[col - 1] = take(&u);
        }
        while idx < pair.positions.len() && range.contains(&pair.positions[idx]) {
            let r = chain.root(pair.positions[idx]);
            u.swap_positions(r.a(), r.b());
            idx += 1;
        }
        if mode == FillingMode::Reverse {
            cols[col - 1] = take(&u);
        }
    }
    if idx != pair.positions.len() {
        return Err(HlError::OutOfRange("position beyond the chain".into()));
    }
    Filling::from_columns(lambda.clone(), cols)
}

/// `N(w, T) = Σ_i N_{c_i d_i}(w_i[a_i, b_i])`.
pub fn n_stat(w: &Permutation, ts: &[Transposition]) -> usize {
    let mut u = w.clone();
    let mut total = 0;
    for r in ts {
        u.swap_positions(r.a(), r.b());
        let (x, y) = (u.at(r.a()), u.at(r.b()));
        let (c, d) = if x < y { (x, y) } else { (y, x) };
        total += count_between(&u.word()[r.a() - 1..r.b()], c, d);
    }
    total
}

/// The hyperplane `H_{γ, m}` with `γ = ε_c - ε_d` (possibly `c > d`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    pub c: usize,
    pub d: usize,
    pub level: i64,
}

impl Hyperplane {
    /// Image under `μ ↦ P μ + v`, where `P` sends `ε_x` to `ε_{perm(x)}`.
    fn transform(self, perm: impl Fn(usize) -> usize, shift: &[(usize, i64)]) -> Hyperplane {
        let (c, d) = (perm(self.c), perm(self.d));
        let pairing: i64 = shift.iter().map(|&(x, v)| v * ((x == c) as i64 - (x == d) as i64)).sum();
        Hyperplane { c, d, level: self.level + pairing }
    }
}

/// The hyperplane containing face `k` of the folded walk:
/// `w r̂_{j_1} ... r̂_{j_i}(H_{β_k, l_k})` with `j_i < k` maximal.
pub fn folded_hyperplane_level(chain: &LambdaChain, pair: &AdmissiblePair, k: usize) -> Result<Hyperplane> {
    if chain.layout() != Layout::Forward {
        return Err(HlError::Domain("levels are defined on the forward chain".into()));
    }
    if k >= chain.len() {
        return Err(HlError::OutOfRange(format!("position {k} past chain of length {}", chain.len())));
    }
    let beta = chain.root(k);
    let mut h = Hyperplane { c: beta.a(), d: beta.b(), level: chain.level_of(k) };
    let before: Vec<usize> = pair.positions.iter().copied().filter(|&p| p < k).collect();
    for &p in before.iter().rev() {
        let r = chain.root(p);
        let l = chain.level_of(p);
        let swap = |x: usize| {
            if x == r.a() {
                r.b()
            } else if x == r.b() {
                r.a()
            } else {
                x
            }
        };
        h = h.transform(swap, &[(r.a(), l), (r.b(), -l)]);
    }
    let w = &pair.w;
    Ok(h.transform(|x| w.at(x) as usize, &[]))
}

/// The same level read off the filling: `N_c(σ[q]) - N_d(σ[q])`, where `q` is
/// the column of position `k` and `σ[q]` keeps columns `λ_1, ..., q`.
pub fn level_from_filling(chain: &LambdaChain, pair: &AdmissiblePair, k: usize) -> Result<Hyperplane> {
    let sigma = filling_map(chain, pair, FillingMode::Forward)?;
    let beta = chain.root(k);
    let mut u = pair.w.clone();
    for &p in pair.positions.iter().take_while(|&&p| p < k) {
        u.swap_positions(chain.root(p).a(), chain.root(p).b());
    }
    let (c, d) = (u.at(beta.a()), u.at(beta.b()));
    let q = chain.column_of(k);
    let count = |v: u8| -> i64 {
        sigma.columns()[q - 1..].iter().map(|col| col.iter().filter(|&&x| x == v).count() as i64).sum()
    };
    Ok(Hyperplane { c: c as usize, d: d as usize, level: count(c) - count(d) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::min_coset_rep;
    use crate::fillings::{enumerate_fillings, FillingClass};
    use std::collections::BTreeSet;

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn chain(parts: &[usize], n: usize) -> LambdaChain {
        LambdaChain::new(&Partition::new(parts.to_vec()).unwrap(), n).unwrap()
    }

    fn example_pair() -> AdmissiblePair {
        AdmissiblePair::new(perm("4312"), vec![0, 4, 6])
    }

    #[test]
    fn reference_pair_is_enumerated() {
        let c = chain(&[2, 1], 4);
        let all = enumerate_admissible(&c, &Starts::MinCosetReps, &Budget::default()).unwrap();
        assert!(all.contains(&example_pair()));
        assert!(example_pair().satisfies(c.roots(), Orientation::Decreasing));
    }

    /// Brute force: every start in W^λ and every subset of positions.
    fn brute_force(c: &LambdaChain) -> BTreeSet<AdmissiblePair> {
        let m = c.len();
        let mut out = BTreeSet::new();
        for w in min_coset_reps(c.lambda(), c.n()) {
            for mask in 0u64..(1 << m) {
                let pos: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
                let p = AdmissiblePair::new(w.clone(), pos);
                if p.satisfies(c.roots(), Orientation::Decreasing) {
                    out.insert(p);
                }
            }
        }
        out
    }

    #[test]
    fn single_box_has_three_pairs() {
        let c = chain(&[1], 2);
        let all = enumerate_admissible(&c, &Starts::MinCosetReps, &Budget::default()).unwrap();
        let expect = vec![
            AdmissiblePair::new(perm("12"), vec![]),
            AdmissiblePair::new(perm("21"), vec![]),
            AdmissiblePair::new(perm("21"), vec![0]),
        ];
        assert_eq!(all, expect);
        assert_eq!(all.iter().cloned().collect::<BTreeSet<_>>(), brute_force(&c));
    }

    #[test]
    fn dfs_matches_brute_force() {
        for (parts, n) in [(vec![2, 1], 3), (vec![2, 1], 4), (vec![2, 2], 3), (vec![1, 1], 3), (vec![3, 1], 3)] {
            let c = chain(&parts, n);
            let all = enumerate_admissible(&c, &Starts::MinCosetReps, &Budget::default()).unwrap();
            let set: BTreeSet<_> = all.iter().cloned().collect();
            assert_eq!(set.len(), all.len());
            assert_eq!(set, brute_force(&c));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let c = chain(&[2, 1], 4);
        let r = enumerate_admissible(&c, &Starts::MinCosetReps, &Budget::new(5));
        assert_eq!(r, Err(HlError::BudgetExceeded { budget: 5 }));
    }

    #[test]
    fn evaluate_example() {
        let c = chain(&[2, 1], 4);
        let ev = evaluate_subset(&c, &example_pair());
        assert_eq!(ev.mu, vec![1, 1, 0, 1]);
        assert_eq!(ev.weight, vec![0, 1, 1, 1]);
        assert_eq!(ev.end, Permutation::identity(4));
        let empty = AdmissiblePair::new(perm("4312"), vec![]);
        let ev = evaluate_subset(&c, &empty);
        assert_eq!(ev.mu, vec![2, 1, 0, 0]);
        assert_eq!(ev.weight, perm("4312").act_on(&[2, 1, 0, 0]));
        assert_eq!(ev.end, perm("4312"));
    }

    #[test]
    fn filling_map_example() {
        let c = chain(&[2, 1], 4);
        let f = filling_map(&c, &example_pair(), FillingMode::Forward).unwrap();
        assert_eq!(f.rows(), vec![vec![4, 2], vec![3]]);
        assert_eq!(f.content(4).0, vec![0, 1, 1, 1]);
        let f0 = filling_map(&c, &AdmissiblePair::new(perm("4312"), vec![]), FillingMode::Forward).unwrap();
        assert_eq!(f0.rows(), vec![vec![4, 4], vec![3]]);
        let r = c.variant(Layout::Reversed).unwrap();
        assert!(filling_map(&r, &example_pair(), FillingMode::Forward).is_err());
        assert!(filling_map(&c, &example_pair(), FillingMode::Reverse).is_err());
    }

    #[test]
    fn n_stat_examples() {
        assert_eq!(n_stat(&perm("4312"), &[]), 0);
        assert_eq!(n_stat(&perm("21"), &[Transposition::new(1, 2)]), 0);
    }

    #[test]
    fn n_stat_measures_length_defect() {
        let c = chain(&[2, 1], 4);
        for p in enumerate_admissible(&c, &Starts::All, &Budget::default()).unwrap() {
            let ts = p.transpositions(c.roots());
            let lw = p.w.length();
            let le = p.end(c.roots()).length();
            assert_eq!(2 * n_stat(&p.w, &ts), lw - le - ts.len());
        }
    }

    #[test]
    fn splitting_identity() {
        // ½(ℓ(w)+ℓ(wT)-|T|) = ½(ℓ(wS_1..S_{p-1}) + ℓ(wT) - |S_p|) + Σ N(w_{i-1}, S_i)
        let c = chain(&[2, 2, 1], 4);
        let mut seed = 12345u64;
        for p in enumerate_admissible(&c, &Starts::MinCosetReps, &Budget::default()).unwrap() {
            let ts = p.transpositions(c.roots());
            if ts.is_empty() {
                continue;
            }
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let mut cuts: Vec<usize> = (0..=ts.len()).filter(|i| (seed >> (i % 60)) & 1 == 1).collect();
            cuts.insert(0, 0);
            cuts.push(ts.len());
            cuts.dedup();
            let segs: Vec<&[Transposition]> = cuts.windows(2).map(|w| &ts[w[0]..w[1]]).collect();
            let lw = p.w.length();
            let end = p.end(c.roots());
            let lhs2 = lw + end.length() - ts.len();
            let mut u = p.w.clone();
            let mut nsum = 0;
            for s in &segs[..segs.len() - 1] {
                nsum += n_stat(&u, s);
                for r in *s {
                    u.swap_positions(r.a(), r.b());
                }
            }
            let last = segs.last().unwrap();
            let rhs2 = u.length() + end.length() - last.len() + 2 * nsum;
            assert_eq!(lhs2, rhs2);
        }
    }

    #[test]
    fn affine_map_route_matches_reflections() {
        for (parts, n) in [(vec![2, 1], 4), (vec![2, 2, 1], 4), (vec![3, 1], 3)] {
            let c = chain(&parts, n);
            let m = c.len();
            for w in Permutation::all(n).into_iter().step_by(3) {
                for mask in (0u64..(1 << m)).step_by(7) {
                    let pos: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
                    let p = AdmissiblePair::new(w.clone(), pos);
                    assert_eq!(evaluate_subset(&c, &p).weight, weight_by_affine_map(&c, &w, &p.positions));
                }
            }
        }
    }

    #[test]
    fn content_identity_for_arbitrary_subsets() {
        for (parts, n) in [(vec![2, 1], 4), (vec![2, 2], 3), (vec![3, 1], 3), (vec![1, 1, 1], 4)] {
            let c = chain(&parts, n);
            let m = c.len();
            for w in Permutation::all(n) {
                for mask in 0u64..(1 << m) {
                    let pos: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
                    let p = AdmissiblePair::new(w.clone(), pos);
                    let f = filling_map(&c, &p, FillingMode::Forward).unwrap();
                    let ct: Vec<i64> = f.content(n).0.iter().map(|&x| x as i64).collect();
                    assert_eq!(ct, evaluate_subset(&c, &p).weight);
                }
            }
        }
    }

    #[test]
    fn content_identity_exhaustive_small() {
        for n in 2..=4 {
            for size in 0..=5 {
                for l in Partition::all_of_size(size, n - 1) {
                    let c = LambdaChain::new(&l, n).unwrap();
                    for p in enumerate_admissible(&c, &Starts::MinCosetReps, &Budget::default()).unwrap() {
                        let f = filling_map(&c, &p, FillingMode::Forward).unwrap();
                        let ct: Vec<i64> = f.content(n).0.iter().map(|&x| x as i64).collect();
                        assert_eq!(ct, evaluate_subset(&c, &p).weight);
                    }
                }
            }
        }
    }

    #[test]
    fn image_lies_in_valid_fillings_and_is_onto_when_regular() {
        for (parts, n, regular) in
            [(vec![2, 1], 3, true), (vec![3, 2, 1], 4, true), (vec![2, 2], 3, false), (vec![2, 1], 4, false)]
        {
            let c = chain(&parts, n);
            let image: BTreeSet<Filling> = enumerate_admissible(&c, &Starts::MinCosetReps, &Budget::default())
                .unwrap()
                .iter()
                .map(|p| filling_map(&c, p, FillingMode::Forward).unwrap())
                .collect();
            assert!(image.iter().all(|f| f.is_valid()));
            if regular {
                let all: BTreeSet<Filling> =
                    enumerate_fillings(c.lambda(), n, FillingClass::AllValid).into_iter().collect();
                assert_eq!(image, all);
            }
        }
    }

    #[test]
    fn segments_follow_the_pair_order() {
        // consecutive roots within each factor satisfy (a,b) ≺ (c,d) and a <= λ'_j < b
        let c = chain(&[3, 2, 1], 4);
        for p in enumerate_admissible(&c, &Starts::MinCosetReps, &Budget::default()).unwrap() {
            for w in p.positions.windows(2) {
                if c.column_of(w[0]) == c.column_of(w[1]) {
                    let (x, y) = (c.root(w[0]), c.root(w[1]));
                    assert!(x.a < y.a || (x.a == y.a && x.b > y.b));
                }
            }
            for &q in &p.positions {
                let k = c.lambda().column_length(c.column_of(q));
                assert!(c.root(q).a() <= k && k < c.root(q).b());
            }
        }
    }

    #[test]
    fn level_examples() {
        let c = chain(&[2, 1], 4);
        let id = AdmissiblePair::new(Permutation::identity(4), vec![]);
        for k in 0..c.len() {
            let h = folded_hyperplane_level(&c, &id, k).unwrap();
            assert_eq!(h.level, c.level_of(k));
            assert_eq!((h.c, h.d), (c.root(k).a(), c.root(k).b()));
        }
        let ex = example_pair();
        for k in 0..c.len() {
            assert_eq!(folded_hyperplane_level(&c, &ex, k).unwrap(), level_from_filling(&c, &ex, k).unwrap());
        }
        // before the first fold only w acts
        let w = perm("4312");
        let h = folded_hyperplane_level(&c, &ex, 0).unwrap();
        assert_eq!((h.c, h.d), (w.at(1) as usize, w.at(4) as usize));
        assert!(folded_hyperplane_level(&c, &ex, 7).is_err());
    }

    #[test]
    fn pair_json() {
        let p = example_pair();
        assert_eq!(p.to_json(), serde_json::json!({"w": "4312", "J": [1, 5, 7]}));
        assert_eq!(AdmissiblePair::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn min_coset_starts_are_increasing_on_blocks() {
        let l = Partition::new(vec![2, 2]).unwrap();
        for w in Starts::MinCosetReps.resolve(&l, 4) {
            assert_eq!(min_coset_rep(&w, &l), w);
        }
    }
}
