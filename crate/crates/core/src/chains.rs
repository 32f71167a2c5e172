//! `ω_k`-chains, the column-factored `λ`-chain, its reversed and reordered
//! variants, and the affine reflections attached to chain positions.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::combinatorics::Partition;
use crate::error::{HlError, Result};

/// A transposition `(a, b)` of positions, `1 <= a < b <= n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transposition {
    pub a: u8,
    pub b: u8,
}

impl Transposition {
    pub fn new(x: usize, y: usize) -> Self {
        assert!(x != y && x >= 1 && y >= 1, "bad transposition ({x},{y})");
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        Transposition { a: a as u8, b: b as u8 }
    }

    pub fn a(self) -> usize {
        self.a as usize
    }

    pub fn b(self) -> usize {
        self.b as usize
    }

    pub fn involves(self, x: usize) -> bool {
        self.a() == x || self.b() == x
    }

    /// Conjugate by the adjacent transposition `(j, j+1)`.
    pub fn conjugate_adjacent(self, j: usize) -> Transposition {
        let f = |x: usize| {
            if x == j {
                j + 1
            } else if x == j + 1 {
                j
            } else {
                x
            }
        };
        Transposition::new(f(self.a()), f(self.b()))
    }
}

impl fmt::Display for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// The `ω_k`-chain: rows `(i,n), (i,n-1), ..., (i,k+1)` for `i = 1..k`.
pub fn omega_chain(k: usize, n: usize) -> Result<Vec<Transposition>> {
    if k == 0 || k >= n {
        return Err(HlError::OutOfRange(format!("omega chain needs 1 <= k <= n-1, got k={k}, n={n}")));
    }
    Ok((1..=k).flat_map(|i| (k + 1..=n).rev().map(move |b| Transposition::new(i, b))).collect())
}

/// Reversed `ω_k`-chain: rows `(i,k+1), ..., (i,n)` for `i = k` down to 1.
pub fn omega_chain_reversed(k: usize, n: usize) -> Result<Vec<Transposition>> {
    let mut c = omega_chain(k, n)?;
    c.reverse();
    Ok(c)
}

/// Column-major reading of the reversed `ω_k`-chain:
/// `(k,c), (k-1,c), ..., (1,c)` for `c = k+1..n`.
pub fn omega_chain_reversed_reordered(k: usize, n: usize) -> Result<Vec<Transposition>> {
    if k == 0 || k >= n {
        return Err(HlError::OutOfRange(format!("omega chain needs 1 <= k <= n-1, got k={k}, n={n}")));
    }
    Ok((k + 1..=n).flat_map(|c| (1..=k).rev().map(move |a| Transposition::new(a, c))).collect())
}

/// Segment `Γ(k, p)`: the `ω_k`-chain without its first `p` entries.
pub fn omega_chain_tail(k: usize, n: usize, p: usize) -> Result<Vec<Transposition>> {
    if p > n.saturating_sub(k) {
        return Err(HlError::OutOfRange(format!("segment needs p <= n-k, got p={p}")));
    }
    Ok(omega_chain(k, n)?.split_off(p))
}

/// Segment `Γ^r(k, p)`: the reversed `ω_k`-chain without its first `p` entries.
pub fn omega_chain_reversed_tail(k: usize, n: usize, p: usize) -> Result<Vec<Transposition>> {
    let c = omega_chain_reversed(k, n)?;
    if p > c.len() {
        return Err(HlError::OutOfRange(format!("segment needs p <= {}, got p={p}", c.len())));
    }
    Ok(c[p..].to_vec())
}

/// Row `i` of the reversed `ω_k`-chain: `(i,k+1), ..., (i,n)`.
pub fn omega_chain_reversed_row(k: usize, n: usize, i: usize) -> Result<Vec<Transposition>> {
    if i == 0 || i > k || k >= n {
        return Err(HlError::OutOfRange(format!("row {i} of reversed omega_{k} chain")));
    }
    Ok((k + 1..=n).map(|b| Transposition::new(i, b)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// `Γ_{λ_1} ... Γ_1`.
    Forward,
    /// `Γ^r_1 ... Γ^r_{λ_1}`.
    Reversed,
    /// Reversed, with the first `λ_j` factors read column-major.
    ReversedReordered(usize),
}

/// A `λ`-chain together with its column factorisation.
#[derive(Clone, Debug)]
pub struct LambdaChain {
    lambda: Partition,
    n: usize,
    layout: Layout,
    roots: Vec<Transposition>,
    /// Column `p` of `λ` whose factor contains each position.
    column_of: Vec<usize>,
    /// Occurrence count of the root among positions up to and including this one.
    level_of: Vec<i64>,
    /// Position range of each factor, in chain order.
    segments: Vec<(usize, Range<usize>)>,
}

impl LambdaChain {
    /// The fixed `λ`-chain `Γ_{λ_1} ... Γ_1` with `Γ_j = Γ(λ'_j)`.
    pub fn new(lambda: &Partition, n: usize) -> Result<Self> {
        lambda.check_fits(n)?;
        let order: Vec<usize> = (1..=lambda.width()).rev().collect();
        Self::build(lambda, n, Layout::Forward, &order, |_, k| omega_chain(k, n))
    }

    pub fn lambda(&self) -> &Partition {
        &self.lambda
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn roots(&self) -> &[Transposition] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn root(&self, pos: usize) -> Transposition {
        self.roots[pos]
    }

    /// Column index of the factor containing 0-based position `pos`.
    pub fn column_of(&self, pos: usize) -> usize {
        self.column_of[pos]
    }

    /// `l_k` for 0-based position `pos`.
    pub fn level_of(&self, pos: usize) -> i64 {
        self.level_of[pos]
    }

    /// Factors as `(column, position range)`, in chain order.
    pub fn segments(&self) -> &[(usize, Range<usize>)] {
        &self.segments
    }

    pub fn segment_range(&self, column: usize) -> Range<usize> {
        self.segments.iter().find(|(c, _)| *c == column).map(|(_, r)| r.clone()).unwrap_or(0..0)
    }

    /// Position of `root` inside the factor for `column`.
    pub fn position_in_column(&self, column: usize, root: Transposition) -> Option<usize> {
        self.segment_range(column).find(|&p| self.roots[p] == root)
    }

    fn build<F>(lambda: &Partition, n: usize, layout: Layout, columns: &[usize], mut factor: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Result<Vec<Transposition>>,
    {
        let mut roots = Vec::new();
        let mut column_of = Vec::new();
        let mut segments = Vec::new();
        for &col in columns {
            let k = lambda.column_length(col);
            let f = factor(col, k)?;
            let start = roots.len();
            column_of.extend(std::iter::repeat_n(col, f.len()));
            roots.extend(f);
            segments.push((col, start..roots.len()));
        }
        let level_of =
            roots.iter().enumerate().map(|(i, r)| roots[..=i].iter().filter(|x| *x == r).count() as i64).collect();
        Ok(LambdaChain { lambda: lambda.clone(), n, layout, roots, column_of, level_of, segments })
    }

    /// `rev(Γ)` or `rev(Γ)_j`. Only defined on the forward chain.
    pub fn variant(&self, layout: Layout) -> Result<LambdaChain> {
        if self.layout != Layout::Forward {
            return Err(HlError::Domain("variants are taken from the forward chain".into()));
        }
        let n = self.n;
        let lambda = &self.lambda;
        let order: Vec<usize> = (1..=lambda.width()).collect();
        match layout {
            Layout::Forward => Ok(self.clone()),
            Layout::Reversed => Self::build(lambda, n, layout, &order, |_, k| omega_chain_reversed(k, n)),
            Layout::ReversedReordered(j) => {
                if j == 0 || j >= n {
                    return Err(HlError::OutOfRange(format!("row index {j} outside 1..{n}")));
                }
                let cutoff = lambda.part(j);
                Self::build(lambda, n, layout, &order, |col, k| {
                    if col <= cutoff {
                        omega_chain_reversed_reordered(k, n)
                    } else {
                        omega_chain_reversed(k, n)
                    }
                })
            }
        }
    }

    /// Maps each position of `self` to the position of the same root in the
    /// same column factor of `other`.
    pub fn correspondence(&self, other: &LambdaChain) -> Result<Vec<usize>> {
        if self.lambda != other.lambda || self.n != other.n {
            return Err(HlError::Domain("chains for different partitions".into()));
        }
        (0..self.len())
            .map(|p| {
                other
                    .position_in_column(self.column_of[p], self.roots[p])
                    .ok_or_else(|| HlError::Inconsistent(format!("root {} missing", self.roots[p])))
            })
            .collect()
    }

    /// Translates a sorted position set to `other`, re-sorted.
    pub fn translate_positions(&self, positions: &[usize], other: &LambdaChain) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(positions.len());
        for &p in positions {
            out.push(
                other
                    .position_in_column(self.column_of[p], self.roots[p])
                    .ok_or_else(|| HlError::Inconsistent(format!("root {} missing", self.roots[p])))?,
            );
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// Renders as `(1,4)(1,3)(1,2)|(1,4)(1,3)(2,4)(2,3)`.
impl fmt::Display for LambdaChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (_, range)) in self.segments.iter().enumerate() {
            if k > 0 {
                write!(f, "|")?;
            }
            for p in range.clone() {
                write!(f, "{}", self.roots[p])?;
            }
        }
        Ok(())
    }
}

/// The affine reflection `s_{(a,b),l}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AffineReflection {
    pub root: Transposition,
    pub level: i64,
}

impl AffineReflection {
    pub fn new(root: Transposition, level: i64) -> Self {
        AffineReflection { root, level }
    }

    /// Replaces coordinates `a, b` by `(μ_b + l, μ_a - l)`.
    pub fn apply(&self, mu: &mut [i64]) {
        let (a, b) = (self.root.a() - 1, self.root.b() - 1);
        let (ma, mb) = (mu[a], mu[b]);
        mu[a] = mb + self.level;
        mu[b] = ma - self.level;
    }
}

pub fn affine_reflect(r: AffineReflection, mu: &[i64]) -> Result<Vec<i64>> {
    if r.root.b() > mu.len() {
        return Err(HlError::Dimension { expected: r.root.b(), got: mu.len() });
    }
    let mut out = mu.to_vec();
    r.apply(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(a: usize, b: usize) -> Transposition {
        Transposition::new(a, b)
    }

    #[test]
    fn omega_chain_examples() {
        assert_eq!(omega_chain(2, 4).unwrap(), vec![t(1, 4), t(1, 3), t(2, 4), t(2, 3)]);
        assert_eq!(omega_chain(1, 2).unwrap(), vec![t(1, 2)]);
        assert_eq!(omega_chain(1, 4).unwrap(), vec![t(1, 4), t(1, 3), t(1, 2)]);
        assert!(omega_chain(0, 4).is_err());
        assert!(omega_chain(4, 4).is_err());
    }

    #[test]
    fn lambda_chain_example() {
        let l = Partition::new(vec![2, 1]).unwrap();
        let c = LambdaChain::new(&l, 4).unwrap();
        assert_eq!(c.roots(), &[t(1, 4), t(1, 3), t(1, 2), t(1, 4), t(1, 3), t(2, 4), t(2, 3)]);
        // 1-based position 5 is the second (1,3)
        assert_eq!(c.level_of(4), 2);
        assert_eq!(c.to_string(), "(1,4)(1,3)(1,2)|(1,4)(1,3)(2,4)(2,3)");
        assert!(LambdaChain::new(&Partition::empty(), 3).unwrap().is_empty());
        assert!(LambdaChain::new(&Partition::new(vec![1, 1, 1]).unwrap(), 3).is_err());
    }

    #[test]
    fn chain_length_and_levels_closed_form() {
        for n in 2..=6 {
            for size in 0..=7 {
                for l in Partition::all_of_size(size, n - 1) {
                    let c = LambdaChain::new(&l, n).unwrap();
                    let conj = l.conjugate();
                    let expect: usize = conj.parts().iter().map(|&k| k * (n - k)).sum();
                    assert_eq!(c.len(), expect);
                    for pos in 0..c.len() {
                        let p = c.column_of(pos);
                        let a = c.root(pos).a();
                        let closed = (p..=l.width()).filter(|&i| l.column_length(i) >= a).count();
                        assert_eq!(c.level_of(pos), closed as i64);
                    }
                }
            }
        }
    }

    #[test]
    fn reversed_variants() {
        let l = Partition::new(vec![2, 1]).unwrap();
        let c = LambdaChain::new(&l, 4).unwrap();
        let r = c.variant(Layout::Reversed).unwrap();
        assert_eq!(r.roots(), &[t(2, 3), t(2, 4), t(1, 3), t(1, 4), t(1, 2), t(1, 3), t(1, 4)]);
        assert_eq!(omega_chain_reversed_reordered(2, 4).unwrap(), vec![t(2, 3), t(1, 3), t(2, 4), t(1, 4)]);
        assert!(c.variant(Layout::ReversedReordered(0)).is_err());
        assert!(r.variant(Layout::Reversed).is_err());
    }

    #[test]
    fn reordering_only_swaps_commuting_roots() {
        for (parts, n) in [(vec![2, 2], 3), (vec![2, 2, 2], 4), (vec![3, 3, 1], 4), (vec![2, 2, 1, 1], 5)] {
            let l = Partition::new(parts).unwrap();
            let c = LambdaChain::new(&l, n).unwrap();
            let r = c.variant(Layout::Reversed).unwrap();
            for j in 1..n {
                let rj = c.variant(Layout::ReversedReordered(j)).unwrap();
                let map = r.correspondence(&rj).unwrap();
                // bijection preserving factors
                let mut seen = map.clone();
                seen.sort_unstable();
                assert_eq!(seen, (0..r.len()).collect::<Vec<_>>());
                for p in 0..r.len() {
                    assert_eq!(r.column_of(p), rj.column_of(map[p]));
                    for q in p + 1..r.len() {
                        if map[q] < map[p] {
                            let (x, y) = (r.root(p), r.root(q));
                            assert!(!x.involves(y.a()) && !x.involves(y.b()), "order of non-commuting {x} {y} changed");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn affine_reflection_examples() {
        let r = AffineReflection::new(t(1, 4), 1);
        assert_eq!(affine_reflect(r, &[2, 1, 0, 0]).unwrap(), vec![1, 1, 0, 1]);
        let r0 = AffineReflection::new(t(2, 3), 0);
        assert_eq!(affine_reflect(r0, &[5, 1, 7, 0]).unwrap(), vec![5, 7, 1, 0]);
        let r1 = AffineReflection::new(t(2, 3), 1);
        assert_eq!(affine_reflect(r1, &[2, 1, 0, 0]).unwrap(), vec![2, 1, 0, 0]);
        assert!(affine_reflect(r, &[1, 2]).is_err());
    }

    proptest! {
        #[test]
        fn affine_reflection_is_sum_preserving_involution(
            mu in prop::collection::vec(-10i64..10, 5),
            a in 1usize..5, d in 1usize..5, level in -4i64..5,
        ) {
            let b = (a + d - 1) % 5 + 1;
            prop_assume!(a != b);
            let r = AffineReflection::new(Transposition::new(a, b), level);
            let once = affine_reflect(r, &mu).unwrap();
            prop_assert_eq!(once.iter().sum::<i64>(), mu.iter().sum::<i64>());
            prop_assert_eq!(affine_reflect(r, &once).unwrap(), mu);
        }
    }
}
