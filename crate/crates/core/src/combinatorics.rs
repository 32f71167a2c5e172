//! Permutations in one-line notation, partitions, and the counting statistics
//! used throughout: inversions, `N_a`, `N_{ab}`, and minimal coset
//! representatives for the parabolic subgroup fixing a padded partition.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HlError, Result};
use crate::tpoly::ExponentVector;

/// Number of pairs `i < j` with `s[i] > s[j]`.
pub fn inversions(s: &[u8]) -> usize {
    let mut count = 0;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if s[i] > s[j] {
                count += 1;
            }
        }
    }
    count
}

/// `N_a(s)`: entries strictly below `a`.
pub fn count_below(s: &[u8], a: u8) -> usize {
    s.iter().filter(|&&x| x < a).count()
}

/// `N_{ab}(s)`: entries strictly between `a` and `b`.
pub fn count_between(s: &[u8], a: u8, b: u8) -> usize {
    s.iter().filter(|&&x| a < x && x < b).count()
}

/// A permutation of `1..=n` in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u8).collect())
    }

    pub fn from_word(word: Vec<u8>) -> Result<Self> {
        let n = word.len();
        let mut seen = vec![false; n + 1];
        for &x in &word {
            let x = x as usize;
            if x == 0 || x > n || seen[x] {
                return Err(HlError::InvalidPermutation(format!("{word:?}")));
            }
            seen[x] = true;
        }
        Ok(Permutation(word))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn word(&self) -> &[u8] {
        &self.0
    }

    /// `w(i)` for 1-based `i`.
    #[inline]
    pub fn at(&self, i: usize) -> u8 {
        self.0[i - 1]
    }

    pub fn length(&self) -> usize {
        inversions(&self.0)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.n()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize - 1] = (i + 1) as u8;
        }
        Permutation(inv)
    }

    /// Position of value `v` (1-based).
    pub fn position_of(&self, v: u8) -> usize {
        self.0.iter().position(|&x| x == v).expect("value in range") + 1
    }

    /// Right multiplication by the transposition `(a, b)`: swaps the entries in
    /// positions `a` and `b`.
    #[inline]
    pub fn swap_positions(&mut self, a: usize, b: usize) {
        self.0.swap(a - 1, b - 1);
    }

    pub fn times_transposition(&self, a: usize, b: usize) -> Permutation {
        let mut p = self.clone();
        p.swap_positions(a, b);
        p
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&x| self.0[x as usize - 1]).collect())
    }

    /// Position-permuting action on weights: `(w·μ)_{w(i)} = μ_i`.
    ///
    /// Every place that moves a weight by a permutation goes through here.
    pub fn act_on(&self, mu: &[i64]) -> Vec<i64> {
        let mut out = vec![0; mu.len()];
        for (i, &x) in self.0.iter().enumerate() {
            out[x as usize - 1] = mu[i];
        }
        out
    }

    /// All permutations of `1..=n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur = (1..=n as u8).collect::<Vec<_>>();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() < 10 {
            for x in &self.0 {
                write!(f, "{x}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl FromStr for Permutation {
    type Err = HlError;
    fn from_str(s: &str) -> Result<Self> {
        let word: Vec<u8> = if s.contains(',') {
            s.split(',')
                .map(|p| p.trim().parse::<u8>().map_err(|e| HlError::Parse(e.to_string())))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10).map(|d| d as u8).ok_or_else(|| HlError::Parse(format!("bad permutation {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        Permutation::from_word(word)
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A partition, stored by its nonzero parts in weakly decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Accepts trailing zeros; rejects parts that increase.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(HlError::InvalidPartition(format!("{parts:?} is not weakly decreasing")));
        }
        Ok(Partition(parts.into_iter().filter(|&p| p > 0).collect()))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// `λ_i` for 1-based `i`, zero past the length.
    pub fn part(&self, i: usize) -> usize {
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    /// Number of nonzero parts.
    pub fn length(&self) -> usize {
        self.0.len()
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// `λ_1`, the number of columns.
    pub fn width(&self) -> usize {
        self.0.first().copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        Partition((1..=self.width()).map(|j| self.0.iter().filter(|&&p| p >= j).count()).collect())
    }

    /// `λ'_j` for 1-based `j`.
    pub fn column_length(&self, j: usize) -> usize {
        self.0.iter().filter(|&&p| p >= j).count()
    }

    /// `n(λ) = Σ (i-1) λ_i`.
    pub fn n_statistic(&self) -> usize {
        self.0.iter().enumerate().map(|(i, &p)| i * p).sum()
    }

    /// Multiplicities `m_i` of each nonzero part value, indexed by value.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.0 {
            match out.last_mut() {
                Some((v, m)) if *v == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// Fails when more than `n - 1` parts are nonzero.
    pub fn check_fits(&self, n: usize) -> Result<()> {
        let max = n.saturating_sub(1);
        if self.length() > max {
            return Err(HlError::TooManyParts { parts: self.0.clone(), len: self.length(), max, n });
        }
        Ok(())
    }

    /// Parts padded with zeros to length `n`.
    pub fn padded(&self, n: usize) -> Vec<i64> {
        (1..=n).map(|i| self.part(i) as i64).collect()
    }

    pub fn padded_exponents(&self, n: usize) -> ExponentVector {
        ExponentVector((1..=n).map(|i| self.part(i) as u32).collect())
    }

    /// Maximal row blocks `a..=b` (1-based, as half-open ranges) with equal
    /// padded parts, including the trailing block of zero rows.
    pub fn equal_part_blocks(&self, n: usize) -> Vec<Range<usize>> {
        let mut blocks = Vec::new();
        let mut start = 1;
        for i in 2..=n + 1 {
            if i == n + 1 || self.part(i) != self.part(start) {
                blocks.push(start..i);
                start = i;
            }
        }
        blocks
    }

    /// Whether `λ` has exactly `n - 1` distinct nonzero parts.
    pub fn is_regular(&self, n: usize) -> bool {
        self.length() + 1 == n && self.0.windows(2).all(|w| w[0] > w[1])
    }

    /// All partitions of `size` with at most `max_parts` parts, in reverse
    /// lexicographic order.
    pub fn all_of_size(size: usize, max_parts: usize) -> Vec<Partition> {
        fn rec(rem: usize, max: usize, parts_left: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            if parts_left == 0 {
                return;
            }
            for p in (1..=rem.min(max)).rev() {
                cur.push(p);
                rec(rem - p, p, parts_left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(size, size, max_parts, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Partition {
    type Err = HlError;
    /// Comma list; the empty string is the zero partition.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|e| HlError::Parse(format!("bad part {p:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// Whether `w` is increasing on each equal-part block of `λ` padded to `n`,
/// i.e. a minimal representative of its coset `w W_λ`.
pub fn is_min_coset_rep(w: &Permutation, lambda: &Partition) -> bool {
    lambda.equal_part_blocks(w.n()).into_iter().all(|blk| (blk.start..blk.end - 1).all(|i| w.at(i) < w.at(i + 1)))
}

/// The minimal-length element of `w W_λ`: entries sorted within each block.
pub fn min_coset_rep(w: &Permutation, lambda: &Partition) -> Permutation {
    let mut word = w.word().to_vec();
    for blk in lambda.equal_part_blocks(w.n()) {
        word[blk.start - 1..blk.end - 1].sort_unstable();
    }
    Permutation(word)
}

/// All minimal coset representatives `W^λ` in lexicographic order.
pub fn min_coset_reps(lambda: &Partition, n: usize) -> Vec<Permutation> {
    Permutation::all(n).into_iter().filter(|w| is_min_coset_rep(w, lambda)).collect()
}

/// Adjacent swaps `j` (swap positions `j`, `j+1`) that sort `w` into its
/// minimal coset representative: blocks top to bottom, each time at the first
/// descent inside the current block.
pub fn first_descent_sorting(w: &Permutation, lambda: &Partition) -> Vec<usize> {
    let mut u = w.clone();
    let mut steps = Vec::new();
    for blk in lambda.equal_part_blocks(w.n()) {
        while let Some(j) = (blk.start..blk.end - 1).find(|&i| u.at(i) > u.at(i + 1)) {
            u.swap_positions(j, j + 1);
            steps.push(j);
        }
    }
    steps
}

/// Adjacent swaps sorting `w` blockwise, blocks bottom to top, each time at
/// the position holding the largest descent top inside the current block.
pub fn max_descent_top_sorting(w: &Permutation, lambda: &Partition) -> Vec<usize> {
    let mut u = w.clone();
    let mut steps = Vec::new();
    for blk in lambda.equal_part_blocks(w.n()).into_iter().rev() {
        while let Some(j) = (blk.start..blk.end - 1).filter(|&i| u.at(i) > u.at(i + 1)).max_by_key(|&i| u.at(i)) {
            u.swap_positions(j, j + 1);
            steps.push(j);
        }
    }
    steps
}
