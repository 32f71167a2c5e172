//! The bijection between walks on the reversed chain that end in `W^λ` and
//! walks that start in `W^λ`, built from single-row steps `φ_j`.
//!
//! Each `φ_j` works on `rev(Γ)_j`, where the first `λ_j` column factors are
//! read column-major so that the markers below are runs of adjacent
//! positions. Everything else lives on `rev(Γ)`, and positions are moved
//! across with [`LambdaChain::translate_positions`].

use std::collections::{BTreeSet, HashMap};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chains::{LambdaChain, Layout, Transposition};
use crate::combinatorics::{
    first_descent_sorting, is_min_coset_rep, max_descent_top_sorting, min_coset_rep, Partition, Permutation,
};
use crate::error::{HlError, Result};
use crate::report::Report;
use crate::walks::{enumerate_on_roots, filling_map, n_stat, AdmissiblePair, Budget, FillingMode, Orientation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    L,
    R,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    LToR,
    RToL,
}

/// One factor of the marked splitting `U_1 s_{m_1} W_1 e_{k_1} ... U_{t+1}`,
/// with chain positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Piece {
    Free(Vec<usize>),
    Start { m: usize, positions: [usize; 2] },
    Between(Vec<usize>),
    End { k: usize, position: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarkedSplitting {
    pub j: usize,
    pub pieces: Vec<Piece>,
}

impl MarkedSplitting {
    pub fn marker_count(&self) -> usize {
        self.pieces.iter().filter(|p| matches!(p, Piece::Start { .. })).count()
    }
}

/// The endpoint of `r` other than `x`, if `r` moves `x`.
fn partner(r: Transposition, x: usize) -> Option<usize> {
    if r.a() == x {
        Some(r.b())
    } else if r.b() == x {
        Some(r.a())
    } else {
        None
    }
}

/// Marker shapes for row `j` on `rev(Γ)_j`.
struct Markers<'a> {
    chain: &'a LambdaChain,
    j: usize,
    cutoff: usize,
}

impl<'a> Markers<'a> {
    fn new(chain: &'a LambdaChain, j: usize) -> Self {
        Markers { chain, j, cutoff: chain.lambda().part(j) }
    }

    /// Rows `(first, second)` of a start marker `(m, first), (m, second)` in
    /// the factor holding `pos`; the end marker is `(m, second)`.
    fn rows(&self, pos: usize) -> (usize, usize) {
        if self.chain.column_of(pos) <= self.cutoff {
            (self.j + 1, self.j)
        } else {
            (self.j, self.j + 1)
        }
    }

    /// `s_m` occupying positions `p, p + 1`.
    fn start_at(&self, p: usize) -> Option<usize> {
        let q = p + 1;
        if q >= self.chain.len() || self.chain.column_of(p) != self.chain.column_of(q) {
            return None;
        }
        let (first, second) = self.rows(p);
        let m = partner(self.chain.root(p), first)?;
        (m != second && partner(self.chain.root(q), second) == Some(m)).then_some(m)
    }

    /// `e_m` at `p`.
    fn end_at(&self, p: usize) -> Option<usize> {
        let (first, second) = self.rows(p);
        partner(self.chain.root(p), second).filter(|&m| m != first)
    }

    /// `e_m` conjugated by `(j, j+1)`, at `p`.
    fn conjugated_end_at(&self, p: usize) -> Option<usize> {
        let (first, second) = self.rows(p);
        partner(self.chain.root(p), first).filter(|&m| m != second)
    }

    /// Position of `root^{(j,j+1)}` in the factor holding `p`.
    fn conjugate_position(&self, p: usize) -> Result<usize> {
        let col = self.chain.column_of(p);
        let r = self.chain.root(p).conjugate_adjacent(self.j);
        self.chain
            .position_in_column(col, r)
            .ok_or_else(|| HlError::Inconsistent(format!("conjugate {r} of position {} not in column {col}", p + 1)))
    }
}

fn ascending(u: &Permutation, j: usize) -> bool {
    u.at(j) < u.at(j + 1)
}

fn apply(u: &mut Permutation, r: Transposition) {
    u.swap_positions(r.a(), r.b());
}

fn first_segment_empty(chain: &LambdaChain, pair: &AdmissiblePair) -> bool {
    let first = chain.segment_range(1);
    pair.positions.iter().all(|p| !first.contains(p))
}

/// Membership in `𝒜_j^L` or `𝒜_j^R` on `rev(Γ)_j`.
pub fn on_side(chain: &LambdaChain, j: usize, pair: &AdmissiblePair, side: Side) -> bool {
    if j == 0 || j >= chain.n() || !pair.satisfies(chain.roots(), Orientation::Increasing) {
        return false;
    }
    let end = pair.end(chain.roots());
    let (start_up, end_up) = match side {
        Side::L => (false, true),
        Side::R => (true, false),
    };
    ascending(&pair.w, j) == start_up && ascending(&end, j) == end_up && first_segment_empty(chain, pair)
}

fn check_chain(chain: &LambdaChain, j: usize) -> Result<()> {
    if chain.layout() != Layout::ReversedReordered(j) {
        return Err(HlError::Domain(format!("phi_{j} needs the chain reordered for row {j}")));
    }
    let l = chain.lambda();
    if l.part(j) != l.part(j + 1) {
        return Err(HlError::Domain(format!("rows {j} and {} of ({l}) differ", j + 1)));
    }
    Ok(())
}

/// Splits `T'` for an `R`-side pair scanning left to right.
pub fn marked_splitting(chain: &LambdaChain, j: usize, pair: &AdmissiblePair) -> Result<MarkedSplitting> {
    check_chain(chain, j)?;
    let mk = Markers::new(chain, j);
    let pos = &pair.positions;
    let mut u = pair.w.clone();
    let mut pieces = Vec::new();
    let mut free = Vec::new();
    let mut i = 0;
    while i < pos.len() {
        let p = pos[i];
        let start = (i + 1 < pos.len() && pos[i + 1] == p + 1).then(|| mk.start_at(p)).flatten();
        let Some(m) = start else {
            free.push(p);
            apply(&mut u, chain.root(p));
            i += 1;
            continue;
        };
        pieces.push(Piece::Free(std::mem::take(&mut free)));
        pieces.push(Piece::Start { m, positions: [p, p + 1] });
        apply(&mut u, chain.root(p));
        apply(&mut u, chain.root(p + 1));
        i += 2;
        let mut between = Vec::new();
        loop {
            let Some(&q) = pos.get(i) else {
                return Err(HlError::Domain(format!("start marker at {} has no complementary end marker", p + 1)));
            };
            apply(&mut u, chain.root(q));
            i += 1;
            if !ascending(&u, j) {
                let k = mk.end_at(q).ok_or_else(|| {
                    HlError::Inconsistent(format!("rows {j},{} cross at position {} off an end marker", j + 1, q + 1))
                })?;
                pieces.push(Piece::Between(between));
                pieces.push(Piece::End { k, position: q });
                break;
            }
            between.push(q);
        }
    }
    pieces.push(Piece::Free(free));
    Ok(MarkedSplitting { j, pieces })
}

fn finish_positions(mut out: Vec<usize>, reversed: bool) -> Result<Vec<usize>> {
    if reversed {
        out.reverse();
    }
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HlError::Inconsistent(format!("rebuilt positions collide: {out:?}")));
    }
    Ok(out)
}

fn r_to_l(chain: &LambdaChain, j: usize, pair: &AdmissiblePair) -> Result<AdmissiblePair> {
    let mk = Markers::new(chain, j);
    let split = marked_splitting(chain, j, pair)?;
    let mut out = Vec::with_capacity(pair.len());
    for piece in &split.pieces {
        match piece {
            Piece::Free(ps) => {
                for &p in ps {
                    out.push(mk.conjugate_position(p)?);
                }
            }
            Piece::Start { positions, .. } => out.push(positions[0]),
            Piece::Between(ps) => out.extend_from_slice(ps),
            Piece::End { position, .. } => {
                if *position == 0 || mk.start_at(position - 1).is_none() {
                    return Err(HlError::Inconsistent(format!("no start marker ends at {}", position + 1)));
                }
                out.push(position - 1);
                out.push(*position);
            }
        }
    }
    let positions = finish_positions(out, false)?;
    Ok(AdmissiblePair { w: pair.w.times_transposition(j, j + 1), positions })
}

fn l_to_r(chain: &LambdaChain, j: usize, pair: &AdmissiblePair) -> Result<AdmissiblePair> {
    let mk = Markers::new(chain, j);
    let pos = &pair.positions;
    let mut u = pair.end(chain.roots());
    let mut out = Vec::with_capacity(pos.len());
    let mut i = pos.len();
    while i > 0 {
        let p = pos[i - 1];
        let marker = (i >= 2 && p > 0 && pos[i - 2] == p - 1).then(|| mk.start_at(p - 1)).flatten();
        if marker.is_none() {
            out.push(mk.conjugate_position(p)?);
            apply(&mut u, chain.root(p));
            i -= 1;
            continue;
        }
        // s_k becomes e_k at its second position
        out.push(p);
        apply(&mut u, chain.root(p));
        apply(&mut u, chain.root(p - 1));
        i -= 2;
        loop {
            if i == 0 {
                return Err(HlError::Domain(format!("marker ending at {} has no partner on its left", p + 1)));
            }
            let q = pos[i - 1];
            apply(&mut u, chain.root(q));
            i -= 1;
            if !ascending(&u, j) {
                if mk.conjugated_end_at(q).is_none() || mk.start_at(q).is_none() {
                    return Err(HlError::Inconsistent(format!(
                        "rows {j},{} cross at position {} off a conjugated end marker",
                        j + 1,
                        q + 1
                    )));
                }
                out.push(q + 1);
                out.push(q);
                break;
            }
            out.push(q);
        }
    }
    let positions = finish_positions(out, true)?;
    Ok(AdmissiblePair { w: pair.w.times_transposition(j, j + 1), positions })
}

/// `φ_j` (`LToR`) or its inverse (`RToL`) on `rev(Γ)_j` coordinates.
pub fn phi_j(chain: &LambdaChain, j: usize, pair: &AdmissiblePair, direction: Direction) -> Result<AdmissiblePair> {
    check_chain(chain, j)?;
    let (from, to) = match direction {
        Direction::LToR => (Side::L, Side::R),
        Direction::RToL => (Side::R, Side::L),
    };
    if !on_side(chain, j, pair, from) {
        return Err(HlError::Domain(format!("pair {} is not on side {from:?} for row {j}", pair_text(pair))));
    }
    let image = match direction {
        Direction::LToR => l_to_r(chain, j, pair)?,
        Direction::RToL => r_to_l(chain, j, pair)?,
    };
    if !on_side(chain, j, &image, to) {
        return Err(HlError::Inconsistent(format!(
            "phi_{j} sends {} to {}, which is not on side {to:?}",
            pair_text(pair),
            pair_text(&image)
        )));
    }
    Ok(image)
}

fn pair_text(p: &AdmissiblePair) -> String {
    p.to_json().to_string()
}

/// The reversed chain and its row reorderings, built once.
pub struct BijectionContext {
    forward: LambdaChain,
    reversed: LambdaChain,
    reordered: HashMap<usize, LambdaChain>,
}

impl BijectionContext {
    pub fn new(lambda: &Partition, n: usize) -> Result<Self> {
        let forward = LambdaChain::new(lambda, n)?;
        let reversed = forward.variant(Layout::Reversed)?;
        let mut reordered = HashMap::new();
        for j in 1..n {
            if lambda.part(j) == lambda.part(j + 1) {
                reordered.insert(j, forward.variant(Layout::ReversedReordered(j))?);
            }
        }
        Ok(BijectionContext { forward, reversed, reordered })
    }

    pub fn lambda(&self) -> &Partition {
        self.forward.lambda()
    }

    pub fn n(&self) -> usize {
        self.forward.n()
    }

    pub fn reversed(&self) -> &LambdaChain {
        &self.reversed
    }

    /// `rev(Γ)_j`, for rows `j`, `j+1` of equal length.
    pub fn reordered(&self, j: usize) -> Result<&LambdaChain> {
        self.reordered
            .get(&j)
            .ok_or_else(|| HlError::Domain(format!("rows {j} and {} of ({}) differ", j + 1, self.lambda())))
    }

    pub fn to_reordered(&self, j: usize, pair: &AdmissiblePair) -> Result<AdmissiblePair> {
        let chain = self.reordered(j)?;
        Ok(AdmissiblePair { w: pair.w.clone(), positions: self.reversed.translate_positions(&pair.positions, chain)? })
    }

    pub fn from_reordered(&self, j: usize, pair: &AdmissiblePair) -> Result<AdmissiblePair> {
        let chain = self.reordered(j)?;
        Ok(AdmissiblePair { w: pair.w.clone(), positions: chain.translate_positions(&pair.positions, &self.reversed)? })
    }

    /// `φ_j` applied to a pair given on `rev(Γ)`.
    pub fn step(&self, j: usize, pair: &AdmissiblePair, direction: Direction) -> Result<AdmissiblePair> {
        let chain = self.reordered(j)?;
        let image = phi_j(chain, j, &self.to_reordered(j, pair)?, direction)?;
        self.from_reordered(j, &image)
    }

    /// Membership in `𝒜^L` or `𝒜^R` on `rev(Γ)`.
    pub fn on_full_side(&self, pair: &AdmissiblePair, side: Side) -> bool {
        let roots = self.reversed.roots();
        if !pair.satisfies(roots, Orientation::Increasing) || !first_segment_empty(&self.reversed, pair) {
            return false;
        }
        match side {
            Side::L => is_min_coset_rep(&pair.end(roots), self.lambda()),
            Side::R => is_min_coset_rep(&pair.w, self.lambda()),
        }
    }

    /// `φ : 𝒜^L → 𝒜^R` (`LToR`) or its inverse, on `rev(Γ)`.
    pub fn full_bijection(&self, pair: &AdmissiblePair, direction: Direction) -> Result<AdmissiblePair> {
        let (from, to) = match direction {
            Direction::LToR => (Side::L, Side::R),
            Direction::RToL => (Side::R, Side::L),
        };
        if !self.on_full_side(pair, from) {
            return Err(HlError::Domain(format!("pair {} is not in A^{from:?}", pair_text(pair))));
        }
        let steps = match direction {
            Direction::LToR => first_descent_sorting(&pair.w, self.lambda()),
            Direction::RToL => max_descent_top_sorting(&pair.end(self.reversed.roots()), self.lambda()),
        };
        let mut cur = pair.clone();
        for j in steps {
            cur = self.step(j, &cur, direction)?;
        }
        if !self.on_full_side(&cur, to) {
            return Err(HlError::Inconsistent(format!("image {} is not in A^{to:?}", pair_text(&cur))));
        }
        Ok(cur)
    }

    /// Enumerates `𝒜^L` or `𝒜^R`.
    pub fn enumerate_side(&self, side: Side, budget: &Budget) -> Result<Vec<AdmissiblePair>> {
        let mask = self.first_column_mask();
        let lambda = self.lambda();
        let starts = match side {
            Side::L => Permutation::all(self.n()),
            Side::R => crate::combinatorics::min_coset_reps(lambda, self.n()),
        };
        let all = enumerate_on_roots(self.reversed.roots(), Some(&mask), Orientation::Increasing, &starts, budget)?;
        Ok(match side {
            Side::L => all.into_iter().filter(|p| is_min_coset_rep(&p.end(self.reversed.roots()), lambda)).collect(),
            Side::R => all,
        })
    }

    /// Enumerates `𝒜_j^L` or `𝒜_j^R` on `rev(Γ)_j`.
    pub fn enumerate_row_side(&self, j: usize, side: Side, budget: &Budget) -> Result<Vec<AdmissiblePair>> {
        let chain = self.reordered(j)?;
        let first = chain.segment_range(1);
        let mask: Vec<bool> = (0..chain.len()).map(|p| !first.contains(&p)).collect();
        let starts: Vec<Permutation> =
            Permutation::all(self.n()).into_iter().filter(|w| ascending(w, j) == (side == Side::R)).collect();
        let all = enumerate_on_roots(chain.roots(), Some(&mask), Orientation::Increasing, &starts, budget)?;
        Ok(all.into_iter().filter(|p| on_side(chain, j, p, side)).collect())
    }

    fn first_column_mask(&self) -> Vec<bool> {
        let first = self.reversed.segment_range(1);
        (0..self.reversed.len()).map(|p| !first.contains(&p)).collect()
    }

    /// `ct` of the reversed filling map.
    pub fn content(&self, pair: &AdmissiblePair) -> Result<Vec<u32>> {
        Ok(filling_map(&self.reversed, pair, FillingMode::Reverse)?.content(self.n()).0)
    }

    pub fn n_stat(&self, pair: &AdmissiblePair) -> usize {
        n_stat(&pair.w, &pair.transpositions(self.reversed.roots()))
    }
}

fn witness(side: Side, x: &AdmissiblePair, y: Option<&AdmissiblePair>) -> serde_json::Value {
    match y {
        Some(y) => serde_json::json!({ "side": side, "input": x.to_json(), "image": y.to_json() }),
        None => serde_json::json!({ "side": side, "input": x.to_json() }),
    }
}

/// Restricts the per-element checks to a seeded random subset of each side.
/// Set-level checks (injectivity, surjectivity) need every element and are
/// skipped when sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Sampling {
    pub size: usize,
    pub seed: u64,
}

fn pick(items: &[AdmissiblePair], sampling: Option<Sampling>, salt: u64) -> Vec<&AdmissiblePair> {
    match sampling {
        Some(s) if s.size < items.len() => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed.wrapping_add(salt));
            let mut idx = index::sample(&mut rng, items.len(), s.size).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| &items[i]).collect()
        }
        _ => items.iter().collect(),
    }
}

/// Product of the transpositions at `positions`, as a permutation.
fn product(chain: &LambdaChain, positions: &[usize]) -> Permutation {
    let mut u = Permutation::identity(chain.n());
    for &p in positions {
        apply(&mut u, chain.root(p));
    }
    u
}

/// Checks every `φ_j`: codomain, round trips, bijectivity, and the stated
/// invariants, on `rev(Γ)_j`.
fn check_rows(ctx: &BijectionContext, sampling: Option<Sampling>, budget: &Budget, r: &mut Report) -> Result<()> {
    let mut rows = Vec::new();
    for j in 1..ctx.n() {
        let Ok(chain) = ctx.reordered(j) else { continue };
        let left = ctx.enumerate_row_side(j, Side::L, budget)?;
        let right = ctx.enumerate_row_side(j, Side::R, budget)?;
        let left_set: BTreeSet<&AdmissiblePair> = left.iter().collect();
        let mut images = BTreeSet::new();
        let s = chain.roots();
        let swap = Permutation::identity(ctx.n()).times_transposition(j, j + 1);
        for x in pick(&right, sampling, 2 * j as u64) {
            let y = match phi_j(chain, j, x, Direction::RToL) {
                Ok(y) => y,
                Err(e) => {
                    r.check(false, || format!("phi_{j} inverse failed: {e}"), || witness(Side::R, x, None));
                    continue;
                }
            };
            r.check(
                left_set.contains(&y),
                || format!("phi_{j} inverse leaves A_j^L"),
                || witness(Side::R, x, Some(&y)),
            );
            images.insert(y.clone());
            r.check(y.len() == x.len(), || format!("phi_{j} changes |T|"), || witness(Side::R, x, Some(&y)));
            let (ny, nx) = (n_stat(&y.w, &y.transpositions(s)), n_stat(&x.w, &x.transpositions(s)));
            r.check(ny + 1 == nx, || format!("phi_{j}: N(w,T) != N(w',T') - 1"), || witness(Side::R, x, Some(&y)));
            let conj = swap.compose(&product(chain, &x.positions)).compose(&swap);
            r.check(
                conj == product(chain, &y.positions),
                || format!("phi_{j}: T != (j,j+1) T' (j,j+1)"),
                || witness(Side::R, x, Some(&y)),
            );
            let (cx, cy) = (
                filling_map(chain, x, FillingMode::Reverse)?.content(ctx.n()),
                filling_map(chain, &y, FillingMode::Reverse)?.content(ctx.n()),
            );
            r.check(cx == cy, || format!("phi_{j} changes the content"), || witness(Side::R, x, Some(&y)));
            match phi_j(chain, j, &y, Direction::LToR) {
                Ok(back) => r.check(back == *x, || format!("phi_{j} does not invert its inverse"), || {
                    serde_json::json!({ "side": Side::R, "input": x.to_json(), "image": y.to_json(), "back": back.to_json() })
                }),
                Err(e) => r.check(false, || format!("phi_{j} failed: {e}"), || witness(Side::L, &y, None)),
            }
        }
        if sampling.is_none() {
            r.check(
                images.len() == right.len(),
                || format!("phi_{j} inverse is not injective"),
                || serde_json::json!(j),
            );
            r.check(
                images.len() == left.len(),
                || format!("phi_{j} inverse is not onto A_j^L"),
                || serde_json::json!({ "j": j, "left": left.len(), "images": images.len() }),
            );
        }
        for x in pick(&left, sampling, 2 * j as u64 + 1) {
            match phi_j(chain, j, x, Direction::LToR).and_then(|y| phi_j(chain, j, &y, Direction::RToL)) {
                Ok(back) => r.check(
                    back == *x,
                    || format!("phi_{j} inverse does not invert phi_{j}"),
                    || witness(Side::L, x, Some(&back)),
                ),
                Err(e) => r.check(false, || format!("phi_{j} round trip failed: {e}"), || witness(Side::L, x, None)),
            }
        }
        rows.push(serde_json::json!({ "j": j, "left": left.len(), "right": right.len() }));
    }
    r.set_detail("rows", rows);
    Ok(())
}

fn check_full(ctx: &BijectionContext, sampling: Option<Sampling>, budget: &Budget, r: &mut Report) -> Result<()> {
    let left = ctx.enumerate_side(Side::L, budget)?;
    let right = ctx.enumerate_side(Side::R, budget)?;
    let right_set: BTreeSet<&AdmissiblePair> = right.iter().collect();
    let mut images = BTreeSet::new();
    for x in pick(&left, sampling, 0) {
        let y = match ctx.full_bijection(x, Direction::LToR) {
            Ok(y) => y,
            Err(e) => {
                r.check(false, || format!("phi failed: {e}"), || witness(Side::L, x, None));
                continue;
            }
        };
        r.check(right_set.contains(&y), || "phi leaves A^R".into(), || witness(Side::L, x, Some(&y)));
        images.insert(y.clone());
        let bar = min_coset_rep(&x.w, ctx.lambda());
        r.check(
            y.w == bar,
            || "u differs from the minimal coset representative".into(),
            || witness(Side::L, x, Some(&y)),
        );
        r.check(y.len() == x.len(), || "|V| != |T|".into(), || witness(Side::L, x, Some(&y)));
        r.check(ctx.content(x)? == ctx.content(&y)?, || "content changes".into(), || witness(Side::L, x, Some(&y)));
        let shift = x.w.length() - bar.length();
        r.check(
            ctx.n_stat(x) + shift == ctx.n_stat(&y),
            || "N(w,T) != N(w̄,V) - (ℓ(w) - ℓ(w̄))".into(),
            || witness(Side::L, x, Some(&y)),
        );
        match ctx.full_bijection(&y, Direction::RToL) {
            Ok(back) => r.check(back == *x, || "inverse does not undo phi".into(), || {
                serde_json::json!({ "side": Side::L, "input": x.to_json(), "image": y.to_json(), "back": back.to_json() })
            }),
            Err(e) => r.check(false, || format!("inverse failed: {e}"), || witness(Side::R, &y, None)),
        }
    }
    if sampling.is_none() {
        r.check(images.len() == left.len(), || "phi is not injective".into(), || serde_json::json!(null));
        r.check(
            images.len() == right.len(),
            || "phi is not onto A^R".into(),
            || serde_json::json!({ "left": left.len(), "right": right.len(), "images": images.len() }),
        );
    }
    for y in pick(&right, sampling, 1) {
        match ctx.full_bijection(y, Direction::RToL).and_then(|x| ctx.full_bijection(&x, Direction::LToR)) {
            Ok(back) => {
                r.check(back == *y, || "phi does not undo the inverse".into(), || witness(Side::R, y, Some(&back)))
            }
            Err(e) => r.check(false, || format!("inverse round trip failed: {e}"), || witness(Side::R, y, None)),
        }
    }
    r.set_detail("left", left.len());
    r.set_detail("right", right.len());
    Ok(())
}

/// Outcome of comparing two composites of `φ` steps over all pairs where
/// both are defined.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CompositeTally {
    pub agree: u64,
    pub disagree: u64,
    pub undefined: u64,
}

fn compose(ctx: &BijectionContext, pair: &AdmissiblePair, js: &[usize]) -> Option<AdmissiblePair> {
    let mut cur = pair.clone();
    for &j in js {
        cur = ctx.step(j, &cur, Direction::LToR).ok()?;
    }
    Some(cur)
}

/// Compares `φ_{a}` then `φ_{b}` ... against the other word, over every pair on
/// `rev(Γ)` with `T_1 = ∅` from which both are defined.
pub fn compare_composites(
    ctx: &BijectionContext,
    first: &[usize],
    second: &[usize],
    budget: &Budget,
) -> Result<(CompositeTally, Option<AdmissiblePair>)> {
    let mask = ctx.first_column_mask();
    let all = enumerate_on_roots(
        ctx.reversed.roots(),
        Some(&mask),
        Orientation::Increasing,
        &Permutation::all(ctx.n()),
        budget,
    )?;
    let mut tally = CompositeTally::default();
    let mut witness = None;
    for p in &all {
        match (compose(ctx, p, first), compose(ctx, p, second)) {
            (Some(x), Some(y)) if x == y => tally.agree += 1,
            (Some(_), Some(_)) => {
                tally.disagree += 1;
                witness.get_or_insert_with(|| p.clone());
            }
            _ => tally.undefined += 1,
        }
    }
    Ok((tally, witness))
}

/// Full verification of the bijection for `(λ, n)`: each `φ_j`, the composed
/// map both ways, and commutation of `φ_i`, `φ_j` for `|i - j| ≥ 2`. Braid
/// relations are tallied in the details without being asserted.
pub fn bijection_report(lambda: &Partition, n: usize, budget: &Budget) -> Result<Report> {
    bijection_report_sampled(lambda, n, None, budget)
}

pub fn bijection_report_sampled(
    lambda: &Partition,
    n: usize,
    sampling: Option<Sampling>,
    budget: &Budget,
) -> Result<Report> {
    let ctx = BijectionContext::new(lambda, n)?;
    let mut r = Report::new("bijection", Some(lambda.parts().to_vec()), n);
    check_rows(&ctx, sampling, budget, &mut r)?;
    check_full(&ctx, sampling, budget, &mut r)?;
    if let Some(s) = sampling {
        r.set_detail("sampling", s);
    }
    let rows: Vec<usize> = (1..n).filter(|j| ctx.reordered.contains_key(j)).collect();
    let mut commuting = Vec::new();
    let mut braids = Vec::new();
    for &i in &rows {
        for &j in &rows {
            if j >= i + 2 {
                let (tally, w) = compare_composites(&ctx, &[i, j], &[j, i], budget)?;
                r.check(
                    tally.disagree == 0,
                    || format!("phi_{i} and phi_{j} do not commute"),
                    || serde_json::json!({ "i": i, "j": j, "pair": w.map(|p| p.to_json()) }),
                );
                commuting.push(serde_json::json!({ "i": i, "j": j, "tally": tally }));
            }
            if j == i + 1 {
                let (tally, _) = compare_composites(&ctx, &[i, j, i], &[j, i, j], budget)?;
                braids.push(serde_json::json!({ "i": i, "j": j, "tally": tally }));
            }
        }
    }
    r.set_detail("commutation", commuting);
    r.set_detail("braid", braids);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn small_reports_pass() {
        for (parts, n) in [(vec![2, 2], 3), (vec![1, 1], 3), (vec![2, 1], 3), (vec![1], 3)] {
            let r = bijection_report(&part(&parts), n, &b()).unwrap();
            assert!(r.passed(), "({parts:?}, {n}): {:#?}", r.failures);
        }
    }

    #[test]
    fn regular_lambda_is_identity() {
        let ctx = BijectionContext::new(&part(&[2, 1]), 3).unwrap();
        for x in ctx.enumerate_side(Side::L, &b()).unwrap() {
            assert_eq!(ctx.full_bijection(&x, Direction::LToR).unwrap(), x);
        }
        assert_eq!(ctx.enumerate_side(Side::L, &b()).unwrap(), ctx.enumerate_side(Side::R, &b()).unwrap());
    }

    #[test]
    fn pure_conjugation_without_markers() {
        let ctx = BijectionContext::new(&part(&[2, 2]), 4).unwrap();
        let chain = ctx.reordered(1).unwrap();
        let mut seen = 0;
        for x in ctx.enumerate_row_side(1, Side::R, &b()).unwrap() {
            if marked_splitting(chain, 1, &x).unwrap().marker_count() > 0 {
                continue;
            }
            let y = phi_j(chain, 1, &x, Direction::RToL).unwrap();
            let mk = Markers::new(chain, 1);
            let mut conj: Vec<usize> = x.positions.iter().map(|&p| mk.conjugate_position(p).unwrap()).collect();
            conj.sort_unstable();
            assert_eq!(y.positions, conj);
            seen += 1;
        }
        assert!(seen > 0);
    }

    #[test]
    fn column_one_is_excluded() {
        // λ = (1,1), n = 3: the only column is column 1, so A_1^R = {(w', ∅)}
        let ctx = BijectionContext::new(&part(&[1, 1]), 3).unwrap();
        let chain = ctx.reordered(1).unwrap();
        assert_eq!(chain.to_string(), "(2,3)(1,3)");
        let x = AdmissiblePair::new("132".parse().unwrap(), vec![1]);
        assert!(!on_side(chain, 1, &x, Side::R));
    }

    #[test]
    fn sampled_report_is_deterministic() {
        let s = Some(Sampling { size: 5, seed: 7 });
        let l = part(&[2, 2, 2]);
        let r1 = bijection_report_sampled(&l, 4, s, &b()).unwrap();
        let r2 = bijection_report_sampled(&l, 4, s, &b()).unwrap();
        assert!(r1.passed());
        assert_eq!(r1.to_json(), r2.to_json());
        assert!(r1.checked < bijection_report(&l, 4, &b()).unwrap().checked);
    }

    #[test]
    fn marker_splitting_on_two_rows() {
        let ctx = BijectionContext::new(&part(&[2, 2]), 3).unwrap();
        let chain = ctx.reordered(1).unwrap();
        for x in ctx.enumerate_row_side(1, Side::R, &b()).unwrap() {
            let s = marked_splitting(chain, 1, &x).unwrap();
            let flat: Vec<usize> = s
                .pieces
                .iter()
                .flat_map(|p| match p {
                    Piece::Free(v) | Piece::Between(v) => v.clone(),
                    Piece::Start { positions, .. } => positions.to_vec(),
                    Piece::End { position, .. } => vec![*position],
                })
                .collect();
            assert_eq!(flat, x.positions);
        }
    }

    #[test]
    fn wrong_side_is_a_domain_error() {
        let ctx = BijectionContext::new(&part(&[2, 2]), 3).unwrap();
        let x = AdmissiblePair::new(Permutation::identity(3), vec![]);
        assert!(ctx.full_bijection(&x, Direction::RToL).is_ok());
        let bad = AdmissiblePair::new("213".parse().unwrap(), vec![]);
        assert!(matches!(ctx.full_bijection(&bad, Direction::RToL), Err(HlError::Domain(_))));
        assert!(matches!(ctx.step(1, &bad, Direction::RToL), Err(HlError::Domain(_))));
        assert!(matches!(ctx.reordered(2), Err(HlError::Domain(_))));
    }
}
