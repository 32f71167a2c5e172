//! Fillings of Young diagrams drawn in Japanese style (columns numbered from
//! the right), the attack relation, and the statistics `inv`, `cinv`, `des`
//! and content.
//!
//! A cell is addressed as `(row, column)`, both 1-based, with column 1 the
//! rightmost. Cell `(i, j)` exists iff `i <= λ'_j`.

use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::combinatorics::Partition;
use crate::error::{HlError, Result};
use crate::tpoly::ExponentVector;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Filling {
    shape: Partition,
    /// `cols[j-1][i-1] = σ(i, j)`.
    cols: Vec<Vec<u8>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillingClass {
    /// Non-attacking fillings weakly decreasing in rows.
    AllValid,
    /// Valid fillings whose rightmost column increases on each block of
    /// equal parts.
    Fhat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillingStats {
    pub inv: usize,
    pub cinv: usize,
    pub des: usize,
    pub content: ExponentVector,
}

impl Filling {
    /// Builds a filling from its columns, rightmost first.
    pub fn from_columns(shape: Partition, cols: Vec<Vec<u8>>) -> Result<Self> {
        if cols.len() != shape.width() {
            return Err(HlError::Domain(format!("{} columns given for shape {shape}", cols.len())));
        }
        for (j, c) in cols.iter().enumerate() {
            if c.len() != shape.column_length(j + 1) {
                return Err(HlError::Domain(format!("column {} has wrong length", j + 1)));
            }
            if c.contains(&0) {
                return Err(HlError::Domain("entries must be positive".into()));
            }
        }
        Ok(Filling { shape, cols })
    }

    /// Builds a filling from rows, each listed leftmost to rightmost.
    pub fn from_rows(shape: Partition, rows: &[Vec<u8>]) -> Result<Self> {
        if rows.len() != shape.length() {
            return Err(HlError::Domain(format!("{} rows given for shape {shape}", rows.len())));
        }
        let mut cols = vec![Vec::new(); shape.width()];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != shape.part(i + 1) {
                return Err(HlError::Domain(format!("row {} has wrong length", i + 1)));
            }
            for (k, &x) in row.iter().rev().enumerate() {
                cols[k].push(x);
            }
        }
        Self::from_columns(shape, cols)
    }

    pub(crate) fn from_columns_unchecked(shape: Partition, cols: Vec<Vec<u8>>) -> Self {
        Filling { shape, cols }
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    /// Column `j` (1 = rightmost), top to bottom.
    pub fn column(&self, j: usize) -> &[u8] {
        &self.cols[j - 1]
    }

    pub fn columns(&self) -> &[Vec<u8>] {
        &self.cols
    }

    /// `σ(i, j)`, if the cell exists.
    pub fn get(&self, i: usize, j: usize) -> Option<u8> {
        self.cols.get(j.checked_sub(1)?)?.get(i.checked_sub(1)?).copied()
    }

    /// Rows, each listed leftmost to rightmost.
    pub fn rows(&self) -> Vec<Vec<u8>> {
        (1..=self.shape.length())
            .map(|i| (1..=self.shape.part(i)).rev().map(|j| self.cols[j - 1][i - 1]).collect())
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        for (jj, col) in self.cols.iter().enumerate() {
            for a in 0..col.len() {
                for b in a + 1..col.len() {
                    if col[a] == col[b] {
                        return false;
                    }
                }
            }
            if let Some(right) = jj.checked_sub(1).map(|r| &self.cols[r]) {
                for (i, &x) in col.iter().enumerate() {
                    if x < right[i] {
                        return false;
                    }
                    // left cell strictly below the right one
                    if right[..i].contains(&x) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Whether the rightmost column increases strictly on every block of rows
    /// with equal parts.
    pub fn is_fhat(&self) -> bool {
        let Some(first) = self.cols.first() else {
            return true;
        };
        (1..first.len()).all(|i| self.shape.part(i) != self.shape.part(i + 1) || first[i - 1] < first[i])
    }

    pub fn content(&self, n: usize) -> ExponentVector {
        let mut c = vec![0u32; n];
        for col in &self.cols {
            for &x in col {
                c[x as usize - 1] += 1;
            }
        }
        ExponentVector(c)
    }

    /// Inversions: attacking pairs `(u, v)`, `u` first in reading order
    /// (columns left to right, each top to bottom), with `σ(u) < σ(v)`.
    pub fn inv(&self) -> usize {
        let mut count = 0;
        for (jj, col) in self.cols.iter().enumerate() {
            for a in 0..col.len() {
                for b in a + 1..col.len() {
                    if col[a] < col[b] {
                        count += 1;
                    }
                }
            }
            if jj > 0 {
                let right = &self.cols[jj - 1];
                for (i, &x) in col.iter().enumerate() {
                    count += right[..i].iter().filter(|&&y| x < y).count();
                }
            }
        }
        count
    }

    pub fn cinv(&self) -> usize {
        self.shape.n_statistic() - self.inv()
    }

    /// Direct count: same-column pairs `u` below `v` with `σ(u) < σ(v)` and,
    /// when `u` has a left neighbour `w`, also `σ(v) < σ(w)`.
    pub fn cinv_by_triples(&self) -> usize {
        let mut count = 0;
        for (jj, col) in self.cols.iter().enumerate() {
            let left = self.cols.get(jj + 1);
            for lower in 0..col.len() {
                for upper in 0..lower {
                    let (su, sv) = (col[lower], col[upper]);
                    if su >= sv {
                        continue;
                    }
                    match left.and_then(|l| l.get(lower)) {
                        Some(&sw) if sv >= sw => {}
                        _ => count += 1,
                    }
                }
            }
        }
        count
    }

    /// Cells `u` with a right neighbour and `σ(u) > σ(rt(u))`.
    pub fn des(&self) -> usize {
        let mut count = 0;
        for jj in 1..self.cols.len() {
            let (col, right) = (&self.cols[jj], &self.cols[jj - 1]);
            count += col.iter().zip(right).filter(|(x, y)| x > y).count();
        }
        count
    }

    pub fn stats(&self, n: usize) -> FillingStats {
        let inv = self.inv();
        FillingStats { inv, cinv: self.shape.n_statistic() - inv, des: self.des(), content: self.content(n) }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "shape": self.shape.parts(), "rows": self.rows() })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            shape: Vec<usize>,
            rows: Vec<Vec<u8>>,
        }
        let raw: Raw = serde_json::from_value(v.clone()).map_err(|e| HlError::Parse(e.to_string()))?;
        Filling::from_rows(Partition::new(raw.shape)?, &raw.rows)
    }
}

/// Japanese-style picture: rows top to bottom, right-justified.
impl fmt::Display for Filling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.shape.width();
        let rows = self.rows();
        for (i, row) in rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let pad = width - row.len();
            let cells: Vec<String> =
                std::iter::repeat_n(" ".to_string(), pad).chain(row.iter().map(|x| x.to_string())).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Calls `visit` on the members of `ℱ(λ, n)` (or `ℱ̂(λ, n)`) in lexicographic
/// order of (column 1, column 2, ...), each column read top to bottom.
pub fn for_each_filling<F>(lambda: &Partition, n: usize, class: FillingClass, mut visit: F) -> ControlFlow<()>
where
    F: FnMut(&Filling) -> ControlFlow<()>,
{
    for first in rightmost_columns(lambda, n, class) {
        for_each_with_rightmost(lambda, n, first, &mut visit)?;
    }
    ControlFlow::Continue(())
}

/// All admissible rightmost columns, in lexicographic order.
pub fn rightmost_columns(lambda: &Partition, n: usize, class: FillingClass) -> Vec<Vec<u8>> {
    let len = lambda.column_length(1);
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(lambda: &Partition, n: usize, len: usize, class: FillingClass, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let i = cur.len();
        if i == len {
            out.push(cur.clone());
            return;
        }
        let lo = match (class, cur.last()) {
            (FillingClass::Fhat, Some(&prev)) if lambda.part(i) == lambda.part(i + 1) => prev + 1,
            _ => 1,
        };
        for x in lo..=n as u8 {
            if cur.contains(&x) {
                continue;
            }
            cur.push(x);
            rec(lambda, n, len, class, cur, out);
            cur.pop();
        }
    }
    rec(lambda, n, len, class, &mut cur, &mut out);
    out
}

/// Visits every valid filling whose rightmost column is `first`.
pub fn for_each_with_rightmost<F>(lambda: &Partition, n: usize, first: Vec<u8>, visit: &mut F) -> ControlFlow<()>
where
    F: FnMut(&Filling) -> ControlFlow<()>,
{
    let width = lambda.width();
    if width == 0 {
        return visit(&Filling::from_columns_unchecked(lambda.clone(), Vec::new()));
    }
    let mut cols: Vec<Vec<u8>> = Vec::with_capacity(width);
    cols.push(first);
    extend_columns(lambda, n, &mut cols, visit)
}

fn extend_columns<F>(lambda: &Partition, n: usize, cols: &mut Vec<Vec<u8>>, visit: &mut F) -> ControlFlow<()>
where
    F: FnMut(&Filling) -> ControlFlow<()>,
{
    let j = cols.len() + 1;
    if j > lambda.width() {
        let f = Filling::from_columns_unchecked(lambda.clone(), cols.clone());
        return visit(&f);
    }
    let len = lambda.column_length(j);
    let right = cols.last().unwrap().clone();
    let mut cur = Vec::with_capacity(len);
    next_column(lambda, n, &right, len, &mut cur, cols, visit)
}

fn next_column<F>(
    lambda: &Partition,
    n: usize,
    right: &[u8],
    len: usize,
    cur: &mut Vec<u8>,
    cols: &mut Vec<Vec<u8>>,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&Filling) -> ControlFlow<()>,
{
    let i = cur.len();
    if i == len {
        cols.push(cur.clone());
        let r = extend_columns(lambda, n, cols, visit);
        cols.pop();
        return r;
    }
    for x in right[i]..=n as u8 {
        if cur.contains(&x) || right[..i].contains(&x) {
            continue;
        }
        cur.push(x);
        let r = next_column(lambda, n, right, len, cur, cols, visit);
        cur.pop();
        r?;
    }
    ControlFlow::Continue(())
}

pub fn enumerate_fillings(lambda: &Partition, n: usize, class: FillingClass) -> Vec<Filling> {
    let mut out = Vec::new();
    let _ = for_each_filling(lambda, n, class, |f| {
        out.push(f.clone());
        ControlFlow::Continue(())
    });
    out
}

pub fn count_fillings(lambda: &Partition, n: usize, class: FillingClass) -> usize {
    let mut count = 0;
    let _ = for_each_filling(lambda, n, class, |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn shape(p: &[usize]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    fn f222(rows: [[u8; 2]; 3]) -> Filling {
        Filling::from_rows(shape(&[2, 2, 2]), &rows.map(|r| r.to_vec())).unwrap()
    }

    #[test]
    fn three_rows_of_two_fillings_stats() {
        let a = f222([[1, 1], [3, 2], [4, 3]]);
        assert!(a.is_valid());
        let s = a.stats(4);
        assert_eq!((s.des, s.cinv), (2, 0));
        let b = f222([[3, 2], [4, 3], [1, 1]]);
        assert_eq!((b.des(), b.cinv()), (2, 2));
        let c = f222([[1, 1], [4, 2], [3, 3]]);
        let s = c.stats(4);
        assert_eq!((s.des, s.cinv), (1, 1));
        assert_eq!(s.content, ExponentVector(vec![2, 1, 2, 1]));
    }

    #[test]
    fn all_nine_q_fillings_for_2121() {
        // (rows, des, cinv)
        let listed = [
            ([[1, 1], [3, 2], [4, 3]], 2, 0),
            ([[3, 2], [1, 1], [4, 3]], 2, 1),
            ([[3, 2], [4, 3], [1, 1]], 2, 2),
            ([[1, 1], [4, 2], [3, 3]], 1, 1),
            ([[1, 1], [3, 3], [4, 2]], 1, 1),
            ([[3, 3], [1, 1], [4, 2]], 1, 2),
            ([[4, 2], [1, 1], [3, 3]], 1, 2),
            ([[4, 2], [3, 3], [1, 1]], 1, 3),
            ([[3, 3], [4, 2], [1, 1]], 1, 3),
        ];
        let mut listed_set = BTreeSet::new();
        for (rows, des, cinv) in listed {
            let f = f222(rows);
            assert!(f.is_valid());
            assert_eq!((f.des(), f.cinv()), (des, cinv), "{rows:?}");
            listed_set.insert(f);
        }
        let target = ExponentVector(vec![2, 1, 2, 1]);
        let enumerated: BTreeSet<Filling> = enumerate_fillings(&shape(&[2, 2, 2]), 4, FillingClass::AllValid)
            .into_iter()
            .filter(|f| f.content(4) == target)
            .collect();
        assert_eq!(enumerated, listed_set);
        let fhat: Vec<_> = listed_set.iter().filter(|f| f.is_fhat()).collect();
        assert_eq!(fhat.len(), 2);
    }

    #[test]
    fn validity_edge_cases() {
        let single = Filling::from_rows(shape(&[1]), &[vec![3]]).unwrap();
        assert!(single.is_valid());
        let repeated = Filling::from_rows(shape(&[1, 1]), &[vec![2], vec![2]]).unwrap();
        assert!(!repeated.is_valid());
        // row increasing to the right
        let bad_row = Filling::from_rows(shape(&[2]), &[vec![1, 2]]).unwrap();
        assert!(!bad_row.is_valid());
        // left cell below, equal to the right cell above
        let attack = Filling::from_rows(shape(&[2, 2]), &[vec![1, 1], vec![3, 2]]).unwrap();
        assert!(attack.is_valid());
        let attack2 = Filling::from_rows(shape(&[2, 2]), &[vec![2, 1], vec![2, 2]]).unwrap();
        assert!(!attack2.is_valid());
    }

    #[test]
    fn fhat_examples() {
        assert!(f222([[1, 1], [3, 2], [4, 3]]).is_fhat());
        let bad = f222([[2, 2], [1, 1], [4, 3]]);
        assert_eq!(bad.column(1), &[2, 1, 3]);
        assert!(!bad.is_fhat());
        // distinct parts: every valid filling is in the hat class
        let l = shape(&[3, 2, 1]);
        assert_eq!(enumerate_fillings(&l, 4, FillingClass::AllValid), enumerate_fillings(&l, 4, FillingClass::Fhat));
    }

    #[test]
    fn table_counts() {
        assert_eq!(count_fillings(&shape(&[4, 2, 1]), 4, FillingClass::AllValid), 366);
        assert_eq!(count_fillings(&shape(&[4, 2, 1]), 5, FillingClass::AllValid), 1869);
        assert_eq!(count_fillings(&shape(&[4, 3, 2, 1]), 5, FillingClass::AllValid), 8896);
    }

    #[test]
    fn single_box() {
        let fs = enumerate_fillings(&shape(&[1]), 2, FillingClass::AllValid);
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].column(1), &[1]);
        assert_eq!(fs[1].column(1), &[2]);
        let empty = enumerate_fillings(&Partition::empty(), 3, FillingClass::AllValid);
        assert_eq!(empty.len(), 1);
    }

    /// Brute force over all assignments of [n] to the cells.
    fn brute_force(lambda: &Partition, n: usize) -> BTreeSet<Filling> {
        let cells = lambda.size();
        let mut out = BTreeSet::new();
        let total = (n as u64).pow(cells as u32);
        for code in 0..total {
            let mut c = code;
            let mut cols = Vec::new();
            for j in 1..=lambda.width() {
                let mut col = Vec::new();
                for _ in 0..lambda.column_length(j) {
                    col.push((c % n as u64) as u8 + 1);
                    c /= n as u64;
                }
                cols.push(col);
            }
            let f = Filling::from_columns(lambda.clone(), cols).unwrap();
            if f.is_valid() {
                out.insert(f);
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_brute_force_and_invariants() {
        for (parts, n) in [(vec![2, 1], 3), (vec![2, 2], 3), (vec![3, 1], 3), (vec![2, 2, 1], 4), (vec![3, 1, 1], 4)] {
            let l = shape(&parts);
            let en = enumerate_fillings(&l, n, FillingClass::AllValid);
            let set: BTreeSet<_> = en.iter().cloned().collect();
            assert_eq!(set.len(), en.len(), "no duplicates");
            assert_eq!(set, brute_force(&l, n));
            let hat: BTreeSet<_> = enumerate_fillings(&l, n, FillingClass::Fhat).into_iter().collect();
            let hat_filter: BTreeSet<_> = en.iter().filter(|f| f.is_fhat()).cloned().collect();
            assert_eq!(hat, hat_filter);
            for f in &en {
                assert!(f.inv() <= l.n_statistic());
                assert_eq!(f.cinv(), f.cinv_by_triples(), "{f:?}");
            }
        }
    }

    #[test]
    fn json_and_picture() {
        let f = Filling::from_rows(shape(&[2, 1]), &[vec![4, 2], vec![3]]).unwrap();
        let j = f.to_json();
        assert_eq!(j, serde_json::json!({"shape": [2, 1], "rows": [[4, 2], [3]]}));
        assert_eq!(Filling::from_json(&j).unwrap(), f);
        assert_eq!(f.to_string(), "4 2\n  3");
    }
}
