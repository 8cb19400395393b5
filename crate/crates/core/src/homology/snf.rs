//! Smith normal form of sparse integer matrices.
//!
//! Reduction runs in two phases. The first eliminates unit pivots with
//! integer row operations on a row-sparse copy, choosing pivots by an
//! approximate Markowitz count so fill-in stays low; each unit pivot
//! contributes an invariant factor 1. Whatever is left has no unit entry and
//! is finished by a dense Euclidean reduction over big integers. Phase one
//! runs on `i64` with checked arithmetic and restarts on `BigInt` if any
//! entry overflows.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::sparse::SparseMatrix;

/// How unit pivots are chosen in the sparse phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotStrategy {
    /// Sparsest column first, then the shortest row with a unit entry.
    #[default]
    Markowitz,
    /// First column (by index) with a unit entry, first such row.
    FirstAvailable,
}

/// Invariant factors `d_1 | d_2 | … | d_r` of a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    /// All nonzero invariant factors, ascending, including the ones.
    pub factors: Vec<BigInt>,
    pub transforms: Option<Transforms>,
}

/// Unimodular `U`, `V` with `U·A·V = D` diagonal, as dense matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transforms {
    pub u: Vec<Vec<BigInt>>,
    pub d: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|f| !f.is_one()).cloned().collect()
    }
}

/// Coefficients for the sparse phase.
pub(crate) trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn from_i64(v: i64) -> Self;
    fn is_nil(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn negated(&self) -> Self;
    fn mul_add(&self, f: &Self, x: &Self) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Coeff for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn negated(&self) -> Self {
        -*self
    }
    /// `self + f·x`
    fn mul_add(&self, f: &Self, x: &Self) -> Option<Self> {
        f.checked_mul(*x).and_then(|p| self.checked_add(p))
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Coeff for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn negated(&self) -> Self {
        -self
    }
    fn mul_add(&self, f: &Self, x: &Self) -> Option<Self> {
        Some(self + f * x)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

#[derive(Debug)]
pub(crate) struct Overflow;

/// Row-sparse working copy for unit-pivot elimination.
pub(crate) struct Eliminator<T> {
    pub rows: Vec<Vec<(u32, T)>>,
    pub col_rows: Vec<Vec<u32>>,
    pub row_alive: Vec<bool>,
    pub col_alive: Vec<bool>,
    /// `(row, col, pivot)` in elimination order.
    pub pivots: Vec<(usize, usize, T)>,
    /// Right-hand side carried through the row operations, if any.
    pub rhs: Vec<T>,
}

impl<T: Coeff> Eliminator<T> {
    pub fn new(a: &SparseMatrix) -> Self {
        let mut rows: Vec<Vec<(u32, T)>> = vec![Vec::new(); a.rows()];
        let mut col_rows = vec![Vec::new(); a.cols()];
        for (c, col) in a.columns().iter().enumerate() {
            for &(r, v) in col {
                rows[r].push((c as u32, T::from_i64(v)));
                col_rows[c].push(r as u32);
            }
        }
        Eliminator {
            row_alive: vec![true; a.rows()],
            col_alive: vec![true; a.cols()],
            rows,
            col_rows,
            pivots: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn with_rhs(a: &SparseMatrix, rhs: &[i64]) -> Self {
        let mut e = Self::new(a);
        e.rhs = rhs.iter().map(|&x| T::from_i64(x)).collect();
        e
    }

    pub fn row(&self, r: usize) -> &[(u32, T)] {
        &self.rows[r]
    }

    fn entry(&self, r: usize, c: usize) -> Option<&T> {
        let row = &self.rows[r];
        row.binary_search_by_key(&(c as u32), |e| e.0).ok().map(|p| &row[p].1)
    }

    /// Drops stale row references of column `c`; returns its live count.
    fn refresh_column(&mut self, c: usize) -> usize {
        let mut list = std::mem::take(&mut self.col_rows[c]);
        list.sort_unstable();
        list.dedup();
        list.retain(|&r| self.row_alive[r as usize] && self.entry(r as usize, c).is_some());
        let n = list.len();
        self.col_rows[c] = list;
        n
    }

    /// Best unit pivot row in column `c` (shortest row).
    fn unit_row(&self, c: usize, first: bool) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for &r in &self.col_rows[c] {
            let r = r as usize;
            if self.entry(r, c).is_some_and(|v| v.is_unit()) {
                let len = self.rows[r].len();
                if first {
                    return Some(r);
                }
                if best.is_none_or(|(_, l)| len < l) {
                    best = Some((r, len));
                }
            }
        }
        best.map(|(r, _)| r)
    }

    /// Eliminates column `c` with the unit pivot in row `r`.
    fn pivot(&mut self, r: usize, c: usize) -> Result<(), Overflow> {
        let p = self.entry(r, c).cloned().expect("pivot entry");
        let prow = std::mem::take(&mut self.rows[r]);
        let targets: Vec<u32> = self.col_rows[c].clone();
        for &t in &targets {
            let t = t as usize;
            if t == r || !self.row_alive[t] {
                continue;
            }
            let Some(a) = self.entry(t, c).cloned() else { continue };
            // row_t ← row_t − a·p·row_r, since p = p⁻¹.
            let f = T::from_i64(0).mul_add(&a, &p).ok_or(Overflow)?.negated();
            let old = std::mem::take(&mut self.rows[t]);
            let mut merged = Vec::with_capacity(old.len() + prow.len());
            let (mut i, mut j) = (0, 0);
            while i < old.len() || j < prow.len() {
                if j == prow.len() || (i < old.len() && old[i].0 < prow[j].0) {
                    merged.push(old[i].clone());
                    i += 1;
                } else if i == old.len() || prow[j].0 < old[i].0 {
                    let v = T::from_i64(0).mul_add(&f, &prow[j].1).ok_or(Overflow)?;
                    if self.col_alive[prow[j].0 as usize] {
                        self.col_rows[prow[j].0 as usize].push(t as u32);
                    }
                    merged.push((prow[j].0, v));
                    j += 1;
                } else {
                    let v = old[i].1.mul_add(&f, &prow[j].1).ok_or(Overflow)?;
                    if !v.is_nil() {
                        merged.push((old[i].0, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            self.rows[t] = merged;
            if !self.rhs.is_empty() {
                let v = self.rhs[t].mul_add(&f, &self.rhs[r]).ok_or(Overflow)?;
                self.rhs[t] = v;
            }
        }
        self.rows[r] = prow;
        self.row_alive[r] = false;
        self.col_alive[c] = false;
        self.col_rows[c].clear();
        self.pivots.push((r, c, p));
        Ok(())
    }

    /// Runs unit-pivot elimination to exhaustion.
    pub fn run(&mut self, strategy: PivotStrategy) -> Result<(), Overflow> {
        let ncols = self.col_rows.len();
        loop {
            let before = self.pivots.len();
            match strategy {
                PivotStrategy::FirstAvailable => {
                    for c in 0..ncols {
                        if !self.col_alive[c] {
                            continue;
                        }
                        if self.refresh_column(c) == 0 {
                            continue;
                        }
                        if let Some(r) = self.unit_row(c, true) {
                            self.pivot(r, c)?;
                        }
                    }
                }
                PivotStrategy::Markowitz => {
                    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();
                    for c in 0..ncols {
                        if self.col_alive[c] {
                            let n = self.refresh_column(c);
                            if n > 0 {
                                heap.push(Reverse((n, c)));
                            }
                        }
                    }
                    while let Some(Reverse((n, c))) = heap.pop() {
                        if !self.col_alive[c] {
                            continue;
                        }
                        let now = self.refresh_column(c);
                        if now == 0 {
                            continue;
                        }
                        if now != n {
                            heap.push(Reverse((now, c)));
                            continue;
                        }
                        if let Some(r) = self.unit_row(c, false) {
                            self.pivot(r, c)?;
                        }
                    }
                }
            }
            if self.pivots.len() == before {
                return Ok(());
            }
        }
    }

    /// The un-eliminated part as a dense matrix over its nonempty rows and
    /// columns, with their original indices.
    pub fn remainder(&mut self) -> (Vec<usize>, Vec<usize>, Vec<Vec<BigInt>>) {
        let ncols = self.col_rows.len();
        let cols: Vec<usize> = (0..ncols).filter(|&c| self.col_alive[c] && self.refresh_column(c) > 0).collect();
        let mut col_pos = vec![usize::MAX; ncols];
        for (p, &c) in cols.iter().enumerate() {
            col_pos[c] = p;
        }
        let rows: Vec<usize> = (0..self.rows.len())
            .filter(|&r| self.row_alive[r] && self.rows[r].iter().any(|(c, _)| col_pos[*c as usize] != usize::MAX))
            .collect();
        let dense = rows
            .iter()
            .map(|&r| {
                let mut v = vec![BigInt::zero(); cols.len()];
                for (c, x) in &self.rows[r] {
                    let p = col_pos[*c as usize];
                    if p != usize::MAX {
                        v[p] = x.to_big();
                    }
                }
                v
            })
            .collect();
        (rows, cols, dense)
    }
}

/// Invariant factors with the default strategy.
pub fn snf(a: &SparseMatrix) -> SnfResult {
    snf_with(a, PivotStrategy::default())
}

pub fn snf_with(a: &SparseMatrix, strategy: PivotStrategy) -> SnfResult {
    match snf_generic::<i64>(a, strategy) {
        Ok(r) => r,
        Err(Overflow) => snf_generic::<BigInt>(a, strategy).expect("big integers do not overflow"),
    }
}

fn snf_generic<T: Coeff>(a: &SparseMatrix, strategy: PivotStrategy) -> Result<SnfResult, Overflow> {
    let mut e = Eliminator::<T>::new(a);
    e.run(strategy)?;
    let units = e.pivots.len();
    let (_, _, mut dense) = e.remainder();
    let diag = dense_diagonal(&mut dense, None, None);
    let mut factors = vec![BigInt::one(); units];
    factors.extend(normalize_diagonal(diag));
    Ok(SnfResult { factors, transforms: None })
}

/// Invariant factors together with dense transforms. Meant for small
/// matrices; the work is cubic in the dimensions.
pub fn snf_with_transforms(a: &SparseMatrix) -> SnfResult {
    let dense: Vec<Vec<BigInt>> =
        a.to_dense().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
    let (u, d, v) = dense_snf_transforms(&dense);
    let diag = (0..d.len().min(a.cols())).map(|i| d[i][i].clone()).collect();
    SnfResult { factors: normalize_diagonal(diag), transforms: Some(Transforms { u, d, v }) }
}

/// Turns a diagonal into a divisibility chain of positive factors.
pub fn normalize_diagonal(mut d: Vec<BigInt>) -> Vec<BigInt> {
    d.retain(|x| !x.is_zero());
    for x in d.iter_mut() {
        *x = x.abs();
    }
    let k = d.len();
    for i in 0..k {
        for j in i + 1..k {
            let g = d[i].gcd(&d[j]);
            let l = if g.is_zero() { BigInt::zero() } else { &d[i] / &g * &d[j] };
            d[i] = g;
            d[j] = l;
        }
    }
    d.sort();
    d
}

/// Dense Euclidean diagonalization in place. If `u` (rows × rows) or `v`
/// (cols × cols) are given, they are updated so that `u·A₀·v` is the final
/// matrix. Returns the diagonal entries found (not yet normalized).
pub fn dense_diagonal(
    a: &mut [Vec<BigInt>],
    mut u: Option<&mut Vec<Vec<BigInt>>>,
    mut v: Option<&mut Vec<Vec<BigInt>>>,
) -> Vec<BigInt> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // Smallest nonzero entry of the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        swap_rows(a, t, bi, u.as_deref_mut());
        swap_cols(a, t, bj, v.as_deref_mut());
        loop {
            let mut again = false;
            for i in t + 1..m {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    add_row(a, i, t, &-q, u.as_deref_mut());
                    if !a[i][t].is_zero() {
                        again = true;
                    }
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    add_col(a, j, t, &-q, v.as_deref_mut());
                    if !a[t][j].is_zero() {
                        again = true;
                    }
                }
            }
            if !again {
                break;
            }
            // Move the smallest remainder in row/column t onto the pivot.
            let mut best = (t, t);
            for i in t + 1..m {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.1 == t {
                swap_rows(a, t, best.0, u.as_deref_mut());
            } else {
                swap_cols(a, t, best.1, v.as_deref_mut());
            }
        }
        diag.push(a[t][t].clone());
        t += 1;
    }
    diag
}

fn swap_rows(a: &mut [Vec<BigInt>], i: usize, j: usize, u: Option<&mut Vec<Vec<BigInt>>>) {
    if i != j {
        a.swap(i, j);
        if let Some(u) = u {
            u.swap(i, j);
        }
    }
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize, v: Option<&mut Vec<Vec<BigInt>>>) {
    if i != j {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        if let Some(v) = v {
            for row in v.iter_mut() {
                row.swap(i, j);
            }
        }
    }
}

/// row_i += q·row_j
fn add_row(a: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt, u: Option<&mut Vec<Vec<BigInt>>>) {
    let src = a[j].clone();
    for (x, s) in a[i].iter_mut().zip(&src) {
        if !s.is_zero() {
            *x += q * s;
        }
    }
    if let Some(u) = u {
        let src = u[j].clone();
        for (x, s) in u[i].iter_mut().zip(&src) {
            if !s.is_zero() {
                *x += q * s;
            }
        }
    }
}

/// col_i += q·col_j
fn add_col(a: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt, v: Option<&mut Vec<Vec<BigInt>>>) {
    for row in a.iter_mut() {
        if !row[j].is_zero() {
            let s = row[j].clone();
            row[i] += q * s;
        }
    }
    if let Some(v) = v {
        for row in v.iter_mut() {
            if !row[j].is_zero() {
                let s = row[j].clone();
                row[i] += q * s;
            }
        }
    }
}

/// Dense Smith form with transforms: returns `(U, D, V)` with `U·A·V = D`
/// diagonal and `U`, `V` unimodular. Diagonal entries are not normalized
/// into a divisibility chain.
pub fn dense_snf_transforms(a: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut d = a.to_vec();
    let mut u = identity(m);
    let mut v = identity(n);
    dense_diagonal(&mut d, Some(&mut u), Some(&mut v));
    (u, d, v)
}

pub fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors(rows: &[Vec<i64>]) -> Vec<i64> {
        snf(&SparseMatrix::from_dense(rows)).factors.iter().map(|f| i64::try_from(f).unwrap()).collect()
    }

    fn matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let n = b.first().map_or(0, Vec::len);
        a.iter()
            .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum()).collect())
            .collect()
    }

    #[test]
    fn examples() {
        assert_eq!(factors(&[vec![2, 0], vec![0, 6]]), vec![2, 6]);
        assert_eq!(factors(&[vec![0, 0], vec![0, 0]]), Vec::<i64>::new());
        assert_eq!(factors(&[vec![1, -1], vec![2, 2], vec![0, 5]]), vec![1, 1]);
        assert_eq!(factors(&[vec![1, 2, 0], vec![-1, 2, 5], vec![0, 1, -1]]), vec![1, 1, 9]);
        assert_eq!(factors(&[vec![4, 0], vec![0, 6]]), vec![2, 12]);
        assert_eq!(factors(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), vec![2, 6, 12]);
    }

    #[test]
    fn strategies_agree_and_big_fallback() {
        let a = SparseMatrix::from_dense(&[vec![3, 1, 0, 2], vec![1, 1, 1, 0], vec![0, 2, 4, 6], vec![5, 0, 0, 1]]);
        assert_eq!(snf_with(&a, PivotStrategy::Markowitz), snf_with(&a, PivotStrategy::FirstAvailable));
        let big = SparseMatrix::from_dense(&[
            vec![1, i64::MAX / 2, 0],
            vec![1, 0, i64::MAX / 2],
            vec![1, 7, 0],
        ]);
        assert_eq!(snf(&big).rank(), 3);
    }

    #[test]
    fn transforms_diagonalize() {
        let a: Vec<Vec<BigInt>> = [vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let (u, d, v) = dense_snf_transforms(&a);
        assert_eq!(matmul(&matmul(&u, &a), &v), d);
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert!(i == j || x.is_zero());
            }
        }
    }
}
