//! Column-sparse integer matrices.

/// A `rows × cols` integer matrix stored as sorted columns of
/// `(row, value)` pairs with no explicit zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    rows: usize,
    cols: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols: vec![Vec::new(); cols] }
    }

    /// Builds from columns; entries are sorted and merged, zeros dropped.
    pub fn from_columns(rows: usize, cols: Vec<Vec<(usize, i64)>>) -> Self {
        let cols = cols.into_iter().map(normalize_column).collect();
        let m = SparseMatrix { rows, cols };
        debug_assert!(m.cols.iter().flatten().all(|&(r, _)| r < rows));
        m
    }

    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, i64)]) -> Self {
        let mut c = vec![Vec::new(); cols];
        for &(r, j, v) in triplets {
            assert!(r < rows && j < cols, "triplet out of range");
            c[j].push((r, v));
        }
        Self::from_columns(rows, c)
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut cols = vec![Vec::new(); ncols];
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v != 0 {
                    cols[c].push((r, v));
                }
            }
        }
        SparseMatrix { rows: nrows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<(usize, i64)>] {
        &self.cols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.cols[c].binary_search_by_key(&r, |&(row, _)| row).map_or(0, |p| self.cols[c][p].1)
    }

    pub fn triplets(&self) -> Vec<(usize, usize, i64)> {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
            .collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols = vec![Vec::new(); self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                cols[r].push((c, v));
            }
        }
        SparseMatrix { rows: self.cols.len(), cols }
    }

    /// `self · other`; panics on overflow or shape mismatch.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols(), other.rows, "shape mismatch");
        let cols = other
            .cols
            .iter()
            .map(|col| {
                let mut acc: Vec<(usize, i64)> = Vec::new();
                for &(k, v) in col {
                    for &(r, w) in &self.cols[k] {
                        acc.push((r, v.checked_mul(w).expect("overflow in product")));
                    }
                }
                acc
            })
            .collect();
        Self::from_columns(self.rows, cols)
    }

    /// `self · x` for a dense vector.
    pub fn mul_vec(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.cols());
        let mut y = vec![0i64; self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            if x[c] == 0 {
                continue;
            }
            for &(r, v) in col {
                y[r] = y[r].checked_add(v.checked_mul(x[c]).expect("overflow")).expect("overflow");
            }
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0i64; self.cols()]; self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                d[r][c] = v;
            }
        }
        d
    }

    /// Keeps the listed rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut row_pos = vec![usize::MAX; self.rows];
        for (p, &r) in rows.iter().enumerate() {
            row_pos[r] = p;
        }
        let cols = cols
            .iter()
            .map(|&c| {
                self.cols[c]
                    .iter()
                    .filter(|&&(r, _)| row_pos[r] != usize::MAX)
                    .map(|&(r, v)| (row_pos[r], v))
                    .collect()
            })
            .collect();
        Self::from_columns(rows.len(), cols)
    }
}

fn normalize_column(mut col: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
    col.sort_unstable_by_key(|&(r, _)| r);
    let mut out: Vec<(usize, i64)> = Vec::with_capacity(col.len());
    for (r, v) in col {
        match out.last_mut() {
            Some((lr, lv)) if *lr == r => *lv = lv.checked_add(v).expect("overflow"),
            _ => out.push((r, v)),
        }
    }
    out.retain(|&(_, v)| v != 0);
    out
}
