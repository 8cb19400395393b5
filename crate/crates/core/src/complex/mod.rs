//! Chain complexes of Sullivan diagrams.
//!
//! A [`ChainComplex`] holds the ordered cell basis of every degree and the
//! sparse boundary matrices between them. Complexes are built by
//! [`build_complex`], restricted or collapsed by [`subcomplex`] and
//! [`quotient`], and persisted with the [`cache`] module.

pub mod cache;
pub mod enumerate;

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::chain::Chain;
use crate::diagram::{Diagram, DiagramError, Flavor};
use crate::homology::sparse::SparseMatrix;

/// Default cap on the number of cells a build may enumerate.
pub const DEFAULT_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("cell budget exceeded: {cells} cells > {budget}")]
    Budget { cells: usize, budget: usize },
    #[error("face {face} of {cell} is not in the basis")]
    Closure { cell: String, face: String },
    #[error("∂∘∂ ≠ 0 in degree {0}")]
    NotChainComplex(usize),
    #[error("cache error: {0}")]
    Cache(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// A component `(flavor, g, m)` of one of the four spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Component {
    pub flavor: Flavor,
    pub g: usize,
    pub m: usize,
}

impl Component {
    pub fn new(flavor: Flavor, g: usize, m: usize) -> Self {
        Component { flavor, g, m }
    }

    /// Euler characteristic `1 − m − 2g` of the thickened surface.
    pub fn euler_char(&self) -> i64 {
        1 - self.m as i64 - 2 * self.g as i64
    }

    /// `−2χ`, plus `m` when parametrized.
    pub fn top_degree(&self) -> usize {
        let t = (-2 * self.euler_char()).max(0) as usize;
        if self.flavor.is_parametrized() {
            t + self.m
        } else {
            t
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} g={} m={}", self.flavor, self.g, self.m)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    /// Stop after this degree; homology is then exact below it.
    pub max_degree: Option<usize>,
    pub budget: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { max_degree: None, budget: DEFAULT_BUDGET }
    }
}

/// Cell bases and boundary matrices of a finite chain complex.
#[derive(Clone, PartialEq, Eq)]
pub struct ChainComplex {
    pub component: Component,
    bases: Vec<Vec<Diagram>>,
    index: Vec<HashMap<Diagram, usize>>,
    /// `boundaries[k]: C_k → C_{k−1}`; `boundaries[0]` has no rows.
    boundaries: Vec<SparseMatrix>,
    /// Largest degree in which the homology of this complex is that of the
    /// full component.
    exact_through: usize,
}

impl fmt::Debug for ChainComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChainComplex({}, counts {:?})", self.component, self.counts())
    }
}

impl ChainComplex {
    /// Assembles a complex from bases and matrices, checking shapes.
    pub fn from_parts(
        component: Component,
        bases: Vec<Vec<Diagram>>,
        boundaries: Vec<SparseMatrix>,
        exact_through: usize,
    ) -> Result<Self, ComplexError> {
        if boundaries.len() != bases.len() {
            return Err(ComplexError::Cache("one boundary matrix per degree expected".into()));
        }
        for (k, b) in boundaries.iter().enumerate() {
            let rows = if k == 0 { 0 } else { bases[k - 1].len() };
            if b.rows() != rows || b.cols() != bases[k].len() {
                return Err(ComplexError::Cache(format!("boundary matrix of degree {k} has the wrong shape")));
            }
        }
        let index = bases
            .iter()
            .map(|b| b.iter().enumerate().map(|(p, d)| (d.clone(), p)).collect())
            .collect();
        Ok(ChainComplex { component, bases, index, boundaries, exact_through })
    }

    /// Number of degrees stored (top degree + 1).
    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.iter().all(Vec::is_empty)
    }

    pub fn basis(&self, k: usize) -> &[Diagram] {
        self.bases.get(k).map_or(&[], |b| b.as_slice())
    }

    pub fn bases(&self) -> &[Vec<Diagram>] {
        &self.bases
    }

    pub fn boundary_matrix(&self, k: usize) -> &SparseMatrix {
        &self.boundaries[k]
    }

    pub fn boundaries(&self) -> &[SparseMatrix] {
        &self.boundaries
    }

    pub fn exact_through(&self) -> usize {
        self.exact_through
    }

    pub fn counts(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    pub fn total_cells(&self) -> usize {
        self.bases.iter().map(Vec::len).sum()
    }

    /// `Σ (−1)^k |C_k|`.
    pub fn euler_char(&self) -> i64 {
        self.bases.iter().enumerate().map(|(k, b)| if k % 2 == 0 { b.len() as i64 } else { -(b.len() as i64) }).sum()
    }

    pub fn index_of(&self, d: &Diagram) -> Option<usize> {
        self.index.get(d.degree()).and_then(|m| m.get(d).copied())
    }

    /// Coordinates of a chain in the basis; `None` if some cell is missing.
    pub fn vector(&self, c: &Chain) -> Option<Vec<i64>> {
        let mut v = vec![0i64; self.basis(c.degree()).len()];
        for (d, k) in c.terms() {
            v[self.index_of(d)?] = k;
        }
        Some(v)
    }

    /// The chain with the given coordinates in degree `k`.
    pub fn chain(&self, k: usize, v: &[i64]) -> Chain {
        Chain::from_terms(k, self.basis(k).iter().zip(v).filter(|(_, &x)| x != 0).map(|(d, &x)| (d.clone(), x)))
    }

    /// Verifies `∂_{k}∘∂_{k+1} = 0` for all `k`.
    pub fn check_d_squared(&self) -> Result<(), ComplexError> {
        for k in 1..self.boundaries.len().saturating_sub(1) {
            if !self.boundaries[k].mul(&self.boundaries[k + 1]).is_zero() {
                return Err(ComplexError::NotChainComplex(k + 1));
            }
        }
        Ok(())
    }
}

/// Enumerates a component and assembles its boundary matrices.
pub fn build_complex(c: Component, opts: BuildOptions) -> Result<ChainComplex, ComplexError> {
    let bases = enumerate::cells_by_degree(c, opts.max_degree, opts.budget)?;
    let top = c.top_degree();
    let exact_through = match opts.max_degree {
        Some(d) if d < top => d.saturating_sub(1),
        _ => top,
    };
    let complex = complex_from_bases(c, bases, exact_through)?;
    complex.check_d_squared()?;
    Ok(complex)
}

/// Boundary matrices for face-closed bases.
pub fn complex_from_bases(
    c: Component,
    bases: Vec<Vec<Diagram>>,
    exact_through: usize,
) -> Result<ChainComplex, ComplexError> {
    let index: Vec<HashMap<&Diagram, usize>> =
        bases.iter().map(|b| b.iter().enumerate().map(|(p, d)| (d, p)).collect()).collect();
    let mut boundaries = vec![SparseMatrix::zeros(0, bases.first().map_or(0, Vec::len))];
    for k in 1..bases.len() {
        let cols: Result<Vec<Vec<(usize, i64)>>, ComplexError> = bases[k]
            .par_iter()
            .map(|d| {
                let mut col = Vec::with_capacity(k + 1);
                for j in 0..=k {
                    let f = d.face_unchecked(j);
                    let r = *index[k - 1].get(&f).ok_or_else(|| ComplexError::Closure {
                        cell: d.to_text(),
                        face: f.to_text(),
                    })?;
                    col.push((r, if j % 2 == 0 { 1 } else { -1 }));
                }
                Ok(col)
            })
            .collect();
        boundaries.push(SparseMatrix::from_columns(bases[k - 1].len(), cols?));
    }
    drop(index);
    ChainComplex::from_parts(c, bases, boundaries, exact_through)
}

/// How a [`SubQuotient`] was formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sub,
    Quotient,
}

/// A sub- or quotient complex with its cells' positions in the parent.
#[derive(Debug, Clone)]
pub struct SubQuotient {
    pub mode: Mode,
    /// Parent indices of the cells kept, per degree.
    pub kept: Vec<Vec<usize>>,
    pub complex: ChainComplex,
}

/// The sub-complex spanned by the cells satisfying `pred`. Fails with a
/// witness when a selected cell has a face outside the selection.
pub fn subcomplex(c: &ChainComplex, pred: impl Fn(&Diagram) -> bool + Sync) -> Result<SubQuotient, ComplexError> {
    let sel: Vec<Vec<bool>> = c.bases.iter().map(|b| b.par_iter().map(&pred).collect()).collect();
    check_closed(c, &sel)?;
    Ok(restrict(c, &sel, Mode::Sub))
}

/// The quotient by the sub-complex spanned by the cells satisfying `pred`.
pub fn quotient(c: &ChainComplex, pred: impl Fn(&Diagram) -> bool + Sync) -> Result<SubQuotient, ComplexError> {
    let sel: Vec<Vec<bool>> = c.bases.iter().map(|b| b.par_iter().map(&pred).collect()).collect();
    check_closed(c, &sel)?;
    let keep: Vec<Vec<bool>> = sel.iter().map(|s| s.iter().map(|&x| !x).collect()).collect();
    Ok(restrict(c, &keep, Mode::Quotient))
}

fn check_closed(c: &ChainComplex, sel: &[Vec<bool>]) -> Result<(), ComplexError> {
    for k in 1..c.bases.len() {
        for (j, col) in c.boundaries[k].columns().iter().enumerate() {
            if sel[k][j] {
                if let Some(&(r, _)) = col.iter().find(|&&(r, _)| !sel[k - 1][r]) {
                    return Err(ComplexError::Closure {
                        cell: c.bases[k][j].to_text(),
                        face: c.bases[k - 1][r].to_text(),
                    });
                }
            }
        }
    }
    Ok(())
}

fn restrict(c: &ChainComplex, keep: &[Vec<bool>], mode: Mode) -> SubQuotient {
    let kept: Vec<Vec<usize>> =
        keep.iter().map(|s| s.iter().enumerate().filter(|(_, &x)| x).map(|(p, _)| p).collect()).collect();
    let bases = kept.iter().enumerate().map(|(k, ix)| ix.iter().map(|&p| c.bases[k][p].clone()).collect()).collect();
    let boundaries = (0..c.bases.len())
        .map(|k| {
            if k == 0 {
                SparseMatrix::zeros(0, kept[0].len())
            } else {
                c.boundaries[k].submatrix(&kept[k - 1], &kept[k])
            }
        })
        .collect();
    let complex = ChainComplex::from_parts(c.component, bases, boundaries, c.exact_through).expect("shapes");
    SubQuotient { mode, kept, complex }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_components_build() {
        let c = build_complex(Component::new(Flavor::UnparUnen, 0, 1), BuildOptions::default()).unwrap();
        assert_eq!(c.counts(), vec![1]);
        let c = build_complex(Component::new(Flavor::UnparUnen, 0, 2), BuildOptions::default()).unwrap();
        assert_eq!(c.euler_char(), 0);
        assert_eq!(c.basis(2).len(), 1);
        assert_eq!(c.basis(2)[0].to_text(), "flavor=unpar-unen; n=2; lambda=(0)(1 2); S1=(0,0,{(0)}); S2=(0,0,{(1 2)})");
    }

    #[test]
    fn empty_selection_gives_zero_complex() {
        let c = build_complex(Component::new(Flavor::UnparUnen, 0, 2), BuildOptions::default()).unwrap();
        let s = subcomplex(&c, |_| false).unwrap();
        assert_eq!(s.complex.total_cells(), 0);
        let q = quotient(&c, |_| false).unwrap();
        assert_eq!(q.complex.counts(), c.counts());
    }
}
