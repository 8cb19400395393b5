//! Integral homology of finite chain complexes.
//!
//! `H_k = ker ∂_k / im ∂_{k+1}` is read off from the Smith forms of the
//! boundary matrices: with `r_k = rank ∂_k`, the free rank is
//! `dim C_k − r_k − r_{k+1}` and the torsion is the invariant factors of
//! `∂_{k+1}` greater than one. Torsion is reported in invariant-factor normal
//! form, so `C_2 ⊕ C_6` is `[2, 6]`, never `[2, 2, 3]`.

pub mod snf;
pub mod sparse;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::chain::Chain;
use crate::complex::{ChainComplex, ComplexError};
use snf::{dense_snf_transforms, snf_with, Coeff, Eliminator, Overflow, PivotStrategy};
use sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("the chain is not a cycle")]
    NotACycle,
    #[error("a cell of the chain is not in the complex: {0}")]
    UnknownCell(String),
    #[error("invariant factor {0} does not fit in 64 bits")]
    FactorTooLarge(String),
    #[error("witness coefficient does not fit in 64 bits")]
    WitnessTooLarge,
}

/// `Z^betti ⊕ C_{t_1} ⊕ … ⊕ C_{t_s}` with `t_1 | … | t_s`, all `t_i ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
pub struct HomologyGroup {
    pub betti: usize,
    pub torsion: Vec<u64>,
}

impl HomologyGroup {
    pub fn free(betti: usize) -> Self {
        HomologyGroup { betti, torsion: Vec::new() }
    }

    pub fn new(betti: usize, torsion: &[u64]) -> Self {
        HomologyGroup { betti, torsion: torsion.to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.betti {
            0 => {}
            1 => parts.push("Z".to_string()),
            b => parts.push(format!("Z^{b}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("C{t}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// Parses the [`Display`](fmt::Display) form, e.g. `0`, `Z^2 + C2`, `C3`.
impl FromStr for HomologyGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(HomologyGroup::default());
        }
        let mut g = HomologyGroup::default();
        for part in s.split('+').map(str::trim) {
            if part == "Z" {
                g.betti += 1;
            } else if let Some(b) = part.strip_prefix("Z^") {
                g.betti += b.parse::<usize>().map_err(|e| format!("{part}: {e}"))?;
            } else if let Some(t) = part.strip_prefix('C') {
                let t = t.parse::<u64>().map_err(|e| format!("{part}: {e}"))?;
                if t < 2 {
                    return Err(format!("{part}: cyclic order below 2"));
                }
                g.torsion.push(t);
            } else {
                return Err(format!("unrecognized summand {part:?}"));
            }
        }
        g.torsion.sort_unstable();
        Ok(g)
    }
}

/// Homology from the dimensions of the chain groups and the boundary
/// matrices `∂_k: C_k → C_{k−1}` (`∂_0` is ignored).
pub fn homology_of(
    dims: &[usize],
    boundaries: &[SparseMatrix],
    strategy: PivotStrategy,
) -> Result<Vec<HomologyGroup>, HomologyError> {
    let forms: Vec<_> = boundaries.par_iter().enumerate().map(|(k, b)| (k > 0).then(|| snf_with(b, strategy))).collect();
    let rank = |k: usize| forms.get(k).and_then(|f| f.as_ref()).map_or(0, |f| f.rank());
    (0..dims.len())
        .map(|k| {
            let torsion = match forms.get(k + 1).and_then(|f| f.as_ref()) {
                Some(f) => f
                    .torsion()
                    .iter()
                    .map(|t| t.to_u64().ok_or_else(|| HomologyError::FactorTooLarge(t.to_string())))
                    .collect::<Result<_, _>>()?,
                None => Vec::new(),
            };
            Ok(HomologyGroup { betti: dims[k] - rank(k) - rank(k + 1), torsion })
        })
        .collect()
}

/// Per-degree homology of a complex. Degrees above
/// [`ChainComplex::exact_through`] describe the truncated complex only.
pub fn homology(c: &ChainComplex) -> Result<Vec<HomologyGroup>, HomologyError> {
    homology_with(c, PivotStrategy::default())
}

pub fn homology_with(c: &ChainComplex, strategy: PivotStrategy) -> Result<Vec<HomologyGroup>, HomologyError> {
    c.check_d_squared()?;
    homology_of(&c.counts(), c.boundaries(), strategy)
}

/// Solves `A·y = x` over the integers; `None` if there is no solution.
pub fn solve(a: &SparseMatrix, x: &[i64]) -> Option<Vec<BigInt>> {
    assert_eq!(x.len(), a.rows(), "right-hand side has the wrong length");
    match solve_generic::<i64>(a, x) {
        Ok(y) => y,
        Err(Overflow) => solve_generic::<BigInt>(a, x).expect("big integers do not overflow"),
    }
}

fn solve_generic<T: Coeff>(a: &SparseMatrix, x: &[i64]) -> Result<Option<Vec<BigInt>>, Overflow> {
    let mut e = Eliminator::<T>::with_rhs(a, x);
    e.run(PivotStrategy::Markowitz)?;
    let (rows, cols, dense) = e.remainder();
    let mut y = vec![BigInt::zero(); a.cols()];

    // Live rows outside the remainder are zero and need a zero right side.
    let mut in_rem = vec![false; a.rows()];
    for &r in &rows {
        in_rem[r] = true;
    }
    for r in 0..a.rows() {
        if e.row_alive[r] && !in_rem[r] && !e.rhs[r].is_nil() {
            return Ok(None);
        }
    }

    // Remainder: U·A_R·V = D, so A_R·(V·w) = b iff D·w = U·b.
    if !rows.is_empty() {
        let (u, d, v) = dense_snf_transforms(&dense);
        let b: Vec<BigInt> = rows.iter().map(|&r| e.rhs[r].to_big()).collect();
        let ub: Vec<BigInt> = u.iter().map(|row| row.iter().zip(&b).map(|(p, q)| p * q).sum()).collect();
        let mut w = vec![BigInt::zero(); cols.len()];
        for (i, target) in ub.iter().enumerate() {
            let diag = if i < cols.len() { d[i][i].clone() } else { BigInt::zero() };
            if diag.is_zero() {
                if !target.is_zero() {
                    return Ok(None);
                }
            } else {
                let (q, rem) = target.div_rem(&diag);
                if !rem.is_zero() {
                    return Ok(None);
                }
                w[i] = q;
            }
        }
        for (j, &c) in cols.iter().enumerate() {
            y[c] = v[j].iter().zip(&w).map(|(p, q)| p * q).sum();
        }
    }

    // Back substitution through the unit pivots, last first.
    for (r, c, p) in e.pivots.iter().rev() {
        let mut acc = e.rhs[*r].to_big();
        for (col, val) in e.row(*r) {
            if *col as usize != *c {
                acc -= val.to_big() * &y[*col as usize];
            }
        }
        y[*c] = acc * p.to_big();
    }
    Ok(Some(y))
}

/// Decides whether the cycle `x` bounds in `c`, returning a chain `y` with
/// `∂y = x` when it does.
pub fn is_boundary(x: &Chain, c: &ChainComplex) -> Result<Option<Chain>, HomologyError> {
    let k = x.degree();
    let unknown = || HomologyError::UnknownCell(x.terms().find(|(d, _)| c.index_of(d).is_none()).map(|(d, _)| d.to_text()).unwrap_or_default());
    if x.is_zero() {
        return Ok(Some(Chain::zero(k + 1)));
    }
    let v = c.vector(x).ok_or_else(unknown)?;
    if k > 0 && k < c.len() && c.boundary_matrix(k).mul_vec(&v).iter().any(|&t| t != 0) {
        return Err(HomologyError::NotACycle);
    }
    if k + 1 >= c.len() {
        return Ok(None);
    }
    let a = c.boundary_matrix(k + 1);
    let Some(y) = solve(a, &v) else { return Ok(None) };
    let y: Vec<i64> = y.iter().map(|t| t.to_i64().ok_or(HomologyError::WitnessTooLarge)).collect::<Result<_, _>>()?;
    debug_assert_eq!(a.mul_vec(&y), v);
    Ok(Some(c.chain(k + 1, &y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homology_of_small_complexes() {
        // Circle: one vertex, one edge.
        let h = homology_of(&[1, 1], &[SparseMatrix::zeros(0, 1), SparseMatrix::zeros(1, 1)], PivotStrategy::default()).unwrap();
        assert_eq!(h, vec![HomologyGroup::free(1), HomologyGroup::free(1)]);
        // RP²-like: ∂_2 = 2.
        let h = homology_of(
            &[1, 1, 1],
            &[SparseMatrix::zeros(0, 1), SparseMatrix::zeros(1, 1), SparseMatrix::from_dense(&[vec![2]])],
            PivotStrategy::default(),
        )
        .unwrap();
        assert_eq!(h, vec![HomologyGroup::free(1), HomologyGroup::new(0, &[2]), HomologyGroup::default()]);
        assert_eq!(h[1].to_string(), "C2");
    }

    #[test]
    fn group_text_round_trips() {
        for g in [HomologyGroup::default(), HomologyGroup::free(1), HomologyGroup::new(2, &[2, 6]), HomologyGroup::new(0, &[5])] {
            assert_eq!(g.to_string().parse::<HomologyGroup>().unwrap(), g);
        }
        assert!("Q".parse::<HomologyGroup>().is_err());
        assert!("C1".parse::<HomologyGroup>().is_err());
    }

    #[test]
    fn solve_finds_integral_solutions() {
        let a = SparseMatrix::from_dense(&[vec![2, 0], vec![0, 3], vec![1, 1]]);
        let y = solve(&a, &[4, 3, 3]).unwrap();
        assert_eq!(y, vec![BigInt::from(2), BigInt::from(1)]);
        assert!(solve(&a, &[1, 0, 0]).is_none());
        let b = SparseMatrix::from_dense(&[vec![2, 4], vec![6, 8]]);
        assert!(solve(&b, &[2, 2]).is_some());
        assert!(solve(&b, &[1, 0]).is_none());
    }
}
