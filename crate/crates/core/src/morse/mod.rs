//! Algebraic discrete Morse theory on cellular graphs, and the fan and fence
//! flows on spaces of Sullivan diagrams.
//!
//! A matching `F` pairs a collapsible cell `c` with a redundant face `r`
//! whose coefficient is a unit. Inverting the matched edges gives the
//! `F`-inverted graph; if it has no oriented loop, the Morse complex on the
//! essential (unmatched) cells, with differential summed over zig-zag paths,
//! is a homotopy retract of the original complex.

pub mod flow;
pub mod sentence;

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::chain::Chain;
use crate::complex::{ChainComplex, ComplexError};
use crate::homology::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorseError {
    #[error("edge {from} → {to} does not drop the degree by one")]
    EdgeDegree { from: usize, to: usize },
    #[error("edge {from} → {to} has zero coefficient")]
    ZeroEdge { from: usize, to: usize },
    #[error("vertex {0} out of range")]
    Vertex(usize),
    #[error("matched pair {collapsible} → {redundant} is not an edge")]
    NotAnEdge { collapsible: usize, redundant: usize },
    #[error("matched pair {collapsible} → {redundant} has non-invertible coefficient {coefficient}")]
    NotInvertible { collapsible: usize, redundant: usize, coefficient: i64 },
    #[error("vertex {0} is matched twice")]
    NotDisjoint(usize),
    #[error("F-inverted graph has an oriented loop through {0:?}")]
    Cycle(Vec<usize>),
    #[error("degree of degeneracy does not drop along {0} ↘ {1} ↗ {2}")]
    Certificate(String, String, String),
    #[error("face {face} of {cell} is not a cell of the complex")]
    MissingFace { cell: String, face: usize },
    #[error("coefficient overflow in the Morse differential")]
    Overflow,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Graded vertices with weighted edges that drop the degree by one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellularGraph {
    /// `offsets[k]` is the first vertex of degree `k`; the last entry is the
    /// vertex count.
    offsets: Vec<usize>,
    /// Outgoing edges `(target, θ)` of each vertex, sorted by target.
    edges: Vec<Vec<(usize, i64)>>,
}

impl CellularGraph {
    /// Vertices are numbered degree by degree; `counts[k]` vertices have
    /// degree `k`.
    pub fn new(counts: &[usize], mut edges: Vec<Vec<(usize, i64)>>) -> Result<Self, MorseError> {
        let mut offsets = vec![0];
        for &c in counts {
            offsets.push(offsets.last().unwrap() + c);
        }
        let total = *offsets.last().unwrap();
        if edges.len() != total {
            return Err(MorseError::Vertex(edges.len()));
        }
        let g = CellularGraph { offsets, edges: Vec::new() };
        for (v, out) in edges.iter_mut().enumerate() {
            out.sort_unstable();
            for &(w, t) in out.iter() {
                if w >= total {
                    return Err(MorseError::Vertex(w));
                }
                if g.degree(v) != g.degree(w) + 1 {
                    return Err(MorseError::EdgeDegree { from: v, to: w });
                }
                if t == 0 {
                    return Err(MorseError::ZeroEdge { from: v, to: w });
                }
            }
        }
        Ok(CellularGraph { edges, ..g })
    }

    /// Vertices are the basis cells, edges the nonzero boundary entries.
    pub fn from_complex(c: &ChainComplex) -> Self {
        let counts = c.counts();
        let mut offsets = vec![0];
        for &n in &counts {
            offsets.push(offsets.last().unwrap() + n);
        }
        let mut edges = Vec::with_capacity(*offsets.last().unwrap());
        for (k, b) in c.boundaries().iter().enumerate() {
            let base = if k == 0 { 0 } else { offsets[k - 1] };
            edges.extend(b.columns().iter().map(|col| col.iter().map(|&(r, t)| (base + r, t)).collect::<Vec<_>>()));
        }
        CellularGraph { offsets, edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn vertex(&self, degree: usize, index: usize) -> usize {
        self.offsets[degree] + index
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets.partition_point(|&o| o <= v) - 1
    }

    /// `(degree, index within degree)`.
    pub fn local(&self, v: usize) -> (usize, usize) {
        let k = self.degree(v);
        (k, v - self.offsets[k])
    }

    pub fn edges(&self, v: usize) -> &[(usize, i64)] {
        &self.edges[v]
    }

    /// `θ(v, w)`, zero if there is no edge.
    pub fn coefficient(&self, v: usize, w: usize) -> i64 {
        self.edges[v].binary_search_by_key(&w, |&(x, _)| x).map_or(0, |p| self.edges[v][p].1)
    }
}

/// Role of a vertex under a matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellStatus {
    Essential,
    Collapsible { partner: usize },
    Redundant { partner: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatchedPair {
    pub collapsible: usize,
    pub redundant: usize,
    /// Face index `i` with `d_i(c) = r`, when known.
    pub face: Option<usize>,
}

/// A validated matching: vertex-disjoint edges with coefficient `±1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    status: Vec<CellStatus>,
    pairs: Vec<MatchedPair>,
}

impl Matching {
    pub fn empty(g: &CellularGraph) -> Self {
        Matching { status: vec![CellStatus::Essential; g.len()], pairs: Vec::new() }
    }

    pub fn new(g: &CellularGraph, pairs: Vec<MatchedPair>) -> Result<Self, MorseError> {
        let mut status = vec![CellStatus::Essential; g.len()];
        for p in &pairs {
            let (c, r) = (p.collapsible, p.redundant);
            if c >= g.len() || r >= g.len() {
                return Err(MorseError::Vertex(c.max(r)));
            }
            let t = g.coefficient(c, r);
            if t == 0 {
                return Err(MorseError::NotAnEdge { collapsible: c, redundant: r });
            }
            if t.abs() != 1 {
                return Err(MorseError::NotInvertible { collapsible: c, redundant: r, coefficient: t });
            }
            for v in [c, r] {
                if status[v] != CellStatus::Essential {
                    return Err(MorseError::NotDisjoint(v));
                }
            }
            status[c] = CellStatus::Collapsible { partner: r };
            status[r] = CellStatus::Redundant { partner: c };
        }
        Ok(Matching { status, pairs })
    }

    pub fn status(&self, v: usize) -> CellStatus {
        self.status[v]
    }

    pub fn pairs(&self) -> &[MatchedPair] {
        &self.pairs
    }

    pub fn is_essential(&self, v: usize) -> bool {
        self.status[v] == CellStatus::Essential
    }

    /// Essential vertices, ascending.
    pub fn essentials(&self) -> Vec<usize> {
        (0..self.status.len()).filter(|&v| self.is_essential(v)).collect()
    }

    /// One line per pair, `degree collapsible redundant face`, with cells
    /// numbered within their degree and pairs sorted.
    pub fn export(&self, g: &CellularGraph) -> String {
        let mut rows: Vec<(usize, usize, usize, Option<usize>)> = self
            .pairs
            .iter()
            .map(|p| {
                let (k, c) = g.local(p.collapsible);
                let (_, r) = g.local(p.redundant);
                (k, c, r, p.face)
            })
            .collect();
        rows.sort_unstable();
        let mut out = String::from("# degree collapsible redundant face\n");
        for (k, c, r, f) in rows {
            let face = f.map_or("-".to_string(), |f| f.to_string());
            let _ = writeln!(out, "{k} {c} {r} {face}");
        }
        out
    }

    /// Successors of `v` in the `F`-inverted graph.
    fn inverted_out<'a>(&'a self, g: &'a CellularGraph, v: usize) -> impl Iterator<Item = usize> + 'a {
        let skip = match self.status[v] {
            CellStatus::Collapsible { partner } => Some(partner),
            _ => None,
        };
        let up = match self.status[v] {
            CellStatus::Redundant { partner } => Some(partner),
            _ => None,
        };
        g.edges(v).iter().map(|&(w, _)| w).filter(move |&w| Some(w) != skip).chain(up)
    }
}

/// Topological order of the `F`-inverted graph, or an oriented loop.
pub fn inverted_order(g: &CellularGraph, f: &Matching) -> Result<Vec<usize>, Vec<usize>> {
    let n = g.len();
    let mut indeg = vec![0usize; n];
    for v in 0..n {
        for w in f.inverted_out(g, v) {
            indeg[w] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = stack.pop() {
        order.push(v);
        for w in f.inverted_out(g, v) {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every leftover vertex has a leftover predecessor; walk back to a repeat.
    let mut pred = vec![usize::MAX; n];
    for v in (0..n).filter(|&v| indeg[v] > 0) {
        for w in f.inverted_out(g, v) {
            if indeg[w] > 0 {
                pred[w] = v;
            }
        }
    }
    let mut seen = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut v = (0..n).find(|&v| indeg[v] > 0).expect("leftover vertex");
    while seen[v] == usize::MAX {
        seen[v] = path.len();
        path.push(v);
        v = pred[v];
    }
    let mut cycle = path[seen[v]..].to_vec();
    cycle.reverse();
    Err(cycle)
}

/// Checks that the `F`-inverted graph has no oriented loop; the error
/// carries one.
pub fn check_acyclic(g: &CellularGraph, f: &Matching) -> Result<(), MorseError> {
    inverted_order(g, f).map(|_| ()).map_err(MorseError::Cycle)
}

/// The Morse complex together with the essential cells it is built on.
#[derive(Debug, Clone)]
pub struct MorseComplex {
    pub complex: ChainComplex,
    /// Basis index in the original complex of each essential cell, by degree.
    pub essential: Vec<Vec<usize>>,
}

/// Sparse vector over vertices.
type Flow = Vec<(usize, i64)>;

fn add_scaled(acc: &mut HashMap<usize, i64>, v: &Flow, k: i64) -> Result<(), MorseError> {
    for &(w, t) in v {
        let e = acc.entry(w).or_insert(0);
        *e = t.checked_mul(k).and_then(|x| e.checked_add(x)).ok_or(MorseError::Overflow)?;
    }
    Ok(())
}

fn finish(acc: HashMap<usize, i64>) -> Flow {
    let mut v: Flow = acc.into_iter().filter(|&(_, t)| t != 0).collect();
    v.sort_unstable();
    v
}

/// Path sums from each collapsible to the essentials one degree lower,
/// over zig-zags `c ↘ r ↗ c̃ ↘ …`, memoized in reverse topological order.
fn collapsible_flows(g: &CellularGraph, f: &Matching, order: &[usize]) -> Result<HashMap<usize, Flow>, MorseError> {
    let mut memo: HashMap<usize, Flow> = HashMap::new();
    for &c in order.iter().rev() {
        if let CellStatus::Collapsible { partner } = f.status(c) {
            let flow = down_flow(g, f, c, Some(partner), &memo)?;
            memo.insert(c, flow);
        }
    }
    Ok(memo)
}

/// `Σ_γ θ_F(γ) t(γ)` over paths from `v` that first step down.
fn down_flow(
    g: &CellularGraph,
    f: &Matching,
    v: usize,
    skip: Option<usize>,
    memo: &HashMap<usize, Flow>,
) -> Result<Flow, MorseError> {
    let mut acc: HashMap<usize, i64> = HashMap::new();
    for &(r, t) in g.edges(v) {
        if Some(r) == skip {
            continue;
        }
        match f.status(r) {
            CellStatus::Essential => add_scaled(&mut acc, &vec![(r, 1)], t)?,
            CellStatus::Redundant { partner } => {
                // θ_F(r, c̃) = −θ(c̃, r)⁻¹ = −θ(c̃, r) for a unit.
                let up = -g.coefficient(partner, r);
                let k = t.checked_mul(up).ok_or(MorseError::Overflow)?;
                add_scaled(&mut acc, &memo[&partner], k)?;
            }
            CellStatus::Collapsible { .. } => {}
        }
    }
    Ok(finish(acc))
}

/// The Morse complex `M(C, F)`.
pub fn morse_complex(c: &ChainComplex, f: &Matching) -> Result<MorseComplex, MorseError> {
    let g = CellularGraph::from_complex(c);
    let order = inverted_order(&g, f).map_err(MorseError::Cycle)?;
    let memo = collapsible_flows(&g, f, &order)?;
    let counts = g.counts();
    let essential: Vec<Vec<usize>> = (0..counts.len())
        .map(|k| (0..counts[k]).filter(|&i| f.is_essential(g.vertex(k, i))).collect())
        .collect();
    let mut boundaries = Vec::with_capacity(counts.len());
    for k in 0..counts.len() {
        let rows = if k == 0 { 0 } else { essential[k - 1].len() };
        if k == 0 {
            boundaries.push(SparseMatrix::zeros(0, essential[0].len()));
            continue;
        }
        let pos: HashMap<usize, usize> =
            essential[k - 1].iter().enumerate().map(|(p, &i)| (g.vertex(k - 1, i), p)).collect();
        let cols = essential[k]
            .par_iter()
            .map(|&i| {
                let flow = down_flow(&g, f, g.vertex(k, i), None, &memo)?;
                Ok(flow.into_iter().map(|(w, t)| (pos[&w], t)).collect())
            })
            .collect::<Result<Vec<_>, MorseError>>()?;
        boundaries.push(SparseMatrix::from_columns(rows, cols));
    }
    let bases = essential.iter().enumerate().map(|(k, e)| e.iter().map(|&i| c.basis(k)[i].clone()).collect()).collect();
    let complex = ChainComplex::from_parts(c.component, bases, boundaries, c.exact_through())?;
    Ok(MorseComplex { complex, essential })
}

/// The inclusion `ι(x) = Σ_γ θ_F(γ) t(γ)` of an essential cell, summed over
/// paths ending in a non-redundant cell of the same degree.
pub fn inclusion(c: &ChainComplex, f: &Matching, x: &crate::diagram::Diagram) -> Result<Chain, MorseError> {
    let g = CellularGraph::from_complex(c);
    let k = x.degree();
    let i = c.index_of(x).ok_or_else(|| MorseError::MissingFace { cell: x.to_text(), face: 0 })?;
    let start = g.vertex(k, i);
    let order = inverted_order(&g, f).map_err(MorseError::Cycle)?;
    let mut rank = vec![0usize; g.len()];
    for (p, &v) in order.iter().enumerate() {
        rank[v] = p;
    }
    // Forward propagation through c ↘ r ↗ c̃ steps, in topological order.
    let mut weight: HashMap<usize, i64> = HashMap::from([(start, 1)]);
    let mut frontier = std::collections::BTreeSet::from([(rank[start], start)]);
    while let Some((_, v)) = frontier.pop_first() {
        let w = weight[&v];
        let skip = match f.status(v) {
            CellStatus::Collapsible { partner } => Some(partner),
            _ => None,
        };
        for &(r, t) in g.edges(v) {
            if Some(r) == skip {
                continue;
            }
            if let CellStatus::Redundant { partner } = f.status(r) {
                let step = t
                    .checked_mul(-g.coefficient(partner, r))
                    .and_then(|s| s.checked_mul(w))
                    .ok_or(MorseError::Overflow)?;
                let e = weight.entry(partner).or_insert(0);
                *e = e.checked_add(step).ok_or(MorseError::Overflow)?;
                frontier.insert((rank[partner], partner));
            }
        }
    }
    Ok(Chain::from_terms(
        k,
        weight.into_iter().filter(|&(_, t)| t != 0).map(|(v, t)| (c.basis(k)[g.local(v).1].clone(), t)),
    ))
}
