//! The fan flow (type 0) and the fence flow (type 1) on a space of
//! Sullivan diagrams.
//!
//! A cell is collapsible of type 0 when a surface starts with an odd fan and
//! every surface attached before it has no degenerate boundary; its partner
//! is the face at that foot-point. Enumerated flavors decide type 0 through
//! the sentence calculus instead. Among the remaining cells, one whose
//! surface (not attached at 0) ends with an odd fence, with every surface
//! ending later of genus zero, is collapsible of type 1 with partner the face
//! just below that endpoint.

use rayon::prelude::*;

use super::sentence::{sentence, SentenceCalculus};
use super::{CellStatus, CellularGraph, MatchedPair, Matching, MorseError};
use crate::complex::enumerate::cofaces;
use crate::complex::ChainComplex;
use crate::diagram::Diagram;

/// A maximal run attached to one surface: a fan starting at its foot-point
/// or a fence ending at its endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Run {
    pub ghost: usize,
    pub position: usize,
    pub length: usize,
}

/// Whether ground position `p` is a fan chamber: a fixed point of `ρ`, or in
/// parametrized flavors a fixed point of `ρ²` with `ρ(p)` a leaf.
fn is_chamber(d: &Diagram, rho: &crate::perm::Permutation, p: usize) -> bool {
    let g = rho.ground_count();
    if d.flavor().is_parametrized() {
        let l = rho.at(p);
        l >= g && rho.at(l) == p
    } else {
        rho.at(p) == p
    }
}

/// The fan at the foot-point of every surface (length 0 if there is none).
pub fn fan_profile(d: &Diagram) -> Vec<Run> {
    let rho = d.rho();
    let n = d.degree();
    d.foot_points()
        .into_iter()
        .enumerate()
        .map(|(ghost, foot)| {
            let length = (foot..=n).take_while(|&p| is_chamber(d, &rho, p)).count();
            Run { ghost, position: foot, length }
        })
        .collect()
}

/// Last ground position of every surface.
pub fn end_points(d: &Diagram) -> Vec<usize> {
    let sym_ghost = d.symbol_ghosts();
    let mut end = vec![0; d.ghosts().len()];
    for p in 0..=d.degree() {
        end[sym_ghost[p]] = p;
    }
    end
}

/// The fence at the endpoint of every surface with positive foot-point.
pub fn fence_profile(d: &Diagram) -> Vec<Run> {
    let lambda = d.lambda();
    let sym_ghost = d.symbol_ghosts();
    let feet = d.foot_points();
    end_points(d)
        .into_iter()
        .enumerate()
        .filter(|&(k, _)| feet[k] > 0)
        .map(|(ghost, end)| {
            // Tubes at end, end−1, … on S, each followed by a further
            // attaching point of S on another boundary cycle.
            let length = (0..end)
                .take_while(|&t| {
                    let p = end - t;
                    lambda.at(p) == p && sym_ghost[p] == ghost && sym_ghost[p - 1] == ghost
                })
                .count();
            Run { ghost, position: end, length }
        })
        .collect()
}

/// Degenerate boundaries per surface: punctures, plus leaf fixed points of
/// `ρ` in the parametrized flavors.
pub fn degenerate_per_surface(d: &Diagram) -> Vec<usize> {
    let mut m: Vec<usize> = d.ghosts().iter().map(|s| s.punctures as usize).collect();
    if d.flavor().is_parametrized() {
        let lambda = d.lambda();
        let sym_ghost = d.symbol_ghosts();
        for l in lambda.ground_count()..lambda.len() {
            if lambda.at(l) == l {
                m[sym_ghost[l]] += 1;
            }
        }
    }
    m
}

/// Degree of degeneracy `(dim, s, m, −l, g, −L)`, compared lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DegenTuple {
    pub dim: usize,
    /// Number of surfaces.
    pub surfaces: usize,
    /// Punctures and degenerate boundaries.
    pub degenerate: usize,
    /// Total length of the fans at the foot-points.
    pub fans: usize,
    /// Genus of the surfaces not attached at 0.
    pub genus: usize,
    /// Total length of the fences of surfaces not attached at 0.
    pub fences: usize,
}

impl DegenTuple {
    pub fn of(d: &Diagram) -> Self {
        let feet = d.foot_points();
        DegenTuple {
            dim: d.degree(),
            surfaces: d.ghosts().len(),
            degenerate: d.degenerate_count(),
            fans: fan_profile(d).iter().map(|r| r.length).sum(),
            genus: d.ghosts().iter().zip(&feet).filter(|(_, &f)| f > 0).map(|(s, _)| s.genus as usize).sum(),
            fences: fence_profile(d).iter().map(|r| r.length).sum(),
        }
    }

    pub fn key(&self) -> (usize, usize, usize, i64, usize, i64) {
        (self.dim, self.surfaces, self.degenerate, -(self.fans as i64), self.genus, -(self.fences as i64))
    }
}

impl PartialOrd for DegenTuple {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DegenTuple {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

/// Type 0 uses fans, type 1 fences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlowKind {
    Fan,
    Fence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Essential,
    /// Matched with `d_face` of this cell.
    Collapsible { face: usize, kind: FlowKind },
    /// `d_face(coface)` is this cell.
    Redundant { coface: Diagram, face: usize, kind: FlowKind },
}

/// Type-0 status read directly off the cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Type0 {
    Collapsible(usize),
    Redundant,
    Neither,
}

fn type0(d: &Diagram) -> Type0 {
    if d.flavor().is_enumerated() {
        return type0_enumerated(d);
    }
    let m = degenerate_per_surface(d);
    for run in fan_profile(d) {
        if run.length % 2 == 1 {
            return if d.degree() > 0 { Type0::Collapsible(run.position) } else { Type0::Neither };
        }
        if m[run.ghost] > 0 {
            return Type0::Redundant;
        }
    }
    Type0::Neither
}

fn type0_enumerated(d: &Diagram) -> Type0 {
    let t = sentence(d);
    let mut calc = SentenceCalculus::new();
    if let Some((j, _)) = calc.j_witness(&t.normalized) {
        return if d.degree() > 0 { Type0::Collapsible(t.positions[j - 1]) } else { Type0::Neither };
    }
    if t.free_letter.is_some() {
        Type0::Redundant
    } else {
        Type0::Neither
    }
}

fn type1(d: &Diagram) -> Option<usize> {
    let mut fences = fence_profile(d);
    fences.sort_by(|a, b| b.position.cmp(&a.position));
    for run in fences {
        if run.length % 2 == 1 {
            return Some(run.position - 1);
        }
        if d.ghosts()[run.ghost].genus > 0 {
            return None;
        }
    }
    None
}

/// The collapsing face of a collapsible cell, or the direct type-0 verdict.
fn raw_status(d: &Diagram) -> (Option<(usize, FlowKind)>, bool) {
    match type0(d) {
        Type0::Collapsible(i) => (Some((i, FlowKind::Fan)), false),
        Type0::Redundant => (None, true),
        Type0::Neither => (type1(d).map(|i| (i, FlowKind::Fence)), false),
    }
}

/// The face a collapsible cell is matched with, if it is collapsible.
pub fn collapsing_face(d: &Diagram) -> Option<(usize, FlowKind)> {
    raw_status(d).0
}

/// Status of a cell under the combined flow. A redundant cell is reported
/// with its collapsible coface.
pub fn classify(d: &Diagram) -> Status {
    if let Some((face, kind)) = collapsing_face(d) {
        return Status::Collapsible { face, kind };
    }
    for c in cofaces(d) {
        if let Some((face, kind)) = collapsing_face(&c) {
            if c.face(face).as_ref() == Ok(d) {
                return Status::Redundant { coface: c, face, kind };
            }
        }
    }
    Status::Essential
}

/// The combined flow on a complex.
#[derive(Debug, Clone)]
pub struct FlowMatching {
    pub graph: CellularGraph,
    pub matching: Matching,
    /// Kind of each pair, aligned with `matching.pairs()`.
    pub kinds: Vec<FlowKind>,
    /// Cells redundant of type 0 by the direct criterion but left unmatched.
    pub orphans: Vec<usize>,
}

impl FlowMatching {
    /// Essential cells by degree.
    pub fn essential_cells(&self, c: &ChainComplex) -> Vec<Vec<Diagram>> {
        let mut out = vec![Vec::new(); c.len()];
        for v in self.matching.essentials() {
            let (k, i) = self.graph.local(v);
            out[k].push(c.basis(k)[i].clone());
        }
        out
    }

    pub fn count(&self, kind: FlowKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }
}

/// Matches every collapsible cell with its face and validates the result:
/// partners exist, pairs are disjoint with coefficient `±1`, and the
/// inverted graph is acyclic.
pub fn build_matching(c: &ChainComplex) -> Result<FlowMatching, MorseError> {
    build(c, true)
}

/// The flow restricted to a sub- or quotient complex: pairs with a cell
/// outside `c` are dropped instead of reported.
pub fn restrict_matching(c: &ChainComplex) -> Result<FlowMatching, MorseError> {
    build(c, false)
}

fn build(c: &ChainComplex, strict: bool) -> Result<FlowMatching, MorseError> {
    let graph = CellularGraph::from_complex(c);
    let raws: Vec<Vec<(Option<(usize, FlowKind)>, bool)>> =
        c.bases().iter().map(|b| b.par_iter().map(raw_status).collect()).collect();
    let mut pairs = Vec::new();
    let mut kinds = Vec::new();
    for (k, level) in raws.iter().enumerate() {
        for (i, (col, _)) in level.iter().enumerate() {
            if let Some((face, kind)) = *col {
                let d = &c.basis(k)[i];
                let missing = || MorseError::MissingFace { cell: d.to_text(), face };
                let r = d.face(face).map_err(|_| missing())?;
                let j = match c.index_of(&r) {
                    Some(j) => j,
                    None if strict => return Err(missing()),
                    None => continue,
                };
                pairs.push(MatchedPair { collapsible: graph.vertex(k, i), redundant: graph.vertex(k - 1, j), face: Some(face) });
                kinds.push(kind);
            }
        }
    }
    let matching = Matching::new(&graph, pairs)?;
    super::check_acyclic(&graph, &matching)?;
    let truncated = c.len() < c.component.top_degree() + 1;
    let mut orphans = Vec::new();
    for (k, level) in raws.iter().enumerate() {
        if truncated && k + 1 == c.len() {
            continue;
        }
        for (i, &(_, redundant)) in level.iter().enumerate() {
            let v = graph.vertex(k, i);
            if redundant && matching.status(v) == CellStatus::Essential {
                orphans.push(v);
            }
        }
    }
    Ok(FlowMatching { graph, matching, kinds, orphans })
}

/// Ordering key of the certificate: the degree of degeneracy, refined in
/// the enumerated flavors by the words of the raw sentence read from the
/// right.
fn certificate_key(d: &Diagram) -> ((usize, usize, usize, i64, usize, i64), Vec<Vec<u8>>) {
    let words = if d.flavor().is_enumerated() {
        sentence(d)
            .raw
            .words()
            .iter()
            .map(|w| {
                w.letters()
                    .iter()
                    .rev()
                    .map(|l| match l {
                        super::sentence::Letter::Num(k) => *k,
                        super::sentence::Letter::Eps => u8::MAX,
                    })
                    .collect()
            })
            .collect()
    } else {
        Vec::new()
    };
    (DegenTuple::of(d).key(), words)
}

/// Checks that the key strictly drops along every step `c ↘ r ↗ c̃` of the
/// inverted graph. Returns the number of steps checked.
pub fn check_certificate(c: &ChainComplex, f: &FlowMatching) -> Result<usize, MorseError> {
    let g = &f.graph;
    let cell = |v: usize| {
        let (k, i) = g.local(v);
        &c.basis(k)[i]
    };
    let collapsibles: Vec<(usize, usize)> = f.matching.pairs().iter().map(|p| (p.collapsible, p.redundant)).collect();
    let counts: Vec<usize> = collapsibles
        .par_iter()
        .map(|&(cv, partner)| {
            let key = certificate_key(cell(cv));
            let mut steps = 0;
            for &(r, _) in g.edges(cv) {
                if r == partner {
                    continue;
                }
                if let CellStatus::Redundant { partner: next } = f.matching.status(r) {
                    steps += 1;
                    if certificate_key(cell(next)) >= key {
                        return Err(MorseError::Certificate(cell(cv).to_text(), cell(r).to_text(), cell(next).to_text()));
                    }
                }
            }
            Ok(steps)
        })
        .collect::<Result<_, _>>()?;
    Ok(counts.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Diagram {
        Diagram::parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    fn zeta(m: usize) -> Diagram {
        let cyc = (0..m).map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
        d(&format!("flavor=unpar-unen; n={}; lambda=({cyc}); S1=(0,0,{{({cyc})}})", m - 1))
    }

    #[test]
    fn zeta_has_one_full_fan() {
        for m in 1..6 {
            assert_eq!(fan_profile(&zeta(m)), vec![Run { ghost: 0, position: 0, length: m }]);
        }
    }

    #[test]
    fn no_rho_fixed_points_means_no_fans() {
        let x = d("flavor=unpar-unen; n=2; lambda=(0 2)(1); S1=(0,0,{(0 2),(1)})");
        assert!(fan_profile(&x).iter().all(|r| r.length == 0));
    }

    #[test]
    fn parametrized_fan() {
        let x = d("flavor=par-enum; n=3; lambda=(0 l4 1 l3 2)(l2)(3 l1); S1=(0,0,{(0 l4 1 l3 2),(l2)}); S2=(0,0,{(3 l1)})");
        assert_eq!(fan_profile(&x), vec![Run { ghost: 0, position: 0, length: 2 }, Run { ghost: 1, position: 3, length: 0 }]);
        assert_eq!(degenerate_per_surface(&x), vec![1, 0]);
    }

    /// A surface attached at 1 by a boundary through 1 and then by tubes at
    /// 2 and 3: a fence of length 2 with endpoint 3.
    #[test]
    fn fence_constructed_from_the_definition() {
        let x = d("flavor=unpar-unen; n=3; lambda=(0)(1)(2)(3); S1=(0,0,{(0)}); S2=(0,0,{(1),(2),(3)})");
        assert_eq!(fence_profile(&x), vec![Run { ghost: 1, position: 3, length: 2 }]);
        // d_2 merges the tubes at 2 and 3: the fence shrinks by exactly one.
        let y = x.face(2).unwrap();
        assert_eq!(y.ghosts()[1].genus, 1);
        assert_eq!(fence_profile(&y), vec![Run { ghost: 1, position: 2, length: 1 }]);
        assert_eq!(x.face(1).unwrap(), y);
    }

    #[test]
    fn surface_attached_once_has_no_fence() {
        let x = d("flavor=unpar-unen; n=2; lambda=(0)(1 2); S1=(0,0,{(0)}); S2=(0,0,{(1 2)})");
        assert_eq!(fence_profile(&x), vec![Run { ghost: 1, position: 2, length: 0 }]);
    }

    #[test]
    fn odd_fan_is_collapsible_at_its_foot() {
        // S2 starts with a fan of length 1 at 1; S1 has no degenerate boundary.
        let x = d("flavor=unpar-unen; n=2; lambda=(0)(1 2); S1=(0,0,{(0)}); S2=(0,1,{(1 2)})");
        let fans = fan_profile(&x);
        assert_eq!(fans[0].length, 0);
        assert_eq!(fans[1], Run { ghost: 1, position: 1, length: 1 });
        assert_eq!(classify(&x), Status::Collapsible { face: 1, kind: FlowKind::Fan });
        let r = x.face(1).unwrap();
        match classify(&r) {
            Status::Redundant { coface, face, kind } => {
                assert_eq!((coface.face(face).unwrap(), kind), (r, FlowKind::Fan));
            }
            s => panic!("{s:?}"),
        }
    }

    /// A suspended cell has the type-0 status of its `d_0` face, except
    /// when that face's fan runs once around the whole circle: suspension
    /// cuts the wrap-around chamber and changes the parity.
    #[test]
    fn suspended_cells_follow_their_d0_face() {
        for m in 3..=5 {
            let c = crate::complex::build_complex(
                crate::complex::Component::new(crate::diagram::Flavor::UnparUnen, 0, m),
                Default::default(),
            )
            .unwrap();
            let kind = |x: &Diagram| match type0(x) {
                Type0::Collapsible(_) => 1,
                Type0::Redundant => 2,
                Type0::Neither => 0,
            };
            let (mut agree, mut wrap) = (0, 0);
            for x in c.bases().iter().flatten().filter(|x| x.is_suspended() && x.degree() > 1) {
                let y = x.face(0).unwrap();
                if fan_profile(&y)[0].length == y.degree() + 1 {
                    wrap += 1;
                    continue;
                }
                assert_eq!(kind(x), kind(&y), "{x}");
                agree += 1;
            }
            assert!(agree > 0 && wrap > 0, "m={m}: {agree} {wrap}");
        }
    }

    #[test]
    fn degen_tuple_orders_lexicographically() {
        let a = DegenTuple { dim: 2, surfaces: 1, degenerate: 1, fans: 1, genus: 0, fences: 0 };
        let b = DegenTuple { fans: 2, ..a };
        assert!(b < a);
        assert!(DegenTuple { degenerate: 0, ..a } < b);
        assert_eq!(DegenTuple::of(&zeta(4)).key(), (3, 1, 0, -4, 0, 0));
    }
}
