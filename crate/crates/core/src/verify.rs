//! Consistency checks on built complexes: Euler characteristic and the
//! suspension pairing, vanishing ranges, the Morse flow against direct
//! homology, the stabilization quotient and the splitting along `B_2`.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::chain::Chain;
use crate::complex::{quotient, ChainComplex, ComplexError, Component};
use crate::diagram::{Diagram, Flavor};
use crate::homology::sparse::SparseMatrix;
use crate::homology::{homology, solve, HomologyError, HomologyGroup};
use crate::morse::flow::{build_matching, check_certificate, restrict_matching, FlowKind, FlowMatching};
use crate::morse::{check_acyclic, inverted_order, morse_complex, MorseComplex, MorseError};
use crate::ops::maps::in_stabilization_image;
use crate::ops::OpsError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Ops(#[from] OpsError),
}

/// One named pass/fail outcome with a human-readable detail or witness.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }
}

/// Reduced homology: `H_0` loses one free summand.
pub fn reduced(h: &[HomologyGroup]) -> Vec<HomologyGroup> {
    let mut r = h.to_vec();
    if let Some(h0) = r.first_mut() {
        h0.betti = h0.betti.saturating_sub(1);
    }
    r
}

/// Largest degree through which reduced homology is known to vanish:
/// `m − 2` for the enumerated flavors and the largest even number below `m`
/// otherwise.
pub fn vanishing_bound(c: Component) -> Option<usize> {
    if c.flavor.is_enumerated() {
        c.m.checked_sub(2)
    } else {
        c.m.checked_sub(if c.m % 2 == 1 { 1 } else { 2 })
    }
}

/// Reduced homology vanishes through `bound` (capped at the exact range).
pub fn check_vanishing(c: &ChainComplex, h: &[HomologyGroup], bound: Option<usize>) -> Check {
    let name = format!("vanishing {}", c.component);
    let Some(bound) = bound else { return Check::new(name, true, "no range") };
    let top = bound.min(c.exact_through()).min(h.len().saturating_sub(1));
    let r = reduced(h);
    match (0..=top).find(|&k| !r[k].is_zero()) {
        Some(k) => Check::new(name, false, format!("reduced H_{k} = {}", r[k])),
        None => Check::new(name, true, format!("reduced H_k = 0 for k ≤ {top}")),
    }
}

pub fn check_d_squared(c: &ChainComplex) -> Check {
    let name = format!("d² = 0 {}", c.component);
    match c.check_d_squared() {
        Ok(()) => Check::new(name, true, ""),
        Err(e) => Check::new(name, false, e.to_string()),
    }
}

/// `χ = 0`, except for `SD_0^1` which is a single cell.
pub fn check_euler(c: &ChainComplex) -> Check {
    let name = format!("χ {}", c.component);
    let comp = c.component;
    if c.exact_through() + 1 < c.len() || c.len() < comp.top_degree() + 1 {
        return Check::new(name, true, "truncated, not checked");
    }
    let chi = c.euler_char();
    let single = comp == Component::new(Flavor::UnparUnen, 0, 1);
    let pass = if single { chi == 1 && c.total_cells() == 1 } else { chi == 0 };
    Check::new(name, pass, format!("χ = {chi}, cells {:?}", c.counts()))
}

/// `Ψ` maps the unsuspended cells of each degree bijectively onto the
/// suspended cells one degree up.
pub fn check_suspension(c: &ChainComplex) -> Check {
    let name = format!("Ψ bijection {}", c.component);
    let single = c.component == Component::new(Flavor::UnparUnen, 0, 1);
    for k in 0..c.len() {
        let suspended = c.basis(k).iter().filter(|d| d.is_suspended()).count();
        let below: Vec<&Diagram> =
            if k == 0 { Vec::new() } else { c.basis(k - 1).iter().filter(|d| !d.is_suspended()).collect() };
        if k == 0 {
            if suspended != usize::from(single) {
                return Check::new(name, false, format!("{suspended} suspended cells in degree 0"));
            }
            continue;
        }
        let mut images = HashSet::new();
        for d in &below {
            let s = match d.suspend() {
                Ok(s) => s,
                Err(e) => return Check::new(name, false, format!("{}: {e}", d.to_text())),
            };
            if !s.is_suspended() || c.index_of(&s).is_none() || s.face(0).ok().as_ref() != Some(*d) {
                return Check::new(name, false, format!("Ψ({}) = {}", d.to_text(), s.to_text()));
            }
            images.insert(s);
        }
        if images.len() != below.len() || images.len() != suspended {
            return Check::new(
                name,
                false,
                format!("degree {k}: {} unsuspended below, {} images, {suspended} suspended", below.len(), images.len()),
            );
        }
    }
    Check::new(name, true, "")
}

/// The flow on a complex checked against itself and against direct homology.
#[derive(Debug, Clone)]
pub struct MorseReport {
    pub fans: usize,
    pub fences: usize,
    /// Essential cells by degree.
    pub essentials: Vec<usize>,
    /// Topological-sort certificate.
    pub acyclic: bool,
    /// Degree-of-degeneracy certificate; the number of steps checked.
    pub certificate: Result<usize, String>,
    pub orphans: usize,
    /// Essential cells of positive degree with degenerate boundary.
    pub degenerate_essentials: Vec<String>,
    pub morse_homology: Vec<HomologyGroup>,
    pub homology_agrees: bool,
}

impl MorseReport {
    pub fn pass(&self) -> bool {
        self.acyclic
            && self.certificate.is_ok()
            && self.orphans == 0
            && self.degenerate_essentials.is_empty()
            && self.homology_agrees
    }
}

fn essential_counts(c: &ChainComplex, f: &FlowMatching) -> Vec<usize> {
    f.essential_cells(c).iter().map(Vec::len).collect()
}

pub fn morse_report(c: &ChainComplex, h: &[HomologyGroup]) -> Result<MorseReport, VerifyError> {
    let fm = build_matching(c)?;
    let acyclic = check_acyclic(&fm.graph, &fm.matching).is_ok() && inverted_order(&fm.graph, &fm.matching).is_ok();
    let certificate = check_certificate(c, &fm).map_err(|e| e.to_string());
    let top = c.exact_through();
    let degenerate_essentials = fm
        .essential_cells(c)
        .iter()
        .enumerate()
        .filter(|&(k, _)| k > 0 && k <= top)
        .flat_map(|(_, cells)| cells.iter().filter(|d| d.degenerate_count() > 0).map(Diagram::to_text))
        .collect();
    let mc: MorseComplex = morse_complex(c, &fm.matching)?;
    let morse_homology = homology(&mc.complex)?;
    let upto = top.min(h.len().saturating_sub(1));
    let homology_agrees = morse_homology.len() == h.len() && (0..=upto).all(|k| morse_homology[k] == h[k]);
    Ok(MorseReport {
        fans: fm.count(FlowKind::Fan),
        fences: fm.count(FlowKind::Fence),
        essentials: essential_counts(c, &fm),
        acyclic,
        certificate,
        orphans: fm.orphans.len(),
        degenerate_essentials,
        morse_homology,
        homology_agrees,
    })
}

/// The quotient by the image of stabilization with the restricted flow.
#[derive(Debug, Clone)]
pub struct StabilizationReport {
    pub cells: Vec<usize>,
    pub essentials: Vec<usize>,
    pub homology: Vec<HomologyGroup>,
    pub exact_through: usize,
}

impl StabilizationReport {
    /// Lowest degree carrying an essential cell.
    pub fn lowest_essential(&self) -> Option<usize> {
        self.essentials.iter().position(|&e| e > 0)
    }

    /// Homology vanishes through `k` (within the exact range).
    pub fn vanishes_through(&self, k: usize) -> bool {
        (0..=k.min(self.exact_through)).all(|j| self.homology.get(j).is_none_or(HomologyGroup::is_zero))
    }
}

pub fn stabilization_report(c: &ChainComplex) -> Result<StabilizationReport, VerifyError> {
    let q = quotient(c, in_stabilization_image)?;
    let fq = restrict_matching(&q.complex)?;
    let essentials = essential_counts(&q.complex, &fq);
    Ok(StabilizationReport {
        cells: q.complex.counts(),
        essentials,
        homology: homology(&q.complex)?,
        exact_through: q.complex.exact_through(),
    })
}

/// The flow on `SD` against the restricted flow on `SD/B_2`, in positive
/// degrees. The degree-0 cell has `m − 1` punctures, so for `m ≥ 3` the
/// class of a point dies in the quotient; `point_survives` records this.
#[derive(Debug, Clone)]
pub struct SplittingReport {
    pub essentials: Vec<usize>,
    pub quotient_essentials: Vec<usize>,
    pub point_survives: bool,
    /// Every essential cell of `SD` of positive degree is essential in the
    /// quotient.
    pub contained: bool,
    /// The two Morse differentials agree on the essentials of `SD`.
    pub differentials_agree: bool,
    /// Essentials of the quotient not coming from `SD` are degenerate.
    pub extra_degenerate: bool,
    /// Discarding the extra essentials is a chain map.
    pub projection_chain_map: bool,
    pub homology: Vec<HomologyGroup>,
    pub quotient_homology: Vec<HomologyGroup>,
}

impl SplittingReport {
    pub fn pass(&self) -> bool {
        self.contained && self.differentials_agree && self.extra_degenerate && self.projection_chain_map
    }
}

pub fn splitting_report(c: &ChainComplex) -> Result<SplittingReport, VerifyError> {
    let fm = build_matching(c)?;
    let m = morse_complex(c, &fm.matching)?;
    let q = quotient(c, |d| d.degenerate_count() >= 2)?;
    let fq = restrict_matching(&q.complex)?;
    let mq = morse_complex(&q.complex, &fq.matching)?;
    let (mc, qc) = (&m.complex, &mq.complex);
    let mut contained = true;
    let mut differentials_agree = true;
    let mut extra_degenerate = true;
    let mut projection_chain_map = true;
    for k in 0..mc.len() {
        let pos: Vec<Option<usize>> = mc.basis(k).iter().map(|d| qc.index_of(d)).collect();
        if k > 0 {
            contained &= pos.iter().all(Option::is_some);
        }
        let from_sd: HashSet<usize> = pos.iter().flatten().copied().collect();
        for (j, d) in qc.basis(k).iter().enumerate() {
            if !from_sd.contains(&j) && d.degenerate_count() == 0 {
                extra_degenerate = false;
            }
        }
        if k == 0 {
            continue;
        }
        let below: HashMap<usize, usize> =
            mc.basis(k - 1).iter().enumerate().filter_map(|(i, d)| qc.index_of(d).map(|p| (p, i))).collect();
        for (j, d) in qc.basis(k).iter().enumerate() {
            let col = qc.boundary_matrix(k).column(j);
            match mc.index_of(d) {
                Some(i) => {
                    let mut lhs: Vec<(usize, i64)> = Vec::new();
                    for &(r, v) in col {
                        match below.get(&r) {
                            Some(&s) => lhs.push((s, v)),
                            None => differentials_agree = false,
                        }
                    }
                    lhs.sort_unstable();
                    let mut rhs = mc.boundary_matrix(k).column(i).to_vec();
                    rhs.sort_unstable();
                    differentials_agree &= lhs == rhs;
                }
                None => projection_chain_map &= col.iter().all(|(r, _)| !below.contains_key(r)),
            }
        }
    }
    Ok(SplittingReport {
        essentials: m.essential.iter().map(Vec::len).collect(),
        quotient_essentials: mq.essential.iter().map(Vec::len).collect(),
        point_survives: mc.basis(0).iter().all(|d| qc.index_of(d).is_some()),
        contained,
        differentials_agree,
        extra_degenerate,
        projection_chain_map,
        homology: homology(mc)?,
        quotient_homology: homology(qc)?,
    })
}

/// Whether some integral cocycle takes the value 1 on the cycle `x`, i.e.
/// `x` spans a direct summand of the free part of homology. Solves
/// `φ·∂ = 0, φ·x = 1` for `φ`.
pub fn is_primitive(c: &ChainComplex, x: &Chain) -> Result<bool, HomologyError> {
    let k = x.degree();
    let v = c.vector(x).ok_or_else(|| HomologyError::UnknownCell(x.terms().map(|(d, _)| d.to_text()).next().unwrap_or_default()))?;
    let mut t: Vec<(usize, usize, i64)> = Vec::new();
    let rows = if k + 1 < c.len() {
        t.extend(c.boundary_matrix(k + 1).triplets().into_iter().map(|(r, j, a)| (j, r, a)));
        c.basis(k + 1).len()
    } else {
        0
    };
    t.extend(v.iter().enumerate().filter(|(_, &a)| a != 0).map(|(j, &a)| (rows, j, a)));
    let a = SparseMatrix::from_triplets(rows + 1, c.basis(k).len(), &t);
    let mut rhs = vec![0; rows + 1];
    rhs[rows] = 1;
    Ok(solve(&a, &rhs).is_some())
}

/// The standard checks on one complex with its homology.
pub fn component_checks(c: &ChainComplex, h: &[HomologyGroup]) -> Result<Vec<Check>, VerifyError> {
    let mut out = vec![check_d_squared(c), check_euler(c), check_suspension(c)];
    out.push(check_vanishing(c, h, vanishing_bound(c.component)));
    let r = morse_report(c, h)?;
    let name = |s: &str| format!("{s} {}", c.component);
    out.push(Check::new(
        name("morse acyclic"),
        r.acyclic && r.certificate.is_ok(),
        format!("topological sort {}, degeneracy descent {:?}", r.acyclic, r.certificate),
    ));
    out.push(Check::new(
        name("morse degenerate matched"),
        r.degenerate_essentials.is_empty() && r.orphans == 0,
        r.degenerate_essentials.first().cloned().unwrap_or_else(|| format!("orphans {}", r.orphans)),
    ));
    out.push(Check::new(
        name("morse homology"),
        r.homology_agrees,
        format!("essentials {:?}", r.essentials),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_complex, BuildOptions};

    fn cells(f: Flavor, g: usize, m: usize) -> ChainComplex {
        build_complex(Component::new(f, g, m), BuildOptions::default()).unwrap()
    }

    #[test]
    fn bounds() {
        let b = |f, m| vanishing_bound(Component::new(f, 0, m));
        assert_eq!(b(Flavor::UnparUnen, 1), Some(0));
        assert_eq!(b(Flavor::UnparUnen, 4), Some(2));
        assert_eq!(b(Flavor::ParUnen, 5), Some(4));
        assert_eq!(b(Flavor::ParEnum, 1), None);
        assert_eq!(b(Flavor::UnparEnum, 4), Some(2));
    }

    #[test]
    fn checks_pass_on_small_components() {
        for (f, g, m) in [(Flavor::UnparUnen, 0, 1), (Flavor::UnparUnen, 0, 3), (Flavor::ParEnum, 0, 2), (Flavor::UnparUnen, 1, 1)] {
            let c = cells(f, g, m);
            let h = homology(&c).unwrap();
            for check in component_checks(&c, &h).unwrap() {
                assert!(check.pass, "{check:?}");
            }
        }
    }

    #[test]
    fn splitting_on_small_components() {
        for m in 1..=3 {
            let r = splitting_report(&cells(Flavor::UnparUnen, 0, m)).unwrap();
            assert!(r.pass(), "{r:?}");
            assert_eq!(r.point_survives, m <= 2);
            for k in 1..r.homology.len() {
                assert!(r.homology[k].betti <= r.quotient_homology[k].betti);
            }
        }
    }
}
