//! Stabilization, the forgetful maps between flavors, and the transfer.
//!
//! ```text
//!   SD̃_{g,m} --ϑ̃--> SD̃_g^m
//!      |ω̂            |ω
//!   SD_{g,m}  --ϑ-->  SD_g^m
//! ```

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::{expect_flavor, OpsError};
use crate::chain::Chain;
use crate::complex::ChainComplex;
use crate::diagram::{Diagram, DiagramError, Flavor};
use crate::perm::{next_permutation, rho_from_lambda, Permutation, Symbol};

/// Raises the genus of the ghost at foot-point 0 by one.
pub fn stabilize(d: &Diagram) -> Diagram {
    let mut s = d.clone();
    s.ghosts_mut()[0].genus += 1;
    s
}

pub fn stabilize_chain(c: &Chain) -> Chain {
    c.map(c.degree(), |d| Chain::from_diagram(stabilize(d)))
}

/// Whether `d` lies in the image of [`stabilize`].
pub fn in_stabilization_image(d: &Diagram) -> bool {
    d.ghosts()[0].genus > 0
}

/// `ω` and `ω̂`: forgets the enumeration.
pub fn forget_enumeration(d: &Diagram) -> Result<Diagram, OpsError> {
    expect_flavor(d.flavor(), &[Flavor::UnparEnum, Flavor::ParEnum])?;
    Ok(d.with_flavor(d.flavor().unenumerated()))
}

/// `ϑ` and `ϑ̃`: deletes the leaves. A lone leaf becomes a puncture of its
/// ghost; a cell with a leaf hanging off the admissible circle at a
/// position other than 0 maps to zero. In the enumerated flavor a boundary
/// inherits the index of its leaf.
pub fn forget_leaves(d: &Diagram) -> Result<Option<Diagram>, OpsError> {
    expect_flavor(d.flavor(), &[Flavor::ParUnen, Flavor::ParEnum])?;
    let lambda = d.lambda();
    let g = lambda.ground_count();
    let enumerated = d.flavor().is_enumerated();
    let mut ghosts = Vec::new();
    let mut beta2 = Vec::new();
    let mut kept = Vec::new();
    for (k, s) in d.ghosts().iter().enumerate() {
        let cycles = d.ghost_cycles(k);
        if s.genus == 0 && s.punctures == 0 && cycles.len() == 1 {
            let c = &cycles[0];
            if c.len() == 2 && c[0] != 0 && c[0] < g && c[1] >= g {
                return Ok(None);
            }
        }
        let mut punctures = s.punctures;
        let mut ground_cycles = Vec::new();
        for c in cycles {
            let ground: Vec<Symbol> = c.iter().filter(|&&x| x < g).map(|&x| Symbol::Ground(x)).collect();
            if ground.is_empty() {
                punctures += 1;
                beta2.push(((c[0] - g + 1) as u8, k));
            } else {
                kept.push(ground.clone());
                ground_cycles.push(ground);
            }
        }
        ghosts.push((s.genus, punctures, ground_cycles));
    }
    let new_lambda = Permutation::from_cycles(g, 0, &kept).map_err(DiagramError::from)?;
    let (flavor, beta1) = if enumerated {
        let old_rho = d.rho();
        let (ids, _) = old_rho.cycle_ids();
        let leaf_of: HashMap<usize, u8> = (g..lambda.len()).map(|l| (ids[l], (l - g + 1) as u8)).collect();
        let rho = rho_from_lambda(&new_lambda, d.degree()).map_err(DiagramError::from)?;
        let beta1: Vec<(Vec<Symbol>, u8)> = rho
            .cycle_indices()
            .into_iter()
            .map(|c| (c.iter().map(|&x| Symbol::Ground(x)).collect(), leaf_of[&ids[c[0]]]))
            .collect();
        (Flavor::UnparEnum, beta1)
    } else {
        beta2.clear();
        (Flavor::UnparUnen, Vec::new())
    };
    Ok(Some(Diagram::new(flavor, new_lambda, &ghosts, &beta1, &beta2)?))
}

/// Chain-level [`forget_leaves`].
pub fn forget_leaves_chain(c: &Chain) -> Result<Chain, OpsError> {
    let mut out = Chain::zero(c.degree());
    for (d, k) in c.terms() {
        if let Some(e) = forget_leaves(d)? {
            out.add_term(e, k);
        }
    }
    Ok(out)
}

/// Chain-level [`forget_enumeration`].
pub fn forget_enumeration_chain(c: &Chain) -> Result<Chain, OpsError> {
    let mut out = Chain::zero(c.degree());
    for (d, k) in c.terms() {
        out.add_term(forget_enumeration(d)?, k);
    }
    Ok(out)
}

/// The distinct enumerated cells over an unenumerated cell, sorted.
pub fn transfer_preimages(d: &Diagram) -> Result<Vec<Diagram>, OpsError> {
    expect_flavor(d.flavor(), &[Flavor::UnparUnen, Flavor::ParUnen])?;
    let mut out = BTreeSet::new();
    if d.flavor() == Flavor::UnparUnen {
        let r = d.rho().cycle_count();
        let m = d.incoming();
        let mut sigma: Vec<u8> = (1..=m as u8).collect();
        loop {
            let beta1 = sigma[..r].to_vec();
            let mut rest = sigma[r..].iter();
            let labels = d.ghosts().iter().map(|s| rest.by_ref().take(s.punctures as usize).copied().collect()).collect();
            out.insert(d.with_enumeration(beta1, labels));
            if !next_permutation(&mut sigma) {
                break;
            }
        }
    } else {
        let base = d.with_flavor(Flavor::ParEnum);
        let g = d.lambda().ground_count();
        let size = d.lambda().len();
        let mut sigma: Vec<usize> = (g..size).collect();
        loop {
            let new_of: Vec<usize> = (0..g).chain(sigma.iter().copied()).collect();
            out.insert(base.relabel_leaves(&new_of));
            if !next_permutation(&mut sigma) {
                break;
            }
        }
    }
    debug_assert!(out.iter().all(|e| e.validate().is_ok()));
    Ok(out.into_iter().collect())
}

/// `tr`: each cell goes to the sum of its preimages.
pub fn transfer(c: &Chain) -> Result<Chain, OpsError> {
    let mut out = Chain::zero(c.degree());
    for (d, k) in c.terms() {
        for e in transfer_preimages(d)? {
            out.add_term(e, k);
        }
    }
    Ok(out)
}

/// Outcome of checking `tr` between two quotient complexes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferCheck {
    /// `m!`
    pub sheets: usize,
    pub cells: usize,
    /// `∂̃∘tr = tr∘∂` on every cell.
    pub chain_map: bool,
    /// `P∘tr = m!·id` on every cell.
    pub section: bool,
    /// First cell where a check failed.
    pub witness: Option<String>,
    /// An enumerated cell with `tr(P(σ̃)) ≠ m!·σ̃`.
    pub asymmetry: Option<String>,
}

/// Checks the transfer from the quotient `unen` of an unenumerated component
/// to the quotient `en` of its enumerated cover, with the same cells
/// discarded on both sides.
pub fn check_transfer(unen: &ChainComplex, en: &ChainComplex) -> Result<TransferCheck, OpsError> {
    let m = unen.bases().iter().flatten().chain(en.bases().iter().flatten()).next().map_or(0, Diagram::incoming);
    let sheets: usize = (1..=m).product();
    let mut check = TransferCheck {
        sheets,
        cells: unen.total_cells(),
        chain_map: true,
        section: true,
        witness: None,
        asymmetry: None,
    };
    let in_en = |d: &Diagram| en.index_of(d);
    // Images of every cell, as index vectors in `en` (cells outside it are zero there).
    let images: Vec<Vec<Result<Vec<usize>, OpsError>>> = (0..unen.len())
        .map(|k| {
            unen.basis(k)
                .par_iter()
                .map(|d| Ok(transfer_preimages(d)?.iter().filter_map(in_en).collect()))
                .collect()
        })
        .collect();
    let fail = |check: &mut TransferCheck, which: fn(&mut TransferCheck), d: &Diagram| {
        which(check);
        if check.witness.is_none() {
            check.witness = Some(d.to_text());
        }
    };
    for k in 0..unen.len() {
        for (j, d) in unen.basis(k).iter().enumerate() {
            let img = images[k][j].as_ref().map_err(Clone::clone)?;
            let back: Vec<Diagram> =
                img.iter().map(|&p| forget_enumeration(&en.basis(k)[p])).collect::<Result<_, _>>()?;
            if img.len() != sheets || back.iter().any(|b| b != d) {
                fail(&mut check, |c| c.section = false, d);
            }
            if k == 0 || k >= en.len() {
                continue;
            }
            let mut lhs: HashMap<usize, i64> = HashMap::new();
            for &p in img {
                for &(r, v) in en.boundary_matrix(k).column(p) {
                    *lhs.entry(r).or_default() += v;
                }
            }
            let mut rhs: HashMap<usize, i64> = HashMap::new();
            for &(r, v) in unen.boundary_matrix(k).column(j) {
                for q in images[k - 1][r].as_ref().map_err(Clone::clone)? {
                    *rhs.entry(*q).or_default() += v;
                }
            }
            lhs.retain(|_, v| *v != 0);
            rhs.retain(|_, v| *v != 0);
            if lhs != rhs {
                fail(&mut check, |c| c.chain_map = false, d);
            }
        }
    }
    if sheets > 1 {
        check.asymmetry = en.bases().iter().flatten().next().map(Diagram::to_text);
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_complex, quotient, BuildOptions, Component};
    use crate::ops::classes::zeta;

    fn cells(f: Flavor, g: usize, m: usize) -> ChainComplex {
        build_complex(Component::new(f, g, m), BuildOptions::default()).unwrap()
    }

    #[test]
    fn stabilization_commutes_with_faces() {
        for (f, m) in [(Flavor::UnparUnen, 3), (Flavor::UnparEnum, 3), (Flavor::ParEnum, 2), (Flavor::ParUnen, 2)] {
            let c = cells(f, 0, m);
            for d in c.bases().iter().flatten().filter(|d| d.degree() > 0) {
                let s = stabilize(d);
                s.validate().unwrap();
                assert_eq!(s.top_type().unwrap().genus, 1);
                for i in 0..=d.degree() {
                    assert_eq!(s.face(i).unwrap(), stabilize(&d.face(i).unwrap()), "{} at {i}", d.to_text());
                }
            }
        }
    }

    #[test]
    fn stabilization_image_is_positive_genus_at_zero() {
        let small: BTreeSet<Diagram> = cells(Flavor::UnparUnen, 0, 3).bases().iter().flatten().map(stabilize).collect();
        for d in cells(Flavor::UnparUnen, 1, 3).bases().iter().flatten() {
            assert_eq!(small.contains(d), in_stabilization_image(d), "{}", d.to_text());
        }
    }

    #[test]
    fn forgetful_maps_are_chain_maps() {
        for (f, g, m) in [(Flavor::ParEnum, 0, 3), (Flavor::ParUnen, 0, 3), (Flavor::ParEnum, 1, 1)] {
            for d in cells(f, g, m).bases().iter().flatten().filter(|d| d.degree() > 0) {
                let x = Chain::from_diagram(d.clone());
                let lhs = forget_leaves_chain(&x.boundary()).unwrap();
                let rhs = forget_leaves_chain(&x).unwrap().boundary();
                assert_eq!(lhs, rhs, "ϑ at {}", d.to_text());
                if f.is_enumerated() {
                    let lhs = forget_enumeration_chain(&x.boundary()).unwrap();
                    let rhs = forget_enumeration_chain(&x).unwrap().boundary();
                    assert_eq!(lhs, rhs, "ω̂ at {}", d.to_text());
                }
            }
        }
        for d in cells(Flavor::UnparEnum, 0, 3).bases().iter().flatten().filter(|d| d.degree() > 0) {
            let x = Chain::from_diagram(d.clone());
            assert_eq!(
                forget_enumeration_chain(&x.boundary()).unwrap(),
                forget_enumeration_chain(&x).unwrap().boundary()
            );
        }
    }

    #[test]
    fn forget_leaves_lands_in_the_right_component() {
        for d in cells(Flavor::ParEnum, 0, 3).bases().iter().flatten() {
            if let Some(e) = forget_leaves(d).unwrap() {
                assert_eq!(e.flavor(), Flavor::UnparEnum);
                e.validate_in(0, 3).unwrap();
            }
        }
    }

    #[test]
    fn leaf_off_zero_is_killed() {
        let d = Diagram::parse("flavor=par-unen; n=1; lambda=(0)(1 l1); S1=(0,0,{(0)}); S2=(0,0,{(1 l1)})").unwrap();
        assert_eq!(forget_leaves(&d).unwrap(), None);
        let c = Chain::from_diagram(d);
        assert!(forget_leaves_chain(&c.boundary()).unwrap().is_zero());
    }

    #[test]
    fn forgetting_leaves_of_zeta() {
        for m in 1..=4 {
            let z = forget_leaves(&zeta(m, Flavor::ParEnum).unwrap()).unwrap().unwrap();
            assert_eq!(z, zeta(m, Flavor::UnparEnum).unwrap());
            let z = forget_leaves(&zeta(m, Flavor::ParUnen).unwrap()).unwrap().unwrap();
            assert_eq!(z, zeta(m, Flavor::UnparUnen).unwrap());
        }
    }

    #[test]
    fn preimages_cover_the_enumerated_complex() {
        for (f, g, m) in [(Flavor::UnparUnen, 0, 3), (Flavor::UnparUnen, 1, 2), (Flavor::ParUnen, 0, 2)] {
            let unen = cells(f, g, m);
            let en = cells(if f.is_parametrized() { Flavor::ParEnum } else { Flavor::UnparEnum }, g, m);
            let mut all: Vec<Diagram> = unen.bases().iter().flatten().flat_map(|d| transfer_preimages(d).unwrap()).collect();
            all.sort();
            let mut expected: Vec<Diagram> = en.bases().iter().flatten().cloned().collect();
            expected.sort();
            assert_eq!(all, expected, "{f} g={g} m={m}");
        }
    }

    #[test]
    fn trivial_stabilizer_gives_m_factorial_terms() {
        let z = zeta(3, Flavor::UnparUnen).unwrap();
        assert_eq!(transfer_preimages(&z).unwrap().len(), 6);
        let two = Diagram::parse("flavor=unpar-unen; n=0; lambda=(0); S1=(0,2,{(0)})").unwrap();
        assert_eq!(transfer_preimages(&two).unwrap().len(), 3);
    }

    #[test]
    fn transfer_is_a_section_on_quotients() {
        for m in 1..=3 {
            let unen = quotient(&cells(Flavor::UnparUnen, 0, m), |d| d.degenerate_count() >= 2).unwrap();
            let en = quotient(&cells(Flavor::UnparEnum, 0, m), |d| d.degenerate_count() >= 2).unwrap();
            let c = check_transfer(&unen.complex, &en.complex).unwrap();
            assert!(c.chain_map && c.section, "m = {m}: {:?}", c.witness);
            assert_eq!(c.asymmetry.is_some(), m > 1);
        }
    }
}
