//! Composition `Σ' ∘ (Σ_1 ⊗ … ⊗ Σ_p)` in the parametrized enumerated flavor.
//!
//! The admissible cycle of `Σ_i` is cut open at its leaf and glued along the
//! incoming boundary `l_i` of `Σ'`: the ghost of `Σ_i` at 0 is merged with
//! the ghost of `Σ'` carrying `l_i`, and the vertices `1..n_i` of `Σ_i` are
//! distributed, in order, over the admissible edges met by the `ρ'`-cycle of
//! `l_i`. The result is the sum over all distributions. A term's sign is the
//! parity of the shuffle taking the block order `(outer, inner_1, …)` of the
//! vertices to their order on the new admissible circle.

use rayon::prelude::*;

use super::{expect_flavor, OpsError};
use crate::chain::Chain;
use crate::diagram::{Diagram, Flavor};
use crate::perm::{Permutation, Symbol};

/// Admissible edges met by the `ρ`-cycle of the leaf `l_{i+1}`, in the order
/// in which the cycle runs through them starting at the leaf.
fn leaf_edges(outer: &Diagram, i: usize) -> Vec<usize> {
    let rho = outer.rho();
    let g = rho.ground_count();
    let start = g + i;
    let mut edges = Vec::new();
    let mut x = rho.at(start);
    while x != start {
        if x < g {
            edges.push(x);
        }
        x = rho.at(x);
    }
    edges
}

/// All non-decreasing sequences of length `len` with entries below `bound`.
fn monotone(len: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(len: usize, bound: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for e in from..bound {
            cur.push(e);
            rec(len, bound, e, cur, out);
            cur.pop();
        }
    }
    rec(len, bound, 0, &mut cur, &mut out);
    out
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

/// The composite of one outer cell with one inner cell per leaf.
pub fn compose(outer: &Diagram, inners: &[Diagram]) -> Result<Chain, OpsError> {
    expect_flavor(outer.flavor(), &[Flavor::ParEnum])?;
    for d in inners {
        expect_flavor(d.flavor(), &[Flavor::ParEnum])?;
    }
    if inners.len() != outer.leaf_count() {
        return Err(OpsError::Arity { leaves: outer.leaf_count(), inputs: inners.len() });
    }
    let degree = outer.degree() + inners.iter().map(Diagram::degree).sum::<usize>();
    let mut out = Chain::zero(degree);
    let choices: Vec<(Vec<usize>, Vec<Vec<usize>>)> = (0..inners.len())
        .map(|i| {
            let edges = leaf_edges(outer, i);
            let dist = monotone(inners[i].degree(), edges.len());
            (edges, dist)
        })
        .collect();
    if choices.iter().any(|(_, d)| d.is_empty()) {
        return Ok(out);
    }
    let mut pick = vec![0usize; inners.len()];
    loop {
        let placed: Vec<Vec<usize>> =
            choices.iter().zip(&pick).map(|((edges, dist), &p)| dist[p].iter().map(|&e| edges[e]).collect()).collect();
        let (d, sign) = glue(outer, inners, &placed)?;
        out.add_term(d, sign);
        let mut k = 0;
        loop {
            if k == pick.len() {
                return Ok(out);
            }
            pick[k] += 1;
            if pick[k] < choices[k].1.len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

/// One gluing: `placed[i][j−1]` is the outer vertex after which vertex `j`
/// of inner `i` is inserted.
fn glue(outer: &Diagram, inners: &[Diagram], placed: &[Vec<usize>]) -> Result<(Diagram, i64), OpsError> {
    let lo = outer.lambda();
    let g0 = lo.ground_count();

    // New positions of ground vertices and the shuffle sign.
    let mut after: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g0];
    for (i, p) in placed.iter().enumerate() {
        for (j, &k) in p.iter().enumerate() {
            after[k].push((i, j + 1));
        }
    }
    let mut offset = vec![g0];
    for d in inners {
        offset.push(offset.last().unwrap() + d.degree());
    }
    let ground = *offset.last().unwrap();
    let mut outer_pos = vec![0usize; g0];
    let mut inner_pos: Vec<Vec<usize>> = inners.iter().map(|d| vec![usize::MAX; d.degree() + 1]).collect();
    let mut reference = Vec::with_capacity(ground);
    for k in 0..g0 {
        outer_pos[k] = reference.len();
        reference.push(k);
        for &(i, j) in &after[k] {
            inner_pos[i][j] = reference.len();
            reference.push(offset[i] + j - 1);
        }
    }
    let inversions: usize =
        (0..ground).map(|a| (a + 1..ground).filter(|&b| reference[a] > reference[b]).count()).sum();
    let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };

    let mut leaf_base = vec![0usize];
    for d in inners {
        leaf_base.push(leaf_base.last().unwrap() + d.leaf_count());
    }
    let inner_symbol = |i: usize, y: usize| {
        let gi = inners[i].lambda().ground_count();
        if y < gi {
            Symbol::Ground(inner_pos[i][y])
        } else {
            Symbol::Leaf(leaf_base[i] + y - gi + 1)
        }
    };

    // Ghost classes: outer ghosts first, then each inner's ghosts.
    let mut ghost_base = vec![outer.ghosts().len()];
    for d in inners {
        ghost_base.push(ghost_base.last().unwrap() + d.ghosts().len());
    }
    let total = *ghost_base.last().unwrap();
    let mut parent: Vec<usize> = (0..total).collect();
    let outer_ghost = outer.symbol_ghosts();
    let inner_ghost: Vec<Vec<usize>> = inners.iter().map(Diagram::symbol_ghosts).collect();
    for i in 0..inners.len() {
        let a = find(&mut parent, outer_ghost[g0 + i]);
        let b = find(&mut parent, ghost_base[i] + inner_ghost[i][0]);
        parent[b] = a;
    }

    let mut cycles: Vec<(usize, Vec<Symbol>)> = Vec::new();
    for c in lo.cycle_indices() {
        let mut cyc = Vec::new();
        for x in &c {
            if *x < g0 {
                cyc.push(Symbol::Ground(outer_pos[*x]));
            } else {
                let i = x - g0;
                let zero = &inners[i].lambda().cycle_indices()[0];
                cyc.extend(zero[1..].iter().map(|&y| inner_symbol(i, y)));
            }
        }
        cycles.push((find(&mut parent, outer_ghost[c[0]]), cyc));
    }
    for (i, d) in inners.iter().enumerate() {
        for c in d.lambda().cycle_indices().into_iter().skip(1) {
            let cyc = c.iter().map(|&y| inner_symbol(i, y)).collect();
            cycles.push((find(&mut parent, ghost_base[i] + inner_ghost[i][c[0]]), cyc));
        }
    }
    cycles.retain(|(_, c)| !c.is_empty());

    let mut genus = vec![0u32; total];
    let mut punctures = vec![0u32; total];
    let all_ghosts = outer.ghosts().iter().chain(inners.iter().flat_map(|d| d.ghosts().iter()));
    for (id, s) in all_ghosts.enumerate() {
        let r = find(&mut parent, id);
        genus[r] += s.genus;
        punctures[r] += s.punctures;
    }
    let mut ghosts: Vec<(u32, u32, Vec<Vec<Symbol>>)> = Vec::new();
    let mut slot = vec![usize::MAX; total];
    for (r, c) in &cycles {
        if slot[*r] == usize::MAX {
            slot[*r] = ghosts.len();
            ghosts.push((genus[*r], punctures[*r], Vec::new()));
        }
        ghosts[slot[*r]].2.push(c.clone());
    }
    let leaves = *leaf_base.last().unwrap();
    let all: Vec<Vec<Symbol>> = cycles.into_iter().map(|(_, c)| c).collect();
    let lambda = Permutation::from_cycles(ground, leaves, &all).map_err(crate::diagram::DiagramError::from)?;
    let d = Diagram::new(Flavor::ParEnum, lambda, &ghosts, &[], &[])?;
    Ok((d, sign))
}

/// Multilinear extension of [`compose`].
pub fn compose_chains(outer: &Chain, inners: &[Chain]) -> Result<Chain, OpsError> {
    let degree = outer.degree() + inners.iter().map(Chain::degree).sum::<usize>();
    let mut jobs: Vec<(Diagram, Vec<Diagram>, i64)> =
        outer.terms().map(|(d, k)| (d.clone(), Vec::new(), k)).collect();
    for inner in inners {
        jobs = jobs
            .into_iter()
            .flat_map(|(o, list, k)| {
                inner.terms().map(move |(d, c)| {
                    let mut l = list.clone();
                    l.push(d.clone());
                    (o.clone(), l, k * c)
                })
            })
            .collect();
    }
    let parts: Vec<(Chain, i64)> = jobs
        .par_iter()
        .map(|(o, list, k)| compose(o, list).map(|c| (c, *k)))
        .collect::<Result<_, _>>()?;
    let mut out = Chain::zero(degree);
    for (c, k) in &parts {
        out.add_scaled(c, *k);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::classes::{gamma, omega, zeta};

    fn zeta_tilde(m: usize) -> Chain {
        Chain::from_diagram(zeta(m, Flavor::ParEnum).unwrap())
    }

    #[test]
    fn monotone_counts() {
        assert_eq!(monotone(0, 0), vec![Vec::<usize>::new()]);
        assert!(monotone(2, 0).is_empty());
        assert_eq!(monotone(2, 3).len(), 6);
        assert_eq!(monotone(3, 2).len(), 4);
    }

    #[test]
    fn zeta_one_is_a_unit() {
        for c in 2..=4 {
            assert_eq!(compose_chains(&zeta_tilde(1), &[omega(c).unwrap()]).unwrap(), omega(c).unwrap());
        }
        assert_eq!(compose_chains(&zeta_tilde(1), &[gamma().unwrap()]).unwrap(), gamma().unwrap());
    }

    #[test]
    fn zeta_outer_has_a_single_gluing() {
        let inner = omega(2).unwrap();
        let parts: Vec<&Diagram> = inner.terms().map(|(d, _)| d).collect();
        let c = compose(&zeta(2, Flavor::ParEnum).unwrap(), &[parts[0].clone(), parts[1].clone()]).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.degree(), 1 + 3 + 3);
    }

    #[test]
    fn arity_and_flavor_errors() {
        let z = zeta(2, Flavor::ParEnum).unwrap();
        assert!(matches!(compose(&z, std::slice::from_ref(&z)), Err(OpsError::Arity { leaves: 2, inputs: 1 })));
        let u = zeta(2, Flavor::UnparUnen).unwrap();
        assert!(matches!(compose(&u, &[]), Err(OpsError::Flavor { .. })));
    }

    #[test]
    fn composition_is_associative_up_to_sign() {
        let z2 = zeta_tilde(2);
        let z1 = zeta_tilde(1);
        let w = omega(2).unwrap();
        let g = gamma().unwrap();
        let left = compose_chains(&compose_chains(&z2, &[z2.clone(), z1.clone()]).unwrap(), &[w.clone(), w.clone(), g.clone()]);
        let right = compose_chains(&z2, &[compose_chains(&z2, &[w.clone(), w]).unwrap(), compose_chains(&z1, &[g]).unwrap()]);
        let (left, right) = (left.unwrap(), right.unwrap());
        assert!(!left.is_zero());
        assert!(left == right || left == right.scaled(-1));
    }

    #[test]
    fn composition_is_multilinear() {
        let z = zeta_tilde(2);
        let a = omega(2).unwrap();
        let b = omega(3).unwrap();
        let [p, q] = crate::ops::classes::omega_parts(3).unwrap();
        let split = &compose_chains(&z, &[a.clone(), Chain::from_diagram(p)]).unwrap()
            - &compose_chains(&z, &[a.clone(), Chain::from_diagram(q)]).unwrap();
        assert_eq!(compose_chains(&z, &[a, b]).unwrap(), split);
    }
}
