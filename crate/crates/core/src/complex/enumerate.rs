//! Cell enumeration.
//!
//! Every cell of positive degree has a `d_0` face in the same component, so
//! the cells of a component are exactly what is reached from its degree-0
//! cells by repeatedly taking cofaces. [`cofaces`] inverts the three face
//! cases; [`direct_cells`] is an exhaustive generator used to cross-check it
//! on small components.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::diagram::{Diagram, Flavor, Ghost, Parts};
use crate::perm::{self, Permutation};

use super::{Component, ComplexError};

/// All degree-0 cells of a component.
pub fn degree_zero_cells(c: Component) -> Vec<Diagram> {
    let Component { flavor, g, m } = c;
    let mut out = Vec::new();
    match flavor {
        Flavor::UnparUnen | Flavor::UnparEnum => {
            if m == 0 {
                return out;
            }
            let lambda = Permutation::identity(1, 0);
            let labels: Vec<u8> = if flavor == Flavor::UnparEnum { (1..=m as u8).collect() } else { vec![0] };
            for &l in &labels {
                let mut ghost = Ghost::new(g as u32, (m - 1) as u32);
                let mut sym_label = Vec::new();
                if flavor == Flavor::UnparEnum {
                    ghost.labels = labels.iter().copied().filter(|&x| x != l).collect();
                    sym_label = vec![l];
                }
                out.push(
                    Parts { flavor, lambda: lambda.clone(), sym_ghost: vec![0], ghosts: vec![ghost], sym_label }
                        .finish(),
                );
            }
        }
        Flavor::ParEnum | Flavor::ParUnen => {
            if m == 0 {
                return out;
            }
            let choices = if flavor == Flavor::ParEnum { m } else { 1 };
            for a in 1..=choices {
                let mut map: Vec<u8> = (0..=m as u8).collect();
                map.swap(0, a);
                let lambda = Permutation::from_map(1, m, map).expect("transposition");
                out.push(
                    Parts {
                        flavor,
                        lambda,
                        sym_ghost: vec![0; m + 1],
                        ghosts: vec![Ghost::new(g as u32, 0)],
                        sym_label: Vec::new(),
                    }
                    .finish(),
                );
            }
        }
    }
    out.retain(|d| d.validate_in(g, m).is_ok());
    out.sort();
    out
}

/// All cells `T` of degree `n + 1` with `d_i(T) = Σ` for some `i`.
pub fn cofaces(sigma: &Diagram) -> Vec<Diagram> {
    let n = sigma.degree();
    let mut out = Vec::new();
    for i in 0..=n + 1 {
        cofaces_at(sigma, i, &mut out);
    }
    out.sort();
    out.dedup();
    out
}

/// Cofaces `T` with `d_i(T) = Σ`, appended to `out`.
pub fn cofaces_at(sigma: &Diagram, i: usize, out: &mut Vec<Diagram>) {
    let flavor = sigma.flavor();
    let enumerated = flavor == Flavor::UnparEnum;
    let parts = sigma.parts();
    let rho = sigma.rho();
    let old_g = sigma.lambda().ground_count();
    let leaves = sigma.leaf_count();
    let new_g = old_g + 1;
    let size = new_g + leaves;
    // New symbol y ≠ i corresponds to old symbol old(y).
    let old = |y: usize| if y > i { y - 1 } else { y };
    let new = |x: usize| if x >= i { x + 1 } else { x };
    let mut shifted = vec![0u8; size];
    for y in 0..size {
        if y != i {
            shifted[y] = new(rho.at(old(y))) as u8;
        }
    }
    for x in (0..size).map(Some).chain(std::iter::once(None)) {
        let mut rmap = shifted.clone();
        match x {
            Some(x) if x == i => continue,
            Some(x) => {
                rmap[i] = rmap[x];
                rmap[x] = i as u8;
            }
            None => rmap[i] = i as u8,
        }
        let rho_new = Permutation::from_map_unchecked(new_g, leaves, rmap);
        let rho_inv = rho_new.inverse();
        let lmap: Vec<u8> = (0..size)
            .map(|y| {
                let z = rho_inv.at(y);
                (if z < new_g { (z + 1) % new_g } else { z }) as u8
            })
            .collect();
        let lambda = Permutation::from_map_unchecked(new_g, leaves, lmap);
        let a = rho_new.at(i);
        let mut l2map = lambda.map().to_vec();
        l2map.swap(a, i);
        let l2 = Permutation::from_map_unchecked(new_g, leaves, l2map);
        // Ghost of each symbol read through λ'' and the face.
        let mut h = vec![0usize; size];
        for y in 0..size {
            if y != i {
                h[y] = parts.sym_ghost[old(y)];
            }
        }
        h[i] = h[l2.at(i)];
        let mut lab = Vec::new();
        if enumerated {
            lab = vec![0u8; size];
            for y in 0..size {
                if y != i {
                    lab[y] = parts.sym_label[old(y)];
                }
            }
            if a != i {
                lab[i] = lab[a];
            }
        }
        let mut emit = |sym_ghost: Vec<usize>, ghosts: Vec<Ghost>, sym_label: Vec<u8>| {
            let cand = Parts { flavor, lambda: lambda.clone(), sym_ghost, ghosts, sym_label }.finish();
            if cand.validate().is_ok() && cand.face_unchecked(i) == *sigma {
                out.push(cand);
            }
        };
        let j = h[i];
        if a == i {
            if parts.ghosts[j].punctures == 0 {
                continue;
            }
            if enumerated {
                for (p, &label) in parts.ghosts[j].labels.iter().enumerate() {
                    let mut ghosts = parts.ghosts.clone();
                    ghosts[j].punctures -= 1;
                    ghosts[j].labels.remove(p);
                    let mut l = lab.clone();
                    l[i] = label;
                    emit(h.clone(), ghosts, l);
                }
            } else {
                let mut ghosts = parts.ghosts.clone();
                ghosts[j].punctures -= 1;
                emit(h.clone(), ghosts, lab.clone());
            }
            continue;
        }
        let (ids, _) = lambda.cycle_ids();
        if ids[a] == ids[i] {
            // Case 3: λ'' splits the cycle; both halves must share a ghost.
            if h[a] == h[i] {
                emit(h.clone(), parts.ghosts.clone(), lab.clone());
            }
            continue;
        }
        // Case 2(b): one ghost, one handle fewer.
        if parts.ghosts[j].genus > 0 {
            let mut ghosts = parts.ghosts.clone();
            ghosts[j].genus -= 1;
            emit(h.clone(), ghosts, lab.clone());
        }
        // Case 2(a): ghost J was glued from the ghosts of C_i and C_a.
        let (ci, ca) = (ids[i], ids[a]);
        let mut others: Vec<usize> = Vec::new();
        for y in 0..size {
            if h[y] == j && ids[y] != ci && ids[y] != ca && !others.contains(&ids[y]) {
                others.push(ids[y]);
            }
        }
        let gj = parts.ghosts[j].clone();
        let k = parts.ghosts.len();
        for mask in 0u64..(1u64 << others.len()) {
            let mut sym_ghost = h.clone();
            for y in 0..size {
                let moved = ids[y] == ca
                    || others.iter().position(|&c| c == ids[y]).is_some_and(|p| mask >> p & 1 == 1);
                if moved {
                    sym_ghost[y] = k;
                }
            }
            for g2 in 0..=gj.genus {
                let label_splits: Vec<(Vec<u8>, Vec<u8>)> = if enumerated {
                    subsets(&gj.labels)
                } else {
                    (0..=gj.punctures).map(|p| (vec![0u8; p as usize], Vec::new())).collect()
                };
                for (to_k, _) in label_splits {
                    let mut ghosts = parts.ghosts.clone();
                    let mut gk = Ghost::new(g2, to_k.len() as u32);
                    ghosts[j].genus = gj.genus - g2;
                    ghosts[j].punctures = gj.punctures - gk.punctures;
                    if enumerated {
                        ghosts[j].labels = gj.labels.iter().copied().filter(|l| !to_k.contains(l)).collect();
                        gk.labels = to_k;
                    }
                    ghosts.push(gk);
                    emit(sym_ghost.clone(), ghosts, lab.clone());
                }
            }
        }
    }
}

/// All subsets of a small label list, paired with a placeholder.
fn subsets(items: &[u8]) -> Vec<(Vec<u8>, Vec<u8>)> {
    (0u32..(1 << items.len()))
        .map(|mask| {
            let sub = items.iter().enumerate().filter(|(p, _)| mask >> p & 1 == 1).map(|(_, &x)| x).collect();
            (sub, Vec::new())
        })
        .collect()
}

/// Cells of a component degree by degree, through `max_degree` if given.
pub fn cells_by_degree(
    c: Component,
    max_degree: Option<usize>,
    budget: usize,
) -> Result<Vec<Vec<Diagram>>, ComplexError> {
    let top = c.top_degree();
    let last = max_degree.map_or(top, |d| d.min(top));
    let mut levels = vec![degree_zero_cells(c)];
    let mut total = levels[0].len();
    for _ in 0..last {
        let prev = levels.last().unwrap();
        let found: HashSet<Diagram> = prev
            .par_iter()
            .fold(HashSet::new, |mut acc, d| {
                acc.extend(cofaces(d));
                acc
            })
            .reduce(HashSet::new, |mut a, b| {
                if a.len() < b.len() {
                    return reduce_into(b, a);
                }
                a.extend(b);
                a
            });
        let mut next: Vec<Diagram> = found.into_iter().collect();
        next.par_sort_unstable();
        total += next.len();
        if total > budget {
            return Err(ComplexError::Budget { cells: total, budget });
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    while levels.len() > 1 && levels.last().is_some_and(|l| l.is_empty()) {
        levels.pop();
    }
    Ok(levels)
}

fn reduce_into(mut big: HashSet<Diagram>, small: HashSet<Diagram>) -> HashSet<Diagram> {
    big.extend(small);
    big
}

/// Exhaustive generation of the degree-`n` cells: every fat structure, every
/// partition of its cycles, every distribution of genus and punctures, every
/// labeling. Factorial cost; for cross-checks only.
pub fn direct_cells(c: Component, n: usize) -> Vec<Diagram> {
    let Component { flavor, g, m } = c;
    let leaves = if flavor.is_parametrized() { m } else { 0 };
    let ground = n + 1;
    let size = ground + leaves;
    let mut found: HashSet<Diagram> = HashSet::new();
    let mut map: Vec<u8> = (0..size as u8).collect();
    let chi_target = 1 - m as i64 - 2 * g as i64;
    loop {
        let lambda = Permutation::from_map_unchecked(ground, leaves, map.clone());
        let cycles = lambda.cycle_indices();
        let rho = perm::rho_unchecked(&lambda);
        let rho_cycles = rho.cycle_count();
        let total_punctures = if flavor.is_parametrized() {
            Some(0)
        } else {
            m.checked_sub(rho_cycles)
        };
        if let Some(p_total) = total_punctures {
            for blocks in set_partitions(cycles.len()) {
                let k = blocks.iter().max().map_or(0, |&b| b + 1);
                // χ before genus: Σ (2 − |A_i| − a_i) − punctures.
                let mut base = 2 * k as i64 - p_total as i64;
                for cyc in &cycles {
                    base -= 1 + cyc.iter().filter(|&&x| x < ground).count() as i64;
                }
                let twice_g = base - chi_target;
                if twice_g < 0 || twice_g % 2 != 0 {
                    continue;
                }
                let genus_total = (twice_g / 2) as u32;
                let mut sym_ghost = vec![0usize; size];
                for (ci, cyc) in cycles.iter().enumerate() {
                    for &x in cyc {
                        sym_ghost[x] = blocks[ci];
                    }
                }
                for genera in compositions(genus_total, k) {
                    for punct in compositions(p_total as u32, k) {
                        let ghosts: Vec<Ghost> =
                            genera.iter().zip(&punct).map(|(&gg, &pp)| Ghost::new(gg, pp)).collect();
                        if flavor == Flavor::UnparEnum {
                            for labeling in labelings(m, rho_cycles, &punct) {
                                let (rho_labels, ghost_labels) = labeling;
                                let (rids, _) = rho.cycle_ids();
                                let sym_label = rids.iter().map(|&r| rho_labels[r]).collect();
                                let mut gh = ghosts.clone();
                                for (q, ls) in ghost_labels.into_iter().enumerate() {
                                    gh[q].labels = ls;
                                }
                                let d = Parts {
                                    flavor,
                                    lambda: lambda.clone(),
                                    sym_ghost: sym_ghost.clone(),
                                    ghosts: gh,
                                    sym_label,
                                }
                                .finish();
                                if d.validate_in(g, m).is_ok() {
                                    found.insert(d);
                                }
                            }
                        } else {
                            let d = Parts {
                                flavor,
                                lambda: lambda.clone(),
                                sym_ghost: sym_ghost.clone(),
                                ghosts,
                                sym_label: Vec::new(),
                            }
                            .finish();
                            if d.validate_in(g, m).is_ok() {
                                found.insert(d);
                            }
                        }
                    }
                }
            }
        }
        if !perm::next_permutation(&mut map) {
            break;
        }
    }
    let mut v: Vec<Diagram> = found.into_iter().collect();
    v.sort();
    v
}

/// Restricted growth strings: block index of each of `k` items.
pub(crate) fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, k: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if pos == k {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max {
            cur.push(b);
            rec(pos + 1, k, cur, if b == max { max + 1 } else { max }, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, &mut Vec::new(), 0, &mut out);
    out
}

/// Weak compositions of `total` into `parts` parts.
pub(crate) fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Assignments of labels `1..=m`: one per `ρ`-cycle and `punct[q]` to ghost `q`.
fn labelings(m: usize, rho_cycles: usize, punct: &[u32]) -> Vec<(Vec<u8>, Vec<Vec<u8>>)> {
    let mut labels: Vec<u8> = (1..=m as u8).collect();
    let mut out = HashSet::new();
    loop {
        let rho_labels = labels[..rho_cycles].to_vec();
        let mut rest = &labels[rho_cycles..];
        let mut per = Vec::new();
        for &p in punct {
            let mut ls = rest[..p as usize].to_vec();
            ls.sort_unstable();
            per.push(ls);
            rest = &rest[p as usize..];
        }
        out.insert((rho_labels, per));
        if !perm::next_permutation(&mut labels) {
            break;
        }
    }
    let mut v: Vec<_> = out.into_iter().collect();
    v.sort();
    v
}
