//! Explicit cycles and chains: `ζ`, `η`, `μ̃`, `ω̃`, `γ̃` and the composed
//! classes `Ω̃`, `Γ̃`. Every ghost surface of these diagrams is a disk.

use super::compose::compose_chains;
use super::OpsError;
use crate::chain::Chain;
use crate::diagram::{Diagram, Flavor};
use crate::perm::{Permutation, Symbol};

fn v(k: usize) -> Symbol {
    Symbol::Ground(k)
}

fn l(j: usize) -> Symbol {
    Symbol::Leaf(j)
}

/// The diagram with one disk ghost per listed cycle of `λ`. In the
/// unparametrized enumerated flavor the `ρ`-cycles are labeled `1, 2, …` in
/// canonical order.
pub fn disks(flavor: Flavor, n: usize, leaves: usize, cycles: Vec<Vec<Symbol>>) -> Result<Diagram, OpsError> {
    let lambda = Permutation::from_cycles(n + 1, leaves, &cycles).map_err(crate::diagram::DiagramError::from)?;
    let beta1: Vec<(Vec<Symbol>, u8)> = if flavor == Flavor::UnparEnum {
        crate::perm::rho_from_lambda(&lambda, n)
            .map_err(crate::diagram::DiagramError::from)?
            .cycles()
            .into_iter()
            .zip(1u8..)
            .collect()
    } else {
        Vec::new()
    };
    let ghosts: Vec<_> = cycles.into_iter().map(|c| (0, 0, vec![c])).collect();
    Ok(Diagram::new(flavor, lambda, &ghosts, &beta1, &[])?)
}

fn at_least(name: &str, m: usize, min: usize) -> Result<(), OpsError> {
    if m < min {
        return Err(OpsError::Range(format!("{name} needs m ≥ {min}, got {m}")));
    }
    Ok(())
}

/// `ζ^m` with `λ = (0 1 … m−1)`, or `ζ_m` with `λ = (0 l1 1 l2 … m−1 lm)` in
/// the parametrized flavors. A single disk ghost; degree `m − 1`.
pub fn zeta(m: usize, flavor: Flavor) -> Result<Diagram, OpsError> {
    at_least("ζ", m, 1)?;
    let cycle = if flavor.is_parametrized() {
        (0..m).flat_map(|k| [v(k), l(k + 1)]).collect()
    } else {
        (0..m).map(v).collect()
    };
    disks(flavor, m - 1, if flavor.is_parametrized() { m } else { 0 }, vec![cycle])
}

/// `η^m` with `λ = (0)(1 2 … m)`, or `η_m` with `λ = (0)(l1 1 l2 2 … lm m)`.
/// Suspended, of degree `m`.
pub fn eta(m: usize, flavor: Flavor) -> Result<Diagram, OpsError> {
    at_least("η", m, 1)?;
    let cycle = if flavor.is_parametrized() {
        (1..=m).flat_map(|k| [l(k), v(k)]).collect()
    } else {
        (1..=m).map(v).collect()
    };
    disks(flavor, m, if flavor.is_parametrized() { m } else { 0 }, vec![vec![v(0)], cycle])
}

/// `μ̃_m ∈ SD̃_{0,m}`: the disk `(0 2 … 2m−2)` and the disks `(2i−1 l_i)`.
/// Degree `2m − 1`.
pub fn mu(m: usize) -> Result<Chain, OpsError> {
    at_least("μ̃", m, 1)?;
    let mut cycles = vec![(0..m).map(|k| v(2 * k)).collect::<Vec<_>>()];
    cycles.extend((1..=m).map(|i| vec![v(2 * i - 1), l(i)]));
    Ok(Chain::from_diagram(disks(Flavor::ParEnum, 2 * m - 1, m, cycles)?))
}

/// The two cells of `ω̃_m = ω̃_{m,1} − ω̃_{m,2}`.
pub fn omega_parts(m: usize) -> Result<[Diagram; 2], OpsError> {
    at_least("ω̃", m, 2)?;
    let odd: Vec<Symbol> = (1..=m).map(|k| v(2 * k - 1)).collect();
    let rest: Vec<Vec<Symbol>> = (2..=m).map(|i| vec![v(2 * i - 2), l(i)]).collect();
    let mut first = vec![vec![v(0)], [odd.clone(), vec![l(1)]].concat()];
    first.extend(rest.iter().cloned());
    let mut second = vec![vec![v(0), l(1)], odd];
    second.extend(rest);
    Ok([disks(Flavor::ParEnum, 2 * m - 1, m, first)?, disks(Flavor::ParEnum, 2 * m - 1, m, second)?])
}

/// `ω̃_m ∈ SD̃_{0,m}`, `m ≥ 2`. Degree `2m − 1`.
pub fn omega(m: usize) -> Result<Chain, OpsError> {
    let [a, b] = omega_parts(m)?;
    Ok(Chain::from_terms(2 * m - 1, [(a, 1), (b, -1)]))
}

/// The three cells of `γ̃ = γ̃_1 + γ̃_2 − γ̃_3`.
pub fn gamma_parts() -> Result<[Diagram; 3], OpsError> {
    let cell = |cycles| disks(Flavor::ParEnum, 3, 1, cycles);
    Ok([
        cell(vec![vec![v(0)], vec![l(1), v(1), v(3), v(2)]])?,
        cell(vec![vec![v(0)], vec![v(1), v(3), l(1), v(2)]])?,
        cell(vec![vec![v(0), l(1)], vec![v(1), v(3), v(2)]])?,
    ])
}

/// `γ̃ ∈ SD̃_{1,1}` of degree 3.
pub fn gamma() -> Result<Chain, OpsError> {
    let [a, b, c] = gamma_parts()?;
    Ok(Chain::from_terms(3, [(a, 1), (b, 1), (c, -1)]))
}

/// `Ω̃_{(c_1,…,c_m)} = ζ̃_m ∘ (ω̃_{c_1} ⊗ … ⊗ ω̃_{c_m})`, each `c_i ≥ 2`.
pub fn big_omega(cs: &[usize]) -> Result<Chain, OpsError> {
    at_least("Ω̃", cs.len(), 1)?;
    let inners = cs.iter().map(|&c| omega(c)).collect::<Result<Vec<_>, _>>()?;
    compose_chains(&Chain::from_diagram(zeta(cs.len(), Flavor::ParEnum)?), &inners)
}

/// `Γ̃_m = ζ̃_m ∘ γ̃^{⊗m}` of degree `4m − 1`.
pub fn big_gamma(m: usize) -> Result<Chain, OpsError> {
    at_least("Γ̃", m, 1)?;
    let g = gamma()?;
    compose_chains(&Chain::from_diagram(zeta(m, Flavor::ParEnum)?), &vec![g; m])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_is_a_cycle_exactly_for_even_m() {
        assert!(zeta(1, Flavor::UnparUnen).unwrap().is_suspended());
        for m in 2..=6 {
            let z = zeta(m, Flavor::UnparUnen).unwrap();
            assert_eq!(z.degree(), m - 1);
            assert!(!z.is_suspended());
            assert_eq!(z.boundary().is_zero(), m % 2 == 0, "m = {m}");
        }
    }

    #[test]
    fn eta_is_suspended_and_a_cycle_exactly_for_odd_m() {
        for m in 2..=6 {
            let e = eta(m, Flavor::UnparUnen).unwrap();
            assert_eq!(e.degree(), m);
            assert!(e.is_suspended());
            assert_eq!(e.boundary().is_zero(), m % 2 == 1, "m = {m}");
        }
    }

    #[test]
    fn named_classes_have_their_types() {
        let z = zeta(3, Flavor::ParEnum).unwrap();
        assert_eq!(z.to_text(), "flavor=par-enum; n=2; lambda=(0 l1 1 l2 2 l3); S1=(0,0,{(0 l1 1 l2 2 l3)})");
        for f in Flavor::ALL {
            let t = zeta(4, f).unwrap().top_type().unwrap();
            assert_eq!((t.genus, t.m), (0, 4), "{f}");
        }
        for m in 1..=5 {
            let t = mu(m).unwrap().terms().next().unwrap().0.top_type().unwrap();
            assert_eq!((t.genus, t.m), (0, m));
        }
        for m in 2..=5 {
            for d in omega_parts(m).unwrap() {
                let t = d.top_type().unwrap();
                assert_eq!((t.genus, t.m), (0, m));
            }
        }
        for d in gamma_parts().unwrap() {
            let t = d.top_type().unwrap();
            assert_eq!((t.genus, t.m), (1, 1));
        }
    }

    #[test]
    fn building_blocks_are_cycles() {
        for m in 1..=5 {
            assert!(mu(m).unwrap().boundary().is_zero(), "μ̃_{m}");
        }
        for m in 2..=5 {
            assert!(omega(m).unwrap().boundary().is_zero(), "ω̃_{m}");
        }
        assert!(gamma().unwrap().boundary().is_zero());
        for m in 2..=5 {
            assert!(!Chain::from_diagram(zeta(m, Flavor::ParEnum).unwrap()).boundary().is_zero());
        }
    }

    #[test]
    fn gamma_face_identities() {
        let [g1, g2, g3] = gamma_parts().unwrap();
        assert_eq!(g1.face(0).unwrap(), g3.face(0).unwrap());
        assert_eq!(g2.face(0).unwrap(), g1.face(3).unwrap());
    }

    #[test]
    fn composed_classes_are_cycles_of_the_right_degree() {
        let o = big_omega(&[2, 3]).unwrap();
        assert_eq!(o.degree(), 9);
        assert!(!o.is_zero());
        assert!(o.boundary().is_zero());
        for m in 1..=2 {
            let g = big_gamma(m).unwrap();
            assert_eq!(g.degree(), 4 * m - 1);
            assert!(!g.is_zero());
            assert!(g.boundary().is_zero(), "Γ̃_{m}");
            let t = g.terms().next().unwrap().0.top_type().unwrap();
            assert_eq!((t.genus, t.m), (m, m));
        }
    }

    #[test]
    fn range_errors() {
        assert!(matches!(zeta(0, Flavor::UnparUnen), Err(OpsError::Range(_))));
        assert!(matches!(omega(1), Err(OpsError::Range(_))));
        assert!(matches!(big_omega(&[3, 1]), Err(OpsError::Range(_))));
    }
}
