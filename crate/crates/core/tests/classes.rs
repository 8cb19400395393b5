//! Explicit classes in built complexes.

mod common;

use common::build;
use sullivan_core::verify::is_primitive;
use sullivan_core::ops::{self, big_gamma, big_omega, gamma, mu, omega};
use sullivan_core::{homology, is_boundary, Chain, Flavor, HomologyGroup};

#[test]
fn zeta_generates_top_homology_of_genus_zero() {
    for m in [2, 4] {
        let c = build(Flavor::UnparUnen, 0, m);
        assert_eq!(homology(&c).unwrap()[m - 1], HomologyGroup::free(1));
        let z = Chain::from_diagram(ops::zeta(m, Flavor::UnparUnen).unwrap());
        assert!(z.boundary().is_zero());
        assert!(is_boundary(&z, &c).unwrap().is_none());
        assert!(is_primitive(&c, &z).unwrap(), "m={m}: no cocycle evaluates to 1 on ζ");
        assert!(!is_primitive(&c, &z.scaled(2)).unwrap());
    }
}

#[test]
fn eta_is_a_cycle_for_odd_m() {
    for m in [3, 5] {
        let e = Chain::from_diagram(ops::eta(m, Flavor::UnparUnen).unwrap());
        assert!(e.boundary().is_zero(), "m={m}");
    }
}

#[test]
fn mu_minus_omega_bounds_in_the_enumerated_complex() {
    let c = build(Flavor::ParEnum, 0, 3);
    let (m, w) = (mu(3).unwrap(), omega(3).unwrap());
    assert!(m.boundary().is_zero() && w.boundary().is_zero());
    let x = &m - &w;
    let y = is_boundary(&x, &c).unwrap().expect("μ̃_3 − ω̃_3 bounds");
    assert_eq!(y.boundary(), x);
    assert!(is_boundary(&(&m + &w), &c).unwrap().is_none());
}

#[test]
fn composed_classes_reduce_to_building_blocks() {
    for c in 2..=4 {
        assert_eq!(big_omega(&[c]).unwrap(), omega(c).unwrap());
    }
    assert_eq!(big_gamma(1).unwrap(), gamma().unwrap());
}
