//! Randomized invariants: Smith normal form against independent oracles,
//! boundary witnesses, and the permutation and diagram calculus.

mod common;

use std::sync::OnceLock;

use proptest::prelude::*;
use sullivan_core::homology::snf::{snf_with, snf_with_transforms, PivotStrategy};
use sullivan_core::homology::sparse::SparseMatrix;
use sullivan_core::perm::{compose, conjugate, face_d, leaf_permutation, orbit_canonical, rho_from_lambda};
use sullivan_core::{is_boundary, Chain, ChainComplex, Diagram, Flavor, Permutation};

fn matrix(max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..=3, c), r))
}

/// Rank and the last nonzero leading minor via fraction-free elimination.
fn bareiss(rows: &[Vec<i64>]) -> (usize, i128) {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let (n, m) = (a.len(), a[0].len());
    let (mut rank, mut prev) = (0usize, 1i128);
    let mut sign = 1;
    for col in 0..m {
        let Some(p) = (rank..n).find(|&r| a[r][col] != 0) else { continue };
        if p != rank {
            a.swap(p, rank);
            sign = -sign;
        }
        for r in rank + 1..n {
            for c in col + 1..m {
                a[r][c] = (a[r][c] * a[rank][col] - a[r][col] * a[rank][c]) / prev;
            }
            a[r][col] = 0;
        }
        prev = a[rank][col];
        rank += 1;
    }
    (rank, sign * prev)
}

fn complex() -> &'static ChainComplex {
    static C: OnceLock<ChainComplex> = OnceLock::new();
    C.get_or_init(|| common::build(Flavor::UnparUnen, 1, 2))
}

fn par_complex() -> &'static ChainComplex {
    static C: OnceLock<ChainComplex> = OnceLock::new();
    C.get_or_init(|| common::build(Flavor::ParEnum, 0, 2))
}

fn cell(c: &ChainComplex, pick: (usize, usize)) -> &Diagram {
    let k = pick.0 % c.len();
    let b = c.basis(k);
    &b[pick.1 % b.len()]
}

fn permutation(ground: usize, leaves: usize) -> impl Strategy<Value = Permutation> {
    Just((0..(ground + leaves) as u8).collect::<Vec<u8>>())
        .prop_shuffle()
        .prop_map(move |map| Permutation::from_map(ground, leaves, map).unwrap())
}

fn sized_permutation() -> impl Strategy<Value = Permutation> {
    (2usize..7, 0usize..4).prop_flat_map(|(g, l)| permutation(g, l))
}

fn leaf_images(leaves: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((1..=leaves).collect::<Vec<usize>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pivot_strategies_agree(rows in matrix(7)) {
        let a = SparseMatrix::from_dense(&rows);
        let x = snf_with(&a, PivotStrategy::Markowitz);
        let y = snf_with(&a, PivotStrategy::FirstAvailable);
        prop_assert_eq!(&x.factors, &y.factors);
        prop_assert_eq!(&x.factors, &snf_with_transforms(&a).factors);
    }

    #[test]
    fn rank_matches_rational_elimination(rows in matrix(7)) {
        let a = SparseMatrix::from_dense(&rows);
        prop_assert_eq!(snf_with(&a, PivotStrategy::default()).rank(), bareiss(&rows).0);
    }

    #[test]
    fn invariant_factors_multiply_to_the_determinant(n in 1usize..6, seed in prop::collection::vec(-3i64..=3, 36)) {
        let rows: Vec<Vec<i64>> = (0..n).map(|i| seed[i * n..i * n + n].to_vec()).collect();
        let (rank, det) = bareiss(&rows);
        prop_assume!(rank == n);
        let f = snf_with(&SparseMatrix::from_dense(&rows), PivotStrategy::default()).factors;
        let product: num_bigint::BigInt = f.iter().product();
        prop_assert_eq!(product, num_bigint::BigInt::from(det.abs()));
        for w in f.windows(2) {
            prop_assert!((&w[1] % &w[0]) == num_bigint::BigInt::from(0));
        }
    }

    #[test]
    fn boundaries_bound(k in 1usize..5, coeffs in prop::collection::vec(-2i64..=2, 64)) {
        let c = complex();
        prop_assume!(k < c.len());
        let terms = c.basis(k).iter().zip(coeffs.iter().cycle()).map(|(d, &t)| (d.clone(), t));
        let y = Chain::from_terms(k, terms);
        let x = y.boundary();
        let w = is_boundary(&x, c).unwrap().expect("a boundary bounds");
        prop_assert_eq!(w.boundary(), x);
    }

    #[test]
    fn face_commutes_with_inverse(p in sized_permutation(), i in 0usize..7) {
        let i = i % p.ground_count();
        prop_assert_eq!(face_d(i, &p.inverse()).unwrap(), face_d(i, &p).unwrap().inverse());
    }

    #[test]
    fn face_commutes_with_conjugation((p, images) in (2usize..7, 1usize..4).prop_flat_map(|(g, l)| (permutation(g, l), leaf_images(l))), i in 0usize..7) {
        let i = i % p.ground_count();
        let sigma = leaf_permutation(p.ground_count(), &images).unwrap();
        let lhs = face_d(i, &conjugate(&p, &sigma).unwrap()).unwrap();
        let sigma_down = leaf_permutation(p.ground_count() - 1, &images).unwrap();
        prop_assert_eq!(lhs, conjugate(&face_d(i, &p).unwrap(), &sigma_down).unwrap());
    }

    #[test]
    fn composition_is_associative((p, q, r) in (1usize..6, 0usize..3).prop_flat_map(|(g, l)| (permutation(g, l), permutation(g, l), permutation(g, l)))) {
        let left = compose(&compose(&p, &q).unwrap(), &r).unwrap();
        let right = compose(&p, &compose(&q, &r).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert!(compose(&p, &p.inverse()).unwrap().is_identity());
    }

    #[test]
    fn rho_composes_back_to_the_long_cycle(p in sized_permutation()) {
        let n = p.ground_count() - 1;
        let rho = rho_from_lambda(&p, n).unwrap();
        let long = Permutation::long_cycle(n, p.leaf_count());
        prop_assert_eq!(compose(&p, &rho).unwrap(), long);
    }

    #[test]
    fn cycle_text_round_trips(p in sized_permutation()) {
        let text = p.to_text(false);
        prop_assert_eq!(Permutation::parse_on(&text, p.ground_count(), p.leaf_count()).unwrap(), p);
    }

    #[test]
    fn orbit_canonical_is_idempotent(p in (2usize..5, 1usize..4).prop_flat_map(|(g, l)| permutation(g, l))) {
        let (q, _, sigma) = orbit_canonical(&p, &(), 6).unwrap();
        prop_assert_eq!(conjugate(&p, &sigma).unwrap(), q.clone());
        let (r, _, _) = orbit_canonical(&q, &(), 6).unwrap();
        prop_assert_eq!(r, q);
    }

    #[test]
    fn faces_stay_in_the_complex(pick in (0usize..16, 0usize..4096)) {
        for c in [complex(), par_complex()] {
            let d = cell(c, pick);
            prop_assert!(d.validate().is_ok());
            prop_assert!(d.validate_in(c.component.g, c.component.m).is_ok());
            for i in 0..=d.degree() {
                if d.degree() > 0 {
                    let f = d.face(i).unwrap();
                    prop_assert!(c.index_of(&f).is_some(), "d_{} {} = {}", i, d.to_text(), f.to_text());
                }
            }
        }
    }

    #[test]
    fn simplicial_identities(pick in (2usize..16, 0usize..4096), ij in (0usize..16, 0usize..16)) {
        for c in [complex(), par_complex()] {
            let d = cell(c, pick);
            let n = d.degree();
            prop_assume!(n >= 2);
            let (i, j) = (ij.0 % (n + 1), ij.1 % (n + 1));
            prop_assume!(i < j);
            let lhs = d.face(j).unwrap().face(i).unwrap();
            let rhs = d.face(i).unwrap().face(j - 1).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn cell_text_round_trips(pick in (0usize..16, 0usize..4096)) {
        for c in [complex(), par_complex()] {
            let d = cell(c, pick);
            prop_assert_eq!(&Diagram::parse(&d.to_text()).unwrap(), d);
            prop_assert_eq!(&d.canonicalize(), d);
        }
    }
}
