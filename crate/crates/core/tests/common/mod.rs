#![allow(dead_code)]

use sullivan_core::complex::BuildOptions;
use sullivan_core::{build_complex, ChainComplex, Component, Flavor, HomologyGroup};

pub fn build(flavor: Flavor, g: usize, m: usize) -> ChainComplex {
    build_complex(Component::new(flavor, g, m), BuildOptions::default()).unwrap()
}

pub fn build_to(flavor: Flavor, g: usize, m: usize, max_degree: usize) -> ChainComplex {
    build_complex(Component::new(flavor, g, m), BuildOptions { max_degree: Some(max_degree), ..Default::default() }).unwrap()
}

/// A row such as `"Z,0,C2,Z^2 + C3"`, one entry per degree from 0.
pub fn row(text: &str) -> Vec<HomologyGroup> {
    text.split(',').map(|s| s.parse().unwrap()).collect()
}

/// Equality after padding the shorter side with zero groups.
pub fn same_row(a: &[HomologyGroup], b: &[HomologyGroup]) -> bool {
    let zero = HomologyGroup::default();
    (0..a.len().max(b.len())).all(|k| a.get(k).unwrap_or(&zero) == b.get(k).unwrap_or(&zero))
}

pub fn show(h: &[HomologyGroup]) -> String {
    h.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}
