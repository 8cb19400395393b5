//! Finite integer combinations of diagrams of one degree.

use std::collections::BTreeMap;
use std::fmt;

use crate::diagram::Diagram;

/// A chain `Σ κ_i Σ_i`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chain {
    degree: usize,
    terms: BTreeMap<Diagram, i64>,
}

impl Chain {
    pub fn zero(degree: usize) -> Self {
        Chain { degree, terms: BTreeMap::new() }
    }

    pub fn from_diagram(d: Diagram) -> Self {
        let mut c = Chain::zero(d.degree());
        c.add_term(d, 1);
        c
    }

    pub fn from_terms(degree: usize, terms: impl IntoIterator<Item = (Diagram, i64)>) -> Self {
        let mut c = Chain::zero(degree);
        for (d, k) in terms {
            c.add_term(d, k);
        }
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, d: &Diagram) -> i64 {
        self.terms.get(d).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Diagram, i64)> {
        self.terms.iter().map(|(d, &k)| (d, k))
    }

    /// Adds `k·d`. Panics if `d` has the wrong degree.
    pub fn add_term(&mut self, d: Diagram, k: i64) {
        assert_eq!(d.degree(), self.degree, "chain degree mismatch");
        if k == 0 {
            return;
        }
        let entry = self.terms.entry(d);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().checked_add(k).expect("chain coefficient overflow");
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(k);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Chain, k: i64) {
        for (d, c) in other.terms() {
            self.add_term(d.clone(), c.checked_mul(k).expect("chain coefficient overflow"));
        }
    }

    pub fn scaled(&self, k: i64) -> Chain {
        let mut c = Chain::zero(self.degree);
        c.add_scaled(self, k);
        c
    }

    /// `Σ κ_i ∂Σ_i`.
    pub fn boundary(&self) -> Chain {
        let mut out = Chain::zero(self.degree.saturating_sub(1));
        if self.degree == 0 {
            return out;
        }
        for (d, k) in self.terms() {
            out.add_scaled(&d.boundary(), k);
        }
        out
    }

    /// Applies a linear map defined on basis diagrams.
    pub fn map(&self, degree: usize, f: impl Fn(&Diagram) -> Chain) -> Chain {
        let mut out = Chain::zero(degree);
        for (d, k) in self.terms() {
            out.add_scaled(&f(d), k);
        }
        out
    }
}

impl std::ops::Add for &Chain {
    type Output = Chain;
    fn add(self, rhs: &Chain) -> Chain {
        let mut c = self.clone();
        c.add_scaled(rhs, 1);
        c
    }
}

impl std::ops::Sub for &Chain {
    type Output = Chain;
    fn sub(self, rhs: &Chain) -> Chain {
        let mut c = self.clone();
        c.add_scaled(rhs, -1);
        c
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chain[deg {}]", self.degree)?;
        for (d, k) in self.terms() {
            write!(f, "\n  {k:+} {d}")?;
        }
        Ok(())
    }
}
