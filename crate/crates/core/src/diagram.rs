//! Combinatorial 1-Sullivan diagrams in four flavors.
//!
//! A diagram is a fat structure `λ` on `{0..n} ⊔ L`, a partition of the
//! cycles of `λ` into ghost surfaces carrying genus and punctures, and in the
//! unparametrized enumerated flavor a labeling of boundary cycles and
//! punctures by `1..m`. Values are always stored in normal form: ghosts are
//! ordered by foot-point and the parametrized unenumerated flavor is reduced
//! to a fixed representative of its leaf-relabeling orbit, so structural
//! equality is equality of cells.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::chain::Chain;
use crate::perm::{self, write_cycle, PermError, Permutation, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Flavor {
    /// `SD_g^m`
    UnparUnen,
    /// `SD̃_g^m`
    UnparEnum,
    /// `SD̃_{g,m}`
    ParEnum,
    /// `SD_{g,m}`
    ParUnen,
}

impl Flavor {
    pub const ALL: [Flavor; 4] = [Flavor::UnparUnen, Flavor::UnparEnum, Flavor::ParEnum, Flavor::ParUnen];

    pub fn tag(self) -> &'static str {
        match self {
            Flavor::UnparUnen => "unpar-unen",
            Flavor::UnparEnum => "unpar-enum",
            Flavor::ParEnum => "par-enum",
            Flavor::ParUnen => "par-unen",
        }
    }

    pub fn is_parametrized(self) -> bool {
        matches!(self, Flavor::ParEnum | Flavor::ParUnen)
    }

    pub fn is_enumerated(self) -> bool {
        matches!(self, Flavor::UnparEnum | Flavor::ParEnum)
    }

    /// The flavor obtained by forgetting the enumeration.
    pub fn unenumerated(self) -> Flavor {
        match self {
            Flavor::UnparEnum => Flavor::UnparUnen,
            Flavor::ParEnum => Flavor::ParUnen,
            f => f,
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Flavor {
    type Err = DiagramError;
    fn from_str(s: &str) -> Result<Self, DiagramError> {
        Flavor::ALL
            .into_iter()
            .find(|f| f.tag() == s.trim())
            .ok_or_else(|| DiagramError::Parse(format!("unknown flavor `{s}`")))
    }
}

/// Reasons a diagram is rejected. Each condition has its own variant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("(i) ghost boundaries do not partition the cycles of λ: {0}")]
    Partition(String),
    #[error("(ii) single-point disk attached at {0} instead of 0")]
    SuspensionDisk(usize),
    #[error("(iii) ghost S{0} has no cycle meeting the ground circle")]
    Unattached(usize),
    #[error("(iv) boundary cycle {0} does not carry exactly one leaf")]
    LeafCondition(String),
    #[error("(v) enumeration data inconsistent: {0}")]
    Enumeration(String),
    #[error("flavor constraint: {0}")]
    Flavor(String),
    #[error("no integral genus: χ = {chi}, m = {m}")]
    Genus { chi: i64, m: i64 },
    #[error("topological type (g={found_g}, m={found_m}) differs from component (g={g}, m={m})")]
    Component { g: usize, m: usize, found_g: usize, found_m: usize },
}

impl ValidationError {
    /// Short stable code for the violated condition.
    pub fn code(&self) -> &'static str {
        match self {
            ValidationError::Partition(_) => "i",
            ValidationError::SuspensionDisk(_) => "ii",
            ValidationError::Unattached(_) => "iii",
            ValidationError::LeafCondition(_) => "iv",
            ValidationError::Enumeration(_) => "v",
            ValidationError::Flavor(_) => "flavor",
            ValidationError::Genus { .. } => "genus",
            ValidationError::Component { .. } => "component",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid diagram: {0}")]
    Invalid(#[from] ValidationError),
    #[error("degree-0 diagram has no faces")]
    DegreeZero,
    #[error("face index {index} out of range for degree {degree}")]
    FaceIndex { index: usize, degree: usize },
    #[error("diagram is already suspended")]
    AlreadySuspended,
    #[error("flavor mismatch: {0}")]
    FlavorMismatch(String),
}

/// Genus, punctures and (enumerated flavor only) the puncture labels of one
/// ghost surface. Its boundary cycles are held by the parent diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ghost {
    pub genus: u32,
    pub punctures: u32,
    /// Sorted `β2`-preimage; empty unless the flavor is `UnparEnum`.
    pub labels: Vec<u8>,
}

impl Ghost {
    pub fn new(genus: u32, punctures: u32) -> Self {
        Ghost { genus, punctures, labels: Vec::new() }
    }
}

/// Topological type `(g, m)` of a diagram's thickening.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TopType {
    pub genus: usize,
    pub m: usize,
    pub flavor: Flavor,
}

/// A cell of one of the four spaces of 1-Sullivan diagrams.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagram {
    flavor: Flavor,
    lambda: Permutation,
    /// Ghost index of each canonical cycle of `λ`.
    cycle_ghost: Vec<u8>,
    /// Ghost surfaces ordered by foot-point.
    ghosts: Vec<Ghost>,
    /// `β1` label of each canonical cycle of `ρ` (`UnparEnum` only).
    beta1: Vec<u8>,
}

/// Per-symbol description of a diagram that need not be normalized.
#[derive(Debug, Clone)]
pub(crate) struct Parts {
    pub flavor: Flavor,
    pub lambda: Permutation,
    /// Ghost id of every symbol; ids index `ghosts`. Constant on cycles of `λ`.
    pub sym_ghost: Vec<usize>,
    pub ghosts: Vec<Ghost>,
    /// `β1` label of the `ρ`-cycle through each symbol (`UnparEnum` only).
    pub sym_label: Vec<u8>,
}

impl Parts {
    /// Normal form. Ghosts without cycles are dropped.
    pub fn finish(self) -> Diagram {
        let d = self.finish_raw();
        if d.flavor == Flavor::ParUnen {
            d.relabel_canonical()
        } else {
            d
        }
    }

    fn finish_raw(self) -> Diagram {
        let Parts { flavor, lambda, sym_ghost, mut ghosts, sym_label } = self;
        let cycles = lambda.cycle_indices();
        let g = lambda.ground_count();
        let mut foot = vec![usize::MAX; ghosts.len()];
        for c in &cycles {
            let gh = sym_ghost[c[0]];
            let key = if c[0] < g { c[0] } else { 1000 + c[0] };
            foot[gh] = foot[gh].min(key);
        }
        let mut order: Vec<usize> = (0..ghosts.len()).filter(|&k| foot[k] != usize::MAX).collect();
        order.sort_by_key(|&k| foot[k]);
        let mut new_id = vec![usize::MAX; ghosts.len()];
        for (pos, &k) in order.iter().enumerate() {
            new_id[k] = pos;
        }
        let cycle_ghost = cycles.iter().map(|c| new_id[sym_ghost[c[0]]] as u8).collect();
        let ghosts = order
            .iter()
            .map(|&k| {
                let mut gh = std::mem::replace(&mut ghosts[k], Ghost::new(0, 0));
                gh.labels.sort_unstable();
                gh
            })
            .collect();
        let beta1 = if flavor == Flavor::UnparEnum {
            let rho = perm::rho_unchecked(&lambda);
            rho.cycle_indices().iter().map(|c| sym_label[c[0]]).collect()
        } else {
            Vec::new()
        };
        Diagram { flavor, lambda, cycle_ghost, ghosts, beta1 }
    }
}

impl Diagram {
    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn degree(&self) -> usize {
        self.lambda.ground_count() - 1
    }

    pub fn lambda(&self) -> &Permutation {
        &self.lambda
    }

    pub fn rho(&self) -> Permutation {
        perm::rho_unchecked(&self.lambda)
    }

    pub fn ghosts(&self) -> &[Ghost] {
        &self.ghosts
    }

    pub fn leaf_count(&self) -> usize {
        self.lambda.leaf_count()
    }

    /// Ghost index of each canonical `λ`-cycle.
    pub fn cycle_ghost(&self) -> &[u8] {
        &self.cycle_ghost
    }

    /// `β1` labels aligned with the canonical cycles of `ρ`.
    pub fn beta1(&self) -> &[u8] {
        &self.beta1
    }

    /// Ghost index of every symbol index.
    pub fn symbol_ghosts(&self) -> Vec<usize> {
        let (ids, _) = self.lambda.cycle_ids();
        ids.into_iter().map(|c| self.cycle_ghost[c] as usize).collect()
    }

    /// Canonical cycles of `λ` belonging to ghost `k`.
    pub fn ghost_cycles(&self, k: usize) -> Vec<Vec<usize>> {
        self.lambda
            .cycle_indices()
            .into_iter()
            .zip(&self.cycle_ghost)
            .filter(|(_, &gh)| gh as usize == k)
            .map(|(c, _)| c)
            .collect()
    }

    /// Smallest ground symbol on each ghost.
    pub fn foot_points(&self) -> Vec<usize> {
        let g = self.lambda.ground_count();
        let mut foot = vec![usize::MAX; self.ghosts.len()];
        for (c, &gh) in self.lambda.cycle_indices().iter().zip(&self.cycle_ghost) {
            if c[0] < g {
                let f = &mut foot[gh as usize];
                *f = (*f).min(c[0]);
            }
        }
        foot
    }

    pub(crate) fn parts(&self) -> Parts {
        let sym_label = if self.flavor == Flavor::UnparEnum {
            let (ids, _) = self.rho().cycle_ids();
            ids.into_iter().map(|c| self.beta1[c]).collect()
        } else {
            Vec::new()
        };
        Parts {
            flavor: self.flavor,
            lambda: self.lambda.clone(),
            sym_ghost: self.symbol_ghosts(),
            ghosts: self.ghosts.clone(),
            sym_label,
        }
    }

    /// Builds, normalizes and validates a diagram. `ghosts` lists each
    /// surface as `(genus, punctures, boundary cycles)`. Enumeration data is
    /// required exactly for `UnparEnum`: `beta1` pairs a `ρ`-cycle with its
    /// label and `beta2` sends a puncture label to a ghost position in
    /// `ghosts`.
    pub fn new(
        flavor: Flavor,
        lambda: Permutation,
        ghosts: &[(u32, u32, Vec<Vec<Symbol>>)],
        beta1: &[(Vec<Symbol>, u8)],
        beta2: &[(u8, usize)],
    ) -> Result<Diagram, DiagramError> {
        let size = lambda.len();
        let mut sym_ghost = vec![usize::MAX; size];
        for (k, (_, _, cycles)) in ghosts.iter().enumerate() {
            if cycles.is_empty() {
                return Err(ValidationError::Partition(format!("ghost S{} has no boundary", k + 1)).into());
            }
            for cyc in cycles {
                let idx = cyc.iter().map(|s| lambda.index_of(*s)).collect::<Result<Vec<_>, _>>()?;
                let closes = idx.iter().enumerate().all(|(p, &x)| lambda.at(x) == idx[(p + 1) % idx.len()]);
                let (ids, _) = lambda.cycle_ids();
                let full = idx.len() == ids.iter().filter(|&&c| c == ids[idx[0]]).count();
                if !closes || !full {
                    let mut t = String::new();
                    write_cycle(&mut t, cyc.iter().copied());
                    return Err(ValidationError::Partition(format!("{t} is not a cycle of λ")).into());
                }
                for &x in &idx {
                    if sym_ghost[x] != usize::MAX {
                        return Err(ValidationError::Partition(format!("{} used twice", lambda.symbol(x))).into());
                    }
                    sym_ghost[x] = k;
                }
            }
        }
        if let Some(x) = sym_ghost.iter().position(|&k| k == usize::MAX) {
            return Err(ValidationError::Partition(format!("{} lies on no ghost", lambda.symbol(x))).into());
        }
        let mut gh: Vec<Ghost> = ghosts.iter().map(|(g, m, _)| Ghost::new(*g, *m)).collect();
        let mut sym_label = Vec::new();
        if flavor == Flavor::UnparEnum {
            let rho = perm::rho_unchecked(&lambda);
            sym_label = vec![0u8; size];
            for (cyc, label) in beta1 {
                let idx = cyc.iter().map(|s| rho.index_of(*s)).collect::<Result<Vec<_>, _>>()?;
                if idx.is_empty() || !idx.iter().enumerate().all(|(p, &x)| rho.at(x) == idx[(p + 1) % idx.len()]) {
                    return Err(ValidationError::Enumeration("β1 entry is not a cycle of ρ".into()).into());
                }
                for &x in &idx {
                    sym_label[x] = *label;
                }
            }
            if sym_label.contains(&0) {
                return Err(ValidationError::Enumeration("β1 must label every cycle of ρ".into()).into());
            }
            for &(label, k) in beta2 {
                let target = gh
                    .get_mut(k)
                    .ok_or_else(|| ValidationError::Enumeration(format!("β2 target S{} missing", k + 1)))?;
                target.labels.push(label);
            }
        } else if !beta1.is_empty() || !beta2.is_empty() {
            return Err(ValidationError::Enumeration(format!("{flavor} carries no enumeration data")).into());
        }
        let d = Parts { flavor, lambda, sym_ghost, ghosts: gh, sym_label }.finish();
        d.validate()?;
        Ok(d)
    }

    /// Checks conditions (i)–(v) and the flavor constraints.
    pub fn validate(&self) -> Result<(), ValidationError> {
        let g = self.lambda.ground_count();
        if g == 0 {
            return Err(ValidationError::Flavor("empty ground circle".into()));
        }
        let leaves = self.lambda.leaf_count();
        if self.flavor.is_parametrized() {
            if leaves == 0 {
                return Err(ValidationError::Flavor("parametrized diagram without leaves".into()));
            }
            if self.ghosts.iter().any(|gh| gh.punctures != 0) {
                return Err(ValidationError::Flavor("parametrized ghosts carry no punctures".into()));
            }
        } else if leaves != 0 {
            return Err(ValidationError::Flavor("unparametrized diagram with leaves".into()));
        }
        if self.ghosts.is_empty() {
            return Err(ValidationError::Partition("no ghost surfaces".into()));
        }
        let cycles = self.lambda.cycle_indices();
        let mut count = vec![0usize; self.ghosts.len()];
        let mut attached = vec![false; self.ghosts.len()];
        for (c, &gh) in cycles.iter().zip(&self.cycle_ghost) {
            count[gh as usize] += 1;
            if c[0] < g {
                attached[gh as usize] = true;
            }
        }
        if let Some(k) = count.iter().position(|&c| c == 0) {
            return Err(ValidationError::Partition(format!("ghost S{} has no boundary", k + 1)));
        }
        if let Some(k) = attached.iter().position(|&a| !a) {
            // Unparametrized ghosts only hold ground symbols, so this is
            // condition (iii) in the parametrized flavors.
            return Err(ValidationError::Unattached(k + 1));
        }
        for (c, &gh) in cycles.iter().zip(&self.cycle_ghost) {
            let s = &self.ghosts[gh as usize];
            if c.len() == 1 && c[0] < g && c[0] != 0 && s.genus == 0 && s.punctures == 0 && count[gh as usize] == 1 {
                return Err(ValidationError::SuspensionDisk(c[0]));
            }
        }
        let rho = self.rho();
        if self.flavor.is_parametrized() {
            for c in rho.cycle_indices() {
                let nleaf = c.iter().filter(|&&x| x >= g).count();
                if nleaf != 1 {
                    let mut t = String::new();
                    write_cycle(&mut t, c.iter().map(|&x| rho.symbol(x)));
                    return Err(ValidationError::LeafCondition(t));
                }
            }
        }
        if self.flavor == Flavor::UnparEnum {
            let rc = rho.cycle_count();
            if self.beta1.len() != rc {
                return Err(ValidationError::Enumeration("β1 does not cover ρ".into()));
            }
            let total = rc + self.ghosts.iter().map(|s| s.labels.len()).sum::<usize>();
            let mut seen = vec![false; total + 1];
            for &l in self.beta1.iter().chain(self.ghosts.iter().flat_map(|s| s.labels.iter())) {
                let l = l as usize;
                if l == 0 || l > total || seen[l] {
                    return Err(ValidationError::Enumeration(format!("labels are not a bijection onto 1..{total}")));
                }
                seen[l] = true;
            }
            for (k, s) in self.ghosts.iter().enumerate() {
                if s.labels.len() != s.punctures as usize {
                    return Err(ValidationError::Enumeration(format!(
                        "S{} has {} punctures but {} labels",
                        k + 1,
                        s.punctures,
                        s.labels.len()
                    )));
                }
            }
        } else if !self.beta1.is_empty() || self.ghosts.iter().any(|s| !s.labels.is_empty()) {
            return Err(ValidationError::Enumeration(format!("{} carries no enumeration data", self.flavor)));
        }
        self.top_type().map(|_| ())
    }

    /// Validates and additionally checks the component `(g, m)`.
    pub fn validate_in(&self, g: usize, m: usize) -> Result<(), ValidationError> {
        self.validate()?;
        let t = self.top_type()?;
        if t.genus != g || t.m != m {
            return Err(ValidationError::Component { g, m, found_g: t.genus, found_m: t.m });
        }
        Ok(())
    }

    /// `χ(S_Σ) = Σ (2 − 2g_i − |A_i| − m_i − a_i)`.
    pub fn euler_char(&self) -> i64 {
        let g = self.lambda.ground_count();
        let mut chi: i64 = self.ghosts.iter().map(|s| 2 - 2 * s.genus as i64 - s.punctures as i64).sum();
        for c in self.lambda.cycle_indices() {
            chi -= 1 + c.iter().filter(|&&x| x < g).count() as i64;
        }
        chi
    }

    /// Number of incoming boundaries: punctures plus `ρ`-cycles, or leaves.
    pub fn incoming(&self) -> usize {
        if self.flavor.is_parametrized() {
            self.leaf_count()
        } else {
            self.rho().cycle_count() + self.ghosts.iter().map(|s| s.punctures as usize).sum::<usize>()
        }
    }

    pub fn top_type(&self) -> Result<TopType, ValidationError> {
        let chi = self.euler_char();
        let m = self.incoming() as i64;
        let twice = 1 - m - chi;
        if twice < 0 || twice % 2 != 0 {
            return Err(ValidationError::Genus { chi, m });
        }
        Ok(TopType { genus: (twice / 2) as usize, m: m as usize, flavor: self.flavor })
    }

    /// Whether the first ghost is the suspension disk `(0,0,{(0)})`.
    pub fn is_suspended(&self) -> bool {
        self.lambda.at(0) == 0 && {
            let s = &self.ghosts[self.cycle_ghost[0] as usize];
            s.genus == 0 && s.punctures == 0 && self.cycle_ghost.iter().filter(|&&k| k == self.cycle_ghost[0]).count() == 1
        }
    }

    /// Punctures plus, when parametrized, leaf fixed points of `ρ`.
    pub fn degenerate_count(&self) -> usize {
        let p: usize = self.ghosts.iter().map(|s| s.punctures as usize).sum();
        if self.flavor.is_parametrized() {
            let g = self.lambda.ground_count();
            p + (g..self.lambda.len()).filter(|&l| self.lambda.at(l) == l).count()
        } else {
            p
        }
    }

    /// The face `d_i`, `0 ≤ i ≤ n`.
    pub fn face(&self, i: usize) -> Result<Diagram, DiagramError> {
        let n = self.degree();
        if n == 0 {
            return Err(DiagramError::DegreeZero);
        }
        if i > n {
            return Err(DiagramError::FaceIndex { index: i, degree: n });
        }
        Ok(self.face_unchecked(i))
    }

    pub(crate) fn face_unchecked(&self, i: usize) -> Diagram {
        let mut parts = self.parts();
        let lambda = &self.lambda;
        let rho = self.rho();
        let a = rho.at(i);
        let ghosts = &mut parts.ghosts;
        let sym_ghost = &mut parts.sym_ghost;
        let j = sym_ghost[i];
        let lambda2 = if a == i {
            ghosts[j].punctures += 1;
            if self.flavor == Flavor::UnparEnum {
                ghosts[j].labels.push(parts.sym_label[i]);
            }
            lambda.clone()
        } else {
            let (ids, _) = lambda.cycle_ids();
            if ids[a] != ids[i] {
                let t = sym_ghost[a];
                if t == j {
                    ghosts[j].genus += 1;
                } else {
                    let other = std::mem::replace(&mut ghosts[t], Ghost::new(0, 0));
                    ghosts[j].genus += other.genus;
                    ghosts[j].punctures += other.punctures;
                    ghosts[j].labels.extend(other.labels);
                    for s in sym_ghost.iter_mut() {
                        if *s == t {
                            *s = j;
                        }
                    }
                }
            }
            let mut map = lambda.map().to_vec();
            map.swap(a, i);
            Permutation::from_map_unchecked(lambda.ground_count(), lambda.leaf_count(), map)
        };
        let new_lambda = perm::face_d_unchecked(i, &lambda2);
        let old = |y: usize| if y >= i { y + 1 } else { y };
        let new_size = new_lambda.len();
        let sym_ghost_new = (0..new_size).map(|y| sym_ghost[old(y)]).collect();
        let sym_label = if self.flavor == Flavor::UnparEnum {
            (0..new_size).map(|y| parts.sym_label[old(y)]).collect()
        } else {
            Vec::new()
        };
        Parts {
            flavor: self.flavor,
            lambda: new_lambda,
            sym_ghost: sym_ghost_new,
            ghosts: parts.ghosts,
            sym_label,
        }
        .finish()
    }

    /// `Σ_j (−1)^j d_j`, empty in degree 0.
    pub fn boundary(&self) -> Chain {
        let n = self.degree();
        let mut c = Chain::zero(n.saturating_sub(1));
        if n == 0 {
            return c;
        }
        for j in 0..=n {
            c.add_term(self.face_unchecked(j), if j % 2 == 0 { 1 } else { -1 });
        }
        c
    }

    /// The suspension `Ψ`: shifts the ground circle by one and attaches the
    /// suspension disk at 0. Its `d_0` face is the input.
    pub fn suspend(&self) -> Result<Diagram, DiagramError> {
        if self.is_suspended() {
            return Err(DiagramError::AlreadySuspended);
        }
        let g = self.lambda.ground_count();
        let size = self.lambda.len();
        let shift = |x: usize| x + 1;
        let mut map = vec![0u8; size + 1];
        for x in 0..size {
            map[shift(x)] = shift(self.lambda.at(x)) as u8;
        }
        let lambda = Permutation::from_map_unchecked(g + 1, self.leaf_count(), map);
        let parts = self.parts();
        let disk = parts.ghosts.len();
        let mut ghosts = parts.ghosts;
        ghosts.push(Ghost::new(0, 0));
        let mut sym_ghost = vec![disk];
        sym_ghost.extend(parts.sym_ghost);
        let sym_label = if self.flavor == Flavor::UnparEnum {
            let rho = perm::rho_unchecked(&lambda);
            let mut lab = vec![0u8];
            lab.extend(&parts.sym_label);
            lab[0] = lab[rho.at(0)];
            lab
        } else {
            Vec::new()
        };
        Ok(Parts { flavor: self.flavor, lambda, sym_ghost, ghosts, sym_label }.finish())
    }

    /// Normal form; only the parametrized unenumerated flavor changes.
    pub fn canonicalize(&self) -> Diagram {
        if self.flavor == Flavor::ParUnen {
            self.relabel_canonical()
        } else {
            self.clone()
        }
    }

    /// Relabels leaves: moving leaves in the order of their `λ`-preimage, then
    /// leaf fixed points by ghost. Leaves of the second kind on one ghost are
    /// interchangeable, so this picks one representative per orbit.
    fn relabel_canonical(&self) -> Diagram {
        let g = self.lambda.ground_count();
        let size = self.lambda.len();
        let sym_ghost = self.symbol_ghosts();
        let inv = self.lambda.inverse();
        let mut leaves: Vec<usize> = (g..size).collect();
        leaves.sort_by_key(|&l| {
            let pre = inv.at(l);
            if pre == l {
                (1usize, sym_ghost[l])
            } else {
                (0, pre)
            }
        });
        let mut new_of = (0..size).collect::<Vec<_>>();
        for (pos, &l) in leaves.iter().enumerate() {
            new_of[l] = g + pos;
        }
        if new_of.iter().enumerate().all(|(x, &y)| x == y) {
            return self.clone();
        }
        self.relabel_leaves(&new_of)
    }

    /// Applies the symbol renaming `x ↦ new_of[x]` (identity on ground).
    pub(crate) fn relabel_leaves(&self, new_of: &[usize]) -> Diagram {
        let size = self.lambda.len();
        let mut map = vec![0u8; size];
        let mut sym_ghost = vec![0usize; size];
        let old_ghost = self.symbol_ghosts();
        for x in 0..size {
            map[new_of[x]] = new_of[self.lambda.at(x)] as u8;
            sym_ghost[new_of[x]] = old_ghost[x];
        }
        Parts {
            flavor: self.flavor,
            lambda: Permutation::from_map_unchecked(self.lambda.ground_count(), self.leaf_count(), map),
            sym_ghost,
            ghosts: self.ghosts.clone(),
            sym_label: Vec::new(),
        }
        .finish_raw()
    }

    /// Same diagram viewed in another flavor, without any checks.
    pub(crate) fn with_flavor(&self, flavor: Flavor) -> Diagram {
        let mut d = self.clone();
        d.flavor = flavor;
        if !flavor.is_enumerated() || flavor.is_parametrized() {
            d.beta1.clear();
            for s in &mut d.ghosts {
                s.labels.clear();
            }
        }
        if flavor == Flavor::ParUnen {
            d = d.relabel_canonical();
        }
        d
    }

    pub(crate) fn ghosts_mut(&mut self) -> &mut Vec<Ghost> {
        &mut self.ghosts
    }

    /// Unparametrized enumerated copy with `β1` aligned with the canonical
    /// `ρ`-cycles and puncture labels per ghost. Not validated.
    pub(crate) fn with_enumeration(&self, beta1: Vec<u8>, labels: Vec<Vec<u8>>) -> Diagram {
        let mut d = self.clone();
        d.flavor = Flavor::UnparEnum;
        d.beta1 = beta1;
        for (s, mut l) in d.ghosts.iter_mut().zip(labels) {
            l.sort_unstable();
            s.labels = l;
        }
        d
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut s = format!("flavor={}; n={}; lambda={}", self.flavor, self.degree(), self.lambda);
        let cycles = self.lambda.cycle_indices();
        for (k, gh) in self.ghosts.iter().enumerate() {
            let _ = write!(s, "; S{}=({},{},{{", k + 1, gh.genus, gh.punctures);
            let mut first = true;
            for (c, &cg) in cycles.iter().zip(&self.cycle_ghost) {
                if cg as usize == k {
                    if !first {
                        s.push(',');
                    }
                    first = false;
                    write_cycle(&mut s, c.iter().map(|&x| self.lambda.symbol(x)));
                }
            }
            s.push_str("})");
        }
        if self.flavor == Flavor::UnparEnum {
            let rho = self.rho();
            s.push_str("; beta1=[");
            for (p, (c, l)) in rho.cycle_indices().iter().zip(&self.beta1).enumerate() {
                if p > 0 {
                    s.push(',');
                }
                write_cycle(&mut s, c.iter().map(|&x| rho.symbol(x)));
                let _ = write!(s, "->{l}");
            }
            s.push_str("]; beta2=[");
            let mut pairs: Vec<(u8, usize)> = self
                .ghosts
                .iter()
                .enumerate()
                .flat_map(|(k, gh)| gh.labels.iter().map(move |&l| (l, k)))
                .collect();
            pairs.sort_unstable();
            for (p, (l, k)) in pairs.iter().enumerate() {
                if p > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{l}->S{}", k + 1);
            }
            s.push(']');
        }
        s
    }

    /// Parses the canonical text form; the result is validated.
    pub fn parse(text: &str) -> Result<Diagram, DiagramError> {
        let bad = |m: &str| DiagramError::Parse(format!("{m} in `{text}`"));
        let mut flavor = None;
        let mut n = None;
        let mut lambda_text = None;
        let mut ghosts: Vec<(usize, (u32, u32, Vec<Vec<Symbol>>))> = Vec::new();
        let mut beta1 = Vec::new();
        let mut beta2 = Vec::new();
        for field in text.split(';') {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let (key, value) = field.split_once('=').ok_or_else(|| bad("field without `=`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "flavor" => flavor = Some(value.parse::<Flavor>()?),
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad("bad degree"))?),
                "lambda" => lambda_text = Some(value.to_string()),
                "beta1" => {
                    let body = strip_brackets(value).ok_or_else(|| bad("beta1 needs [..]"))?;
                    for item in split_items(body) {
                        let (cyc, label) = item.split_once("->").ok_or_else(|| bad("beta1 entry needs ->"))?;
                        let cycles = perm::parse_cycles(cyc)?;
                        if cycles.len() != 1 {
                            return Err(bad("beta1 entry must be one cycle"));
                        }
                        let label = label.trim().parse::<u8>().map_err(|_| bad("bad label"))?;
                        beta1.push((cycles.into_iter().next().unwrap(), label));
                    }
                }
                "beta2" => {
                    let body = strip_brackets(value).ok_or_else(|| bad("beta2 needs [..]"))?;
                    for item in split_items(body) {
                        let (label, target) = item.split_once("->").ok_or_else(|| bad("beta2 entry needs ->"))?;
                        let label = label.trim().parse::<u8>().map_err(|_| bad("bad label"))?;
                        let k = target
                            .trim()
                            .strip_prefix('S')
                            .and_then(|k| k.parse::<usize>().ok())
                            .filter(|&k| k >= 1)
                            .ok_or_else(|| bad("bad β2 target"))?;
                        beta2.push((label, k));
                    }
                }
                _ if key.starts_with('S') => {
                    let k = key[1..].parse::<usize>().map_err(|_| bad("bad ghost name"))?;
                    let inner = value
                        .strip_prefix('(')
                        .and_then(|v| v.strip_suffix(')'))
                        .ok_or_else(|| bad("ghost needs (g,m,{..})"))?;
                    let mut it = inner.splitn(3, ',');
                    let g = it.next().and_then(|x| x.trim().parse().ok()).ok_or_else(|| bad("bad genus"))?;
                    let m = it.next().and_then(|x| x.trim().parse().ok()).ok_or_else(|| bad("bad punctures"))?;
                    let set = it
                        .next()
                        .map(str::trim)
                        .and_then(|x| x.strip_prefix('{'))
                        .and_then(|x| x.strip_suffix('}'))
                        .ok_or_else(|| bad("ghost boundary needs {..}"))?;
                    let cycles = perm::parse_cycles(&set.replace(',', ""))?;
                    ghosts.push((k, (g, m, cycles)));
                }
                _ => return Err(bad(&format!("unknown field `{key}`"))),
            }
        }
        let flavor = flavor.ok_or_else(|| bad("missing flavor"))?;
        let n = n.ok_or_else(|| bad("missing n"))?;
        let lambda_text = lambda_text.ok_or_else(|| bad("missing lambda"))?;
        let cycles = perm::parse_cycles(&lambda_text)?;
        let leaves = cycles
            .iter()
            .flatten()
            .filter_map(|s| match s {
                Symbol::Leaf(j) => Some(*j),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let lambda = Permutation::from_cycles(n + 1, leaves, &cycles)?;
        ghosts.sort_by_key(|(k, _)| *k);
        if ghosts.iter().enumerate().any(|(p, (k, _))| *k != p + 1) {
            return Err(bad("ghosts must be S1..Sk"));
        }
        let ghosts: Vec<_> = ghosts.into_iter().map(|(_, g)| g).collect();
        let beta2: Vec<(u8, usize)> = beta2.into_iter().map(|(l, k)| (l, k - 1)).collect();
        Diagram::new(flavor, lambda, &ghosts, &beta1, &beta2)
    }
}

fn strip_brackets(s: &str) -> Option<&str> {
    s.trim().strip_prefix('[').and_then(|x| x.strip_suffix(']'))
}

/// Splits on commas outside parentheses.
fn split_items(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (p, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..p].trim());
                start = p + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() {
        out.push(s[start..].trim());
    }
    out
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Diagram {
    type Err = DiagramError;
    fn from_str(s: &str) -> Result<Self, DiagramError> {
        Diagram::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Diagram {
        Diagram::parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn figure_example_is_valid() {
        let x = d("flavor=unpar-unen; n=5; lambda=(0)(1 3)(2 5 4); S1=(0,1,{(0),(1 3)}); S2=(1,2,{(2 5 4)})");
        assert_eq!(x.rho().to_string(), "(0 3 5)(1 4 2)");
        let t = x.top_type().unwrap();
        assert_eq!(x.euler_char(), -10);
        assert_eq!((t.genus, t.m), (3, 5));
        assert_eq!(Diagram::parse(&x.to_text()).unwrap(), x);
    }

    #[test]
    fn suspension_disk_condition() {
        let e = Diagram::parse("flavor=unpar-unen; n=3; lambda=(0 1 2)(3); S1=(0,0,{(0 1 2)}); S2=(0,0,{(3)})");
        match e {
            Err(DiagramError::Invalid(v)) => assert_eq!(v.code(), "ii"),
            other => panic!("{other:?}"),
        }
        let x = d("flavor=unpar-unen; n=0; lambda=(0); S1=(0,0,{(0)})");
        assert!(x.is_suspended());
        let t = x.top_type().unwrap();
        assert_eq!((t.genus, t.m), (0, 1));
    }

    #[test]
    fn partition_and_leaf_conditions() {
        let e = Diagram::parse("flavor=unpar-unen; n=1; lambda=(0 1); S1=(0,0,{(0 1)}); S2=(0,0,{(0 1)})").unwrap_err();
        assert!(matches!(e, DiagramError::Invalid(ValidationError::Partition(_))));
        let e = Diagram::parse("flavor=par-enum; n=1; lambda=(0 1 l1); S1=(0,0,{(0 1 l1)})").unwrap_err();
        assert!(matches!(e, DiagramError::Invalid(ValidationError::LeafCondition(_))), "{e}");
        let e = Diagram::parse("flavor=par-enum; n=0; lambda=(0 l1)(l2); S1=(0,0,{(0 l1)}); S2=(0,0,{(l2)})").unwrap_err();
        assert!(matches!(e, DiagramError::Invalid(ValidationError::Unattached(2))), "{e}");
    }

    #[test]
    fn euler_characteristic_terms() {
        let chord = d("flavor=unpar-unen; n=2; lambda=(0)(1 2); S1=(0,0,{(0)}); S2=(0,0,{(1 2)})");
        assert_eq!(chord.euler_char(), -1);
        for m in 1..6 {
            let cyc = (0..m).map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
            let z = d(&format!("flavor=unpar-unen; n={}; lambda=({cyc}); S1=(0,0,{{({cyc})}})", m - 1));
            assert_eq!(z.euler_char(), 1 - m as i64);
            assert_eq!(z.degenerate_count(), 0);
            assert_eq!(z.is_suspended(), m == 1);
            let t = z.top_type().unwrap();
            assert_eq!((t.genus, t.m), (0, m));
        }
    }

    #[test]
    fn faces_cases() {
        // Case 1: ρ fixes 1, a puncture appears.
        let x = d("flavor=unpar-unen; n=2; lambda=(0 1 2); S1=(0,0,{(0 1 2)})");
        assert_eq!(x.rho().to_string(), "(0)(1)(2)");
        let f = x.face(1).unwrap();
        assert_eq!(f.to_text(), "flavor=unpar-unen; n=1; lambda=(0 1); S1=(0,1,{(0 1)})");
        // Case 2(b): 1 and 2 on different cycles of one ghost.
        let y = d("flavor=unpar-unen; n=2; lambda=(0 1)(2); S1=(0,0,{(0 1),(2)})");
        let f = y.face(1).unwrap();
        assert_eq!(f.ghosts()[0].genus, 1);
        assert_eq!(y.top_type().unwrap(), f.top_type().unwrap());
        // Case 2(a): suspension disk merges.
        let z = d("flavor=unpar-unen; n=2; lambda=(0)(1 2); S1=(0,0,{(0)}); S2=(0,0,{(1 2)})");
        assert_eq!(z.face(0).unwrap().to_text(), "flavor=unpar-unen; n=1; lambda=(0 1); S1=(0,0,{(0 1)})");
    }

    #[test]
    fn boundary_squares_to_zero_and_suspension_inverts_d0() {
        let x = d("flavor=unpar-unen; n=4; lambda=(0 2)(1 3)(4); S1=(0,0,{(0 2)}); S2=(0,0,{(1 3),(4)})");
        let b = x.boundary();
        assert!(b.boundary().is_zero());
        let z = d("flavor=unpar-unen; n=2; lambda=(0 1 2); S1=(0,0,{(0 1 2)})");
        let s = z.suspend().unwrap();
        assert!(s.is_suspended());
        assert_eq!(s.face(0).unwrap(), z);
        assert_eq!(s.top_type().unwrap(), z.top_type().unwrap());
        assert_eq!(s.suspend(), Err(DiagramError::AlreadySuspended));
    }

    #[test]
    fn enumerated_round_trip_and_labels() {
        let x = d("flavor=unpar-enum; n=2; lambda=(0 1 2); S1=(0,0,{(0 1 2)}); beta1=[(0)->2,(1)->3,(2)->1]; beta2=[]");
        let f = x.face(1).unwrap();
        assert_eq!(f.ghosts()[0].labels, vec![3]);
        assert_eq!(Diagram::parse(&f.to_text()).unwrap(), f);
        let e = Diagram::parse("flavor=unpar-enum; n=0; lambda=(0); S1=(0,1,{(0)}); beta1=[(0)->1]; beta2=[]").unwrap_err();
        assert!(matches!(e, DiagramError::Invalid(ValidationError::Enumeration(_))), "{e}");
    }

    #[test]
    fn par_unen_relabeling_is_canonical() {
        let a = d("flavor=par-unen; n=1; lambda=(0 l2 1 l1); S1=(0,0,{(0 l2 1 l1)})");
        let b = d("flavor=par-unen; n=1; lambda=(0 l1 1 l2); S1=(0,0,{(0 l1 1 l2)})");
        assert_eq!(a, b);
        assert_eq!(a.lambda().to_string(), "(0 l1 1 l2)");
    }
}
