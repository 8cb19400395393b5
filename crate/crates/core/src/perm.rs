//! Permutations on mixed ground and leaf symbols.
//!
//! A [`Permutation`] acts on `{0, …, n} ⊔ {l1, …, lk}`. Ground symbols precede
//! leaves in the total order and both are ordered by index. The text form is
//! the canonical cycle notation, e.g. `(0 l2)(1 3)(4 l5)(2 6 5)`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest number of symbols a permutation may carry.
pub const MAX_SYMBOLS: usize = 250;

/// Default bound on `|L|` for brute-force orbit canonicalization.
pub const ORBIT_BRUTE_FORCE_BOUND: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not a bijection: {0}")]
    NotBijective(String),
    #[error("face map needs a degree n >= 1 permutation")]
    DegreeZero,
    #[error("index {index} out of range for degree {degree}")]
    IndexOutOfRange { index: usize, degree: usize },
    #[error("conjugating permutation moves ground symbol {0}")]
    MovesGround(usize),
    #[error("orbit of size {0}! exceeds the brute-force bound")]
    OrbitTooLarge(usize),
    #[error("too many symbols ({0})")]
    TooLarge(usize),
}

/// A ground symbol `k` or a leaf `l_j` (`j >= 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Ground(usize),
    Leaf(usize),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Ground(k) => write!(f, "{k}"),
            Symbol::Leaf(j) => write!(f, "l{j}"),
        }
    }
}

impl FromStr for Symbol {
    type Err = PermError;
    fn from_str(s: &str) -> Result<Self, PermError> {
        let bad = || PermError::Parse(format!("bad symbol `{s}`"));
        if let Some(rest) = s.strip_prefix('l') {
            let j: usize = rest.parse().map_err(|_| bad())?;
            if j == 0 {
                return Err(bad());
            }
            Ok(Symbol::Leaf(j))
        } else {
            s.parse().map(Symbol::Ground).map_err(|_| bad())
        }
    }
}

/// A bijection of `{0..ground-1} ⊔ {l1..l_leaves}`.
///
/// Internally symbols are dense indices: ground `k` is index `k`, leaf `l_j`
/// is index `ground + j - 1`. Index order agrees with the symbol order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    ground: u8,
    leaves: u8,
    map: Vec<u8>,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Permutation {
    /// Identity on `ground` ground symbols and `leaves` leaves.
    pub fn identity(ground: usize, leaves: usize) -> Self {
        assert!(ground + leaves <= MAX_SYMBOLS, "too many symbols");
        Permutation {
            ground: ground as u8,
            leaves: leaves as u8,
            map: (0..(ground + leaves) as u8).collect(),
        }
    }

    /// The long cycle `(0 1 … n)` fixing every leaf.
    pub fn long_cycle(n: usize, leaves: usize) -> Self {
        let mut p = Self::identity(n + 1, leaves);
        for k in 0..=n {
            p.map[k] = ((k + 1) % (n + 1)) as u8;
        }
        p
    }

    /// Builds a permutation from a raw index map.
    pub fn from_map(ground: usize, leaves: usize, map: Vec<u8>) -> Result<Self, PermError> {
        let size = ground + leaves;
        if size > MAX_SYMBOLS {
            return Err(PermError::TooLarge(size));
        }
        if map.len() != size {
            return Err(PermError::DomainMismatch(format!(
                "map has {} entries, domain has {size}",
                map.len()
            )));
        }
        let mut seen = vec![false; size];
        for &v in &map {
            let v = v as usize;
            if v >= size || seen[v] {
                return Err(PermError::NotBijective(format!("image {v} repeated or out of range")));
            }
            seen[v] = true;
        }
        Ok(Permutation { ground: ground as u8, leaves: leaves as u8, map })
    }

    pub(crate) fn from_map_unchecked(ground: usize, leaves: usize, map: Vec<u8>) -> Self {
        debug_assert_eq!(map.len(), ground + leaves);
        Permutation { ground: ground as u8, leaves: leaves as u8, map }
    }

    /// Builds a permutation from cycles; symbols not mentioned are fixed.
    pub fn from_cycles(ground: usize, leaves: usize, cycles: &[Vec<Symbol>]) -> Result<Self, PermError> {
        let size = ground + leaves;
        if size > MAX_SYMBOLS {
            return Err(PermError::TooLarge(size));
        }
        let mut map: Vec<Option<u8>> = vec![None; size];
        let mut hit = vec![false; size];
        let probe = Permutation::identity(ground, leaves);
        for cycle in cycles {
            for (pos, s) in cycle.iter().enumerate() {
                let a = probe.index_of(*s)?;
                let b = probe.index_of(cycle[(pos + 1) % cycle.len()])?;
                if hit[a] {
                    return Err(PermError::NotBijective(format!("symbol {s} repeated")));
                }
                hit[a] = true;
                map[a] = Some(b as u8);
            }
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.unwrap_or(i as u8))
            .collect();
        Ok(Permutation { ground: ground as u8, leaves: leaves as u8, map })
    }

    /// Parses cycle notation. The domain is `{0..n} ⊔ {l1..lk}` where `n` and
    /// `k` are the largest indices mentioned; every symbol of that domain must
    /// be listed.
    pub fn parse(text: &str) -> Result<Self, PermError> {
        let cycles = parse_cycles(text)?;
        let mut ground = 0;
        let mut leaves = 0;
        let mut count = 0;
        for c in &cycles {
            for s in c {
                count += 1;
                match *s {
                    Symbol::Ground(k) => ground = ground.max(k + 1),
                    Symbol::Leaf(j) => leaves = leaves.max(j),
                }
            }
        }
        if count != ground + leaves {
            return Err(PermError::Parse(format!(
                "`{text}` does not list the normalized domain {{0..{}}} ⊔ {{l1..l{leaves}}}",
                ground.saturating_sub(1)
            )));
        }
        Self::from_cycles(ground, leaves, &cycles)
    }

    /// Parses cycle notation on an explicit domain; omitted symbols are fixed.
    pub fn parse_on(text: &str, ground: usize, leaves: usize) -> Result<Self, PermError> {
        Self::from_cycles(ground, leaves, &parse_cycles(text)?)
    }

    pub fn ground_count(&self) -> usize {
        self.ground as usize
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves as usize
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn same_domain(&self, other: &Permutation) -> bool {
        self.ground == other.ground && self.leaves == other.leaves
    }

    pub fn symbol(&self, idx: usize) -> Symbol {
        let g = self.ground as usize;
        if idx < g {
            Symbol::Ground(idx)
        } else {
            Symbol::Leaf(idx - g + 1)
        }
    }

    pub fn index_of(&self, s: Symbol) -> Result<usize, PermError> {
        let g = self.ground as usize;
        match s {
            Symbol::Ground(k) if k < g => Ok(k),
            Symbol::Leaf(j) if j >= 1 && j <= self.leaves as usize => Ok(g + j - 1),
            _ => Err(PermError::DomainMismatch(format!("symbol {s} not in domain"))),
        }
    }

    pub fn is_leaf_idx(&self, idx: usize) -> bool {
        idx >= self.ground as usize
    }

    /// Image of an index.
    #[inline]
    pub fn at(&self, idx: usize) -> usize {
        self.map[idx] as usize
    }

    pub fn map(&self) -> &[u8] {
        &self.map
    }

    pub fn apply(&self, s: Symbol) -> Result<Symbol, PermError> {
        Ok(self.symbol(self.at(self.index_of(s)?)))
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Permutation { ground: self.ground, leaves: self.leaves, map: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    /// Cycles as index lists in canonical order: each starts at its minimum
    /// and cycles are sorted by minimum.
    pub fn cycle_indices(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.map.len()];
        let mut out = Vec::new();
        for start in 0..self.map.len() {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cyc.push(x);
                x = self.at(x);
            }
            out.push(cyc);
        }
        out
    }

    /// For every index, the position of its cycle in [`Self::cycle_indices`].
    pub fn cycle_ids(&self) -> (Vec<usize>, usize) {
        let mut ids = vec![usize::MAX; self.map.len()];
        let mut count = 0;
        for start in 0..self.map.len() {
            if ids[start] != usize::MAX {
                continue;
            }
            let mut x = start;
            while ids[x] == usize::MAX {
                ids[x] = count;
                x = self.at(x);
            }
            count += 1;
        }
        (ids, count)
    }

    pub fn cycle_count(&self) -> usize {
        self.cycle_ids().1
    }

    /// Cycles as symbols in canonical order.
    pub fn cycles(&self) -> Vec<Vec<Symbol>> {
        self.cycle_indices()
            .into_iter()
            .map(|c| c.into_iter().map(|i| self.symbol(i)).collect())
            .collect()
    }

    /// Cycle notation; ground fixed points are dropped when `omit_ground_fixed`.
    pub fn to_text(&self, omit_ground_fixed: bool) -> String {
        let mut s = String::new();
        for c in self.cycle_indices() {
            if omit_ground_fixed && c.len() == 1 && !self.is_leaf_idx(c[0]) {
                continue;
            }
            write_cycle(&mut s, c.iter().map(|&i| self.symbol(i)));
        }
        if s.is_empty() {
            s.push_str("()");
        }
        s
    }
}

pub(crate) fn write_cycle(out: &mut String, cycle: impl Iterator<Item = Symbol>) {
    use std::fmt::Write;
    out.push('(');
    for (k, sym) in cycle.enumerate() {
        if k > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{sym}");
    }
    out.push(')');
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(false))
    }
}

impl FromStr for Permutation {
    type Err = PermError;
    fn from_str(s: &str) -> Result<Self, PermError> {
        Permutation::parse(s)
    }
}

/// Parses `(a b c)(d e)…` into symbol cycles. Whitespace is insignificant
/// apart from separating symbols.
pub fn parse_cycles(text: &str) -> Result<Vec<Vec<Symbol>>, PermError> {
    let mut cycles = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('(')
            .ok_or_else(|| PermError::Parse(format!("expected `(` in `{text}`")))?;
        let close = open
            .find(')')
            .ok_or_else(|| PermError::Parse(format!("unclosed cycle in `{text}`")))?;
        let body = &open[..close];
        let cycle = body
            .split_whitespace()
            .map(Symbol::from_str)
            .collect::<Result<Vec<_>, _>>()?;
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = open[close + 1..].trim_start();
    }
    Ok(cycles)
}

/// `(p ∘ q)(x) = p(q(x))`.
pub fn compose(p: &Permutation, q: &Permutation) -> Result<Permutation, PermError> {
    if !p.same_domain(q) {
        return Err(PermError::DomainMismatch(format!(
            "{} ground/{} leaves vs {} ground/{} leaves",
            p.ground, p.leaves, q.ground, q.leaves
        )));
    }
    let map = q.map.iter().map(|&x| p.map[x as usize]).collect();
    Ok(Permutation { ground: p.ground, leaves: p.leaves, map })
}

/// `ρ = λ⁻¹ ∘ (0 1 … n)` with the long cycle fixing leaves.
pub fn rho_from_lambda(lambda: &Permutation, n: usize) -> Result<Permutation, PermError> {
    if lambda.ground_count() != n + 1 {
        return Err(PermError::DomainMismatch(format!(
            "λ has {} ground symbols, expected {}",
            lambda.ground_count(),
            n + 1
        )));
    }
    Ok(rho_unchecked(lambda))
}

pub(crate) fn rho_unchecked(lambda: &Permutation) -> Permutation {
    let g = lambda.ground_count();
    let inv = lambda.inverse();
    let map = (0..lambda.len())
        .map(|x| {
            let cx = if x < g { (x + 1) % g } else { x };
            inv.map[cx]
        })
        .collect();
    Permutation { ground: lambda.ground, leaves: lambda.leaves, map }
}

/// The face map `D_i`: deletes `i` from its cycle and renumbers ground
/// symbols above `i` down by one.
pub fn face_d(i: usize, alpha: &Permutation) -> Result<Permutation, PermError> {
    let g = alpha.ground_count();
    if g < 2 {
        return Err(PermError::DegreeZero);
    }
    if i >= g {
        return Err(PermError::IndexOutOfRange { index: i, degree: g - 1 });
    }
    Ok(face_d_unchecked(i, alpha))
}

pub(crate) fn face_d_unchecked(i: usize, alpha: &Permutation) -> Permutation {
    let size = alpha.len();
    let down = |x: usize| if x > i { x - 1 } else { x };
    let mut map = Vec::with_capacity(size - 1);
    for x in 0..size {
        if x == i {
            continue;
        }
        let mut y = alpha.at(x);
        if y == i {
            y = alpha.at(i);
        }
        map.push(down(y) as u8);
    }
    Permutation { ground: alpha.ground - 1, leaves: alpha.leaves, map }
}

/// Conjugation `c_σ(α) = σ⁻¹ α σ` by a permutation of the leaves.
pub fn conjugate(alpha: &Permutation, sigma: &Permutation) -> Result<Permutation, PermError> {
    if !alpha.same_domain(sigma) {
        return Err(PermError::DomainMismatch("σ and α differ in domain".into()));
    }
    if let Some(k) = (0..sigma.ground_count()).find(|&k| sigma.at(k) != k) {
        return Err(PermError::MovesGround(k));
    }
    Ok(conjugate_unchecked(alpha, sigma))
}

pub(crate) fn conjugate_unchecked(alpha: &Permutation, sigma: &Permutation) -> Permutation {
    let inv = sigma.inverse();
    let map = (0..alpha.len())
        .map(|x| inv.map[alpha.map[sigma.map[x] as usize] as usize])
        .collect();
    Permutation { ground: alpha.ground, leaves: alpha.leaves, map }
}

/// Leaf permutation sending `l_{j}` to `l_{images[j-1]}`.
pub fn leaf_permutation(ground: usize, images: &[usize]) -> Result<Permutation, PermError> {
    let mut map: Vec<u8> = (0..ground as u8).collect();
    map.extend(images.iter().map(|&j| (ground + j - 1) as u8));
    Permutation::from_map(ground, images.len(), map)
}

/// Data that moves along with a leaf relabeling.
pub trait LeafPayload: Sized {
    /// The payload after conjugating by `sigma` (σ⁻¹ · σ on labels).
    fn relabel(&self, sigma: &Permutation) -> Self;
    /// Serialization compared lexicographically after the permutation text.
    fn key(&self) -> String;
}

impl LeafPayload for () {
    fn relabel(&self, _: &Permutation) -> Self {}
    fn key(&self) -> String {
        String::new()
    }
}

/// Lexicographically minimal serialization of `(c_σ(α), σ·payload)` over all
/// `σ ∈ Symm(L)`, by brute force. Returns the representative, its payload and
/// a witnessing `σ`.
pub fn orbit_canonical<P: LeafPayload>(
    alpha: &Permutation,
    payload: &P,
    bound: usize,
) -> Result<(Permutation, P, Permutation), PermError> {
    let k = alpha.leaf_count();
    if k > bound {
        return Err(PermError::OrbitTooLarge(k));
    }
    let g = alpha.ground_count();
    let mut images: Vec<usize> = (1..=k).collect();
    let mut best: Option<(String, Permutation, P, Permutation)> = None;
    loop {
        let sigma = leaf_permutation(g, &images)?;
        let conj = conjugate_unchecked(alpha, &sigma);
        let pay = payload.relabel(&sigma);
        let key = format!("{conj}|{}", pay.key());
        if best.as_ref().is_none_or(|b| key < b.0) {
            best = Some((key, conj, pay, sigma));
        }
        if !next_permutation(&mut images) {
            break;
        }
    }
    let (_, p, pay, s) = best.expect("at least the identity");
    Ok((p, pay, s))
}

/// Advances to the next lexicographic permutation; false when wrapped.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        Permutation::parse(s).unwrap()
    }

    /// The literal formula `s_i ∘ α ∘ (i α⁻¹(i)) ∘ d_i` on symbols.
    fn face_formula(i: usize, a: &Permutation) -> Permutation {
        let g = a.ground_count();
        let k = a.leaf_count();
        let coface = |y: Symbol| match y {
            Symbol::Ground(j) if j >= i => Symbol::Ground(j + 1),
            other => other,
        };
        let degen = |y: Symbol| match y {
            Symbol::Ground(j) if j > i => Symbol::Ground(j - 1),
            other => other,
        };
        let inv = a.inverse();
        let ai = inv.apply(Symbol::Ground(i)).unwrap();
        let transp = |y: Symbol| {
            if y == Symbol::Ground(i) {
                ai
            } else if y == ai {
                Symbol::Ground(i)
            } else {
                y
            }
        };
        let mut cycles = Vec::new();
        let small = Permutation::identity(g - 1, k);
        for idx in 0..small.len() {
            let x = small.symbol(idx);
            let y = degen(a.apply(transp(coface(x))).unwrap());
            cycles.push((x, y));
        }
        let mut map = vec![0u8; small.len()];
        for (x, y) in cycles {
            map[small.index_of(x).unwrap()] = small.index_of(y).unwrap() as u8;
        }
        Permutation::from_map(g - 1, k, map).unwrap()
    }

    #[test]
    fn compose_examples() {
        let id = Permutation::identity(7, 5);
        let q = p("(0 l2)(1 3)(4 l5)(2 5 6)(l1)(l3)(l4)");
        assert_eq!(compose(&id, &q).unwrap(), q);
        let t = p("(0 1)");
        assert!(compose(&t, &t).unwrap().is_identity());
        let long = Permutation::long_cycle(6, 5);
        let r = compose(&q, &long).unwrap();
        assert_eq!(r.to_text(false), "(0 3 l5 4 6 l2)(1 5 2)(l1)(l3)(l4)");
    }

    #[test]
    fn compose_domain_mismatch() {
        assert!(compose(&p("(0 1)"), &p("(0)(1)(2)")).is_err());
    }

    #[test]
    fn rho_examples() {
        let l = p("(0)(1 3)(2 5 4)");
        assert_eq!(rho_from_lambda(&l, 5).unwrap().to_text(false), "(0 3 5)(1 4 2)");
        let id = Permutation::identity(4, 0);
        assert_eq!(rho_from_lambda(&id, 3).unwrap().to_text(false), "(0 1 2 3)");
        let long = Permutation::long_cycle(4, 0);
        assert!(rho_from_lambda(&long, 4).unwrap().is_identity());
        assert!(rho_from_lambda(&long, 3).is_err());
    }

    #[test]
    fn face_examples() {
        assert_eq!(face_d(1, &p("(0 1 2)")).unwrap().to_text(false), "(0 1)");
        assert_eq!(face_formula(1, &p("(0 1 2)")).to_text(false), "(0 1)");
        assert!(face_d(0, &Permutation::identity(3, 2)).unwrap().is_identity());
        assert_eq!(face_d(0, &p("(0)")), Err(PermError::DegreeZero));
    }

    #[test]
    fn face_matches_formula_exhaustively() {
        let mut v: Vec<u8> = (0..6).collect();
        loop {
            let a = Permutation::from_map(4, 2, v.clone()).unwrap();
            for i in 0..4 {
                assert_eq!(face_d(i, &a).unwrap(), face_formula(i, &a), "{a} i={i}");
            }
            if !next_permutation(&mut v) {
                break;
            }
        }
    }

    #[test]
    fn text_round_trip_and_whitespace() {
        let a = Permutation::parse("  ( 0 l2 ) (1   3)(4 l5)(2 6 5)(l1)(l3)(l4) ").unwrap();
        let text = a.to_string();
        assert_eq!(text, "(0 l2)(1 3)(2 6 5)(4 l5)(l1)(l3)(l4)");
        assert_eq!(Permutation::parse(&text).unwrap(), a);
        assert!(Permutation::parse("(0 2)").is_err());
        assert!(Permutation::parse("(0 1").is_err());
        assert_eq!(Permutation::parse_on("(1 2)", 4, 0).unwrap().to_text(true), "(1 2)");
    }

    #[test]
    fn conjugation_examples() {
        let a = p("(0 l1)(1 l2)");
        let id = Permutation::identity(2, 2);
        assert_eq!(conjugate(&a, &id).unwrap(), a);
        let s = leaf_permutation(2, &[2, 1]).unwrap();
        assert_eq!(conjugate(&a, &s).unwrap().to_string(), "(0 l2)(1 l1)");
        assert_eq!(conjugate(&a, &p("(0 1)(l1)(l2)")), Err(PermError::MovesGround(0)));
    }

    #[test]
    fn orbit_examples() {
        let single = p("(0 l1)(1)");
        assert_eq!(orbit_canonical(&single, &(), 8).unwrap().0, single);
        let a = p("(0 l2)(1 l1)");
        let (c, _, sigma) = orbit_canonical(&a, &(), 8).unwrap();
        assert_eq!(c.to_string(), "(0 l1)(1 l2)");
        assert_eq!(conjugate(&a, &sigma).unwrap(), c);
        assert_eq!(orbit_canonical(&c, &(), 8).unwrap().0, c);
        assert!(matches!(orbit_canonical(&a, &(), 1), Err(PermError::OrbitTooLarge(2))));
    }
}
