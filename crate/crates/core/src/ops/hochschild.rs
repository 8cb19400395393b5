//! Diagrams as operations on Hochschild chains of a commutative Frobenius
//! algebra, with `Z[x]/(x²)` as the worked example.
//!
//! The admissible circle is removed and every ghost disk becomes a planar
//! tree of the generating operations: its leaves are multiplied together
//! (the unit if there are none) and the product is comultiplied onto the
//! ground vertices on its boundary. Vertex `i` is tensor factor `i`, so a
//! degree-`n` diagram yields a tensor of length `n + 1`. Only disk ghosts
//! are supported. Signs are those of the ungraded algebra.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::{expect_flavor, OpsError};
use crate::chain::Chain;
use crate::diagram::{Diagram, Flavor};
use crate::homology::sparse::SparseMatrix;
use crate::homology::{homology_of, HomologyError, HomologyGroup};

/// A commutative Frobenius algebra over `Z` on a finite basis whose unit
/// is a basis vector.
pub trait Frobenius: Sync {
    fn rank(&self) -> usize;
    fn unit(&self) -> usize;
    fn name(&self, b: usize) -> String;
    fn mul(&self, a: usize, b: usize) -> Vec<(usize, i64)>;
    fn comul(&self, a: usize) -> Vec<(usize, usize, i64)>;
    fn counit(&self, a: usize) -> i64;
}

/// `Z[x]/(x²)` on the basis `1, x` with `ν(1) = 1⊗x + x⊗1`, `ν(x) = x⊗x`,
/// `ε(1) = 0`, `ε(x) = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DualNumbers;

impl DualNumbers {
    pub const ONE: u8 = 0;
    pub const X: u8 = 1;

    pub fn x() -> Tensor {
        Tensor::word(&[Self::X])
    }
}

impl Frobenius for DualNumbers {
    fn rank(&self) -> usize {
        2
    }

    fn unit(&self) -> usize {
        0
    }

    fn name(&self, b: usize) -> String {
        ["1", "x"][b].to_string()
    }

    fn mul(&self, a: usize, b: usize) -> Vec<(usize, i64)> {
        match a + b {
            0 => vec![(0, 1)],
            1 => vec![(1, 1)],
            _ => Vec::new(),
        }
    }

    fn comul(&self, a: usize) -> Vec<(usize, usize, i64)> {
        if a == 0 {
            vec![(0, 1, 1), (1, 0, 1)]
        } else {
            vec![(1, 1, 1)]
        }
    }

    fn counit(&self, a: usize) -> i64 {
        a as i64
    }
}

/// An integer combination of words of one length over an algebra basis.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Tensor {
    len: usize,
    terms: BTreeMap<Vec<u8>, i64>,
}

impl Tensor {
    pub fn zero(len: usize) -> Self {
        Tensor { len, terms: BTreeMap::new() }
    }

    pub fn word(w: &[u8]) -> Self {
        let mut t = Tensor::zero(w.len());
        t.add_term(w.to_vec(), 1);
        t
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], i64)> {
        self.terms.iter().map(|(w, &k)| (w.as_slice(), k))
    }

    pub fn coefficient(&self, w: &[u8]) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, w: Vec<u8>, k: i64) {
        assert_eq!(w.len(), self.len, "tensor length mismatch");
        if k == 0 {
            return;
        }
        let e = self.terms.entry(w).or_insert(0);
        *e += k;
        if *e == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn add_scaled(&mut self, other: &Tensor, k: i64) {
        for (w, c) in other.terms() {
            self.add_term(w.to_vec(), c * k);
        }
    }

    pub fn scaled(&self, k: i64) -> Tensor {
        let mut t = Tensor::zero(self.len);
        t.add_scaled(self, k);
        t
    }

    /// Drops every word with the unit in a position other than 0: the image
    /// in the normalized Hochschild complex.
    pub fn reduced(&self, alg: &impl Frobenius) -> Tensor {
        let u = alg.unit() as u8;
        let mut t = Tensor::zero(self.len);
        for (w, k) in self.terms() {
            if !w[1..].contains(&u) {
                t.add_term(w.to_vec(), k);
            }
        }
        t
    }

    /// Display form such as `2(1⊗x⊗x) - x⊗x⊗1`.
    pub fn display(&self, alg: &impl Frobenius) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (w, k)) in self.terms().enumerate() {
            let word: Vec<String> = w.iter().map(|&b| alg.name(b as usize)).collect();
            let word = word.join("⊗");
            let sign = if k < 0 { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                s.push(' ');
            }
            s.push_str(sign);
            if i > 0 {
                s.push(' ');
            }
            match k.abs() {
                1 => s.push_str(&word),
                a => s.push_str(&format!("{a}({word})")),
            }
        }
        s
    }
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display(&DualNumbers))
    }
}

/// How each disk ghost is cut into generating operations. The boundary of
/// the disk is read starting at position `rotation`; `sweep` alternates
/// multiplications and comultiplications along it, otherwise all inputs are
/// multiplied first and the product is split by a balanced tree of
/// comultiplications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Resolution {
    pub rotation: usize,
    pub sweep: bool,
}

#[derive(Clone, Copy)]
enum Port {
    In(usize),
    Out(usize),
}

type Lin = Vec<(usize, i64)>;

/// Partial evaluation: words on the outputs seen so far and the open strand.
type State = Vec<(Vec<u8>, usize, i64)>;

fn split_balanced(alg: &impl Frobenius, v: &Lin, q: usize) -> Vec<(Vec<u8>, i64)> {
    if q == 1 {
        return v.iter().map(|&(b, k)| (vec![b as u8], k)).collect();
    }
    let mut out = Vec::new();
    for &(b, k) in v {
        for (l, r, c) in alg.comul(b) {
            let left = split_balanced(alg, &vec![(l, 1)], q.div_ceil(2));
            let right = split_balanced(alg, &vec![(r, 1)], q / 2);
            for (wl, kl) in &left {
                for (wr, kr) in &right {
                    out.push(([wl.as_slice(), wr.as_slice()].concat(), k * c * kl * kr));
                }
            }
        }
    }
    out
}

fn times(alg: &impl Frobenius, v: &Lin, e: &Lin) -> Lin {
    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
    for &(a, k) in v {
        for &(b, c) in e {
            for (r, m) in alg.mul(a, b) {
                *acc.entry(r).or_default() += k * c * m;
            }
        }
    }
    acc.into_iter().filter(|&(_, k)| k != 0).collect()
}

/// Words over the outputs of one disk, in the order `outs`.
fn disk(alg: &impl Frobenius, ports: &[Port], inputs: &[Lin], res: Resolution) -> (Vec<usize>, Vec<(Vec<u8>, i64)>) {
    let n = ports.len();
    let order: Vec<Port> = (0..n).map(|i| ports[(i + res.rotation) % n]).collect();
    let outs: Vec<usize> = order.iter().filter_map(|p| if let Port::Out(x) = p { Some(*x) } else { None }).collect();
    if !res.sweep {
        let mut v: Lin = vec![(alg.unit(), 1)];
        for p in &order {
            if let Port::In(j) = p {
                v = times(alg, &v, &inputs[*j]);
            }
        }
        return (outs.clone(), split_balanced(alg, &v, outs.len()));
    }
    let last = order.iter().rposition(|p| matches!(p, Port::Out(_))).expect("disk meets the ground circle");
    let mut state: State = vec![(Vec::new(), alg.unit(), 1)];
    for (i, p) in order.iter().enumerate() {
        let mut next = Vec::new();
        match p {
            Port::In(j) => {
                for (w, s, k) in &state {
                    for (r, c) in times(alg, &vec![(*s, 1)], &inputs[*j]) {
                        next.push((w.clone(), r, k * c));
                    }
                }
            }
            Port::Out(_) if i == last => continue,
            Port::Out(_) => {
                for (w, s, k) in &state {
                    for (a, b, c) in alg.comul(*s) {
                        let mut w2 = w.clone();
                        w2.push(a as u8);
                        next.push((w2, b, k * c));
                    }
                }
            }
        }
        state = next;
    }
    // The strand left open ends at the last output.
    let words = state
        .into_iter()
        .map(|(mut w, s, k)| {
            w.push(s as u8);
            (w, k)
        })
        .collect();
    (outs, words)
}

/// Evaluates one cell on one algebra element per leaf.
pub fn evaluate_diagram(
    alg: &impl Frobenius,
    d: &Diagram,
    inputs: &[Tensor],
    res: Resolution,
) -> Result<Tensor, OpsError> {
    expect_flavor(d.flavor(), &[Flavor::ParEnum])?;
    if inputs.len() != d.leaf_count() || inputs.iter().any(|t| t.len() != 1) {
        return Err(OpsError::Arity { leaves: d.leaf_count(), inputs: inputs.len() });
    }
    let lin: Vec<Lin> = inputs.iter().map(|t| t.terms().map(|(w, k)| (w[0] as usize, k)).collect()).collect();
    let g = d.lambda().ground_count();
    let mut acc: Vec<(Vec<u8>, i64)> = vec![(vec![u8::MAX; g], 1)];
    for (k, s) in d.ghosts().iter().enumerate() {
        let cycles = d.ghost_cycles(k);
        if s.genus > 0 || s.punctures > 0 || cycles.len() != 1 {
            return Err(OpsError::UnsupportedGhost { ghost: k + 1, cell: d.to_text() });
        }
        let ports: Vec<Port> = cycles[0].iter().map(|&x| if x < g { Port::Out(x) } else { Port::In(x - g) }).collect();
        let (outs, words) = disk(alg, &ports, &lin, res);
        let mut next = Vec::with_capacity(acc.len() * words.len());
        for (w, c) in &acc {
            for (part, k2) in &words {
                let mut w2 = w.clone();
                for (&pos, &b) in outs.iter().zip(part) {
                    w2[pos] = b;
                }
                next.push((w2, c * k2));
            }
        }
        acc = next;
    }
    let mut t = Tensor::zero(g);
    for (w, k) in acc {
        t.add_term(w, k);
    }
    Ok(t)
}

/// Evaluates a chain, summing over its cells in parallel.
pub fn evaluate_with(alg: &impl Frobenius, x: &Chain, inputs: &[Tensor], res: Resolution) -> Result<Tensor, OpsError> {
    let parts: Vec<(Tensor, i64)> = x
        .terms()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|(d, k)| evaluate_diagram(alg, d, inputs, res).map(|t| (t, *k)))
        .collect::<Result<_, _>>()?;
    let mut out = Tensor::zero(x.degree() + 1);
    for (t, k) in &parts {
        out.add_scaled(t, *k);
    }
    Ok(out)
}

/// [`evaluate_with`] using the default resolution.
pub fn evaluate(alg: &impl Frobenius, x: &Chain, inputs: &[Tensor]) -> Result<Tensor, OpsError> {
    evaluate_with(alg, x, inputs, Resolution::default())
}

/// Homology in degrees `0..top` of the normalized Hochschild complex
/// `A ⊗ Ā^{⊗n}` of `alg` with coefficients in itself.
pub fn hochschild_homology(alg: &impl Frobenius, top: usize) -> Result<Vec<HomologyGroup>, HomologyError> {
    let u = alg.unit();
    let bar: Vec<usize> = (0..alg.rank()).filter(|&b| b != u).collect();
    let mut bases: Vec<Vec<Vec<usize>>> = Vec::new();
    for n in 0..=top {
        let mut words: Vec<Vec<usize>> = (0..alg.rank()).map(|a| vec![a]).collect();
        for _ in 0..n {
            words = words.into_iter().flat_map(|w| bar.iter().map(move |&b| [w.clone(), vec![b]].concat())).collect();
        }
        bases.push(words);
    }
    let index: Vec<BTreeMap<Vec<usize>, usize>> =
        bases.iter().map(|b| b.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect()).collect();
    let mut boundaries = vec![SparseMatrix::zeros(0, bases[0].len())];
    for n in 1..=top {
        let mut cols = Vec::new();
        for w in &bases[n] {
            let mut col: BTreeMap<usize, i64> = BTreeMap::new();
            let mut push = |word: Vec<usize>, k: i64| {
                if let Some(&r) = index[n - 1].get(&word) {
                    *col.entry(r).or_default() += k;
                }
            };
            for i in 0..n {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                for (p, c) in alg.mul(w[i], w[i + 1]) {
                    let word = [&w[..i], &[p], &w[i + 2..]].concat();
                    push(word, sign * c);
                }
            }
            let sign = if n % 2 == 0 { 1 } else { -1 };
            for (p, c) in alg.mul(w[n], w[0]) {
                let word = [&[p], &w[1..n]].concat();
                push(word, sign * c);
            }
            cols.push(col.into_iter().filter(|&(_, k)| k != 0).collect());
        }
        boundaries.push(SparseMatrix::from_columns(bases[n - 1].len(), cols));
    }
    let dims: Vec<usize> = bases.iter().map(Vec::len).collect();
    let mut h = homology_of(&dims, &boundaries, Default::default())?;
    h.truncate(top);
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::classes::{disks, gamma, mu, omega};
    use crate::perm::Symbol;

    const A: DualNumbers = DualNumbers;

    fn x() -> Tensor {
        DualNumbers::x()
    }

    fn words(ws: &[(&str, i64)]) -> Tensor {
        let mut t = Tensor::zero(ws[0].0.len());
        for (w, k) in ws {
            t.add_term(w.bytes().map(|b| if b == b'1' { 0 } else { 1 }).collect(), *k);
        }
        t
    }

    fn cell(text: &str) -> Chain {
        Chain::from_diagram(Diagram::parse(text).unwrap())
    }

    fn resolutions(max_rot: usize) -> Vec<Resolution> {
        (0..max_rot).flat_map(|rotation| [false, true].map(|sweep| Resolution { rotation, sweep })).collect()
    }

    #[test]
    fn algebra_axioms() {
        for a in 0..2 {
            // (ε ⊗ id)ν = id and associativity of ν on basis vectors.
            let mut back = vec![0i64; 2];
            for (l, r, c) in A.comul(a) {
                back[r] += A.counit(l) * c;
            }
            assert_eq!(back, if a == 0 { vec![1, 0] } else { vec![0, 1] });
        }
        assert_eq!(A.mul(1, 1), vec![]);
    }

    #[test]
    fn first_figure_evaluation() {
        let c = cell("flavor=par-enum; n=3; lambda=(0)(l1 1 3)(l2 2); S1=(0,0,{(0)}); S2=(0,0,{(l1 1 3)}); S3=(0,0,{(l2 2)})");
        let t = evaluate(&A, &c, &[x(), x()]).unwrap();
        assert_eq!(t, words(&[("1xxx", 1)]));
        assert_eq!(t.display(&A), "1⊗x⊗x⊗x");
    }

    #[test]
    fn second_figure_evaluation() {
        let c = cell("flavor=par-enum; n=3; lambda=(0 l1)(1 3 2); S1=(0,0,{(0 l1)}); S2=(0,0,{(1 3 2)})");
        let t = evaluate(&A, &c, &[x()]).unwrap();
        assert_eq!(t, words(&[("x1xx", 1), ("xx1x", 1), ("xxx1", 1)]));
        assert!(t.reduced(&A).is_zero());
    }

    #[test]
    fn building_block_values() {
        assert_eq!(evaluate(&A, &gamma().unwrap(), &[x()]).unwrap().reduced(&A), words(&[("1xxx", 2)]));
        for c in 2..=4 {
            let w: String = std::iter::once('1').chain(std::iter::repeat_n('x', 2 * c - 1)).collect();
            let t = evaluate(&A, &omega(c).unwrap(), &vec![x(); c]).unwrap();
            assert_eq!(t.reduced(&A), words(&[(&w, 1)]), "ω̃_{c}");
            let t = evaluate(&A, &mu(c).unwrap(), &vec![x(); c]).unwrap();
            assert_eq!(t.reduced(&A), words(&[(&w, 1)]), "μ̃_{c}");
        }
    }

    fn one_x_power(k: usize) -> Tensor {
        let mut w = vec![DualNumbers::ONE];
        w.extend(std::iter::repeat_n(DualNumbers::X, k));
        Tensor::word(&w)
    }

    #[test]
    fn composed_class_values() {
        let t = evaluate(&A, &crate::ops::big_omega(&[3, 3]).unwrap(), &vec![x(); 6]).unwrap().reduced(&A);
        assert!(t == one_x_power(11) || t == one_x_power(11).scaled(-1), "{t:?}");
        for m in 1..=2 {
            let t = evaluate(&A, &crate::ops::big_gamma(m).unwrap(), &vec![x(); m]).unwrap().reduced(&A);
            let e = one_x_power(4 * m - 1).scaled(1 << m);
            assert!(t == e || t == e.scaled(-1), "Γ̃_{m}: {t:?}");
        }
    }

    #[test]
    fn independent_of_resolution() {
        let chains = [gamma().unwrap(), omega(3).unwrap(), mu(3).unwrap()];
        for c in &chains {
            let inputs = vec![x(); c.terms().next().unwrap().0.leaf_count()];
            let reference = evaluate(&A, c, &inputs).unwrap();
            for r in resolutions(6) {
                assert_eq!(evaluate_with(&A, c, &inputs, r).unwrap(), reference, "{r:?}");
            }
            let ones = vec![Tensor::word(&[0]); inputs.len()];
            let reference = evaluate(&A, c, &ones).unwrap();
            for r in resolutions(6) {
                assert_eq!(evaluate_with(&A, c, &ones, r).unwrap(), reference, "{r:?}");
            }
        }
    }

    #[test]
    fn suspended_cells_start_with_the_unit() {
        let e = Chain::from_diagram(crate::ops::classes::eta(3, Flavor::ParEnum).unwrap());
        let t = evaluate(&A, &e, &[x(), Tensor::word(&[0]), Tensor::word(&[0])]).unwrap();
        assert!(!t.is_zero());
        assert!(t.terms().all(|(w, _)| w[0] == DualNumbers::ONE));
    }

    #[test]
    fn leafless_ghost_off_zero_gives_zero_on_x() {
        let v = |k| Symbol::Ground(k);
        let d = disks(Flavor::ParEnum, 3, 1, vec![vec![v(0), Symbol::Leaf(1), v(2)], vec![v(1), v(3)]]).unwrap();
        let t = evaluate(&A, &Chain::from_diagram(d), &[x()]).unwrap();
        assert!(t.reduced(&A).is_zero());
    }

    #[test]
    fn non_disk_ghosts_are_rejected() {
        let c = cell("flavor=par-enum; n=0; lambda=(0 l1); S1=(1,0,{(0 l1)})");
        assert!(matches!(evaluate(&A, &c, &[x()]), Err(OpsError::UnsupportedGhost { .. })));
        let c = cell("flavor=par-enum; n=1; lambda=(0)(1 l1); S1=(0,0,{(0),(1 l1)})");
        assert!(matches!(evaluate(&A, &c, &[x()]), Err(OpsError::UnsupportedGhost { .. })));
        let c = Chain::from_diagram(crate::ops::classes::zeta(2, Flavor::ParEnum).unwrap());
        assert!(matches!(evaluate(&A, &c, &[x()]), Err(OpsError::Arity { .. })));
    }

    #[test]
    fn hochschild_homology_of_dual_numbers() {
        let h = hochschild_homology(&A, 4).unwrap();
        assert_eq!(h[0], HomologyGroup::free(2));
        assert_eq!(h[1], HomologyGroup::new(1, &[2]));
        assert_eq!(h[2], HomologyGroup::free(1));
        assert_eq!(h[3], HomologyGroup::new(1, &[2]));
    }
}
