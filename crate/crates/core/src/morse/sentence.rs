//! Sentences: the bookkeeping behind the fan flow of the enumerated flavors.
//!
//! A sentence has one word per ghost surface. Word `i` lists the labels of
//! the fan chambers of the `i`-th surface from its last chamber (left) to
//! its foot-point (right), so words are read from right to left. The
//! placeholder `ε` stands for any run of letters that no longer matter;
//! adjacent placeholders are always fused.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::diagram::{Diagram, Flavor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SentenceError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("universe of {0} sentences exceeds the budget")]
    Budget(usize),
}

/// A letter or the placeholder. Letters are ordered as numbers and below `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Num(u8),
    Eps,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Num(k) => write!(f, "{k}"),
            Letter::Eps => f.write_str("ε"),
        }
    }
}

/// A reduced word, stored as written (left to right).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    /// Builds the reduced form.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if l == Letter::Eps && out.last() == Some(&Letter::Eps) {
                continue;
            }
            out.push(l);
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, k: u8) -> bool {
        self.0.contains(&Letter::Num(k))
    }

    /// Order type: lexicographic from the right, `ε` above every letter.
    /// Only meaningful between words of equal length.
    pub fn order_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }

    /// Inserts `k` at the position giving the smallest order type.
    pub fn insert_minimal(&self, k: u8) -> Word {
        (0..=self.0.len())
            .map(|p| {
                let mut v = self.0.clone();
                v.insert(p, Letter::Num(k));
                Word(v)
            })
            .min_by(|a, b| a.order_cmp(b))
            .expect("at least one position")
    }

    fn map(&self, f: impl Fn(Letter) -> Letter) -> Word {
        Word::new(self.0.iter().map(|&l| f(l)))
    }

    fn without(&self, k: u8) -> Word {
        Word::new(self.0.iter().copied().filter(|&l| l != Letter::Num(k)))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Letter::to_string).collect();
        write!(f, "({})", parts.join(" "))
    }
}

/// Words `w_1, …, w_k`, indexed by surface (`w_1` belongs to the surface at 0).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Sentence {
    words: Vec<Word>,
}

impl Sentence {
    pub fn new(words: Vec<Word>) -> Sentence {
        Sentence { words }
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Number of words `k`.
    pub fn arity(&self) -> usize {
        self.words.len()
    }

    /// Number of letters (placeholders excluded).
    pub fn letter_count(&self) -> usize {
        self.words.iter().flat_map(|w| w.0.iter()).filter(|l| matches!(l, Letter::Num(_))).count()
    }

    /// Whether every letter `1..=n` occurs exactly once and nothing else does.
    pub fn is_in_a(&self, n: usize) -> bool {
        let mut seen = vec![false; n + 1];
        for l in self.words.iter().flat_map(|w| w.0.iter()) {
            if let Letter::Num(k) = *l {
                let k = k as usize;
                if k == 0 || k > n || seen[k] {
                    return false;
                }
                seen[k] = true;
            }
        }
        seen.iter().skip(1).all(|&s| s)
    }

    /// Index of the word holding letter `k`.
    pub fn word_of(&self, k: u8) -> Option<usize> {
        self.words.iter().position(|w| w.contains(k))
    }

    /// `α_{j,n}`: letters above `j` become placeholders.
    pub fn alpha(&self, j: usize) -> Sentence {
        let f = |l: Letter| match l {
            Letter::Num(k) if k as usize > j => Letter::Eps,
            other => other,
        };
        Sentence { words: self.words.iter().map(|w| w.map(f)).collect() }
    }

    /// `f_n^i` with `n = letter_count()`: places `n + 1` into word `i`
    /// (zero-based) at minimal order type.
    pub fn f(&self, i: usize) -> Sentence {
        let n = self.letter_count() as u8;
        let mut words = self.words.clone();
        words[i] = words[i].insert_minimal(n + 1);
        Sentence { words }
    }

    fn without(&self, k: u8) -> Sentence {
        Sentence { words: self.words.iter().map(|w| w.without(k)).collect() }
    }

    /// Every sentence of `A_{n,k}`.
    pub fn all(n: usize, k: usize) -> Vec<Sentence> {
        let mut out = Vec::new();
        let letters: Vec<u8> = (1..=n as u8).collect();
        let mut order = letters.clone();
        loop {
            for sizes in compositions(n, k) {
                let mut start = 0;
                let bodies: Vec<&[u8]> = sizes
                    .iter()
                    .map(|&s| {
                        let b = &order[start..start + s];
                        start += s;
                        b
                    })
                    .collect();
                let mut acc = vec![Vec::new()];
                for body in bodies {
                    let mut next = Vec::new();
                    for mask in 0u32..(1 << (body.len() + 1)) {
                        let mut w = Vec::new();
                        for p in 0..=body.len() {
                            if mask & (1 << p) != 0 {
                                w.push(Letter::Eps);
                            }
                            if p < body.len() {
                                w.push(Letter::Num(body[p]));
                            }
                        }
                        for prefix in &acc {
                            let mut v: Vec<Word> = Vec::clone(prefix);
                            v.push(Word(w.clone()));
                            next.push(v);
                        }
                    }
                    acc = next;
                }
                out.extend(acc.into_iter().map(Sentence::new));
            }
            if !crate::perm::next_permutation(&mut order) {
                break;
            }
        }
        out.sort();
        out
    }
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
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

impl fmt::Display for Sentence {
    /// Written `w_k, …, w_1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.words.iter().rev().map(Word::to_string).collect();
        f.write_str(&parts.join(", "))
    }
}

impl FromStr for Sentence {
    type Err = SentenceError;

    /// Parses `w_k, …, w_1`, e.g. `(), (3 4)` or `(1ε2)`; `e` also means `ε`.
    fn from_str(s: &str) -> Result<Self, SentenceError> {
        let bad = || SentenceError::Parse(s.to_string());
        let mut words = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = body.find(')').ok_or_else(bad)?;
            let mut letters = Vec::new();
            let mut digits = String::new();
            for ch in body[..close].chars().chain(std::iter::once(' ')) {
                if ch.is_ascii_digit() {
                    digits.push(ch);
                    continue;
                }
                if !digits.is_empty() {
                    letters.push(Letter::Num(digits.parse().map_err(|_| bad())?));
                    digits.clear();
                }
                match ch {
                    'ε' | 'e' => letters.push(Letter::Eps),
                    c if c.is_whitespace() => {}
                    _ => return Err(bad()),
                }
            }
            words.push(Word::new(letters));
            rest = body[close + 1..].trim_start();
            rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
        }
        words.reverse();
        Ok(Sentence { words })
    }
}

/// Memoized membership in `J_n`, following the recursive definitions
/// pointwise instead of materializing the sets.
#[derive(Debug, Default)]
pub struct SentenceCalculus {
    in_i: HashMap<Sentence, Option<usize>>,
}

impl SentenceCalculus {
    pub fn new() -> Self {
        Self::default()
    }

    /// For `s ∈ A_n`, the word `i` with `s ∈ Im(f_{n−1}^i)`, if any.
    pub fn image_of_f(&mut self, s: &Sentence) -> Option<usize> {
        if let Some(&r) = self.in_i.get(s) {
            return r;
        }
        let n = s.letter_count();
        let r = if n == 0 {
            None
        } else {
            let top = n as u8;
            let i = s.word_of(top).expect("letters are 1..n");
            let pre = s.without(top);
            (self.j_witness(&pre).is_none() && pre.f(i) == *s).then_some(i)
        };
        self.in_i.insert(s.clone(), r);
        r
    }

    /// For `s ∈ A_n`, the unique `(j, i)` with `α_{j,n}(s) ∈ Im(f_{j−1}^i)`;
    /// `None` iff `s ∈ B_n`.
    pub fn j_witness(&mut self, s: &Sentence) -> Option<(usize, usize)> {
        let n = s.letter_count();
        (1..=n).find_map(|j| self.image_of_f(&s.alpha(j)).map(|i| (j, i)))
    }

    /// All `(j, i)` witnessing membership; a disjoint union has at most one.
    pub fn j_witnesses(&mut self, s: &Sentence) -> Vec<(usize, usize)> {
        let n = s.letter_count();
        (1..=n).filter_map(|j| self.image_of_f(&s.alpha(j)).map(|i| (j, i))).collect()
    }
}

/// The sets `A_n, I_n, J_n, B_n` and maps `f_n^i` for `n ≤ n_max`, built
/// literally from the recursive definitions.
#[derive(Debug, Clone)]
pub struct Universe {
    pub k: usize,
    pub a: Vec<Vec<Sentence>>,
    pub i: Vec<HashSet<Sentence>>,
    pub j: Vec<HashSet<Sentence>>,
    pub b: Vec<HashSet<Sentence>>,
    /// `f[n][i]` maps `B_n` into `A_{n+1}` (for `n < n_max`).
    pub f: Vec<Vec<HashMap<Sentence, Sentence>>>,
}

pub fn sentence_universe(n_max: usize, k: usize, budget: usize) -> Result<Universe, SentenceError> {
    let mut size = 0usize;
    let mut a = Vec::new();
    for n in 0..=n_max {
        let all = Sentence::all(n, k);
        size += all.len();
        if size > budget {
            return Err(SentenceError::Budget(size));
        }
        a.push(all);
    }
    let mut i_sets: Vec<HashSet<Sentence>> = vec![HashSet::new()];
    let mut j_sets: Vec<HashSet<Sentence>> = vec![HashSet::new()];
    let mut b_sets: Vec<HashSet<Sentence>> = vec![a[0].iter().cloned().collect()];
    let mut f: Vec<Vec<HashMap<Sentence, Sentence>>> = Vec::new();
    for n in 1..=n_max {
        let maps: Vec<HashMap<Sentence, Sentence>> =
            (0..k).map(|i| b_sets[n - 1].iter().map(|s| (s.clone(), s.f(i))).collect()).collect();
        let image: HashSet<Sentence> = maps.iter().flat_map(|m| m.values().cloned()).collect();
        f.push(maps);
        i_sets.push(image);
        let jn: HashSet<Sentence> =
            a[n].iter().filter(|s| (1..=n).any(|j| i_sets[j].contains(&s.alpha(j)))).cloned().collect();
        let bn = a[n].iter().filter(|s| !jn.contains(*s)).cloned().collect();
        j_sets.push(jn);
        b_sets.push(bn);
    }
    Ok(Universe { k, a, i: i_sets, j: j_sets, b: b_sets, f })
}

/// Sentence data of a cell of an enumerated flavor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSentence {
    /// Words of raw labels.
    pub raw: Sentence,
    /// Raw free letters with the index of the surface carrying them.
    pub free: Vec<(u8, usize)>,
    /// Normalized sentence in `A_n`.
    pub normalized: Sentence,
    /// The normalized free letter `n + 1` and its surface, if any.
    pub free_letter: Option<(u8, usize)>,
    /// Ground position of each normalized letter `1..=n` (index `k − 1`).
    pub positions: Vec<usize>,
}

/// Labels of the fan chambers (word by word, foot-point last) and of the
/// degenerate boundaries of each surface.
fn raw_data(d: &Diagram) -> (Vec<Vec<(u8, usize)>>, Vec<(u8, usize)>) {
    let fans = super::flow::fan_profile(d);
    let lambda = d.lambda();
    let g = lambda.ground_count();
    let rho = d.rho();
    let label_at: Box<dyn Fn(usize) -> u8> = match d.flavor() {
        Flavor::UnparEnum => {
            let (ids, _) = rho.cycle_ids();
            let beta1 = d.beta1().to_vec();
            Box::new(move |p| beta1[ids[p]])
        }
        _ => {
            let rho = rho.clone();
            Box::new(move |p| (rho.at(p) - g + 1) as u8)
        }
    };
    let words = fans
        .iter()
        .map(|run| (run.position..run.position + run.length).rev().map(|p| (label_at(p), p)).collect())
        .collect();
    let mut free = Vec::new();
    match d.flavor() {
        Flavor::UnparEnum => {
            for (k, s) in d.ghosts().iter().enumerate() {
                free.extend(s.labels.iter().map(|&l| (l, k)));
            }
        }
        _ => {
            let sym_ghost = d.symbol_ghosts();
            for l in g..lambda.len() {
                if lambda.at(l) == l {
                    free.push(((l - g + 1) as u8, sym_ghost[l]));
                }
            }
        }
    }
    free.sort_unstable();
    (words, free)
}

/// The unnormalized and normalized sentences of a cell.
///
/// # Panics
/// If the flavor is not enumerated.
pub fn sentence(d: &Diagram) -> CellSentence {
    assert!(d.flavor().is_enumerated(), "sentences are defined for enumerated flavors");
    let (words, free) = raw_data(d);
    let raw = Sentence::new(
        words.iter().map(|w| Word::new(w.iter().map(|&(l, _)| Letter::Num(l)))).collect(),
    );
    let z = free.first().copied();
    let mut kept: Vec<(u8, usize)> =
        words.iter().flatten().copied().filter(|&(l, _)| z.is_none_or(|(z, _)| l < z)).collect();
    kept.sort_unstable();
    let rank: HashMap<u8, u8> = kept.iter().enumerate().map(|(r, &(l, _))| (l, r as u8 + 1)).collect();
    let normalized = Sentence::new(
        words
            .iter()
            .map(|w| Word::new(w.iter().map(|(l, _)| rank.get(l).map_or(Letter::Eps, |&r| Letter::Num(r)))))
            .collect(),
    );
    let n = kept.len() as u8;
    CellSentence {
        raw,
        free,
        normalized,
        free_letter: z.map(|(_, k)| (n + 1, k)),
        positions: kept.iter().map(|&(_, p)| p).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Sentence {
        text.parse().unwrap()
    }

    #[test]
    fn words_reduce_and_order() {
        let w = Word::new([Letter::Eps, Letter::Eps, Letter::Num(1), Letter::Eps]);
        assert_eq!(w.to_string(), "(ε 1 ε)");
        assert_eq!(Word::new([Letter::Num(1)]).insert_minimal(2).to_string(), "(2 1)");
        assert_eq!(Word::new([Letter::Num(1), Letter::Eps]).insert_minimal(2).to_string(), "(1 ε 2)");
        assert_eq!(Word::new([Letter::Eps]).insert_minimal(1).to_string(), "(ε 1)");
        assert_eq!(s("(1ε2)"), s("(1 e 2)"));
        assert_eq!(s("(), (3 4)").to_string(), "(), (3 4)");
    }

    #[test]
    fn universe_k1_small() {
        let u = sentence_universe(2, 1, 1000).unwrap();
        let set = |v: &[&str]| v.iter().map(|t| s(t)).collect::<HashSet<_>>();
        assert_eq!(u.a[1].len(), 4);
        assert_eq!(u.a[2].len(), 16);
        assert_eq!(u.i[1], set(&["(1)", "(ε1)"]));
        assert_eq!(u.b[1], set(&["(1ε)", "(ε1ε)"]));
        assert_eq!(u.i[2], set(&["(1ε2)", "(ε1ε2)"]));
        assert_eq!(u.j[2], set(&["(2 1)", "(ε 2 1)", "(2ε1)", "(ε2ε1)", "(1ε2)", "(ε1ε2)"]));
        assert_eq!(u.b[2].len(), 10);
    }

    #[test]
    fn pointwise_membership_matches_the_sets() {
        for k in 1..=3 {
            let n_max = if k == 1 { 4 } else { 3 };
            let u = sentence_universe(n_max, k, 200_000).unwrap();
            let mut calc = SentenceCalculus::new();
            for n in 0..=n_max {
                for t in &u.a[n] {
                    let w = calc.j_witnesses(t);
                    assert!(w.len() <= 1, "{t} lies in {w:?}");
                    assert_eq!(!w.is_empty(), u.j[n].contains(t), "{t}");
                    if let Some(&(j, i)) = w.first() {
                        assert!(u.i[j].contains(&t.alpha(j)));
                        assert_eq!(t.alpha(j).word_of(j as u8), Some(i));
                    }
                }
            }
        }
    }

    #[test]
    fn fixture_diagram_sentence() {
        let d = Diagram::parse(
            "flavor=par-enum; n=3; lambda=(0 l4 1 l3 2)(l2)(3 l1); S1=(0,0,{(0 l4 1 l3 2),(l2)}); S2=(0,0,{(3 l1)})",
        )
        .unwrap();
        let t = sentence(&d);
        assert_eq!(t.raw.to_string(), "(), (3 4)");
        assert_eq!(t.free, vec![(2, 0)]);
        assert_eq!(t.normalized.to_string(), "(), (ε)");
        assert_eq!(t.free_letter, Some((1, 0)));
        assert!(t.positions.is_empty());
    }

    #[test]
    fn cell_without_fans_or_free_letters() {
        let d = Diagram::parse("flavor=unpar-enum; n=2; lambda=(0 2)(1); S1=(0,0,{(0 2),(1)}); beta1=[(0 1)->1,(2)->2]; beta2=[]")
            .unwrap();
        let t = sentence(&d);
        assert_eq!(t.raw.to_string(), "()");
        assert_eq!(t.normalized.to_string(), "()");
        assert!(t.free.is_empty() && t.free_letter.is_none());
    }

    #[test]
    fn normalization_is_idempotent() {
        for t in Sentence::all(3, 2) {
            let n = t.letter_count();
            assert_eq!(t.alpha(n), t);
            assert_eq!(t.alpha(1).alpha(1), t.alpha(1));
        }
    }
}
