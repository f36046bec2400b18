//! Words in a free group, minimal coset representatives and Schreier
//! generators of subgroups given by a membership test.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::abelian::FgAbelianGroup;
use crate::error::{Error, Result};

/// A freely reduced word, stored as syllables `x_gen^exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FreeWord {
    syllables: Vec<(usize, i64)>,
}

/// A single letter `x_gen^{±1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    /// Position in the alphabet `x0 < x0^-1 < x1 < x1^-1 < ...`.
    pub fn key(self) -> usize {
        2 * self.gen + usize::from(self.inverse)
    }

    pub fn from_key(key: usize) -> Self {
        Letter { gen: key / 2, inverse: key % 2 == 1 }
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord::default()
    }

    pub fn generator(gen: usize) -> Self {
        FreeWord { syllables: vec![(gen, 1)] }
    }

    pub fn from_syllables(syllables: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut w = FreeWord::identity();
        for (g, e) in syllables {
            w.push_syllable(g, e);
        }
        w
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        Self::from_syllables(letters.into_iter().map(|l| (l.gen, if l.inverse { -1 } else { 1 })))
    }

    fn push_syllable(&mut self, gen: usize, exp: i64) {
        if exp == 0 {
            return;
        }
        match self.syllables.last_mut() {
            Some((g, e)) if *g == gen => {
                *e += exp;
                if *e == 0 {
                    self.syllables.pop();
                }
            }
            _ => self.syllables.push((gen, exp)),
        }
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    pub fn letters(&self) -> Vec<Letter> {
        self.syllables
            .iter()
            .flat_map(|&(gen, e)| std::iter::repeat_n(Letter { gen, inverse: e < 0 }, e.unsigned_abs() as usize))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.syllables.iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.syllables.iter().map(|(g, _)| *g).max()
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut w = self.clone();
        for &(g, e) in &other.syllables {
            w.push_syllable(g, e);
        }
        w
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord { syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect() }
    }
}

impl Ord for FreeWord {
    /// Shortlex: shorter words first, then letter by letter in alphabet order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let a: Vec<usize> = self.letters().into_iter().map(Letter::key).collect();
            let b: Vec<usize> = other.letters().into_iter().map(Letter::key).collect();
            a.cmp(&b)
        })
    }
}

impl PartialOrd for FreeWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|&(g, e)| if e == 1 { format!("x{g}") } else { format!("x{g}^{e}") })
            .collect();
        write!(f, "{}", parts.join("."))
    }
}

impl FromStr for FreeWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(FreeWord::identity());
        }
        let mut syllables = Vec::new();
        for part in s.split('.') {
            let bad = || Error::Parse(format!("malformed syllable '{part}' in word '{s}'"));
            let rest = part.strip_prefix('x').ok_or_else(bad)?;
            let (g, e) = match rest.split_once('^') {
                Some((g, e)) => (g, e.parse::<i64>().map_err(|_| bad())?),
                None => (rest, 1),
            };
            syllables.push((g.parse::<usize>().map_err(|_| bad())?, e));
        }
        Ok(FreeWord::from_syllables(syllables))
    }
}

/// All reduced words of exactly `len` letters over generators `< gens`, in
/// shortlex order.
pub fn reduced_words(len: usize, gens: usize) -> Vec<FreeWord> {
    let mut out = Vec::new();
    let mut cur: Vec<Letter> = Vec::with_capacity(len);
    fn rec(cur: &mut Vec<Letter>, len: usize, gens: usize, out: &mut Vec<FreeWord>) {
        if cur.len() == len {
            out.push(FreeWord::from_letters(cur.iter().copied()));
            return;
        }
        for key in 0..2 * gens {
            let l = Letter::from_key(key);
            if cur.last().is_some_and(|p| *p == l.inv()) {
                continue;
            }
            cur.push(l);
            rec(cur, len, gens, out);
            cur.pop();
        }
    }
    rec(&mut cur, len, gens, &mut out);
    out
}

/// A subgroup of a free group, known through a membership test.
pub trait SubgroupOracle {
    fn contains(&self, w: &FreeWord) -> bool;

    /// Number of ambient generators, if bounded.
    fn ambient_rank(&self) -> Option<usize> {
        None
    }
}

/// Adapts a closure into an oracle.
pub struct FnOracle<F>(pub F);

impl<F: Fn(&FreeWord) -> bool> SubgroupOracle for FnOracle<F> {
    fn contains(&self, w: &FreeWord) -> bool {
        (self.0)(w)
    }
}

/// The kernel of the homomorphism `F_r -> target` sending `x_i` to
/// `images[i]`.
#[derive(Clone, Debug)]
pub struct KernelOracle {
    target: FgAbelianGroup,
    images: Vec<Vec<BigInt>>,
}

impl KernelOracle {
    pub fn new(target: FgAbelianGroup, images: Vec<Vec<BigInt>>) -> Result<Self> {
        for v in &images {
            if v.len() != target.num_generators() {
                return Err(Error::DimensionMismatch(format!(
                    "generator image of length {} in a group with {} generators",
                    v.len(),
                    target.num_generators()
                )));
            }
        }
        Ok(KernelOracle { target, images })
    }

    /// `F_r -> Z/m` with every generator sent to 1.
    pub fn cyclic(rank: usize, m: u64) -> Self {
        let images = vec![vec![BigInt::from(1)]; rank];
        Self::new(FgAbelianGroup::cyclic(m), images).expect("shapes agree")
    }

    pub fn target(&self) -> &FgAbelianGroup {
        &self.target
    }

    pub fn image(&self, w: &FreeWord) -> Option<Vec<BigInt>> {
        let mut acc = vec![BigInt::zero(); self.target.num_generators()];
        for &(g, e) in w.syllables() {
            let img = self.images.get(g)?;
            for (a, x) in acc.iter_mut().zip(img) {
                *a += x * e;
            }
        }
        Some(acc)
    }
}

impl SubgroupOracle for KernelOracle {
    fn contains(&self, w: &FreeWord) -> bool {
        match self.image(w) {
            Some(v) => self.target.is_zero(&v).unwrap_or(false),
            None => false,
        }
    }

    fn ambient_rank(&self) -> Option<usize> {
        Some(self.images.len())
    }
}

fn clamp_gens(h: &dyn SubgroupOracle, gen_bound: usize) -> usize {
    h.ambient_rank().map_or(gen_bound, |r| gen_bound.min(r))
}

/// The shortlex-least word `b` over generators `< gen_bound` with
/// `b a^-1 ∈ H`. Only words no longer than `a` are searched; `a` itself is
/// returned when nothing shorter qualifies.
pub fn coset_representative(h: &dyn SubgroupOracle, a: &FreeWord, gen_bound: usize) -> FreeWord {
    let gens = clamp_gens(h, gen_bound);
    let a_inv = a.inverse();
    for len in 0..=a.len() {
        for b in reduced_words(len, gens) {
            if b > *a {
                break;
            }
            if h.contains(&b.mul(&a_inv)) {
                return b;
            }
        }
    }
    a.clone()
}

/// Schreier generators `t x_n φ(t x_n)^-1` for every representative `t` of
/// a word of length at most `word_bound`, skipping trivial ones.
pub fn schreier_generators(h: &dyn SubgroupOracle, word_bound: usize, gen_bound: usize) -> Vec<FreeWord> {
    let gens = clamp_gens(h, gen_bound);
    let mut reps = BTreeSet::new();
    for len in 0..=word_bound {
        for a in reduced_words(len, gens) {
            reps.insert(coset_representative(h, &a, gens));
        }
    }
    let mut out = BTreeSet::new();
    for t in &reps {
        for n in 0..gens {
            let u = t.mul(&FreeWord::generator(n));
            let rep = coset_representative(h, &u, gens);
            if rep == u {
                continue;
            }
            out.insert(u.mul(&rep.inverse()));
        }
    }
    out.into_iter().collect()
}

/// The distinct coset representatives reached from words of length at most
/// `word_bound`.
pub fn transversal(h: &dyn SubgroupOracle, word_bound: usize, gen_bound: usize) -> Vec<FreeWord> {
    let gens = clamp_gens(h, gen_bound);
    let mut reps = BTreeSet::new();
    for len in 0..=word_bound {
        for a in reduced_words(len, gens) {
            reps.insert(coset_representative(h, &a, gens));
        }
    }
    reps.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> FreeWord {
        s.parse().unwrap()
    }

    #[test]
    fn reduction_and_printing() {
        let a = w("x0^2.x1^-1");
        assert_eq!(a.to_string(), "x0^2.x1^-1");
        assert!(a.mul(&a.inverse()).is_empty());
        assert_eq!(FreeWord::identity().to_string(), "e");
        assert_eq!(w("x0.x0.x1.x1^-1"), w("x0^2"));
        assert!("y1".parse::<FreeWord>().is_err());
        assert_eq!(a.len(), 3);
    }

    #[test]
    fn shortlex() {
        assert!(w("x0") < w("x0^-1"));
        assert!(w("x0^-1") < w("x1"));
        assert!(w("x5") < w("x0^2"));
        assert_eq!(reduced_words(2, 1), vec![w("x0^2"), w("x0^-2")]);
        assert_eq!(reduced_words(2, 2).len(), 12);
    }

    #[test]
    fn representatives() {
        let whole = FnOracle(|_: &FreeWord| true);
        assert!(coset_representative(&whole, &w("x1.x0"), 2).is_empty());
        let trivial = FnOracle(|x: &FreeWord| x.is_empty());
        assert_eq!(coset_representative(&trivial, &w("x1.x0"), 2), w("x1.x0"));
        let h = KernelOracle::cyclic(2, 2);
        assert_eq!(coset_representative(&h, &w("x1"), 2), w("x0"));
    }

    #[test]
    fn generator_examples() {
        let h = KernelOracle::cyclic(2, 2);
        let gens = schreier_generators(&h, 2, 2);
        let mut expect = vec![w("x0^2"), w("x1.x0^-1"), w("x0.x1")];
        expect.sort();
        assert_eq!(gens, expect);
        assert_eq!(transversal(&h, 2, 2), vec![FreeWord::identity(), w("x0")]);
        assert_eq!(schreier_generators(&KernelOracle::cyclic(1, 2), 2, 1), vec![w("x0^2")]);
        let whole = FnOracle(|_: &FreeWord| true);
        assert_eq!(schreier_generators(&whole, 1, 3), vec![w("x0"), w("x1"), w("x2")]);
    }
}
