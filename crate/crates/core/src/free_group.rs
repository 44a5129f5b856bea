//! Freely reduced words over a finite alphabet.
//!
//! Every [`Word`] is stored in freely reduced form. The generic helpers at the
//! top of the module (`free_reduce`, `cyclic_split`, `is_rotation`,
//! `primitive_period`) work over any [`FreeLetter`] so the same machinery can
//! be reused for words written in other free bases (see `hempel`).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::Mul;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeGroupError {
    #[error("root of the identity is undefined")]
    TrivialRoot,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
}

/// A letter of some free basis, with a formal inverse.
pub trait FreeLetter: Clone + Eq {
    fn inverse(&self) -> Self;
}

/// Stack-based free reduction.
pub fn free_reduce<L: FreeLetter>(letters: impl IntoIterator<Item = L>) -> Vec<L> {
    let mut out: Vec<L> = Vec::new();
    for l in letters {
        match out.last() {
            Some(top) if *top == l.inverse() => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    out
}

/// Number of letters peeled from each end of a freely reduced word to reach
/// its cyclically reduced core.
pub fn cyclic_split<L: FreeLetter>(reduced: &[L]) -> usize {
    let n = reduced.len();
    let mut k = 0;
    while 2 * k + 1 < n && reduced[k] == reduced[n - 1 - k].inverse() {
        k += 1;
    }
    k
}

/// True iff `a` is a cyclic rotation of `b`.
pub fn is_rotation<L: Eq>(a: &[L], b: &[L]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let n = a.len();
    (0..n).any(|s| (0..n).all(|i| a[i] == b[(i + s) % n]))
}

/// Length of the shortest prefix `p` with `s = p^k`, via the failure function.
pub fn primitive_period<L: Eq>(s: &[L]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && s[i] != s[k] {
            k = fail[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let p = n - fail[n - 1];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorId(pub usize);

/// Ordered, duplicate-free list of generator names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, FreeGroupError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(FreeGroupError::DuplicateGenerator(n.clone()));
            }
        }
        Ok(Alphabet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, g: GeneratorId) -> &str {
        &self.names[g.0]
    }

    pub fn lookup(&self, name: &str) -> Result<GeneratorId, FreeGroupError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(GeneratorId)
            .ok_or_else(|| FreeGroupError::UnknownGenerator(name.to_string()))
    }

    pub fn generators(&self) -> impl Iterator<Item = GeneratorId> {
        (0..self.names.len()).map(GeneratorId)
    }

    /// Exponent sum of the named generator.
    pub fn exponent_sum(&self, w: &Word, name: &str) -> Result<i64, FreeGroupError> {
        Ok(w.exponent_sum(self.lookup(name)?))
    }
}

/// A generator or its inverse. Ordered by (index, sign) with the positive
/// letter first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: GeneratorId,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: GeneratorId, sign: i32) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Letter { gen, inverse: sign < 0 }
    }

    pub fn pos(gen: usize) -> Self {
        Letter { gen: GeneratorId(gen), inverse: false }
    }

    pub fn neg(gen: usize) -> Self {
        Letter { gen: GeneratorId(gen), inverse: true }
    }

    pub fn sign(&self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

impl FreeLetter for Letter {
    fn inverse(&self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }
}

/// An element of the free group, always freely reduced.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

/// `original = conjugator * core * conjugator^-1`, with `core` cyclically reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicDecomposition {
    pub conjugator: Word,
    pub core: Word,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        Word { letters: free_reduce(letters) }
    }

    pub fn generator(g: GeneratorId) -> Self {
        Word { letters: vec![Letter { gen: g, inverse: false }] }
    }

    /// Word from signed 1-based indices: `3` is generator 2, `-1` is generator 0 inverted.
    pub fn from_signed(indices: &[i32]) -> Self {
        Word::from_letters(indices.iter().map(|&i| {
            assert!(i != 0, "signed index must be non-zero");
            Letter::new(GeneratorId(i.unsigned_abs() as usize - 1), i.signum())
        }))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn multiply(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        for l in &other.letters {
            match letters.last() {
                Some(top) if *top == l.inverse() => {
                    letters.pop();
                }
                _ => letters.push(*l),
            }
        }
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(FreeLetter::inverse).collect() }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.multiply(&base);
        }
        out
    }

    /// `c * self * c^-1`.
    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.multiply(self).multiply(&c.inverse())
    }

    pub fn cyclic_reduce(&self) -> CyclicDecomposition {
        let k = cyclic_split(&self.letters);
        let n = self.letters.len();
        CyclicDecomposition {
            conjugator: Word { letters: self.letters[..k].to_vec() },
            core: Word { letters: self.letters[k..n - k].to_vec() },
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        cyclic_split(&self.letters) == 0
    }

    /// The generator of the maximal cyclic subgroup containing `self` of
    /// which `self` is a positive power, together with that exponent.
    pub fn root(&self) -> Result<(Word, u64), FreeGroupError> {
        if self.is_identity() {
            return Err(FreeGroupError::TrivialRoot);
        }
        let CyclicDecomposition { conjugator, core } = self.cyclic_reduce();
        let p = primitive_period(&core.letters);
        let log = (core.len() / p) as u64;
        let period = Word { letters: core.letters[..p].to_vec() };
        Ok((period.conjugate_by(&conjugator), log))
    }

    pub fn exponent_sum(&self, g: GeneratorId) -> i64 {
        self.letters.iter().filter(|l| l.gen == g).map(Letter::sign).sum()
    }

    pub fn involves(&self, set: &BTreeSet<GeneratorId>) -> bool {
        self.letters.iter().any(|l| set.contains(&l.gen))
    }

    pub fn involves_generator(&self, g: GeneratorId) -> bool {
        self.letters.iter().any(|l| l.gen == g)
    }

    /// Conjugacy in the free group: cyclic cores are rotations of each other.
    pub fn is_conjugate_to(&self, other: &Word) -> bool {
        is_rotation(&self.cyclic_reduce().core.letters, &other.cyclic_reduce().core.letters)
    }

    /// Maximum generator index used plus one.
    pub fn support_bound(&self) -> usize {
        self.letters.iter().map(|l| l.gen.0 + 1).max().unwrap_or(0)
    }

    /// Apply a substitution of generators by words.
    pub fn substitute(&self, image: impl Fn(GeneratorId) -> Word) -> Word {
        let mut out = Word::identity();
        for l in &self.letters {
            let w = if l.inverse { image(l.gen).inverse() } else { image(l.gen) };
            out = out.multiply(&w);
        }
        out
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> WordDisplay<'a> {
        WordDisplay { word: self, alphabet }
    }
}

impl Ord for Word {
    /// Length first, then lexicographic by (index, sign).
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        self.multiply(rhs)
    }
}

impl Mul for Word {
    type Output = Word;
    fn mul(self, rhs: Word) -> Word {
        self.multiply(&rhs)
    }
}

/// Renders a word as `x^2*y^-1*x`, grouping runs of equal letters. The
/// identity is rendered as `1`.
pub struct WordDisplay<'a> {
    word: &'a Word,
    alphabet: &'a Alphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = &self.word.letters;
        if letters.is_empty() {
            return write!(f, "1");
        }
        let mut i = 0;
        let mut first = true;
        while i < letters.len() {
            let mut j = i;
            while j < letters.len() && letters[j] == letters[i] {
                j += 1;
            }
            let exp = (j - i) as i64 * letters[i].sign();
            if !first {
                write!(f, "*")?;
            }
            first = false;
            let name = self.alphabet.name(letters[i].gen);
            if exp == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{exp}")?;
            }
            i = j;
        }
        Ok(())
    }
}
