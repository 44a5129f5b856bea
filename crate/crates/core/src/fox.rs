//! Fox free derivatives in the integral group ring of a free group.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::free_group::{Alphabet, GeneratorId, Word};

/// A finite integer combination of words. Zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FreeRingElement {
    terms: BTreeMap<Word, BigInt>,
}

impl FreeRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::identity())
    }

    pub fn from_word(w: Word) -> Self {
        Self::from_term(w, BigInt::one())
    }

    pub fn from_term(w: Word, c: BigInt) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e
    }

    /// `w - 1`.
    pub fn word_minus_one(w: &Word) -> Self {
        Self::from_word(w.clone()) - Self::one()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> BigInt {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, w: Word, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    /// Left multiplication by a group element.
    pub fn left_mul_word(&self, w: &Word) -> Self {
        let mut out = Self::zero();
        for (t, c) in &self.terms {
            out.add_term(w.multiply(t), c.clone());
        }
        out
    }

    /// Ring homomorphism to the integers sending every word to 1.
    pub fn augment(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> RingDisplay<'a> {
        RingDisplay { elem: self, alphabet }
    }
}

impl Add for FreeRingElement {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (w, c) in rhs.terms {
            self.add_term(w, c);
        }
        self
    }
}

impl Neg for FreeRingElement {
    type Output = Self;
    fn neg(self) -> Self {
        FreeRingElement { terms: self.terms.into_iter().map(|(w, c)| (w, -c)).collect() }
    }
}

impl Sub for FreeRingElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for &FreeRingElement {
    type Output = FreeRingElement;
    fn mul(self, rhs: &FreeRingElement) -> FreeRingElement {
        let mut out = FreeRingElement::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.multiply(b), ca * cb);
            }
        }
        out
    }
}

/// The Fox derivative of `w` with respect to `g`, accumulated left to right
/// over a running prefix: a letter `g` contributes `+prefix`, a letter `g^-1`
/// contributes `-prefix*g^-1`.
pub fn fox_derivative(w: &Word, g: GeneratorId) -> FreeRingElement {
    let mut out = FreeRingElement::zero();
    let mut prefix = Word::identity();
    for l in w.letters() {
        let step = Word::from_letters([*l]);
        if l.gen == g {
            if l.inverse {
                out.add_term(prefix.multiply(&step), -BigInt::one());
            } else {
                out.add_term(prefix.clone(), BigInt::one());
            }
        }
        prefix = prefix.multiply(&step);
    }
    out
}

/// All partial derivatives of `w` over an alphabet of `n_gens` generators.
pub fn total_derivative(w: &Word, n_gens: usize) -> Vec<FreeRingElement> {
    (0..n_gens).map(|i| fox_derivative(w, GeneratorId(i))).collect()
}

/// Checks `sum_i (dw/dx_i)(x_i - 1) = w - 1` in the free group ring.
pub fn fundamental_identity_check(w: &Word, n_gens: usize) -> bool {
    let n = n_gens.max(w.support_bound());
    let lhs = total_derivative(w, n).iter().enumerate().fold(FreeRingElement::zero(), |acc, (i, d)| {
        let x = Word::generator(GeneratorId(i));
        acc + d * &FreeRingElement::word_minus_one(&x)
    });
    lhs == FreeRingElement::word_minus_one(w)
}

pub struct RingDisplay<'a> {
    elem: &'a FreeRingElement,
    alphabet: &'a Alphabet,
}

impl fmt::Display for RingDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elem.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.elem.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if w.is_identity() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", w.display(self.alphabet))?;
            } else {
                write!(f, "{abs}*{}", w.display(self.alphabet))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::Letter;
    use proptest::prelude::*;

    fn w(s: &[i32]) -> Word {
        Word::from_signed(s)
    }

    fn e(terms: &[(&[i32], i64)]) -> FreeRingElement {
        terms
            .iter()
            .fold(FreeRingElement::zero(), |acc, (t, c)| acc + FreeRingElement::from_term(w(t), BigInt::from(*c)))
    }

    fn word_strategy(max_len: usize, gens: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((0..gens, any::<bool>()), 0..=max_len).prop_map(|v| {
            Word::from_letters(v.into_iter().map(|(g, inv)| Letter { gen: GeneratorId(g), inverse: inv }))
        })
    }

    #[test]
    fn derivative_examples() {
        let x = GeneratorId(0);
        assert_eq!(fox_derivative(&w(&[1]), x), FreeRingElement::one());
        assert_eq!(fox_derivative(&w(&[-1]), x), e(&[(&[-1], -1)]));
        // d[x,y]/dx = 1 - x y x^-1
        assert_eq!(fox_derivative(&w(&[1, 2, -1, -2]), x), e(&[(&[], 1), (&[1, 2, -1], -1)]));
        assert_eq!(fox_derivative(&w(&[2]), x), FreeRingElement::zero());
    }

    #[test]
    fn total_derivative_examples() {
        assert_eq!(total_derivative(&w(&[1, 2]), 2), vec![FreeRingElement::one(), e(&[(&[1], 1)])]);
        assert!(total_derivative(&Word::identity(), 3).iter().all(FreeRingElement::is_zero));
        let d = total_derivative(&w(&[1, 1, 1, 1]), 1);
        assert_eq!(d[0], e(&[(&[], 1), (&[1], 1), (&[1, 1], 1), (&[1, 1, 1], 1)]));
    }

    #[test]
    fn augmentation_examples() {
        assert_eq!(e(&[(&[], 1), (&[1, 2, -1], -1)]).augment(), BigInt::zero());
        assert_eq!(e(&[(&[], 1), (&[1], 1), (&[1, 1], 1)]).augment(), BigInt::from(3));
    }

    #[test]
    fn fundamental_identity_examples() {
        assert!(fundamental_identity_check(&w(&[1]), 1));
        assert!(fundamental_identity_check(&w(&[1, 2, -1, -2]), 2));
        assert!(fundamental_identity_check(&Word::identity(), 0));
    }

    #[test]
    fn display() {
        let a = Alphabet::new(["x", "y"]).unwrap();
        let d = fox_derivative(&w(&[1, 2, -1, -2]), GeneratorId(0));
        assert_eq!(d.display(&a).to_string(), "1 - x*y*x^-1");
        assert_eq!(e(&[(&[1], -2), (&[], 3)]).display(&a).to_string(), "3 - 2*x");
        assert_eq!(FreeRingElement::zero().display(&a).to_string(), "0");
    }

    proptest! {
        #[test]
        fn derivation_law(a in word_strategy(24, 3), b in word_strategy(24, 3), g in 0usize..3) {
            let g = GeneratorId(g);
            let lhs = fox_derivative(&a.multiply(&b), g);
            let rhs = fox_derivative(&a, g) + fox_derivative(&b, g).left_mul_word(&a);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn inverse_law(a in word_strategy(32, 3), g in 0usize..3) {
            let g = GeneratorId(g);
            let inv = a.inverse();
            prop_assert_eq!(fox_derivative(&inv, g), -fox_derivative(&a, g).left_mul_word(&inv));
        }

        #[test]
        fn augment_is_exponent_sum(a in word_strategy(48, 4), g in 0usize..4) {
            let g = GeneratorId(g);
            prop_assert_eq!(fox_derivative(&a, g).augment(), BigInt::from(a.exponent_sum(g)));
        }
    }
}
