//! Exact-rational linear combinations of normal-form path words.

use crate::word::Word;
use crate::Rat;
use num::Zero;
use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

/// An element of a presented algebra: a finite linear combination of
/// irreducible composable words with nonzero rational coefficients.
///
/// Elements do not carry their presentation; operations that need the
/// relations (multiplication, normalization) take it explicitly.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Element {
    pub terms: BTreeMap<Word, Rat>,
}

impl Element {
    pub fn zero() -> Element {
        Element { terms: BTreeMap::new() }
    }

    pub fn from_word(w: Word) -> Element {
        let mut terms = BTreeMap::new();
        terms.insert(w, Rat::from_integer(1.into()));
        Element { terms }
    }

    pub fn from_term(w: Word, c: Rat) -> Element {
        let mut e = Element::zero();
        e.add_term(w, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    /// The coefficient of the single word `w` (zero if absent).
    pub fn coeff(&self, w: &Word) -> Rat {
        self.terms.get(w).cloned().unwrap_or_else(Rat::zero)
    }

    /// If the element is a single word with coefficient 1, return it.
    pub fn as_single_word(&self) -> Option<&Word> {
        if self.terms.len() == 1 {
            let (w, c) = self.terms.iter().next().unwrap();
            if *c == Rat::from_integer(1.into()) {
                return Some(w);
            }
        }
        None
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c.clone())).collect(),
        }
    }
}
