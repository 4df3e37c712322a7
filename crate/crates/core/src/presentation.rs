//! Presented associative algebras over a semisimple base of vertex
//! idempotents: path algebras of (double) quivers extended by localization
//! letters, with a terminating rewriting normalizer.
//!
//! Localization is realized by adjoined inverse letters with oriented rules
//! rather than fractions. For a double quiver every arrow `a` with partner
//! `a~` contributes the letter `La` inverting `e_{t(a)} + a a~` and the rules
//!
//! ```text
//!   La a a~  ->  e_{t(a)} - La
//!   a a~ La  ->  e_{t(a)} - La
//!   La a     ->  a La~
//! ```
//!
//! The commutation rule is forced: `(1 + a a~) a = a (1 + a~ a)` holds in the
//! path algebra, so the two inverse letters slide past `a`, and without the
//! oriented version the first two families are not confluent.

use crate::element::Element;
use crate::quiver::{DoubleQuiver, Quiver};
use crate::word::{LetterId, VertexId, Word};
use crate::{rint, Rat};
use num::One;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("rewriting exceeded the step budget of {0}")]
    NonTerminating(usize),
    #[error("rule is not vertex-type correct: {0}")]
    IllTypedRule(String),
    #[error("rule is not decreasing in the term order: {0}")]
    BadOrientation(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("decomposition of 1 does not multiply back to 1")]
    BadDecomposition,
    #[error("element has no declared inverse")]
    NotInvertible,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LetterKind {
    /// Quiver arrow; carries a basis differential.
    Arrow,
    /// Localization letter; its differential expands through the inverted
    /// element.
    Inverse,
    /// Matrix unit adjoined by fusion; lives in the base ring, `d = 0`.
    Unit,
}

#[derive(Clone, Debug)]
pub struct Letter {
    pub id: String,
    pub src: VertexId,
    pub tgt: VertexId,
    pub kind: LetterKind,
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub lhs: Vec<LetterId>,
    pub rhs: Element,
}

/// Default rewrite step budget per normalized element.
pub const DEFAULT_STEP_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct Presentation {
    pub vertices: Vec<String>,
    pub letters: Vec<Letter>,
    pub rules: Vec<Rule>,
    /// Inverse letter -> the element it inverts.
    pub inverts: BTreeMap<LetterId, Element>,
    /// Star involution on arrow letters of a double quiver, when present.
    pub star: BTreeMap<LetterId, LetterId>,
    pub step_budget: usize,
}

impl Presentation {
    pub fn new(vertices: Vec<String>) -> Presentation {
        Presentation {
            vertices,
            letters: Vec::new(),
            rules: Vec::new(),
            inverts: BTreeMap::new(),
            star: BTreeMap::new(),
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }

    pub fn vertex_index(&self, id: &str) -> Result<VertexId, AlgebraError> {
        self.vertices
            .iter()
            .position(|v| v == id)
            .map(|i| i as VertexId)
            .ok_or_else(|| AlgebraError::UnknownVertex(id.to_string()))
    }

    pub fn letter_index(&self, id: &str) -> Result<LetterId, AlgebraError> {
        self.letters
            .iter()
            .position(|l| l.id == id)
            .map(|i| i as LetterId)
            .ok_or_else(|| AlgebraError::UnknownLetter(id.to_string()))
    }

    pub fn letter(&self, l: LetterId) -> &Letter {
        &self.letters[l as usize]
    }

    pub fn add_letter(&mut self, id: &str, src: &str, tgt: &str, kind: LetterKind) -> LetterId {
        let src = self.vertex_index(src).expect("declared vertex");
        let tgt = self.vertex_index(tgt).expect("declared vertex");
        self.letters.push(Letter { id: id.to_string(), src, tgt, kind });
        (self.letters.len() - 1) as LetterId
    }

    pub fn word_src(&self, w: &Word) -> VertexId {
        match w {
            Word::Id(v) => *v,
            Word::Path(ls) => self.letter(*ls.last().unwrap()).src,
        }
    }

    pub fn word_tgt(&self, w: &Word) -> VertexId {
        match w {
            Word::Id(v) => *v,
            Word::Path(ls) => self.letter(*ls.first().unwrap()).tgt,
        }
    }

    pub fn word_composable(&self, w: &Word) -> bool {
        let ls = w.letters();
        ls.windows(2).all(|p| self.letter(p[0]).src == self.letter(p[1]).tgt)
    }

    /// Concatenate two words, or `None` when the seam does not compose.
    pub fn concat(&self, a: &Word, b: &Word) -> Option<Word> {
        if self.word_src(a) != self.word_tgt(b) {
            return None;
        }
        Some(match (a, b) {
            (Word::Id(_), _) => b.clone(),
            (_, Word::Id(_)) => a.clone(),
            (Word::Path(x), Word::Path(y)) => {
                let mut ls = x.clone();
                ls.extend_from_slice(y);
                Word::Path(ls)
            }
        })
    }

    /// The unit 1 = sum of all vertex idempotents.
    pub fn one(&self) -> Element {
        let mut e = Element::zero();
        for v in 0..self.vertices.len() {
            e.add_term(Word::Id(v as VertexId), Rat::one());
        }
        e
    }

    pub fn idempotent(&self, v: VertexId) -> Element {
        Element::from_word(Word::Id(v))
    }

    pub fn letter_elt(&self, l: LetterId) -> Element {
        Element::from_word(Word::single(l))
    }

    /// Validate a rule and append it.
    pub fn add_rule(&mut self, lhs: Vec<LetterId>, rhs: Element) -> Result<(), AlgebraError> {
        let lw = Word::path(lhs.clone());
        if !self.word_composable(&lw) {
            return Err(AlgebraError::IllTypedRule(self.word_string(&lw)));
        }
        let (s, t) = (self.word_src(&lw), self.word_tgt(&lw));
        for w in rhs.terms.keys() {
            if !self.word_composable(w) || self.word_src(w) != s || self.word_tgt(w) != t {
                return Err(AlgebraError::IllTypedRule(self.word_string(w)));
            }
            if *w >= lw {
                return Err(AlgebraError::BadOrientation(self.word_string(w)));
            }
        }
        self.rules.push(Rule { lhs, rhs });
        Ok(())
    }

    /// Leftmost-innermost exhaustive rewriting of a single raw word, with the
    /// presentation's step budget shared through `steps`.
    fn normalize_word_into(
        &self,
        w: Word,
        c: Rat,
        out: &mut Element,
        steps: &mut usize,
    ) -> Result<(), AlgebraError> {
        let mut stack = vec![(w, c)];
        while let Some((w, c)) = stack.pop() {
            if !self.word_composable(&w) {
                continue;
            }
            let ls = w.letters();
            let mut redex = None;
            'scan: for pos in 0..ls.len() {
                for (ri, rule) in self.rules.iter().enumerate() {
                    let n = rule.lhs.len();
                    if pos + n <= ls.len() && ls[pos..pos + n] == rule.lhs[..] {
                        redex = Some((pos, ri));
                        break 'scan;
                    }
                }
            }
            match redex {
                None => out.add_term(w, c),
                Some((pos, ri)) => {
                    *steps += 1;
                    if *steps > self.step_budget {
                        return Err(AlgebraError::NonTerminating(self.step_budget));
                    }
                    let rule = &self.rules[ri];
                    let n = rule.lhs.len();
                    let prefix = &ls[..pos];
                    let suffix = &ls[pos + n..];
                    for (rw, rc) in &rule.rhs.terms {
                        let mut letters = prefix.to_vec();
                        letters.extend_from_slice(rw.letters());
                        letters.extend_from_slice(suffix);
                        let nw = if letters.is_empty() {
                            // prefix and suffix empty, rw an idempotent
                            Word::Id(self.word_src(&w))
                        } else {
                            Word::Path(letters)
                        };
                        stack.push((nw, c.clone() * rc));
                    }
                }
            }
        }
        Ok(())
    }

    /// Is the word already irreducible (composable and redex-free)?
    pub fn word_is_normal(&self, w: &Word) -> bool {
        if !self.word_composable(w) {
            return false;
        }
        let ls = w.letters();
        for pos in 0..ls.len() {
            for rule in &self.rules {
                let n = rule.lhs.len();
                if pos + n <= ls.len() && ls[pos..pos + n] == rule.lhs[..] {
                    return false;
                }
            }
        }
        true
    }

    /// Normalize a formal combination of words to its unique normal form.
    pub fn normalize(&self, raw: &Element) -> Result<Element, AlgebraError> {
        let mut out = Element::zero();
        let mut steps = 0usize;
        for (w, c) in &raw.terms {
            self.normalize_word_into(w.clone(), c.clone(), &mut out, &mut steps)?;
        }
        Ok(out)
    }

    pub fn normalize_word(&self, w: Word) -> Result<Element, AlgebraError> {
        self.normalize(&Element::from_word(w))
    }

    /// Product of two normalized elements, normalized.
    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element, AlgebraError> {
        let mut raw = Element::zero();
        for (wa, ca) in &a.terms {
            for (wb, cb) in &b.terms {
                if let Some(w) = self.concat(wa, wb) {
                    raw.add_term(w, ca * cb);
                }
            }
        }
        self.normalize(&raw)
    }

    pub fn mul_all(&self, factors: &[&Element]) -> Result<Element, AlgebraError> {
        let mut acc = self.one();
        for f in factors {
            acc = self.mul(&acc, f)?;
        }
        Ok(acc)
    }

    /// Register `letter` as the two-sided inverse of `of`.
    pub fn register_inverse(&mut self, letter: LetterId, of: Element) {
        self.inverts.insert(letter, of);
    }

    /// Look up a declared inverse for a normalized element: either a
    /// registered inverted element (giving its letter) or an inverse letter
    /// (giving back what it inverts).
    pub fn inverse_of(&self, e: &Element) -> Result<Element, AlgebraError> {
        for (l, s) in &self.inverts {
            if s == e {
                return Ok(self.letter_elt(*l));
            }
        }
        if let Some(w) = e.as_single_word() {
            if let Word::Path(ls) = w {
                if ls.len() == 1 {
                    if let Some(s) = self.inverts.get(&ls[0]) {
                        return Ok(s.clone());
                    }
                }
            }
            if let Word::Id(_) = w {
                return Ok(e.clone());
            }
        }
        Err(AlgebraError::NotInvertible)
    }

    /// Trace of `a` onto the corner cut out by the idempotent `e`, using a
    /// decomposition `1 = sum_i p_i e q_i` (checked).
    pub fn trace_to_corner(
        &self,
        a: &Element,
        e: &Element,
        decomposition: &[(Element, Element)],
    ) -> Result<Element, AlgebraError> {
        let mut unit = Element::zero();
        for (p, q) in decomposition {
            unit = &unit + &self.mul_all(&[p, e, q])?;
        }
        if unit != self.one() {
            return Err(AlgebraError::BadDecomposition);
        }
        let mut out = Element::zero();
        for (p, q) in decomposition {
            out = &out + &self.mul_all(&[e, q, a, p, e])?;
        }
        Ok(out)
    }

    // ---- printing ----

    pub fn word_string(&self, w: &Word) -> String {
        match w {
            Word::Id(v) => format!("e({})", self.vertices[*v as usize]),
            Word::Path(ls) => {
                let mut s = String::new();
                for (i, l) in ls.iter().enumerate() {
                    if i > 0 {
                        s.push('*');
                    }
                    s.push_str(&self.letter(*l).id);
                }
                s
            }
        }
    }

    pub fn element_string(&self, e: &Element) -> String {
        if e.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (w, c)) in e.terms.iter().enumerate() {
            if i > 0 {
                s.push_str(" + ");
            }
            if c == &Rat::one() {
                s.push_str(&self.word_string(w));
            } else {
                let _ = write!(s, "{}*{}", c, self.word_string(w));
            }
        }
        s
    }
}

// ---- bundled presentations ----

/// The Laurent polynomial algebra in one variable: one vertex, letters `x`
/// and `Lx`, rules `x Lx -> 1`, `Lx x -> 1`.
pub fn laurent_x() -> Presentation {
    let mut p = Presentation::new(vec!["1".into()]);
    let x = p.add_letter("x", "1", "1", LetterKind::Arrow);
    let lx = p.add_letter("Lx", "1", "1", LetterKind::Inverse);
    let one = p.idempotent(0);
    p.add_rule(vec![x, lx], one.clone()).unwrap();
    p.add_rule(vec![lx, x], one).unwrap();
    p.register_inverse(lx, p.letter_elt(x));
    p
}

/// The free algebra on two invertible generators `x`, `y`.
pub fn free_two_inv() -> Presentation {
    let mut p = Presentation::new(vec!["1".into()]);
    let x = p.add_letter("x", "1", "1", LetterKind::Arrow);
    let y = p.add_letter("y", "1", "1", LetterKind::Arrow);
    let lx = p.add_letter("Lx", "1", "1", LetterKind::Inverse);
    let ly = p.add_letter("Ly", "1", "1", LetterKind::Inverse);
    let one = p.idempotent(0);
    p.add_rule(vec![x, lx], one.clone()).unwrap();
    p.add_rule(vec![lx, x], one.clone()).unwrap();
    p.add_rule(vec![y, ly], one.clone()).unwrap();
    p.add_rule(vec![ly, y], one).unwrap();
    p.register_inverse(lx, p.letter_elt(x));
    p.register_inverse(ly, p.letter_elt(y));
    p
}

/// Plain path algebra of a quiver (no relations).
pub fn path_algebra(q: &Quiver) -> Presentation {
    let mut p = Presentation::new(q.vertices.clone());
    for a in &q.arrows {
        p.add_letter(&a.id, &a.src, &a.dst, LetterKind::Arrow);
    }
    p
}

/// Path algebra of the double quiver of `q`, localized at `e_{t(a)} + a a~`
/// for every arrow `a` of the double.
pub fn double_localized(dq: &DoubleQuiver) -> Presentation {
    let q = &dq.quiver;
    let mut p = Presentation::new(q.vertices.clone());
    for a in &q.arrows {
        p.add_letter(&a.id, &a.src, &a.dst, LetterKind::Arrow);
    }
    let n = q.arrows.len();
    debug_assert_eq!(dq.base_count * 2, n);
    let partner = |i: usize| -> usize {
        if i < dq.base_count {
            i + dq.base_count
        } else {
            i - dq.base_count
        }
    };
    // Inverse letters, one per arrow of the double, in arrow order.
    let mut inv = Vec::with_capacity(n);
    for (i, a) in q.arrows.iter().enumerate() {
        let l = p.add_letter(&format!("L{}", a.id), &a.dst, &a.dst, LetterKind::Inverse);
        inv.push(l);
        let _ = i;
    }
    for i in 0..n {
        let a = i as LetterId;
        let ab = partner(i) as LetterId;
        let la = inv[i];
        let lab = inv[partner(i)];
        let t = p.letter(a).tgt;
        let s_elt = {
            // e_{t(a)} + a a~
            let mut e = p.idempotent(t);
            e.add_term(Word::path(vec![a, ab]), Rat::one());
            e
        };
        let mut rhs = p.idempotent(t);
        rhs.add_term(Word::single(la), -rint(1));
        p.add_rule(vec![la, a, ab], rhs.clone()).unwrap();
        p.add_rule(vec![a, ab, la], rhs).unwrap();
        let slide = Element::from_word(Word::path(vec![a, lab]));
        p.add_rule(vec![la, a], slide).unwrap();
        p.register_inverse(la, s_elt);
        p.star.insert(a, ab);
    }
    p
}

/// The localized double A2 from the multiplicative examples: letters
/// `e, e*, Le, Le*`, with `Le*` inverting `a1 = e_1 + e* e` and `Le`
/// inverting `a2 = e_2 + e e*`.
pub fn a2_localized() -> Presentation {
    double_localized(&crate::quiver::double(&Quiver::a2()))
}

/// The moment element `Phi = a1^{-1} + a2` of the localized double A2.
pub fn a2_phi(p: &Presentation) -> Element {
    let mut phi = p.letter_elt(p.letter_index("Le*").unwrap());
    phi.add_term(Word::Id(1), Rat::one());
    phi.add_term(
        Word::path(vec![p.letter_index("e").unwrap(), p.letter_index("e*").unwrap()]),
        Rat::one(),
    );
    phi
}

/// `Phi^{-1} = a1 + a2^{-1}` of the localized double A2.
pub fn a2_phi_inv(p: &Presentation) -> Element {
    let mut phi = p.letter_elt(p.letter_index("Le").unwrap());
    phi.add_term(Word::Id(0), Rat::one());
    phi.add_term(
        Word::path(vec![p.letter_index("e*").unwrap(), p.letter_index("e").unwrap()]),
        Rat::one(),
    );
    phi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Word;

    fn w(p: &Presentation, ids: &[&str]) -> Word {
        Word::path(ids.iter().map(|s| p.letter_index(s).unwrap()).collect())
    }

    #[test]
    fn laurent_inverse_collapses() {
        let p = laurent_x();
        let e = p.normalize_word(w(&p, &["x", "Lx"])).unwrap();
        assert_eq!(e, p.one());
    }

    #[test]
    fn a2_localized_normalizes_l1_estar_e() {
        // Le* e* e -> e(1) - Le*
        let p = a2_localized();
        let nf = p.normalize_word(w(&p, &["Le*", "e*", "e"])).unwrap();
        let mut expected = p.idempotent(0);
        expected.add_term(Word::single(p.letter_index("Le*").unwrap()), -rint(1));
        assert_eq!(nf, expected);
    }

    #[test]
    fn incomposable_words_die() {
        let p = a2_localized();
        let e = p.letter_index("e").unwrap();
        let raw = Element::from_word(Word::path(vec![e, e]));
        assert!(p.normalize(&raw).unwrap().is_zero());
    }

    #[test]
    fn phi_sandwich_identities() {
        // Phi e Phi = e and Phi e* Phi = e* with Phi = a1^{-1} + a2.
        let p = a2_localized();
        let phi = a2_phi(&p);
        let e = p.letter_elt(p.letter_index("e").unwrap());
        let estar = p.letter_elt(p.letter_index("e*").unwrap());
        assert_eq!(p.mul_all(&[&phi, &e, &phi]).unwrap(), e);
        assert_eq!(p.mul_all(&[&phi, &estar, &phi]).unwrap(), estar);
        // Phi and its inverse multiply to 1 both ways.
        let phi_inv = a2_phi_inv(&p);
        assert_eq!(p.mul(&phi, &phi_inv).unwrap(), p.one());
        assert_eq!(p.mul(&phi_inv, &phi).unwrap(), p.one());
    }

    #[test]
    fn idempotent_typing() {
        let p = a2_localized();
        let e = p.letter_elt(p.letter_index("e").unwrap());
        let e2 = p.idempotent(1);
        let e1 = p.idempotent(0);
        assert_eq!(p.mul(&e2, &e).unwrap(), e);
        assert!(p.mul(&e1, &e).unwrap().is_zero());
    }

    #[test]
    fn rules_must_decrease() {
        let mut p = Presentation::new(vec!["1".into()]);
        let x = p.add_letter("x", "1", "1", LetterKind::Arrow);
        let y = p.add_letter("y", "1", "1", LetterKind::Arrow);
        // x y -> y x is not decreasing in the term order.
        let rhs = Element::from_word(Word::path(vec![y, x]));
        assert!(matches!(p.add_rule(vec![x, y], rhs), Err(AlgebraError::BadOrientation(_))));
    }

    #[test]
    fn exhausted_step_budget_is_an_error() {
        let mut p = laurent_x();
        p.step_budget = 1;
        let x = p.letter_index("x").unwrap();
        let lx = p.letter_index("Lx").unwrap();
        let w = Word::path(vec![x, lx, x, lx]);
        assert!(matches!(p.normalize_word(w), Err(AlgebraError::NonTerminating(1))));
    }

    #[test]
    fn trace_to_corner_stays_in_corner() {
        let p = laurent_x();
        let one = p.one();
        let decomp = vec![(one.clone(), one.clone())];
        let x = p.letter_elt(0);
        let t = p.trace_to_corner(&x, &one, &decomp).unwrap();
        assert_eq!(t, x);
        let bad = vec![(x.clone(), x.clone())];
        assert!(p.trace_to_corner(&x, &one, &bad).is_err());
    }
}
