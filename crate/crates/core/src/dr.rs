//! Equality in the Karoubi-de Rham quotient: membership of a difference of
//! forms in the span of graded commutators.
//!
//! The commutator span in each weight is generated by the single-step
//! rotation relations `m - sign * rotate(m)` over monomials `m` (moving one
//! leading letter, or one leading differential, to the far end, with the
//! Koszul sign and seam renormalization). The decision procedure closes the
//! monomials of the difference under rotation up to a depth budget, reduces
//! the difference against the collected relations, and reports a replayable
//! combination on success. Rotation interacts with rewriting, so there is no
//! canonical cyclic form; verdicts are `equal` and `distinct` certificates
//! plus `undecided` on budget exhaustion.

use crate::forms::{self, Form, FormTerm};
use crate::linalg::{RowSpan, SparseVec};
use crate::presentation::{AlgebraError, Presentation};
use crate::word::Word;
use crate::Rat;
use num::One;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DrVerdict {
    Equal,
    Distinct,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct DrOutcome {
    pub verdict: DrVerdict,
    /// On `Equal`: coefficients over the rotation relations used, each given
    /// as a replayable `monomial ~ sign * rotation` string.
    pub certificate: Vec<(String, String)>,
    pub closure_size: usize,
    pub rounds: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct DrBudget {
    /// Closure rounds (each round rotates the current frontier once).
    pub depth: usize,
    /// Hard cap on distinct monomials collected.
    pub max_monomials: usize,
}

impl Default for DrBudget {
    fn default() -> DrBudget {
        DrBudget { depth: 6, max_monomials: 20_000 }
    }
}

struct Closure {
    index: BTreeMap<FormTerm, usize>,
    relations: Vec<String>,
    span: RowSpan,
}

impl Closure {
    fn index_of(&mut self, t: &FormTerm) -> usize {
        if let Some(&i) = self.index.get(t) {
            return i;
        }
        let i = self.index.len();
        self.index.insert(t.clone(), i);
        i
    }
}

fn vectorize(cl: &mut Closure, f: &Form) -> SparseVec {
    f.terms
        .iter()
        .map(|(t, c)| (cl.index_of(t), c.clone()))
        .collect()
}

/// All composable words up to a length bound, reducible ones included.
fn enumerate_composable_words(
    p: &Presentation,
    max_len: usize,
    cap: usize,
) -> Option<Vec<Word>> {
    let mut out: Vec<Word> =
        (0..p.vertices.len()).map(|v| Word::Id(v as crate::word::VertexId)).collect();
    let mut level = out.clone();
    for _ in 1..=max_len {
        let mut next = Vec::new();
        for w in &level {
            for l in 0..p.letters.len() as crate::word::LetterId {
                if p.letter(l).tgt != p.word_src(w) {
                    continue;
                }
                let mut ls = w.letters().to_vec();
                ls.push(l);
                next.push(Word::Path(ls));
            }
        }
        out.extend(next.iter().cloned());
        if out.len() > cap {
            return None;
        }
        level = next;
    }
    Some(out)
}

/// Complete weight-zero decision over a bounded word length: the commutator
/// span is generated by `N(w) - N(rotate(w))` over ALL composable words `w`
/// up to the bound (rotating before normalization matters, since a reducible
/// product contributes a relation its normal form alone would not).
fn dr_zero_weight0_bounded(
    p: &Presentation,
    xi: &Form,
    max_len: usize,
    cap: usize,
) -> Result<Option<DrOutcome>, AlgebraError> {
    let Some(words) = enumerate_composable_words(p, max_len, cap) else {
        return Ok(None);
    };
    let mut cl = Closure { index: BTreeMap::new(), relations: Vec::new(), span: RowSpan::new() };
    let target = vectorize(&mut cl, xi);
    let as_term = |w: &Word| FormTerm { words: vec![w.clone()], diffs: vec![] };
    for w in &words {
        let ls = w.letters();
        if ls.is_empty() {
            continue;
        }
        // Moving the first letter to the far end crosses the base ring: a
        // boundary mismatch annihilates the rotation ([x, rest] = x rest).
        let first = p.letter(ls[0]);
        let rhs = if ls.len() == 1 {
            if first.src == first.tgt {
                continue; // a loop letter rotates to itself
            }
            crate::element::Element::zero()
        } else if p.word_src(w) != first.tgt {
            crate::element::Element::zero()
        } else {
            let mut r = ls[1..].to_vec();
            r.push(ls[0]);
            p.normalize_word(Word::Path(r))?
        };
        let lhs = p.normalize_word(w.clone())?;
        let mut rel: SparseVec = BTreeMap::new();
        for (u, c) in &lhs.terms {
            let j = cl.index_of(&as_term(u));
            let entry = rel.entry(j).or_insert_with(num::Zero::zero);
            *entry += c;
            if num::Zero::is_zero(entry) {
                rel.remove(&j);
            }
        }
        for (u, c) in &rhs.terms {
            let j = cl.index_of(&as_term(u));
            let entry = rel.entry(j).or_insert_with(num::Zero::zero);
            *entry -= c;
            if num::Zero::is_zero(entry) {
                rel.remove(&j);
            }
        }
        if rel.is_empty() {
            continue;
        }
        cl.relations.push(format!(
            "{} ~ {}",
            p.word_string(w),
            p.element_string(&rhs)
        ));
        cl.span.insert(rel);
    }
    let (verdict, certificate) = match cl.span.membership(target) {
        Some(comb) => (
            DrVerdict::Equal,
            comb.into_iter().map(|(i, c)| (cl.relations[i].clone(), c.to_string())).collect(),
        ),
        None => (DrVerdict::Distinct, vec![]),
    };
    Ok(Some(DrOutcome { verdict, certificate, closure_size: words.len(), rounds: 0 }))
}

/// Decide `a == b` modulo graded commutators.
///
/// Weight-zero differences are decided over a complete relation basis up to
/// a bounded word length whenever that enumeration fits the monomial budget.
/// Other weights close the difference's monomials under forward rotation up
/// to the depth budget; there `equal` comes with a replayable certificate,
/// while `distinct` certifies only that the stabilized forward closure
/// carries no certificate.
pub fn dr_equal(
    p: &Presentation,
    a: &Form,
    b: &Form,
    budget: &DrBudget,
) -> Result<DrOutcome, AlgebraError> {
    let xi = a.sub(b);
    if xi.is_zero() {
        return Ok(DrOutcome {
            verdict: DrVerdict::Equal,
            certificate: vec![],
            closure_size: 0,
            rounds: 0,
        });
    }
    let max_len = xi
        .terms
        .keys()
        .map(|t| t.words.iter().map(|w| w.len()).sum::<usize>() + t.diffs.len())
        .max()
        .unwrap_or(0);
    if xi.weight == 0 {
        for slack in (2..=6).rev() {
            if let Some(out) =
                dr_zero_weight0_bounded(p, &xi, max_len + slack, budget.max_monomials)?
            {
                return Ok(out);
            }
        }
    }
    let mut cl = Closure { index: BTreeMap::new(), relations: Vec::new(), span: RowSpan::new() };
    let target = vectorize(&mut cl, &xi);
    let mut frontier: Vec<FormTerm> = xi.terms.keys().cloned().collect();
    let mut processed: BTreeMap<FormTerm, ()> = BTreeMap::new();
    let mut rounds = 0;
    let mut stabilized = false;
    for _ in 0..budget.depth {
        rounds += 1;
        let mut next = Vec::new();
        for m in frontier.drain(..) {
            if processed.contains_key(&m) {
                continue;
            }
            processed.insert(m.clone(), ());
            let Some((sign, rotated)) = forms::rotate_term(p, &m)? else { continue };
            let mut rel: SparseVec = BTreeMap::new();
            rel.insert(cl.index_of(&m), Rat::one());
            let mut desc = String::new();
            for (rt, rc) in &rotated {
                let j = cl.index_of(rt);
                let entry = rel.entry(j).or_insert_with(num::Zero::zero);
                *entry -= &sign * rc;
                if num::Zero::is_zero(entry) {
                    rel.remove(&j);
                }
                if !processed.contains_key(rt) {
                    next.push(rt.clone());
                }
            }
            desc.push_str(&forms::form_string(p, &Form::single(m.clone())));
            desc.push_str(" ~ ");
            let mut rot_form = Form::zero(m.diffs.len());
            for (rt, rc) in rotated {
                rot_form.add_raw(rt, &sign * rc);
            }
            desc.push_str(&forms::form_string(p, &rot_form));
            cl.relations.push(desc);
            cl.span.insert(rel);
            if cl.index.len() > budget.max_monomials {
                return Ok(DrOutcome {
                    verdict: DrVerdict::Undecided,
                    certificate: vec![],
                    closure_size: cl.index.len(),
                    rounds,
                });
            }
        }
        if let Some(comb) = cl.span.membership(target.clone()) {
            let certificate = comb
                .into_iter()
                .map(|(i, c)| (cl.relations[i].clone(), c.to_string()))
                .collect();
            return Ok(DrOutcome {
                verdict: DrVerdict::Equal,
                certificate,
                closure_size: cl.index.len(),
                rounds,
            });
        }
        if next.is_empty() {
            stabilized = true;
            break;
        }
        frontier = next;
    }
    Ok(DrOutcome {
        verdict: if stabilized { DrVerdict::Distinct } else { DrVerdict::Undecided },
        certificate: vec![],
        closure_size: cl.index.len(),
        rounds,
    })
}

/// `a == 0` in the Karoubi-de Rham quotient.
pub fn dr_is_zero(
    p: &Presentation,
    a: &Form,
    budget: &DrBudget,
) -> Result<DrOutcome, AlgebraError> {
    dr_equal(p, a, &Form::zero(a.weight), budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Element;
    use crate::forms::push_term;
    use crate::presentation::laurent_x;
    use crate::rint;
    use crate::word::Word;

    #[test]
    fn alpha1_equals_beta1_mod_commutators() {
        let p = laurent_x();
        let x = p.letter_index("x").unwrap();
        let lx = p.letter_index("Lx").unwrap();
        let mut alpha = Form::zero(1);
        push_term(&p, &mut alpha, vec![Word::single(lx), Word::Id(0)], vec![x], rint(1)).unwrap();
        let mut beta = Form::zero(1);
        push_term(&p, &mut beta, vec![Word::Id(0), Word::single(lx)], vec![x], rint(1)).unwrap();
        let out = dr_equal(&p, &alpha, &beta, &DrBudget::default()).unwrap();
        assert_eq!(out.verdict, DrVerdict::Equal);
        assert!(!out.certificate.is_empty());
    }

    #[test]
    fn weight_zero_commutator_span() {
        // In the path algebra of A2, the path e itself is a commutator
        // ([e, e_1] = e), while an idempotent is not.
        let p = crate::presentation::path_algebra(&crate::quiver::Quiver::a2());
        let e = Form::from_element(&Element::from_word(Word::single(0)));
        let out = dr_is_zero(&p, &e, &DrBudget::default()).unwrap();
        assert_eq!(out.verdict, DrVerdict::Equal);
        let idem = Form::from_element(&p.idempotent(0));
        let out = dr_is_zero(&p, &idem, &DrBudget::default()).unwrap();
        assert_eq!(out.verdict, DrVerdict::Distinct);
    }
}
