//! Overlap-ambiguity analysis for the rewriting rules of a presentation.
//!
//! Rules have monomial left-hand sides, so critical pairs come from two
//! sources: a proper suffix of one left side matching a proper prefix of
//! another, and one left side contained in another. Every ambiguity word is
//! reduced both ways and then normalized; the pair resolves when the two
//! normal forms agree.

use crate::element::Element;
use crate::presentation::{AlgebraError, Presentation};
use crate::word::Word;
use num::One;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Overlap {
    pub rule_left: usize,
    pub rule_right: usize,
    pub word: String,
    pub resolvable: bool,
    pub left_normal_form: String,
    pub right_normal_form: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfluenceReport {
    pub overlaps: Vec<Overlap>,
    pub all_resolvable: bool,
}

fn reduce_at(
    p: &Presentation,
    word: &[crate::word::LetterId],
    pos: usize,
    rule: usize,
) -> Result<Element, AlgebraError> {
    let r = &p.rules[rule];
    let mut raw = Element::zero();
    for (rw, rc) in &r.rhs.terms {
        let mut ls = word[..pos].to_vec();
        ls.extend_from_slice(rw.letters());
        ls.extend_from_slice(&word[pos + r.lhs.len()..]);
        let w = if ls.is_empty() {
            Word::Id(p.word_src(&Word::path(word.to_vec())))
        } else {
            Word::Path(ls)
        };
        raw.add_term(w, rc * num::BigRational::one());
    }
    p.normalize(&raw)
}

/// Enumerate all overlap and inclusion ambiguities and reduce each both ways.
pub fn check_confluence(p: &Presentation) -> Result<ConfluenceReport, AlgebraError> {
    let mut overlaps = Vec::new();
    for (i, ri) in p.rules.iter().enumerate() {
        for (j, rj) in p.rules.iter().enumerate() {
            // Suffix of lhs_i equals prefix of lhs_j.
            let ni = ri.lhs.len();
            let nj = rj.lhs.len();
            for o in 1..ni.min(nj) {
                if ri.lhs[ni - o..] == rj.lhs[..o] {
                    let mut w = ri.lhs.clone();
                    w.extend_from_slice(&rj.lhs[o..]);
                    if !p.word_composable(&Word::path(w.clone())) {
                        continue;
                    }
                    let left = reduce_at(p, &w, 0, i)?;
                    let right = reduce_at(p, &w, ni - o, j)?;
                    let left = p.normalize(&left)?;
                    let right = p.normalize(&right)?;
                    overlaps.push(Overlap {
                        rule_left: i,
                        rule_right: j,
                        word: p.word_string(&Word::path(w)),
                        resolvable: left == right,
                        left_normal_form: p.element_string(&left),
                        right_normal_form: p.element_string(&right),
                    });
                }
            }
            // lhs_j strictly inside lhs_i.
            if i != j && nj < ni {
                for pos in 0..=(ni - nj) {
                    if ri.lhs[pos..pos + nj] == rj.lhs[..] {
                        let w = ri.lhs.clone();
                        let left = reduce_at(p, &w, 0, i)?;
                        let right = reduce_at(p, &w, pos, j)?;
                        overlaps.push(Overlap {
                            rule_left: i,
                            rule_right: j,
                            word: p.word_string(&Word::path(w)),
                            resolvable: left == right,
                            left_normal_form: p.element_string(&left),
                            right_normal_form: p.element_string(&right),
                        });
                    }
                }
            }
        }
    }
    let all_resolvable = overlaps.iter().all(|o| o.resolvable);
    Ok(ConfluenceReport { overlaps, all_resolvable })
}
