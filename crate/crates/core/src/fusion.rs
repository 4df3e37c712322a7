//! Fusion of two vertex idempotents: the extended algebra `A+` with matrix
//! units, the corner algebra `A^f` materialized as a presentation on corner
//! generators, trace maps on elements, forms, double derivations and
//! polyvectors, and fusion of moment data.
//!
//! `A+` adjoins unit letters `u12: v2 -> v1` and `u21: v1 -> v2` with the
//! rules `u12 u21 -> e_{v1}` and `u21 u12 -> e_{v2}`. The corner `eps A+ eps`
//! (with `eps = 1 - e_{v2}`) is presented on the same letter set retyped so
//! that every endpoint at `v2` moves to `v1`; the embedding inserts matrix
//! units exactly at the seams whose original endpoints disagree, and
//! stripping the units recovers the corner normal form. Rules transport
//! verbatim: a letter sequence determines its original seam types, so corner
//! reducibility matches fused reducibility position by position.

use crate::confluence::check_confluence;
use crate::dd::{DoubleDerivation, Polyvector2};
use crate::element::Element;
use crate::forms::{self, Form};
use crate::presentation::{AlgebraError, LetterKind, Presentation, Rule};
use crate::word::{LetterId, VertexId, Word};
use crate::Rat;
use num::One;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("cannot fuse a vertex with itself")]
    SameVertex,
    #[error("extended presentation has unresolvable overlaps")]
    NotConfluent,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug)]
pub struct FusionContext {
    /// `A+`: the base presentation extended by the matrix units.
    pub plus: Presentation,
    /// `A^f` on the retyped letter set.
    pub fused: Presentation,
    pub v1: VertexId,
    pub v2: VertexId,
    pub e12: LetterId,
    pub e21: LetterId,
    /// plus-vertex index -> fused-vertex index (v2 maps to v1's image).
    vmap: Vec<VertexId>,
}

/// Build the fusion context merging `v2` into `v1`.
pub fn fuse_presentation(
    base: &Presentation,
    v1_id: &str,
    v2_id: &str,
) -> Result<FusionContext, FusionError> {
    let v1 = base.vertex_index(v1_id)?;
    let v2 = base.vertex_index(v2_id)?;
    if v1 == v2 {
        return Err(FusionError::SameVertex);
    }
    let mut plus = base.clone();
    let mut u12 = "u12".to_string();
    let mut u21 = "u21".to_string();
    while plus.letters.iter().any(|l| l.id == u12 || l.id == u21) {
        u12.push('\'');
        u21.push('\'');
    }
    let e12 = plus.add_letter(&u12, v2_id, v1_id, LetterKind::Unit);
    let e21 = plus.add_letter(&u21, v1_id, v2_id, LetterKind::Unit);
    plus.add_rule(vec![e12, e21], plus.idempotent(v1))?;
    plus.add_rule(vec![e21, e12], plus.idempotent(v2))?;
    if !check_confluence(&plus)?.all_resolvable {
        return Err(FusionError::NotConfluent);
    }

    let mut vmap = vec![VertexId::MAX; base.vertices.len()];
    let mut fused_vertices = Vec::new();
    for (i, name) in base.vertices.iter().enumerate() {
        if i as VertexId != v2 {
            vmap[i] = fused_vertices.len() as VertexId;
            fused_vertices.push(name.clone());
        }
    }
    vmap[v2 as usize] = vmap[v1 as usize];
    let mut fused = Presentation::new(fused_vertices);
    fused.step_budget = base.step_budget;
    for l in &base.letters {
        fused.letters.push(crate::presentation::Letter {
            id: l.id.clone(),
            src: vmap[l.src as usize],
            tgt: vmap[l.tgt as usize],
            kind: l.kind,
        });
    }
    let remap_word = |w: &Word| -> Word {
        match w {
            Word::Id(v) => Word::Id(vmap[*v as usize]),
            Word::Path(ls) => Word::Path(ls.clone()),
        }
    };
    let remap_elt = |e: &Element| -> Element {
        let mut out = Element::zero();
        for (w, c) in &e.terms {
            out.add_term(remap_word(w), c.clone());
        }
        out
    };
    for r in &base.rules {
        fused.rules.push(Rule { lhs: r.lhs.clone(), rhs: remap_elt(&r.rhs) });
    }
    for (l, s) in &base.inverts {
        fused.inverts.insert(*l, remap_elt(s));
    }
    fused.star = base.star.clone();
    if !check_confluence(&fused)?.all_resolvable {
        return Err(FusionError::NotConfluent);
    }
    Ok(FusionContext { plus, fused, v1, v2, e12, e21, vmap })
}

impl FusionContext {
    pub fn fused_vertex(&self, v: VertexId) -> VertexId {
        self.vmap[v as usize]
    }

    /// The corner idempotent `eps = 1 - e_{v2}` of `A+`.
    pub fn eps(&self) -> Element {
        let mut e = Element::zero();
        for v in 0..self.plus.vertices.len() {
            if v as VertexId != self.v2 {
                e.add_term(Word::Id(v as VertexId), Rat::one());
            }
        }
        e
    }

    /// The decomposition `1 = eps eps eps + u21 eps u12`.
    pub fn decomposition(&self) -> Vec<(Element, Element)> {
        vec![
            (self.eps(), self.eps()),
            (
                Element::from_word(Word::single(self.e21)),
                Element::from_word(Word::single(self.e12)),
            ),
        ]
    }

    /// Drop unit letters and remap idempotents: corner normal words of `A+`
    /// become normal words of `A^f`.
    pub fn strip_word(&self, w: &Word) -> Word {
        match w {
            Word::Id(v) => Word::Id(self.fused_vertex(*v)),
            Word::Path(ls) => {
                let kept: Vec<LetterId> =
                    ls.iter().copied().filter(|l| *l != self.e12 && *l != self.e21).collect();
                if kept.is_empty() {
                    Word::Id(self.fused_vertex(self.plus.word_tgt(w)))
                } else {
                    Word::Path(kept)
                }
            }
        }
    }

    pub fn strip_elt(&self, e: &Element) -> Result<Element, AlgebraError> {
        let mut raw = Element::zero();
        for (w, c) in &e.terms {
            raw.add_term(self.strip_word(w), c.clone());
        }
        self.fused.normalize(&raw)
    }

    /// Insert matrix units at every seam whose original endpoint is `v2`.
    pub fn embed_word(&self, w: &Word) -> Result<Element, AlgebraError> {
        match w {
            Word::Id(fv) => {
                let back = (0..self.vmap.len())
                    .find(|&v| v as VertexId != self.v2 && self.vmap[v] == *fv)
                    .expect("fused vertex has a preimage");
                self.plus.normalize_word(Word::Id(back as VertexId))
            }
            Word::Path(ls) => {
                let mut seq: Vec<LetterId> = Vec::new();
                for (i, l) in ls.iter().enumerate() {
                    let letter = self.plus.letter(*l);
                    if i == 0 && letter.tgt == self.v2 {
                        seq.push(self.e12);
                    }
                    seq.push(*l);
                    let src_is_v2 = letter.src == self.v2;
                    let next_tgt_is_v2 = ls
                        .get(i + 1)
                        .map(|n| self.plus.letter(*n).tgt == self.v2);
                    match (src_is_v2, next_tgt_is_v2) {
                        (true, Some(false)) | (true, None) => seq.push(self.e21),
                        (false, Some(true)) => seq.push(self.e12),
                        _ => {}
                    }
                }
                self.plus.normalize_word(Word::Path(seq))
            }
        }
    }

    pub fn embed_elt(&self, e: &Element) -> Result<Element, AlgebraError> {
        let mut out = Element::zero();
        for (w, c) in &e.terms {
            out = &out + &self.embed_word(w)?.scale(c);
        }
        Ok(out)
    }

    /// Trace of an `A+` element into `A^f`.
    pub fn trace_element(&self, a: &Element) -> Result<Element, AlgebraError> {
        let eps = self.eps();
        let u12 = Element::from_word(Word::single(self.e12));
        let u21 = Element::from_word(Word::single(self.e21));
        let corner =
            &self.plus.mul_all(&[&eps, a, &eps])? + &self.plus.mul_all(&[&u12, a, &u21])?;
        self.strip_elt(&corner)
    }

    fn strip_form(&self, f: &Form) -> Result<Form, AlgebraError> {
        let mut out = Form::zero(f.weight);
        for (t, c) in &f.terms {
            let words: Vec<Word> = t.words.iter().map(|w| self.strip_word(w)).collect();
            forms::push_term(&self.fused, &mut out, words, t.diffs.clone(), c.clone())?;
        }
        Ok(out)
    }

    /// Trace of a form over `A+`. Differential slots pass through unchanged:
    /// the matrix units live in the extended base ring, so `d` is linear
    /// over them and the unit insertions are absorbed by the fused `d`.
    pub fn trace_form(&self, f: &Form) -> Result<Form, AlgebraError> {
        let eps = Form::from_element(&self.eps());
        let u12 = Form::from_word(Word::single(self.e12));
        let u21 = Form::from_word(Word::single(self.e21));
        let corner = forms::mul_all(&self.plus, &[&eps, f, &eps])?
            .add(&forms::mul_all(&self.plus, &[&u12, f, &u21])?);
        self.strip_form(&corner)
    }

    /// Trace of a double derivation (inner sandwiches, then strip).
    pub fn trace_dd(&self, dd: &DoubleDerivation) -> Result<DoubleDerivation, AlgebraError> {
        let eps = self.eps();
        let u12 = Element::from_word(Word::single(self.e12));
        let u21 = Element::from_word(Word::single(self.e21));
        let corner = dd
            .sandwich(&self.plus, &eps, &eps)?
            .add(&dd.sandwich(&self.plus, &u12, &u21)?);
        let mut out = DoubleDerivation::zero();
        for (t, c) in &corner.terms {
            out.push(
                &self.fused,
                self.strip_word(&t.left),
                t.basis,
                self.strip_word(&t.right),
                c.clone(),
            )?;
        }
        Ok(out)
    }

    /// Trace of a degree-2 polyvector.
    pub fn trace_poly(&self, poly: &Polyvector2) -> Result<Polyvector2, AlgebraError> {
        let mut out = Polyvector2::zero();
        let eps = self.eps();
        let u12 = Element::from_word(Word::single(self.e12));
        let u21 = Element::from_word(Word::single(self.e21));
        for (t, c) in &poly.terms {
            for (l, r) in [(&eps, &eps), (&u12, &u21)] {
                for (lw, lc) in &l.terms {
                    let Some(w0) = self.plus.concat(lw, &t.words[0]) else { continue };
                    for (rw, rc) in &r.terms {
                        let Some(w2) = self.plus.concat(&t.words[2], rw) else { continue };
                        out.push(
                            &self.fused,
                            [
                                self.strip_word(&w0),
                                self.strip_word(&t.words[1]),
                                self.strip_word(&w2),
                            ],
                            t.deltas,
                            c * lc * rc,
                        )?;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Fused additive moments: the merged vertices add, others transport.
pub fn fuse_moment_additive(
    ctx: &FusionContext,
    moments: &BTreeMap<VertexId, Element>,
) -> Result<BTreeMap<VertexId, Element>, AlgebraError> {
    let mut out: BTreeMap<VertexId, Element> = BTreeMap::new();
    for (v, m) in moments {
        let traced = ctx.trace_element(m)?;
        let fv = ctx.fused_vertex(*v);
        let entry = out.entry(fv).or_insert_with(Element::zero);
        *entry = &*entry + &traced;
    }
    Ok(out)
}

/// Invertible element with its two-sided inverse.
#[derive(Clone, Debug)]
pub struct Invertible {
    pub elt: Element,
    pub inv: Element,
}

impl Invertible {
    pub fn check(&self, p: &Presentation, vertex: VertexId) -> Result<bool, AlgebraError> {
        let idem = p.idempotent(vertex);
        Ok(p.mul(&self.elt, &self.inv)? == idem && p.mul(&self.inv, &self.elt)? == idem)
    }
}

/// The result of fusing quasi-bisymplectic data along one vertex pair.
pub struct FusedQuasi {
    pub omega_f: Form,
    pub omega_cor: Form,
    pub omega_ff: Form,
    pub p_f: Polyvector2,
    pub p_ff: Polyvector2,
    pub e1f: DoubleDerivation,
    pub e2f: DoubleDerivation,
    pub phi: BTreeMap<VertexId, Invertible>,
    pub phi1f: Invertible,
    pub phi2f: Invertible,
}

/// Fuse `(omega, P, Phi)` along the context's vertex pair:
/// `omega^ff = omega^f - (Phi1^f)^{-1} dPhi1^f dPhi2^f (Phi2^f)^{-1} / 2`,
/// `P^ff = P^f + E1^f E2^f / 2` and `Phi1^ff = Phi1^f Phi2^f`.
pub fn fuse_quasi(
    ctx: &FusionContext,
    omega: &Form,
    poly: &Polyvector2,
    phi: &BTreeMap<VertexId, Invertible>,
) -> Result<FusedQuasi, FusionError> {
    let f = &ctx.fused;
    let omega_f = ctx.trace_form(omega)?;
    let p_f = ctx.trace_poly(poly)?;
    let e1f = ctx.trace_dd(&crate::dd::gauge(&ctx.plus, ctx.v1))?;
    let e2f = ctx.trace_dd(&crate::dd::gauge(&ctx.plus, ctx.v2))?;

    let phi1 = phi.get(&ctx.v1).ok_or(AlgebraError::NotInvertible)?;
    let phi2 = phi.get(&ctx.v2).ok_or(AlgebraError::NotInvertible)?;
    let phi1f = Invertible {
        elt: ctx.trace_element(&phi1.elt)?,
        inv: ctx.trace_element(&phi1.inv)?,
    };
    let phi2f = Invertible {
        elt: ctx.trace_element(&phi2.elt)?,
        inv: ctx.trace_element(&phi2.inv)?,
    };

    let d1 = forms::d_elt(f, &phi1f.elt)?;
    let d2 = forms::d_elt(f, &phi2f.elt)?;
    let omega_cor = forms::mul_all(
        f,
        &[&Form::from_element(&phi1f.inv), &d1, &d2, &Form::from_element(&phi2f.inv)],
    )?
    .scale(&crate::rat(1, 2));
    let omega_ff = omega_f.sub(&omega_cor);
    let p_ff =
        p_f.add(&Polyvector2::from_product(f, &e1f, &e2f)?.scale(&crate::rat(1, 2)));

    let mut phi_out: BTreeMap<VertexId, Invertible> = BTreeMap::new();
    for (v, inv) in phi {
        if *v == ctx.v1 || *v == ctx.v2 {
            continue;
        }
        phi_out.insert(
            ctx.fused_vertex(*v),
            Invertible {
                elt: ctx.trace_element(&inv.elt)?,
                inv: ctx.trace_element(&inv.inv)?,
            },
        );
    }
    phi_out.insert(
        ctx.fused_vertex(ctx.v1),
        Invertible {
            elt: f.mul(&phi1f.elt, &phi2f.elt)?,
            inv: f.mul(&phi2f.inv, &phi1f.inv)?,
        },
    );
    Ok(FusedQuasi {
        omega_f,
        omega_cor,
        omega_ff,
        p_f,
        p_ff,
        e1f,
        e2f,
        phi: phi_out,
        phi1f,
        phi2f,
    })
}

/// Evaluate an algebra map on a word given generator images in the target.
pub fn map_word(
    target: &Presentation,
    images: &BTreeMap<LetterId, Element>,
    idem_map: &BTreeMap<VertexId, VertexId>,
    w: &Word,
) -> Result<Element, AlgebraError> {
    match w {
        Word::Id(v) => Ok(target.idempotent(*idem_map.get(v).expect("vertex image"))),
        Word::Path(ls) => {
            let mut acc: Option<Element> = None;
            for l in ls {
                let img = images.get(l).expect("letter image").clone();
                acc = Some(match acc {
                    None => img,
                    Some(a) => target.mul(&a, &img)?,
                });
            }
            Ok(acc.unwrap())
        }
    }
}

/// Push a form through an algebra map: words map multiplicatively, each
/// differential slot maps to `d` of the letter's image.
pub fn map_form(
    target: &Presentation,
    images: &BTreeMap<LetterId, Element>,
    idem_map: &BTreeMap<VertexId, VertexId>,
    f: &Form,
) -> Result<Form, AlgebraError> {
    let mut out = Form::zero(f.weight);
    for (t, c) in &f.terms {
        let mut factors: Vec<Form> = Vec::new();
        for (j, w) in t.words.iter().enumerate() {
            if j > 0 {
                let img = images.get(&t.diffs[j - 1]).expect("letter image");
                factors.push(forms::d_elt(target, img)?);
            }
            factors.push(Form::from_element(&map_word(target, images, idem_map, w)?));
        }
        let refs: Vec<&Form> = factors.iter().collect();
        out = out.add(&forms::mul_all(target, &refs)?.scale(c));
    }
    Ok(out)
}
