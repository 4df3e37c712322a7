//! Noncommutative differential forms and the mixed-complex operator calculus.
//!
//! A weight-`n` form is stored on the monomial basis
//! `w0 d(g1) w1 ... d(gn) wn` where the `w_i` are irreducible words (possibly
//! bare idempotents) and every differential slot carries a single arrow
//! letter. Differentials of localization letters are expanded eagerly through
//! `d(L) = -L d(s) L`, so the basis is stable under all operators here.
//!
//! The operators `kappa`, `b` and `iota_E` act on expressions of the shape
//! `alpha d(a)`; `right_comb` rewrites a basis monomial into that shape by
//! absorbing the trailing word into the last differential, and `full_comb`
//! iterates this into the chain-like normal form `a0 d(a1) ... d(an)`.

use crate::element::Element;
use crate::presentation::{AlgebraError, LetterKind, Presentation};
use crate::word::{LetterId, Word};
use crate::{rint, Rat};
use num::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormError {
    #[error("kappa span exceeded the dimension budget of {0}")]
    SpanBudgetExceeded(usize),
    #[error("kappa matrix violates its minimal-polynomial identity")]
    KappaIdentity,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FormTerm {
    /// `n + 1` words for a weight-`n` term.
    pub words: Vec<Word>,
    /// `n` differential slots.
    pub diffs: Vec<LetterId>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Form {
    pub weight: usize,
    pub terms: BTreeMap<FormTerm, Rat>,
}

impl Form {
    pub fn zero(weight: usize) -> Form {
        Form { weight, terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_element(e: &Element) -> Form {
        let mut f = Form::zero(0);
        for (w, c) in &e.terms {
            f.terms.insert(FormTerm { words: vec![w.clone()], diffs: vec![] }, c.clone());
        }
        f
    }

    pub fn from_word(w: Word) -> Form {
        Form::from_element(&Element::from_word(w))
    }

    pub fn single(t: FormTerm) -> Form {
        let weight = t.diffs.len();
        Form { weight, terms: BTreeMap::from([(t, Rat::one())]) }
    }

    pub fn to_element(&self) -> Element {
        assert_eq!(self.weight, 0);
        let mut e = Element::zero();
        for (t, c) in &self.terms {
            e.add_term(t.words[0].clone(), c.clone());
        }
        e
    }

    pub fn add_raw(&mut self, t: FormTerm, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(t.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn add(&self, other: &Form) -> Form {
        assert_eq!(self.weight, other.weight);
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_raw(t.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        assert_eq!(self.weight, other.weight);
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_raw(t.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Form {
        if c.is_zero() {
            return Form::zero(self.weight);
        }
        Form {
            weight: self.weight,
            terms: self.terms.iter().map(|(t, v)| (t.clone(), v * c)).collect(),
        }
    }

    pub fn neg(&self) -> Form {
        self.scale(&-Rat::one())
    }
}

/// Check the seam typing of a raw term.
fn term_composable(p: &Presentation, words: &[Word], diffs: &[LetterId]) -> bool {
    for (i, g) in diffs.iter().enumerate() {
        let l = p.letter(*g);
        if p.word_src(&words[i]) != l.tgt || l.src != p.word_tgt(&words[i + 1]) {
            return false;
        }
    }
    true
}

/// Normalize every word slot and expand multilinearly into `out`.
pub fn push_term(
    p: &Presentation,
    out: &mut Form,
    words: Vec<Word>,
    diffs: Vec<LetterId>,
    coeff: Rat,
) -> Result<(), AlgebraError> {
    if coeff.is_zero() || !term_composable(p, &words, &diffs) {
        return Ok(());
    }
    if words.iter().all(|w| p.word_is_normal(w)) {
        out.add_raw(FormTerm { words, diffs }, coeff);
        return Ok(());
    }
    let mut slots: Vec<Element> = Vec::with_capacity(words.len());
    for w in words {
        let e = p.normalize_word(w)?;
        if e.is_zero() {
            return Ok(());
        }
        slots.push(e);
    }
    let mut acc: Vec<(Vec<Word>, Rat)> = vec![(Vec::new(), coeff)];
    for slot in &slots {
        let mut next = Vec::new();
        for (ws, c) in &acc {
            for (w, cw) in &slot.terms {
                let mut ws2 = ws.clone();
                ws2.push(w.clone());
                next.push((ws2, c * cw));
            }
        }
        acc = next;
    }
    for (ws, c) in acc {
        out.add_raw(FormTerm { words: ws, diffs: diffs.clone() }, c);
    }
    Ok(())
}

/// Product of forms: concatenation with seam normalization.
pub fn mul(p: &Presentation, a: &Form, b: &Form) -> Result<Form, AlgebraError> {
    let mut out = Form::zero(a.weight + b.weight);
    for (ta, ca) in &a.terms {
        for (tb, cb) in &b.terms {
            let Some(seam) = p.concat(ta.words.last().unwrap(), &tb.words[0]) else {
                continue;
            };
            let mut words = ta.words[..ta.words.len() - 1].to_vec();
            words.push(seam);
            words.extend_from_slice(&tb.words[1..]);
            let mut diffs = ta.diffs.clone();
            diffs.extend_from_slice(&tb.diffs);
            push_term(p, &mut out, words, diffs, ca * cb)?;
        }
    }
    Ok(out)
}

pub fn mul_all(p: &Presentation, factors: &[&Form]) -> Result<Form, AlgebraError> {
    assert!(!factors.is_empty());
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = mul(p, &acc, f)?;
    }
    Ok(acc)
}

const D_RECURSION_LIMIT: usize = 32;

fn d_letter(p: &Presentation, l: LetterId, depth: usize) -> Result<Form, AlgebraError> {
    assert!(depth < D_RECURSION_LIMIT, "cyclic localization chain");
    let letter = p.letter(l);
    match letter.kind {
        LetterKind::Arrow => {
            let mut out = Form::zero(1);
            out.add_raw(
                FormTerm {
                    words: vec![Word::Id(letter.tgt), Word::Id(letter.src)],
                    diffs: vec![l],
                },
                Rat::one(),
            );
            Ok(out)
        }
        LetterKind::Unit => Ok(Form::zero(1)),
        LetterKind::Inverse => {
            let s = p.inverts.get(&l).expect("inverse letter registered").clone();
            let ds = d_elt_depth(p, &s, depth + 1)?;
            let lf = Form::from_word(Word::single(l));
            Ok(mul_all(p, &[&lf, &ds, &lf])?.neg())
        }
    }
}

fn d_word_depth(p: &Presentation, w: &Word, depth: usize) -> Result<Form, AlgebraError> {
    let mut out = Form::zero(1);
    let ls = w.letters();
    for (j, l) in ls.iter().enumerate() {
        if p.letter(*l).kind == LetterKind::Unit {
            continue;
        }
        let dl = d_letter(p, *l, depth)?;
        let prefix = if j == 0 {
            Form::from_word(Word::Id(p.letter(ls[0]).tgt))
        } else {
            Form::from_word(Word::Path(ls[..j].to_vec()))
        };
        let suffix = if j + 1 == ls.len() {
            Form::from_word(Word::Id(p.letter(ls[ls.len() - 1]).src))
        } else {
            Form::from_word(Word::Path(ls[j + 1..].to_vec()))
        };
        out = out.add(&mul_all(p, &[&prefix, &dl, &suffix])?);
    }
    Ok(out)
}

fn d_elt_depth(p: &Presentation, e: &Element, depth: usize) -> Result<Form, AlgebraError> {
    let mut out = Form::zero(1);
    for (w, c) in &e.terms {
        out = out.add(&d_word_depth(p, w, depth)?.scale(c));
    }
    Ok(out)
}

/// Differential of a word, expanded to generator differentials.
pub fn d_word(p: &Presentation, w: &Word) -> Result<Form, AlgebraError> {
    d_word_depth(p, w, 0)
}

/// Differential of an algebra element, as a weight-1 form.
pub fn d_elt(p: &Presentation, e: &Element) -> Result<Form, AlgebraError> {
    d_elt_depth(p, e, 0)
}

/// The mixed differential `d` on forms (degree +1 graded derivation).
pub fn d(p: &Presentation, f: &Form) -> Result<Form, AlgebraError> {
    let n = f.weight;
    let mut out = Form::zero(n + 1);
    for (t, c) in &f.terms {
        for i in 0..=n {
            let dwi = d_word_depth(p, &t.words[i], 0)?;
            if dwi.is_zero() {
                continue;
            }
            let sign = if i % 2 == 0 { Rat::one() } else { -Rat::one() };
            for (dt, dc) in &dwi.terms {
                let mut words = t.words[..i].to_vec();
                words.push(dt.words[0].clone());
                words.push(dt.words[1].clone());
                words.extend_from_slice(&t.words[i + 1..]);
                let mut diffs = t.diffs[..i].to_vec();
                diffs.push(dt.diffs[0]);
                diffs.extend_from_slice(&t.diffs[i..]);
                push_term(p, &mut out, words, diffs, c * dc * &sign)?;
            }
        }
    }
    Ok(out)
}

/// One summand of the combed shape `coeff * prefix * d(u)`; the prefix is a
/// weight-`(n-1)` monomial and `u` an arbitrary irreducible word.
pub struct CombedTerm {
    pub coeff: Rat,
    pub prefix: FormTerm,
    pub last: Word,
}

fn right_comb_raw(
    p: &Presentation,
    words: &[Word],
    diffs: &[LetterId],
    coeff: Rat,
    out: &mut Vec<CombedTerm>,
) -> Result<(), AlgebraError> {
    let n = diffs.len();
    debug_assert!(n >= 1);
    let g = diffs[n - 1];
    let trailing = &words[n];
    // prefix * d(g o trailing)
    let glued = p.normalize(&Element::from_word(
        p.concat(&Word::single(g), trailing).expect("term composable"),
    ))?;
    for (u, cu) in &glued.terms {
        if u.is_id() {
            continue;
        }
        out.push(CombedTerm {
            coeff: &coeff * cu,
            prefix: FormTerm { words: words[..n].to_vec(), diffs: diffs[..n - 1].to_vec() },
            last: u.clone(),
        });
    }
    // minus prefix * g * d(trailing), differentiating letter by letter
    let ls = trailing.letters().to_vec();
    for (j, l) in ls.iter().enumerate() {
        if p.letter(*l).kind == LetterKind::Unit {
            continue;
        }
        let mut head = vec![g];
        head.extend_from_slice(&ls[..j]);
        let seam = p.concat(&words[n - 1], &Word::Path(head)).expect("term composable");
        let seam = p.normalize_word(seam)?;
        let tail = if j + 1 == ls.len() {
            Word::Id(p.letter(*l).src)
        } else {
            Word::Path(ls[j + 1..].to_vec())
        };
        for (sw, sc) in &seam.terms {
            let mut nwords = words[..n - 1].to_vec();
            nwords.push(sw.clone());
            nwords.push(tail.clone());
            let mut ndiffs = diffs[..n - 1].to_vec();
            ndiffs.push(*l);
            right_comb_raw(p, &nwords, &ndiffs, -(&coeff * sc), out)?;
        }
    }
    Ok(())
}

/// Rewrite a weight-`n >= 1` monomial as a combination of `prefix * d(u)`.
pub fn right_comb(
    p: &Presentation,
    t: &FormTerm,
    c: &Rat,
) -> Result<Vec<CombedTerm>, AlgebraError> {
    let mut out = Vec::new();
    right_comb_raw(p, &t.words, &t.diffs, c.clone(), &mut out)?;
    Ok(out)
}

/// Full chain shape: `form = sum coeff * a0 d(a1) ... d(an)` with the `a_i`
/// irreducible words (`a0` possibly an idempotent).
pub fn full_comb(p: &Presentation, f: &Form) -> Result<Vec<(Rat, Vec<Word>)>, AlgebraError> {
    fn comb_term(
        p: &Presentation,
        words: &[Word],
        diffs: &[LetterId],
        coeff: Rat,
        out: &mut Vec<(Rat, Vec<Word>)>,
    ) -> Result<(), AlgebraError> {
        if diffs.is_empty() {
            out.push((coeff, vec![words[0].clone()]));
            return Ok(());
        }
        let mut combed = Vec::new();
        right_comb_raw(p, words, diffs, coeff, &mut combed)?;
        for ct in combed {
            let mut inner = Vec::new();
            comb_term(p, &ct.prefix.words, &ct.prefix.diffs, ct.coeff, &mut inner)?;
            for (c, mut chain) in inner {
                chain.push(ct.last.clone());
                out.push((c, chain));
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    for (t, c) in &f.terms {
        comb_term(p, &t.words, &t.diffs, c.clone(), &mut out)?;
    }
    Ok(out)
}

/// Karoubi operator: `kappa(alpha d a) = (-1)^{|alpha|} d(a) alpha`.
pub fn karoubi(p: &Presentation, f: &Form) -> Result<Form, AlgebraError> {
    let n = f.weight;
    if n == 0 {
        return Ok(f.clone());
    }
    let sign = if (n - 1) % 2 == 0 { Rat::one() } else { -Rat::one() };
    let mut out = Form::zero(n);
    for (t, c) in &f.terms {
        for ct in right_comb(p, t, c)? {
            let du = d_word(p, &ct.last)?;
            let alpha = Form::single(ct.prefix);
            out = out.add(&mul(p, &du, &alpha)?.scale(&(&ct.coeff * &sign)));
        }
    }
    Ok(out)
}

/// Hochschild boundary transported to forms:
/// `b(alpha d a) = (-1)^{|alpha|} [alpha, a]`.
pub fn hochschild_b(p: &Presentation, f: &Form) -> Result<Form, AlgebraError> {
    let n = f.weight;
    if n == 0 {
        return Ok(Form::zero(0));
    }
    let sign = if (n - 1) % 2 == 0 { Rat::one() } else { -Rat::one() };
    let mut out = Form::zero(n - 1);
    for (t, c) in &f.terms {
        for ct in right_comb(p, t, c)? {
            let alpha = Form::single(ct.prefix);
            let u = Form::from_word(ct.last);
            let commutator = mul(p, &alpha, &u)?.sub(&mul(p, &u, &alpha)?);
            out = out.add(&commutator.scale(&(&ct.coeff * &sign)));
        }
    }
    Ok(out)
}

/// Contraction with the gauge element, via its closed formula
/// `iota_E(a0 da1 ... dan)
///    = sum_l (-1)^{(l-1)(n-1)+1} [a_l, da_{l+1} ... da_n a0 da_1 ... da_{l-1}]`.
pub fn iota_e(p: &Presentation, f: &Form) -> Result<Form, AlgebraError> {
    let n = f.weight;
    if n == 0 {
        return Ok(Form::zero(0));
    }
    let mut out = Form::zero(n - 1);
    // Aggregate repeated chains and share the differential expansions.
    let mut chains: BTreeMap<Vec<Word>, Rat> = BTreeMap::new();
    for (coeff, chain) in full_comb(p, f)? {
        let entry = chains.entry(chain).or_insert_with(Rat::zero);
        *entry += coeff;
    }
    let mut d_cache: BTreeMap<Word, Form> = BTreeMap::new();
    for (chain, coeff) in chains {
        if coeff.is_zero() {
            continue;
        }
        for w in &chain[1..] {
            if !d_cache.contains_key(w) {
                d_cache.insert(w.clone(), d_word(p, w)?);
            }
        }
        for l in 1..=n {
            // The leading idempotent keeps the boundary typing honest: when
            // the suffix of differentials is empty (l = n) it is all that is
            // left of it, and a non-cyclic chain must annihilate the
            // wrap-around product.
            let head = Form::from_word(Word::Id(p.word_src(&chain[l])));
            let a0 = Form::from_word(chain[0].clone());
            let mut factors: Vec<&Form> = vec![&head];
            for k in l + 1..=n {
                factors.push(&d_cache[&chain[k]]);
            }
            factors.push(&a0);
            for k in 1..l {
                factors.push(&d_cache[&chain[k]]);
            }
            let beta = mul_all(p, &factors)?;
            if beta.is_zero() {
                continue;
            }
            let al = Form::from_word(chain[l].clone());
            let commutator = mul(p, &al, &beta)?.sub(&mul(p, &beta, &al)?);
            let sign = if ((l - 1) * (n - 1) + 1) % 2 == 0 { rint(1) } else { rint(-1) };
            out = out.add(&commutator.scale(&(&coeff * &sign)));
        }
    }
    Ok(out)
}

/// One signed rotation step of the cyclic structure on monomials: move the
/// leading letter (or, for a bare idempotent head, the leading differential)
/// to the far end. Returns the Koszul sign and the rotated normalized terms;
/// `None` when the monomial is a bare idempotent (rotation-fixed).
pub fn rotate_term(
    p: &Presentation,
    t: &FormTerm,
) -> Result<Option<(Rat, Vec<(FormTerm, Rat)>)>, AlgebraError> {
    let n = t.diffs.len();
    if let Word::Path(ls) = &t.words[0] {
        let x = ls[0];
        let rest = if ls.len() == 1 {
            Word::Id(p.letter(x).src)
        } else {
            Word::Path(ls[1..].to_vec())
        };
        let mut words = vec![rest];
        words.extend_from_slice(&t.words[1..]);
        let lastpos = words.len() - 1;
        let mut rotated = Vec::new();
        if let Some(w) = p.concat(&words[lastpos], &Word::single(x)) {
            let glued = p.normalize_word(w)?;
            for (gw, c) in &glued.terms {
                let mut ws = words.clone();
                ws[lastpos] = gw.clone();
                rotated.push((FormTerm { words: ws, diffs: t.diffs.clone() }, c.clone()));
            }
        }
        return Ok(Some((Rat::one(), rotated)));
    }
    if n == 0 {
        return Ok(None);
    }
    // Head is an idempotent: rotate the first differential past the rest.
    let g = t.diffs[0];
    let sign = if (n - 1) % 2 == 0 { Rat::one() } else { -Rat::one() };
    let words = t.words[1..].to_vec();
    if p.word_src(words.last().unwrap()) != p.letter(g).tgt {
        return Ok(Some((sign, vec![])));
    }
    let mut words = words;
    words.push(Word::Id(p.letter(g).src));
    let mut diffs = t.diffs[1..].to_vec();
    diffs.push(g);
    Ok(Some((sign, vec![(FormTerm { words, diffs }, Rat::one())])))
}

/// Harmonic projection: the spectral projection of the Karoubi operator onto
/// the generalized eigenspace of eigenvalue 1, computed on the finite
/// kappa-stable span of the form's monomials. The span's kappa matrix must
/// satisfy `(K^{n+1} - 1)(K^n - 1) = 0`; that identity is asserted before
/// projecting and its failure aborts the call.
pub fn harmonic_project(p: &Presentation, f: &Form, budget: usize) -> Result<Form, FormError> {
    use crate::linalg::QMat;
    let n = f.weight;
    if n == 0 || f.is_zero() {
        return Ok(f.clone());
    }
    let mut index: BTreeMap<FormTerm, usize> = BTreeMap::new();
    let mut basis: Vec<FormTerm> = Vec::new();
    let mut queue: Vec<FormTerm> = Vec::new();
    for t in f.terms.keys() {
        index.insert(t.clone(), basis.len());
        basis.push(t.clone());
        queue.push(t.clone());
    }
    let mut images: BTreeMap<usize, Vec<(usize, Rat)>> = BTreeMap::new();
    while let Some(t) = queue.pop() {
        let i = index[&t];
        let img = karoubi(p, &Form::single(t))?;
        let mut row = Vec::new();
        for (u, c) in &img.terms {
            let j = *index.entry(u.clone()).or_insert_with(|| {
                basis.push(u.clone());
                queue.push(u.clone());
                basis.len() - 1
            });
            row.push((j, c.clone()));
        }
        if basis.len() > budget {
            return Err(FormError::SpanBudgetExceeded(budget));
        }
        images.insert(i, row);
    }
    let dim = basis.len();
    let mut k = QMat::zeros(dim, dim);
    for (i, row) in &images {
        for (j, c) in row {
            k[(*j, *i)] = c.clone();
        }
    }
    let mut kn = QMat::identity(dim);
    for _ in 0..n {
        kn = kn.mul(&k);
    }
    let kn1 = kn.mul(&k);
    let id = QMat::identity(dim);
    if !kn1.sub(&id).mul(&kn.sub(&id)).is_zero() {
        return Err(FormError::KappaIdentity);
    }
    // P = q(K)(b0 + b1(K - 1)) with q(x) = (x^{n+1}-1)(x^n-1)/(x-1)^2,
    // b0 = 1/q(1) and b1 = -q'(1)/q(1)^2.
    let mut sum_a = QMat::zeros(dim, dim);
    let mut sum_b = QMat::zeros(dim, dim);
    let mut pow = QMat::identity(dim);
    for i in 0..=n {
        if i < n {
            sum_b = sum_b.add(&pow);
        }
        sum_a = sum_a.add(&pow);
        pow = pow.mul(&k);
    }
    let q = sum_a.mul(&sum_b);
    let nn = n as i64;
    let q1 = rint(nn * (nn + 1));
    let qp1 = rint(nn * (nn + 1) * (2 * nn - 1)) / rint(2);
    let b0 = Rat::one() / &q1;
    let b1 = -(&qp1 / (&q1 * &q1));
    let proj = q.mul(&k.sub(&id).scale(&b1).add(&id.scale(&b0)));
    debug_assert!(proj.mul(&proj) == proj, "projection must be idempotent");
    let mut v = vec![Rat::zero(); dim];
    for (t, c) in &f.terms {
        v[index[t]] = c.clone();
    }
    let pv = proj.mul_vec(&v);
    let mut out = Form::zero(n);
    for (i, c) in pv.into_iter().enumerate() {
        out.add_raw(basis[i].clone(), c);
    }
    Ok(out)
}

/// Printable rendering, mainly for reports and tests.
pub fn form_string(p: &Presentation, f: &Form) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (i, (t, c)) in f.terms.iter().enumerate() {
        if i > 0 {
            s.push_str(" + ");
        }
        if c != &Rat::one() {
            s.push_str(&format!("{}*", c));
        }
        let mut pieces: Vec<String> = Vec::new();
        for (j, w) in t.words.iter().enumerate() {
            if j > 0 {
                pieces.push(format!("d({})", p.letter(t.diffs[j - 1]).id));
            }
            if !w.is_id() || t.words.len() == 1 {
                pieces.push(p.word_string(w));
            }
        }
        s.push_str(&pieces.join("*"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{a2_localized, a2_phi, a2_phi_inv, laurent_x};

    fn laurent_alpha(p: &Presentation, n: usize) -> Form {
        // (x^{-1} dx)^{2n-1}
        let a1 = xinv_dx(p);
        let mut out = a1.clone();
        for _ in 1..(2 * n - 1) {
            out = mul(p, &out, &a1).unwrap();
        }
        out
    }

    fn laurent_beta(p: &Presentation, n: usize) -> Form {
        let b1 = dx_xinv(p);
        let mut out = b1.clone();
        for _ in 1..(2 * n - 1) {
            out = mul(p, &out, &b1).unwrap();
        }
        out
    }

    fn xinv_dx(p: &Presentation) -> Form {
        let x = p.letter_index("x").unwrap();
        let lx = p.letter_index("Lx").unwrap();
        let mut f = Form::zero(1);
        push_term(p, &mut f, vec![Word::single(lx), Word::Id(0)], vec![x], rint(1)).unwrap();
        f
    }

    fn dx_xinv(p: &Presentation) -> Form {
        let x = p.letter_index("x").unwrap();
        let lx = p.letter_index("Lx").unwrap();
        let mut f = Form::zero(1);
        push_term(p, &mut f, vec![Word::Id(0), Word::single(lx)], vec![x], rint(1)).unwrap();
        f
    }

    #[test]
    fn d_of_inverse_letter() {
        // d(x^{-1}) = -x^{-1} dx x^{-1}
        let p = laurent_x();
        let lx = p.letter_index("Lx").unwrap();
        let x = p.letter_index("x").unwrap();
        let got = d_word(&p, &Word::single(lx)).unwrap();
        let mut expected = Form::zero(1);
        push_term(
            &p,
            &mut expected,
            vec![Word::single(lx), Word::single(lx)],
            vec![x],
            rint(-1),
        )
        .unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn d_alpha1_is_minus_alpha_squared_shape() {
        let p = laurent_x();
        let a1 = laurent_alpha(&p, 1);
        let da1 = d(&p, &a1).unwrap();
        let sq = mul(&p, &xinv_dx(&p), &xinv_dx(&p)).unwrap();
        assert_eq!(da1, sq.neg());
    }

    #[test]
    fn d_squared_vanishes() {
        let p = laurent_x();
        let a2 = laurent_alpha(&p, 2);
        let dd = d(&p, &d(&p, &a2).unwrap()).unwrap();
        assert!(dd.is_zero());
        let q = a2_localized();
        let phi = a2_phi(&q);
        let dphi = d_elt(&q, &phi).unwrap();
        assert!(d(&q, &dphi).unwrap().is_zero());
    }

    #[test]
    fn kappa_swaps_alpha_and_beta() {
        let p = laurent_x();
        for n in 1..=3 {
            let a = laurent_alpha(&p, n);
            let b = laurent_beta(&p, n);
            assert_eq!(karoubi(&p, &a).unwrap(), b, "kappa(alpha_{n})");
            assert_eq!(karoubi(&p, &b).unwrap(), a, "kappa(beta_{n})");
        }
    }

    #[test]
    fn one_minus_kappa_squared_on_alpha() {
        // (1 - kappa)^2 alpha_n = 2(alpha_n - beta_n)
        let p = laurent_x();
        let a = laurent_alpha(&p, 2);
        let b = laurent_beta(&p, 2);
        let ka = karoubi(&p, &a).unwrap();
        let kka = karoubi(&p, &ka).unwrap();
        let lhs = a.sub(&ka.scale(&rint(2))).add(&kka);
        assert_eq!(lhs, a.sub(&b).scale(&rint(2)));
    }

    #[test]
    fn iota_e_on_weight_one_commuting_pair() {
        let p = laurent_x();
        let a1 = laurent_alpha(&p, 1);
        assert!(iota_e(&p, &a1).unwrap().is_zero());
    }

    #[test]
    fn iota_e_alpha2() {
        // iota_E alpha_n = (2n-1)((x^{-1}dx)^{2n-2} - (dx x^{-1})^{2n-2})
        let p = laurent_x();
        let a2 = laurent_alpha(&p, 2);
        let got = iota_e(&p, &a2).unwrap();
        let xdx2 = mul(&p, &xinv_dx(&p), &xinv_dx(&p)).unwrap();
        let dxx2 = mul(&p, &dx_xinv(&p), &dx_xinv(&p)).unwrap();
        assert_eq!(got, xdx2.sub(&dxx2).scale(&rint(3)));
    }

    #[test]
    fn iota_e_matches_b_on_harmonic_sum() {
        // iota_E alpha_n = (2n-1)/2 b(alpha_n + beta_n)
        let p = laurent_x();
        let a2 = laurent_alpha(&p, 2);
        let b2 = laurent_beta(&p, 2);
        let lhs = iota_e(&p, &a2).unwrap();
        let rhs = hochschild_b(&p, &a2.add(&b2)).unwrap().scale(&crate::rat(3, 2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn b_on_weight_one() {
        let p = laurent_x();
        assert!(hochschild_b(&p, &laurent_alpha(&p, 1)).unwrap().is_zero());
    }

    #[test]
    fn harmonic_projection_of_tower() {
        let p = laurent_x();
        for n in 1..=2 {
            let a = laurent_alpha(&p, n);
            let b = laurent_beta(&p, n);
            let plus = a.add(&b);
            let minus = a.sub(&b);
            assert_eq!(harmonic_project(&p, &plus, 512).unwrap(), plus);
            assert!(harmonic_project(&p, &minus, 512).unwrap().is_zero());
        }
        assert!(harmonic_project(&p, &Form::zero(2), 512).unwrap().is_zero());
    }

    #[test]
    fn d_phi_display_in_localized_a2() {
        // dPhi = -Phi (de* e + e* de) Phi + de e* + e de*
        let p = a2_localized();
        let phi = a2_phi(&p);
        let e = p.letter_index("e").unwrap();
        let estar = p.letter_index("e*").unwrap();
        let de = d_elt(&p, &p.letter_elt(e)).unwrap();
        let destar = d_elt(&p, &p.letter_elt(estar)).unwrap();
        let ef = Form::from_word(Word::single(e));
        let esf = Form::from_word(Word::single(estar));
        let phif = Form::from_element(&phi);
        let middle = mul(&p, &destar, &ef).unwrap().add(&mul(&p, &esf, &de).unwrap());
        let rhs = mul_all(&p, &[&phif, &middle, &phif])
            .unwrap()
            .neg()
            .add(&mul(&p, &de, &esf).unwrap())
            .add(&mul(&p, &ef, &destar).unwrap());
        let lhs = d_elt(&p, &phi).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn d_phi_inv_display() {
        // dPhi^{-1} = de* e + e* de - Phi^{-1}(de e* + e de*) Phi^{-1}
        let p = a2_localized();
        let phi_inv = a2_phi_inv(&p);
        let e = p.letter_index("e").unwrap();
        let estar = p.letter_index("e*").unwrap();
        let de = d_elt(&p, &p.letter_elt(e)).unwrap();
        let destar = d_elt(&p, &p.letter_elt(estar)).unwrap();
        let ef = Form::from_word(Word::single(e));
        let esf = Form::from_word(Word::single(estar));
        let pf = Form::from_element(&phi_inv);
        let middle = mul(&p, &de, &esf).unwrap().add(&mul(&p, &ef, &destar).unwrap());
        let rhs = mul(&p, &destar, &ef)
            .unwrap()
            .add(&mul(&p, &esf, &de).unwrap())
            .sub(&mul_all(&p, &[&pf, &middle, &pf]).unwrap());
        assert_eq!(d_elt(&p, &phi_inv).unwrap(), rhs);
    }
}
