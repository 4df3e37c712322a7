//! Normalized Hochschild chains, the boundary `b`, Connes's `B`, and the
//! comparison maps with noncommutative forms.
//!
//! A degree-`n` chain is spanned by cyclically composable tuples
//! `a0 (x) a1 (x) ... (x) an` of irreducible words, with every slot past the
//! first reduced modulo the vertex span: a bare idempotent in a reduced slot
//! kills the term.

use crate::element::Element;
use crate::forms::{self, Form};
use crate::presentation::{AlgebraError, Presentation};
use crate::report::{Check, Verdict};
use crate::word::Word;
use crate::Rat;
use num::{One, Zero};
use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ChainTerm(pub Vec<Word>);

impl ChainTerm {
    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Chain {
    pub degree: usize,
    pub terms: BTreeMap<ChainTerm, Rat>,
}

impl Chain {
    pub fn zero(degree: usize) -> Chain {
        Chain { degree, terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_raw(&mut self, t: ChainTerm, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(t.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn add(&self, other: &Chain) -> Chain {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_raw(t.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Chain {
        if c.is_zero() {
            return Chain::zero(self.degree);
        }
        Chain {
            degree: self.degree,
            terms: self.terms.iter().map(|(t, v)| (t.clone(), v * c)).collect(),
        }
    }

    /// Is the tuple cyclically composable and normalized (no idempotents in
    /// reduced slots)?
    fn admissible(p: &Presentation, words: &[Word]) -> bool {
        if words[1..].iter().any(|w| w.is_id()) {
            return false;
        }
        let m = words.len();
        (0..m).all(|i| p.word_src(&words[i]) == p.word_tgt(&words[(i + 1) % m]))
    }
}

/// Build a chain from formal slot elements, expanding multilinearly and
/// applying the normalized-complex reduction.
pub fn chain_from_slots(p: &Presentation, slots: &[Element], coeff: Rat) -> Chain {
    let mut out = Chain::zero(slots.len() - 1);
    let mut acc: Vec<(Vec<Word>, Rat)> = vec![(Vec::new(), coeff)];
    for slot in slots {
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
        if Chain::admissible(p, &ws) {
            out.add_raw(ChainTerm(ws), c);
        }
    }
    out
}

/// Hochschild boundary:
/// `b(a0 (x) ... (x) an) = sum_{i<n} (-1)^i a0 (x) .. a_i a_{i+1} .. (x) an
///                         + (-1)^n a_n a_0 (x) a1 (x) ... (x) a_{n-1}`.
pub fn boundary(p: &Presentation, c: &Chain) -> Result<Chain, AlgebraError> {
    let n = c.degree;
    if n == 0 {
        return Ok(Chain::zero(0));
    }
    let mut out = Chain::zero(n - 1);
    for (t, coeff) in &c.terms {
        let ws = &t.0;
        for i in 0..n {
            let sign = if i % 2 == 0 { Rat::one() } else { -Rat::one() };
            let prod = match p.concat(&ws[i], &ws[i + 1]) {
                Some(w) => p.normalize_word(w)?,
                None => continue,
            };
            let mut slots: Vec<Element> = Vec::new();
            for (j, w) in ws.iter().enumerate() {
                if j == i {
                    slots.push(prod.clone());
                } else if j == i + 1 {
                    continue;
                } else {
                    slots.push(Element::from_word(w.clone()));
                }
            }
            out = out.add(&chain_from_slots(p, &slots, coeff * &sign));
        }
        let sign = if n % 2 == 0 { Rat::one() } else { -Rat::one() };
        if let Some(w) = p.concat(&ws[n], &ws[0]) {
            let prod = p.normalize_word(w)?;
            let mut slots: Vec<Element> = vec![prod];
            for w in &ws[1..n] {
                slots.push(Element::from_word(w.clone()));
            }
            out = out.add(&chain_from_slots(p, &slots, coeff * &sign));
        }
    }
    Ok(out)
}

/// Connes's mixed differential on the normalized complex:
/// `B(a0 (x) ... (x) an) = sum_i (-1)^{ni} 1 (x) a_i (x) .. (x) an (x) a0 (x) .. (x) a_{i-1}`.
pub fn connes_b(p: &Presentation, c: &Chain) -> Chain {
    let n = c.degree;
    let mut out = Chain::zero(n + 1);
    for (t, coeff) in &c.terms {
        let ws = &t.0;
        for i in 0..=n {
            let sign = if (n * i) % 2 == 0 { Rat::one() } else { -Rat::one() };
            let mut rotated: Vec<Word> = Vec::with_capacity(n + 2);
            rotated.push(Word::Id(p.word_tgt(&ws[i])));
            rotated.extend(ws[i..].iter().cloned());
            rotated.extend(ws[..i].iter().cloned());
            if Chain::admissible(p, &rotated) {
                out.add_raw(ChainTerm(rotated), coeff * &sign);
            }
        }
    }
    out
}

/// Transfer mode for `chain_to_form`: `Scaled` divides the weight-`n` image
/// by `n` (the inverse of the grading operator on positive weights).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TransferMode {
    Direct,
    Scaled,
}

/// Termwise comparison map `a0 (x) a1 (x) ... (x) an -> a0 da1 ... dan`.
pub fn chain_to_form(p: &Presentation, c: &Chain, mode: TransferMode) -> Result<Form, AlgebraError> {
    let n = c.degree;
    let mut out = Form::zero(n);
    for (t, coeff) in &c.terms {
        let mut factors: Vec<Form> = vec![Form::from_word(t.0[0].clone())];
        for w in &t.0[1..] {
            factors.push(forms::d_word(p, w)?);
        }
        let refs: Vec<&Form> = factors.iter().collect();
        out = out.add(&forms::mul_all(p, &refs)?.scale(coeff));
    }
    if mode == TransferMode::Scaled && n > 0 {
        out = out.scale(&(Rat::one() / crate::rint(n as i64)));
    }
    Ok(out)
}

/// Inverse comparison: comb the form into `a0 d(a1) ... d(an)` and read off
/// the normalized tuples.
pub fn form_to_chain(p: &Presentation, f: &Form) -> Result<Chain, AlgebraError> {
    let mut out = Chain::zero(f.weight);
    for (coeff, words) in forms::full_comb(p, f)? {
        if Chain::admissible(p, &words) {
            out.add_raw(ChainTerm(words), coeff);
        }
    }
    Ok(out)
}

/// A finite, u-truncated series of forms whose weights step by two, the
/// witness format for negative-cyclic closure checks.
#[derive(Clone, Debug)]
pub struct MixedSeries {
    pub components: Vec<Form>,
}

impl MixedSeries {
    pub fn order(&self) -> usize {
        self.components.len()
    }
}

/// Chain-side analogue.
#[derive(Clone, Debug)]
pub struct MixedChainSeries {
    pub components: Vec<Chain>,
}

/// Check the component equations of `(iota_E - u d)(series) = target` on the
/// form side. `target` may be shorter than the series; missing components
/// are zero.
pub fn mixed_closure_check_forms(
    p: &Presentation,
    series: &MixedSeries,
    target: &MixedSeries,
    label: &str,
) -> Result<Vec<Check>, AlgebraError> {
    let mut checks = Vec::new();
    for k in 0..series.order() {
        let mut lhs = forms::iota_e(p, &series.components[k])?;
        if k > 0 {
            lhs = lhs.sub(&forms::d(p, &series.components[k - 1])?);
        }
        let rhs = target.components.get(k);
        let residual = match rhs {
            Some(r) => lhs.sub(r),
            None => lhs,
        };
        checks.push(Check::new(
            format!("{label}.component[{k}]"),
            if residual.is_zero() { Verdict::Pass } else { Verdict::Fail },
            if residual.is_zero() {
                String::new()
            } else {
                format!("residual = {}", forms::form_string(p, &residual))
            },
        ));
    }
    Ok(checks)
}

/// Chain-side closure: `(b - u B)(series) = target`.
pub fn mixed_closure_check_chains(
    p: &Presentation,
    series: &MixedChainSeries,
    target: &MixedChainSeries,
    label: &str,
) -> Result<Vec<Check>, AlgebraError> {
    let mut checks = Vec::new();
    for k in 0..series.components.len() {
        let mut lhs = boundary(p, &series.components[k])?;
        if k > 0 {
            lhs = lhs.sub(&connes_b(p, &series.components[k - 1]));
        }
        let residual = match target.components.get(k) {
            Some(r) => lhs.sub(r),
            None => lhs,
        };
        checks.push(Check::new(
            format!("{label}.component[{k}]"),
            if residual.is_zero() { Verdict::Pass } else { Verdict::Fail },
            if residual.is_zero() { String::new() } else { format!("{} terms", residual.terms.len()) },
        ));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{a2_localized, a2_phi, a2_phi_inv, free_two_inv, laurent_x};
    use crate::rint;

    fn ch(p: &Presentation, slots: &[Element]) -> Chain {
        chain_from_slots(p, slots, Rat::one())
    }

    fn lelt(p: &Presentation, id: &str) -> Element {
        p.letter_elt(p.letter_index(id).unwrap())
    }

    #[test]
    fn connes_b_on_degree_one() {
        // B(x^{-1} (x) x) = 1 (x) x^{-1} (x) x - 1 (x) x (x) x^{-1}
        let p = laurent_x();
        let x = lelt(&p, "x");
        let xi = lelt(&p, "Lx");
        let c = ch(&p, &[xi.clone(), x.clone()]);
        let got = connes_b(&p, &c);
        let one = p.one();
        let expected = ch(&p, &[one.clone(), xi.clone(), x.clone()])
            .sub(&ch(&p, &[one, x, xi]));
        assert_eq!(got, expected);
    }

    #[test]
    fn normalized_complex_kills_leading_unit_slot() {
        // B(1 (x) x) has a repeated unit slot, so it dies.
        let p = laurent_x();
        let c = ch(&p, &[p.one(), lelt(&p, "x")]);
        let b = connes_b(&p, &c);
        // 1 (x) 1 (x) x term is killed; 1 (x) x (x) 1 as well.
        assert!(b.terms.keys().all(|t| !t.0[1..].iter().any(|w| w.is_id())));
    }

    #[test]
    fn b_and_big_b_anticommute() {
        let p = free_two_inv();
        let x = lelt(&p, "x");
        let y = lelt(&p, "y");
        let ly = lelt(&p, "Ly");
        let c = ch(&p, &[&x + &y, ly, x.clone()]);
        let bb = connes_b(&p, &boundary(&p, &c).unwrap());
        let b_b = boundary(&p, &connes_b(&p, &c)).unwrap();
        assert!(bb.add(&b_b).is_zero());
        let b2 = connes_b(&p, &connes_b(&p, &c));
        assert!(b2.is_zero());
    }

    #[test]
    fn pants_boundary_constant() {
        // b(beta_1) = -2 (alpha_1(x) + alpha_1(y) - alpha_1(z)) for z = xy.
        let p = free_two_inv();
        let x = lelt(&p, "x");
        let y = lelt(&p, "y");
        let lx = lelt(&p, "Lx");
        let ly = lelt(&p, "Ly");
        let xy = p.mul(&x, &y).unwrap();
        let lyx = p.mul(&ly, &lx).unwrap();
        let beta1 = ch(&p, &[ly.clone(), lx.clone(), xy.clone()])
            .sub(&ch(&p, &[y.clone(), lyx.clone(), x.clone()]));
        let alpha = |a: &Element, ai: &Element| -> Chain {
            ch(&p, &[ai.clone(), a.clone()])
                .sub(&ch(&p, &[a.clone(), ai.clone()]))
                .scale(&crate::rat(1, 2))
        };
        let s = alpha(&x, &lx).add(&alpha(&y, &ly)).sub(&alpha(&xy, &lyx));
        assert_eq!(boundary(&p, &beta1).unwrap(), s.scale(&rint(-2)));
    }

    #[test]
    fn a2_homotopy_boundary() {
        // b(beta_1) = (Phi^{-1} (x) Phi - Phi (x) Phi^{-1}) / 2 for the
        // homotopy of the localized double A2.
        let p = a2_localized();
        let e = lelt(&p, "e");
        let estar = lelt(&p, "e*");
        let phi = a2_phi(&p);
        let phi_inv = a2_phi_inv(&p);
        let ephi = p.mul(&e, &phi).unwrap();
        let one = p.one();
        let beta1 = ch(&p, &[estar.clone(), e.clone(), phi.clone()])
            .add(&ch(&p, &[phi.clone(), estar.clone(), e.clone()]))
            .sub(&ch(&p, &[estar.clone(), phi_inv.clone(), e.clone()]))
            .sub(&ch(&p, &[phi_inv.clone(), e.clone(), estar.clone()]))
            .add(&ch(&p, &[one.clone(), estar.clone(), ephi.clone()]))
            .sub(&ch(&p, &[one.clone(), ephi.clone(), estar.clone()]))
            .scale(&crate::rat(1, 2));
        let got = boundary(&p, &beta1).unwrap();
        let expected = ch(&p, &[phi_inv.clone(), phi.clone()])
            .sub(&ch(&p, &[phi.clone(), phi_inv.clone()]))
            .scale(&crate::rat(1, 2));
        assert_eq!(got, expected);
    }

    #[test]
    fn chain_to_form_direct_factor_two() {
        // 1 (x) a (x) a* - 1 (x) a* (x) a maps to da da* - da* da, which is
        // 2 da da* modulo commutators.
        let q = crate::quiver::double(&crate::quiver::Quiver::loop_quiver());
        let p = crate::presentation::double_localized(&q);
        let a = lelt(&p, "a");
        let astar = lelt(&p, "a*");
        let one = p.one();
        let h = ch(&p, &[one.clone(), a.clone(), astar.clone()])
            .sub(&ch(&p, &[one, astar.clone(), a.clone()]));
        let f = chain_to_form(&p, &h, TransferMode::Direct).unwrap();
        let ai = p.letter_index("a").unwrap();
        let si = p.letter_index("a*").unwrap();
        let dada = forms::mul(&p, &crate::dd::probe(&p, ai), &crate::dd::probe(&p, si)).unwrap();
        let out = crate::dr::dr_equal(
            &p,
            &f,
            &dada.scale(&rint(2)),
            &crate::dr::DrBudget::default(),
        )
        .unwrap();
        assert_eq!(out.verdict, crate::dr::DrVerdict::Equal);
    }

    #[test]
    fn form_chain_roundtrip_on_harmonic_witness() {
        // gamma_1 = (alpha_1 + beta_1)/2 transfers to
        // (x^{-1} (x) x - x (x) x^{-1}) / 2 and back.
        let p = laurent_x();
        let x = p.letter_index("x").unwrap();
        let lx = p.letter_index("Lx").unwrap();
        let mut gamma = Form::zero(1);
        forms::push_term(&p, &mut gamma, vec![Word::single(lx), Word::Id(0)], vec![x], crate::rat(1, 2)).unwrap();
        forms::push_term(&p, &mut gamma, vec![Word::Id(0), Word::single(lx)], vec![x], crate::rat(1, 2)).unwrap();
        let c = form_to_chain(&p, &gamma).unwrap();
        let expected = ch(&p, &[lelt(&p, "Lx"), lelt(&p, "x")])
            .sub(&ch(&p, &[lelt(&p, "x"), lelt(&p, "Lx")]))
            .scale(&crate::rat(1, 2));
        assert_eq!(c, expected);
        let back = chain_to_form(&p, &c, TransferMode::Direct).unwrap();
        assert_eq!(back, gamma);
    }

    #[test]
    fn zero_series_passes_closure() {
        let p = laurent_x();
        let s = MixedSeries { components: vec![Form::zero(1), Form::zero(3)] };
        let t = MixedSeries { components: vec![Form::zero(0), Form::zero(2)] };
        let checks = mixed_closure_check_forms(&p, &s, &t, "zero").unwrap();
        assert!(checks.iter().all(|c| c.verdict == Verdict::Pass));
    }
}
