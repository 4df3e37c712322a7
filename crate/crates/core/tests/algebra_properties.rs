//! Property tests for the presented-algebra layer and the mixed-complex
//! operators: associativity and unit laws, idempotence of normalization,
//! exactness of the localization rules, and the chain-level differentials.

use ncforge_core::chains::{boundary, chain_from_slots, connes_b};
use ncforge_core::element::Element;
use ncforge_core::forms::{self, Form};
use ncforge_core::presentation::{a2_localized, free_two_inv, laurent_x, Presentation};
use ncforge_core::word::{LetterId, VertexId, Word};
use ncforge_core::{rint, Rat};
use proptest::prelude::*;

fn arb_word(p: &Presentation, max_len: usize) -> impl Strategy<Value = Word> {
    let letters = p.letters.len() as u16;
    let vertices = p.vertices.len() as u32;
    let pres = p.clone();
    prop::collection::vec(0..letters, 0..=max_len).prop_map(move |seed| {
        // Walk backwards so every step composes.
        match seed.first() {
            None => Word::Id(seed.len() as VertexId % vertices.max(1)),
            Some(&start) => {
                let mut ls = vec![start];
                let mut src = pres.letter(start).src;
                for raw in &seed[1..] {
                    let candidates: Vec<LetterId> = (0..letters)
                        .filter(|l| pres.letter(*l).tgt == src)
                        .collect();
                    if candidates.is_empty() {
                        break;
                    }
                    let next = candidates[*raw as usize % candidates.len()];
                    ls.push(next);
                    src = pres.letter(next).src;
                }
                Word::Path(ls)
            }
        }
    })
}

fn arb_element(p: &Presentation, max_len: usize) -> impl Strategy<Value = Element> {
    let pres = p.clone();
    prop::collection::vec((arb_word(p, max_len), -3i64..=3), 1..=3).prop_map(move |terms| {
        let mut raw = Element::zero();
        for (w, c) in terms {
            raw.add_term(w, rint(c));
        }
        pres.normalize(&raw).unwrap()
    })
}

fn presentations() -> Vec<Presentation> {
    vec![laurent_x(), free_two_inv(), a2_localized()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(idx in 0usize..3, seed in prop::collection::vec(0u16..100, 12)) {
        let p = &presentations()[idx];
        // Derive three elements from the shared seed.
        let chunk = seed.len() / 3;
        let elt = |part: &[u16]| {
            let mut raw = Element::zero();
            for (i, s) in part.iter().enumerate() {
                let len = (*s as usize) % 3;
                let mut w = Word::Id((*s as u32) % p.vertices.len() as u32);
                if len > 0 {
                    let mut ls = vec![(*s % p.letters.len() as u16) as LetterId];
                    let mut src = p.letter(ls[0]).src;
                    for _ in 1..len {
                        let candidates: Vec<LetterId> = (0..p.letters.len() as u16)
                            .filter(|l| p.letter(*l).tgt == src)
                            .collect();
                        if candidates.is_empty() { break; }
                        let next = candidates[(*s as usize + i) % candidates.len()];
                        ls.push(next);
                        src = p.letter(next).src;
                    }
                    w = Word::Path(ls);
                }
                raw.add_term(w, rint((*s as i64 % 5) - 2));
            }
            p.normalize(&raw).unwrap()
        };
        let a = elt(&seed[..chunk]);
        let b = elt(&seed[chunk..2 * chunk]);
        let c = elt(&seed[2 * chunk..]);
        let ab_c = p.mul(&p.mul(&a, &b).unwrap(), &c).unwrap();
        let a_bc = p.mul(&a, &p.mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unit_laws_and_normalize_idempotence(e in arb_element(&a2_localized(), 3)) {
        let p = a2_localized();
        let one = p.one();
        prop_assert_eq!(&p.mul(&one, &e).unwrap(), &e);
        prop_assert_eq!(&p.mul(&e, &one).unwrap(), &e);
        let renorm = p.normalize(&e).unwrap();
        prop_assert_eq!(&renorm, &e);
    }

    #[test]
    fn localization_is_exactly_two_sided(w in arb_word(&a2_localized(), 0)) {
        let p = a2_localized();
        let _ = w;
        for (l, s) in p.inverts.clone() {
            let le = p.letter_elt(l);
            let v = p.letter(l).tgt;
            prop_assert_eq!(p.mul(&le, &s).unwrap(), p.idempotent(v));
            prop_assert_eq!(p.mul(&s, &le).unwrap(), p.idempotent(v));
        }
    }

    #[test]
    fn d_squared_is_zero_on_elements(e in arb_element(&a2_localized(), 2)) {
        let p = a2_localized();
        let de = forms::d_elt(&p, &e).unwrap();
        prop_assert!(forms::d(&p, &de).unwrap().is_zero());
    }

    #[test]
    fn form_product_is_associative(
        a in arb_element(&laurent_x(), 2),
        b in arb_element(&laurent_x(), 2),
        c in arb_element(&laurent_x(), 2),
    ) {
        let p = laurent_x();
        let fa = forms::d_elt(&p, &a).unwrap();
        let fb = Form::from_element(&b);
        let fc = forms::d_elt(&p, &c).unwrap();
        let left = forms::mul(&p, &forms::mul(&p, &fa, &fb).unwrap(), &fc).unwrap();
        let right = forms::mul(&p, &fa, &forms::mul(&p, &fb, &fc).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn chain_differentials_square_to_zero(
        a in arb_element(&free_two_inv(), 2),
        b in arb_element(&free_two_inv(), 1),
        c in arb_element(&free_two_inv(), 1),
    ) {
        let p = free_two_inv();
        let chain = chain_from_slots(&p, &[a, b, c], Rat::from_integer(1.into()));
        let bb = boundary(&p, &boundary(&p, &chain).unwrap()).unwrap();
        prop_assert!(bb.is_zero());
        prop_assert!(connes_b(&p, &connes_b(&p, &chain)).is_zero());
        let anti = connes_b(&p, &boundary(&p, &chain).unwrap())
            .add(&boundary(&p, &connes_b(&p, &chain)).unwrap());
        prop_assert!(anti.is_zero());
    }
}
