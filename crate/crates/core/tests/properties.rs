mod common;

use common::{Diagram, Element, Ser};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use qpe_core::cobordism::{compose, CobMorphism, FlatTangle};
use qpe_core::colored_links::{link_homology, trace_closure, BracketOptions, Braid, Closure, ColoredDiagram};
use qpe_core::complexes::{juxtapose, partial_trace, tensor_many, Complex};
use qpe_core::homology::{closed_homology, dense_invariant_factors, mat_mul, smith_normal_form, BigradedGroups, DenseMat};
use qpe_core::projectors::{braid_crossing, CrossingSign};
use qpe_core::series::TruncatedSeries;
use qpe_core::temperley_lieb::{tl_mul, Matching, TLElement};
use std::collections::BTreeMap;

fn to_dense(m: &[Vec<i64>]) -> DenseMat {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn matrix(max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-4i64..=4, c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn smith_form_is_a_unimodular_diagonalization(m in matrix(40)) {
        let m = to_dense(&m);
        let (rows, cols) = (m.len(), m[0].len());
        let (u, d, v) = smith_normal_form(&m);
        prop_assert_eq!(mat_mul(&mat_mul(&u, &m, rows), &v, cols), d.clone());
        prop_assert!(common::det(&u).abs().is_one());
        prop_assert!(common::det(&v).abs().is_one());
        let mut diag = vec![];
        for i in 0..rows {
            for j in 0..cols {
                if i != j {
                    prop_assert!(d[i][j].is_zero());
                } else if !d[i][i].is_zero() {
                    prop_assert!(d[i][i].is_positive());
                    diag.push(d[i][i].clone());
                }
            }
        }
        // nonzero entries come first and each divides the next
        let nonzero = (0..rows.min(cols)).take_while(|&i| !d[i][i].is_zero()).count();
        prop_assert_eq!(nonzero, diag.len());
        for w in diag.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn invariant_factors_match_determinantal_divisors(m in matrix(4)) {
        let m = to_dense(&m);
        prop_assert_eq!(dense_invariant_factors(m.clone()), common::invariant_factors(&m));
    }
}

fn diagram_of(m: &Matching) -> Diagram {
    m.pairs().iter().map(|&p| p as usize).collect()
}

/// Random sums of basis diagrams with small exact coefficients.
fn tl_element(n: usize) -> impl Strategy<Value = (TLElement, Element)> {
    let all = Matching::all_square(n);
    let k = all.len();
    prop::collection::vec((0..k, -2i32..=2, -2i64..=2), 0..4).prop_map(move |terms| {
        let mut lib = TLElement::zero(n);
        let mut ora: Element = BTreeMap::new();
        for (i, e, c) in terms {
            if c == 0 {
                continue;
            }
            lib.add_term(all[i].clone(), TruncatedSeries::monomial(e, c));
            let s = ora.entry(diagram_of(&all[i])).or_insert_with(|| Ser::new(i32::MAX));
            s.add(e, BigInt::from(c));
        }
        ora.retain(|_, s| !s.is_zero());
        (lib, ora)
    })
}

fn to_oracle(a: &TLElement) -> Element {
    a.terms()
        .map(|(m, s)| {
            let mut o = Ser::new(if s.is_exact() { i32::MAX } else { s.precision() });
            for (k, c) in s.terms() {
                o.add(k, c.clone());
            }
            (diagram_of(m), o)
        })
        .collect()
}

fn tl_triple() -> impl Strategy<Value = Vec<(TLElement, Element)>> {
    (1usize..=4).prop_flat_map(|n| prop::collection::vec(tl_element(n), 3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn tl_product_matches_the_diagram_oracle(v in tl_triple()) {
        let (a, oa) = &v[0];
        let (b, ob) = &v[1];
        let prod = tl_mul(a, b).unwrap();
        prop_assert!(common::elem_eq(&to_oracle(&prod), &common::mul(oa, ob, i32::MAX)));
    }

    #[test]
    fn tl_product_is_associative(v in tl_triple()) {
        let (a, b, c) = (&v[0].0, &v[1].0, &v[2].0);
        let left = tl_mul(&tl_mul(a, b).unwrap(), c).unwrap();
        let right = tl_mul(a, &tl_mul(b, c).unwrap()).unwrap();
        prop_assert!(left.eq_to_precision(&right));
    }
}

fn basis_cob(x: &FlatTangle, y: &FlatTangle, mask: u64) -> CobMorphism {
    let curves = CobMorphism::zero(x.clone(), y.clone()).curve_count();
    CobMorphism::basis(x.clone(), y.clone(), mask & ((1u64 << curves) - 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cobordism_composition(n in 1usize..=3, picks in prop::collection::vec(0usize..14, 4), masks in prop::collection::vec(any::<u64>(), 3), point in 0usize..6) {
        let all = Matching::all_square(n);
        let t: Vec<FlatTangle> = picks.iter().map(|&i| FlatTangle::new(all[i % all.len()].clone())).collect();
        let f = basis_cob(&t[0], &t[1], masks[0]);
        let g = basis_cob(&t[1], &t[2], masks[1]);
        let h = basis_cob(&t[2], &t[3], masks[2]);
        let gf = compose(&g, &f).unwrap();
        prop_assert_eq!(compose(&h, &gf).unwrap(), compose(&compose(&h, &g).unwrap(), &f).unwrap());
        let want = f.degree().unwrap() + g.degree().unwrap();
        for (mask, _) in gf.terms() {
            prop_assert_eq!(CobMorphism::basis(t[0].clone(), t[2].clone(), *mask).degree(), Some(want));
        }
        let dot = CobMorphism::dotted_identity(&t[1], point % (2 * n));
        prop_assert!(compose(&dot, &compose(&dot, &f).unwrap()).unwrap().is_zero());
    }
}

/// Braid words as `(generator, inverse)` on `strands` strands.
fn braid(strands: usize, max_len: usize) -> impl Strategy<Value = Vec<(usize, bool)>> {
    prop::collection::vec((1..strands, any::<bool>()), 0..=max_len)
}

fn signed(word: &[(usize, bool)]) -> Vec<i32> {
    word.iter().map(|&(i, inv)| if inv { -(i as i32) } else { i as i32 }).collect()
}

fn closed_braid(strands: usize, word: Vec<i32>, components: usize) -> ColoredDiagram {
    ColoredDiagram {
        braid: Braid { strands, word },
        closure: Closure::Trace,
        colors: vec![1; components],
        framings: vec![],
        marks: vec![],
        family: BTreeMap::new(),
        reversed: vec![],
    }
}

/// Components of the closure of a braid word.
fn components(strands: usize, word: &[(usize, bool)]) -> usize {
    let mut perm: Vec<usize> = (0..strands).collect();
    for &(i, _) in word {
        perm.swap(i - 1, i);
    }
    let mut seen = vec![false; strands];
    let mut count = 0;
    for s in 0..strands {
        if !seen[s] {
            count += 1;
            let mut p = s;
            while !seen[p] {
                seen[p] = true;
                p = perm[p];
            }
        }
    }
    count
}

/// The unsimplified bracket of an all-upward braid closure.
fn raw_bracket(strands: usize, word: &[(usize, bool)]) -> Complex {
    let mut acc = raw_bracket_open(strands, word);
    while acc.top() > 0 {
        acc = partial_trace(&acc).unwrap();
    }
    acc
}

fn euler(g: &BigradedGroups) -> BTreeMap<i32, BigInt> {
    let mut out: BTreeMap<i32, BigInt> = BTreeMap::new();
    for ((h, q), x) in g.iter() {
        *out.entry(*q).or_insert_with(BigInt::zero) += if h.rem_euclid(2) == 0 { x.rank as i64 } else { -(x.rank as i64) };
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `q - q²e` for `σ_i` and `q⁻¹ - q⁻²e` for its inverse, multiplied out and closed.
fn oracle_euler(strands: usize, word: &[(usize, bool)]) -> BTreeMap<i32, BigInt> {
    let one: Element = [(common::identity(strands), Ser::mono(0, 1, i32::MAX))].into_iter().collect();
    let mut acc = one;
    for &(i, inv) in word {
        let s = if inv { -1 } else { 1 };
        let mut x: Element = BTreeMap::new();
        x.insert(common::identity(strands), Ser::mono(s, 1, i32::MAX));
        x.insert(common::e(strands, i), Ser::mono(2 * s, -1, i32::MAX));
        acc = common::mul(&x, &acc, i32::MAX);
    }
    common::eval_closure(&acc, i32::MAX).terms
}

fn shift_between(a: &BigradedGroups, b: &BigradedGroups) -> Option<(i32, i32)> {
    let (x, y) = (a.iter().next()?.0, b.iter().next()?.0);
    let s = (y.0 - x.0, y.1 - x.1);
    (a.shifted(s.0, s.1) == *b).then_some(s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homology_survives_simplification(word in braid(3, 4)) {
        let raw = closed_homology(&raw_bracket(3, &word)).unwrap();
        let k = components(3, &word);
        let d = closed_braid(3, signed(&word), k);
        prop_assert_eq!(&raw, &link_homology(&d, BracketOptions::default()).unwrap());
        let simplified = trace_closure(&raw_bracket_open(3, &word), None).unwrap();
        prop_assert_eq!(&raw, &closed_homology(&simplified).unwrap());
    }

    #[test]
    fn euler_characteristic_is_the_closed_tl_value(word in braid(3, 5)) {
        let k = components(3, &word);
        let g = link_homology(&closed_braid(3, signed(&word), k), BracketOptions::default()).unwrap();
        prop_assert_eq!(euler(&g), oracle_euler(3, &word));
    }

    #[test]
    fn reversing_a_component_only_shifts(len in 1usize..=3, inv in prop::collection::vec(any::<bool>(), 6)) {
        let word: Vec<(usize, bool)> = (0..2 * len).map(|k| (1, inv[k])).collect();
        let plain = closed_braid(2, signed(&word), 2);
        let mut flipped = plain.clone();
        flipped.reversed = vec![false, true];
        let a = link_homology(&plain, BracketOptions::default()).unwrap();
        let b = link_homology(&flipped, BracketOptions::default()).unwrap();
        prop_assert!(shift_between(&a, &b).is_some(), "{}\nvs\n{}", a, b);
    }

    #[test]
    fn link_homology_is_deterministic(word in braid(3, 4)) {
        let d = closed_braid(3, signed(&word), components(3, &word));
        let a = link_homology(&d, BracketOptions::default()).unwrap();
        let b = link_homology(&d, BracketOptions::default()).unwrap();
        prop_assert_eq!(a.to_string(), b.to_string());
    }
}

fn raw_bracket_open(strands: usize, word: &[(usize, bool)]) -> Complex {
    let mut parts = vec![Complex::identity(strands)];
    for &(i, inv) in word {
        let sign = if inv { CrossingSign::Negative } else { CrossingSign::Positive };
        let mut c = braid_crossing(inv, sign);
        if i > 1 {
            c = juxtapose(&Complex::identity(i - 1), &c);
        }
        if i + 1 < strands {
            c = juxtapose(&c, &Complex::identity(strands - i - 1));
        }
        parts.push(c);
    }
    tensor_many(&parts).unwrap()
}
