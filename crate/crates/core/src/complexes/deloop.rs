//! Delooping: `T ⊔ O ≅ qT ⊕ q⁻¹T`.
//!
//! Summands of an object with `c` circles are indexed by a sign vector
//! `s ∈ {±1}^c` stored as bits (bit set means `+1`). The inclusion of the
//! `s`-summand is a cup dotted on circles with `s = +1`, the projection a cap
//! dotted on circles with `s = -1`.

use super::{ChainMap, Complex, SDRData};
use crate::cobordism::{curve_data, CobMorphism, FlatTangle, GradedObject};
use std::collections::BTreeMap;

/// Summands of one object, in output order: all-plus first.
fn summands(o: &GradedObject) -> Vec<(u64, GradedObject)> {
    let c = o.tangle.circles as u32;
    let flat = o.tangle.without_circles();
    (0..1u64 << c)
        .rev()
        .map(|s| {
            let plus = s.count_ones() as i32;
            (s, GradedObject::new(flat.clone(), o.q + plus - (c as i32 - plus)))
        })
        .collect()
}

fn offset_of(c: u8, s: u64) -> usize {
    ((1u64 << c) - 1 - s) as usize
}

/// Split a morphism between looped tangles into its components between summands.
/// Returns `(s_src, s_tgt, component)` for every nonzero component.
fn split(f: &CobMorphism) -> Vec<(u64, u64, CobMorphism)> {
    let cd = curve_data(&f.src, &f.tgt);
    let na = cd.arcs.len();
    let (cs, ct) = (f.src.circles as usize, f.tgt.circles as usize);
    let (fs, ft) = (f.src.without_circles(), f.tgt.without_circles());
    let arc_mask = if na == 64 { u64::MAX } else { (1u64 << na) - 1 };
    let mut parts: BTreeMap<(u64, u64), Vec<(u64, num_bigint::BigInt)>> = BTreeMap::new();
    for (&mask, c) in f.terms() {
        let sd = (mask >> na) & ((1u64 << cs) - 1);
        let td = (mask >> (na + cs)) & ((1u64 << ct) - 1);
        // undotted source circle lands in the plus summand, dotted target circle comes from it
        let s = !sd & ((1u64 << cs) - 1);
        parts.entry((s, td)).or_default().push((mask & arc_mask, c.clone()));
    }
    parts
        .into_iter()
        .map(|((s, t), terms)| (s, t, CobMorphism::from_terms(fs.clone(), ft.clone(), terms)))
        .filter(|(_, _, m)| !m.is_zero())
        .collect()
}

/// Projection `T ⊔ O^c → T` onto summand `s`.
pub(crate) fn projection(t: &FlatTangle, s: u64) -> CobMorphism {
    let flat = t.without_circles();
    let na = curve_data(t, &flat).arcs.len();
    let c = t.circles as u32;
    let minus = !s & ((1u64 << c) - 1);
    CobMorphism::basis(t.clone(), flat, minus << na)
}

/// Inclusion `T → T ⊔ O^c` of summand `s`.
pub(crate) fn inclusion(t: &FlatTangle, s: u64) -> CobMorphism {
    let flat = t.without_circles();
    let na = curve_data(&flat, t).arcs.len();
    CobMorphism::basis(flat, t.clone(), s << na)
}

pub(crate) fn deloop_impl(a: &Complex, track: bool) -> (Complex, Option<SDRData>) {
    let mut out = Complex::new(a.bot(), a.top());
    out.set_trunc(a.trunc());
    let mut start: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    let mut pi = ChainMap::new(0, 0);
    let mut sigma = ChainMap::new(0, 0);
    for (h, objs) in a.degrees() {
        let st = start.entry(h).or_default();
        for (i, o) in objs.iter().enumerate() {
            let first = out.rank(h);
            st.push(first);
            for (s, so) in summands(o) {
                let j = out.push(h, so);
                if track {
                    if o.tangle.circles == 0 {
                        let id = CobMorphism::identity(&o.tangle);
                        pi.add_entry(h, j, i, id.clone());
                        sigma.add_entry(h, i, j, id);
                    } else {
                        pi.add_entry(h, j, i, projection(&o.tangle, s));
                        sigma.add_entry(h, i, j, inclusion(&o.tangle, s));
                    }
                }
            }
        }
    }
    for (h, m) in a.diffs() {
        for ((r, c), f) in m {
            let (src, tgt) = (&a.objects(h)[*c], &a.objects(h + 1)[*r]);
            if src.tangle.circles == 0 && tgt.tangle.circles == 0 {
                out.add_entry(h, start[&(h + 1)][*r], start[&h][*c], f.clone());
                continue;
            }
            for (s, t, g) in split(f) {
                let row = start[&(h + 1)][*r] + offset_of(tgt.tangle.circles, t);
                let col = start[&h][*c] + offset_of(src.tangle.circles, s);
                out.add_entry(h, row, col, g);
            }
        }
    }
    out.tidy();
    let sdr = track.then(|| SDRData { pi, sigma, h: ChainMap::new(-1, 0) });
    (out, sdr)
}

/// Replace every circle by its two shifted copies; returns the retraction data.
pub fn deloop(a: &Complex) -> (Complex, SDRData) {
    let (c, s) = deloop_impl(a, true);
    (c, s.expect("tracked"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cobordism::partial_trace;

    #[test]
    fn looped_strand_splits() {
        let t = FlatTangle::identity(2).partial_trace();
        assert_eq!(t.circles, 1);
        let mut c = Complex::new(1, 1);
        c.push(0, GradedObject::new(t, 0));
        let (d, sdr) = deloop(&c);
        let qs: Vec<i32> = d.objects(0).iter().map(|o| o.q).collect();
        assert_eq!(qs, vec![1, -1]);
        sdr.verify(&c, &d).unwrap();
    }

    #[test]
    fn kink_complex_has_twice_dot() {
        // trace of the positive crossing complex on two strands
        let e = FlatTangle::e(2, 1);
        let one = FlatTangle::identity(2);
        let mut x = Complex::square(2);
        x.push(-1, GradedObject::new(e.clone(), 2));
        x.push(0, GradedObject::new(one.clone(), 1));
        x.set_entry(-1, 0, 0, CobMorphism::saddle(e, one));
        let mut t = Complex::new(1, 1);
        for (h, objs) in x.degrees() {
            for o in objs {
                t.push(h, GradedObject::new(o.tangle.partial_trace(), o.q));
            }
        }
        for (h, m) in x.diffs() {
            for ((r, c), f) in m {
                t.set_entry(h, *r, *c, partial_trace(f).unwrap());
            }
        }
        let (d, sdr) = deloop(&t);
        sdr.verify(&t, &d).unwrap();
        assert_eq!(d.rank(-1), 1);
        assert_eq!(d.rank(0), 2);
    }
}
