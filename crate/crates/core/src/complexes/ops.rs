//! Algebraic and planar operations on complexes.

use super::deloop::deloop_impl;
use super::{ChainMap, Complex};
use crate::cobordism::{self, CobMorphism, FlatTangle, GradedObject};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

fn sign(h: i32) -> i64 {
    if h.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn max_opt(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// `t^i q^j A`, with `d_{tA} = -d_A`.
pub fn shift(a: &Complex, i: i32, j: i32) -> Complex {
    let mut out = Complex::new(a.bot(), a.top());
    for (h, v) in a.degrees() {
        for o in v {
            out.push(h + i, GradedObject::new(o.tangle.clone(), o.q + j));
        }
    }
    let s = sign(i);
    for (h, m) in a.diffs() {
        for ((r, c), f) in m {
            out.set_entry(h + i, *r, *c, f.scale_i64(s));
        }
    }
    out.set_trunc(a.trunc().map(|t| t + i));
    out
}

/// `A ⊕ B`, objects of `A` first in every degree.
pub fn direct_sum(a: &Complex, b: &Complex) -> Result<Complex> {
    if a.bot() != b.bot() || a.top() != b.top() {
        return Err(Error::BoundaryMismatch("direct sum of complexes with different boundaries".into()));
    }
    let mut out = a.clone();
    let mut off = BTreeMap::new();
    for (h, v) in b.degrees() {
        off.insert(h, out.rank(h));
        for o in v {
            out.push(h, o.clone());
        }
    }
    for (h, m) in b.diffs() {
        let (oc, or) = (off.get(&h).copied().unwrap_or(0), off.get(&(h + 1)).copied().unwrap_or(0));
        for ((r, c), f) in m {
            out.set_entry(h, r + or, c + oc, f.clone());
        }
    }
    out.set_trunc(max_opt(a.trunc(), b.trunc()));
    Ok(out)
}

/// Truncation bound of a product of two complexes.
fn product_trunc(a: &Complex, b: &Complex) -> Option<i32> {
    let ta = a.trunc().map(|t| t + b.hmax().unwrap_or(0));
    let tb = b.trunc().map(|t| t + a.hmax().unwrap_or(0));
    max_opt(ta, tb)
}

/// Raw bifunctor on objects and morphisms, followed by delooping.
fn bifunctor(
    a: &Complex,
    b: &Complex,
    bot: usize,
    top: usize,
    obj: impl Fn(&FlatTangle, &FlatTangle) -> FlatTangle,
    mor: impl Fn(&CobMorphism, &CobMorphism) -> CobMorphism,
) -> Complex {
    let mut raw = Complex::new(bot, top);
    let mut index: BTreeMap<(i32, usize, i32, usize), usize> = BTreeMap::new();
    for (ha, va) in a.degrees() {
        for (hb, vb) in b.degrees() {
            for (i, x) in va.iter().enumerate() {
                for (j, y) in vb.iter().enumerate() {
                    let t = obj(&x.tangle, &y.tangle);
                    let k = raw.push(ha + hb, GradedObject::new(t, x.q + y.q));
                    index.insert((ha, i, hb, j), k);
                }
            }
        }
    }
    let ids_a: BTreeMap<(i32, usize), CobMorphism> = a
        .degrees()
        .flat_map(|(h, v)| v.iter().enumerate().map(move |(i, o)| ((h, i), CobMorphism::identity(&o.tangle))))
        .collect();
    let ids_b: BTreeMap<(i32, usize), CobMorphism> = b
        .degrees()
        .flat_map(|(h, v)| v.iter().enumerate().map(move |(i, o)| ((h, i), CobMorphism::identity(&o.tangle))))
        .collect();
    for (ha, m) in a.diffs() {
        for ((r, c), f) in m {
            for ((hb, j), idy) in &ids_b {
                let g = mor(f, idy);
                let src = index[&(ha, *c, *hb, *j)];
                let tgt = index[&(ha + 1, *r, *hb, *j)];
                raw.add_entry(ha + hb, tgt, src, g);
            }
        }
    }
    for (hb, m) in b.diffs() {
        for ((r, c), f) in m {
            for ((ha, i), idx) in &ids_a {
                let g = mor(idx, f).scale_i64(sign(*ha));
                let src = index[&(*ha, *i, hb, *c)];
                let tgt = index[&(*ha, *i, hb + 1, *r)];
                raw.add_entry(ha + hb, tgt, src, g);
            }
        }
    }
    raw.tidy();
    let mut out = deloop_impl(&raw, false).0;
    out.set_trunc(product_trunc(a, b));
    out
}

/// Vertical composition `A ⊗ B` with `A` stacked on top of `B`.
pub fn tensor(a: &Complex, b: &Complex) -> Result<Complex> {
    if a.bot() != b.top() {
        return Err(Error::StrandMismatch(a.bot(), b.top()));
    }
    Ok(bifunctor(
        a,
        b,
        b.bot(),
        a.top(),
        |x, y| x.stack_on(y),
        |f, g| cobordism::stack(f, g).expect("boundaries checked"),
    ))
}

/// `A₁ ⊗ A₂ ⊗ ⋯`, first factor on top.
pub fn tensor_many(parts: &[Complex]) -> Result<Complex> {
    let mut it = parts.iter();
    let mut acc = it.next().ok_or_else(|| Error::Invalid("empty tensor product".into()))?.clone();
    for p in it {
        acc = tensor(&acc, p)?;
    }
    Ok(acc)
}

/// Horizontal juxtaposition `A ⊔ B`.
pub fn juxtapose(a: &Complex, b: &Complex) -> Complex {
    bifunctor(a, b, a.bot() + b.bot(), a.top() + b.top(), |x, y| x.juxtapose(y), cobordism::juxtapose)
}

/// `A ⊔ 1_k`.
pub fn juxtapose_identity(a: &Complex, k: usize) -> Complex {
    juxtapose(a, &Complex::identity(k))
}

/// Close the rightmost strand and deloop.
pub fn partial_trace(a: &Complex) -> Result<Complex> {
    if a.bot() == 0 || a.top() == 0 {
        return Err(Error::Invalid("partial trace needs at least one strand".into()));
    }
    let mut raw = Complex::new(a.bot() - 1, a.top() - 1);
    for (h, v) in a.degrees() {
        for o in v {
            raw.push(h, GradedObject::new(o.tangle.partial_trace(), o.q));
        }
    }
    for (h, m) in a.diffs() {
        for ((r, c), f) in m {
            raw.set_entry(h, *r, *c, cobordism::partial_trace(f)?);
        }
    }
    let mut out = deloop_impl(&raw, false).0;
    out.set_trunc(a.trunc());
    Ok(out)
}

/// Reverse both gradings, mirror the tangles and reflect every entry.
pub fn dual(a: &Complex) -> Complex {
    let mut out = Complex::new(a.top(), a.bot());
    for (h, v) in a.degrees() {
        for o in v {
            out.push(-h, GradedObject::new(o.tangle.mirror(), -o.q));
        }
    }
    for (h, m) in a.diffs() {
        for ((r, c), f) in m {
            out.set_entry(-h - 1, *c, *r, cobordism::reflect(f));
        }
    }
    out
}

/// Mapping cone of a closed map `f: A → B` of bidegree `(i, j)`:
/// the complex `t^{i-1} q^j A ⊕ B` with differential `[[-d, 0], [f, d_B]]`.
pub fn cone(f: &ChainMap, a: &Complex, b: &Complex) -> Result<Complex> {
    if a.bot() != b.bot() || a.top() != b.top() {
        return Err(Error::BoundaryMismatch("cone of a map between different boundaries".into()));
    }
    f.check_degrees(a, b)?;
    let mut sa = shift(a, f.hdeg - 1, f.qdeg);
    // shift gave (-1)^{i-1} d_A; the cone wants -(-1)^i d_A, the same thing
    sa.set_trunc(None);
    let mut out = direct_sum(&sa, b)?;
    for (k, m) in &f.comps {
        let h = k + f.hdeg - 1;
        for ((r, c), g) in m {
            out.add_entry(h, sa.rank(h + 1) + r, *c, g.clone());
        }
    }
    out.set_trunc(max_opt(a.trunc().map(|t| t + f.hdeg - 1), b.trunc()));
    out.tidy();
    Ok(out)
}

/// Brutal truncation keeping degrees `>= m`; a subcomplex exact from `m` upward.
pub fn truncate_below(a: &Complex, m: i32) -> Complex {
    let mut out = Complex::new(a.bot(), a.top());
    for (h, v) in a.degrees() {
        if h >= m {
            for o in v {
                out.push(h, o.clone());
            }
        }
    }
    for (h, d) in a.diffs() {
        if h >= m {
            for ((r, c), f) in d {
                out.set_entry(h, *r, *c, f.clone());
            }
        }
    }
    let lowest = a.hmin().map_or(false, |lo| lo >= m);
    out.set_trunc(if lowest { a.trunc() } else { max_opt(a.trunc(), Some(m)) });
    out
}
