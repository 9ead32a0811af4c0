//! Crossing complexes, the symmetric projectors `Q_n`, truncated
//! Cooper-Krushkal projectors `P_n` and the quasi-projectors built from them.

mod bracket;

pub use bracket::{braid_crossing, crossing_complex, khovanov_bracket, CrossingSign, Piece, Slice};

use crate::cobordism::{self, flip, CobMorphism, FlatTangle, GradedObject};
use crate::complexes::{
    cone, convolution_complete, juxtapose_identity, shift, simplify, simplify_with, tensor, truncate_below,
    ChainMap, Complex, Convolution, ConvolutionData, Tracking,
};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

fn obj(t: &FlatTangle, q: i32) -> GradedObject {
    GradedObject::new(t.clone(), q)
}

/// `Q_1 = Cone(dot: q²1₁ → 1₁)`.
pub fn q1() -> Complex {
    let id = FlatTangle::identity(1);
    let mut c = Complex::square(1);
    c.push(-1, obj(&id, 2));
    c.push(0, obj(&id, 0));
    c.set_entry(-1, 0, 0, CobMorphism::dotted_identity(&id, 0));
    c
}

/// `q⁴1 → q³e → qe → 1` with saddle, dot difference, saddle.
pub fn q2() -> Complex {
    let id = FlatTangle::identity(2);
    let e = FlatTangle::e(2, 1);
    let mut c = Complex::square(2);
    c.push(-3, obj(&id, 4));
    c.push(-2, obj(&e, 3));
    c.push(-1, obj(&e, 1));
    c.push(0, obj(&id, 0));
    c.set_entry(-3, 0, 0, CobMorphism::saddle(id.clone(), e.clone()));
    c.set_entry(-2, 0, 0, CobMorphism::dotted_identity(&e, 3).add(&CobMorphism::dotted_identity(&e, 0).neg()));
    c.set_entry(-1, 0, 0, CobMorphism::saddle(e, id));
    c
}

/// The bounded six-column model of `Q_3`.
pub fn q3() -> Complex {
    let id = FlatTangle::identity(3);
    let e1 = FlatTangle::e(3, 1);
    let e2 = FlatTangle::e(3, 2);
    let e12 = e1.stack_on(&e2);
    let e21 = e2.stack_on(&e1);
    let s = |a: &FlatTangle, b: &FlatTangle| CobMorphism::saddle(a.clone(), b.clone());
    let dots = |t: &FlatTangle, top: usize, bot: usize| {
        CobMorphism::dotted_identity(t, top).add(&CobMorphism::dotted_identity(t, bot))
    };
    let mut c = Complex::square(3);
    c.push(-5, obj(&id, 6));
    for (h, q) in [(-4, 5), (-1, 1)] {
        c.push(h, obj(&e1, q));
        c.push(h, obj(&e2, q));
    }
    for (h, q) in [(-3, 4), (-2, 2)] {
        c.push(h, obj(&e12, q));
        c.push(h, obj(&e21, q));
    }
    c.push(0, obj(&id, 0));
    let alpha = [s(&id, &e1), s(&id, &e2)];
    let beta = [
        [s(&e1, &e12), s(&e2, &e12).neg()],
        [s(&e1, &e21).neg(), s(&e2, &e21)],
    ];
    let gamma = [[dots(&e12, 3, 1), s(&e21, &e12)], [s(&e12, &e21), dots(&e21, 4, 0)]];
    for (r, f) in alpha.iter().enumerate() {
        c.set_entry(-5, r, 0, f.clone());
        c.set_entry(-1, 0, r, flip(f));
    }
    for r in 0..2 {
        for col in 0..2 {
            c.set_entry(-4, r, col, beta[r][col].clone());
            c.set_entry(-3, r, col, gamma[r][col].clone());
            c.set_entry(-2, col, r, flip(&beta[r][col]));
        }
    }
    c
}

/// Explicit `Q_n` for `n ≤ 3`.
pub fn explicit_q(n: usize) -> Result<Complex> {
    match n {
        1 => Ok(q1()),
        2 => Ok(q2()),
        3 => Ok(q3()),
        _ => Err(Error::Invalid(format!("no explicit model of Q_{}", n))),
    }
}

/// `D_k = e_{n-1} e_{n-2} ⋯ e_{n-k}`, first factor on top.
fn d_tangle(n: usize, k: usize) -> FlatTangle {
    let mut t = FlatTangle::identity(n);
    for i in 0..k {
        t = t.stack_on(&FlatTangle::e(n, n - 1 - i));
    }
    t
}

/// Stack the identity of every object of `top` on a fixed morphism `f`.
fn stack_map(top: &Complex, f: &CobMorphism) -> Result<ChainMap> {
    let mut m = ChainMap::new(0, 0);
    for (h, v) in top.degrees() {
        for (i, o) in v.iter().enumerate() {
            let g = cobordism::stack(&CobMorphism::identity(&o.tangle), f)?;
            if g.src.circles != 0 || g.tgt.circles != 0 {
                return Err(Error::Invalid("stacking produced closed circles".into()));
            }
            m.add_entry(h, i, i, g);
        }
    }
    Ok(m)
}

/// The symmetric sequence `E_{1-2n} → ⋯ → E_0` relative to a complex `p` on
/// `n − 1` strands that kills turnbacks.
pub fn symmetric_sequence(p: &Complex, n: usize) -> Result<ConvolutionData> {
    if n < 2 || p.bot() != n - 1 || p.top() != n - 1 {
        return Err(Error::StrandMismatch(p.bot(), n - 1));
    }
    let top = juxtapose_identity(p, 1);
    let mut terms = vec![];
    let mut shapes = vec![];
    for j in 0..2 * n {
        let (k, q) = if j < n { (j, (2 * n - j) as i32) } else { (2 * n - 1 - j, (2 * n - 1 - j) as i32) };
        let d = d_tangle(n, k);
        let e = tensor(&top, &Complex::object(GradedObject::new(d.clone(), 0)))?;
        terms.push(shift(&e, 0, q));
        shapes.push(d);
    }
    let mut maps = vec![];
    for j in 0..2 * n - 1 {
        let (a, b) = (&shapes[j], &shapes[j + 1]);
        let f = if j == n - 1 {
            // top dot at the top end of the strand leaving the box, bottom dot on the lowest cup
            CobMorphism::dotted_identity(a, n).add(&CobMorphism::dotted_identity(a, 0).neg())
        } else {
            CobMorphism::saddle(a.clone(), b.clone())
        };
        maps.push(stack_map(&top, &f)?);
    }
    let floor = p.trunc();
    Ok(ConvolutionData { terms, start: 1 - 2 * n as i32, maps, floor })
}

/// A convolution of the symmetric sequence relative to `p`.
pub fn build_qn_relative(p: &Complex, n: usize) -> Result<Convolution> {
    convolution_complete(&symmetric_sequence(p, n)?)
}

/// `Q_n` from the convolution solver, relative to a truncated `P_{n-1}`.
pub fn build_qn(n: usize, window: i32) -> Result<Complex> {
    if n < 2 {
        return Err(Error::Invalid("build_qn needs n >= 2".into()));
    }
    let prev = truncated_pn(n - 1, window)?;
    Ok(build_qn_relative(&prev.complex, n)?.complex)
}

/// A truncated Cooper-Krushkal projector together with its unit and the
/// available polynomial actions `u_k` of bidegree `(2 − 2k, 2k)`.
#[derive(Clone, Debug)]
pub struct TruncatedProjector {
    pub n: usize,
    pub window: i32,
    pub complex: Complex,
    pub unit: ChainMap,
    pub u_maps: BTreeMap<usize, ChainMap>,
}

impl TruncatedProjector {
    /// Lowest homological degree with exact homology.
    pub fn valid_from(&self) -> i32 {
        self.complex.valid_from().unwrap_or(i32::MIN)
    }
}

/// The dot on the leftmost strand of every object, a chain map of bidegree `(0, 2)`.
pub fn left_dot(c: &Complex) -> ChainMap {
    let mut u = ChainMap::new(0, 2);
    for (h, v) in c.degrees() {
        for (i, o) in v.iter().enumerate() {
            u.add_entry(h, i, i, CobMorphism::dotted_identity(&o.tangle, 0));
        }
    }
    u
}

/// Copies `Q, t^{2-2n}q^{2n}Q, …` glued by `−Id` from each head `q^{2n}1_n`
/// to the next tail, brutally truncated below `-window`.
fn periodic(q: &Complex, n: usize, window: i32) -> (Complex, ChainMap, ChainMap) {
    let step = 2 - 2 * n as i32;
    let head = 1 - 2 * n as i32;
    let mut c = Complex::square(n);
    let mut index: BTreeMap<(i32, i32, usize), usize> = BTreeMap::new();
    let mut k = 0;
    while k * step >= -window {
        for (h, v) in q.degrees() {
            for (i, o) in v.iter().enumerate() {
                let j = c.push(h + k * step, GradedObject::new(o.tangle.clone(), o.q + 2 * n as i32 * k));
                index.insert((k, h, i), j);
            }
        }
        k += 1;
    }
    let blocks = k;
    for k in 0..blocks {
        for (h, m) in q.diffs() {
            for ((r, col), f) in m {
                let src = index[&(k, h, *col)];
                let tgt = index[&(k, h + 1, *r)];
                c.set_entry(h + k * step, tgt, src, f.clone());
            }
        }
        if k + 1 < blocks {
            let src = index[&(k, head, 0)];
            let tgt = index[&(k + 1, 0, 0)];
            let id = &c.objects(head + k * step)[src].tangle;
            let f = CobMorphism::identity(id).neg();
            c.set_entry(head + k * step, tgt, src, f);
        }
    }
    let mut u = ChainMap::new(step, 2 * n as i32);
    for (&(k, h, i), &j) in &index {
        if let Some(&j2) = index.get(&(k + 1, h, i)) {
            let t = &c.objects(h + k * step)[j].tangle;
            u.add_entry(h + k * step, j2, j, CobMorphism::identity(t));
        }
    }
    let mut unit = ChainMap::new(0, 0);
    unit.add_entry(0, index[&(0, 0, 0)], 0, CobMorphism::identity(&FlatTangle::identity(n)));
    let t = truncate_below(&c, -window);
    let u = restrict_to(&u, &t);
    (t, u, unit)
}

fn restrict_to(f: &ChainMap, c: &Complex) -> ChainMap {
    let mut out = ChainMap::new(f.hdeg, f.qdeg);
    for (k, m) in &f.comps {
        if c.rank(*k) == 0 || c.rank(k + f.hdeg) == 0 {
            continue;
        }
        for ((r, col), g) in m {
            out.add_entry(*k, *r, *col, g.clone());
        }
    }
    out
}

/// `P_n` truncated below homological degree `-window`, for `n ≤ 3`.
pub fn truncated_pn(n: usize, window: i32) -> Result<TruncatedProjector> {
    if n == 1 {
        let c = Complex::identity(1);
        let mut u_maps = BTreeMap::new();
        u_maps.insert(1, left_dot(&c));
        return Ok(TruncatedProjector { n, window, unit: ChainMap::identity(&c), complex: c, u_maps });
    }
    let q = explicit_q(n)?;
    if window < 2 * n as i32 - 1 {
        return Err(Error::Window(format!("P_{} needs a window of at least {}", n, 2 * n - 1)));
    }
    let (raw, u, unit) = periodic(&q, n, window);
    let (c, sdr) = simplify_with(&raw, Tracking::Maps);
    let sdr = sdr.expect("tracked");
    let un = sdr.pi.compose(&u).compose(&sdr.sigma);
    let unit = sdr.pi.compose(&unit);
    let mut u_maps = BTreeMap::new();
    u_maps.insert(1, left_dot(&c));
    u_maps.insert(n, un);
    Ok(TruncatedProjector { n, window, complex: c, unit, u_maps })
}

/// `u_2` on `P_3`, realized on the absorbed model `(P_2 ⊔ 1) ⊗ P_3` after
/// simplification. Returns the model complex and the transported map.
pub fn u2_on_p3(window: i32) -> Result<(Complex, ChainMap)> {
    let p2 = truncated_pn(2, window)?;
    let p3 = truncated_pn(3, window)?;
    let top = juxtapose_identity(&p2.complex, 1);
    let m = tensor(&top, &p3.complex)?;
    let u = &p2.u_maps[&2];
    // (u ⊔ 1) ⊗ id, assembled on the object grid of m
    let mut map = ChainMap::new(u.hdeg, u.qdeg);
    let mut index: BTreeMap<(i32, usize, i32, usize), (i32, usize)> = BTreeMap::new();
    {
        let mut counters: BTreeMap<i32, usize> = BTreeMap::new();
        for (ha, va) in top.degrees() {
            for (hb, vb) in p3.complex.degrees() {
                for i in 0..va.len() {
                    for j in 0..vb.len() {
                        let c = counters.entry(ha + hb).or_default();
                        index.insert((ha, i, hb, j), (ha + hb, *c));
                        *c += 1;
                    }
                }
            }
        }
    }
    let id1 = CobMorphism::identity(&FlatTangle::identity(1));
    for (ha, mat) in &u.comps {
        for ((r, c), f) in mat {
            let g = cobordism::juxtapose(f, &id1);
            for (hb, vb) in p3.complex.degrees() {
                for (j, o) in vb.iter().enumerate() {
                    let x = cobordism::stack(&g, &CobMorphism::identity(&o.tangle))?;
                    let (Some(&(h, src)), Some(&(_, tgt))) =
                        (index.get(&(*ha, *c, hb, j)), index.get(&(ha + u.hdeg, *r, hb, j)))
                    else {
                        continue;
                    };
                    map.add_entry(h, tgt, src, x);
                }
            }
        }
    }
    let (s, sdr) = simplify_with(&m, Tracking::Maps);
    let sdr = sdr.expect("tracked");
    Ok((s, sdr.pi.compose(&map).compose(&sdr.sigma)))
}

/// Which factors make up a quasi-projector.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuasiProjectorSpec {
    pub n: usize,
    pub indices: Vec<usize>,
}

impl QuasiProjectorSpec {
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        if let Some(&k) = indices.iter().find(|&&k| k == 0 || k > n) {
            return Err(Error::Invalid(format!("index {} out of range 1..={}", k, n)));
        }
        Ok(QuasiProjectorSpec { n, indices })
    }
}

/// `P_n(i_1, …, i_r)`, modelled as `(Q_{i_1} ⊔ 1) ⊗ ⋯ ⊗ (Q_{i_r} ⊔ 1) ⊗ P_n`
/// with the final `P_n` absorbed when some `i_j = n`.
pub fn quasi_projector(spec: &QuasiProjectorSpec, window: i32) -> Result<Complex> {
    let n = spec.n;
    let mut acc: Option<Complex> = None;
    for &k in &spec.indices {
        let mut f = explicit_q(k)?;
        if k < n {
            f = juxtapose_identity(&f, n - k);
        }
        acc = Some(match acc {
            None => f,
            Some(a) => simplify(&tensor(&a, &f)?),
        });
    }
    if !spec.indices.contains(&n) {
        let p = truncated_pn(n, window)?.complex;
        acc = Some(match acc {
            None => p,
            Some(a) => simplify(&tensor(&a, &p)?),
        });
    }
    Ok(simplify(&acc.unwrap_or_else(|| Complex::identity(n))))
}

/// `Cone(u_k)` on a truncated projector. The source copy is cut down so
/// that `u_k` only hits stored objects, which keeps the cone a subcomplex.
pub fn cone_of_u(p: &TruncatedProjector, k: usize) -> Result<Complex> {
    let u = p.u_maps.get(&k).ok_or_else(|| Error::Invalid(format!("u_{} is not available for n = {}", k, p.n)))?;
    let (a, f) = match p.complex.trunc() {
        Some(t) => {
            let a = truncate_below(&p.complex, t - u.hdeg);
            let f = restrict_to(u, &a);
            (a, f)
        }
        None => (p.complex.clone(), u.clone()),
    };
    Ok(simplify(&cone(&f, &a, &p.complex)?))
}

/// Result of tensoring with a turnback on one side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnbackEntry {
    pub i: usize,
    pub above: bool,
    /// Objects left after simplification in degrees with exact homology.
    pub residual: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnbackReport {
    pub entries: Vec<TurnbackEntry>,
}

impl TurnbackReport {
    pub fn kills_all(&self) -> bool {
        self.entries.iter().all(|e| e.residual == 0)
    }
}

/// Simplify `e_i ⊗ C` and `C ⊗ e_i` for every `i`.
pub fn turnback_check(c: &Complex) -> Result<TurnbackReport> {
    if !c.is_square() {
        return Err(Error::Invalid("turnback check needs a square complex".into()));
    }
    let n = c.bot();
    let mut entries = vec![];
    for i in 1..n {
        let e = Complex::object(GradedObject::new(FlatTangle::e(n, i), 0));
        for above in [true, false] {
            let t = if above { tensor(&e, c)? } else { tensor(c, &e)? };
            let s = simplify(&t);
            let from = s.valid_from().unwrap_or(i32::MIN);
            let residual = s.degrees().filter(|(h, _)| *h >= from).map(|(_, v)| v.len()).sum();
            entries.push(TurnbackEntry { i, above, residual });
        }
    }
    Ok(TurnbackReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_models_are_complexes() {
        for n in 1..=3 {
            explicit_q(n).unwrap().check().unwrap();
        }
    }

    #[test]
    fn q2_from_sequence() {
        let c = build_qn(2, 6).unwrap();
        assert_eq!(c, q2());
    }

    #[test]
    fn p2_has_one_object_per_degree() {
        let p = truncated_pn(2, 9).unwrap();
        p.complex.check().unwrap();
        for h in -9..=0 {
            assert_eq!(p.complex.rank(h), 1, "degree {}", h);
        }
        assert_eq!(p.complex.objects(-5)[0].q, 9);
    }
}
