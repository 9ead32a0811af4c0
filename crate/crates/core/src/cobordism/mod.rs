//! Bar-Natan's dotted cobordism category in dotted-disk normal form.
//!
//! A morphism `X → Y` between flat tangles is an integer combination of
//! basis cobordisms: one disk per closed curve of `X ∪ mirror(Y)`, each
//! carrying zero or one dot. Curves are ordered by smallest boundary point,
//! then circles of `X`, then circles of `Y`; a basis element is the bitmask
//! of its dotted curves.

mod plan;

pub(crate) use plan::reduce_component;
use plan::{
    cached, compose_plan, juxt_plan, juxt_tangles, relabel_ends, relabel_plan, stack_plan, stack_tangles,
    trace_plan, trace_tangle, PlanKey, RELABEL_FLIP, RELABEL_REFLECT, RELABEL_ROTATE,
};

use crate::error::{Error, Result};
use crate::temperley_lieb::{glue_curves, Matching};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

/// A crossingless matching plus a number of closed loops.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlatTangle {
    pub matching: Matching,
    pub circles: u8,
}

impl FlatTangle {
    pub fn new(matching: Matching) -> Self {
        FlatTangle { matching, circles: 0 }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Matching::identity(n))
    }

    pub fn e(n: usize, i: usize) -> Self {
        Self::new(Matching::e(n, i))
    }

    pub fn empty() -> Self {
        Self::new(Matching::empty())
    }

    pub fn half(&self) -> usize {
        self.matching.half()
    }

    pub fn same_boundary(&self, other: &FlatTangle) -> bool {
        self.matching.same_boundary(&other.matching)
    }

    pub fn without_circles(&self) -> FlatTangle {
        FlatTangle::new(self.matching.clone())
    }

    /// `self` stacked on top of `lower`.
    pub fn stack_on(&self, lower: &FlatTangle) -> FlatTangle {
        stack_tangles(self, lower).0
    }

    pub fn juxtapose(&self, other: &FlatTangle) -> FlatTangle {
        juxt_tangles(self, other)
    }

    pub fn partial_trace(&self) -> FlatTangle {
        trace_tangle(self).0
    }

    pub fn mirror(&self) -> FlatTangle {
        FlatTangle { matching: self.matching.mirror(), circles: self.circles }
    }
}

impl fmt::Debug for FlatTangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.matching)?;
        if self.circles > 0 {
            write!(f, "+{}o", self.circles)?;
        }
        Ok(())
    }
}

/// The object `q^q T`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GradedObject {
    pub tangle: FlatTangle,
    pub q: i32,
}

impl GradedObject {
    pub fn new(tangle: FlatTangle, q: i32) -> Self {
        GradedObject { tangle, q }
    }
}

impl fmt::Debug for GradedObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q^{} {:?}", self.q, self.tangle)
    }
}

/// Curve structure of `X ∪ mirror(Y)`.
#[derive(Debug)]
pub struct CurveData {
    pub arcs: Vec<Vec<u8>>,
    pub of_point: Vec<u8>,
    pub src_circles: u8,
    pub tgt_circles: u8,
}

impl CurveData {
    pub fn count(&self) -> usize {
        self.arcs.len() + self.src_circles as usize + self.tgt_circles as usize
    }

    pub fn src_circle(&self, i: usize) -> usize {
        self.arcs.len() + i
    }

    pub fn tgt_circle(&self, i: usize) -> usize {
        self.arcs.len() + self.src_circles as usize + i
    }
}

thread_local! {
    static CURVES: RefCell<HashMap<(FlatTangle, FlatTangle), Rc<CurveData>>> = RefCell::new(HashMap::new());
}

pub fn curve_data(x: &FlatTangle, y: &FlatTangle) -> Rc<CurveData> {
    let key = (x.clone(), y.clone());
    if let Some(c) = CURVES.with(|m| m.borrow().get(&key).cloned()) {
        return c;
    }
    let arcs = glue_curves(&x.matching, &y.matching);
    let mut of_point = vec![0u8; x.matching.points()];
    for (i, c) in arcs.iter().enumerate() {
        for &p in c {
            of_point[p as usize] = i as u8;
        }
    }
    let cd = Rc::new(CurveData { arcs, of_point, src_circles: x.circles, tgt_circles: y.circles });
    CURVES.with(|m| m.borrow_mut().insert(key, cd.clone()));
    cd
}

/// Raw q-degree of the basis cobordism `mask` in `Hom(x, y)`, ignoring shifts.
pub fn basis_degree(x: &FlatTangle, y: &FlatTangle, mask: u64) -> i32 {
    x.half() as i32 - curve_data(x, y).count() as i32 + 2 * mask.count_ones() as i32
}

/// Integer combination of dotted-disk cobordisms `src → tgt`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CobMorphism {
    pub src: FlatTangle,
    pub tgt: FlatTangle,
    terms: BTreeMap<u64, BigInt>,
}

impl fmt::Debug for CobMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?}: ", self.src, self.tgt)?;
        let v: Vec<String> = self.terms.iter().map(|(m, c)| format!("{}*{:b}", c, m)).collect();
        write!(f, "{}", if v.is_empty() { "0".to_string() } else { v.join(" + ") })
    }
}

impl CobMorphism {
    pub fn zero(src: FlatTangle, tgt: FlatTangle) -> Self {
        assert!(src.same_boundary(&tgt), "morphism between different boundaries");
        CobMorphism { src, tgt, terms: BTreeMap::new() }
    }

    pub fn from_terms(src: FlatTangle, tgt: FlatTangle, terms: impl IntoIterator<Item = (u64, BigInt)>) -> Self {
        let mut m = Self::zero(src, tgt);
        let n = m.curve_count();
        for (mask, c) in terms {
            assert!(n == 64 || mask >> n == 0, "dot on a nonexistent curve");
            plan::add_into(&mut m.terms, mask, c);
        }
        m
    }

    /// A single basis cobordism.
    pub fn basis(src: FlatTangle, tgt: FlatTangle, mask: u64) -> Self {
        Self::from_terms(src, tgt, [(mask, BigInt::one())])
    }

    /// The undotted connected-per-curve cobordism (a saddle when the
    /// tangles differ by one saddle move).
    pub fn saddle(src: FlatTangle, tgt: FlatTangle) -> Self {
        Self::basis(src, tgt, 0)
    }

    pub fn identity(t: &FlatTangle) -> Self {
        let cd = curve_data(t, t);
        let mut terms = vec![(0u64, BigInt::one())];
        for i in 0..t.circles as usize {
            let (a, b) = (cd.src_circle(i), cd.tgt_circle(i));
            terms = terms
                .into_iter()
                .flat_map(|(m, c)| [(m | 1 << a, c.clone()), (m | 1 << b, c)])
                .collect();
        }
        Self::from_terms(t.clone(), t.clone(), terms)
    }

    /// Identity with a dot on the curve through boundary point `p`.
    pub fn dotted_identity(t: &FlatTangle, p: usize) -> Self {
        assert_eq!(t.circles, 0);
        let cd = curve_data(t, t);
        Self::basis(t.clone(), t.clone(), 1 << cd.of_point[p])
    }

    pub fn terms(&self) -> &BTreeMap<u64, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn curve_count(&self) -> usize {
        curve_data(&self.src, &self.tgt).count()
    }

    /// Raw degree (without object shifts); `None` for the zero morphism.
    pub fn degree(&self) -> Option<i32> {
        let m = *self.terms.keys().next()?;
        Some(basis_degree(&self.src, &self.tgt, m))
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.keys().all(|&m| Some(basis_degree(&self.src, &self.tgt, m)) == d)
    }

    /// `Some(c)` when this is `c` times the identity of a circle-free tangle.
    pub fn identity_scalar(&self) -> Option<&BigInt> {
        if self.src != self.tgt || self.src.circles != 0 || self.terms.len() != 1 {
            return None;
        }
        self.terms.get(&0)
    }

    pub fn is_unit_identity(&self) -> bool {
        self.identity_scalar().map_or(false, |c| c.abs().is_one())
    }

    pub fn add(&self, other: &CobMorphism) -> CobMorphism {
        assert!(self.src == other.src && self.tgt == other.tgt, "adding morphisms with different ends");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            plan::add_into(&mut out.terms, *m, c.clone());
        }
        out
    }

    pub fn add_assign(&mut self, other: &CobMorphism) {
        debug_assert!(self.src == other.src && self.tgt == other.tgt);
        for (m, c) in &other.terms {
            plan::add_into(&mut self.terms, *m, c.clone());
        }
    }

    pub fn neg(&self) -> CobMorphism {
        CobMorphism {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> CobMorphism {
        if k.is_zero() {
            return Self::zero(self.src.clone(), self.tgt.clone());
        }
        CobMorphism {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    pub fn scale_i64(&self, k: i64) -> CobMorphism {
        self.scale(&BigInt::from(k))
    }

    /// Dots of a basis element as curve indices.
    pub fn dots_of(mask: u64) -> Vec<usize> {
        (0..64).filter(|i| mask >> i & 1 == 1).collect()
    }
}

/// `g ∘ f`.
pub fn compose(g: &CobMorphism, f: &CobMorphism) -> Result<CobMorphism> {
    if f.tgt != g.src {
        return Err(Error::BoundaryMismatch(format!("{:?} vs {:?}", f.tgt, g.src)));
    }
    Ok(compose_unchecked(g, f))
}

pub(crate) fn compose_unchecked(g: &CobMorphism, f: &CobMorphism) -> CobMorphism {
    debug_assert!(f.tgt == g.src);
    if f.is_zero() || g.is_zero() {
        return CobMorphism::zero(f.src.clone(), g.tgt.clone());
    }
    let p = cached(PlanKey::Compose(f.src.clone(), f.tgt.clone(), g.tgt.clone()), || {
        compose_plan(&f.src, &f.tgt, &g.tgt)
    });
    let nf = curve_data(&f.src, &f.tgt).count() as u32;
    CobMorphism { src: f.src.clone(), tgt: g.tgt.clone(), terms: p.apply2(&f.terms, nf, &g.terms) }
}

/// `upper` stacked on top of `lower`: a morphism between the stacked tangles.
pub fn stack(upper: &CobMorphism, lower: &CobMorphism) -> Result<CobMorphism> {
    if upper.src.matching.bot() != lower.src.matching.top() {
        return Err(Error::BoundaryMismatch("stacking needs matching boundary counts".into()));
    }
    let src = stack_tangles(&upper.src, &lower.src).0;
    let tgt = stack_tangles(&upper.tgt, &lower.tgt).0;
    let p = cached(
        PlanKey::Stack(upper.src.clone(), upper.tgt.clone(), lower.src.clone(), lower.tgt.clone()),
        || stack_plan(&upper.src, &upper.tgt, &lower.src, &lower.tgt),
    );
    let nf = curve_data(&upper.src, &upper.tgt).count() as u32;
    Ok(CobMorphism { src, tgt, terms: p.apply2(&upper.terms, nf, &lower.terms) })
}

/// Horizontal juxtaposition `f ⊔ g`.
pub fn juxtapose(f: &CobMorphism, g: &CobMorphism) -> CobMorphism {
    let src = juxt_tangles(&f.src, &g.src);
    let tgt = juxt_tangles(&f.tgt, &g.tgt);
    let p = cached(PlanKey::Juxt(f.src.clone(), f.tgt.clone(), g.src.clone(), g.tgt.clone()), || {
        juxt_plan(&f.src, &f.tgt, &g.src, &g.tgt)
    });
    let nf = curve_data(&f.src, &f.tgt).count() as u32;
    CobMorphism { src, tgt, terms: p.apply2(&f.terms, nf, &g.terms) }
}

/// Close the rightmost strand.
pub fn partial_trace(f: &CobMorphism) -> Result<CobMorphism> {
    let m = &f.src.matching;
    if m.bot() == 0 || m.top() == 0 {
        return Err(Error::Invalid("partial trace of a morphism without strands".into()));
    }
    let src = trace_tangle(&f.src).0;
    let tgt = trace_tangle(&f.tgt).0;
    let p = cached(PlanKey::Trace(f.src.clone(), f.tgt.clone()), || trace_plan(&f.src, &f.tgt));
    Ok(CobMorphism { src, tgt, terms: p.apply1(&f.terms) })
}

fn relabel(kind: u8, f: &CobMorphism) -> CobMorphism {
    let (src, tgt) = relabel_ends(kind, &f.src, &f.tgt);
    let p = cached(PlanKey::Relabel(kind, f.src.clone(), f.tgt.clone()), || relabel_plan(kind, &f.src, &f.tgt));
    CobMorphism { src, tgt, terms: p.apply1(&f.terms) }
}

/// Turn the cobordism upside down: `X → Y` becomes `Y → X`.
pub fn flip(f: &CobMorphism) -> CobMorphism {
    relabel(RELABEL_FLIP, f)
}

/// Mirror top and bottom of the tangles and swap source with target.
pub fn reflect(f: &CobMorphism) -> CobMorphism {
    relabel(RELABEL_REFLECT, f)
}

/// Rotate the planar picture by a half turn.
pub fn rotate(f: &CobMorphism) -> CobMorphism {
    relabel(RELABEL_ROTATE, f)
}

/// Surface component description accepted by [`reduce`].
#[derive(Clone, Debug)]
pub struct RawComponent {
    pub curves: Vec<usize>,
    pub genus: u32,
    pub dots: u32,
}

/// Normal form of a disjoint union of surface components via the local
/// relations. Returns (dot mask, coefficient) pairs.
pub fn reduce(components: &[RawComponent]) -> BTreeMap<u64, BigInt> {
    let mut acc: Vec<(u64, i64)> = vec![(0, 1)];
    for c in components {
        let outs: Vec<u8> = c.curves.iter().map(|&x| x as u8).collect();
        let local = reduce_component(c.dots, c.genus, &outs);
        let mut next = vec![];
        for &(m, f) in &acc {
            for &(lm, lf) in &local {
                next.push((m | lm, f * lf));
            }
        }
        acc = next;
    }
    let mut out = BTreeMap::new();
    for (m, c) in acc {
        plan::add_into(&mut out, m, BigInt::from(c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id2() -> FlatTangle {
        FlatTangle::identity(2)
    }
    fn e2() -> FlatTangle {
        FlatTangle::e(2, 1)
    }

    #[test]
    fn saddle_then_saddle_is_neck() {
        let h = CobMorphism::saddle(id2(), e2());
        let i = CobMorphism::saddle(e2(), id2());
        let c = compose(&i, &h).unwrap();
        let want: Vec<u64> = vec![0b01, 0b10];
        assert_eq!(c.terms().keys().copied().collect::<Vec<_>>(), want);
        let c2 = compose(&h, &i).unwrap();
        assert_eq!(c2.terms().len(), 2);
        assert_eq!(c2.degree(), Some(2));
    }

    #[test]
    fn dots_annihilate() {
        let t = FlatTangle::identity(1);
        let d = CobMorphism::dotted_identity(&t, 0);
        assert!(compose(&d, &d).unwrap().is_zero());
        assert_eq!(d.degree(), Some(2));
    }

    #[test]
    fn trace_of_identity_is_cylinder() {
        let t = FlatTangle::identity(1);
        let c = partial_trace(&CobMorphism::identity(&t)).unwrap();
        assert_eq!(c.src.circles, 1);
        assert_eq!(c, CobMorphism::identity(&c.src));
    }

    #[test]
    fn flip_of_saddle() {
        let h = CobMorphism::saddle(id2(), e2());
        assert_eq!(flip(&h), CobMorphism::saddle(e2(), id2()));
        assert_eq!(reflect(&h), CobMorphism::saddle(e2(), id2()));
        let d = CobMorphism::dotted_identity(&e2(), 0);
        assert_eq!(rotate(&rotate(&d)), d);
    }

    #[test]
    fn stacking_identities() {
        let a = CobMorphism::identity(&e2());
        let s = stack(&a, &a).unwrap();
        assert_eq!(s.src.circles, 1);
        assert_eq!(s, CobMorphism::identity(&s.src));
        let j = juxtapose(&CobMorphism::identity(&FlatTangle::identity(1)), &CobMorphism::identity(&FlatTangle::identity(1)));
        assert_eq!(j, CobMorphism::identity(&id2()));
    }
}
