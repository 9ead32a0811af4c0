//! Chain complexes over the additive closure of the cobordism category.
//!
//! Differentials raise the homological degree. Matrices are sparse maps
//! `(row, col) → morphism` where `col` indexes the source objects and `row`
//! the target objects.

mod convolution;
mod deloop;
mod gauss;
mod hom;
mod ops;

pub use convolution::{convolution_complete, Convolution, ConvolutionData};
pub use deloop::deloop;
pub use gauss::{gauss, simplify, simplify_with, simplify_with_sdr, Tracking};
pub use hom::{hom_complex, Column, HomBasis, HomGen, HomWindow, ZComplex};
pub use ops::{
    cone, direct_sum, dual, juxtapose, juxtapose_identity, partial_trace, shift, tensor, truncate_below,
    tensor_many,
};

use crate::cobordism::{basis_degree, compose_unchecked, CobMorphism, FlatTangle, GradedObject};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, HashMap};

pub type Mat = BTreeMap<(usize, usize), CobMorphism>;

/// `a ∘ b` for sparse matrices of morphisms.
pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut by_row: HashMap<usize, Vec<(usize, &CobMorphism)>> = HashMap::new();
    for ((k, c), m) in b {
        by_row.entry(*k).or_default().push((*c, m));
    }
    let mut out: Mat = BTreeMap::new();
    for ((r, k), ma) in a {
        if let Some(list) = by_row.get(k) {
            for (c, mb) in list {
                let p = compose_unchecked(ma, mb);
                mat_add_entry(&mut out, *r, *c, p);
            }
        }
    }
    out
}

pub fn mat_add_entry(m: &mut Mat, r: usize, c: usize, f: CobMorphism) {
    if f.is_zero() {
        return;
    }
    match m.get_mut(&(r, c)) {
        Some(cur) => {
            cur.add_assign(&f);
            if cur.is_zero() {
                m.remove(&(r, c));
            }
        }
        None => {
            m.insert((r, c), f);
        }
    }
}

pub fn mat_add(a: &Mat, b: &Mat) -> Mat {
    let mut out = a.clone();
    for ((r, c), f) in b {
        mat_add_entry(&mut out, *r, *c, f.clone());
    }
    out
}

pub fn mat_scale(a: &Mat, k: i64) -> Mat {
    a.iter().map(|(rc, f)| (*rc, f.scale_i64(k))).filter(|(_, f)| !f.is_zero()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    bot: usize,
    top: usize,
    objs: BTreeMap<i32, Vec<GradedObject>>,
    diffs: BTreeMap<i32, Mat>,
    /// Lowest degree from which this complex is an exact brutal truncation
    /// of the intended (possibly unbounded) complex.
    trunc: Option<i32>,
}

impl Complex {
    pub fn new(bot: usize, top: usize) -> Self {
        Complex { bot, top, objs: BTreeMap::new(), diffs: BTreeMap::new(), trunc: None }
    }

    pub fn square(n: usize) -> Self {
        Self::new(n, n)
    }

    /// A single object in degree 0.
    pub fn object(o: GradedObject) -> Self {
        let (b, t) = (o.tangle.matching.bot(), o.tangle.matching.top());
        let mut c = Self::new(b, t);
        c.push(0, o);
        c
    }

    /// The identity complex `1_n`.
    pub fn identity(n: usize) -> Self {
        Self::object(GradedObject::new(FlatTangle::identity(n), 0))
    }

    pub fn bot(&self) -> usize {
        self.bot
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn is_square(&self) -> bool {
        self.bot == self.top
    }

    pub fn n(&self) -> usize {
        (self.bot + self.top) / 2
    }

    pub fn trunc(&self) -> Option<i32> {
        self.trunc
    }

    pub fn set_trunc(&mut self, t: Option<i32>) {
        self.trunc = t;
    }

    pub fn is_bounded(&self) -> bool {
        self.trunc.is_none()
    }

    /// Lowest degree at which homology is unaffected by truncation.
    pub fn valid_from(&self) -> Option<i32> {
        self.trunc.map(|t| t + 1)
    }

    pub fn push(&mut self, h: i32, o: GradedObject) -> usize {
        assert!(
            o.tangle.matching.bot() == self.bot && o.tangle.matching.top() == self.top,
            "object boundary does not match complex"
        );
        let v = self.objs.entry(h).or_default();
        v.push(o);
        v.len() - 1
    }

    /// Differential entry from object `col` in degree `h` to object `row` in degree `h+1`.
    pub fn set_entry(&mut self, h: i32, row: usize, col: usize, f: CobMorphism) {
        debug_assert_eq!(f.src, self.objs[&h][col].tangle);
        debug_assert_eq!(f.tgt, self.objs[&(h + 1)][row].tangle);
        let m = self.diffs.entry(h).or_default();
        m.remove(&(row, col));
        if !f.is_zero() {
            m.insert((row, col), f);
        }
    }

    pub fn add_entry(&mut self, h: i32, row: usize, col: usize, f: CobMorphism) {
        mat_add_entry(self.diffs.entry(h).or_default(), row, col, f);
    }

    pub fn objects(&self, h: i32) -> &[GradedObject] {
        self.objs.get(&h).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn rank(&self, h: i32) -> usize {
        self.objects(h).len()
    }

    pub fn degrees(&self) -> impl Iterator<Item = (i32, &Vec<GradedObject>)> {
        self.objs.iter().filter(|(_, v)| !v.is_empty()).map(|(h, v)| (*h, v))
    }

    pub fn d(&self, h: i32) -> &Mat {
        static EMPTY: Mat = BTreeMap::new();
        self.diffs.get(&h).unwrap_or(&EMPTY)
    }

    pub fn diffs(&self) -> impl Iterator<Item = (i32, &Mat)> {
        self.diffs.iter().map(|(h, m)| (*h, m))
    }

    pub fn hmin(&self) -> Option<i32> {
        self.degrees().next().map(|(h, _)| h)
    }

    pub fn hmax(&self) -> Option<i32> {
        self.degrees().last().map(|(h, _)| h)
    }

    pub fn total_objects(&self) -> usize {
        self.objs.values().map(|v| v.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_objects() == 0
    }

    /// Drop empty degrees and empty matrices.
    pub fn tidy(&mut self) {
        self.objs.retain(|_, v| !v.is_empty());
        self.diffs.retain(|_, m| !m.is_empty());
    }

    /// Graded ranks: degree → sorted list of (q-shift, matching) with multiplicity.
    pub fn graded_ranks(&self) -> BTreeMap<i32, BTreeMap<GradedObject, usize>> {
        let mut out = BTreeMap::new();
        for (h, v) in self.degrees() {
            let e: &mut BTreeMap<GradedObject, usize> = out.entry(h).or_default();
            for o in v {
                *e.entry(o.clone()).or_default() += 1;
            }
        }
        out
    }

    /// Graded ranks restricted to degrees `>= from`.
    pub fn graded_ranks_from(&self, from: i32) -> BTreeMap<i32, BTreeMap<GradedObject, usize>> {
        self.graded_ranks().into_iter().filter(|(h, _)| *h >= from).collect()
    }

    /// Check boundaries, q-degrees and `d∘d = 0`.
    pub fn check(&self) -> Result<()> {
        for (h, m) in &self.diffs {
            let src = self.objects(*h);
            let tgt = self.objects(h + 1);
            for ((r, c), f) in m {
                let (a, b) = match (src.get(*c), tgt.get(*r)) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(Error::Invalid(format!("entry ({},{}) out of range in degree {}", r, c, h))),
                };
                if f.src != a.tangle || f.tgt != b.tangle {
                    return Err(Error::Invalid(format!("entry ({},{}) in degree {} has wrong ends", r, c, h)));
                }
                for &mask in f.terms().keys() {
                    let deg = basis_degree(&f.src, &f.tgt, mask) + b.q - a.q;
                    if deg != 0 {
                        return Err(Error::Degree(format!(
                            "entry ({},{}) in degree {} has q-degree {}",
                            r, c, h, deg
                        )));
                    }
                }
            }
        }
        for (h, m) in &self.diffs {
            if let Some(next) = self.diffs.get(&(h + 1)) {
                let dd = mat_mul(next, m);
                if let Some(((r, c), _)) = dd.iter().next() {
                    return Err(Error::NotAComplex(format!("degree {} entry ({},{})", h, r, c)));
                }
            }
        }
        Ok(())
    }
}

/// A bihomogeneous map between complexes, stored per source degree.
/// Component `k` maps source degree `k` to target degree `k + hdeg`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChainMap {
    pub hdeg: i32,
    pub qdeg: i32,
    pub comps: BTreeMap<i32, Mat>,
}

impl ChainMap {
    pub fn new(hdeg: i32, qdeg: i32) -> Self {
        ChainMap { hdeg, qdeg, comps: BTreeMap::new() }
    }

    pub fn identity(c: &Complex) -> Self {
        let mut m = Self::new(0, 0);
        for (h, v) in c.degrees() {
            let e = m.comps.entry(h).or_default();
            for (i, o) in v.iter().enumerate() {
                e.insert((i, i), CobMorphism::identity(&o.tangle));
            }
        }
        m
    }

    pub fn comp(&self, k: i32) -> Option<&Mat> {
        self.comps.get(&k)
    }

    pub fn add_entry(&mut self, k: i32, r: usize, c: usize, f: CobMorphism) {
        mat_add_entry(self.comps.entry(k).or_default(), r, c, f);
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|m| m.is_empty())
    }

    pub fn tidy(&mut self) {
        self.comps.retain(|_, m| !m.is_empty());
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ChainMap) -> ChainMap {
        let mut out = ChainMap::new(self.hdeg + other.hdeg, self.qdeg + other.qdeg);
        for (k, m) in &other.comps {
            if let Some(n) = self.comps.get(&(k + other.hdeg)) {
                let p = mat_mul(n, m);
                if !p.is_empty() {
                    out.comps.insert(*k, p);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &ChainMap) -> ChainMap {
        let mut out = self.clone();
        for (k, m) in &other.comps {
            let e = out.comps.entry(*k).or_default();
            *e = mat_add(e, m);
        }
        out.tidy();
        out
    }

    pub fn scale(&self, k: i64) -> ChainMap {
        let mut out = ChainMap::new(self.hdeg, self.qdeg);
        for (d, m) in &self.comps {
            out.comps.insert(*d, mat_scale(m, k));
        }
        out.tidy();
        out
    }

    /// The HOM differential `d_B f − (−1)^{|f|} f d_A`.
    pub fn boundary(&self, a: &Complex, b: &Complex) -> ChainMap {
        let da = differential_map(a);
        let db = differential_map(b);
        let left = db.compose(self);
        let right = self.compose(&da);
        let sign = if self.hdeg.rem_euclid(2) == 0 { -1 } else { 1 };
        let mut out = left.add(&right.scale(sign));
        out.hdeg = self.hdeg + 1;
        out
    }

    pub fn is_cycle(&self, a: &Complex, b: &Complex) -> bool {
        self.boundary(a, b).is_zero()
    }

    /// Check that entries connect the right objects with the right q-degree.
    pub fn check_degrees(&self, a: &Complex, b: &Complex) -> Result<()> {
        for (k, m) in &self.comps {
            for ((r, c), f) in m {
                let (Some(x), Some(y)) = (a.objects(*k).get(*c), b.objects(k + self.hdeg).get(*r)) else {
                    return Err(Error::Invalid(format!("map entry ({},{}) out of range at {}", r, c, k)));
                };
                if f.src != x.tangle || f.tgt != y.tangle {
                    return Err(Error::Invalid(format!("map entry ({},{}) has wrong ends at {}", r, c, k)));
                }
                for &mask in f.terms().keys() {
                    let deg = basis_degree(&f.src, &f.tgt, mask) + y.q - x.q;
                    if deg != self.qdeg {
                        return Err(Error::Degree(format!("map entry has q-degree {} not {}", deg, self.qdeg)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The differential of a complex as a degree (1,0) map.
pub fn differential_map(c: &Complex) -> ChainMap {
    let mut m = ChainMap::new(1, 0);
    for (h, d) in c.diffs() {
        if !d.is_empty() {
            m.comps.insert(h, d.clone());
        }
    }
    m
}

/// Deformation retract data from a complex `C` onto `C'`.
#[derive(Clone, Debug)]
pub struct SDRData {
    pub pi: ChainMap,
    pub sigma: ChainMap,
    pub h: ChainMap,
}

impl SDRData {
    pub fn identity(c: &Complex) -> Self {
        SDRData { pi: ChainMap::identity(c), sigma: ChainMap::identity(c), h: ChainMap::new(-1, 0) }
    }

    /// Compose `self: C → C'` with `next: C' → C''`.
    pub fn then(&self, next: &SDRData) -> SDRData {
        SDRData {
            pi: next.pi.compose(&self.pi),
            sigma: self.sigma.compose(&next.sigma),
            h: self.h.add(&self.sigma.compose(&next.h).compose(&self.pi)),
        }
    }

    /// Verify the five retract identities exactly. Returns the first failure.
    pub fn verify(&self, big: &Complex, small: &Complex) -> std::result::Result<(), String> {
        let id_small = ChainMap::identity(small);
        let id_big = ChainMap::identity(big);
        if !self.pi.is_cycle(big, small) {
            return Err("pi is not a chain map".into());
        }
        if !self.sigma.is_cycle(small, big) {
            return Err("sigma is not a chain map".into());
        }
        if self.pi.compose(&self.sigma) != id_small {
            return Err("pi∘sigma != Id".into());
        }
        let d = differential_map(big);
        let lhs = id_big.add(&self.sigma.compose(&self.pi).scale(-1));
        let mut rhs = d.compose(&self.h).add(&self.h.compose(&d));
        rhs.hdeg = 0;
        let mut l = lhs;
        l.tidy();
        if l != rhs {
            return Err("Id - sigma∘pi != dh + hd".into());
        }
        if !self.pi.compose(&self.h).is_zero() {
            return Err("pi∘h != 0".into());
        }
        if !self.h.compose(&self.sigma).is_zero() {
            return Err("h∘sigma != 0".into());
        }
        if !self.h.compose(&self.h).is_zero() {
            return Err("h∘h != 0".into());
        }
        Ok(())
    }
}
