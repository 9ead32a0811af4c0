//! HOM complexes as bigraded free abelian complexes.

use super::{ChainMap, Complex};
use crate::cobordism::{compose_unchecked, curve_data, CobMorphism};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};

/// Sparse column: `(row, coefficient)` pairs sorted by row.
pub type Column = Vec<(usize, BigInt)>;

/// A bigraded complex of free abelian groups; `d` raises `h` by one and keeps `q`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZComplex {
    ranks: BTreeMap<(i32, i32), usize>,
    d: BTreeMap<(i32, i32), Vec<Column>>,
}

impl ZComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_rank(&mut self, h: i32, q: i32, r: usize) {
        if r == 0 {
            self.ranks.remove(&(h, q));
        } else {
            self.ranks.insert((h, q), r);
        }
    }

    pub fn rank(&self, h: i32, q: i32) -> usize {
        self.ranks.get(&(h, q)).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &BTreeMap<(i32, i32), usize> {
        &self.ranks
    }

    /// Add `c` to the coefficient of `row` in the image of generator `col` at `(h, q)`.
    pub fn add_entry(&mut self, h: i32, q: i32, row: usize, col: usize, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let n = self.rank(h, q);
        let cols = self.d.entry((h, q)).or_insert_with(|| vec![vec![]; n]);
        if cols.len() < n {
            cols.resize(n, vec![]);
        }
        let column = &mut cols[col];
        match column.binary_search_by_key(&row, |(r, _)| *r) {
            Ok(i) => {
                column[i].1 += c;
                if column[i].1.is_zero() {
                    column.remove(i);
                }
            }
            Err(i) => column.insert(i, (row, c)),
        }
    }

    /// Columns of the differential leaving `(h, q)`.
    pub fn columns(&self, h: i32, q: i32) -> Vec<Column> {
        let n = self.rank(h, q);
        let mut v = self.d.get(&(h, q)).cloned().unwrap_or_default();
        v.resize(n, vec![]);
        v
    }

    /// Dense matrix of `d: (h,q) → (h+1,q)`, rows indexed by the target.
    pub fn dense(&self, h: i32, q: i32) -> Vec<Vec<BigInt>> {
        let rows = self.rank(h + 1, q);
        let cols = self.rank(h, q);
        let mut m = vec![vec![BigInt::zero(); cols]; rows];
        for (c, col) in self.columns(h, q).into_iter().enumerate() {
            for (r, x) in col {
                m[r][c] = x;
            }
        }
        m
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    /// Apply `d` to a vector at `(h, q)`.
    pub fn apply(&self, h: i32, q: i32, v: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.rank(h + 1, q)];
        if let Some(cols) = self.d.get(&(h, q)) {
            for (c, x) in v.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                if let Some(col) = cols.get(c) {
                    for (r, y) in col {
                        out[*r] += x * y;
                    }
                }
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        for (&(h, q), &n) in &self.ranks {
            for c in 0..n {
                let mut e = vec![BigInt::zero(); n];
                e[c] = BigInt::from(1);
                let dd = self.apply(h + 1, q, &self.apply(h, q, &e));
                if dd.iter().any(|x| !x.is_zero()) {
                    return Err(Error::NotAComplex(format!("integer complex at ({}, {})", h, q)));
                }
            }
        }
        Ok(())
    }

    /// The tautological functor on a closed complex: one generator per object.
    pub fn from_closed(c: &Complex) -> Result<ZComplex> {
        if c.bot() != 0 || c.top() != 0 {
            return Err(Error::Invalid("tautological functor needs a closed complex".into()));
        }
        let mut z = ZComplex::new();
        let mut pos: BTreeMap<(i32, usize), usize> = BTreeMap::new();
        for (h, v) in c.degrees() {
            for (i, o) in v.iter().enumerate() {
                let r = z.rank(h, o.q);
                pos.insert((h, i), r);
                z.set_rank(h, o.q, r + 1);
            }
        }
        for (h, m) in c.diffs() {
            for ((r, col), f) in m {
                let q = c.objects(h)[*col].q;
                if let Some(x) = f.terms().get(&0) {
                    z.add_entry(h, q, pos[&(h + 1, *r)], pos[&(h, *col)], x.clone());
                }
            }
        }
        Ok(z)
    }
}

/// A generator of `HOM(A, B)`: basis cobordism `mask` from object `x` of
/// `A` in degree `k` to object `y` of `B` in degree `k + h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomGen {
    pub k: i32,
    pub x: usize,
    pub y: usize,
    pub mask: u64,
}

/// Generators of a HOM complex per bidegree.
#[derive(Clone, Debug, Default)]
pub struct HomBasis {
    pub gens: BTreeMap<(i32, i32), Vec<HomGen>>,
    index: HashMap<(i32, HomGen), usize>,
}

impl HomBasis {
    pub fn position(&self, h: i32, g: &HomGen) -> Option<usize> {
        self.index.get(&(h, *g)).copied()
    }

    /// Coordinates of a map of bidegree `(h, q)` in this basis.
    pub fn vector_of(&self, f: &ChainMap) -> Option<Vec<BigInt>> {
        let n = self.gens.get(&(f.hdeg, f.qdeg)).map_or(0, |v| v.len());
        let mut v = vec![BigInt::zero(); n];
        for (k, m) in &f.comps {
            for ((r, c), g) in m {
                for (mask, x) in g.terms() {
                    let gen = HomGen { k: *k, x: *c, y: *r, mask: *mask };
                    let i = self.position(f.hdeg, &gen)?;
                    v[i] += x;
                }
            }
        }
        Some(v)
    }

    /// The map with coordinates `v` at bidegree `(h, q)`.
    pub fn map_of(&self, a: &Complex, b: &Complex, h: i32, q: i32, v: &[BigInt]) -> ChainMap {
        let mut out = ChainMap::new(h, q);
        if let Some(gens) = self.gens.get(&(h, q)) {
            for (g, x) in gens.iter().zip(v) {
                if x.is_zero() {
                    continue;
                }
                let f = CobMorphism::basis(
                    a.objects(g.k)[g.x].tangle.clone(),
                    b.objects(g.k + h)[g.y].tangle.clone(),
                    g.mask,
                )
                .scale(x);
                out.add_entry(g.k, g.y, g.x, f);
            }
        }
        out
    }
}

/// Inclusive ranges of homological and quantum degrees.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HomWindow {
    pub h: Option<(i32, i32)>,
    pub q: Option<(i32, i32)>,
}

impl HomWindow {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn degrees(lo: i32, hi: i32) -> Self {
        HomWindow { h: Some((lo, hi)), q: None }
    }
}

/// `HOM(A, B)` with differential `f ↦ d_B f − (−1)^{|f|} f d_A`. Generators
/// are produced one degree beyond the window on each side so that homology
/// inside the window is exact.
pub fn hom_complex(a: &Complex, b: &Complex, w: HomWindow) -> Result<(ZComplex, HomBasis)> {
    if a.bot() != b.bot() || a.top() != b.top() {
        return Err(Error::BoundaryMismatch("HOM between different boundaries".into()));
    }
    let in_h = |i: i32| w.h.map_or(true, |(lo, hi)| i >= lo - 1 && i <= hi + 1);
    let in_q = |j: i32| w.q.map_or(true, |(lo, hi)| j >= lo && j <= hi);
    let mut basis = HomBasis::default();
    for (k, va) in a.degrees() {
        for (hb, vb) in b.degrees() {
            let i = hb - k;
            if !in_h(i) {
                continue;
            }
            for (x, ox) in va.iter().enumerate() {
                for (y, oy) in vb.iter().enumerate() {
                    let n = curve_data(&ox.tangle, &oy.tangle).count();
                    let half = ox.tangle.half() as i32;
                    for mask in 0..(1u64 << n) {
                        let j = half - n as i32 + 2 * mask.count_ones() as i32 + oy.q - ox.q;
                        if in_q(j) {
                            let v = basis.gens.entry((i, j)).or_default();
                            let g = HomGen { k, x, y, mask };
                            basis.index.insert((i, g), v.len());
                            v.push(g);
                        }
                    }
                }
            }
        }
    }
    let mut z = ZComplex::new();
    for (&(i, j), v) in &basis.gens {
        z.set_rank(i, j, v.len());
    }
    // incoming entries of A per target object
    let mut a_in: HashMap<(i32, usize), Vec<(usize, &CobMorphism)>> = HashMap::new();
    for (k, m) in a.diffs() {
        for ((r, c), f) in m {
            a_in.entry((k + 1, *r)).or_default().push((*c, f));
        }
    }
    for (&(i, j), gens) in &basis.gens {
        if let Some((_, hi)) = w.h {
            if i > hi {
                continue;
            }
        }
        let sign = if i.rem_euclid(2) == 0 { -1 } else { 1 };
        for (col, g) in gens.iter().enumerate() {
            let ox = &a.objects(g.k)[g.x];
            let oy = &b.objects(g.k + i)[g.y];
            let f = CobMorphism::basis(ox.tangle.clone(), oy.tangle.clone(), g.mask);
            for ((r, c), e) in b.d(g.k + i) {
                if *c != g.y {
                    continue;
                }
                let p = compose_unchecked(e, &f);
                for (mask, x) in p.terms() {
                    let t = HomGen { k: g.k, x: g.x, y: *r, mask: *mask };
                    if let Some(row) = basis.position(i + 1, &t) {
                        z.add_entry(i, j, row, col, x.clone());
                    }
                }
            }
            if let Some(list) = a_in.get(&(g.k, g.x)) {
                for (src, e) in list {
                    let p = compose_unchecked(&f, e);
                    for (mask, x) in p.terms() {
                        let t = HomGen { k: g.k - 1, x: *src, y: g.y, mask: *mask };
                        if let Some(row) = basis.position(i + 1, &t) {
                            z.add_entry(i, j, row, col, x * sign);
                        }
                    }
                }
            }
        }
    }
    Ok((z, basis))
}
