//! Integer homology of bigraded complexes, Ext groups and the partial-trace adjunction.

mod action;
mod snf;

pub use action::{action_on_hom, u_action_on_homology, InducedMap, UAction};

pub use snf::{dense_invariant_factors, invariant_factors, mat_mul, rank, smith_normal_form, solve, DenseMat};

use crate::complexes::{hom_complex, partial_trace, shift, ChainMap, Complex, HomBasis, HomWindow, ZComplex};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Coefficients for a homology computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Integers,
    Rationals,
    /// Prime field `F_p`.
    Prime(u32),
}

/// `ℤ^rank ⊕ ⊕ ℤ/t`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl Group {
    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn free(rank: usize) -> Self {
        Group { rank, torsion: vec![] }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![];
        if self.rank > 0 {
            parts.push(if self.rank == 1 { "Z".to_string() } else { format!("Z^{}", self.rank) });
        }
        for t in &self.torsion {
            parts.push(format!("Z/{}", t));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

/// Abelian groups indexed by `(h, q)`; zero groups are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BigradedGroups {
    groups: BTreeMap<(i32, i32), Group>,
}

impl BigradedGroups {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, h: i32, q: i32, g: Group) {
        if g.is_zero() {
            self.groups.remove(&(h, q));
        } else {
            self.groups.insert((h, q), g);
        }
    }

    pub fn get(&self, h: i32, q: i32) -> Group {
        self.groups.get(&(h, q)).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i32, i32), &Group)> {
        self.groups.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn total_rank(&self) -> usize {
        self.groups.values().map(|g| g.rank).sum()
    }

    /// Keep only homological degrees in `[lo, hi]`.
    pub fn restrict(&self, lo: i32, hi: i32) -> BigradedGroups {
        BigradedGroups { groups: self.groups.iter().filter(|((h, _), _)| *h >= lo && *h <= hi).map(|(k, g)| (*k, g.clone())).collect() }
    }

    pub fn shifted(&self, i: i32, j: i32) -> BigradedGroups {
        BigradedGroups { groups: self.groups.iter().map(|((h, q), g)| ((h + i, q + j), g.clone())).collect() }
    }

    pub fn direct_sum(&self, other: &BigradedGroups) -> BigradedGroups {
        let mut out = self.clone();
        for (&(h, q), g) in &other.groups {
            let mut cur = out.get(h, q);
            cur.rank += g.rank;
            cur.torsion.extend(g.torsion.iter().cloned());
            cur.torsion = normalize_torsion(cur.torsion);
            out.insert(h, q, cur);
        }
        out
    }
}

/// Rewrite a list of cyclic orders as invariant factors `t₁ | t₂ | …`.
fn normalize_torsion(ts: Vec<BigInt>) -> Vec<BigInt> {
    if ts.len() <= 1 {
        return ts;
    }
    let n = ts.len();
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (i, t) in ts.into_iter().enumerate() {
        m[i][i] = t;
    }
    dense_invariant_factors(m).into_iter().filter(|x| !x.is_one()).collect()
}

impl fmt::Display for BigradedGroups {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((h, q), g) in &self.groups {
            writeln!(f, "h={:>3} q={:>3}: {}", h, q, g)?;
        }
        Ok(())
    }
}

/// Homology of a bigraded free complex over `field`.
pub fn homology_over(c: &ZComplex, field: Field) -> Result<BigradedGroups> {
    let keys: Vec<(i32, i32)> = c.ranks().keys().copied().collect();
    let factors: BTreeMap<(i32, i32), Vec<BigInt>> = keys
        .par_iter()
        .map(|&(h, q)| {
            let cols = c.columns(h, q);
            ((h, q), invariant_factors(&cols))
        })
        .collect();
    let rank_of = |fs: &[BigInt]| -> usize {
        match field {
            Field::Prime(p) => {
                let p = BigInt::from(p);
                fs.iter().filter(|x| !(*x % &p).is_zero()).count()
            }
            _ => fs.len(),
        }
    };
    let mut out = BigradedGroups::new();
    for &(h, q) in &keys {
        let dim = c.rank(h, q);
        let out_f = factors.get(&(h, q)).map(|v| v.as_slice()).unwrap_or(&[]);
        let in_f = factors.get(&(h - 1, q)).map(|v| v.as_slice()).unwrap_or(&[]);
        let r = dim - rank_of(out_f) - rank_of(in_f);
        let torsion = match field {
            Field::Integers => in_f.iter().filter(|x| !x.is_one()).cloned().collect(),
            _ => vec![],
        };
        out.insert(h, q, Group { rank: r, torsion });
    }
    Ok(out)
}

/// Integer homology; fails when `d² ≠ 0`.
pub fn integer_homology(c: &ZComplex) -> Result<BigradedGroups> {
    c.check()?;
    homology_over(c, Field::Integers)
}

/// Homology of a closed complex under the tautological functor.
pub fn closed_homology(c: &Complex) -> Result<BigradedGroups> {
    let z = ZComplex::from_closed(c)?;
    let g = integer_homology(&z)?;
    Ok(match c.valid_from() {
        Some(v) => g.restrict(v, i32::MAX),
        None => g,
    })
}

/// A Laurent polynomial in `t` and `q` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly2 {
    pub terms: BTreeMap<(i32, i32), BigInt>,
}

impl Poly2 {
    pub fn add_term(&mut self, t: i32, q: i32, c: BigInt) {
        let e = self.terms.entry((t, q)).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(t, q));
        }
    }

    pub fn one() -> Self {
        let mut p = Poly2::default();
        p.add_term(0, 0, BigInt::one());
        p
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::default();
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &other.terms {
                out.add_term(a + c, b + d, x * y);
            }
        }
        out
    }

    /// Substitute `t = -1`: coefficients indexed by q.
    pub fn at_t_minus_one(&self) -> BTreeMap<i32, BigInt> {
        let mut out: BTreeMap<i32, BigInt> = BTreeMap::new();
        for ((t, q), c) in &self.terms {
            let v = if t.rem_euclid(2) == 0 { c.clone() } else { -c };
            *out.entry(*q).or_insert_with(BigInt::zero) += v;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((t, q), c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mut mono = String::new();
            if *t != 0 {
                mono += &format!("t^{}", t);
            }
            if *q != 0 {
                mono += &format!("q^{}", q);
            }
            if mono.is_empty() {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                write!(f, "{}", mono)?;
            } else {
                write!(f, "{}{}", a, mono)?;
            }
        }
        Ok(())
    }
}

/// Free ranks (or ranks over `field`) as a polynomial in `t`, `q`.
pub fn poincare_polynomial(g: &BigradedGroups, field: Field) -> Poly2 {
    let mut p = Poly2::default();
    for ((h, q), grp) in g.iter() {
        let r = match field {
            Field::Integers | Field::Rationals => grp.rank,
            Field::Prime(pr) => {
                let pr = BigInt::from(pr);
                grp.rank + grp.torsion.iter().filter(|t| (*t % &pr).is_zero()).count()
            }
        };
        if r > 0 {
            p.add_term(*h, *q, BigInt::from(r));
        }
    }
    p
}

/// Poincaré polynomial over `F_p`, where torsion contributes in two adjacent degrees.
pub fn poincare_mod_p(c: &ZComplex, p: u32) -> Result<Poly2> {
    Ok(poincare_polynomial(&homology_over(c, Field::Prime(p))?, Field::Rationals))
}

/// Lowest hom degree at which `HOM(A, B)` has exact homology.
///
/// `B`'s truncation is accounted for directly. A truncated `A` is only
/// allowed when its discarded tail is HOM-acyclic into `B`, which is the
/// case for truncated projectors into complexes killing turnbacks.
pub fn ext_safe_from(a: &Complex, b: &Complex, tail_acyclic: bool) -> Result<Option<i32>> {
    if a.trunc().is_some() && !tail_acyclic {
        return Err(Error::Window("source complex is truncated".into()));
    }
    Ok(match (b.trunc(), a.hmin()) {
        (Some(tb), Some(amin)) => Some(tb - amin + 1),
        (Some(_), None) => None,
        (None, _) => None,
    })
}

/// Ext groups `H(HOM(A, B))` in homological degrees `[lo, hi]`; refuses
/// degrees below the safe bound.
pub fn ext_groups(a: &Complex, b: &Complex, lo: i32, hi: i32, tail_acyclic: bool) -> Result<BigradedGroups> {
    let (g, _, _) = ext_with_basis(a, b, lo, hi, tail_acyclic)?;
    Ok(g)
}

pub(crate) fn ext_with_basis(
    a: &Complex,
    b: &Complex,
    lo: i32,
    hi: i32,
    tail_acyclic: bool,
) -> Result<(BigradedGroups, ZComplex, HomBasis)> {
    if let Some(s) = ext_safe_from(a, b, tail_acyclic)? {
        if lo < s {
            return Err(Error::Unsafe(lo, s));
        }
    }
    let (z, basis) = hom_complex(a, b, HomWindow::degrees(lo, hi))?;
    let g = integer_homology(&z)?.restrict(lo, hi);
    Ok((g, z, basis))
}

/// Rewrite `HOM(M ⊔ 1, N)` as `HOM(M, q·T(N))` over one strand fewer.
pub fn adjunction_reduce(m: &Complex, n: &Complex) -> Result<(Complex, Complex)> {
    if n.bot() == 0 || n.top() == 0 || m.bot() + 1 != n.bot() || m.top() + 1 != n.top() {
        return Err(Error::Invalid("adjunction needs HOM(M ⊔ 1, N) with N one strand wider".into()));
    }
    let t = partial_trace(n)?;
    Ok((m.clone(), shift(&t, 0, 1)))
}

/// Matrix of an endomorphism `u` of `B` acting by post-composition on
/// `H(HOM(A, B))`, from degree `(h, q)` to `(h + u.hdeg, q + u.qdeg)`, on the
/// free parts over ℚ. Returns the rank of the induced map.
pub fn induced_rank(
    z: &ZComplex,
    basis: &HomBasis,
    a: &Complex,
    b: &Complex,
    u: &ChainMap,
    h: i32,
    q: i32,
) -> Result<usize> {
    let (h2, q2) = (h + u.hdeg, q + u.qdeg);
    let cycles = integer_kernel(&z.dense(h, q));
    let mut images = vec![];
    for v in cycles {
        let f = basis.map_of(a, b, h, q, &v);
        let g = u.compose(&f);
        let mut g = g;
        g.hdeg = h2;
        g.qdeg = q2;
        let w = basis
            .vector_of(&g)
            .ok_or_else(|| Error::Window(format!("image of u leaves the computed window at ({}, {})", h2, q2)))?;
        images.push(w);
    }
    // rank of [images | boundaries] minus rank of boundaries
    let bnd = z.dense(h2 - 1, q2);
    let nb = z.rank(h2 - 1, q2);
    let mut cols: Vec<Vec<(usize, BigInt)>> = vec![];
    for c in 0..nb {
        cols.push(bnd.iter().enumerate().filter(|(_, r)| !r[c].is_zero()).map(|(i, r)| (i, r[c].clone())).collect());
    }
    let rb = rank(&cols);
    for w in images {
        cols.push(w.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect());
    }
    Ok(rank(&cols) - rb)
}

/// A basis of the integer kernel of a dense matrix.
pub fn integer_kernel(m: &DenseMat) -> Vec<Vec<BigInt>> {
    let cols = m.first().map_or(0, |r| r.len());
    if m.is_empty() {
        return (0..cols)
            .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
    }
    let (_, d, v) = smith_normal_form(m);
    let r = (0..cols.min(m.len())).filter(|&i| !d[i][i].is_zero()).count();
    (r..cols).map(|j| v.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Convert a small integer to `i64`, saturating.
pub fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().unwrap_or(if x.is_negative() { i64::MIN } else { i64::MAX })
}
