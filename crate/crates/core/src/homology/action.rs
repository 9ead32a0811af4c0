//! The polynomial actions `u_k` on the homology of `END(P_n)`.

use super::{ext_safe_from, ext_with_basis, integer_kernel, DenseMat};
use crate::complexes::{ChainMap, Complex};
use crate::error::{Error, Result};
use crate::projectors::TruncatedProjector;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// The map induced by `u_k` from the free part of `H^{h,q}` to that of
/// `H^{h+a,q+b}`, written in chosen rational bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedMap {
    pub source: (i32, i32),
    pub target: (i32, i32),
    /// Rows index the target basis, columns the source basis.
    pub matrix: Vec<Vec<BigRational>>,
}

impl InducedMap {
    pub fn rank(&self) -> usize {
        rational_rank(&self.matrix)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|x| x.is_zero())
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.matrix.first().map_or(0, |r| r.len())
    }
}

#[derive(Clone, Debug)]
pub struct UAction {
    pub k: usize,
    pub bidegree: (i32, i32),
    /// One entry per source bidegree with nonzero free homology.
    pub maps: Vec<InducedMap>,
}

impl UAction {
    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(|m| m.is_zero())
    }
}

/// Matrices of `u_k ∘ −` on `H(END(P_n))` for source degrees `[lo, hi]`,
/// computed on `HOM(1_n, P_n)`, which the unit identifies with it.
/// Fails when a target degree falls below the safe window.
pub fn u_action_on_homology(p: &TruncatedProjector, k: usize, lo: i32, hi: i32) -> Result<UAction> {
    let u = p.u_maps.get(&k).ok_or_else(|| Error::Invalid(format!("no u_{} action on P_{}", k, p.n)))?;
    action_on_hom(&Complex::identity(p.n), &p.complex, u, k, lo, hi)
}

/// Post-composition by an endomorphism `u` of `B` on `H(HOM(A, B))`.
pub fn action_on_hom(a: &Complex, b: &Complex, u: &ChainMap, k: usize, lo: i32, hi: i32) -> Result<UAction> {
    let lo_t = lo + u.hdeg.min(0);
    let hi_t = hi + u.hdeg.max(0);
    if let Some(s) = ext_safe_from(a, b, false)? {
        if lo_t < s {
            return Err(Error::Unsafe(lo_t, s));
        }
    }
    let (g, z, basis) = ext_with_basis(a, b, lo_t, hi_t, false)?;
    let mut bases: BTreeMap<(i32, i32), (Vec<Vec<BigInt>>, DenseMat)> = BTreeMap::new();
    let mut basis_at = |h: i32, q: i32| -> (Vec<Vec<BigInt>>, DenseMat) {
        bases
            .entry((h, q))
            .or_insert_with(|| {
                let dim = z.rank(h, q);
                let bnd = boundary_columns(&z.dense(h - 1, q), dim, z.rank(h - 1, q));
                let mut chosen: Vec<Vec<BigInt>> = vec![];
                let mut span = bnd.clone();
                let mut r = rational_rank_cols(&span);
                for v in integer_kernel(&z.dense(h, q)) {
                    span.push(v.clone());
                    let r2 = rational_rank_cols(&span);
                    if r2 > r {
                        chosen.push(v);
                        r = r2;
                    } else {
                        span.pop();
                    }
                }
                (chosen, bnd)
            })
            .clone()
    };
    let mut maps = vec![];
    for ((h, q), grp) in g.iter() {
        if *h < lo || *h > hi || grp.rank == 0 {
            continue;
        }
        let (h2, q2) = (h + u.hdeg, q + u.qdeg);
        let (src, _) = basis_at(*h, *q);
        let (tgt, bnd) = basis_at(h2, q2);
        let mut matrix = vec![vec![BigRational::zero(); src.len()]; tgt.len()];
        for (j, v) in src.iter().enumerate() {
            let f = basis.map_of(a, b, *h, *q, v);
            let mut img = u.compose(&f);
            img.hdeg = h2;
            img.qdeg = q2;
            let w = if img.is_zero() {
                vec![BigInt::zero(); z.rank(h2, q2)]
            } else {
                basis
                    .vector_of(&img)
                    .ok_or_else(|| Error::Window(format!("image of u_{} leaves the computed window at ({}, {})", k, h2, q2)))?
            };
            let mut cols = bnd.clone();
            cols.extend(tgt.iter().cloned());
            let x = rational_solve(&cols, &w).ok_or_else(|| Error::NotAComplex(format!("image of a cycle is not a cycle at ({}, {})", h2, q2)))?;
            for (i, xi) in x[bnd.len()..].iter().enumerate() {
                matrix[i][j] = xi.clone();
            }
        }
        maps.push(InducedMap { source: (*h, *q), target: (h2, q2), matrix });
    }
    Ok(UAction { k, bidegree: (u.hdeg, u.qdeg), maps })
}

fn boundary_columns(m: &DenseMat, rows: usize, cols: usize) -> Vec<Vec<BigInt>> {
    (0..cols).map(|c| (0..rows).map(|r| m.get(r).map_or(BigInt::zero(), |row| row[c].clone())).collect()).collect()
}

fn to_rational(cols: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    let rows = cols.first().map_or(0, |c| c.len());
    (0..rows).map(|r| cols.iter().map(|c| BigRational::from_integer(c[r].clone())).collect()).collect()
}

/// Row-reduce in place; returns the pivot columns.
fn reduce(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = vec![];
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = BigRational::one() / m[row][c].clone();
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                let pr = m[row].clone();
                for (x, y) in m[r].iter_mut().zip(&pr) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    pivots
}

fn rational_rank(m: &[Vec<BigRational>]) -> usize {
    reduce(&mut m.to_vec()).len()
}

fn rational_rank_cols(cols: &[Vec<BigInt>]) -> usize {
    if cols.is_empty() {
        return 0;
    }
    rational_rank(&to_rational(cols))
}

/// Some `x` with `Σ x_i cols_i = w`, free variables zero.
fn rational_solve(cols: &[Vec<BigInt>], w: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = cols.len();
    let mut aug = to_rational(cols);
    if aug.is_empty() {
        aug = vec![vec![]; w.len()];
    }
    for (row, b) in aug.iter_mut().zip(w) {
        row.push(BigRational::from_integer(b.clone()));
    }
    let pivots = reduce(&mut aug);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][n].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projectors::truncated_pn;

    #[test]
    fn u1_squared_vanishes() {
        let p = truncated_pn(2, 9).unwrap();
        let u = &p.u_maps[&1];
        let u2 = u.compose(u);
        let a = action_on_hom(&Complex::identity(2), &p.complex, &u2, 1, -4, 0).unwrap();
        assert!(a.is_zero());
    }

    #[test]
    fn u2_is_injective_on_end_p2() {
        let p = truncated_pn(2, 11).unwrap();
        let a = u_action_on_homology(&p, 2, -4, 0).unwrap();
        assert!(!a.maps.is_empty());
        assert!(a.maps.iter().all(|m| m.is_injective()));
    }
}
