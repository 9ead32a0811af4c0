//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

pub type DenseMat = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> DenseMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &DenseMat, b: &DenseMat, inner: usize) -> DenseMat {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

struct Reducer<'a> {
    m: DenseMat,
    rows: usize,
    cols: usize,
    u: Option<&'a mut DenseMat>,
    v: Option<&'a mut DenseMat>,
}

impl Reducer<'_> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.m.swap(i, j);
            if let Some(u) = self.u.as_deref_mut() {
                u.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for r in self.m.iter_mut() {
                r.swap(i, j);
            }
            if let Some(v) = self.v.as_deref_mut() {
                for r in v.iter_mut() {
                    r.swap(i, j);
                }
            }
        }
    }

    /// row_i -= k * row_j
    fn row_sub(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        let rj = self.m[j].clone();
        for (x, y) in self.m[i].iter_mut().zip(&rj) {
            if !y.is_zero() {
                *x -= k * y;
            }
        }
        if let Some(u) = self.u.as_deref_mut() {
            let uj = u[j].clone();
            for (x, y) in u[i].iter_mut().zip(&uj) {
                if !y.is_zero() {
                    *x -= k * y;
                }
            }
        }
    }

    /// col_i -= k * col_j
    fn col_sub(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in self.m.iter_mut() {
            if !r[j].is_zero() {
                let t = k * &r[j];
                r[i] -= t;
            }
        }
        if let Some(v) = self.v.as_deref_mut() {
            for r in v.iter_mut() {
                if !r[j].is_zero() {
                    let t = k * &r[j];
                    r[i] -= t;
                }
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.m[i].iter_mut() {
            *x = -&*x;
        }
        if let Some(u) = self.u.as_deref_mut() {
            for x in u[i].iter_mut() {
                *x = -&*x;
            }
        }
    }

    fn smallest(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.m[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.map_or(true, |(a, b)| x.abs() < self.m[a][b].abs()) {
                    best = Some((i, j));
                    if x.abs().is_one() {
                        return best;
                    }
                }
            }
        }
        best
    }

    fn run(&mut self) -> Vec<BigInt> {
        let n = self.rows.min(self.cols);
        let mut diag = vec![];
        let mut t = 0;
        while t < n {
            let Some((pi, pj)) = self.smallest(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..self.rows {
                    if self.m[i][t].is_zero() {
                        continue;
                    }
                    let q = self.m[i][t].div_floor(&self.m[t][t]);
                    self.row_sub(i, t, &q);
                    if !self.m[i][t].is_zero() {
                        dirty = true;
                    }
                }
                for j in t + 1..self.cols {
                    if self.m[t][j].is_zero() {
                        continue;
                    }
                    let q = self.m[t][j].div_floor(&self.m[t][t]);
                    self.col_sub(j, t, &q);
                    if !self.m[t][j].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    // move the smallest remainder in row/column t to the pivot
                    let mut best = (t, t);
                    for i in t + 1..self.rows {
                        let x = &self.m[i][t];
                        if !x.is_zero() && x.abs() < self.m[best.0][best.1].abs() {
                            best = (i, t);
                        }
                    }
                    for j in t + 1..self.cols {
                        let x = &self.m[t][j];
                        if !x.is_zero() && x.abs() < self.m[best.0][best.1].abs() {
                            best = (t, j);
                        }
                    }
                    self.swap_rows(t, best.0);
                    self.swap_cols(t, best.1);
                    continue;
                }
                // divisibility of the remaining block
                let p = self.m[t][t].clone();
                let bad = (t + 1..self.rows)
                    .find(|&i| (t + 1..self.cols).any(|j| !self.m[i][j].is_multiple_of(&p)));
                match bad {
                    Some(i) => {
                        let neg = -BigInt::one();
                        self.row_sub(t, i, &neg);
                    }
                    None => break,
                }
            }
            if self.m[t][t].is_negative() {
                self.negate_row(t);
            }
            diag.push(self.m[t][t].clone());
            t += 1;
        }
        diag
    }
}

/// `(U, D, V)` with `U·M·V = D`, `D` diagonal with `d₁ | d₂ | …`, `U`, `V` unimodular.
pub fn smith_normal_form(m: &DenseMat) -> (DenseMat, DenseMat, DenseMat) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut r = Reducer { m: m.clone(), rows, cols, u: Some(&mut u), v: Some(&mut v) };
    r.run();
    let d = r.m;
    (u, d, v)
}

/// Nonzero invariant factors of a dense matrix.
pub fn dense_invariant_factors(m: DenseMat) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    Reducer { m, rows, cols, u: None, v: None }.run()
}

/// Nonzero invariant factors of a sparse matrix given as columns of `(row, value)`.
///
/// Unit entries are eliminated sparsely first; the remaining block goes
/// through the dense reduction.
pub fn invariant_factors(cols: &[Vec<(usize, BigInt)>]) -> Vec<BigInt> {
    let mut colmap: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
    let mut rowidx: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (c, col) in cols.iter().enumerate() {
        for (r, x) in col {
            if !x.is_zero() {
                colmap.entry(c).or_default().insert(*r, x.clone());
                rowidx.entry(*r).or_default().insert(c);
            }
        }
    }
    let mut units = 0usize;
    loop {
        // pick a unit with the fewest entries in its row
        let mut pick: Option<(usize, usize, usize)> = None;
        for (c, col) in &colmap {
            for (r, x) in col {
                if x.abs().is_one() {
                    let cost = rowidx[r].len() * col.len();
                    if pick.map_or(true, |(_, _, k)| cost < k) {
                        pick = Some((*c, *r, cost));
                    }
                }
            }
        }
        let Some((pc, pr, _)) = pick else { break };
        units += 1;
        let pcol = colmap.remove(&pc).unwrap();
        let pval = pcol[&pr].clone();
        let others: Vec<usize> = rowidx[&pr].iter().copied().filter(|&c| c != pc).collect();
        for r in pcol.keys() {
            rowidx.get_mut(r).unwrap().remove(&pc);
        }
        for c in others {
            let col = colmap.get_mut(&c).unwrap();
            let f = col.remove(&pr).unwrap() * &pval;
            rowidx.get_mut(&pr).unwrap().remove(&c);
            for (r, x) in &pcol {
                if *r == pr {
                    continue;
                }
                let e = col.entry(*r).or_insert_with(BigInt::zero);
                *e -= &f * x;
                if e.is_zero() {
                    col.remove(r);
                    rowidx.get_mut(r).unwrap().remove(&c);
                } else {
                    rowidx.get_mut(r).unwrap().insert(c);
                }
            }
            if col.is_empty() {
                colmap.remove(&c);
            }
        }
        rowidx.remove(&pr);
    }
    let mut out = vec![BigInt::one(); units];
    let live_rows: Vec<usize> = rowidx.iter().filter(|(_, s)| !s.is_empty()).map(|(r, _)| *r).collect();
    if !colmap.is_empty() && !live_rows.is_empty() {
        let pos: BTreeMap<usize, usize> = live_rows.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        let mut dense = vec![vec![BigInt::zero(); colmap.len()]; live_rows.len()];
        for (j, col) in colmap.values().enumerate() {
            for (r, x) in col {
                dense[pos[r]][j] = x.clone();
            }
        }
        out.extend(dense_invariant_factors(dense));
    }
    out.sort();
    out
}

/// Rank of a sparse integer matrix.
pub fn rank(cols: &[Vec<(usize, BigInt)>]) -> usize {
    invariant_factors(cols).len()
}

/// An integer solution of `M x = b`, with free coordinates set to zero.
pub fn solve(m: &DenseMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if rows == 0 {
        return Some(vec![BigInt::zero(); cols]);
    }
    let (u, d, v) = smith_normal_form(m);
    let ub: Vec<BigInt> = u.iter().map(|row| row.iter().zip(b).map(|(x, y)| x * y).sum()).collect();
    let mut y = vec![BigInt::zero(); cols];
    for i in 0..rows {
        let di = if i < cols { d[i][i].clone() } else { BigInt::zero() };
        if di.is_zero() {
            if !ub[i].is_zero() {
                return None;
            }
        } else {
            let (q, r) = ub[i].div_rem(&di);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    Some(v.iter().map(|row| row.iter().zip(&y).map(|(x, y)| x * y).sum()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> DenseMat {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn diagonal_two_three() {
        let (_, d, _) = smith_normal_form(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(d, m(&[&[1, 0], &[0, 6]]));
    }

    #[test]
    fn two_by_two() {
        let a = m(&[&[2, 4], &[6, 8]]);
        let (u, d, v) = smith_normal_form(&a);
        assert_eq!(d, m(&[&[2, 0], &[0, 4]]));
        assert_eq!(mat_mul(&mat_mul(&u, &a, 2), &v, 2), d);
    }

    #[test]
    fn sparse_factors_match_dense() {
        let a = m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        let cols: Vec<Vec<(usize, BigInt)>> =
            (0..3).map(|j| (0..3).map(|i| (i, a[i][j].clone())).collect()).collect();
        let f = invariant_factors(&cols);
        assert_eq!(f, vec![BigInt::from(1), BigInt::from(1), BigInt::from(3)]);
    }

    #[test]
    fn solves_and_detects_obstruction() {
        let a = m(&[&[2, 0], &[0, 3]]);
        let x = solve(&a, &[BigInt::from(4), BigInt::from(9)]).unwrap();
        assert_eq!(x, vec![BigInt::from(2), BigInt::from(3)]);
        assert!(solve(&a, &[BigInt::from(1), BigInt::from(0)]).is_none());
    }
}
