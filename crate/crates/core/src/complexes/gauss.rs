//! Gaussian elimination on ±1·identity differential entries.
//!
//! Eliminating `φ = ε·Id: c → r` from
//! `[[φ, δ], [γ, D]]` leaves `D − ε·γ·δ` and extends the retraction data by
//! `π_b −= ε·γ_b·π_r`, `σ_a −= ε·σ_c·δ_a`, `h += ε·σ_c·π_r`.

use super::deloop::deloop_impl;
use super::{ChainMap, Complex, SDRData};
use crate::cobordism::{compose_unchecked, CobMorphism, GradedObject};
use crate::error::{Error, Result};
use num_traits::Signed;
use std::collections::{BTreeMap, BTreeSet};

/// How much retraction data to keep while simplifying.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tracking {
    None,
    /// π and σ only.
    Maps,
    /// π, σ and the homotopy h.
    Full,
}

type Row = BTreeMap<usize, CobMorphism>;

fn row_add(row: &mut Row, k: usize, f: CobMorphism) {
    if f.is_zero() {
        return;
    }
    match row.get_mut(&k) {
        Some(cur) => {
            cur.add_assign(&f);
            if cur.is_zero() {
                row.remove(&k);
            }
        }
        None => {
            row.insert(k, f);
        }
    }
}

struct Work {
    lo: i32,
    objs: Vec<Vec<GradedObject>>,
    alive: Vec<Vec<bool>>,
    /// out[k][c]: row index in degree k+1 → entry
    out: Vec<Vec<Row>>,
    /// inc[k][r]: sources in degree k-1
    inc: Vec<Vec<BTreeSet<usize>>>,
    units: Vec<BTreeSet<(usize, usize)>>,
    track: Tracking,
    /// pi[k][cur]: original index → (orig → cur)
    pi: Vec<Vec<Row>>,
    /// sigma[k][cur]: original index → (cur → orig)
    sigma: Vec<Vec<Row>>,
    /// homotopy, keyed by source degree slot: (orig row in k-1, orig col in k)
    h: BTreeMap<usize, BTreeMap<(usize, usize), CobMorphism>>,
}

impl Work {
    fn new(a: &Complex, track: Tracking) -> Self {
        let lo = a.hmin().unwrap_or(0);
        let hi = a.hmax().unwrap_or(0);
        let len = (hi - lo + 2) as usize;
        let mut objs = vec![vec![]; len];
        for (h, v) in a.degrees() {
            objs[(h - lo) as usize] = v.clone();
        }
        let alive: Vec<Vec<bool>> = objs.iter().map(|v| vec![true; v.len()]).collect();
        let mut out: Vec<Vec<Row>> = objs.iter().map(|v| vec![Row::new(); v.len()]).collect();
        let mut inc: Vec<Vec<BTreeSet<usize>>> = objs.iter().map(|v| vec![BTreeSet::new(); v.len()]).collect();
        let mut units = vec![BTreeSet::new(); len];
        for (h, m) in a.diffs() {
            let k = (h - lo) as usize;
            for ((r, c), f) in m {
                out[k][*c].insert(*r, f.clone());
                inc[k + 1][*r].insert(*c);
                if f.is_unit_identity() {
                    units[k].insert((*c, *r));
                }
            }
        }
        let mut pi = vec![];
        let mut sigma = vec![];
        if track != Tracking::None {
            for v in &objs {
                pi.push(
                    v.iter()
                        .enumerate()
                        .map(|(i, o)| Row::from([(i, CobMorphism::identity(&o.tangle))]))
                        .collect::<Vec<_>>(),
                );
            }
            sigma = pi.clone();
        }
        Work { lo, objs, alive, out, inc, units, track, pi, sigma, h: BTreeMap::new() }
    }

    fn set(&mut self, k: usize, c: usize, r: usize, f: Option<CobMorphism>) {
        match f {
            Some(f) if !f.is_zero() => {
                if f.is_unit_identity() {
                    self.units[k].insert((c, r));
                } else {
                    self.units[k].remove(&(c, r));
                }
                self.out[k][c].insert(r, f);
                self.inc[k + 1][r].insert(c);
            }
            _ => {
                self.units[k].remove(&(c, r));
                self.out[k][c].remove(&r);
                self.inc[k + 1][r].remove(&c);
            }
        }
    }

    fn eliminate(&mut self, k: usize, c: usize, r: usize) {
        let eps = self.out[k][c][&r].identity_scalar().expect("pivot").clone();
        let eps_i: i64 = if eps.is_positive() { 1 } else { -1 };
        // remove everything touching c and r, remembering what we need
        let mut gamma = std::mem::take(&mut self.out[k][c]);
        gamma.remove(&r);
        for (&b, _) in gamma.iter() {
            self.inc[k + 1][b].remove(&c);
            self.units[k].remove(&(c, b));
        }
        self.units[k].remove(&(c, r));
        self.inc[k + 1][r].remove(&c);
        let srcs: Vec<usize> = self.inc[k + 1][r].iter().copied().collect();
        let mut delta: Vec<(usize, CobMorphism)> = vec![];
        for &a in &srcs {
            let f = self.out[k][a].remove(&r).expect("incidence");
            self.units[k].remove(&(a, r));
            delta.push((a, f));
        }
        self.inc[k + 1][r].clear();
        if k + 1 < self.out.len() {
            let outs = std::mem::take(&mut self.out[k + 1][r]);
            for b in outs.keys() {
                self.inc[k + 2][*b].remove(&r);
                self.units[k + 1].remove(&(r, *b));
            }
        }
        if k > 0 {
            let ins = std::mem::take(&mut self.inc[k][c]);
            for x in ins {
                self.out[k - 1][x].remove(&c);
                self.units[k - 1].remove(&(x, c));
            }
        }
        self.alive[k][c] = false;
        self.alive[k + 1][r] = false;

        for (a, da) in &delta {
            for (b, gb) in &gamma {
                let corr = compose_unchecked(gb, da).scale_i64(-eps_i);
                if corr.is_zero() {
                    continue;
                }
                let cur = self.out[k][*a].get(b).cloned();
                let new = match cur {
                    Some(mut x) => {
                        x.add_assign(&corr);
                        x
                    }
                    None => corr,
                };
                self.set(k, *a, *b, Some(new));
            }
        }

        if self.track == Tracking::None {
            return;
        }
        let pi_r = std::mem::take(&mut self.pi[k + 1][r]);
        let sig_c = std::mem::take(&mut self.sigma[k][c]);
        self.pi[k][c].clear();
        self.sigma[k + 1][r].clear();
        if self.track == Tracking::Full {
            let hk = self.h.entry(k + 1).or_default();
            for (i, sc) in &sig_c {
                for (j, pr) in &pi_r {
                    let v = compose_unchecked(sc, pr).scale_i64(eps_i);
                    if v.is_zero() {
                        continue;
                    }
                    match hk.get_mut(&(*i, *j)) {
                        Some(x) => {
                            x.add_assign(&v);
                            if x.is_zero() {
                                hk.remove(&(*i, *j));
                            }
                        }
                        None => {
                            hk.insert((*i, *j), v);
                        }
                    }
                }
            }
        }
        for (b, gb) in &gamma {
            for (j, pr) in &pi_r {
                row_add(&mut self.pi[k + 1][*b], *j, compose_unchecked(gb, pr).scale_i64(-eps_i));
            }
        }
        for (a, da) in &delta {
            for (i, sc) in &sig_c {
                row_add(&mut self.sigma[k][*a], *i, compose_unchecked(sc, da).scale_i64(-eps_i));
            }
        }
    }

    fn first_pivot(&self, from: usize) -> Option<(usize, usize, usize)> {
        (from..self.units.len()).find_map(|k| self.units[k].iter().next().map(|&(c, r)| (k, c, r)))
    }

    fn run(&mut self) {
        let mut k = 0;
        while let Some((kk, c, r)) = self.first_pivot(k) {
            self.eliminate(kk, c, r);
            // new units can only appear in the same degree
            k = kk;
        }
    }

    fn finish(self, a: &Complex) -> (Complex, Option<SDRData>) {
        let mut out = Complex::new(a.bot(), a.top());
        out.set_trunc(a.trunc());
        let mut newidx: Vec<Vec<Option<usize>>> = vec![];
        for (k, v) in self.objs.iter().enumerate() {
            let h = self.lo + k as i32;
            let mut idx = vec![None; v.len()];
            for (i, o) in v.iter().enumerate() {
                if self.alive[k][i] {
                    idx[i] = Some(out.push(h, o.clone()));
                }
            }
            newidx.push(idx);
        }
        for (k, rows) in self.out.iter().enumerate() {
            let h = self.lo + k as i32;
            for (c, row) in rows.iter().enumerate() {
                for (r, f) in row {
                    out.set_entry(h, newidx[k + 1][*r].unwrap(), newidx[k][c].unwrap(), f.clone());
                }
            }
        }
        out.tidy();
        if self.track == Tracking::None {
            return (out, None);
        }
        let mut pi = ChainMap::new(0, 0);
        let mut sigma = ChainMap::new(0, 0);
        for k in 0..self.objs.len() {
            let h = self.lo + k as i32;
            for (cur, row) in self.pi[k].iter().enumerate() {
                if let Some(ni) = newidx[k][cur] {
                    for (orig, f) in row {
                        pi.add_entry(h, ni, *orig, f.clone());
                    }
                }
            }
            for (cur, row) in self.sigma[k].iter().enumerate() {
                if let Some(ni) = newidx[k][cur] {
                    for (orig, f) in row {
                        sigma.add_entry(h, *orig, ni, f.clone());
                    }
                }
            }
        }
        let mut hm = ChainMap::new(-1, 0);
        for (k, m) in self.h {
            let h = self.lo + k as i32;
            for ((i, j), f) in m {
                hm.add_entry(h, i, j, f);
            }
        }
        pi.tidy();
        sigma.tidy();
        hm.tidy();
        (out, Some(SDRData { pi, sigma, h: hm }))
    }
}

/// Eliminate a single entry from degree `h` object `col` to degree `h+1` object `row`.
pub fn gauss(a: &Complex, h: i32, row: usize, col: usize) -> Result<(Complex, SDRData)> {
    let f = a
        .d(h)
        .get(&(row, col))
        .ok_or_else(|| Error::NotInvertible(format!("no entry ({},{}) in degree {}", row, col, h)))?;
    if !f.is_unit_identity() {
        return Err(Error::NotInvertible(format!("entry ({},{}) in degree {} is {:?}", row, col, h, f)));
    }
    let mut w = Work::new(a, Tracking::Full);
    let k = (h - w.lo) as usize;
    w.eliminate(k, col, row);
    let (c, s) = w.finish(a);
    Ok((c, s.expect("tracked")))
}

/// Deloop, then eliminate ±1·identity entries until none remain.
pub fn simplify_with(a: &Complex, track: Tracking) -> (Complex, Option<SDRData>) {
    let (d, s1) = deloop_impl(a, track != Tracking::None);
    let mut w = Work::new(&d, track);
    w.run();
    let (out, s2) = w.finish(&d);
    let sdr = match (s1, s2) {
        (Some(a), Some(b)) => Some(a.then(&b)),
        _ => None,
    };
    (out, sdr)
}

pub fn simplify(a: &Complex) -> Complex {
    simplify_with(a, Tracking::None).0
}

pub fn simplify_with_sdr(a: &Complex) -> (Complex, SDRData) {
    let (c, s) = simplify_with(a, Tracking::Full);
    (c, s.expect("tracked"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cobordism::FlatTangle;

    #[test]
    fn identity_cone_vanishes() {
        let t = FlatTangle::identity(2);
        let mut c = Complex::square(2);
        c.push(0, GradedObject::new(t.clone(), 0));
        c.push(1, GradedObject::new(t.clone(), 0));
        c.set_entry(0, 0, 0, CobMorphism::identity(&t).neg());
        let (s, sdr) = simplify_with_sdr(&c);
        assert!(s.is_zero());
        sdr.verify(&c, &s).unwrap();
    }

    #[test]
    fn zigzag_retracts() {
        // two identity pivots joined by a dot
        let t = FlatTangle::identity(1);
        let mut c = Complex::square(1);
        c.push(0, GradedObject::new(t.clone(), 0));
        c.push(0, GradedObject::new(t.clone(), 2));
        c.push(1, GradedObject::new(t.clone(), 0));
        c.push(1, GradedObject::new(t.clone(), 2));
        c.set_entry(0, 0, 0, CobMorphism::identity(&t));
        c.set_entry(0, 0, 1, CobMorphism::dotted_identity(&t, 0));
        c.set_entry(0, 1, 1, CobMorphism::identity(&t));
        c.check().unwrap();
        let (s, sdr) = simplify_with_sdr(&c);
        assert!(s.is_zero());
        sdr.verify(&c, &s).unwrap();
    }
}
