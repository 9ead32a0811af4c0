//! Convolutions of finite sequences of complexes.
//!
//! A sequence `E_0 → E_1 → ⋯` with degree-zero maps `α_t` is assembled into
//! one complex whose differential is lower triangular: `(−1)^{p_t} d_{E_t}`
//! on the diagonal, `α_t` below it, and correction terms of length `ℓ ≥ 2`
//! (internal degree `1 − ℓ`). Those are found one source term at a time, right
//! to left, as a single integer linear system per term.

use super::hom::{hom_complex, HomWindow};
use super::ops::truncate_below;
use super::{differential_map, ChainMap, Complex};
use crate::error::{Error, Result};
use crate::homology::solve;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;

/// Input for [`convolution_complete`]. Term `t` sits at position `start + t`.
#[derive(Clone, Debug)]
pub struct ConvolutionData {
    pub terms: Vec<Complex>,
    pub start: i32,
    /// `maps[t]: E_t → E_{t+1}`, degree `(0, 0)` chain maps.
    pub maps: Vec<ChainMap>,
    /// Lowest total degree to keep when some term is truncated.
    pub floor: Option<i32>,
}

/// The assembled complex and, per term, the offset of its internal degree
/// `k` objects within total degree `start + t + k`.
#[derive(Clone, Debug)]
pub struct Convolution {
    pub complex: Complex,
    pub offsets: Vec<BTreeMap<i32, usize>>,
    /// The terms as actually used (after truncation at the floor).
    pub terms: Vec<Complex>,
    /// Components `(s, t) → d_{ts}`, keyed by source and target term.
    pub components: BTreeMap<(usize, usize), ChainMap>,
}

fn sgn(p: i32) -> i64 {
    if p.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn restrict_map(f: &ChainMap, a: &Complex, b: &Complex) -> ChainMap {
    let mut out = ChainMap::new(f.hdeg, f.qdeg);
    for (k, m) in &f.comps {
        let (ra, rb) = (a.rank(*k), b.rank(k + f.hdeg));
        if ra == 0 || rb == 0 {
            continue;
        }
        let m: super::Mat = m.iter().filter(|((r, c), _)| *r < rb && *c < ra).map(|(k, v)| (*k, v.clone())).collect();
        if !m.is_empty() {
            out.comps.insert(*k, m);
        }
    }
    out
}

/// Solve for the higher components and assemble the total complex.
pub fn convolution_complete(data: &ConvolutionData) -> Result<Convolution> {
    let n = data.terms.len();
    if data.maps.len() + 1 != n && !(n == 0 && data.maps.is_empty()) {
        return Err(Error::Invalid(format!("{} terms need {} maps, got {}", n, n.saturating_sub(1), data.maps.len())));
    }
    let p = |t: usize| data.start + t as i32;
    let truncated = data.terms.iter().any(|e| e.trunc().is_some());
    let floor = match (data.floor, truncated) {
        (Some(v), _) => Some(v),
        (None, false) => None,
        (None, true) => return Err(Error::Window("truncated terms need a floor".into())),
    };
    let mut terms = vec![];
    for (t, e) in data.terms.iter().enumerate() {
        match floor {
            Some(v) => {
                if let Some(tt) = e.trunc() {
                    if v - p(t) < tt {
                        return Err(Error::Window(format!(
                            "term {} is only exact from internal degree {}, floor needs {}",
                            t,
                            tt,
                            v - p(t)
                        )));
                    }
                }
                terms.push(truncate_below(e, v - p(t)));
            }
            None => terms.push(e.clone()),
        }
    }
    for (t, a) in data.maps.iter().enumerate() {
        if a.hdeg != 0 || a.qdeg != 0 {
            return Err(Error::Degree(format!("map {} has bidegree ({}, {})", t, a.hdeg, a.qdeg)));
        }
        a.check_degrees(&data.terms[t], &data.terms[t + 1])?;
    }
    // lay out every term inside the total complex
    let first = terms.first();
    let (bot, top) = first.map_or((0, 0), |e| (e.bot(), e.top()));
    let mut out = Complex::new(bot, top);
    let mut offsets: Vec<BTreeMap<i32, usize>> = vec![BTreeMap::new(); n];
    for (t, e) in terms.iter().enumerate() {
        for (k, v) in e.degrees() {
            let h = p(t) + k;
            offsets[t].insert(k, out.rank(h));
            for o in v {
                out.push(h, o.clone());
            }
        }
    }
    // term t placed at total degrees, with its signed differential
    let placed = |t: usize| -> Complex {
        let e = &terms[t];
        let mut c = Complex::new(e.bot(), e.top());
        for (k, v) in e.degrees() {
            for o in v {
                c.push(p(t) + k, o.clone());
            }
        }
        for (k, m) in e.diffs() {
            for ((r, col), f) in m {
                c.add_entry(p(t) + k, *r, *col, f.scale_i64(sgn(p(t))));
            }
        }
        c
    };
    let owner = |h: i32, idx: usize| -> usize {
        (0..n).rev().find(|&t| offsets[t].get(&(h - p(t))).map_or(false, |&o| o <= idx)).unwrap_or(0)
    };
    let mut comps: BTreeMap<(usize, usize), ChainMap> = BTreeMap::new();
    // Working from the right, the part of the differential leaving term s is
    // a degree-1 cycle into everything to its right; its components of length
    // two or more are solved for together.
    for s in (0..n).rev() {
        let es = placed(s);
        for (h, m) in es.diffs() {
            for ((r, c), f) in m {
                out.add_entry(h, offsets[s][&(h + 1 - p(s))] + r, offsets[s][&(h - p(s))] + c, f.clone());
            }
        }
        comps.insert((s, s), shift_map(&differential_map(&es), -p(s)));
        if s + 1 == n {
            continue;
        }
        let a = restrict_map(&data.maps[s], &terms[s], &terms[s + 1]);
        comps.insert((s, s + 1), a.clone());
        let mut g = ChainMap::new(1, 0);
        for (k, m) in &a.comps {
            let Some(&or) = offsets[s + 1].get(k) else {
                continue;
            };
            for ((r, c), f) in m {
                g.add_entry(p(s) + k, or + r, *c, f.clone());
            }
        }
        let rhs = g.boundary(&es, &out).scale(-1);
        if !rhs.is_zero() {
            let (z, basis) = hom_complex(&es, &out, HomWindow { h: Some((1, 1)), q: Some((0, 0)) })?;
            let obstruction = |msg: &str| Error::Obstruction {
                h: 2,
                q: 0,
                src: p(s),
                tgt: p(n - 1),
                msg: msg.to_string(),
            };
            let b = basis.vector_of(&rhs).ok_or_else(|| obstruction("obstruction leaves the generator window"))?;
            let gens = basis.gens.get(&(1, 0)).cloned().unwrap_or_default();
            let free: Vec<usize> = (0..gens.len()).filter(|&i| owner(gens[i].k + 1, gens[i].y) >= s + 2).collect();
            if free.is_empty() {
                return Err(obstruction("no degree-matching homotopies exist"));
            }
            let full = z.dense(1, 0);
            let mat: Vec<Vec<BigInt>> = full.iter().map(|row| free.iter().map(|&i| row[i].clone()).collect()).collect();
            let x = solve(&mat, &b).ok_or_else(|| obstruction("system has no integer solution"))?;
            let mut v = vec![BigInt::zero(); gens.len()];
            for (&i, xi) in free.iter().zip(x) {
                v[i] = xi;
            }
            let hmap = basis.map_of(&es, &out, 1, 0, &v);
            for (t, f) in split_by_term(&hmap, s, &offsets, &owner, &p) {
                comps.insert((s, t), f);
            }
            g = g.add(&hmap);
        }
        for (h, m) in &g.comps {
            for ((r, c), f) in m {
                out.add_entry(*h, *r, offsets[s][&(h - p(s))] + c, f.clone());
            }
        }
    }
    out.tidy();
    out.set_trunc(floor);
    Ok(Convolution { complex: out, offsets, terms, components: comps })
}

fn shift_map(f: &ChainMap, by: i32) -> ChainMap {
    let mut out = ChainMap::new(f.hdeg, f.qdeg);
    for (k, m) in &f.comps {
        out.comps.insert(k + by, m.clone());
    }
    out
}

/// Break a map from placed term `s` into the total complex into its
/// components per target term, in internal degrees.
fn split_by_term(
    f: &ChainMap,
    s: usize,
    offsets: &[BTreeMap<i32, usize>],
    owner: &dyn Fn(i32, usize) -> usize,
    p: &dyn Fn(usize) -> i32,
) -> BTreeMap<usize, ChainMap> {
    let mut out: BTreeMap<usize, ChainMap> = BTreeMap::new();
    for (h, m) in &f.comps {
        for ((r, c), g) in m {
            let t = owner(h + 1, *r);
            let kt = h + 1 - p(t);
            let row = r - offsets[t][&kt];
            let hd = p(s) + 1 - p(t);
            out.entry(t).or_insert_with(|| ChainMap::new(hd, 0)).add_entry(h - p(s), row, *c, g.clone());
        }
    }
    out
}
