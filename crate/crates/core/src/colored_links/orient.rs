//! Tangle words built slice by slice, with crossing signs read off from
//! strand orientations.

use crate::error::{Error, Result};
use crate::projectors::{CrossingSign, Piece, Slice};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Elem {
    Cup,
    Cap,
    /// A braid generator, `true` for the inverse.
    Cross(bool),
    /// A named box and its strand count.
    Box(String, usize),
}

impl Elem {
    fn arity(&self) -> (usize, usize) {
        match self {
            Elem::Cup => (0, 2),
            Elem::Cap => (2, 0),
            Elem::Cross(_) => (2, 2),
            Elem::Box(_, a) => (*a, *a),
        }
    }
}

/// A tangle read from the bottom up. Level `k` is the boundary below slice `k`.
#[derive(Clone, Debug, Default)]
pub struct Word {
    bottom: usize,
    slices: Vec<(usize, Elem, usize)>,
    seeds: Vec<(usize, usize, bool)>,
    tags: Vec<(usize, usize, usize)>,
    /// Close by joining top point `i` to bottom point `i`.
    pub trace: bool,
}

impl Word {
    pub fn new(bottom: usize) -> Self {
        Word { bottom, ..Default::default() }
    }

    pub fn level(&self) -> usize {
        self.slices.len()
    }

    pub fn width(&self) -> usize {
        self.slices.last().map_or(self.bottom, |(l, e, r)| l + e.arity().1 + r)
    }

    pub fn slice(&mut self, left: usize, e: Elem, right: usize) {
        self.slices.push((left, e, right));
    }

    /// Fix the strand at `pos` on `level` as pointing up (or down).
    pub fn seed(&mut self, level: usize, pos: usize, up: bool) {
        self.seeds.push((level, pos, up));
    }

    /// Label the strand at `pos` on `level`; labels follow strands through crossings.
    pub fn tag(&mut self, level: usize, pos: usize, label: usize) {
        self.tags.push((level, pos, label));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossingInfo {
    /// `+1` or `−1`.
    pub sign: i32,
    pub left_tag: Option<usize>,
    pub right_tag: Option<usize>,
}

/// Union-find over orientation variables with parity; variable 0 means "up".
struct Parity {
    parent: Vec<usize>,
    flip: Vec<bool>,
}

impl Parity {
    fn new() -> Self {
        Parity { parent: vec![0], flip: vec![false] }
    }

    fn fresh(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.flip.push(false);
        self.parent.len() - 1
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        if self.parent[x] == x {
            return (x, false);
        }
        let (r, f) = self.find(self.parent[x]);
        self.parent[x] = r;
        self.flip[x] ^= f;
        (r, self.flip[x])
    }

    /// Require `value(a) ^ value(b) == differ`.
    fn unify(&mut self, a: Lit, b: Lit, differ: bool) -> Result<()> {
        let (ra, fa) = self.find(a.0);
        let (rb, fb) = self.find(b.0);
        let want = differ ^ a.1 ^ b.1;
        if ra == rb {
            if (fa ^ fb) != want {
                return Err(Error::Invalid("strand orientations are inconsistent".into()));
            }
            return Ok(());
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        self.flip[hi] = fa ^ fb ^ want;
        Ok(())
    }

    fn up(&mut self, l: Lit) -> Option<bool> {
        let (r, f) = self.find(l.0);
        (r == 0).then_some(!(f ^ l.1))
    }
}

/// A variable and whether it is negated.
type Lit = (usize, bool);

/// The slices of `w` with every crossing signed, and per-crossing data.
pub fn orient_word(w: &Word) -> Result<(Vec<Slice>, Vec<CrossingInfo>)> {
    let mut uf = Parity::new();
    let mut cur: Vec<Lit> = (0..w.bottom).map(|_| (uf.fresh(), false)).collect();
    let bottom = cur.clone();
    let mut tags: Vec<Option<usize>> = vec![None; w.bottom];
    let mut crossings: Vec<(usize, Lit, Lit, Option<usize>, Option<usize>)> = vec![];
    let apply = |level: usize, cur: &[Lit], tags: &mut Vec<Option<usize>>, uf: &mut Parity| -> Result<()> {
        for &(l, p, up) in &w.seeds {
            if l == level {
                let lit = *cur.get(p).ok_or_else(|| Error::Invalid(format!("seed position {} out of range", p)))?;
                uf.unify(lit, (0, false), !up)?;
            }
        }
        for &(l, p, t) in &w.tags {
            if l == level && p < tags.len() {
                tags[p] = Some(t);
            }
        }
        Ok(())
    };
    for (k, (left, e, right)) in w.slices.iter().enumerate() {
        apply(k, &cur, &mut tags, &mut uf)?;
        let (i, _) = e.arity();
        if left + i + right != cur.len() {
            return Err(Error::StrandMismatch(left + i + right, cur.len()));
        }
        let at = *left;
        match e {
            Elem::Cup => {
                let v = uf.fresh();
                cur.splice(at..at, [(v, false), (v, true)]);
                tags.splice(at..at, [None, None]);
            }
            Elem::Cap => {
                uf.unify(cur[at], cur[at + 1], true)?;
                cur.drain(at..at + 2);
                tags.drain(at..at + 2);
            }
            Elem::Cross(_) => {
                crossings.push((k, cur[at], cur[at + 1], tags[at], tags[at + 1]));
                cur.swap(at, at + 1);
                tags.swap(at, at + 1);
            }
            Elem::Box(..) => {}
        }
    }
    apply(w.slices.len(), &cur, &mut tags, &mut uf)?;
    if w.trace {
        if cur.len() != bottom.len() {
            return Err(Error::StrandMismatch(cur.len(), bottom.len()));
        }
        for (a, b) in cur.iter().zip(&bottom) {
            uf.unify(*a, *b, false)?;
        }
    }
    let mut signs = vec![None; w.slices.len()];
    let mut info = vec![];
    for (k, a, b, ta, tb) in crossings {
        let (Some(da), Some(db)) = (uf.up(a), uf.up(b)) else {
            return Err(Error::Invalid(format!("orientation of crossing {} is undetermined", k)));
        };
        let Elem::Cross(inv) = w.slices[k].1 else { unreachable!() };
        let mut sign = if da == db { CrossingSign::Positive } else { CrossingSign::Negative };
        if inv {
            sign = sign.flipped();
        }
        signs[k] = Some(sign);
        info.push(CrossingInfo { sign: if sign == CrossingSign::Positive { 1 } else { -1 }, left_tag: ta, right_tag: tb });
    }
    let slices = w
        .slices
        .iter()
        .enumerate()
        .map(|(k, (left, e, right))| {
            let piece = match e {
                Elem::Cup => Piece::Cup,
                Elem::Cap => Piece::Cap,
                Elem::Cross(inv) => Piece::Cross { inverse: *inv, sign: signs[k].expect("every crossing is signed") },
                Elem::Box(name, _) => Piece::Box(name.clone()),
            };
            let mut s: Slice = vec![Piece::Strand; *left];
            s.push(piece);
            s.extend(std::iter::repeat(Piece::Strand).take(*right));
            s
        })
        .collect();
    Ok((slices, info))
}
