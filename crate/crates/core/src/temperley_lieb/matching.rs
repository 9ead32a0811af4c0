//! Crossingless matchings between `bot` points below and `top` points above.
//!
//! Boundary points are numbered bottom `0..bot` left to right, then top
//! `bot..bot+top` left to right. The pairing is a fixed-point-free
//! involution stored as `pairs[p] = partner`.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matching {
    bot: u8,
    top: u8,
    pairs: Vec<u8>,
}

/// Result of a planar operation that may create closed loops.
///
/// `circles[k]` lists the input points (in the caller's numbering of the
/// glued points) lying on the k-th new loop.
#[derive(Clone, Debug)]
pub struct Glued {
    pub matching: Matching,
    pub circles: Vec<Vec<u8>>,
}

impl Matching {
    pub fn new(bot: usize, top: usize, pairs: Vec<u8>) -> Result<Self, String> {
        let npts = bot + top;
        if pairs.len() != npts {
            return Err(format!("expected {} boundary points, got {}", npts, pairs.len()));
        }
        for (p, &q) in pairs.iter().enumerate() {
            let q = q as usize;
            if q >= npts || q == p || pairs[q] as usize != p {
                return Err(format!("pairing is not a fixed-point-free involution at point {}", p));
            }
        }
        let m = Matching { bot: bot as u8, top: top as u8, pairs };
        if !m.is_planar() {
            return Err("matching is not planar".into());
        }
        Ok(m)
    }

    /// Square matching from an involution on `2n` points.
    pub fn square(pairs: Vec<u8>) -> Result<Self, String> {
        if pairs.len() % 2 != 0 {
            return Err("odd number of boundary points".into());
        }
        let n = pairs.len() / 2;
        Self::new(n, n, pairs)
    }

    pub fn identity(n: usize) -> Self {
        let mut pairs = vec![0u8; 2 * n];
        for i in 0..n {
            pairs[i] = (n + i) as u8;
            pairs[n + i] = i as u8;
        }
        Matching { bot: n as u8, top: n as u8, pairs }
    }

    /// Turnback `e_i` (1-based) in the square algebra on `n` strands.
    pub fn e(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i < n, "e_{} needs 1 <= i < {}", i, n);
        let mut m = Self::identity(n);
        let (a, b) = (i - 1, i);
        m.pairs[a] = b as u8;
        m.pairs[b] = a as u8;
        m.pairs[n + a] = (n + b) as u8;
        m.pairs[n + b] = (n + a) as u8;
        m
    }

    /// Cups on adjacent pairs `(0,1),(2,3),…` with no bottom points.
    pub fn cups(k: usize) -> Self {
        let pairs = (0..2 * k).map(|p| (p ^ 1) as u8).collect();
        Matching { bot: 0, top: (2 * k) as u8, pairs }
    }

    /// Caps on adjacent pairs with no top points.
    pub fn caps(k: usize) -> Self {
        let pairs = (0..2 * k).map(|p| (p ^ 1) as u8).collect();
        Matching { bot: (2 * k) as u8, top: 0, pairs }
    }

    pub fn empty() -> Self {
        Matching { bot: 0, top: 0, pairs: vec![] }
    }

    pub fn bot(&self) -> usize {
        self.bot as usize
    }

    pub fn top(&self) -> usize {
        self.top as usize
    }

    pub fn is_square(&self) -> bool {
        self.bot == self.top
    }

    /// Half the number of boundary points.
    pub fn half(&self) -> usize {
        (self.bot as usize + self.top as usize) / 2
    }

    pub fn points(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[u8] {
        &self.pairs
    }

    pub fn partner(&self, p: usize) -> usize {
        self.pairs[p] as usize
    }

    pub fn is_bottom(&self, p: usize) -> bool {
        p < self.bot as usize
    }

    pub fn same_boundary(&self, other: &Matching) -> bool {
        self.bot == other.bot && self.top == other.top
    }

    /// Position in the cyclic boundary order used for planarity.
    fn cyclic_pos(&self, p: usize) -> usize {
        let b = self.bot as usize;
        if p < b {
            p
        } else {
            b + (self.pairs.len() - 1 - p)
        }
    }

    pub fn is_planar(&self) -> bool {
        let arcs: Vec<(usize, usize)> = (0..self.pairs.len())
            .filter(|&p| p < self.pairs[p] as usize)
            .map(|p| {
                let (a, b) = (self.cyclic_pos(p), self.cyclic_pos(self.pairs[p] as usize));
                (a.min(b), a.max(b))
            })
            .collect();
        for (i, &(a, b)) in arcs.iter().enumerate() {
            for &(c, d) in &arcs[i + 1..] {
                if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                    return false;
                }
            }
        }
        true
    }

    /// Number of arcs joining a bottom point to a top point.
    pub fn through_degree(&self) -> usize {
        (0..self.bot as usize).filter(|&p| self.pairs[p] >= self.bot).count()
    }

    /// Stack `self` on top of `lower`. Loops are reported by the middle
    /// points they pass through (middle point `k` is `lower`'s top point k).
    pub fn stack_on(&self, lower: &Matching) -> Glued {
        assert_eq!(self.bot, lower.top, "stacking needs matching boundary counts");
        let (lb, m, ut) = (lower.bot as usize, lower.top as usize, self.top as usize);
        let npts = lb + ut;
        let mut pairs = vec![u8::MAX; npts];
        let mut seen_mid = vec![false; m];
        // walk from a point of the result to its partner
        let walk = |start_lower: bool, idx: usize, seen: &mut Vec<bool>| -> usize {
            let (mut in_lower, mut p) = (start_lower, idx);
            loop {
                if in_lower {
                    let q = lower.pairs[p] as usize;
                    if q < lb {
                        return q;
                    }
                    let k = q - lb;
                    seen[k] = true;
                    in_lower = false;
                    p = k;
                } else {
                    let q = self.pairs[p] as usize;
                    if q >= m {
                        return lb + (q - m);
                    }
                    seen[q] = true;
                    in_lower = true;
                    p = lb + q;
                }
            }
        };
        for i in 0..lb {
            if pairs[i] == u8::MAX {
                let j = walk(true, i, &mut seen_mid);
                pairs[i] = j as u8;
                pairs[j] = i as u8;
            }
        }
        for j in 0..ut {
            let r = lb + j;
            if pairs[r] == u8::MAX {
                let k = walk(false, m + j, &mut seen_mid);
                pairs[r] = k as u8;
                pairs[k] = r as u8;
            }
        }
        let mut circles = Vec::new();
        for k0 in 0..m {
            if seen_mid[k0] {
                continue;
            }
            let mut pts = vec![];
            let mut k = k0;
            loop {
                seen_mid[k] = true;
                pts.push(k as u8);
                let a = self.pairs[k] as usize; // upper bottom k -> upper bottom a
                seen_mid[a] = true;
                pts.push(a as u8);
                let b = lower.pairs[lb + a] as usize - lb;
                if b == k0 {
                    break;
                }
                k = b;
            }
            pts.sort_unstable();
            pts.dedup();
            circles.push(pts);
        }
        Glued { matching: Matching { bot: lb as u8, top: ut as u8, pairs }, circles }
    }

    /// Close the rightmost bottom point to the rightmost top point.
    /// A loop, if formed, is reported by the old point `bot-1`.
    /// Also returns the old index of each new point.
    pub fn partial_trace(&self) -> (Glued, Vec<u8>) {
        let (b, t) = (self.bot as usize, self.top as usize);
        assert!(b >= 1 && t >= 1, "partial trace needs a strand to close");
        let (c1, c2) = (b - 1, b + t - 1);
        let old_of_new: Vec<u8> = (0..b - 1).chain(b..b + t - 1).map(|p| p as u8).collect();
        let mut new_of_old = vec![u8::MAX; b + t];
        for (nw, &old) in old_of_new.iter().enumerate() {
            new_of_old[old as usize] = nw as u8;
        }
        let mut pairs = vec![0u8; b + t - 2];
        for (nw, &old) in old_of_new.iter().enumerate() {
            let mut q = self.pairs[old as usize] as usize;
            if q == c1 {
                q = self.pairs[c2] as usize;
            } else if q == c2 {
                q = self.pairs[c1] as usize;
            }
            pairs[nw] = new_of_old[q];
        }
        let circles = if self.pairs[c1] as usize == c2 { vec![vec![c1 as u8]] } else { vec![] };
        let m = Matching { bot: (b - 1) as u8, top: (t - 1) as u8, pairs };
        (Glued { matching: m, circles }, old_of_new)
    }

    /// Horizontal juxtaposition `self ⊔ other` (other to the right).
    pub fn juxtapose(&self, other: &Matching) -> Matching {
        let map_a = |p: usize| self.juxt_map(other, p, true);
        let map_b = |p: usize| self.juxt_map(other, p, false);
        let npts = self.pairs.len() + other.pairs.len();
        let mut pairs = vec![0u8; npts];
        for p in 0..self.pairs.len() {
            pairs[map_a(p)] = map_a(self.pairs[p] as usize) as u8;
        }
        for p in 0..other.pairs.len() {
            pairs[map_b(p)] = map_b(other.pairs[p] as usize) as u8;
        }
        Matching { bot: self.bot + other.bot, top: self.top + other.top, pairs }
    }

    /// Index in `self ⊔ other` of point `p` of the left (`left = true`) or
    /// right factor.
    pub fn juxt_map(&self, other: &Matching, p: usize, left: bool) -> usize {
        let (ab, at, bb) = (self.bot as usize, self.top as usize, other.bot as usize);
        let nb = ab + bb;
        if left {
            if p < ab {
                p
            } else {
                nb + (p - ab)
            }
        } else if p < bb {
            ab + p
        } else {
            nb + at + (p - bb)
        }
    }

    /// Top-bottom mirror image; point `p` goes to `mirror_point(p)`.
    pub fn mirror(&self) -> Matching {
        let mut pairs = vec![0u8; self.pairs.len()];
        for p in 0..self.pairs.len() {
            pairs[self.mirror_point(p)] = self.mirror_point(self.pairs[p] as usize) as u8;
        }
        Matching { bot: self.top, top: self.bot, pairs }
    }

    pub fn mirror_point(&self, p: usize) -> usize {
        let (b, t) = (self.bot as usize, self.top as usize);
        if p < b {
            t + p
        } else {
            p - b
        }
    }

    /// Rotation by a half turn in the plane.
    pub fn rotate(&self) -> Matching {
        let mut pairs = vec![0u8; self.pairs.len()];
        for p in 0..self.pairs.len() {
            pairs[self.rotate_point(p)] = self.rotate_point(self.pairs[p] as usize) as u8;
        }
        Matching { bot: self.top, top: self.bot, pairs }
    }

    pub fn rotate_point(&self, p: usize) -> usize {
        let (b, t) = (self.bot as usize, self.top as usize);
        if p < b {
            t + (b - 1 - p)
        } else {
            t - 1 - (p - b)
        }
    }

    /// All crossingless matchings on `n` strands (square), in sorted order.
    pub fn all_square(n: usize) -> Vec<Matching> {
        fn rec(pairs: &mut Vec<u8>, n: usize, out: &mut Vec<Matching>) {
            let Some(first) = pairs.iter().position(|&q| q == u8::MAX) else {
                let m = Matching { bot: n as u8, top: n as u8, pairs: pairs.clone() };
                if m.is_planar() {
                    out.push(m);
                }
                return;
            };
            for j in first + 1..pairs.len() {
                if pairs[j] == u8::MAX {
                    pairs[first] = j as u8;
                    pairs[j] = first as u8;
                    rec(pairs, n, out);
                    pairs[first] = u8::MAX;
                    pairs[j] = u8::MAX;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut vec![u8::MAX; 2 * n], n, &mut out);
        out.sort();
        out
    }
}

impl fmt::Debug for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}x{}{:?}", self.bot, self.top, self.pairs)
    }
}

/// Closed curves of `a ∪ b` for two matchings on the same boundary,
/// each as its sorted point set, ordered by smallest point.
pub fn glue_curves(a: &Matching, b: &Matching) -> Vec<Vec<u8>> {
    assert!(a.same_boundary(b), "curves need equal boundaries");
    let npts = a.points();
    let mut seen = vec![false; npts];
    let mut out = Vec::new();
    for s in 0..npts {
        if seen[s] {
            continue;
        }
        let mut cur = vec![];
        let mut p = s;
        loop {
            seen[p] = true;
            cur.push(p as u8);
            let q = a.partner(p);
            seen[q] = true;
            cur.push(q as u8);
            p = b.partner(q);
            if p == s {
                break;
            }
        }
        cur.sort_unstable();
        out.push(cur);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| Matching::all_square(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 14, 42]);
    }

    #[test]
    fn e1e2e1() {
        let e1 = Matching::e(3, 1);
        let e2 = Matching::e(3, 2);
        let g = e1.stack_on(&e2);
        assert!(g.circles.is_empty());
        let h = g.matching.stack_on(&e1);
        assert!(h.circles.is_empty());
        assert_eq!(h.matching, e1);
        assert_eq!(e1.stack_on(&e1).circles.len(), 1);
    }

    #[test]
    fn traces() {
        let (g, _) = Matching::identity(1).partial_trace();
        assert_eq!(g.circles.len(), 1);
        let (g, _) = Matching::e(2, 1).partial_trace();
        assert!(g.circles.is_empty());
        assert_eq!(g.matching, Matching::identity(1));
    }

    #[test]
    fn curve_counts() {
        let id = Matching::identity(2);
        let e = Matching::e(2, 1);
        assert_eq!(glue_curves(&id, &id).len(), 2);
        assert_eq!(glue_curves(&e, &e).len(), 2);
        assert_eq!(glue_curves(&e, &id).len(), 1);
    }
}
