//! Colored, framed, marked braid closures: cabling, the bracket with
//! quasi-projectors at the marks, and the resulting link homology.

mod orient;

use crate::complexes::{partial_trace, shift, simplify, tensor, Complex};
use crate::error::{Error, Result};
use crate::homology::{closed_homology, poincare_polynomial, BigradedGroups, Field, Poly2};
use crate::projectors::{khovanov_bracket, quasi_projector, QuasiProjectorSpec, Slice};
use num_bigint::BigInt;
use orient::{Elem, Word};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub use orient::orient_word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Braid {
    pub strands: usize,
    /// Signed 1-based generator indices; `-i` is `σ_i⁻¹`.
    pub word: Vec<i32>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Closure {
    #[default]
    Trace,
    Plat,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyEntry {
    #[serde(default)]
    pub indices: Vec<usize>,
}

/// A link given as a braid closure. Per-component lists follow the order
/// of each component's leftmost strand at the bottom of the braid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoredDiagram {
    pub braid: Braid,
    #[serde(default)]
    pub closure: Closure,
    pub colors: Vec<usize>,
    /// Empty means all zero.
    #[serde(default)]
    pub framings: Vec<i32>,
    /// Empty means one mark per component.
    #[serde(default)]
    pub marks: Vec<usize>,
    /// Keyed by color; a missing color gets the plain projector.
    #[serde(default)]
    pub family: BTreeMap<String, FamilyEntry>,
    /// Components whose orientation is reversed; empty means none.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reversed: Vec<bool>,
}

/// Options for a bracket computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BracketOptions {
    /// Truncation window for complexes of infinite length.
    pub window: i32,
    /// Abort once an intermediate complex has more objects than this.
    pub ceiling: Option<usize>,
}

impl Default for BracketOptions {
    fn default() -> Self {
        BracketOptions { window: 12, ceiling: None }
    }
}

struct Layout {
    /// Component of each strand at the bottom of the braid.
    bottom: Vec<usize>,
    count: usize,
    /// Self-crossing sign sum of each component.
    writhe: Vec<i32>,
}

impl ColoredDiagram {
    /// The unknot as the closure of the trivial one-strand braid.
    pub fn unknot(color: usize, indices: Vec<usize>) -> Self {
        let mut family = BTreeMap::new();
        family.insert(color.to_string(), FamilyEntry { indices });
        ColoredDiagram {
            braid: Braid { strands: 1, word: vec![] },
            closure: Closure::Trace,
            colors: vec![color],
            framings: vec![0],
            marks: vec![1],
            family,
            reversed: vec![],
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: ColoredDiagram = serde_json::from_str(s).map_err(|e| Error::Parse(format!("line {} column {}: {}", e.line(), e.column(), e)))?;
        d.layout()?;
        Ok(d)
    }

    pub fn components(&self) -> Result<usize> {
        Ok(self.layout()?.count)
    }

    fn framing(&self, c: usize) -> i32 {
        self.framings.get(c).copied().unwrap_or(0)
    }

    fn mark_count(&self, c: usize) -> usize {
        self.marks.get(c).copied().unwrap_or(1)
    }

    pub fn spec_for(&self, color: usize) -> Result<QuasiProjectorSpec> {
        let indices = self.family.get(&color.to_string()).map(|e| e.indices.clone()).unwrap_or_default();
        QuasiProjectorSpec::new(color, indices)
    }

    fn layout(&self) -> Result<Layout> {
        let b = self.braid.strands;
        if b == 0 {
            return Err(Error::Invalid("a braid needs at least one strand".into()));
        }
        if self.closure == Closure::Plat && b % 2 == 1 {
            return Err(Error::Invalid("plat closure needs an even number of strands".into()));
        }
        for &g in &self.braid.word {
            if g == 0 || g.unsigned_abs() as usize >= b {
                return Err(Error::Invalid(format!("generator {} out of range for {} strands", g, b)));
            }
        }
        // strand started at bottom p sits at position arr^{-1}(p) at the top
        let mut arr: Vec<usize> = (0..b).collect();
        for &g in &self.braid.word {
            let i = g.unsigned_abs() as usize;
            arr.swap(i - 1, i);
        }
        let mut top_of = vec![0; b];
        for (pos, &s) in arr.iter().enumerate() {
            top_of[s] = pos;
        }
        let mut parent: Vec<usize> = (0..b).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let union = |p: &mut Vec<usize>, a: usize, c: usize| {
            let (ra, rc) = (find(p, a), find(p, c));
            if ra != rc {
                p[ra.max(rc)] = ra.min(rc);
            }
        };
        match self.closure {
            Closure::Trace => {
                for s in 0..b {
                    union(&mut parent, s, top_of[s]);
                }
            }
            Closure::Plat => {
                for s in (0..b).step_by(2) {
                    union(&mut parent, s, s + 1);
                    union(&mut parent, arr[s], arr[s + 1]);
                }
            }
        }
        let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
        let mut bottom = vec![0; b];
        for s in 0..b {
            let r = find(&mut parent, s);
            let next = ids.len();
            bottom[s] = *ids.entry(r).or_insert(next);
        }
        let count = ids.len();
        if self.colors.len() != count {
            return Err(Error::Invalid(format!("{} components but {} colors", count, self.colors.len())));
        }
        if self.colors.iter().any(|&c| c == 0) {
            return Err(Error::Invalid("colors must be positive".into()));
        }
        if !self.framings.is_empty() && self.framings.len() != count {
            return Err(Error::Invalid(format!("{} components but {} framings", count, self.framings.len())));
        }
        if !self.marks.is_empty() && self.marks.len() != count {
            return Err(Error::Invalid(format!("{} components but {} mark counts", count, self.marks.len())));
        }
        if !self.reversed.is_empty() && self.reversed.len() != count {
            return Err(Error::Invalid(format!("{} components but {} orientation flags", count, self.reversed.len())));
        }
        if self.marks.iter().any(|&m| m == 0) {
            return Err(Error::Invalid("every component needs at least one marked point".into()));
        }
        // blackboard framing of each component from the uncabled diagram
        let core = self.word_for(&bottom, &vec![1; count], &vec![0; count], false)?;
        let (_, crossings) = orient_word(&core)?;
        let mut writhe = vec![0; count];
        for x in crossings {
            if let (Some(a), Some(c)) = (x.left_tag, x.right_tag) {
                if a == c {
                    writhe[a] += x.sign;
                }
            }
        }
        Ok(Layout { bottom, count, writhe })
    }

    /// The cabled word: plat cups, cabled braid, marks, framing twists,
    /// plat caps. `twists[c]` full twists go on the cable of component `c`.
    fn word_for(&self, bottom: &[usize], widths: &[usize], twists: &[i32], with_marks: bool) -> Result<Word> {
        let b = self.braid.strands;
        let mut comp = bottom.to_vec();
        let cable_start = |comp: &[usize], p: usize| -> usize { comp[..p].iter().map(|&c| widths[c]).sum() };
        let total: usize = comp.iter().map(|&c| widths[c]).sum();
        let mut w = Word::new(if self.closure == Closure::Trace { total } else { 0 });
        if self.closure == Closure::Plat {
            let mut left = 0;
            for s in (0..b).step_by(2) {
                let a = widths[comp[s]];
                for j in 0..a {
                    w.slice(left + j, Elem::Cup, j);
                }
                left += 2 * a;
            }
        }
        // orientation seeds at the bottom of the braid
        let base = w.level();
        let mut seen = vec![false; widths.len()];
        for p in 0..b {
            let c = comp[p];
            let start = cable_start(&comp, p);
            for j in 0..widths[c] {
                w.tag(base, start + j, c);
            }
            if !seen[c] {
                seen[c] = true;
                let flip = self.reversed.get(c).copied().unwrap_or(false);
                for j in 0..widths[c] {
                    w.seed(base, start + j, (j % 2 == 0) != flip);
                }
            }
        }
        for &g in &self.braid.word {
            let i = g.unsigned_abs() as usize - 1;
            let inverse = g < 0;
            let (ca, cb) = (widths[comp[i]], widths[comp[i + 1]]);
            let start = cable_start(&comp, i);
            for k in (0..ca).rev() {
                for m in 0..cb {
                    let at = start + k + m;
                    w.slice(at, Elem::Cross(inverse), w.width() - at - 2);
                }
            }
            comp.swap(i, i + 1);
        }
        let first_pos = |c: usize| comp.iter().position(|&x| x == c);
        if with_marks {
            for c in 0..widths.len() {
                let Some(p) = first_pos(c) else { continue };
                let start = cable_start(&comp, p);
                let a = widths[c];
                for _ in 0..self.mark_count(c) {
                    w.slice(start, Elem::Box(box_name(a), a), w.width() - start - a);
                }
            }
        }
        for c in 0..widths.len() {
            let Some(p) = first_pos(c) else { continue };
            let start = cable_start(&comp, p);
            let a = widths[c];
            for _ in 0..twists[c].unsigned_abs() {
                full_twist(&mut w, start, a, twists[c] < 0);
            }
        }
        if self.closure == Closure::Plat {
                for s in (0..b).step_by(2).rev() {
                let a = widths[comp[s]];
                let left = cable_start(&comp, s);
                for j in 0..a {
                    w.slice(left + a - 1 - j, Elem::Cap, a - 1 - j);
                }
            }
        } else {
            w.trace = true;
        }
        Ok(w)
    }

    /// The cabled tangle word with crossing signs resolved.
    pub fn cable(&self) -> Result<Vec<Slice>> {
        let lay = self.layout()?;
        let twists: Vec<i32> = (0..lay.count).map(|c| self.framing(c) - lay.writhe[c]).collect();
        let word = self.word_for(&lay.bottom, &self.colors, &twists, true)?;
        Ok(orient_word(&word)?.0)
    }

    /// Blackboard framing of each component.
    pub fn writhes(&self) -> Result<Vec<i32>> {
        Ok(self.layout()?.writhe)
    }
}

fn box_name(color: usize) -> String {
    format!("K{}", color)
}

/// `(σ_1 ⋯ σ_{a−1})^a` on the strands `start..start + a`, or its inverse.
fn full_twist(w: &mut Word, start: usize, a: usize, inverse: bool) {
    for _ in 0..a {
        let steps: Vec<usize> = if inverse { (0..a.saturating_sub(1)).rev().collect() } else { (0..a.saturating_sub(1)).collect() };
        for i in steps {
            let at = start + i;
            w.slice(at, Elem::Cross(inverse), w.width() - at - 2);
        }
    }
}

/// The quasi-projector complexes for every color of `d`.
fn boxes(d: &ColoredDiagram, window: i32) -> Result<BTreeMap<String, Complex>> {
    let mut out = BTreeMap::new();
    for &c in &d.colors {
        if out.contains_key(&box_name(c)) {
            continue;
        }
        if c > 3 {
            return Err(Error::Invalid(format!("no projector model for color {}", c)));
        }
        let spec = d.spec_for(c)?;
        out.insert(box_name(c), quasi_projector(&spec, window)?);
    }
    Ok(out)
}

/// Close the rightmost strand until nothing is left, simplifying between steps.
pub fn trace_closure(c: &Complex, ceiling: Option<usize>) -> Result<Complex> {
    let mut acc = c.clone();
    while acc.top() > 0 {
        acc = simplify(&partial_trace(&acc)?);
        if let Some(limit) = ceiling {
            if acc.total_objects() > limit {
                return Err(Error::Ceiling(acc.total_objects(), limit));
            }
        }
    }
    Ok(acc)
}

/// `⟦D; 𝒦⟧`, a complex over the empty boundary.
pub fn bracket_colored(d: &ColoredDiagram, opts: BracketOptions) -> Result<Complex> {
    let slices = d.cable()?;
    let boxes = boxes(d, opts.window)?;
    let c = khovanov_bracket(&slices, &boxes, opts.ceiling)?;
    match d.closure {
        Closure::Trace => trace_closure(&c, opts.ceiling),
        Closure::Plat => Ok(c),
    }
}

/// `H(HOM(∅, ⟦D; 𝒦⟧))`, restricted to degrees unaffected by truncation.
pub fn link_homology(d: &ColoredDiagram, opts: BracketOptions) -> Result<BigradedGroups> {
    closed_homology(&bracket_colored(d, opts)?)
}

/// `G_n` as `(t, q)` exponents.
pub fn framing_shift(n: usize) -> (i32, i32) {
    let n = n as i32;
    if n % 2 == 0 {
        (n * n / 2, -(n * n + 2 * n) / 2)
    } else {
        ((n * n - 1) / 2, -(n * n + 2 * n - 3) / 2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramingReport {
    pub n: usize,
    pub expected: (i32, i32),
    /// The shift relating the twisted complex to `K_n`, if there is one.
    pub observed: Option<(i32, i32)>,
}

impl FramingReport {
    pub fn passed(&self) -> bool {
        self.observed == Some(self.expected)
    }
}

/// The shift `(i, j)` with `ranks(a) = ranks(t^i q^j b)` from `from` up, if any.
pub fn relative_shift(a: &Complex, b: &Complex, from: i32) -> Option<(i32, i32)> {
    let (ha, hb) = (a.hmax()?, b.hmax()?);
    let i = ha - hb;
    let qa = a.objects(ha).iter().map(|o| o.q).min()?;
    let qb = b.objects(hb).iter().map(|o| o.q).min()?;
    let j = qa - qb;
    let s = shift(b, i, j);
    if a.graded_ranks_from(from) == s.graded_ranks_from(from) {
        Some((i, j))
    } else {
        None
    }
}

/// Compare `⟦Tw_n⟧ ⊗ K_n` with `G_n K_n`. For `n = 1` the twist is a
/// positive curl.
pub fn framing_check(n: usize, spec: &QuasiProjectorSpec, window: i32) -> Result<FramingReport> {
    if n == 0 || n > 3 || spec.n != n {
        return Err(Error::Invalid(format!("framing check needs 1 <= n <= 3 and a projector on n strands, got n = {}", n)));
    }
    let k = quasi_projector(spec, window)?;
    let word = if n == 1 { positive_curl() } else { twist_word(n) };
    let (slices, _) = orient_word(&word)?;
    let tw = khovanov_bracket(&slices, &BTreeMap::new(), None)?;
    let s = simplify(&tensor(&tw, &k)?);
    let from = s.valid_from().unwrap_or(i32::MIN).max(k.valid_from().unwrap_or(i32::MIN) + framing_shift(n).0);
    Ok(FramingReport { n, expected: framing_shift(n), observed: relative_shift(&s, &k, from) })
}

fn twist_word(n: usize) -> Word {
    let mut w = Word::new(n);
    for j in 0..n {
        w.seed(0, j, j % 2 == 0);
    }
    full_twist(&mut w, 0, n, false);
    w
}

/// One upward strand with a positive kink on its right.
fn positive_curl() -> Word {
    let mut w = Word::new(1);
    w.seed(0, 0, true);
    w.slice(1, Elem::Cup, 0);
    w.slice(0, Elem::Cross(false), 1);
    w.slice(1, Elem::Cap, 0);
    w
}

fn common_from(a: &Complex, b: &Complex) -> Option<i32> {
    match (a.valid_from(), b.valid_from()) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergingReport {
    pub n: usize,
    pub one_mark: Poly2,
    pub two_marks: Poly2,
    pub factor: Poly2,
    /// Lowest homological degree compared, when either side is truncated.
    pub from: Option<i32>,
    pub passed: bool,
}

/// `f(q, t) = Π (1 + t^{1−2i} q^{2i})`.
pub fn merging_factor(spec: &QuasiProjectorSpec) -> Poly2 {
    let mut f = Poly2::one();
    for &i in &spec.indices {
        let i = i as i32;
        let mut g = Poly2::one();
        g.add_term(1 - 2 * i, 2 * i, BigInt::from(1));
        f = f.mul(&g);
    }
    f
}

fn poly_restrict(p: &Poly2, lo: i32) -> Poly2 {
    let mut out = Poly2::default();
    for (&(t, q), c) in &p.terms {
        if t >= lo {
            out.add_term(t, q, c.clone());
        }
    }
    out
}

/// The colored unknot with two marks against one mark.
pub fn merging_check(n: usize, spec: &QuasiProjectorSpec, window: i32) -> Result<MergingReport> {
    if n == 0 || n > 3 || spec.n != n {
        return Err(Error::Invalid(format!("merging check needs 1 <= n <= 3 and a projector on n strands, got n = {}", n)));
    }
    let one = ColoredDiagram::unknot(n, spec.indices.clone());
    let mut two = one.clone();
    two.marks = vec![2];
    let opts = BracketOptions { window, ceiling: None };
    let c1 = bracket_colored(&one, opts)?;
    let c2 = bracket_colored(&two, opts)?;
    let from = common_from(&c1, &c2);
    let p1 = poincare_polynomial(&closed_homology(&c1)?, Field::Rationals);
    let p2 = poincare_polynomial(&closed_homology(&c2)?, Field::Rationals);
    let factor = merging_factor(spec);
    let lo = from.unwrap_or(i32::MIN);
    let lhs = poly_restrict(&p2, lo);
    let rhs = poly_restrict(&factor.mul(&p1), lo);
    Ok(MergingReport { n, passed: lhs == rhs, one_mark: p1, two_marks: p2, factor, from })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceReport {
    pub first: BigradedGroups,
    pub second: BigradedGroups,
    pub from: Option<i32>,
    pub equal: bool,
}

/// Homology of two presentations, compared where both are exact.
pub fn invariance_spotcheck(d1: &ColoredDiagram, d2: &ColoredDiagram, opts: BracketOptions) -> Result<InvarianceReport> {
    let c1 = bracket_colored(d1, opts)?;
    let c2 = bracket_colored(d2, opts)?;
    let from = common_from(&c1, &c2);
    let lo = from.unwrap_or(i32::MIN);
    let g1 = closed_homology(&c1)?.restrict(lo, i32::MAX);
    let g2 = closed_homology(&c2)?.restrict(lo, i32::MAX);
    Ok(InvarianceReport { equal: g1 == g2, first: g1, second: g2, from })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(strands: usize, word: Vec<i32>, closure: Closure, colors: Vec<usize>) -> ColoredDiagram {
        ColoredDiagram { braid: Braid { strands, word }, closure, colors, framings: vec![], marks: vec![], family: BTreeMap::new(), reversed: vec![] }
    }

    #[test]
    fn components_of_closures() {
        assert_eq!(diagram(2, vec![1], Closure::Trace, vec![1]).components().unwrap(), 1);
        assert_eq!(diagram(2, vec![1, 1], Closure::Trace, vec![1, 1]).components().unwrap(), 2);
        assert_eq!(diagram(2, vec![1, -1], Closure::Plat, vec![1]).components().unwrap(), 1);
        assert_eq!(diagram(3, vec![1, 2], Closure::Trace, vec![1]).components().unwrap(), 1);
    }

    #[test]
    fn writhe_of_trefoil() {
        assert_eq!(diagram(2, vec![1, 1, 1], Closure::Trace, vec![1]).writhes().unwrap(), vec![3]);
        assert_eq!(diagram(2, vec![-1], Closure::Trace, vec![1]).writhes().unwrap(), vec![-1]);
    }

    #[test]
    fn cabled_crossing_block() {
        let mut d = diagram(2, vec![1], Closure::Trace, vec![2]);
        d.framings = vec![1];
        let s = d.cable().unwrap();
        let crossings = s.iter().flatten().filter(|p| matches!(p, crate::projectors::Piece::Cross { .. })).count();
        assert_eq!(crossings, 4);
    }

    #[test]
    fn unknot_homology() {
        let d = ColoredDiagram::unknot(1, vec![]);
        let g = link_homology(&d, BracketOptions::default()).unwrap();
        assert_eq!(g.get(0, 1).rank, 1);
        assert_eq!(g.get(0, -1).rank, 1);
        assert_eq!(g.total_rank(), 2);
    }
}
