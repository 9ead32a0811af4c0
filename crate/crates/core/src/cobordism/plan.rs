//! Gluing plans: how the disks of one or two dotted-disk morphisms merge
//! into surface components when glued, and which output curves bound each
//! component. Plans depend only on the tangles involved and are cached.

use super::{curve_data, FlatTangle};
use crate::temperley_lieb::Matching;
use num_bigint::BigInt;
use num_traits::Zero;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

#[derive(Clone, Debug)]
pub(crate) struct PlanComp {
    pub in_mask: u64,
    pub genus: u32,
    pub outs: Vec<u8>,
}

#[derive(Clone, Debug)]
pub(crate) struct Plan {
    pub comps: Vec<PlanComp>,
}

/// Incremental description of a glued surface.
pub(crate) struct PlanBuilder {
    parent: Vec<usize>,
    inputs: usize,
    chi_delta: Vec<i64>,
    out_rep: Vec<usize>,
}

impl PlanBuilder {
    /// `inputs` dot-carrying disks plus `extra` undotted disks.
    pub fn new(inputs: usize, extra: usize) -> Self {
        let nd = inputs + extra;
        assert!(inputs <= 64, "too many curves for a 64-bit dot mask");
        PlanBuilder { parent: (0..nd).collect(), inputs, chi_delta: vec![0; nd], out_rep: vec![] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Glue disks `a` and `b` along a piece of Euler characteristic `-chi`.
    pub fn glue(&mut self, a: usize, b: usize, chi_loss: i64) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.chi_delta[ra] -= chi_loss;
        if ra != rb {
            self.parent[rb] = ra;
            let moved = self.chi_delta[rb];
            self.chi_delta[ra] += moved;
            self.chi_delta[rb] = 0;
        }
    }

    pub fn output(&mut self, disk: usize) {
        self.out_rep.push(disk);
    }

    pub fn finish(mut self) -> Plan {
        let nd = self.parent.len();
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut comps: Vec<(u64, i64, Vec<u8>)> = vec![];
        for d in 0..nd {
            let r = self.find(d);
            let ci = *index.entry(r).or_insert_with(|| {
                comps.push((0, 0, vec![]));
                comps.len() - 1
            });
            if d < self.inputs {
                comps[ci].0 |= 1 << d;
            }
            comps[ci].1 += 1;
        }
        for (r, &ci) in &index {
            comps[ci].1 += self.chi_delta[*r];
        }
        for (o, &d) in self.out_rep.clone().iter().enumerate() {
            let r = self.find(d);
            comps[index[&r]].2.push(o as u8);
        }
        let comps = comps
            .into_iter()
            .map(|(in_mask, chi, outs)| {
                let twice_genus = 2 - chi - outs.len() as i64;
                assert!(
                    twice_genus >= 0 && twice_genus % 2 == 0,
                    "inconsistent surface: chi={} boundary={}",
                    chi,
                    outs.len()
                );
                PlanComp { in_mask, genus: (twice_genus / 2) as u32, outs }
            })
            .collect();
        Plan { comps }
    }
}

/// Evaluate one component with `dots` dots via the local relations.
/// Returns the dotted-disk expansions as (mask over output curves, factor).
pub(crate) fn reduce_component(dots: u32, genus: u32, outs: &[u8]) -> Vec<(u64, i64)> {
    let d = dots + genus;
    if d >= 2 {
        return vec![];
    }
    let factor = 1i64 << genus;
    let all: u64 = outs.iter().fold(0, |m, &o| m | (1 << o));
    if outs.is_empty() {
        return if d == 1 { vec![(0, factor)] } else { vec![] };
    }
    if d == 1 {
        vec![(all, factor)]
    } else {
        outs.iter().map(|&o| (all & !(1 << o), factor)).collect()
    }
}

impl Plan {
    /// Expand one combined input mask.
    pub fn expand(&self, mask: u64) -> Vec<(u64, i64)> {
        let mut acc: Vec<(u64, i64)> = vec![(0, 1)];
        for c in &self.comps {
            let dots = (mask & c.in_mask).count_ones();
            let local = reduce_component(dots, c.genus, &c.outs);
            if local.is_empty() {
                return vec![];
            }
            if local.len() == 1 {
                let (m, f) = local[0];
                for a in acc.iter_mut() {
                    a.0 |= m;
                    a.1 *= f;
                }
            } else {
                let mut next = Vec::with_capacity(acc.len() * local.len());
                for &(am, af) in &acc {
                    for &(m, f) in &local {
                        next.push((am | m, af * f));
                    }
                }
                acc = next;
            }
        }
        acc
    }

    pub fn apply1(&self, f: &BTreeMap<u64, BigInt>) -> BTreeMap<u64, BigInt> {
        let mut out = BTreeMap::new();
        for (m, c) in f {
            for (om, k) in self.expand(*m) {
                add_into(&mut out, om, c * k);
            }
        }
        out
    }

    pub fn apply2(&self, f: &BTreeMap<u64, BigInt>, shift: u32, g: &BTreeMap<u64, BigInt>) -> BTreeMap<u64, BigInt> {
        let mut out = BTreeMap::new();
        for (mf, cf) in f {
            for (mg, cg) in g {
                let mask = mf | (mg << shift);
                let ex = self.expand(mask);
                if ex.is_empty() {
                    continue;
                }
                let c = cf * cg;
                for (om, k) in ex {
                    add_into(&mut out, om, &c * k);
                }
            }
        }
        out
    }
}

pub(crate) fn add_into(map: &mut BTreeMap<u64, BigInt>, key: u64, c: BigInt) {
    if c.is_zero() {
        return;
    }
    let slot = map.entry(key).or_default();
    *slot += c;
    if slot.is_zero() {
        map.remove(&key);
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) enum PlanKey {
    Compose(FlatTangle, FlatTangle, FlatTangle),
    Stack(FlatTangle, FlatTangle, FlatTangle, FlatTangle),
    Juxt(FlatTangle, FlatTangle, FlatTangle, FlatTangle),
    Trace(FlatTangle, FlatTangle),
    Relabel(u8, FlatTangle, FlatTangle),
}

thread_local! {
    static PLANS: RefCell<HashMap<PlanKey, Rc<Plan>>> = RefCell::new(HashMap::new());
}

pub(crate) fn cached(key: PlanKey, build: impl FnOnce() -> Plan) -> Rc<Plan> {
    if let Some(p) = PLANS.with(|c| c.borrow().get(&key).cloned()) {
        return p;
    }
    let p = Rc::new(build());
    PLANS.with(|c| c.borrow_mut().insert(key, p.clone()));
    p
}

/// g∘f where f: t0 → t1 and g: t1 → t2.
pub(crate) fn compose_plan(t0: &FlatTangle, t1: &FlatTangle, t2: &FlatTangle) -> Plan {
    let cf = curve_data(t0, t1);
    let cg = curve_data(t1, t2);
    let nf = cf.count();
    let mut b = PlanBuilder::new(nf + cg.count(), 0);
    let m1 = &t1.matching;
    for p in 0..m1.points() {
        if p < m1.partner(p) {
            b.glue(cf.of_point[p] as usize, nf + cg.of_point[p] as usize, 1);
        }
    }
    for i in 0..t1.circles as usize {
        b.glue(cf.tgt_circle(i), nf + cg.src_circle(i), 0);
    }
    let out = curve_data(t0, t2);
    for c in &out.arcs {
        b.output(cf.of_point[c[0] as usize] as usize);
    }
    for i in 0..t0.circles as usize {
        b.output(cf.src_circle(i));
    }
    for i in 0..t2.circles as usize {
        b.output(nf + cg.tgt_circle(i));
    }
    b.finish()
}

/// Stacked tangle together with the middle-point representatives of its
/// new loops. Existing circles of the factors follow the new loops,
/// upper factor first.
pub(crate) fn stack_tangles(upper: &FlatTangle, lower: &FlatTangle) -> (FlatTangle, Vec<u8>) {
    let g = upper.matching.stack_on(&lower.matching);
    let reps: Vec<u8> = g.circles.iter().map(|c| c[0]).collect();
    let circles = reps.len() as u32 + upper.circles as u32 + lower.circles as u32;
    (FlatTangle { matching: g.matching, circles: circles as u8 }, reps)
}

/// f stacked on g, f: a → a2 on top of g: b → b2.
pub(crate) fn stack_plan(a: &FlatTangle, a2: &FlatTangle, bt: &FlatTangle, b2: &FlatTangle) -> Plan {
    let cf = curve_data(a, a2);
    let cg = curve_data(bt, b2);
    let nf = cf.count();
    let mut b = PlanBuilder::new(nf + cg.count(), 0);
    let mid = a.matching.bot();
    let lb = bt.matching.bot();
    for k in 0..mid {
        b.glue(cf.of_point[k] as usize, nf + cg.of_point[lb + k] as usize, 1);
    }
    let (src, src_reps) = stack_tangles(a, bt);
    let (tgt, tgt_reps) = stack_tangles(a2, b2);
    let out = curve_data(&src, &tgt);
    for c in &out.arcs {
        let p = c[0] as usize;
        if p < lb {
            b.output(nf + cg.of_point[p] as usize);
        } else {
            b.output(cf.of_point[a.matching.bot() + (p - lb)] as usize);
        }
    }
    for &k in &src_reps {
        b.output(cf.of_point[k as usize] as usize);
    }
    for i in 0..a.circles as usize {
        b.output(cf.src_circle(i));
    }
    for i in 0..bt.circles as usize {
        b.output(nf + cg.src_circle(i));
    }
    for &k in &tgt_reps {
        b.output(cf.of_point[k as usize] as usize);
    }
    for i in 0..a2.circles as usize {
        b.output(cf.tgt_circle(i));
    }
    for i in 0..b2.circles as usize {
        b.output(nf + cg.tgt_circle(i));
    }
    b.finish()
}

pub(crate) fn juxt_tangles(a: &FlatTangle, bt: &FlatTangle) -> FlatTangle {
    FlatTangle { matching: a.matching.juxtapose(&bt.matching), circles: a.circles + bt.circles }
}

/// f ⊔ g with f: a → a2 on the left.
pub(crate) fn juxt_plan(a: &FlatTangle, a2: &FlatTangle, bt: &FlatTangle, b2: &FlatTangle) -> Plan {
    let cf = curve_data(a, a2);
    let cg = curve_data(bt, b2);
    let nf = cf.count();
    let mut b = PlanBuilder::new(nf + cg.count(), 0);
    let src = juxt_tangles(a, bt);
    let tgt = juxt_tangles(a2, b2);
    let out = curve_data(&src, &tgt);
    // invert the point relabeling
    let (ma, mb) = (&a.matching, &bt.matching);
    let mut owner = vec![(false, 0usize); src.matching.points()];
    for p in 0..ma.points() {
        owner[ma.juxt_map(mb, p, true)] = (true, p);
    }
    for p in 0..mb.points() {
        owner[ma.juxt_map(mb, p, false)] = (false, p);
    }
    for c in &out.arcs {
        let (left, p) = owner[c[0] as usize];
        b.output(if left { cf.of_point[p] as usize } else { nf + cg.of_point[p] as usize });
    }
    for i in 0..a.circles as usize {
        b.output(cf.src_circle(i));
    }
    for i in 0..bt.circles as usize {
        b.output(nf + cg.src_circle(i));
    }
    for i in 0..a2.circles as usize {
        b.output(cf.tgt_circle(i));
    }
    for i in 0..b2.circles as usize {
        b.output(nf + cg.tgt_circle(i));
    }
    b.finish()
}

/// Partial trace of a tangle: new loop (if any) first, then old circles.
pub(crate) fn trace_tangle(t: &FlatTangle) -> (FlatTangle, bool, Vec<u8>) {
    let (g, old_of_new) = t.matching.partial_trace();
    let looped = !g.circles.is_empty();
    let circles = t.circles + looped as u8;
    (FlatTangle { matching: g.matching, circles }, looped, old_of_new)
}

pub(crate) fn trace_plan(x: &FlatTangle, y: &FlatTangle) -> Plan {
    let cf = curve_data(x, y);
    let nf = cf.count();
    let mut b = PlanBuilder::new(nf, 1);
    let (bt, tp) = (x.matching.bot(), x.matching.top());
    let (c1, c2) = (bt - 1, bt + tp - 1);
    b.glue(cf.of_point[c1] as usize, nf, 1);
    b.glue(cf.of_point[c2] as usize, nf, 1);
    let (tx, lx, old_of_new) = trace_tangle(x);
    let (ty, ly, _) = trace_tangle(y);
    let out = curve_data(&tx, &ty);
    for c in &out.arcs {
        b.output(cf.of_point[old_of_new[c[0] as usize] as usize] as usize);
    }
    if lx {
        b.output(cf.of_point[c1] as usize);
    }
    for i in 0..x.circles as usize {
        b.output(cf.src_circle(i));
    }
    if ly {
        b.output(cf.of_point[c1] as usize);
    }
    for i in 0..y.circles as usize {
        b.output(cf.tgt_circle(i));
    }
    b.finish()
}

/// Kinds of pure relabeling.
pub(crate) const RELABEL_FLIP: u8 = 0;
pub(crate) const RELABEL_REFLECT: u8 = 1;
pub(crate) const RELABEL_ROTATE: u8 = 2;

fn map_tangle(t: &FlatTangle, f: impl Fn(&Matching) -> Matching) -> FlatTangle {
    FlatTangle { matching: f(&t.matching), circles: t.circles }
}

/// Source and target of the relabeled morphism.
pub(crate) fn relabel_ends(kind: u8, x: &FlatTangle, y: &FlatTangle) -> (FlatTangle, FlatTangle) {
    match kind {
        RELABEL_FLIP => (y.clone(), x.clone()),
        RELABEL_REFLECT => (map_tangle(y, Matching::mirror), map_tangle(x, Matching::mirror)),
        _ => (map_tangle(x, Matching::rotate), map_tangle(y, Matching::rotate)),
    }
}

pub(crate) fn relabel_plan(kind: u8, x: &FlatTangle, y: &FlatTangle) -> Plan {
    let cf = curve_data(x, y);
    let nf = cf.count();
    let mut b = PlanBuilder::new(nf, 0);
    let (s, t) = relabel_ends(kind, x, y);
    let out = curve_data(&s, &t);
    let m = &x.matching;
    let back: Vec<usize> = {
        let mut v = vec![0; m.points()];
        for p in 0..m.points() {
            let np = match kind {
                RELABEL_FLIP => p,
                RELABEL_REFLECT => m.mirror_point(p),
                _ => m.rotate_point(p),
            };
            v[np] = p;
        }
        v
    };
    for c in &out.arcs {
        b.output(cf.of_point[back[c[0] as usize]] as usize);
    }
    let swap = kind != RELABEL_ROTATE;
    let (first, second) = if swap { (y.circles, x.circles) } else { (x.circles, y.circles) };
    for i in 0..first as usize {
        b.output(if swap { cf.tgt_circle(i) } else { cf.src_circle(i) });
    }
    for i in 0..second as usize {
        b.output(if swap { cf.src_circle(i) } else { cf.tgt_circle(i) });
    }
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pants_expansion() {
        let r = reduce_component(0, 0, &[0, 1, 2]);
        let masks: Vec<u64> = r.iter().map(|x| x.0).collect();
        assert_eq!(masks, vec![0b110, 0b101, 0b011]);
        assert!(reduce_component(2, 0, &[0]).is_empty());
        assert_eq!(reduce_component(0, 1, &[0]), vec![(1, 2)]);
        assert_eq!(reduce_component(1, 0, &[]), vec![(0, 1)]);
        assert!(reduce_component(0, 0, &[]).is_empty());
    }
}
