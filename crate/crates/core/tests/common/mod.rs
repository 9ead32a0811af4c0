//! Independent oracles: plain TL diagram algebra, brute-force integer
//! linear algebra and the small dga `W₂`.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// A square matching on `2n` points as `partner[p]`; bottom `0..n`, top `n..2n`.
pub type Diagram = Vec<usize>;

/// Laurent series `Σ c_k q^k` known below `prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ser {
    pub terms: BTreeMap<i32, BigInt>,
    pub prec: i32,
}

impl Ser {
    pub fn new(prec: i32) -> Self {
        Ser { terms: BTreeMap::new(), prec }
    }

    pub fn mono(k: i32, c: i64, prec: i32) -> Self {
        let mut s = Ser::new(prec);
        s.add(k, BigInt::from(c));
        s
    }

    pub fn add(&mut self, k: i32, c: BigInt) {
        if k >= self.prec {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn plus(&self, o: &Ser) -> Ser {
        let mut out = Ser::new(self.prec.min(o.prec));
        for (k, c) in self.terms.iter().chain(&o.terms) {
            out.add(*k, c.clone());
        }
        out
    }

    pub fn times(&self, o: &Ser) -> Ser {
        let lo = |s: &Ser| s.terms.keys().next().copied().unwrap_or(0);
        let prec = self.prec.saturating_add(lo(o)).min(o.prec.saturating_add(lo(self)));
        let mut out = Ser::new(prec);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                out.add(a + b, x * y);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `a` on top of `b`: the composite diagram and the number of closed loops.
pub fn compose(a: &Diagram, b: &Diagram) -> (Diagram, usize) {
    let n = a.len() / 2;
    // global points: b bottom 0..n, middle n..2n, a top 2n..3n
    let b_to = |p: usize| p;
    let a_to = |p: usize| p + n;
    // two layers of edges, kept apart so the middle points see both
    let mut lower = vec![usize::MAX; 3 * n];
    let mut upper = vec![usize::MAX; 3 * n];
    for p in 0..2 * n {
        lower[b_to(p)] = b_to(b[p]);
        upper[a_to(p)] = a_to(a[p]);
    }
    let outer: Vec<usize> = (0..n).chain(2 * n..3 * n).collect();
    let mut seen = vec![false; 3 * n];
    let mut result = vec![0; 2 * n];
    let local = |g: usize| if g < n { g } else { g - n };
    for &start in &outer {
        if seen[start] {
            continue;
        }
        let mut cur = start;
        let mut use_lower = start < n;
        seen[cur] = true;
        loop {
            let next = if use_lower { lower[cur] } else { upper[cur] };
            seen[next] = true;
            if next < n || next >= 2 * n {
                result[local(start)] = local(next);
                result[local(next)] = local(start);
                break;
            }
            cur = next;
            use_lower = !use_lower;
        }
    }
    let mut loops = 0;
    for m in n..2 * n {
        if seen[m] {
            continue;
        }
        loops += 1;
        let mut cur = m;
        let mut use_lower = true;
        loop {
            seen[cur] = true;
            cur = if use_lower { lower[cur] } else { upper[cur] };
            use_lower = !use_lower;
            if cur == m {
                break;
            }
        }
    }
    (result, loops)
}

/// Loops in the planar trace closure of a square diagram.
pub fn closure_loops(d: &Diagram) -> usize {
    let n = d.len() / 2;
    let mut seen = vec![false; 2 * n];
    let mut loops = 0;
    for s in 0..2 * n {
        if seen[s] {
            continue;
        }
        loops += 1;
        let mut p = s;
        loop {
            seen[p] = true;
            let q = d[p];
            seen[q] = true;
            // closure joins bottom i with top i
            p = if q < n { q + n } else { q - n };
            if p == s {
                break;
            }
        }
    }
    loops
}

pub fn identity(n: usize) -> Diagram {
    (0..2 * n).map(|p| if p < n { p + n } else { p - n }).collect()
}

/// `e_i`, 1-based.
pub fn e(n: usize, i: usize) -> Diagram {
    let mut d = identity(n);
    let (a, b) = (i - 1, i);
    d[a] = b;
    d[b] = a;
    d[n + a] = n + b;
    d[n + b] = n + a;
    d
}

pub type Element = BTreeMap<Diagram, Ser>;

pub fn mul(a: &Element, b: &Element, prec: i32) -> Element {
    let delta = Ser::mono(-1, 1, prec).plus(&Ser::mono(1, 1, prec));
    let mut out: Element = BTreeMap::new();
    for (x, s) in a {
        for (y, t) in b {
            let (z, loops) = compose(x, y);
            let mut c = s.times(t);
            for _ in 0..loops {
                c = c.times(&delta);
            }
            let slot = out.entry(z).or_insert_with(|| Ser::new(prec));
            *slot = slot.plus(&c);
        }
    }
    out.retain(|_, s| !s.is_zero());
    out
}

pub fn eval_closure(a: &Element, prec: i32) -> Ser {
    let delta = Ser::mono(-1, 1, prec).plus(&Ser::mono(1, 1, prec));
    let mut out = Ser::new(prec);
    for (x, s) in a {
        let mut c = s.clone();
        for _ in 0..closure_loops(x) {
            c = c.times(&delta);
        }
        out = out.plus(&c);
    }
    out
}

/// Equality where both sides are known.
pub fn ser_eq(a: &Ser, b: &Ser) -> bool {
    let p = a.prec.min(b.prec);
    let cut = |s: &Ser| s.terms.iter().filter(|(k, _)| **k < p).map(|(k, v)| (*k, v.clone())).collect::<BTreeMap<_, _>>();
    cut(a) == cut(b)
}

pub fn elem_eq(a: &Element, b: &Element) -> bool {
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    keys.into_iter().all(|k| {
        let z = Ser::new(i32::MAX);
        ser_eq(a.get(k).unwrap_or(&z), b.get(k).unwrap_or(&z))
    })
}

pub fn elem_is_zero(a: &Element) -> bool {
    a.values().all(|s| ser_eq(s, &Ser::new(i32::MAX)))
}

// ---- integer linear algebra by brute force ----

pub type Mat = Vec<Vec<BigInt>>;

/// Determinant by Bareiss elimination.
pub fn det(m: &Mat) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from determinantal divisors `d_k = gcd of k×k minors`.
pub fn invariant_factors(m: &Mat) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut divisors = vec![BigInt::one()];
    for k in 1..=rows.min(cols) {
        let mut g = BigInt::zero();
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Mat = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c].clone()).collect()).collect();
                g = g.gcd(&det(&minor));
            }
        }
        if g.is_zero() {
            break;
        }
        divisors.push(g);
    }
    divisors.windows(2).map(|w| &w[1] / &w[0]).map(|x| x.abs()).collect()
}

/// Homology at the middle of `A --f--> B --g--> C` from matrices
/// (rows index the target): free rank and torsion.
pub fn middle_homology(dim: usize, incoming: &Mat, outgoing: &Mat) -> (usize, Vec<BigInt>) {
    let fin = invariant_factors(incoming);
    let fout = invariant_factors(outgoing);
    let rank = dim - fin.len() - fout.len();
    let torsion = fin.into_iter().filter(|x| !x.is_one()).collect();
    (rank, torsion)
}

// ---- the dga W₂ = Z[u1,u2]/(u1²) ⊗ Λ[ξ], d ξ = 2 u1 u2 ----

/// Monomial `u1^a u2^b ξ^c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Mono {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl Mono {
    pub fn degree(&self) -> (i32, i32) {
        let (a, b, c) = (self.a as i32, self.b as i32, self.c as i32);
        // u1: (0, 2), u2: (-2, 4), ξ: (-3, 6)
        (-2 * b - 3 * c, 2 * a + 4 * b + 6 * c)
    }

    /// `d(m)` as a combination of monomials.
    pub fn d(&self) -> Vec<(Mono, i64)> {
        if self.c == 0 || self.a == 1 {
            return vec![];
        }
        vec![(Mono { a: 1, b: self.b + 1, c: 0 }, 2)]
    }
}

/// `H(W₂)` over `Z` for homological degrees `[lo, hi]`, as `(h, q) → (rank, torsion)`.
pub fn w2_homology(lo: i32, hi: i32) -> BTreeMap<(i32, i32), (usize, Vec<BigInt>)> {
    let bmax = (-lo / 2 + 2) as u32;
    let mut by_deg: BTreeMap<(i32, i32), Vec<Mono>> = BTreeMap::new();
    for a in 0..2 {
        for b in 0..=bmax {
            for c in 0..2 {
                let m = Mono { a, b, c };
                by_deg.entry(m.degree()).or_default().push(m);
            }
        }
    }
    let matrix = |src: &[Mono], tgt: &[Mono]| -> Mat {
        let mut m = vec![vec![BigInt::zero(); src.len()]; tgt.len()];
        for (j, s) in src.iter().enumerate() {
            for (t, c) in s.d() {
                let i = tgt.iter().position(|x| *x == t).expect("target in range");
                m[i][j] += c;
            }
        }
        m
    };
    let empty: Vec<Mono> = vec![];
    let mut out = BTreeMap::new();
    for (&(h, q), basis) in &by_deg {
        if h < lo || h > hi {
            continue;
        }
        let below = by_deg.get(&(h - 1, q)).unwrap_or(&empty);
        let above = by_deg.get(&(h + 1, q)).unwrap_or(&empty);
        let incoming = matrix(below, basis);
        let outgoing = matrix(basis, above);
        let (rank, torsion) = middle_homology(basis.len(), &incoming, &outgoing);
        if rank > 0 || !torsion.is_empty() {
            out.insert((h, q), (rank, torsion));
        }
    }
    out
}
