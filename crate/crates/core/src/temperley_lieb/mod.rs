//! The Temperley-Lieb algebra over truncated Laurent series and the
//! Jones-Wenzl projectors.

mod matching;

pub use matching::{glue_curves, Glued, Matching};

use crate::complexes::Complex;
use crate::error::{Error, Result};
use crate::series::{quantum_ratio, TruncatedSeries, EXACT};
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// Default series precision.
pub const DEFAULT_PRECISION: i32 = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TLElement {
    n: usize,
    terms: BTreeMap<Matching, TruncatedSeries>,
}

impl TLElement {
    pub fn zero(n: usize) -> Self {
        TLElement { n, terms: BTreeMap::new() }
    }

    pub fn basis(m: Matching) -> Self {
        Self::from_term(m, TruncatedSeries::one())
    }

    pub fn from_term(m: Matching, s: TruncatedSeries) -> Self {
        assert!(m.is_square());
        let mut out = Self::zero(m.bot());
        out.add_term(m, s);
        out
    }

    pub fn identity(n: usize) -> Self {
        Self::basis(Matching::identity(n))
    }

    pub fn e(n: usize, i: usize) -> Self {
        Self::basis(Matching::e(n, i))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Matching, &TruncatedSeries)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Matching) -> Option<&TruncatedSeries> {
        self.terms.get(m)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Matching, s: TruncatedSeries) {
        assert_eq!(m.bot(), self.n, "strand count mismatch");
        match self.terms.get_mut(&m) {
            Some(cur) => {
                *cur = &*cur + &s;
                if cur.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    pub fn add(&self, other: &TLElement) -> Result<TLElement> {
        if self.n != other.n {
            return Err(Error::StrandMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        for (m, s) in &other.terms {
            out.add_term(m.clone(), s.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TLElement) -> Result<TLElement> {
        self.add(&other.scale_series(&TruncatedSeries::monomial(0, -1)))
    }

    pub fn scale_series(&self, s: &TruncatedSeries) -> TLElement {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn scale_int(&self, c: &BigInt) -> TLElement {
        let mut out = Self::zero(self.n);
        for (m, s) in &self.terms {
            out.add_term(m.clone(), s.scale(c));
        }
        out
    }

    pub fn truncate(&self, prec: i32) -> TLElement {
        let mut out = Self::zero(self.n);
        for (m, s) in &self.terms {
            out.add_term(m.clone(), s.clone().truncate(prec));
        }
        out
    }

    /// Lowest precision among the coefficients.
    pub fn precision(&self) -> i32 {
        self.terms.values().map(|s| s.precision()).min().unwrap_or(EXACT)
    }

    /// Equality of all coefficients to their common precision.
    pub fn eq_to_precision(&self, other: &TLElement) -> bool {
        if self.n != other.n {
            return false;
        }
        let keys: std::collections::BTreeSet<&Matching> =
            self.terms.keys().chain(other.terms.keys()).collect();
        let zero_a = TruncatedSeries::zero(self.precision());
        let zero_b = TruncatedSeries::zero(other.precision());
        keys.into_iter().all(|m| {
            let a = self.terms.get(m).unwrap_or(&zero_a);
            let b = other.terms.get(m).unwrap_or(&zero_b);
            let p = a.precision().min(b.precision()).min(self.precision()).min(other.precision());
            a.clone().truncate(p).eq_to_precision(&b.clone().truncate(p))
        })
    }

    /// True when every coefficient vanishes up to its precision.
    pub fn is_zero_to_precision(&self) -> bool {
        self.terms.values().all(|s| s.is_zero())
    }

    /// `self ⊔ 1_k`.
    pub fn juxtapose_identity(&self, k: usize) -> TLElement {
        let id = Matching::identity(k);
        let mut out = Self::zero(self.n + k);
        for (m, s) in &self.terms {
            out.add_term(m.juxtapose(&id), s.clone());
        }
        out
    }
}

/// Vertical product: `a` stacked on top of `b`.
pub fn tl_mul(a: &TLElement, b: &TLElement) -> Result<TLElement> {
    if a.n != b.n {
        return Err(Error::StrandMismatch(a.n, b.n));
    }
    let loop_value = TruncatedSeries::loop_value();
    let mut out = TLElement::zero(a.n);
    for (ma, sa) in &a.terms {
        for (mb, sb) in &b.terms {
            let g = ma.stack_on(mb);
            let mut c = sa * sb;
            for _ in 0..g.circles.len() {
                c = &c * &loop_value;
            }
            out.add_term(g.matching, c);
        }
    }
    Ok(out)
}

/// Product of several elements, left factor on top.
pub fn tl_product(factors: &[TLElement]) -> Result<TLElement> {
    let mut it = factors.iter();
    let mut acc = it.next().ok_or_else(|| Error::Invalid("empty product".into()))?.clone();
    for f in it {
        acc = tl_mul(&acc, f)?;
    }
    Ok(acc)
}

/// The Jones-Wenzl projector `p_n` to precision `prec`, computed by
/// `p_n = Σ_k (-1)^k [n-k]/[n] (p_{n-1} ⊔ 1) e_{n-1} e_{n-2} ⋯ e_{n-k}`.
pub fn jw(n: usize, prec: i32) -> Result<TLElement> {
    if n == 0 {
        return Err(Error::Invalid("jw needs n >= 1".into()));
    }
    if prec < n as i32 {
        return Err(Error::Precision(format!("precision {} too small to expand [{}]^-1", prec, n)));
    }
    let mut p = TLElement::identity(1);
    for m in 2..=n {
        let lifted = p.juxtapose_identity(1);
        let mut next = TLElement::zero(m);
        let mut chain = lifted.clone();
        for k in 0..m {
            if k > 0 {
                chain = tl_mul(&chain, &TLElement::e(m, m - k))?;
            }
            let mut coeff = quantum_ratio((m - k) as u32, m as u32, prec)
                .ok_or_else(|| Error::Precision("quantum integer not invertible".into()))?;
            if k % 2 == 1 {
                coeff = -&coeff;
            }
            next = next.add(&chain.scale_series(&coeff))?;
        }
        p = next.truncate(prec);
    }
    Ok(p)
}

/// Largest number of through strands among diagrams with nonzero coefficient.
pub fn through_degree(a: &TLElement) -> Result<usize> {
    a.terms
        .keys()
        .map(|m| m.through_degree())
        .max()
        .ok_or_else(|| Error::Invalid("through degree of zero element".into()))
}

/// Number of loops in the planar closure of a square diagram.
pub fn closure_loops(m: &Matching) -> usize {
    let mut cur = m.clone();
    let mut loops = 0;
    while cur.bot() > 0 {
        let (g, _) = cur.partial_trace();
        loops += g.circles.len();
        cur = g.matching;
    }
    loops
}

/// Markov-trace closure: every loop becomes `q + q^-1`.
pub fn closure_evaluate(a: &TLElement) -> TruncatedSeries {
    let lv = TruncatedSeries::loop_value();
    let mut out = TruncatedSeries::zero(a.precision());
    for (m, s) in &a.terms {
        let mut c = s.clone();
        for _ in 0..closure_loops(m) {
            c = &c * &lv;
        }
        out = &out + &c;
    }
    out
}

/// Graded Euler characteristic `Σ (-1)^h q^shift [tangle]`.
pub fn euler_characteristic(c: &Complex, prec: i32) -> Result<TLElement> {
    if !c.is_square() {
        return Err(Error::Invalid("Euler characteristic needs a square complex".into()));
    }
    let mut out = TLElement::zero(c.bot());
    for (h, objs) in c.degrees() {
        let sign = if h.rem_euclid(2) == 0 { 1 } else { -1 };
        for o in objs {
            let mut s = TruncatedSeries::monomial(o.q, sign);
            let lv = TruncatedSeries::loop_value();
            for _ in 0..o.tangle.circles {
                s = &s * &lv;
            }
            out.add_term(o.tangle.matching.clone(), s.truncate(prec));
        }
    }
    Ok(out.truncate(prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jw2_expansion() {
        let p = jw(2, 9).unwrap();
        let e = Matching::e(2, 1);
        let c = p.coeff(&e).unwrap();
        let want = TruncatedSeries::from_terms([(1, -1), (3, 1), (5, -1), (7, 1), (9, -1)]);
        assert!(c.eq_to_precision(&want));
    }

    #[test]
    fn jw_kills_turnbacks() {
        for n in 2..=4 {
            let p = jw(n, 20).unwrap();
            for i in 1..n {
                let e = TLElement::e(n, i);
                assert!(tl_mul(&p, &e).unwrap().is_zero_to_precision(), "n={} i={}", n, i);
                assert!(tl_mul(&e, &p).unwrap().is_zero_to_precision());
            }
        }
    }

    #[test]
    fn closure_of_jw2_is_quantum_three() {
        let v = closure_evaluate(&jw(2, 20).unwrap());
        let want = TruncatedSeries::from_terms([(-2, 1), (0, 1), (2, 1)]);
        assert!(v.eq_to_precision(&want));
    }
}
