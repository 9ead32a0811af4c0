//! Truncated Laurent series in `q` with integer coefficients.
//!
//! A series is known exactly up to and including exponent `prec`; higher
//! terms are unknown. Polynomials carry `prec = EXACT`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Precision marker for series with no truncation.
pub const EXACT: i32 = i32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncatedSeries {
    coeffs: BTreeMap<i32, BigInt>,
    prec: i32,
}

impl TruncatedSeries {
    pub fn zero(prec: i32) -> Self {
        TruncatedSeries { coeffs: BTreeMap::new(), prec }
    }

    pub fn exact_zero() -> Self {
        Self::zero(EXACT)
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(exp: i32, c: impl Into<BigInt>) -> Self {
        let mut s = Self::exact_zero();
        s.add_term(exp, c.into());
        s
    }

    /// `q + q^-1`, the value of a closed loop.
    pub fn loop_value() -> Self {
        Self::from_terms([(-1, 1), (1, 1)])
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i32, C)>,
        C: Into<BigInt>,
    {
        let mut s = Self::exact_zero();
        for (e, c) in terms {
            s.add_term(e, c.into());
        }
        s
    }

    pub fn precision(&self) -> i32 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec == EXACT
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, exp: i32) -> BigInt {
        self.coeffs.get(&exp).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigInt)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn min_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    /// Lowest exponent at which the series could be nonzero.
    fn valuation(&self) -> i64 {
        match self.min_exponent() {
            Some(e) => e as i64,
            None => self.prec as i64 + 1,
        }
    }

    pub fn add_term(&mut self, exp: i32, c: BigInt) {
        if exp > self.prec || c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(exp).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    /// Drop every term above `prec` and lower the precision to it.
    pub fn truncate(mut self, prec: i32) -> Self {
        if prec < self.prec {
            self.prec = prec;
            self.coeffs.retain(|e, _| *e <= prec);
        }
        self
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: i32) -> Self {
        let prec = if self.is_exact() { EXACT } else { self.prec + k };
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            prec,
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.prec);
        }
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect(),
            prec: self.prec,
        }
    }

    /// Multiplicative inverse of a series whose lowest coefficient is ±1.
    /// The result is valid up to `prec`.
    pub fn inverse(&self, prec: i32) -> Option<Self> {
        let v = self.min_exponent()?;
        let lead = self.coeffs[&v].clone();
        if !(lead.is_one() || (-lead.clone()).is_one()) {
            return None;
        }
        // unit part u = q^-v * self, inverse of u is computed term by term
        let u = self.shift(-v);
        let upto = if prec == EXACT { return None } else { prec + v };
        let upto = upto.min(if u.is_exact() { i32::MAX } else { u.prec });
        if upto < 0 {
            return Some(Self::zero(prec));
        }
        let mut inv: Vec<BigInt> = Vec::with_capacity(upto as usize + 1);
        for k in 0..=upto {
            let mut acc = if k == 0 { BigInt::one() } else { BigInt::zero() };
            if k > 0 {
                for (e, c) in u.coeffs.range(1..=k) {
                    acc -= c * &inv[(k - e) as usize];
                }
            }
            inv.push(acc * &lead);
        }
        let mut out = Self::zero(upto);
        for (k, c) in inv.into_iter().enumerate() {
            out.add_term(k as i32, c);
        }
        Some(out.shift(-v))
    }

    /// Equality on the exponents both series know.
    pub fn eq_to_precision(&self, other: &Self) -> bool {
        let p = self.prec.min(other.prec);
        let a = self.coeffs.range(..=p);
        let b = other.coeffs.range(..=p);
        a.eq(b)
    }

    /// Evaluate at `q = 1` (exact series only).
    pub fn eval_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    pub fn is_unit_sign(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.values().all(|c| c.abs().is_one())
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let prec = self.prec.min(rhs.prec);
        let mut out = self.clone().truncate(prec);
        for (e, c) in &rhs.coeffs {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self + &(-rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
            prec: self.prec,
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let p1 = self.prec as i64 + rhs.valuation();
        let p2 = rhs.prec as i64 + self.valuation();
        let prec = if self.is_exact() && rhs.is_exact() {
            EXACT
        } else if self.is_exact() {
            p2.min(EXACT as i64 - 1) as i32
        } else if rhs.is_exact() {
            p1.min(EXACT as i64 - 1) as i32
        } else {
            p1.min(p2).min(EXACT as i64 - 1) as i32
        };
        let mut out = TruncatedSeries::zero(prec);
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &rhs.coeffs {
                let e = ea + eb;
                if e <= prec {
                    out.add_term(e, ca * cb);
                }
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $m(self, rhs: TruncatedSeries) -> TruncatedSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.coeffs {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            first = false;
            match (*e, mag.is_one()) {
                (0, _) => write!(f, "{}", mag)?,
                (_, true) => write!(f, "q^{}", e)?,
                (_, false) => write!(f, "{}q^{}", mag, e)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if !self.is_exact() {
            write!(f, " + O(q^{})", self.prec + 1)?;
        }
        Ok(())
    }
}

/// Quantum integer `[k] = (q^k - q^-k)/(q - q^-1)`, exact.
pub fn quantum_integer(k: u32) -> TruncatedSeries {
    let k = k as i32;
    TruncatedSeries::from_terms((0..k).map(|i| (-(k - 1) + 2 * i, 1)))
}

/// `[a]/[b]` expanded up to `prec`.
pub fn quantum_ratio(a: u32, b: u32, prec: i32) -> Option<TruncatedSeries> {
    let inv = quantum_integer(b).inverse(prec)?;
    Some((&quantum_integer(a) * &inv).truncate(prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_over_two() {
        let r = quantum_ratio(1, 2, 9).unwrap();
        let want = TruncatedSeries::from_terms([(1, 1), (3, -1), (5, 1), (7, -1), (9, 1)]);
        assert!(r.eq_to_precision(&want));
        assert_eq!(r.precision(), 9);
    }

    #[test]
    fn inverse_round_trip() {
        let s = quantum_integer(3);
        let inv = s.inverse(20).unwrap();
        let p = &s * &inv;
        assert!(p.eq_to_precision(&TruncatedSeries::one()));
        assert!(p.precision() >= 18);
    }

    #[test]
    fn product_precision_tracks_valuation() {
        let a = TruncatedSeries::monomial(1, 1).truncate(5);
        let b = TruncatedSeries::monomial(-2, 1).truncate(3);
        let p = &a * &b;
        assert_eq!(p.precision(), 3);
    }
}
