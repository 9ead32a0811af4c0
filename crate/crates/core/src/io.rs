//! JSON formats for TL elements, complexes, homology groups and morphisms.
//!
//! Coefficients are JSON integers when they fit in `i64` and decimal
//! strings otherwise.

use crate::cobordism::{CobMorphism, FlatTangle, GradedObject};
use crate::complexes::Complex;
use crate::error::{Error, Result};
use crate::homology::{poincare_polynomial, BigradedGroups, Field, Group};
use crate::series::TruncatedSeries;
use crate::temperley_lieb::{Matching, TLElement};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Small(i64),
    Big(String),
}

impl Coeff {
    pub fn from_big(x: &BigInt) -> Self {
        match x.to_i64() {
            Some(v) => Coeff::Small(v),
            None => Coeff::Big(x.to_string()),
        }
    }

    pub fn to_big(&self) -> Result<BigInt> {
        match self {
            Coeff::Small(v) => Ok(BigInt::from(*v)),
            Coeff::Big(s) => s.parse().map_err(|_| Error::Parse(format!("bad integer {:?}", s))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TLTermJson {
    /// `matching[p]` is the partner of boundary point `p`.
    pub matching: Vec<u8>,
    pub series: Vec<(i32, Coeff)>,
    /// Exponents from this one on are unknown; absent for exact coefficients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<i32>,
}

pub fn tl_to_json(a: &TLElement) -> Vec<TLTermJson> {
    a.terms()
        .map(|(m, s)| TLTermJson {
            matching: m.pairs().to_vec(),
            series: s.terms().map(|(e, c)| (e, Coeff::from_big(c))).collect(),
            precision: (!s.is_exact()).then(|| s.precision()),
        })
        .collect()
}

pub fn tl_from_json(n: usize, terms: &[TLTermJson]) -> Result<TLElement> {
    let mut out = TLElement::zero(n);
    for t in terms {
        let m = Matching::square(t.matching.clone()).map_err(Error::Parse)?;
        if m.half() != n {
            return Err(Error::StrandMismatch(m.half(), n));
        }
        let mut s = TruncatedSeries::from_terms(t.series.iter().map(|(e, c)| Ok((*e, c.to_big()?))).collect::<Result<Vec<_>>>()?);
        if let Some(p) = t.precision {
            s = s.truncate(p);
        }
        out.add_term(m, s);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    /// Curves carrying a dot.
    pub dots: Vec<usize>,
    pub coeff: Coeff,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismJson {
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectJson {
    pub matching: Vec<u8>,
    pub qshift: i32,
    #[serde(default, skip_serializing_if = "is_zero_u8")]
    pub circles: u8,
}

fn is_zero_u8(x: &u8) -> bool {
    *x == 0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeJson {
    pub h: i32,
    pub objects: Vec<ObjectJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub row: usize,
    pub col: usize,
    pub morphism: MorphismJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffJson {
    pub h: i32,
    pub entries: Vec<EntryJson>,
}

/// A complex on `n` strands at both ends, or on `bot` and `top` points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bot: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<usize>,
    /// Degrees below this one were cut off.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<i32>,
    pub degrees: Vec<DegreeJson>,
    #[serde(default)]
    pub differential: Vec<DiffJson>,
}

pub fn morphism_to_json(f: &CobMorphism) -> MorphismJson {
    MorphismJson {
        terms: f.terms().iter().map(|(m, c)| TermJson { dots: CobMorphism::dots_of(*m), coeff: Coeff::from_big(c) }).collect(),
    }
}

pub fn morphism_from_json(src: &FlatTangle, tgt: &FlatTangle, j: &MorphismJson) -> Result<CobMorphism> {
    if !src.same_boundary(tgt) {
        return Err(Error::BoundaryMismatch("entry between objects with different boundaries".into()));
    }
    let curves = crate::cobordism::curve_data(src, tgt).count();
    let mut terms = vec![];
    for t in &j.terms {
        let mut mask = 0u64;
        for &d in &t.dots {
            if d >= curves {
                return Err(Error::Parse(format!("dot on curve {} but the cobordism has {} curves", d, curves)));
            }
            mask |= 1 << d;
        }
        terms.push((mask, t.coeff.to_big()?));
    }
    Ok(CobMorphism::from_terms(src.clone(), tgt.clone(), terms))
}

pub fn complex_to_json(c: &Complex) -> ComplexJson {
    let square = c.is_square();
    ComplexJson {
        n: square.then(|| c.bot()),
        bot: (!square).then(|| c.bot()),
        top: (!square).then(|| c.top()),
        trunc: c.trunc(),
        degrees: c
            .degrees()
            .map(|(h, v)| DegreeJson {
                h,
                objects: v
                    .iter()
                    .map(|o| ObjectJson { matching: o.tangle.matching.pairs().to_vec(), qshift: o.q, circles: o.tangle.circles })
                    .collect(),
            })
            .collect(),
        differential: c
            .diffs()
            .filter(|(_, m)| !m.is_empty())
            .map(|(h, m)| DiffJson {
                h,
                entries: m.iter().map(|((r, col), f)| EntryJson { row: *r, col: *col, morphism: morphism_to_json(f) }).collect(),
            })
            .collect(),
    }
}

pub fn complex_from_json(j: &ComplexJson) -> Result<Complex> {
    let (bot, top) = match (j.n, j.bot, j.top) {
        (Some(n), None, None) => (n, n),
        (None, Some(b), Some(t)) => (b, t),
        _ => return Err(Error::Parse("give either n or both bot and top".into())),
    };
    let mut c = Complex::new(bot, top);
    for d in &j.degrees {
        for o in &d.objects {
            let m = Matching::new(bot, top, o.matching.clone()).map_err(|e| Error::Parse(format!("degree {}: {}", d.h, e)))?;
            let t = FlatTangle { matching: m, circles: o.circles };
            c.push(d.h, GradedObject::new(t, o.qshift));
        }
    }
    for d in &j.differential {
        for e in &d.entries {
            let (Some(src), Some(tgt)) = (c.objects(d.h).get(e.col), c.objects(d.h + 1).get(e.row)) else {
                return Err(Error::Parse(format!("entry ({}, {}) at degree {} is out of range", e.row, e.col, d.h)));
            };
            let f = morphism_from_json(&src.tangle, &tgt.tangle, &e.morphism)?;
            c.set_entry(d.h, e.row, e.col, f);
        }
    }
    c.set_trunc(j.trunc);
    c.check()?;
    Ok(c)
}

pub fn parse_complex(s: &str) -> Result<Complex> {
    let j: ComplexJson = serde_json::from_str(s).map_err(json_error)?;
    complex_from_json(&j)
}

pub fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {} column {}: {}", e.line(), e.column(), e))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub h: i32,
    pub q: i32,
    pub rank: usize,
    pub torsion: Vec<Coeff>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupsJson {
    pub groups: Vec<GroupJson>,
    pub poincare: String,
    /// Homology below this degree was not computed exactly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valid_from: Option<i32>,
}

pub fn groups_to_json(g: &BigradedGroups, field: Field, valid_from: Option<i32>) -> GroupsJson {
    GroupsJson {
        groups: g
            .iter()
            .map(|((h, q), grp)| GroupJson { h: *h, q: *q, rank: grp.rank, torsion: grp.torsion.iter().map(Coeff::from_big).collect() })
            .collect(),
        poincare: poincare_polynomial(g, field).to_string(),
        valid_from,
    }
}

pub fn groups_from_json(j: &GroupsJson) -> Result<BigradedGroups> {
    let mut g = BigradedGroups::new();
    for e in &j.groups {
        let torsion = e.torsion.iter().map(|c| c.to_big()).collect::<Result<Vec<_>>>()?;
        g.insert(e.h, e.q, Group { rank: e.rank, torsion });
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projectors::q2;
    use crate::temperley_lieb::jw;

    #[test]
    fn complex_round_trip() {
        let c = q2();
        let j = serde_json::to_string(&complex_to_json(&c)).unwrap();
        assert_eq!(parse_complex(&j).unwrap(), c);
    }

    #[test]
    fn tl_round_trip() {
        let p = jw(3, 12).unwrap();
        let back = tl_from_json(3, &tl_to_json(&p)).unwrap();
        assert!(back.eq_to_precision(&p));
    }

    #[test]
    fn big_coefficients_survive() {
        let x: BigInt = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(Coeff::from_big(&x).to_big().unwrap(), x);
        let s = serde_json::to_string(&Coeff::from_big(&BigInt::from(-7))).unwrap();
        assert_eq!(s, "-7");
    }

    #[test]
    fn malformed_entry_is_reported() {
        let s = r#"{"n":1,"degrees":[{"h":0,"objects":[{"matching":[1,0],"qshift":0}]}],"differential":[{"h":0,"entries":[{"row":3,"col":0,"morphism":{"terms":[]}}]}]}"#;
        assert!(matches!(parse_complex(s), Err(Error::Parse(_))));
    }
}
