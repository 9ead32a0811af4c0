//! Crossing complexes and the scanning bracket of a tangle word.

use crate::cobordism::{CobMorphism, FlatTangle, GradedObject};
use crate::complexes::{juxtapose, simplify, tensor, Complex};
use crate::error::{Error, Result};
use crate::temperley_lieb::Matching;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CrossingSign {
    Positive,
    Negative,
}

impl CrossingSign {
    pub fn flipped(self) -> Self {
        match self {
            CrossingSign::Positive => CrossingSign::Negative,
            CrossingSign::Negative => CrossingSign::Positive,
        }
    }
}

/// The oriented crossing whose 0-resolution is the turnback:
/// `q²e → q1` (positive, `1` in degree 0) or `q⁻¹e → q⁻²1` (negative, `e` in degree 0).
pub fn crossing_complex(sign: CrossingSign) -> Complex {
    braid_crossing(false, sign)
}

/// The crossing of a braid generator `σ` (`inverse = false`) or `σ⁻¹`,
/// normalized by the sign the strand orientations give it.
pub fn braid_crossing(inverse: bool, sign: CrossingSign) -> Complex {
    let id = FlatTangle::identity(2);
    let e = FlatTangle::e(2, 1);
    let (first, second) = if inverse { (id, e) } else { (e, id) };
    // degree of the first object and q-shift of each
    let (h, q0, q1) = match (inverse, sign) {
        (false, CrossingSign::Positive) => (-1, 2, 1),
        (false, CrossingSign::Negative) => (0, -1, -2),
        (true, CrossingSign::Negative) => (0, -1, -2),
        (true, CrossingSign::Positive) => (-1, 2, 1),
    };
    let mut c = Complex::square(2);
    c.push(h, GradedObject::new(first.clone(), q0));
    c.push(h + 1, GradedObject::new(second.clone(), q1));
    c.set_entry(h, 0, 0, CobMorphism::saddle(first, second));
    c
}

/// One horizontal piece of a slice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Piece {
    Strand,
    /// Two top points, none at the bottom.
    Cup,
    /// Two bottom points, none at the top.
    Cap,
    Cross { inverse: bool, sign: CrossingSign },
    /// A named complex from the box table.
    Box(String),
}

pub type Slice = Vec<Piece>;

fn piece_complex(p: &Piece, boxes: &BTreeMap<String, Complex>) -> Result<Complex> {
    Ok(match p {
        Piece::Strand => Complex::identity(1),
        Piece::Cup => Complex::object(GradedObject::new(FlatTangle::new(Matching::cups(1)), 0)),
        Piece::Cap => Complex::object(GradedObject::new(FlatTangle::new(Matching::caps(1)), 0)),
        Piece::Cross { inverse, sign } => braid_crossing(*inverse, *sign),
        Piece::Box(name) => boxes.get(name).cloned().ok_or_else(|| Error::Invalid(format!("unknown box label {:?}", name)))?,
    })
}

fn slice_complex(s: &Slice, boxes: &BTreeMap<String, Complex>) -> Result<Complex> {
    let mut acc = Complex::identity(0);
    for p in s {
        acc = juxtapose(&acc, &piece_complex(p, boxes)?);
    }
    Ok(acc)
}

/// Fold the slices from the bottom up, simplifying after each one. An
/// object ceiling aborts runaway computations.
pub fn khovanov_bracket(word: &[Slice], boxes: &BTreeMap<String, Complex>, ceiling: Option<usize>) -> Result<Complex> {
    let mut acc: Option<Complex> = None;
    for s in word {
        let c = slice_complex(s, boxes)?;
        acc = Some(match acc {
            None => simplify(&c),
            Some(a) => {
                if c.bot() != a.top() {
                    return Err(Error::StrandMismatch(c.bot(), a.top()));
                }
                simplify(&tensor(&c, &a)?)
            }
        });
        if let (Some(limit), Some(a)) = (ceiling, &acc) {
            if a.total_objects() > limit {
                return Err(Error::Ceiling(a.total_objects(), limit));
            }
        }
    }
    acc.ok_or_else(|| Error::Invalid("empty tangle word".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reidemeister_two() {
        let a = braid_crossing(false, CrossingSign::Positive);
        let b = braid_crossing(true, CrossingSign::Negative);
        let s = simplify(&tensor(&a, &b).unwrap());
        assert_eq!(s, Complex::identity(2));
        let s = simplify(&tensor(&b, &a).unwrap());
        assert_eq!(s, Complex::identity(2));
    }
}
