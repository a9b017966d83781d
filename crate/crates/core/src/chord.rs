//! Chords of the unit circle and the predicates built on them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::angle::{in_closed_arc, in_open_arc, Angle};
use crate::error::{QmlError, Result};
use crate::rational::Rational;

/// An unordered pair of angles, stored with `a <= b`. `a == b` is a point of
/// the circle (a degenerate chord).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "RawChord")]
pub struct Chord {
    a: Angle,
    b: Angle,
}

#[derive(Deserialize)]
struct RawChord {
    a: Angle,
    b: Angle,
}

impl From<RawChord> for Chord {
    fn from(r: RawChord) -> Self {
        Chord::new(r.a, r.b)
    }
}

/// Position of one chord relative to the region cut off by another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Behind {
    /// Inside the open region `D(ℓ)`.
    Strictly,
    /// In the closure of `D(ℓ)` but not in `D(ℓ)`.
    Weakly,
    NotBehind,
}

impl Behind {
    /// `ℓ₁ ≤ ℓ`.
    pub fn is_behind(self) -> bool {
        !matches!(self, Behind::NotBehind)
    }
}

impl Chord {
    pub fn new(x: Angle, y: Angle) -> Chord {
        if x <= y {
            Chord { a: x, b: y }
        } else {
            Chord { a: y, b: x }
        }
    }

    pub fn point(x: Angle) -> Chord {
        Chord {
            a: x.clone(),
            b: x,
        }
    }

    /// Convenience constructor from two `p/q` pairs.
    pub fn from_fractions((p1, q1): (u64, u64), (p2, q2): (u64, u64)) -> Chord {
        Chord::new(Angle::new(p1, q1), Angle::new(p2, q2))
    }

    pub fn a(&self) -> &Angle {
        &self.a
    }

    pub fn b(&self) -> &Angle {
        &self.b
    }

    pub fn endpoints(&self) -> [&Angle; 2] {
        [&self.a, &self.b]
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn has_endpoint(&self, x: &Angle) -> bool {
        &self.a == x || &self.b == x
    }

    pub fn shares_endpoint(&self, other: &Chord) -> bool {
        other.has_endpoint(&self.a) || other.has_endpoint(&self.b)
    }

    /// Length of the shorter arc between the endpoints.
    pub fn length(&self) -> Rational {
        let d = self
            .b
            .value()
            .checked_sub(self.a.value())
            .expect("canonical chord");
        if d <= Rational::HALF {
            d
        } else {
            d.complement()
        }
    }

    pub fn is_diameter(&self) -> bool {
        self.a.antipode() == self.b
    }

    /// Image under σ₂.
    pub fn sigma(&self) -> Chord {
        Chord::new(self.a.double(), self.b.double())
    }

    pub fn sigma_n(&self, n: usize) -> Chord {
        let mut c = self.clone();
        for _ in 0..n {
            c = c.sigma();
        }
        c
    }

    /// The sibling `−ℓ`, rotated by a half turn.
    pub fn sibling(&self) -> Chord {
        Chord::new(self.a.antipode(), self.b.antipode())
    }

    /// The shorter open arc `H(ℓ)` as a counterclockwise `(from, to)` pair.
    /// For a diameter the arc from `a` to `b` is returned.
    pub fn short_arc(&self) -> (&Angle, &Angle) {
        let d = self.b.value().checked_sub(self.a.value()).expect("canonical");
        if d <= Rational::HALF {
            (&self.a, &self.b)
        } else {
            (&self.b, &self.a)
        }
    }

    /// Whether the open chords cross inside the disk. Shared endpoints and
    /// degenerate chords never count as crossing.
    pub fn linked(&self, other: &Chord) -> bool {
        if self.is_degenerate() || other.is_degenerate() {
            return false;
        }
        let (a1, b1, a2, b2) = (&self.a, &self.b, &other.a, &other.b);
        (a1 < a2 && a2 < b1 && b1 < b2) || (a2 < a1 && a1 < b2 && b2 < b1)
    }

    /// The two ways of pairing the four preimage endpoints into sibling
    /// chords. The first pairing joins `a/2` to `b/2`.
    pub fn preimage_pairings(&self) -> [[Chord; 2]; 2] {
        let (a0, a1) = self.a.halves();
        let (b0, b1) = self.b.halves();
        [
            [Chord::new(a0.clone(), b0.clone()), Chord::new(a1.clone(), b1.clone())],
            [Chord::new(a0, b1), Chord::new(a1, b0)],
        ]
    }

    /// Relation of `self` to the region behind `ell`.
    pub fn behind(&self, ell: &Chord) -> Result<Behind> {
        if ell.is_diameter() && !ell.is_degenerate() {
            return Err(QmlError::Domain(format!(
                "behind() is undefined for the diameter {ell}"
            )));
        }
        let (from, to) = ell.short_arc();
        let open = |x: &Angle| in_open_arc(x, from, to);
        let closed = |x: &Angle| in_closed_arc(x, from, to);
        Ok(if open(&self.a) && open(&self.b) {
            Behind::Strictly
        } else if closed(&self.a) && closed(&self.b) {
            Behind::Weakly
        } else {
            Behind::NotBehind
        })
    }

    /// Separates `0` from `1/2`. Chords ending at `0` or `1/2` are horizontal.
    pub fn is_vertical(&self) -> Result<bool> {
        if self.is_degenerate() {
            return Err(QmlError::Domain(format!(
                "verticality of the degenerate chord {self}"
            )));
        }
        let half = &Angle::HALF;
        Ok(!self.a.value().is_zero() && &self.a < half && half < &self.b)
    }

    /// Whether `self` separates `p` from `q`: the endpoints of each that are
    /// not endpoints of `self` lie in different components of the circle
    /// minus the endpoints of `self`.
    pub fn separates(&self, p: &Chord, q: &Chord) -> Result<bool> {
        if self.is_degenerate() {
            return Err(QmlError::Domain(format!(
                "degenerate chord {self} separates nothing"
            )));
        }
        if self.linked(p) || self.linked(q) {
            return Err(QmlError::Domain(format!(
                "separation test with a chord crossing {self}"
            )));
        }
        if self == p || self == q {
            return Ok(false);
        }
        let side = |c: &Chord| {
            c.endpoints()
                .into_iter()
                .find(|x| !self.has_endpoint(x))
                .map(|x| in_open_arc(x, &self.a, &self.b))
        };
        Ok(match (side(p), side(q)) {
            (Some(s), Some(t)) => s != t,
            _ => false,
        })
    }

    /// Endpoint distance under the better endpoint pairing.
    pub fn distance(&self, other: &Chord) -> Rational {
        let straight = std::cmp::max(
            self.a.circle_distance(&other.a),
            self.b.circle_distance(&other.b),
        );
        let crossed = std::cmp::max(
            self.a.circle_distance(&other.b),
            self.b.circle_distance(&other.a),
        );
        if straight <= crossed {
            straight
        } else {
            crossed
        }
    }
}

/// `ψ(x) = 2x` on `[0, 1/4]`, `1 − 2x` on `[1/4, 1/2]`; the length law of σ₂.
pub fn psi(x: &Rational) -> Result<Rational> {
    if x > &Rational::HALF {
        return Err(QmlError::Argument(format!("psi is defined on [0, 1/2], got {x}")));
    }
    let d = x.double();
    Ok(if x <= &Rational::QUARTER {
        d
    } else {
        d.complement()
    })
}

/// Finds some crossing pair in a chord family, or `None` if the family is
/// pairwise unlinked. Runs a nesting sweep in `O(n log n)`.
pub fn find_crossing(chords: &[Chord]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..chords.len())
        .filter(|&i| !chords[i].is_degenerate())
        .collect();
    order.sort_by(|&i, &j| {
        chords[i]
            .a
            .cmp(&chords[j].a)
            .then_with(|| chords[j].b.cmp(&chords[i].b))
    });
    let mut stack: Vec<usize> = Vec::new();
    for i in order {
        let c = &chords[i];
        while let Some(&top) = stack.last() {
            if chords[top].b <= c.a {
                stack.pop();
            } else {
                break;
            }
        }
        if let Some(&top) = stack.last() {
            if c.b > chords[top].b {
                return Some((top, i));
            }
        }
        stack.push(i);
    }
    None
}

pub fn pairwise_unlinked(chords: &[Chord]) -> bool {
    find_crossing(chords).is_none()
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_degenerate() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}-{}", self.a, self.b)
        }
    }
}

impl fmt::Debug for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Chord {
    type Err = QmlError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().split_once('-') {
            Some((x, y)) => Ok(Chord::new(x.parse()?, y.parse()?)),
            None => Ok(Chord::point(s.parse()?)),
        }
    }
}

/// Serde adapter for the `"a-b"` text form.
pub mod as_text {
    use super::Chord;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Chord, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(c)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Chord, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}
