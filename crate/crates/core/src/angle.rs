//! Rational angles on the circle ℝ/ℤ and the doubling map.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QmlError, Result};
use crate::rational::Rational;

/// A rational point of ℝ/ℤ, stored reduced with representative in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(Rational);

/// Eventual-periodicity data of an angle under doubling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitInfo {
    pub preperiod: usize,
    pub period: usize,
    /// `a, 2a, …` up to (not including) the first repetition.
    pub orbit: Vec<Angle>,
}

impl Angle {
    pub const ZERO: Angle = Angle(Rational::ZERO);
    pub const HALF: Angle = Angle(Rational::HALF);

    /// `num/den mod 1`. Panics if `den == 0`.
    pub fn new(num: u64, den: u64) -> Self {
        Angle(Rational::new(num % den, den))
    }

    /// Reduces any non-negative rational mod 1.
    pub fn from_rational(r: Rational) -> Self {
        Angle(r.fract())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_value(self) -> Rational {
        self.0
    }

    /// The doubling map σ₂.
    pub fn double(&self) -> Angle {
        Angle(self.0.double_mod_one())
    }

    /// `σ₂^n`.
    pub fn double_n(&self, n: usize) -> Angle {
        let mut a = self.clone();
        for _ in 0..n {
            a = a.double();
        }
        a
    }

    /// Both σ₂-preimages, the one in `[0, 1/2)` first.
    pub fn halves(&self) -> (Angle, Angle) {
        let (a, b) = self.0.halves_mod_one();
        (Angle(a), Angle(b))
    }

    /// The antipodal point `a + 1/2`.
    pub fn antipode(&self) -> Angle {
        Angle(self.0.add_half_mod_one())
    }

    /// Periodic under doubling iff the reduced denominator is odd.
    pub fn is_periodic(&self) -> bool {
        match self.0.as_small() {
            Some((_, d)) => d % 2 == 1,
            None => self.0.denom().is_odd(),
        }
    }

    /// Preperiod equals the 2-adic valuation of the denominator.
    pub fn preperiod(&self) -> usize {
        match self.0.as_small() {
            Some((_, d)) => d.trailing_zeros() as usize,
            None => self.0.denom().trailing_zeros().unwrap_or(0) as usize,
        }
    }

    pub fn orbit_info(&self) -> OrbitInfo {
        let preperiod = self.preperiod();
        let mut orbit = Vec::new();
        let mut a = self.clone();
        while orbit.len() <= preperiod || a != orbit[preperiod] {
            let next = a.double();
            orbit.push(a);
            a = next;
        }
        OrbitInfo {
            preperiod,
            period: orbit.len() - preperiod,
            orbit,
        }
    }

    /// Shorter-arc distance on ℝ/ℤ, in `[0, 1/2]`.
    pub fn circle_distance(&self, other: &Angle) -> Rational {
        let d = self.0.abs_diff(&other.0);
        let c = d.complement();
        if d <= c {
            d
        } else {
            c
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

/// Whether `x` lies in the open arc running counterclockwise from `from` to
/// `to`. The arc is empty when `from == to`.
pub fn in_open_arc(x: &Angle, from: &Angle, to: &Angle) -> bool {
    if from < to {
        from < x && x < to
    } else if from > to {
        x > from || x < to
    } else {
        false
    }
}

/// Closed version of [`in_open_arc`]; a single point when `from == to`.
pub fn in_closed_arc(x: &Angle, from: &Angle, to: &Angle) -> bool {
    x == from || x == to || in_open_arc(x, from, to)
}

/// All `x` with `σ₂^n(x) = t` in the open arc running counterclockwise from
/// `from` to `to`, in increasing order. `n` must be below 64.
pub fn preimages_in_arc(t: &Angle, n: u32, from: &Angle, to: &Angle) -> Vec<Angle> {
    assert!(n < 64, "preimage depth {n} too large");
    let top: u64 = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    // x = (t + j) / 2^n lies above y iff j > y·2^n − t.
    let bounds = |y: &Angle| small_shift_bounds(t, n, y).unwrap_or_else(|| big_shift_bounds(t, n, y));
    let clamp = |v: i128| u64::try_from(v).ok().map(|v| v.min(top));
    // First j strictly above, last j strictly below.
    let above = |y: &Angle| clamp(bounds(y).0 + 1);
    let below = |y: &Angle| clamp(bounds(y).1 - 1);
    let mut ranges = Vec::new();
    match from.cmp(to) {
        std::cmp::Ordering::Less => {
            if let (Some(lo), Some(hi)) = (above(from), below(to)) {
                ranges.push((lo, hi));
            }
        }
        std::cmp::Ordering::Greater => {
            if let Some(hi) = below(to) {
                ranges.push((0, hi));
            }
            if let Some(lo) = above(from) {
                ranges.push((lo, top));
            }
        }
        std::cmp::Ordering::Equal => {}
    }
    let mut out = Vec::new();
    for (lo, hi) in ranges {
        for j in lo..=hi {
            let x = preimage(t, n, j);
            if in_open_arc(&x, from, to) {
                out.push(x);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// `(t + j) / 2^n`.
fn preimage(t: &Angle, n: u32, j: u64) -> Angle {
    if let Some((tn, td)) = t.0.as_small() {
        let num = tn as u128 + j as u128 * td as u128;
        if let Some(den) = (td as u128).checked_shl(n).filter(|d| d >> n == td as u128) {
            // num is coprime to td, so only powers of two cancel.
            let k = num.trailing_zeros().min(n);
            return Angle::from_rational(Rational::from_coprime_u128(num >> k, den >> k));
        }
    }
    let (tn, td) = (t.0.numer(), t.0.denom());
    Angle::from_rational(Rational::from_big(tn + BigUint::from(j) * &td, td << n))
}

/// `(floor(y·2^n − t), ceil(y·2^n − t))` in machine integers, if they fit.
fn small_shift_bounds(t: &Angle, n: u32, y: &Angle) -> Option<(i128, i128)> {
    let (tn, td) = t.0.as_small()?;
    let (yn, yd) = y.0.as_small()?;
    let prod = i128::try_from((yn as u128).checked_mul(td as u128)?).ok()?;
    let lhs = prod.checked_mul(1i128.checked_shl(n)?)?;
    let num = lhs.checked_sub(i128::try_from(tn as u128 * yd as u128).ok()?)?;
    let den = i128::try_from(yd as u128 * td as u128).ok()?;
    let floor = num.div_euclid(den);
    let ceil = if num.rem_euclid(den) == 0 { floor } else { floor + 1 };
    Some((floor, ceil))
}

fn big_shift_bounds(t: &Angle, n: u32, y: &Angle) -> (i128, i128) {
    let big = |r: &Rational| (BigInt::from(r.numer()), BigInt::from(r.denom()));
    let (tn, td) = big(&t.0);
    let (yn, yd) = big(&y.0);
    let num = (yn << n) * &td - tn * &yd;
    let den = yd * td;
    let floor = num.div_floor(&den);
    let ceil = if (&num - &floor * &den).is_zero() { floor.clone() } else { &floor + 1 };
    // Values beyond i128 lie far outside [0, 2^n) and clamp the same way.
    let fit = |v: BigInt| v.to_i128().unwrap_or(if v.sign() == num_bigint::Sign::Minus { i128::MIN / 2 } else { i128::MAX / 2 });
    (fit(floor), fit(ceil))
}

/// The σ₂-periodic orbit of period `q` on which doubling acts as the
/// combinatorial rotation by `p/q`, found by exhaustive search over the
/// angles `k/(2^q − 1)`. Returned in increasing order.
pub fn rotation_number_orbit(p: u64, q: u64) -> Result<Vec<Angle>> {
    if !(0 < p && p < q) || p.gcd(&q) != 1 {
        return Err(QmlError::Argument(format!(
            "rotation number {p}/{q} must satisfy 0 < p < q with gcd(p, q) = 1"
        )));
    }
    if q > 30 {
        return Err(QmlError::Argument(format!(
            "rotation orbit search is limited to q <= 30, got {q}"
        )));
    }
    let modulus = (1u64 << q) - 1;
    let double = |k: u64| (2 * k) % modulus;
    for k in 1..modulus {
        let mut orbit = vec![k];
        let mut x = double(k);
        while x != k && orbit.len() <= q as usize {
            orbit.push(x);
            x = double(x);
        }
        // Visit each cycle once, from its least element.
        if orbit.len() != q as usize || orbit.iter().any(|&y| y < k) {
            continue;
        }
        let mut sorted = orbit.clone();
        sorted.sort_unstable();
        let n = q as usize;
        let is_rotation = (0..n).all(|i| double(sorted[i]) == sorted[(i + p as usize) % n]);
        if is_rotation {
            return Ok(sorted.into_iter().map(|k| Angle::new(k, modulus)).collect());
        }
    }
    Err(QmlError::Invariant(format!(
        "no rotation orbit found for {p}/{q}"
    )))
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for Angle {
    type Err = QmlError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Angle::from_rational(s.parse()?))
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
