//! Non-negative exact rationals with a machine-word fast path.
//!
//! Values are always stored reduced. A value whose numerator and denominator
//! both fit in a `u64` is stored inline; anything larger spills to
//! [`BigUint`]. The representation is canonical, so derived `Eq`/`Hash` are
//! value equality.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::QmlError;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small { num: u64, den: u64 },
    // Boxed so the common inline case stays two words plus a tag.
    Big(Box<BigRatio>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct BigRatio {
    num: BigUint,
    den: BigUint,
}

/// Borrowed view of either representation, for uniform matching.
enum View<'a> {
    Small { num: &'a u64, den: &'a u64 },
    Big { num: &'a BigUint, den: &'a BigUint },
}

/// An exact non-negative rational number.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Rational {
    pub const ZERO: Rational = Rational(Repr::Small { num: 0, den: 1 });
    pub const ONE: Rational = Rational(Repr::Small { num: 1, den: 1 });
    pub const HALF: Rational = Rational(Repr::Small { num: 1, den: 2 });
    pub const THIRD: Rational = Rational(Repr::Small { num: 1, den: 3 });
    pub const QUARTER: Rational = Rational(Repr::Small { num: 1, den: 4 });

    /// Builds `num/den` in lowest terms. Panics if `den == 0`.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = num.gcd(&den);
        Rational(Repr::Small {
            num: num / g,
            den: den / g,
        })
    }

    /// Builds `num/den` from big integers. Panics if `den == 0`.
    pub fn from_big(num: BigUint, den: BigUint) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let g = num.gcd(&den);
        Self::fit(num / &g, den / g)
    }

    /// Already-reduced big pair, demoted to the inline form when it fits.
    fn fit(num: BigUint, den: BigUint) -> Self {
        match (num.to_u64(), den.to_u64()) {
            (Some(n), Some(d)) => Rational(Repr::Small { num: n, den: d }),
            _ => Rational(Repr::Big(Box::new(BigRatio { num, den }))),
        }
    }

    /// Caller guarantees `gcd(num, den) = 1`.
    pub(crate) fn from_coprime_u128(n: u128, d: u128) -> Self {
        match (u64::try_from(n), u64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small { num: n, den: d }),
            _ => Rational(Repr::Big(Box::new(BigRatio {
                num: BigUint::from(n),
                den: BigUint::from(d),
            }))),
        }
    }

    fn from_u128(num: u128, den: u128) -> Self {
        let g = match (u64::try_from(num), u64::try_from(den)) {
            (Ok(a), Ok(b)) => a.gcd(&b) as u128,
            _ => gcd_u128(num, den),
        };
        Self::from_coprime_u128(num / g, den / g)
    }

    fn view(&self) -> View<'_> {
        match &self.0 {
            Repr::Small { num, den } => View::Small { num, den },
            Repr::Big(b) => View::Big {
                num: &b.num,
                den: &b.den,
            },
        }
    }

    /// Inline `(numerator, denominator)` if the value fits in machine words.
    pub fn as_small(&self) -> Option<(u64, u64)> {
        match self.view() {
            View::Small { num, den } => Some((*num, *den)),
            View::Big { .. } => None,
        }
    }

    pub fn numer(&self) -> BigUint {
        match self.view() {
            View::Small { num, .. } => BigUint::from(*num),
            View::Big { num, .. } => num.clone(),
        }
    }

    pub fn denom(&self) -> BigUint {
        match self.view() {
            View::Small { den, .. } => BigUint::from(*den),
            View::Big { den, .. } => den.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn to_f64(&self) -> f64 {
        match self.view() {
            View::Small { num, den } => *num as f64 / *den as f64,
            View::Big { num, den } => {
                // Scale both down to keep the quotient in range.
                let bits = den.bits().max(num.bits());
                let shift = bits.saturating_sub(1000);
                let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
                let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
                n / d
            }
        }
    }

    pub fn add(&self, other: &Rational) -> Rational {
        if let (View::Small { num: n1, den: d1 }, View::Small { num: n2, den: d2 }) =
            (self.view(), other.view())
        {
            if d1 == d2 {
                return Self::from_u128(*n1 as u128 + *n2 as u128, *d1 as u128);
            }
            let a = *n1 as u128 * *d2 as u128;
            let b = *n2 as u128 * *d1 as u128;
            if let Some(s) = a.checked_add(b) {
                return Self::from_u128(s, *d1 as u128 * *d2 as u128);
            }
        }
        let (n1, d1, n2, d2) = (self.numer(), self.denom(), other.numer(), other.denom());
        Self::from_big(n1 * &d2 + n2 * &d1, d1 * d2)
    }

    /// `self - other`, or `None` when the result would be negative.
    pub fn checked_sub(&self, other: &Rational) -> Option<Rational> {
        if let (View::Small { num: n1, den: d1 }, View::Small { num: n2, den: d2 }) =
            (self.view(), other.view())
        {
            if d1 == d2 {
                return n1
                    .checked_sub(*n2)
                    .map(|n| Self::from_u128(n as u128, *d1 as u128));
            }
            let a = *n1 as u128 * *d2 as u128;
            let b = *n2 as u128 * *d1 as u128;
            return a
                .checked_sub(b)
                .map(|n| Self::from_u128(n, *d1 as u128 * *d2 as u128));
        }
        let (n1, d1, n2, d2) = (self.numer(), self.denom(), other.numer(), other.denom());
        let a = n1 * &d2;
        let b = n2 * &d1;
        if a < b {
            None
        } else {
            Some(Self::from_big(a - b, d1 * d2))
        }
    }

    /// `|self - other|`.
    pub fn abs_diff(&self, other: &Rational) -> Rational {
        match self.cmp(other) {
            Ordering::Less => other.checked_sub(self).expect("ordered"),
            _ => self.checked_sub(other).expect("ordered"),
        }
    }

    pub fn double(&self) -> Rational {
        match self.view() {
            View::Small { num, den } => {
                if den % 2 == 0 {
                    Rational(Repr::Small {
                        num: *num,
                        den: den / 2,
                    })
                } else {
                    Self::from_u128(2 * *num as u128, *den as u128)
                }
            }
            View::Big { num, den } => Self::from_big(num << 1u32, den.clone()),
        }
    }

    pub fn halve(&self) -> Rational {
        match self.view() {
            View::Small { num, den } => {
                if num % 2 == 0 {
                    Rational(Repr::Small {
                        num: num / 2,
                        den: *den,
                    })
                } else {
                    Self::from_u128(*num as u128, 2 * *den as u128)
                }
            }
            View::Big { num, den } => Self::from_big(num.clone(), den << 1u32),
        }
    }

    /// Reduces into `[0, 1)`.
    pub fn fract(&self) -> Rational {
        match self.view() {
            View::Small { num, den } => Rational(Repr::Small {
                num: num % den,
                den: if num % den == 0 { 1 } else { *den },
            }),
            View::Big { num, den } => {
                let r = num % den;
                if r.is_zero() {
                    Rational::ZERO
                } else {
                    // gcd(num mod den, den) = gcd(num, den) = 1
                    Self::fit(r, den.clone())
                }
            }
        }
    }

    /// `1 - self` for `self <= 1`.
    pub fn complement(&self) -> Rational {
        Rational::ONE
            .checked_sub(self)
            .expect("complement of a value above one")
    }
}

/// Doubling and halving on `[0, 1)` values with canonical output and no gcd
/// in the common cases.
impl Rational {
    pub(crate) fn double_mod_one(&self) -> Rational {
        match self.view() {
            View::Small { num, den } => {
                if den % 2 == 0 {
                    let h = den / 2;
                    Rational(Repr::Small {
                        num: num % h,
                        den: if num % h == 0 { 1 } else { h },
                    })
                } else {
                    let n = ((2 * *num as u128) % *den as u128) as u64;
                    Rational(Repr::Small { num: n, den: *den })
                }
            }
            View::Big { num, den } => {
                if den.is_even() {
                    let h: BigUint = den >> 1u32;
                    let r = num % &h;
                    if r.is_zero() {
                        Rational::ZERO
                    } else {
                        Self::fit(r, h)
                    }
                } else {
                    let r = (num << 1u32) % den;
                    Self::fit(r, den.clone())
                }
            }
        }
    }

    /// Both preimages under doubling, `(x/2, x/2 + 1/2)`.
    pub(crate) fn halves_mod_one(&self) -> (Rational, Rational) {
        match self.view() {
            View::Small { num, den } => {
                let first = if num % 2 == 0 {
                    Rational(Repr::Small {
                        num: num / 2,
                        den: *den,
                    })
                } else {
                    Self::from_coprime_u128(*num as u128, 2 * *den as u128)
                };
                let s = *num as u128 + *den as u128;
                let second = if s.is_multiple_of(2) {
                    Self::from_coprime_u128(s / 2, *den as u128)
                } else {
                    Self::from_coprime_u128(s, 2 * *den as u128)
                };
                (first, second)
            }
            View::Big { num, den } => {
                let first = Self::from_big(num.clone(), den << 1u32);
                let second = Self::from_big(num + den, den << 1u32);
                (first, second)
            }
        }
    }

    /// `x + 1/2 mod 1`.
    pub(crate) fn add_half_mod_one(&self) -> Rational {
        match self.view() {
            View::Small { num, den } => {
                if den % 2 == 1 {
                    let d2 = 2 * *den as u128;
                    Self::from_u128((2 * *num as u128 + *den as u128) % d2, d2)
                } else {
                    let h = den / 2;
                    let n = (*num as u128 + h as u128) % *den as u128;
                    Self::from_u128(n, *den as u128)
                }
            }
            View::Big { .. } => self.add(&Rational::HALF).fract(),
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.view(), other.view()) {
            (View::Small { num: n1, den: d1 }, View::Small { num: n2, den: d2 }) => {
                if d1 == d2 {
                    n1.cmp(n2)
                } else {
                    (*n1 as u128 * *d2 as u128).cmp(&(*n2 as u128 * *d1 as u128))
                }
            }
            _ => (self.numer() * other.denom()).cmp(&(other.numer() * self.denom())),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.view() {
            View::Small { num, den: 1 } => write!(f, "{num}"),
            View::Small { num, den } => write!(f, "{num}/{den}"),
            View::Big { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = QmlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || QmlError::Parse(format!("not a non-negative rational: {s:?}"));
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        match s.split_once('/') {
            None if digits(s) => Ok(Self::fit(s.parse().map_err(|_| bad())?, 1u32.into())),
            Some((n, d)) if digits(n) && digits(d) => {
                let n: BigUint = n.parse().map_err(|_| bad())?;
                let d: BigUint = d.parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(QmlError::Parse(format!("zero denominator in {s:?}")));
                }
                Ok(Self::from_big(n, d))
            }
            _ => Err(bad()),
        }
    }
}
