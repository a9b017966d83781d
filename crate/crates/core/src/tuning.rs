//! Tuning: embedding the parameter lamination behind a periodic minor by
//! substituting the binary blocks of its endpoints.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::angle::Angle;
use crate::chord::Chord;
use crate::error::{QmlError, Result};
use crate::exec::Execution;
use crate::minor::{is_stand_alone_minor, MinorRecord};
use crate::params::qml_nr_approx_with;
use crate::rational::Rational;

/// Substitution words of a non-degenerate periodic base minor. Both words
/// have the endpoint period as length; `word0` comes from the smaller
/// endpoint.
#[derive(Clone, PartialEq, Eq)]
pub struct TuningWords {
    base: MinorRecord,
    p: u32,
    w0: BigUint,
    w1: BigUint,
}

impl TuningWords {
    pub fn new(base: MinorRecord) -> Result<Self> {
        if base.is_degenerate() || !base.is_periodic() {
            return Err(QmlError::Argument(format!(
                "tuning base {} must be a non-degenerate periodic minor",
                base.chord()
            )));
        }
        let [lo, hi] = base.chord().endpoints();
        let p = periodic_block_length(lo);
        if p != periodic_block_length(hi) {
            return Err(QmlError::Invariant(format!(
                "endpoints of {} have different periods",
                base.chord()
            )));
        }
        let p = u32::try_from(p)
            .map_err(|_| QmlError::Argument(format!("period {p} too large")))?;
        let scale = (BigUint::one() << p) - 1u32;
        let block = |x: &Angle| {
            let v = x.value();
            let w = v.numer() * &scale;
            debug_assert!((&w % v.denom()).is_zero());
            w / v.denom()
        };
        let (w0, w1) = (block(lo), block(hi));
        Ok(TuningWords { base, p, w0, w1 })
    }

    pub fn for_chord(base: &Chord) -> Result<Self> {
        let record = is_stand_alone_minor(base)
            .map_err(|r| QmlError::Argument(format!("tuning base is not a minor: {r}")))?;
        Self::new(record)
    }

    pub fn base(&self) -> &MinorRecord {
        &self.base
    }

    pub fn word_length(&self) -> u32 {
        self.p
    }

    pub fn word0(&self) -> String {
        bits(&self.w0, self.p)
    }

    pub fn word1(&self) -> String {
        bits(&self.w1, self.p)
    }

    /// Replace each bit of a `len`-bit block by its word.
    fn substitute(&self, block: &BigUint, len: u64) -> BigUint {
        let mut out = BigUint::zero();
        for i in (0..len).rev() {
            out <<= self.p;
            out += if block.bit(i) { &self.w1 } else { &self.w0 };
        }
        out
    }

    fn image(&self, e: &Expansion) -> Angle {
        let p = u64::from(self.p);
        let head = self.substitute(&e.prefix, e.prefix_len);
        let tail = self.substitute(&e.block, e.block_len);
        let cycle = (BigUint::one() << (e.block_len * p)) - 1u32;
        let num = head * &cycle + tail;
        let den = cycle << (e.prefix_len * p);
        Angle::from_rational(Rational::from_big(num, den))
    }
}

impl fmt::Debug for TuningWords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TuningWords({}: {}/{})", self.base.chord(), self.word0(), self.word1())
    }
}

fn bits(w: &BigUint, len: u32) -> String {
    (0..u64::from(len)).rev().map(|i| if w.bit(i) { '1' } else { '0' }).collect()
}

fn periodic_block_length(x: &Angle) -> usize {
    let mut y = x.double();
    let mut n = 1;
    while &y != x {
        y = y.double();
        n += 1;
    }
    n
}

/// Binary expansion `0.prefix (block)` with explicit lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Expansion {
    prefix: BigUint,
    prefix_len: u64,
    block: BigUint,
    block_len: u64,
}

/// The expansion of `θ` ending in a repeating block; dyadic angles get
/// their 0-terminating expansion.
fn expansion(theta: &Angle) -> Expansion {
    let k = theta.preperiod();
    let v = theta.value();
    let shifted = v.numer() << k;
    let prefix = &shifted / v.denom();
    let tail = Angle::from_rational(Rational::from_big(shifted % v.denom(), v.denom()));
    let r = periodic_block_length(&tail);
    let cycle = (BigUint::one() << r) - 1u32;
    let t = tail.value();
    let block = t.numer() * cycle / t.denom();
    Expansion { prefix, prefix_len: k as u64, block, block_len: r as u64 }
}

/// The 1-terminating expansion of a dyadic angle.
fn ones_expansion(theta: &Angle) -> Expansion {
    let k = theta.preperiod() as u64;
    let v = theta.value();
    let prefix = (v.numer() << k) / v.denom();
    Expansion {
        // 0 = 0.(1) has no prefix; otherwise the last 1 of the prefix turns
        // into 0 followed by ones.
        prefix: if k == 0 { BigUint::zero() } else { prefix - 1u32 },
        prefix_len: k,
        block: BigUint::one(),
        block_len: 1,
    }
}

fn is_dyadic(theta: &Angle) -> bool {
    theta.value().denom().count_ones() == 1
}

/// Substitutes the words into the (0-terminating) expansion of `θ`.
pub fn tune_angle(w: &TuningWords, theta: &Angle) -> Angle {
    w.image(&expansion(theta))
}

/// Images of both expansions of `θ`, as `(from 1-terminating, from
/// 0-terminating)`. The two coincide unless `θ` is dyadic.
pub fn tune_angle_pair(w: &TuningWords, theta: &Angle) -> (Angle, Angle) {
    let plus = tune_angle(w, theta);
    if !is_dyadic(theta) {
        return (plus.clone(), plus);
    }
    (w.image(&ones_expansion(theta)), plus)
}

/// Tunes a minor into the wake of the base and re-verifies it.
///
/// A degenerate dyadic minor `{θ}` with `θ != 0` opens into the chord
/// between its two images. `{0}` goes to the point image of `0.(0)`.
pub fn tune_chord(w: &TuningWords, ell: &Chord) -> Result<MinorRecord> {
    let image = if ell.is_degenerate() {
        let theta = ell.a();
        let (minus, plus) = tune_angle_pair(w, theta);
        if theta.value().is_zero() {
            Chord::point(plus)
        } else {
            Chord::new(minus, plus)
        }
    } else {
        Chord::new(tune_angle(w, ell.a()), tune_angle(w, ell.b()))
    };
    is_stand_alone_minor(&image).map_err(|r| {
        QmlError::Invariant(format!(
            "tuning {ell} by {} gave a chord that is not a minor: {r}",
            w.base.chord()
        ))
    })
}

pub fn qml_approx(
    max_q: u64,
    generations: usize,
    depth: usize,
    levels: usize,
) -> Result<Vec<MinorRecord>> {
    qml_approx_with(max_q, generations, depth, levels, Execution::default())
}

/// Level 0 is the non-renormalizable approximation. Each further level adds
/// the images of level 0 under every periodic minor new at the previous
/// level. Output is sorted by chord.
pub fn qml_approx_with(
    max_q: u64,
    generations: usize,
    depth: usize,
    levels: usize,
    exec: Execution,
) -> Result<Vec<MinorRecord>> {
    let level0: Vec<MinorRecord> = qml_nr_approx_with(max_q, generations, depth, exec)?
        .into_iter()
        .map(|leaf| leaf.minor)
        .collect();
    let seeds: Vec<Chord> = level0.iter().map(|m| m.chord().clone()).collect();
    let mut all = level0.clone();
    let mut fresh = level0;
    for _ in 0..levels {
        let bases = fresh
            .iter()
            .filter(|m| m.is_periodic() && !m.is_degenerate())
            .map(|m| TuningWords::new(m.clone()))
            .collect::<Result<Vec<_>>>()?;
        let jobs: Vec<(&TuningWords, &Chord)> =
            bases.iter().flat_map(|w| seeds.iter().map(move |s| (w, s))).collect();
        let tuned = exec.map(&jobs, |(w, s)| tune_chord(w, s));
        let mut next = tuned.into_iter().collect::<Result<Vec<_>>>()?;
        next.sort_by(|x, y| x.chord().cmp(y.chord()));
        next.dedup_by(|x, y| x.chord() == y.chord());
        all.sort_by(|x, y| x.chord().cmp(y.chord()));
        next.retain(|m| all.binary_search_by(|x| x.chord().cmp(m.chord())).is_err());
        all.extend(next.iter().cloned());
        fresh = next;
    }
    all.sort_by(|x, y| x.chord().cmp(y.chord()));
    all.dedup_by(|x, y| x.chord() == y.chord());
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Angle {
        s.parse().unwrap()
    }

    fn c(s: &str) -> Chord {
        s.parse().unwrap()
    }

    fn words(s: &str) -> TuningWords {
        TuningWords::for_chord(&c(s)).unwrap()
    }

    // Independent oracle: the first `n` bits of θ by repeated doubling.
    fn leading_bits(theta: &Angle, n: usize) -> String {
        let mut x = theta.clone();
        let half = a("1/2");
        (0..n)
            .map(|_| {
                let bit = if x >= half { '1' } else { '0' };
                x = x.double();
                bit
            })
            .collect()
    }

    #[test]
    fn words_are_endpoint_blocks() {
        let w = words("1/7-2/7");
        assert_eq!((w.word0().as_str(), w.word1().as_str()), ("001", "010"));
        let w = words("1/3-2/3");
        assert_eq!((w.word0().as_str(), w.word1().as_str()), ("01", "10"));
        assert_eq!(w.word_length(), 2);
        assert!(TuningWords::for_chord(&c("5/12-7/12")).is_err());
    }

    #[test]
    fn tune_angle_examples() {
        let w = words("1/7-2/7");
        assert_eq!(tune_angle(&w, &a("1/3")), a("10/63"));
        assert_eq!(tune_angle(&w, &a("2/3")), a("17/63"));
        assert_eq!(tune_angle(&w, &a("0")), a("1/7"));
    }

    #[test]
    fn tune_chord_examples() {
        let w = words("1/7-2/7");
        let m = tune_chord(&w, &c("1/3-2/3")).unwrap();
        assert_eq!(m.chord(), &c("10/63-17/63"));
        assert_eq!(m.period(), 3);
        assert_eq!(tune_chord(&w, &Chord::point(a("0"))).unwrap().chord(), &Chord::point(a("1/7")));
        let w = words("1/3-2/3");
        assert_eq!(tune_chord(&w, &c("1/3-2/3")).unwrap().chord(), &c("2/5-3/5"));
        // The tip {1/2} opens into the chord 5/12-7/12.
        assert_eq!(tune_chord(&w, &Chord::point(a("1/2"))).unwrap().chord(), &c("5/12-7/12"));
    }

    #[test]
    fn dyadic_pairs() {
        let w = words("1/3-2/3");
        assert_eq!(tune_angle_pair(&w, &a("1/2")), (a("5/12"), a("7/12")));
        assert_eq!(tune_angle_pair(&w, &a("0")), (a("2/3"), a("1/3")));
        assert_eq!(tune_angle_pair(&w, &a("1/5")).0, tune_angle_pair(&w, &a("1/5")).1);
    }

    #[test]
    fn image_expansion_is_the_substituted_word() {
        for base in ["1/7-2/7", "1/3-2/3", "3/7-4/7", "3/15-4/15"] {
            let w = words(base);
            for theta in ["1/3", "5/12", "3/10", "1/4", "7/9", "11/48"] {
                let theta = a(theta);
                let n = 24;
                let expected: String = leading_bits(&theta, n)
                    .chars()
                    .map(|b| if b == '0' { w.word0() } else { w.word1() })
                    .collect();
                let got = leading_bits(&tune_angle(&w, &theta), n * w.word_length() as usize);
                assert_eq!(got, expected, "{base} {theta}");
            }
        }
    }

    #[test]
    fn semiconjugacy_and_order() {
        for base in ["1/7-2/7", "1/3-2/3", "3/7-4/7", "2/5-3/5"] {
            let w = words(base);
            let p = w.word_length() as usize;
            let mut thetas: Vec<Angle> = (1..40u64)
                .flat_map(|d| (0..d).map(move |n| Angle::new(n, d)))
                .collect();
            thetas.sort();
            thetas.dedup();
            let images: Vec<Angle> = thetas.iter().map(|t| tune_angle(&w, t)).collect();
            for (t, img) in thetas.iter().zip(&images) {
                assert_eq!(img.double_n(p), tune_angle(&w, &t.double()), "{base} {t}");
            }
            assert!(images.windows(2).all(|x| x[0] < x[1]), "{base}");
        }
    }

    #[test]
    fn tuned_minors_lie_behind_the_base() {
        let level0 = crate::params::qml_nr_approx(4, 1, 5).unwrap();
        for base in ["1/7-2/7", "1/3-2/3"] {
            let w = words(base);
            for leaf in &level0 {
                let m = tune_chord(&w, leaf.minor.chord()).unwrap();
                assert!(m.chord().behind(&c(base)).unwrap().is_behind(), "{}", m.chord());
            }
        }
    }

    #[test]
    fn qml_levels() {
        let l0: Vec<Chord> = qml_approx(3, 1, 4, 0)
            .unwrap()
            .iter()
            .map(|m| m.chord().clone())
            .collect();
        let nr: Vec<Chord> = crate::params::qml_nr_approx(3, 1, 4)
            .unwrap()
            .iter()
            .map(|l| l.minor.chord().clone())
            .collect();
        assert_eq!(l0, nr);
        let l1: Vec<Chord> = qml_approx(2, 1, 2, 1)
            .unwrap()
            .iter()
            .map(|m| m.chord().clone())
            .collect();
        assert!(l1.contains(&c("2/5-3/5")));
        let l2 = qml_approx(3, 1, 3, 2).unwrap();
        let chords: Vec<Chord> = l2.iter().map(|m| m.chord().clone()).collect();
        assert!(crate::chord::pairwise_unlinked(&chords));
        assert!(l2.len() > l0.len());
    }
}
