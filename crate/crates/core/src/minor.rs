//! Minor-like chords, central strips, and the stand-alone-minor test.
//!
//! A chord `m` is a stand-alone minor when
//!
//! * **SA1** it is minor-like: it is the image of a sibling pair `±M` with
//!   `|M| >= 1/3`, and it stays out of the open strip between `M` and `−M`;
//! * **SA2** its forward images are pairwise unlinked and never cross `±M`;
//! * **SA3** no forward image is shorter than `m`.
//!
//! Rational chords are eventually periodic, so every check runs over a finite
//! orbit and is exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::angle::{in_open_arc, Angle};
use crate::chord::{find_crossing, Chord};
use crate::error::{MinorLikeViolation, QmlError, Result};
use crate::rational::Rational;

/// The central strip `S(m)`: the region between the major `M` and its
/// sibling `−M`, both mapping onto `m`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "StripFields", try_from = "StripFields")]
pub struct Strip {
    minor: Chord,
    major: Chord,
    co_major: Chord,
}

#[derive(Serialize, Deserialize)]
struct StripFields {
    #[serde(with = "crate::chord::as_text")]
    m: Chord,
    #[serde(rename = "M", with = "crate::chord::as_text")]
    major: Chord,
    #[serde(rename = "minus_M", with = "crate::chord::as_text")]
    minus_major: Chord,
    /// Vertices of `Q(m) = CH(M ∪ −M)` in circular order.
    #[serde(rename = "Q")]
    quad: Vec<Angle>,
}

impl From<Strip> for StripFields {
    fn from(s: Strip) -> Self {
        StripFields {
            quad: s.quadrilateral(),
            m: s.minor,
            major: s.major,
            minus_major: s.co_major,
        }
    }
}

impl TryFrom<StripFields> for Strip {
    type Error = String;

    fn try_from(raw: StripFields) -> std::result::Result<Self, String> {
        let s = central_strip(&raw.m).map_err(|e| e.to_string())?;
        if s.major == raw.major && s.co_major == raw.minus_major && s.quadrilateral() == raw.quad {
            Ok(s)
        } else {
            Err(format!("strip data for {} does not match its central strip", raw.m))
        }
    }
}

impl Strip {
    pub fn minor(&self) -> &Chord {
        &self.minor
    }

    /// `M`.
    pub fn major(&self) -> &Chord {
        &self.major
    }

    /// `−M`.
    pub fn co_major(&self) -> &Chord {
        &self.co_major
    }

    /// Vertices of `Q(m) = CH(M ∪ −M)` in circular order; two points when
    /// `m` is degenerate.
    pub fn quadrilateral(&self) -> Vec<Angle> {
        let mut q: Vec<Angle> = [&self.major, &self.co_major]
            .into_iter()
            .flat_map(|c| c.endpoints())
            .cloned()
            .collect();
        q.sort();
        q.dedup();
        q
    }

    pub fn majors(&self) -> [&Chord; 2] {
        [&self.major, &self.co_major]
    }

    pub fn is_major(&self, c: &Chord) -> bool {
        c == &self.major || c == &self.co_major
    }

    /// Edges of `Q(m)` other than `±M`. Empty when `m` is degenerate.
    pub fn horizontal_edges(&self) -> Vec<Chord> {
        if self.minor.is_degenerate() {
            return Vec::new();
        }
        let q = self.quadrilateral();
        (0..4)
            .map(|i| Chord::new(q[i].clone(), q[(i + 1) % 4].clone()))
            .filter(|e| !self.is_major(e))
            .collect()
    }

    /// Whether a circle point lies on `S(m) ∩ 𝕊`.
    pub fn contains_point(&self, x: &Angle) -> bool {
        if self.minor.is_degenerate() {
            return self.major.has_endpoint(x);
        }
        let outside = |c: &Chord| {
            let (from, to) = c.short_arc();
            in_open_arc(x, from, to)
        };
        !outside(&self.major) && !outside(&self.co_major)
    }

    /// Whether a chord lies in the closed strip.
    pub fn contains_chord(&self, c: &Chord) -> bool {
        self.contains_point(c.a()) && self.contains_point(c.b())
    }

    /// Whether `c` crosses `M` or `−M`.
    pub fn crosses_edge(&self, c: &Chord) -> bool {
        c.linked(&self.major) || c.linked(&self.co_major)
    }
}

impl fmt::Debug for Strip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S({}: M={}, -M={})", self.minor, self.major, self.co_major)
    }
}

/// The sibling preimage pair of `m` with length at least 1/3, and the check
/// that `m` stays out of the strip interior.
pub fn central_strip(m: &Chord) -> Result<Strip> {
    if m.is_degenerate() {
        let (h0, h1) = m.a().halves();
        let diameter = Chord::new(h0, h1);
        return Ok(Strip {
            minor: m.clone(),
            major: diameter.clone(),
            co_major: diameter,
        });
    }
    let pairings = m.preimage_pairings();
    let mut long: Vec<[Chord; 2]> = pairings
        .into_iter()
        .filter(|p| p[0].length() >= Rational::THIRD)
        .collect();
    let pair = match long.len() {
        0 => return Err(QmlError::NotMinorLike(MinorLikeViolation::NoLongPreimagePair)),
        1 => long.pop().expect("one pair"),
        _ => long
            .into_iter()
            .find(|p| p.contains(m))
            .ok_or_else(|| QmlError::Invariant(format!("two long preimage pairs for {m}")))?,
    };
    let [p, q] = pair;
    // M is m itself for the invariant leaf, otherwise the smaller chord.
    let (major, co_major) = if q == *m || (p != *m && q < p) {
        (q, p)
    } else {
        (p, q)
    };
    let outside = m.behind(&major)?.is_behind() || m.behind(&co_major)?.is_behind();
    if !outside {
        return Err(QmlError::NotMinorLike(MinorLikeViolation::MeetsStripInterior));
    }
    Ok(Strip {
        minor: m.clone(),
        major,
        co_major,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    DegeneratePeriodic,
    DegeneratePreperiodic,
    NondegeneratePeriodic,
    NondegeneratePreperiodic,
}

impl Classification {
    pub fn is_periodic(self) -> bool {
        matches!(
            self,
            Classification::DegeneratePeriodic | Classification::NondegeneratePeriodic
        )
    }

    pub fn is_degenerate(self) -> bool {
        matches!(
            self,
            Classification::DegeneratePeriodic | Classification::DegeneratePreperiodic
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SaProperty {
    #[serde(rename = "SA1")]
    Sa1,
    #[serde(rename = "SA2")]
    Sa2,
    #[serde(rename = "SA3")]
    Sa3,
}

impl fmt::Display for SaProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SaProperty::Sa1 => "SA1",
            SaProperty::Sa2 => "SA2",
            SaProperty::Sa3 => "SA3",
        })
    }
}

/// Per-property verdicts. `None` means the property was not evaluated
/// (SA2 and SA3 need the strip, so they are skipped when SA1 fails).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(rename = "SA1")]
    pub sa1: bool,
    #[serde(rename = "SA2")]
    pub sa2: Option<bool>,
    #[serde(rename = "SA3")]
    pub sa3: Option<bool>,
}

impl Certificate {
    pub fn all_hold(&self) -> bool {
        self.sa1 && self.sa2 == Some(true) && self.sa3 == Some(true)
    }
}

/// A verified stand-alone minor. The orbit is recomputed on demand rather
/// than stored, which keeps large minor sets small.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "RecordFields", try_from = "RecordFields")]
pub struct MinorRecord {
    chord: Chord,
    classification: Classification,
    strip: Strip,
    preperiod: usize,
    period: usize,
    certificate: Certificate,
}

#[derive(Serialize, Deserialize)]
struct RecordFields {
    #[serde(with = "crate::chord::as_text")]
    chord: Chord,
    classification: Classification,
    strip: Strip,
    /// `m, σ₂(m), …` up to the first repeated chord.
    #[serde(with = "chord_list")]
    orbit_chords: Vec<Chord>,
    preperiod: usize,
    period: usize,
    certificate: Certificate,
}

mod chord_list {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::chord::Chord;

    pub fn serialize<S: Serializer>(v: &[Chord], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|c| c.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Chord>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl From<MinorRecord> for RecordFields {
    fn from(r: MinorRecord) -> Self {
        RecordFields {
            orbit_chords: r.orbit_chords(),
            chord: r.chord,
            classification: r.classification,
            strip: r.strip,
            preperiod: r.preperiod,
            period: r.period,
            certificate: r.certificate,
        }
    }
}

impl TryFrom<RecordFields> for MinorRecord {
    type Error = String;

    fn try_from(raw: RecordFields) -> std::result::Result<Self, String> {
        let rec = is_stand_alone_minor(&raw.chord).map_err(|r| r.to_string())?;
        let same = rec.classification == raw.classification
            && rec.strip == raw.strip
            && rec.orbit_chords() == raw.orbit_chords
            && rec.preperiod == raw.preperiod
            && rec.period == raw.period
            && rec.certificate == raw.certificate;
        if same {
            Ok(rec)
        } else {
            Err(format!("record for {} does not match its verification", raw.chord))
        }
    }
}

impl MinorRecord {
    pub fn chord(&self) -> &Chord {
        &self.chord
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    pub fn strip(&self) -> &Strip {
        &self.strip
    }

    /// `m, σ₂(m), …` up to the first repeated chord.
    pub fn orbit_chords(&self) -> Vec<Chord> {
        std::iter::successors(Some(self.chord.clone()), |c| Some(c.sigma()))
            .take(self.preperiod + self.period)
            .collect()
    }

    /// Chord preperiod under σ₂.
    pub fn preperiod(&self) -> usize {
        self.preperiod
    }

    /// Chord period under σ₂.
    pub fn period(&self) -> usize {
        self.period
    }

    pub fn certificate(&self) -> Certificate {
        self.certificate
    }

    pub fn is_periodic(&self) -> bool {
        self.classification.is_periodic()
    }

    pub fn is_degenerate(&self) -> bool {
        self.chord.is_degenerate()
    }

    pub fn length(&self) -> Rational {
        self.chord.length()
    }
}

impl fmt::Debug for MinorRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Minor({}, {:?})", self.chord, self.classification)
    }
}

/// Why a chord is not a stand-alone minor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub chord: Chord,
    /// First violated property, in the order SA1, SA3, SA2.
    pub property: SaProperty,
    /// Iterate at which the violation first shows, when there is one.
    pub witness: Option<usize>,
    pub detail: String,
    pub certificate: Certificate,
    pub strip: Option<Strip>,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rejected at {}", self.chord, self.property)?;
        if let Some(n) = self.witness {
            write!(f, " (witness n = {n})")?;
        }
        write!(f, ": {}", self.detail)
    }
}

/// Result of walking the forward orbit of a minor-like chord.
#[derive(Debug, Clone)]
pub struct OrbitScan {
    /// `σ₂^n(m)` for `n = 0, 1, …` until the first repeat (or until the scan
    /// stopped early).
    pub orbit: Vec<Chord>,
    /// Start index of the chord cycle; `None` if the scan stopped early.
    pub preperiod: Option<usize>,
    /// Least `n` at which `σ₂^n(m)` crosses `±M` or an earlier image.
    pub sa2_witness: Option<usize>,
    /// Least `n > 0` with `|σ₂^n(m)| < |m|`.
    pub sa3_witness: Option<usize>,
}

/// Preperiod of the chord orbit. An endpoint swap cannot close the cycle
/// before both endpoints are periodic, so this is the larger endpoint
/// preperiod.
pub(crate) fn cycle_start(m: &Chord) -> usize {
    m.a().preperiod().max(m.b().preperiod())
}

/// Walks the orbit of `m` checking SA2 and SA3. With `stop_at_sa2`, stops at
/// the first SA2 violation. Without it, stops only once SA3 has failed and
/// the orbit is very long, leaving SA2 undecided.
pub fn scan_orbit(m: &Chord, strip: &Strip, stop_at_sa2: bool) -> OrbitScan {
    if !stop_at_sa2 {
        return scan_full_orbit(m, strip);
    }
    let len = m.length();
    let start = cycle_start(m);
    let mut orbit: Vec<Chord> = Vec::new();
    let mut sa3_witness = None;
    let mut c = m.clone();
    loop {
        if orbit.len() > start && c == orbit[start] {
            break;
        }
        let n = orbit.len();
        if n > 0 && sa3_witness.is_none() && c.length() < len {
            sa3_witness = Some(n);
        }
        if strip.crosses_edge(&c) || orbit.iter().any(|e| e.linked(&c)) {
            orbit.push(c);
            return OrbitScan {
                orbit,
                preperiod: None,
                sa2_witness: Some(n),
                sa3_witness,
            };
        }
        let next = c.sigma();
        orbit.push(c);
        c = next;
    }
    OrbitScan {
        orbit,
        preperiod: Some(start),
        sa2_witness: None,
        sa3_witness,
    }
}

/// Beyond this many iterates a chord that already failed SA3 is not checked
/// for SA2. Chords with two large unequal endpoint periods have orbits as
/// long as the lcm of the periods.
const SA2_ORBIT_LIMIT: usize = 1 << 16;

fn scan_full_orbit(m: &Chord, strip: &Strip) -> OrbitScan {
    let len = m.length();
    let preperiod = cycle_start(m);
    let mut orbit: Vec<Chord> = Vec::new();
    let mut sa3_witness = None;
    let mut c = m.clone();
    while orbit.len() <= preperiod || c != orbit[preperiod] {
        let n = orbit.len();
        if n > 0 && sa3_witness.is_none() && c.length() < len {
            sa3_witness = Some(n);
        }
        let next = c.sigma();
        orbit.push(c);
        c = next;
        if sa3_witness.is_some() && n >= SA2_ORBIT_LIMIT {
            // Rejected already; SA2 on a huge orbit is left undecided.
            return OrbitScan {
                orbit,
                preperiod: None,
                sa2_witness: None,
                sa3_witness,
            };
        }
    }
    let mut family = orbit.clone();
    family.extend(strip.majors().into_iter().cloned());
    let sa2_witness = find_crossing(&family).map(|_| {
        (0..orbit.len())
            .find(|&n| strip.crosses_edge(&orbit[n]) || orbit[..n].iter().any(|e| e.linked(&orbit[n])))
            .expect("a crossing involves an orbit chord")
    });
    OrbitScan {
        orbit,
        preperiod: Some(preperiod),
        sa2_witness,
        sa3_witness,
    }
}

/// Decides SA1–SA3 for a rational chord.
#[allow(clippy::result_large_err)]
pub fn is_stand_alone_minor(m: &Chord) -> std::result::Result<MinorRecord, Rejection> {
    let strip = match central_strip(m) {
        Ok(s) => s,
        Err(e) => {
            let detail = match e {
                QmlError::NotMinorLike(v) => v.to_string(),
                other => other.to_string(),
            };
            return Err(Rejection {
                chord: m.clone(),
                property: SaProperty::Sa1,
                witness: None,
                detail,
                certificate: Certificate {
                    sa1: false,
                    sa2: None,
                    sa3: None,
                },
                strip: None,
            });
        }
    };
    let scan = scan_orbit(m, &strip, false);
    let certificate = Certificate {
        sa1: true,
        sa2: scan.preperiod.map(|_| scan.sa2_witness.is_none()),
        sa3: Some(scan.sa3_witness.is_none()),
    };
    if let Some(n) = scan.sa3_witness {
        return Err(Rejection {
            chord: m.clone(),
            property: SaProperty::Sa3,
            witness: Some(n),
            detail: format!(
                "|σ₂^{n}(m)| = {} < |m| = {}",
                scan.orbit[n].length(),
                m.length()
            ),
            certificate,
            strip: Some(strip),
        });
    }
    if let Some(n) = scan.sa2_witness {
        let c = &scan.orbit[n];
        let detail = if strip.crosses_edge(c) {
            format!("σ₂^{n}(m) = {c} crosses an edge of the central strip")
        } else {
            let k = scan.orbit.iter().position(|e| e.linked(c)).unwrap_or(0);
            format!("σ₂^{n}(m) = {c} crosses σ₂^{k}(m) = {}", scan.orbit[k])
        };
        return Err(Rejection {
            chord: m.clone(),
            property: SaProperty::Sa2,
            witness: Some(n),
            detail,
            certificate,
            strip: Some(strip),
        });
    }
    let preperiod = scan.preperiod.expect("full scan closes the orbit");
    let classification = match (m.is_degenerate(), preperiod == 0) {
        (true, true) => Classification::DegeneratePeriodic,
        (true, false) => Classification::DegeneratePreperiodic,
        (false, true) => Classification::NondegeneratePeriodic,
        (false, false) => Classification::NondegeneratePreperiodic,
    };
    Ok(MinorRecord {
        chord: m.clone(),
        classification,
        strip,
        period: scan.orbit.len() - preperiod,
        preperiod,
        certificate,
    })
}

/// Least `n >= 0` with `σ₂^n(c) == target`, within the eventual orbit of `c`.
pub fn first_hit(c: &Chord, target: &Chord) -> Option<usize> {
    chord_orbit(c).iter().position(|x| x == target)
}

/// `σ₂^n(c)` for `n` from 0 up to just before the first repeat.
pub(crate) fn chord_orbit(c: &Chord) -> Vec<Chord> {
    let start = cycle_start(c);
    let mut orbit: Vec<Chord> = Vec::new();
    let mut x = c.clone();
    while orbit.len() <= start || x != orbit[start] {
        let next = x.sigma();
        orbit.push(x);
        x = next;
    }
    orbit
}

/// Whether `m1` is a derived minor of `m`: a leaf behind `m` (per the
/// membership predicate) whose images never separate it from `m` and never
/// land on a horizontal edge of `Q(m)`. Separation is only tested before the
/// first arrival at `m`.
pub fn is_derived_minor<F>(m1: &Chord, m: &MinorRecord, in_lamination: F) -> Result<bool>
where
    F: Fn(&Chord) -> bool,
{
    if !m1.behind(m.chord())?.is_behind() {
        return Err(QmlError::Domain(format!("{m1} is not behind {}", m.chord())));
    }
    if !in_lamination(m1) {
        return Err(QmlError::Domain(format!(
            "{m1} is not a known leaf of the lamination of {}",
            m.chord()
        )));
    }
    let horizontal = m.strip().horizontal_edges();
    let mut reached = false;
    for (i, image) in chord_orbit(m1).iter().enumerate() {
        if horizontal.contains(image) {
            return Ok(false);
        }
        if image == m.chord() {
            reached = true;
        }
        if i > 0 && !reached && !image.is_degenerate() && image.separates(m1, m.chord())? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A derived minor that is a proper preimage of `m` under some iterate.
pub fn is_child<F>(m1: &Chord, m: &MinorRecord, in_lamination: F) -> Result<bool>
where
    F: Fn(&Chord) -> bool,
{
    if m1 == m.chord() {
        return Ok(false);
    }
    Ok(is_derived_minor(m1, m, in_lamination)? && first_hit(m1, m.chord()).is_some())
}

/// Outcome of the length-drop check for one chord.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DropCheck {
    /// SA1 or SA2 fails; nothing is claimed.
    NotApplicable,
    /// Length never drops below `|m|`.
    NoDrop,
    /// The drop happens at `n`, and the conclusion holds.
    Holds { n: usize },
    /// The drop happens at `n` and the conclusion fails.
    Violated { n: usize, reason: String },
}

/// If SA1 and SA2 hold and the length of `m` first drops at iterate `n`,
/// then `σ₂^{n−1}(m)` should be a vertical chord in `S(m)` other than `±M`,
/// and `σ₂^n(m) ≤ m`. Checks that claim.
pub fn length_drop_check(m: &Chord) -> DropCheck {
    if m.is_degenerate() {
        return DropCheck::NotApplicable;
    }
    let Ok(strip) = central_strip(m) else {
        return DropCheck::NotApplicable;
    };
    let scan = scan_orbit(m, &strip, true);
    if scan.sa2_witness.is_some() {
        return DropCheck::NotApplicable;
    }
    let Some(n) = scan.sa3_witness else {
        return DropCheck::NoDrop;
    };
    let before = &scan.orbit[n - 1];
    let after = &scan.orbit[n];
    let vertical = !before.is_degenerate() && before.is_vertical().unwrap_or(false);
    if !vertical {
        return DropCheck::Violated {
            n,
            reason: format!("σ₂^{}(m) = {before} is not vertical", n - 1),
        };
    }
    if !strip.contains_chord(before) || strip.is_major(before) {
        return DropCheck::Violated {
            n,
            reason: format!("σ₂^{}(m) = {before} is not strictly inside the strip", n - 1),
        };
    }
    match after.behind(m) {
        Ok(b) if b.is_behind() => DropCheck::Holds { n },
        _ => DropCheck::Violated {
            n,
            reason: format!("σ₂^{n}(m) = {after} is not behind m"),
        },
    }
}
