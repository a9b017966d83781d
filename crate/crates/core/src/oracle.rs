//! Brute-force ground truth: exhaustive periodic-minor enumeration and
//! Hausdorff distance between finite chord sets.

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::chord::Chord;
use crate::error::{QmlError, Result};
use crate::exec::Execution;
use crate::minor::{is_stand_alone_minor, SaProperty};
use crate::rational::Rational;

pub const DEFAULT_PERIOD_BOUND: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedCandidate {
    #[serde(with = "crate::chord::as_text")]
    pub chord: Chord,
    pub property: SaProperty,
    pub witness: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub period: u32,
    pub period_bound: u32,
    pub candidates_checked: usize,
    pub accepted: Vec<Chord>,
    pub rejected_with_witness: Vec<RejectedCandidate>,
}

/// One row of the CSV report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRow {
    #[serde(with = "crate::chord::as_text")]
    pub chord: Chord,
    pub verdict: Verdict,
    #[serde(rename = "violated-property")]
    pub violated_property: Option<SaProperty>,
    pub witness: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accepted,
    Rejected,
}

impl EnumerationReport {
    /// All candidates in chord order, for the CSV report.
    pub fn rows(&self) -> Vec<VerdictRow> {
        let mut rows: Vec<VerdictRow> = self
            .accepted
            .iter()
            .map(|c| VerdictRow {
                chord: c.clone(),
                verdict: Verdict::Accepted,
                violated_property: None,
                witness: None,
            })
            .chain(self.rejected_with_witness.iter().map(|r| VerdictRow {
                chord: r.chord.clone(),
                verdict: Verdict::Rejected,
                violated_property: Some(r.property),
                witness: r.witness,
            }))
            .collect();
        rows.sort_by(|x, y| x.chord.cmp(&y.chord));
        rows
    }
}

/// Angles of exact period `q`, increasing.
pub fn exact_period_angles(q: u32) -> Vec<Angle> {
    let den = (1u64 << q) - 1;
    (1..den)
        .map(|k| Angle::new(k, den))
        .filter(|a| a.orbit_info().period == q as usize)
        .collect()
}

pub fn enumerate_periodic_minors(q: u32) -> Result<EnumerationReport> {
    enumerate_periodic_minors_with(q, DEFAULT_PERIOD_BOUND, Execution::default())
}

/// Runs the stand-alone test on every non-degenerate chord whose endpoints
/// both have exact period `q`. Endpoints may lie on one orbit or on two.
pub fn enumerate_periodic_minors_with(
    q: u32,
    bound: u32,
    exec: Execution,
) -> Result<EnumerationReport> {
    if q < 2 || q > bound {
        return Err(QmlError::Argument(format!("period must be in 2..={bound}, got {q}")));
    }
    if bound > 31 {
        return Err(QmlError::Argument(format!("period bound {bound} exceeds 31")));
    }
    let angles = exact_period_angles(q);
    let candidates: Vec<Chord> = angles
        .iter()
        .enumerate()
        .flat_map(|(i, a)| angles[i + 1..].iter().map(move |b| Chord::new(a.clone(), b.clone())))
        .collect();
    let verdicts = exec.map(&candidates, |c| is_stand_alone_minor(c).map(|_| ()).map_err(|r| (r.property, r.witness)));
    let mut accepted = Vec::new();
    let mut rejected_with_witness = Vec::new();
    for (c, v) in candidates.iter().zip(verdicts) {
        match v {
            Ok(()) => accepted.push(c.clone()),
            Err((property, witness)) => rejected_with_witness.push(RejectedCandidate {
                chord: c.clone(),
                property,
                witness,
            }),
        }
    }
    Ok(EnumerationReport {
        period: q,
        period_bound: bound,
        candidates_checked: candidates.len(),
        accepted,
        rejected_with_witness,
    })
}

/// `max_{a ∈ A} min_{b ∈ B} d(a, b)`.
pub fn directed_distance(a: &[Chord], b: &[Chord]) -> Result<Rational> {
    if a.is_empty() || b.is_empty() {
        return Err(QmlError::Argument("Hausdorff distance needs non-empty sets".into()));
    }
    Ok(a.iter()
        .map(|x| b.iter().map(|y| x.distance(y)).min().expect("non-empty"))
        .max()
        .expect("non-empty"))
}

pub fn hausdorff_distance(a: &[Chord], b: &[Chord]) -> Result<Rational> {
    Ok(directed_distance(a, b)?.max(directed_distance(b, a)?))
}
