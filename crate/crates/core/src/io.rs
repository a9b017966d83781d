//! JSON and CSV documents for the command-line artifacts.

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::chord::Chord;
use crate::error::{QmlError, Result};
use crate::minor::{Certificate, Classification, MinorRecord, Rejection, SaProperty, Strip};
use crate::oracle::{EnumerationReport, Verdict};
use crate::params::{CardioidEdge, QmlLeaf, RotationNumber};
use crate::pullback::Lamination;
use crate::tuning::TuningWords;

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string(value)
        .map_err(|e| QmlError::Invariant(format!("JSON encoding failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| QmlError::Parse(e.to_string()))
}

/// Header row plus one row per record.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let fail = |e: &dyn std::fmt::Display| QmlError::Invariant(format!("CSV encoding failed: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| fail(&e))?;
    }
    let bytes = w.into_inner().map_err(|e| fail(&e))?;
    String::from_utf8(bytes).map_err(|e| fail(&e))
}

pub fn from_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| QmlError::Parse(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafRow {
    pub a: Angle,
    pub b: Angle,
}

pub fn lamination_rows(lam: &Lamination) -> Vec<LeafRow> {
    lam.leaves()
        .iter()
        .map(|c| LeafRow { a: c.a().clone(), b: c.b().clone() })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QmlNrParams {
    pub max_q: u64,
    pub generations: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QmlNrRow {
    #[serde(with = "crate::chord::as_text")]
    pub chord: Chord,
    pub root: RotationNumber,
    pub iterates_to_root: usize,
    pub generation: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QmlNrDocument {
    pub params: QmlNrParams,
    pub leaves: Vec<QmlNrRow>,
}

impl QmlNrDocument {
    pub fn new(params: QmlNrParams, leaves: &[QmlLeaf]) -> Self {
        let leaves = leaves
            .iter()
            .map(|l| QmlNrRow {
                chord: l.minor.chord().clone(),
                root: l.root,
                iterates_to_root: l.iterates_to_root,
                generation: l.generation,
            })
            .collect();
        QmlNrDocument { params, leaves }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QmlParams {
    pub max_q: u64,
    pub generations: usize,
    pub depth: usize,
    pub levels: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorRow {
    #[serde(with = "crate::chord::as_text")]
    pub chord: Chord,
    pub classification: Classification,
    pub preperiod: usize,
    pub period: usize,
}

impl From<&MinorRecord> for MinorRow {
    fn from(m: &MinorRecord) -> Self {
        MinorRow {
            chord: m.chord().clone(),
            classification: m.classification(),
            preperiod: m.preperiod(),
            period: m.period(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QmlDocument {
    pub params: QmlParams,
    pub leaves: Vec<MinorRow>,
}

impl QmlDocument {
    pub fn new(params: QmlParams, minors: &[MinorRecord]) -> Self {
        QmlDocument { params, leaves: minors.iter().map(MinorRow::from).collect() }
    }
}

/// Outcome of the stand-alone test in printable form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    #[serde(with = "crate::chord::as_text")]
    pub chord: Chord,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classification: Option<Classification>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub strip: Option<Strip>,
    pub certificate: Certificate,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub violated_property: Option<SaProperty>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl CertificateReport {
    pub fn new(outcome: &std::result::Result<MinorRecord, Rejection>) -> Self {
        match outcome {
            Ok(m) => CertificateReport {
                chord: m.chord().clone(),
                verdict: Verdict::Accepted,
                classification: Some(m.classification()),
                strip: Some(m.strip().clone()),
                certificate: m.certificate(),
                violated_property: None,
                witness: None,
                detail: None,
            },
            Err(r) => CertificateReport {
                chord: r.chord.clone(),
                verdict: Verdict::Rejected,
                classification: None,
                strip: r.strip.clone(),
                certificate: r.certificate,
                violated_property: Some(r.property),
                witness: r.witness,
                detail: Some(r.detail.clone()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardioidRow {
    pub rotation: RotationNumber,
    #[serde(with = "crate::chord::as_text")]
    pub chord: Chord,
}

pub fn cardioid_rows(edges: &[CardioidEdge]) -> Vec<CardioidRow> {
    edges
        .iter()
        .map(|e| CardioidRow { rotation: e.rotation, chord: e.minor.chord().clone() })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffspringReport {
    #[serde(with = "crate::chord::as_text")]
    pub minor: Chord,
    pub angle: Angle,
    #[serde(with = "crate::chord::as_text")]
    pub offspring: Chord,
    /// Least `n` with `σ₂^n(offspring) = minor`.
    pub iterates: usize,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuneReport {
    #[serde(with = "crate::chord::as_text")]
    pub base: Chord,
    pub word0: String,
    pub word1: String,
    #[serde(with = "crate::chord::as_text")]
    pub chord: Chord,
    pub tuned: CertificateReport,
}

impl TuneReport {
    pub fn new(words: &TuningWords, chord: &Chord, tuned: &MinorRecord) -> Self {
        TuneReport {
            base: words.base().chord().clone(),
            word0: words.word0(),
            word1: words.word1(),
            chord: chord.clone(),
            tuned: CertificateReport::new(&Ok(tuned.clone())),
        }
    }
}

pub fn oracle_csv(report: &EnumerationReport) -> Result<String> {
    to_csv(&report.rows())
}
