//! Exact combinatorics of quadratic minor laminations built from stand-alone
//! minors, with rational angles throughout.

pub mod angle;
pub mod chord;
pub mod error;
pub mod exec;
pub mod io;
pub mod minor;
pub mod oracle;
pub mod params;
pub mod pullback;
pub mod rational;
pub mod svg;
pub mod tuning;

pub use angle::Angle;
pub use chord::{Behind, Chord};
pub use error::{QmlError, Result};
pub use exec::Execution;
pub use minor::{central_strip, is_stand_alone_minor, MinorRecord, Rejection, Strip};
pub use oracle::{enumerate_periodic_minors, hausdorff_distance, EnumerationReport};
pub use params::{cardioid_edges, children, offspring, qml_nr_approx, CardioidEdge, OffspringTree, QmlLeaf};
pub use pullback::{build_lamination, m_pullbacks, Lamination};
pub use rational::Rational;
pub use tuning::{qml_approx, tune_angle, tune_chord, TuningWords};
