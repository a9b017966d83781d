//! m-pullbacks and finite-depth approximations of the minor leaf lamination
//! `ℒ(m)`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::chord::Chord;
use crate::error::{QmlError, Result};
use crate::exec::Execution;
use crate::minor::{MinorRecord, Strip};
use crate::rational::Rational;

/// The m-pullbacks of `ell`, following the case split on the position of
/// `ell` relative to `m`.
pub fn m_pullbacks(m: &MinorRecord, ell: &Chord) -> Result<Vec<Chord>> {
    pullbacks_in(m.strip(), ell)
}

/// [`m_pullbacks`] given only the central strip of `m`.
pub fn pullbacks_in(strip: &Strip, ell: &Chord) -> Result<Vec<Chord>> {
    let m = strip.minor();
    if ell.linked(m) {
        return Err(QmlError::Domain(format!("{ell} is linked with the minor {m}")));
    }
    if ell == m {
        let mut out = vec![strip.major().clone(), strip.co_major().clone()];
        out.dedup();
        return Ok(out);
    }
    if ell.is_degenerate() {
        let (h0, h1) = ell.a().halves();
        return Ok(vec![Chord::point(h0), Chord::point(h1)]);
    }
    let [p, q] = ell.preimage_pairings();
    if !m.is_degenerate() && ell.behind(m)?.is_behind() {
        // Horizontal pullbacks: the shorter pairing.
        return Ok(if p[0].length() <= q[0].length() {
            p.to_vec()
        } else {
            q.to_vec()
        });
    }
    if m.is_degenerate() && ell.has_endpoint(m.a()) {
        return Ok(p
            .into_iter()
            .chain(q)
            .filter(|c| c.length() <= Rational::QUARTER)
            .collect());
    }
    let clear = |pair: &[Chord; 2]| pair.iter().all(|c| !strip.crosses_edge(c));
    match (clear(&p), clear(&q)) {
        (true, false) => Ok(p.to_vec()),
        (false, true) => Ok(q.to_vec()),
        _ => Err(QmlError::Invariant(format!(
            "no unique pullback pair of {ell} avoiding the strip edges of {m}"
        ))),
    }
}

/// A finite piece of `ℒ(m)`: the orbit of `m`, `±M`, and their iterated
/// m-pullbacks up to `depth` steps. Leaves are sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LaminationFields")]
pub struct Lamination {
    #[serde(with = "crate::chord::as_text")]
    seed: Chord,
    depth: usize,
    leaves: Vec<Chord>,
    includes_quadrilateral: bool,
}

#[derive(Deserialize)]
struct LaminationFields {
    #[serde(with = "crate::chord::as_text")]
    seed: Chord,
    depth: usize,
    leaves: Vec<Chord>,
    includes_quadrilateral: bool,
}

impl TryFrom<LaminationFields> for Lamination {
    type Error = String;

    fn try_from(raw: LaminationFields) -> std::result::Result<Self, String> {
        if raw.leaves.windows(2).any(|w| w[0] >= w[1]) {
            return Err("lamination leaves must be strictly increasing".into());
        }
        Ok(Lamination {
            seed: raw.seed,
            depth: raw.depth,
            leaves: raw.leaves,
            includes_quadrilateral: raw.includes_quadrilateral,
        })
    }
}

impl Lamination {
    pub fn seed(&self) -> &Chord {
        &self.seed
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn leaves(&self) -> &[Chord] {
        &self.leaves
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    /// True when `ℒ(m)` is the bigger of two laminations with minor `m` and
    /// the vertical edges of `Q(m)` are among the leaves.
    pub fn includes_quadrilateral(&self) -> bool {
        self.includes_quadrilateral
    }

    pub fn contains(&self, c: &Chord) -> bool {
        self.leaves.binary_search(c).is_ok()
    }

    /// Largest circular gap between consecutive leaf endpoints. A coarse
    /// measure of how far the finite approximation is from dense.
    pub fn max_endpoint_gap(&self) -> Rational {
        let mut pts: Vec<&Angle> = self.leaves.iter().flat_map(|c| c.endpoints()).collect();
        pts.sort();
        pts.dedup();
        let Some((&first, &last)) = pts.first().zip(pts.last()) else {
            return Rational::ONE;
        };
        let wrap = first.value().add(&last.value().complement());
        pts.windows(2)
            .map(|w| w[1].value().checked_sub(w[0].value()).expect("sorted"))
            .fold(wrap, std::cmp::max)
    }
}

pub fn build_lamination(m: &MinorRecord, depth: usize) -> Result<Lamination> {
    build_lamination_with(m, depth, Execution::default())
}

/// Breadth-first pullback of the seed leaves. Sibling closure is enforced
/// from depth 1 on.
pub fn build_lamination_with(m: &MinorRecord, depth: usize, exec: Execution) -> Result<Lamination> {
    let strip = m.strip();
    let mut seeds: Vec<Chord> = m
        .orbit_chords()
        .iter()
        .filter(|c| !c.is_degenerate())
        .chain(strip.majors())
        .cloned()
        .collect();
    seeds.sort();
    seeds.dedup();
    let mut leaves: HashSet<Chord> = seeds.iter().cloned().collect();
    let mut frontier = seeds;
    if depth > 0 {
        let siblings: Vec<Chord> = frontier
            .iter()
            .map(Chord::sibling)
            .filter(|s| leaves.insert(s.clone()))
            .collect();
        frontier.extend(siblings);
    }
    for _ in 0..depth {
        if frontier.is_empty() {
            break;
        }
        let pulled = exec.map(&frontier, |c| pullbacks_in(strip, c));
        let mut next = Vec::new();
        for batch in pulled {
            for c in batch? {
                for x in [c.sibling(), c] {
                    if leaves.insert(x.clone()) {
                        next.push(x);
                    }
                }
            }
        }
        next.sort();
        frontier = next;
    }
    let mut leaves: Vec<Chord> = leaves.into_iter().collect();
    leaves.sort();
    Ok(Lamination {
        seed: m.chord().clone(),
        depth,
        leaves,
        includes_quadrilateral: !m.is_degenerate() && !m.is_periodic(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chord::find_crossing;
    use crate::minor::is_stand_alone_minor;

    fn c(s: &str) -> Chord {
        s.parse().unwrap()
    }

    fn minor(s: &str) -> MinorRecord {
        is_stand_alone_minor(&c(s)).unwrap()
    }

    fn set(v: &[&str]) -> Vec<Chord> {
        let mut out: Vec<Chord> = v.iter().map(|s| c(s)).collect();
        out.sort();
        out
    }

    fn sorted(mut v: Vec<Chord>) -> Vec<Chord> {
        v.sort();
        v
    }

    #[test]
    fn pullback_examples() {
        let zero = minor("0");
        assert_eq!(
            sorted(m_pullbacks(&zero, &c("0-1/2")).unwrap()),
            set(&["0-1/4", "1/4-1/2", "1/2-3/4", "0-3/4"])
        );
        let b = minor("1/3-2/3");
        assert_eq!(
            sorted(m_pullbacks(&b, &c("1/6-5/6")).unwrap()),
            set(&["5/12-7/12", "1/12-11/12"])
        );
        assert_eq!(
            sorted(m_pullbacks(&b, b.chord()).unwrap()),
            set(&["1/3-2/3", "1/6-5/6"])
        );
        assert_eq!(
            sorted(m_pullbacks(&b, &c("1/2")).unwrap()),
            set(&["1/4", "3/4"])
        );
        // Behind m: the horizontal pair inside the strip.
        assert_eq!(
            sorted(m_pullbacks(&b, &c("5/12-7/12")).unwrap()),
            set(&["5/24-7/24", "17/24-19/24"])
        );
        assert!(m_pullbacks(&b, &c("1/2-5/6")).is_err());
    }

    #[test]
    fn lamination_examples() {
        let b = minor("1/3-2/3");
        let l0 = build_lamination(&b, 0).unwrap();
        assert_eq!(l0.leaves(), set(&["1/3-2/3", "1/6-5/6"]).as_slice());
        let l1 = build_lamination(&b, 1).unwrap();
        assert_eq!(
            l1.leaves(),
            set(&["1/3-2/3", "1/6-5/6", "5/12-7/12", "1/12-11/12"]).as_slice()
        );
        assert!(!l1.includes_quadrilateral());

        let z1 = build_lamination(&minor("0"), 1).unwrap();
        assert_eq!(
            z1.leaves(),
            set(&["0-1/2", "0-1/4", "1/4-1/2", "1/2-3/4", "0-3/4"]).as_slice()
        );

        let r0 = build_lamination(&minor("3/7-4/7"), 0).unwrap();
        let air = minor("3/7-4/7");
        let mut expect: Vec<Chord> = air.orbit_chords();
        expect.extend(air.strip().majors().into_iter().cloned());
        // The orbit of a periodic minor passes through one of its majors.
        let mut expect = sorted(expect);
        expect.dedup();
        assert_eq!(r0.leaves(), expect.as_slice());
        assert!(build_lamination(&minor("5/12-7/12"), 2)
            .unwrap()
            .includes_quadrilateral());
    }

    fn check_invariants(m: &MinorRecord, depth: usize) {
        let lam = build_lamination(m, depth).unwrap();
        assert_eq!(find_crossing(lam.leaves()), None, "{:?} crosses", m);
        let orbit: HashSet<Chord> = m.orbit_chords().into_iter().collect();
        for l in lam.leaves() {
            if depth > 0 {
                assert!(lam.contains(&l.sibling()), "{l} has no sibling");
            }
            let img = l.sigma();
            assert!(
                lam.contains(&img) || orbit.contains(&img),
                "image of {l} missing"
            );
        }
        if depth > 0 {
            let prev = build_lamination(m, depth - 1).unwrap();
            assert!(prev.leaves().iter().all(|l| lam.contains(l)));
        }
    }

    #[test]
    fn invariants_for_several_seeds() {
        for s in ["0", "1/3-2/3", "1/7-2/7", "3/7-4/7", "5/12-7/12", "1/4", "9/31-10/31"] {
            for d in 0..=6 {
                check_invariants(&minor(s), d);
            }
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let m = minor("1/7-2/7");
        let a = build_lamination_with(&m, 8, Execution::Sequential).unwrap();
        let b = build_lamination_with(&m, 8, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn intermediate_images_behind_m_are_disjoint() {
        let m = minor("5/12-7/12");
        let lam = build_lamination(&m, 8).unwrap();
        for l in lam.leaves() {
            if l.behind(m.chord()).unwrap() != crate::chord::Behind::Strictly {
                continue;
            }
            let mut imgs = Vec::new();
            let mut x = l.clone();
            for _ in 0..64 {
                if &x == m.chord() {
                    break;
                }
                if x.behind(m.chord()).unwrap().is_behind() {
                    imgs.push(x.clone());
                }
                x = x.sigma();
            }
            if &x != m.chord() {
                continue;
            }
            for (i, p) in imgs.iter().enumerate() {
                for q in &imgs[i + 1..] {
                    assert!(!p.linked(q) && !p.shares_endpoint(q), "{p} meets {q}");
                }
            }
        }
    }

    #[test]
    fn endpoint_gap_shrinks_with_depth() {
        let m = minor("1/3-2/3");
        let g: Vec<Rational> = (1..6)
            .map(|d| build_lamination(&m, d).unwrap().max_endpoint_gap())
            .collect();
        assert!(g.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn json_round_trip() {
        let lam = build_lamination(&minor("1/3-2/3"), 2).unwrap();
        let s = serde_json::to_string(&lam).unwrap();
        assert!(s.starts_with(r#"{"seed":"1/3-2/3","depth":2,"leaves":[{"a":"#));
        let back: Lamination = serde_json::from_str(&s).unwrap();
        assert_eq!(back, lam);
    }
}
