//! Parameter-side generation: main cardioid edges, offsprings, children
//! trees, and finite approximations of the non-renormalizable part of QML.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::angle::{preimages_in_arc, rotation_number_orbit, Angle};
use crate::chord::{Behind, Chord};
use crate::error::{QmlError, Result};
use crate::exec::Execution;
use crate::minor::{is_stand_alone_minor, MinorRecord, Strip};
use crate::pullback::pullbacks_in;

/// A reduced fraction `p/q` with `0 < p < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RotationNumber {
    pub p: u64,
    pub q: u64,
}

impl RotationNumber {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if !(0 < p && p < q) || p.gcd(&q) != 1 {
            return Err(QmlError::Argument(format!("{p}/{q} is not a reduced fraction in (0, 1)")));
        }
        Ok(RotationNumber { p, q })
    }
}

impl fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for RotationNumber {
    type Err = QmlError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || QmlError::Parse(format!("expected p/q, got {s:?}"));
        let (p, q) = s.split_once('/').ok_or_else(bad)?;
        let p = p.trim().parse().map_err(|_| bad())?;
        let q = q.trim().parse().map_err(|_| bad())?;
        RotationNumber::new(p, q)
    }
}

impl Serialize for RotationNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RotationNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// An edge of the combinatorial main cardioid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardioidEdge {
    pub rotation: RotationNumber,
    pub minor: MinorRecord,
    pub rotation_orbit: Vec<Angle>,
}

/// The minor of rotation number `p/q`: the shortest edge of the convex hull
/// of the rotation orbit.
pub fn cardioid_edge(p: u64, q: u64) -> Result<CardioidEdge> {
    let rotation = RotationNumber::new(p, q)?;
    let orbit = rotation_number_orbit(p, q)?;
    let k = orbit.len();
    let chord = (0..k)
        .map(|i| Chord::new(orbit[i].clone(), orbit[(i + 1) % k].clone()))
        .min_by(|x, y| x.length().cmp(&y.length()).then_with(|| x.cmp(y)))
        .expect("rotation orbits are non-empty");
    let minor = is_stand_alone_minor(&chord)
        .map_err(|r| QmlError::Invariant(format!("cardioid edge for {rotation}: {r}")))?;
    Ok(CardioidEdge {
        rotation,
        minor,
        rotation_orbit: orbit,
    })
}

/// All cardioid edges with `2 <= q <= max_q`, in circular order.
pub fn cardioid_edges(max_q: u64) -> Result<Vec<CardioidEdge>> {
    if max_q < 2 {
        return Err(QmlError::Argument(format!("max_q must be at least 2, got {max_q}")));
    }
    let mut out = Vec::new();
    for q in 2..=max_q {
        for p in 1..q {
            if p.gcd(&q) == 1 {
                out.push(cardioid_edge(p, q)?);
            }
        }
    }
    out.sort_by(|x, y| x.minor.chord().cmp(y.minor.chord()));
    Ok(out)
}

/// First `n >= 1` with `σ₂^n(a)` an endpoint of `m`, or `None`.
fn first_endpoint_hit(a: &Angle, m: &Chord) -> Option<usize> {
    let info = a.orbit_info();
    let mut x = a.clone();
    for n in 1..=info.orbit.len() {
        x = x.double();
        if m.has_endpoint(&x) {
            return Some(n);
        }
    }
    None
}

/// The leaf of `ℒ(m)` with endpoint `a` obtained by pulling the major
/// through `σ₂^{n−1}(a)` back along the orbit of `a`.
fn chain_leaf(strip: &Strip, a: &Angle, n: usize) -> Result<Chord> {
    let orbit: Vec<Angle> = std::iter::successors(Some(a.clone()), |x| Some(x.double()))
        .take(n)
        .collect();
    let top = &orbit[n - 1];
    let mut leaf = strip
        .majors()
        .into_iter()
        .find(|c| c.has_endpoint(top))
        .cloned()
        .ok_or_else(|| QmlError::Invariant(format!("{top} is not an endpoint of a major")))?;
    for x in orbit[..n - 1].iter().rev() {
        leaf = pullbacks_in(strip, &leaf)?
            .into_iter()
            .find(|c| c.has_endpoint(x))
            .ok_or_else(|| QmlError::Invariant(format!("no pullback of {leaf} through {x}")))?;
    }
    Ok(leaf)
}

fn verified(c: &Chord) -> Result<MinorRecord> {
    is_stand_alone_minor(c).map_err(|r| QmlError::Invariant(r.to_string()))
}

/// The offspring of `m` containing the angle `a`.
pub fn offspring(m: &MinorRecord, a: &Angle) -> Result<MinorRecord> {
    let out = offspring_by_recursion(m, a)?;
    if cfg!(debug_assertions) {
        cross_check_offspring(m, a, &out)?;
    }
    Ok(out)
}

/// [`offspring`] with the cross-check against the least-image definition
/// always on.
pub fn offspring_checked(m: &MinorRecord, a: &Angle) -> Result<MinorRecord> {
    let out = offspring_by_recursion(m, a)?;
    cross_check_offspring(m, a, &out)?;
    Ok(out)
}

fn offspring_by_recursion(m: &MinorRecord, a: &Angle) -> Result<MinorRecord> {
    if m.is_degenerate() {
        return Err(QmlError::Domain(format!("nothing lies strictly behind the point {}", m.chord())));
    }
    if Chord::point(a.clone()).behind(m.chord())? != Behind::Strictly {
        return Err(QmlError::Domain(format!("{a} is not strictly behind {}", m.chord())));
    }
    if a.is_periodic() {
        return Err(QmlError::Domain(format!("{a} is periodic")));
    }
    if first_endpoint_hit(a, m.chord()).is_none() {
        return Err(QmlError::Domain(format!(
            "{a} never maps to an endpoint of {}",
            m.chord()
        )));
    }
    let point = Chord::point(a.clone());
    let mut cur = m.clone();
    loop {
        let n = first_endpoint_hit(a, cur.chord())
            .ok_or_else(|| QmlError::Invariant(format!("{a} lost the orbit of {}", cur.chord())))?;
        let leaf = chain_leaf(cur.strip(), a, n)?;
        // Of the images separating a from the current minor, the longest is
        // the one closest to it.
        let mut best: Option<Chord> = None;
        let mut img = leaf.clone();
        for _ in 1..n {
            img = img.sigma();
            if img.separates(&point, cur.chord())?
                && best.as_ref().is_none_or(|b| img.length() > b.length())
            {
                best = Some(img.clone());
            }
        }
        let next = best.unwrap_or(leaf);
        let rec = verified(&next)?;
        if next.has_endpoint(a) {
            return Ok(rec);
        }
        cur = rec;
    }
}

/// Checks `found` against the definition by least image: among the images
/// `σ₂^k(found)` that are minors lying between `a` and `m`, take the least
/// `k`; pulling that minor back along the orbit of `a` must give `found`.
fn cross_check_offspring(m: &MinorRecord, a: &Angle, found: &MinorRecord) -> Result<()> {
    let point = Chord::point(a.clone());
    let mut img = found.chord().clone();
    for k in 1.. {
        img = img.sigma();
        let between = point.behind(&img)? == Behind::Strictly && img.behind(m.chord())?.is_behind();
        if between {
            if let Ok(parent) = is_stand_alone_minor(&img) {
                let rebuilt = chain_leaf(parent.strip(), a, k)?;
                if &rebuilt != found.chord() {
                    return Err(QmlError::Invariant(format!(
                        "offspring definitions disagree for {a}: {} vs {rebuilt}",
                        found.chord()
                    )));
                }
                return Ok(());
            }
        }
        if &img == m.chord() {
            break;
        }
    }
    Err(QmlError::Invariant(format!(
        "no image of {} lies between {a} and {}",
        found.chord(),
        m.chord()
    )))
}

/// One node of an offspring tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffspringNode {
    pub minor: MinorRecord,
    /// Index of the parent node; `None` for the root.
    pub parent: Option<usize>,
    pub iterates_to_parent: usize,
    pub iterates_to_root: usize,
    pub generation: usize,
}

/// Children of children of a root minor, in breadth-first order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffspringTree {
    nodes: Vec<OffspringNode>,
}

impl OffspringTree {
    pub fn root(&self) -> &OffspringNode {
        &self.nodes[0]
    }

    pub fn nodes(&self) -> &[OffspringNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn chords(&self) -> impl Iterator<Item = &Chord> {
        self.nodes.iter().map(|n| n.minor.chord())
    }
}

/// Children of `m` within `depth` iterates, each with its number of
/// iterates to `m`. Sorted by chord.
///
/// Every child has an endpoint `a` strictly behind `m` with `σ₂^n(a)` an
/// endpoint of `m`, and is the pullback of a major along the orbit of `a`.
/// So the search runs over those preimage angles instead of the whole
/// pullback tree of `m`, which is exponentially larger when `m` is short.
pub fn direct_children(m: &MinorRecord, depth: usize) -> Result<Vec<(MinorRecord, usize)>> {
    if m.is_degenerate() {
        return Ok(Vec::new());
    }
    let strip = m.strip();
    let horizontal = strip.horizontal_edges();
    if m.orbit_chords().iter().any(|c| horizontal.contains(c)) {
        return Ok(Vec::new());
    }
    let (from, to) = m.chord().short_arc();
    let mut seen: HashSet<Chord> = HashSet::new();
    let mut out = Vec::new();
    for n in 1..=depth {
        for t in m.chord().endpoints() {
            for a in preimages_in_arc(t, n as u32, from, to) {
                let x = chain_leaf(strip, &a, n)?;
                if !seen.insert(x.clone()) || x.behind(m.chord())? != Behind::Strictly {
                    continue;
                }
                let images: Vec<Chord> = std::iter::successors(Some(x.sigma()), |c| Some(c.sigma()))
                    .take(n)
                    .collect();
                let steps = 1 + images.iter().position(|c| c == m.chord()).expect("chain ends at m");
                let mut derived = !horizontal.contains(&x);
                for img in &images[..steps - 1] {
                    if !derived {
                        break;
                    }
                    derived = !horizontal.contains(img) && !img.separates(&x, m.chord())?;
                }
                if derived {
                    out.push((verified(&x)?, steps));
                }
            }
        }
    }
    out.sort_by(|p, q| p.0.chord().cmp(q.0.chord()));
    Ok(out)
}

pub fn children(m: &MinorRecord, generations: usize, depth: usize) -> Result<OffspringTree> {
    children_with(m, generations, depth, Execution::default())
}

/// Generation 1 holds the children of `m`; generation `k + 1` the children
/// of generation-`k` nodes, each found in its own lamination.
pub fn children_with(
    m: &MinorRecord,
    generations: usize,
    depth: usize,
    exec: Execution,
) -> Result<OffspringTree> {
    let mut nodes = vec![OffspringNode {
        minor: m.clone(),
        parent: None,
        iterates_to_parent: 0,
        iterates_to_root: 0,
        generation: 0,
    }];
    let mut seen: HashSet<Chord> = HashSet::from([m.chord().clone()]);
    let mut frontier = vec![0usize];
    for generation in 1..=generations {
        let minors: Vec<&MinorRecord> = frontier.iter().map(|&i| &nodes[i].minor).collect();
        let found = exec.map(&minors, |p| direct_children(p, depth));
        let mut next = Vec::new();
        for (&parent, kids) in frontier.iter().zip(found) {
            for (minor, steps) in kids? {
                if seen.insert(minor.chord().clone()) {
                    next.push(nodes.len());
                    nodes.push(OffspringNode {
                        minor,
                        parent: Some(parent),
                        iterates_to_parent: steps,
                        iterates_to_root: nodes[parent].iterates_to_root + steps,
                        generation,
                    });
                }
            }
        }
        frontier = next;
    }
    Ok(OffspringTree { nodes })
}

/// A minor emitted by [`qml_nr_approx`], with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QmlLeaf {
    pub minor: MinorRecord,
    pub root: RotationNumber,
    pub iterates_to_root: usize,
    pub generation: usize,
}

pub fn qml_nr_approx(max_q: u64, generations: usize, depth: usize) -> Result<Vec<QmlLeaf>> {
    qml_nr_approx_with(max_q, generations, depth, Execution::default())
}

/// Cardioid edges with `q <= max_q` and their children trees, sorted by
/// chord.
pub fn qml_nr_approx_with(
    max_q: u64,
    generations: usize,
    depth: usize,
    exec: Execution,
) -> Result<Vec<QmlLeaf>> {
    let edges = cardioid_edges(max_q)?;
    let trees = exec.map(&edges, |e| children_with(&e.minor, generations, depth, exec));
    let mut out = Vec::new();
    for (edge, tree) in edges.iter().zip(trees) {
        out.extend(tree?.nodes.into_iter().map(|node| QmlLeaf {
            minor: node.minor,
            root: edge.rotation,
            iterates_to_root: node.iterates_to_root,
            generation: node.generation,
        }));
    }
    // Stable sort, so the first occurrence of a chord survives.
    out.sort_by(|x, y| x.minor.chord().cmp(y.minor.chord()));
    out.dedup_by(|x, y| x.minor.chord() == y.minor.chord());
    Ok(out)
}
