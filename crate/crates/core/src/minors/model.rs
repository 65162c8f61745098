use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{Graph, VertexSet};
use crate::minors::pattern::{build_pattern_tree, PatternTree};

/// An element of `U(H) = V(H) ∪ E(H)`. Edges are stored with the smaller
/// endpoint first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UElem {
    Vertex(usize),
    Edge(usize, usize),
}

impl UElem {
    pub fn edge(u: usize, v: usize) -> UElem {
        UElem::Edge(u.min(v), u.max(v))
    }

    /// A vertex and an edge containing it.
    pub fn incident(self, other: UElem) -> bool {
        match (self, other) {
            (UElem::Vertex(v), UElem::Edge(a, b)) | (UElem::Edge(a, b), UElem::Vertex(v)) => v == a || v == b,
            _ => false,
        }
    }
}

impl fmt::Display for UElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UElem::Vertex(v) => write!(f, "v{v}"),
            UElem::Edge(a, b) => write!(f, "e{a}-{b}"),
        }
    }
}

impl FromStr for UElem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad element key {s:?}");
        if let Some(rest) = s.strip_prefix('v') {
            return rest.parse().map(UElem::Vertex).map_err(|_| bad());
        }
        if let Some(rest) = s.strip_prefix('e') {
            let (a, b) = rest.split_once('-').ok_or_else(bad)?;
            let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            if a == b {
                return Err(bad());
            }
            return Ok(UElem::edge(a, b));
        }
        Err(bad())
    }
}

impl Serialize for UElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for UElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `U(H)` in key order.
pub fn elements(h: &Graph) -> Vec<UElem> {
    let mut out: Vec<UElem> = (0..h.n()).map(UElem::Vertex).collect();
    out.extend(h.edges().iter().map(|&(a, b)| UElem::Edge(a, b)));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelViolation {
    #[error("model domain mismatch: {0}")]
    Domain(String),
    #[error("vertex {0} out of range")]
    OutOfRange(usize),
    #[error("{0} has an empty image")]
    Empty(UElem),
    #[error("vertex {vertex} lies in the images of both {first} and {second}")]
    Overlap { vertex: usize, first: UElem, second: UElem },
    #[error("image of {0} is not connected")]
    Disconnected(UElem),
    #[error("no edge joins the images of {0} and {1}")]
    MissingEdge(UElem, UElem),
    #[error("distance constraint: images of {x} and {y} are at distance {distance}, need more than {bound}")]
    TooClose { x: UElem, y: UElem, distance: u32, bound: usize },
    #[error("distance constraint: branches {i} and {j} are at distance {distance}, need more than {bound}")]
    BranchesTooClose { i: usize, j: usize, distance: u32, bound: usize },
}

/// Branch sets indexed by the vertices of `H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorModel {
    pub branch_sets: Vec<VertexSet>,
}

/// Disjointness, nonemptiness and connectivity of labelled parts; returns
/// the owner array on success.
fn check_parts<'a>(g: &Graph, parts: impl Iterator<Item = (UElem, &'a VertexSet)>) -> Result<Vec<Option<UElem>>, ModelViolation> {
    let mut owner: Vec<Option<UElem>> = vec![None; g.n()];
    for (x, set) in parts {
        if set.is_empty() {
            return Err(ModelViolation::Empty(x));
        }
        for v in set.iter() {
            if v >= g.n() {
                return Err(ModelViolation::OutOfRange(v));
            }
            if let Some(y) = owner[v] {
                return Err(ModelViolation::Overlap { vertex: v, first: y, second: x });
            }
            owner[v] = Some(x);
        }
        if !g.is_connected_induced(set) {
            return Err(ModelViolation::Disconnected(x));
        }
    }
    Ok(owner)
}

fn joined(g: &Graph, a: &VertexSet, owner: &[Option<UElem>], target: UElem) -> bool {
    a.iter().any(|v| g.neighbors(v).iter().any(|&w| owner[w] == Some(target)))
}

pub fn verify_minor_model(g: &Graph, h: &Graph, m: &MinorModel) -> Option<ModelViolation> {
    if m.branch_sets.len() != h.n() {
        return Some(ModelViolation::Domain(format!(
            "{} branch sets for a pattern with {} vertices",
            m.branch_sets.len(),
            h.n()
        )));
    }
    let owner = match check_parts(g, m.branch_sets.iter().enumerate().map(|(i, s)| (UElem::Vertex(i), s))) {
        Ok(o) => o,
        Err(e) => return Some(e),
    };
    h.edges()
        .iter()
        .find(|&&(a, b)| !joined(g, &m.branch_sets[a], &owner, UElem::Vertex(b)))
        .map(|&(a, b)| ModelViolation::MissingEdge(UElem::Vertex(a), UElem::Vertex(b)))
}

/// `η : U(H) → connected vertex sets` with fatness `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FatMinorModel {
    pub c: usize,
    pub eta: BTreeMap<UElem, VertexSet>,
}

impl FatMinorModel {
    /// `η(H)`, the union of all images.
    pub fn union(&self) -> VertexSet {
        union_of(self.eta.values())
    }

    /// Merges each edge image into the image of its smaller endpoint.
    pub fn to_minor_model(&self, h: &Graph) -> MinorModel {
        let mut branch_sets: Vec<VertexSet> = (0..h.n())
            .map(|v| self.eta.get(&UElem::Vertex(v)).cloned().unwrap_or_default())
            .collect();
        for &(a, b) in h.edges() {
            if let Some(s) = self.eta.get(&UElem::Edge(a, b)) {
                branch_sets[a] = branch_sets[a].union(s);
            }
        }
        MinorModel { branch_sets }
    }
}

pub(crate) fn union_of<'a>(sets: impl Iterator<Item = &'a VertexSet>) -> VertexSet {
    let mut all: Vec<usize> = sets.flat_map(|s| s.iter()).collect();
    all.sort_unstable();
    all.dedup();
    VertexSet::from_sorted(all)
}

fn check_domain(h: &Graph, eta: &BTreeMap<UElem, VertexSet>) -> Option<ModelViolation> {
    let expected = elements(h);
    if eta.len() != expected.len() || expected.iter().any(|x| !eta.contains_key(x)) {
        let missing: Vec<String> = expected.iter().filter(|x| !eta.contains_key(x)).map(|x| x.to_string()).collect();
        let extra: Vec<String> = eta.keys().filter(|x| !expected.contains(x)).map(|x| x.to_string()).collect();
        return Some(ModelViolation::Domain(format!("missing {missing:?}, unexpected {extra:?}")));
    }
    None
}

fn verify_fat_parts(g: &Graph, h: &Graph, c: usize, eta: &BTreeMap<UElem, VertexSet>) -> Option<ModelViolation> {
    if let Some(v) = check_domain(h, eta) {
        return Some(v);
    }
    let owner = match check_parts(g, eta.iter().map(|(x, s)| (*x, s))) {
        Ok(o) => o,
        Err(e) => return Some(e),
    };
    for &(a, b) in h.edges() {
        let e = UElem::Edge(a, b);
        for end in [a, b] {
            if !joined(g, &eta[&e], &owner, UElem::Vertex(end)) {
                return Some(ModelViolation::MissingEdge(UElem::Vertex(end), e));
            }
        }
    }
    let radius = c.min(u32::MAX as usize - 2) as u32;
    for (&x, set) in eta {
        for (v, d) in g.ball_distances(set.as_slice(), radius) {
            if let Some(y) = owner[v] {
                if y != x && !x.incident(y) {
                    return Some(ModelViolation::TooClose { x, y, distance: d, bound: c });
                }
            }
        }
    }
    None
}

/// Checks every c-fat minor condition with distances in `G`.
pub fn verify_fat_minor(g: &Graph, h: &Graph, f: &FatMinorModel) -> Option<ModelViolation> {
    verify_fat_parts(g, h, f.c, &f.eta)
}

/// A c-superfat model of `H_ℓ`; this is also the witness file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperfatModel {
    pub pattern_ell: usize,
    pub c: usize,
    pub eta: BTreeMap<UElem, VertexSet>,
}

impl SuperfatModel {
    /// The single-vertex model of `H_0`.
    pub fn point(v: usize, c: usize) -> SuperfatModel {
        SuperfatModel {
            pattern_ell: 0,
            c,
            eta: BTreeMap::from([(UElem::Vertex(0), VertexSet::singleton(v))]),
        }
    }

    pub fn union(&self) -> VertexSet {
        union_of(self.eta.values())
    }

    pub fn as_fat(&self) -> FatMinorModel {
        FatMinorModel {
            c: self.c,
            eta: self.eta.clone(),
        }
    }

    /// Union of the images of `U(B_i)` and `e_i` under the canonical
    /// numbering of `pattern`.
    pub fn branch_image(&self, pattern: &PatternTree, i: usize) -> VertexSet {
        let b = pattern.branch(i);
        union_of(self.eta.iter().filter(|(x, _)| in_branch_plus(x, &b, i)).map(|(_, s)| s))
    }

    /// The model of `H_levels-1` formed by the top `levels` levels.
    pub fn top(&self, levels: usize) -> SuperfatModel {
        assert!(levels >= 1 && levels <= self.pattern_ell + 1);
        let p = build_pattern_tree(self.pattern_ell);
        let keep = |v: usize| p.depth(v) < levels;
        SuperfatModel {
            pattern_ell: levels - 1,
            c: self.c,
            eta: self
                .eta
                .iter()
                .filter(|(x, _)| match **x {
                    UElem::Vertex(v) => keep(v),
                    UElem::Edge(a, b) => keep(a) && keep(b),
                })
                .map(|(x, s)| (*x, s.clone()))
                .collect(),
        }
    }
}

/// Membership of `x` in `U(B_i) ∪ {e_i}`.
pub(crate) fn in_branch_plus(x: &UElem, branch: &VertexSet, i: usize) -> bool {
    match *x {
        UElem::Vertex(v) => branch.contains(v),
        UElem::Edge(a, b) => (a == 0 && b == i) || (branch.contains(a) && branch.contains(b)),
    }
}

/// Fat check plus pairwise separation `> 3c` of the three root branches.
pub fn verify_superfat(g: &Graph, s: &SuperfatModel) -> Option<ModelViolation> {
    if s.pattern_ell > 12 {
        return Some(ModelViolation::Domain(format!("pattern H_{} is too large", s.pattern_ell)));
    }
    let p = build_pattern_tree(s.pattern_ell);
    if let Some(v) = verify_fat_parts(g, p.graph(), s.c, &s.eta) {
        return Some(v);
    }
    if s.pattern_ell == 0 {
        return None;
    }
    let sides: Vec<VertexSet> = (1..=3).map(|i| s.branch_image(&p, i)).collect();
    let mut side_of = vec![0usize; g.n()];
    for (i, side) in sides.iter().enumerate() {
        for v in side.iter() {
            side_of[v] = i + 1;
        }
    }
    let radius = (3 * s.c).min(u32::MAX as usize - 2) as u32;
    for (i, side) in sides.iter().enumerate() {
        for (v, d) in g.ball_distances(side.as_slice(), radius) {
            let j = side_of[v];
            if j != 0 && j != i + 1 {
                return Some(ModelViolation::BranchesTooClose {
                    i: (i + 1).min(j),
                    j: (i + 1).max(j),
                    distance: d,
                    bound: 3 * s.c,
                });
            }
        }
    }
    None
}
