//! Line-decompositions and quasi-bound certificates.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invariant, Error, Result};
use crate::graph::{Graph, VertexSet, INF};

/// A finite sequence of bags.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LineDecomposition {
    pub bags: Vec<VertexSet>,
}

impl LineDecomposition {
    pub fn new(bags: Vec<VertexSet>) -> Self {
        LineDecomposition { bags }
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn width(&self) -> Result<usize> {
        decomposition_width(self)
    }

    /// Intersects every bag with `y`. The result decomposes `G[y]` whenever
    /// `self` decomposes a superset.
    pub fn restrict(&self, y: &VertexSet) -> LineDecomposition {
        let mask: HashMap<usize, ()> = y.iter().map(|v| (v, ())).collect();
        LineDecomposition {
            bags: self
                .bags
                .iter()
                .map(|b| b.iter().filter(|v| mask.contains_key(v)).collect())
                .collect(),
        }
    }

    /// Bags of `parts` one after another.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a LineDecomposition>) -> LineDecomposition {
        LineDecomposition {
            bags: parts.into_iter().flat_map(|d| d.bags.iter().cloned()).collect(),
        }
    }
}

/// First axiom a decomposition fails.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    /// A vertex of the subject lies in no bag.
    #[error("coverage: vertex {0} is in no bag")]
    Uncovered(usize),
    /// No bag holds both ends of an edge.
    #[error("edge containment: no bag holds {0} and {1}")]
    EdgeUncovered(usize, usize),
    /// `vertex` lies in bags `first` and `last` but not in bag `gap`.
    #[error("interval: vertex {vertex} is in bags {first} and {last} but not {gap}")]
    Interval {
        vertex: usize,
        first: usize,
        gap: usize,
        last: usize,
    },
}

/// Checks coverage, edge containment and the interval property for `G[x]`.
/// `Ok(None)` means the decomposition is valid.
pub fn verify_line_decomposition(g: &Graph, x: &VertexSet, d: &LineDecomposition) -> Result<Option<Violation>> {
    g.check_set(x)?;
    let inside = x.mask(g.n());
    let mut positions: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (t, bag) in d.bags.iter().enumerate() {
        for v in bag.iter() {
            if v >= g.n() || !inside[v] {
                return Err(Error::BagOutsideSubject { bag: t, vertex: v });
            }
            positions[v].push(t);
        }
    }
    if let Some(v) = x.iter().find(|&v| positions[v].is_empty()) {
        return Ok(Some(Violation::Uncovered(v)));
    }
    for &(u, v) in g.edges() {
        if !inside[u] || !inside[v] {
            continue;
        }
        let (pu, pv) = (&positions[u], &positions[v]);
        let (mut i, mut j) = (0, 0);
        let mut shared = false;
        while i < pu.len() && j < pv.len() {
            match pu[i].cmp(&pv[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    shared = true;
                    break;
                }
            }
        }
        if !shared {
            return Ok(Some(Violation::EdgeUncovered(u, v)));
        }
    }
    for v in x.iter() {
        let p = &positions[v];
        if let Some(w) = p.windows(2).find(|w| w[1] != w[0] + 1) {
            return Ok(Some(Violation::Interval {
                vertex: v,
                first: w[0],
                gap: w[0] + 1,
                last: w[1],
            }));
        }
    }
    Ok(None)
}

/// Largest bag size minus one.
pub fn decomposition_width(d: &LineDecomposition) -> Result<usize> {
    d.bags
        .iter()
        .map(|b| b.len())
        .max()
        .map(|m| m.saturating_sub(1))
        .ok_or(Error::EmptyDecomposition)
}

pub const DEFAULT_PATHWIDTH_CAP: usize = 16;

/// Exact path-width with a witnessing decomposition, for graphs with at
/// most [`DEFAULT_PATHWIDTH_CAP`] vertices.
pub fn exact_pathwidth(g: &Graph) -> Result<(usize, LineDecomposition)> {
    exact_pathwidth_capped(g, DEFAULT_PATHWIDTH_CAP)
}

pub fn exact_pathwidth_capped(g: &Graph, cap: usize) -> Result<(usize, LineDecomposition)> {
    let n = g.n();
    if n > cap || n > 26 {
        return Err(Error::TooLarge { n, cap: cap.min(26) });
    }
    if n == 0 {
        return Ok((0, LineDecomposition::new(vec![VertexSet::new()])));
    }
    let nb: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let size = 1usize << n;
    let mut best = vec![u8::MAX; size];
    let mut last = vec![0u8; size];
    best[0] = 0;
    for s in 1..size as u32 {
        let outside = full & !s;
        let bd = (0..n).filter(|&u| s & (1 << u) != 0 && nb[u] & outside != 0).count() as u8;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            let cand = best[(s & !(1 << v)) as usize].max(bd);
            if cand < best[s as usize] {
                best[s as usize] = cand;
                last[s as usize] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = last[s as usize] as u32;
        order.push(v as usize);
        s &= !(1 << v);
    }
    order.reverse();
    let d = decomposition_from_order(g, &order);
    Ok((best[full as usize] as usize, d))
}

/// Decomposition of a vertex ordering: bag `i` is `v_i` together with the
/// earlier vertices that still have a neighbour at position `i` or later.
pub fn decomposition_from_order(g: &Graph, order: &[usize]) -> LineDecomposition {
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // Last position of a neighbour (or self) for every vertex.
    let reach: Vec<usize> = order
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .map(|&w| pos[w])
                .filter(|&p| p != usize::MAX)
                .fold(pos[v], usize::max)
        })
        .collect();
    let mut bags = Vec::with_capacity(order.len());
    let mut active: Vec<usize> = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        active.retain(|&u| reach[pos[u]] >= i);
        let mut bag = active.clone();
        bag.push(v);
        bags.push(bag.into_iter().collect());
        active.push(v);
    }
    if bags.is_empty() {
        bags.push(VertexSet::new());
    }
    LineDecomposition { bags }
}

fn greedy_order(g: &Graph, start: usize) -> Vec<usize> {
    let n = g.n();
    let mut in_s = vec![false; n];
    let mut outside = vec![0usize; n];
    for v in 0..n {
        outside[v] = g.degree(v);
    }
    let mut frontier = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut next = Some(start);
    while order.len() < n {
        let v = match next.take() {
            Some(v) => v,
            None => {
                let cands: Vec<usize> = (0..n).filter(|&v| !in_s[v] && frontier[v]).collect();
                if cands.is_empty() {
                    let rest: Vec<usize> = (0..n).filter(|&v| !in_s[v]).collect();
                    peripheral(g, &rest)
                } else {
                    *cands
                        .iter()
                        .min_by_key(|&&v| {
                            let freed = g.neighbors(v).iter().filter(|&&u| in_s[u] && outside[u] == 1).count();
                            let remains = usize::from(outside[v] > g.neighbors(v).iter().filter(|&&u| in_s[u]).count());
                            (remains as isize - freed as isize, outside[v], v)
                        })
                        .unwrap()
                }
            }
        };
        in_s[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            outside[w] -= 1;
            frontier[w] = true;
        }
    }
    order
}

/// A vertex far from the minimum-degree vertex of the component of `set[0]`.
fn peripheral(g: &Graph, set: &[usize]) -> usize {
    let comp_dist = g.distances_from(&[set[0]]);
    let comp: Vec<usize> = set.iter().copied().filter(|&v| comp_dist[v] != INF).collect();
    let start = *comp.iter().min_by_key(|&&v| (g.degree(v), v)).unwrap();
    let d = g.distances_from(&[start]);
    *comp.iter().max_by_key(|&&v| (d[v], std::cmp::Reverse(v))).unwrap()
}

/// Greedy vertex-separation decomposition; valid for every graph, optimal
/// only by luck.
pub fn heuristic_path_decomposition(g: &Graph) -> LineDecomposition {
    if g.n() == 0 {
        return LineDecomposition::new(vec![VertexSet::new()]);
    }
    let all: Vec<usize> = (0..g.n()).collect();
    let mut starts = vec![peripheral(g, &all)];
    let min_deg = (0..g.n()).min_by_key(|&v| (g.degree(v), v)).unwrap();
    starts.push(min_deg);
    starts.dedup();
    starts
        .into_iter()
        .map(|s| decomposition_from_order(g, &greedy_order(g, s)))
        .min_by_key(|d| decomposition_width(d).unwrap_or(usize::MAX))
        .unwrap()
}

/// Exact decomposition when the graph is small enough, else the heuristic.
pub fn path_decomposition(g: &Graph) -> LineDecomposition {
    match exact_pathwidth(g) {
        Ok((_, d)) => d,
        Err(_) => heuristic_path_decomposition(g),
    }
}

/// A center set `Y` with `|Y| ≤ k` claimed to be within distance `r` of a set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiCenter {
    pub centers: VertexSet,
    pub k: usize,
    pub r: usize,
}

fn covered_within(g: &Graph, x: &VertexSet, centers: &VertexSet, r: usize) -> Option<usize> {
    if x.is_empty() {
        return None;
    }
    if centers.is_empty() {
        return x.min();
    }
    let dist = g.distances_within(centers.as_slice(), r.min(u32::MAX as usize - 1) as u32);
    x.iter().find(|&v| dist[v] == INF)
}

/// Whether every vertex of `x` is within distance `r` in `G` of the at most
/// `k` centers.
pub fn verify_quasi_size(g: &Graph, x: &VertexSet, qc: &QuasiCenter) -> bool {
    if g.check_set(x).is_err() || g.check_set(&qc.centers).is_err() || qc.centers.len() > qc.k {
        return false;
    }
    covered_within(g, x, &qc.centers, qc.r).is_none()
}

/// Outcome of a center search. `exhaustive` means a `None` answer is a proof
/// that no center set exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiSearch {
    pub center: Option<QuasiCenter>,
    pub exhaustive: bool,
}

const COVER_SET_CAP: usize = 256;
const COVER_NODE_BUDGET: usize = 200_000;

pub fn find_quasi_center(g: &Graph, x: &VertexSet, k: usize, r: usize) -> Option<QuasiCenter> {
    search_quasi_center(g, x, k, r).center
}

pub fn search_quasi_center(g: &Graph, x: &VertexSet, k: usize, r: usize) -> QuasiSearch {
    let found = |centers: VertexSet| QuasiSearch {
        center: Some(QuasiCenter { centers, k, r }),
        exhaustive: true,
    };
    if g.check_set(x).is_err() {
        return QuasiSearch { center: None, exhaustive: true };
    }
    if x.is_empty() {
        return found(VertexSet::new());
    }
    if k == 0 {
        return QuasiSearch { center: None, exhaustive: true };
    }
    let radius = r.min(u32::MAX as usize - 2) as u32;
    if let Some(y) = farthest_first(g, x, k, radius) {
        return found(y);
    }
    if x.len() > COVER_SET_CAP {
        return QuasiSearch { center: None, exhaustive: false };
    }
    let words = x.len().div_ceil(64);
    let mut masks: HashMap<usize, Vec<u64>> = HashMap::new();
    for (i, xv) in x.iter().enumerate() {
        for (v, _) in g.ball_distances(&[xv], radius) {
            masks.entry(v).or_insert_with(|| vec![0; words])[i / 64] |= 1 << (i % 64);
        }
    }
    let mut by_mask: HashMap<Vec<u64>, usize> = HashMap::new();
    for (v, m) in masks {
        by_mask.entry(m).and_modify(|u| *u = (*u).min(v)).or_insert(v);
    }
    let mut cands: Vec<(Vec<u64>, usize)> = by_mask.into_iter().collect();
    cands.sort_by_key(|(m, v)| (std::cmp::Reverse(popcount(m)), *v));
    if cands.len() <= 4000 {
        let mut kept: Vec<(Vec<u64>, usize)> = Vec::new();
        for (m, v) in cands {
            if !kept.iter().any(|(km, _)| subset(&m, km)) {
                kept.push((m, v));
            }
        }
        cands = kept;
    }
    let mut cover_lists: Vec<Vec<usize>> = vec![Vec::new(); x.len()];
    for (ci, (m, _)) in cands.iter().enumerate() {
        for (i, list) in cover_lists.iter_mut().enumerate() {
            if m[i / 64] >> (i % 64) & 1 == 1 {
                list.push(ci);
            }
        }
    }
    let full: Vec<u64> = (0..words)
        .map(|w| {
            let bits = (x.len() - w * 64).min(64);
            if bits == 64 {
                u64::MAX
            } else {
                (1u64 << bits) - 1
            }
        })
        .collect();
    let mut chosen = Vec::new();
    let mut budget = COVER_NODE_BUDGET;
    match exact_cover(&cands, &cover_lists, &full, k, &mut chosen, &mut budget) {
        Some(true) => return found(chosen.iter().map(|&c| cands[c].1).collect()),
        Some(false) => return QuasiSearch { center: None, exhaustive: true },
        None => {}
    }
    let mut uncovered = full.clone();
    let mut picked = Vec::new();
    while uncovered.iter().any(|&w| w != 0) && picked.len() < k {
        let (ci, gain) = cands
            .iter()
            .enumerate()
            .map(|(ci, (m, _))| (ci, m.iter().zip(&uncovered).map(|(a, b)| (a & b).count_ones()).sum::<u32>()))
            .max_by_key(|&(ci, gain)| (gain, std::cmp::Reverse(ci)))
            .unwrap();
        if gain == 0 {
            break;
        }
        picked.push(cands[ci].1);
        for (u, m) in uncovered.iter_mut().zip(&cands[ci].0) {
            *u &= !m;
        }
    }
    if uncovered.iter().all(|&w| w == 0) {
        found(picked.into_iter().collect())
    } else {
        QuasiSearch { center: None, exhaustive: false }
    }
}

fn popcount(m: &[u64]) -> u32 {
    m.iter().map(|w| w.count_ones()).sum()
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Branches on the first uncovered element. `None` when the budget runs out.
fn exact_cover(
    cands: &[(Vec<u64>, usize)],
    cover_lists: &[Vec<usize>],
    uncovered: &[u64],
    k: usize,
    chosen: &mut Vec<usize>,
    budget: &mut usize,
) -> Option<bool> {
    let first = uncovered.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, &w)| i * 64 + w.trailing_zeros() as usize);
    let Some(e) = first else { return Some(true) };
    if k == 0 {
        return Some(false);
    }
    if *budget == 0 {
        return None;
    }
    *budget -= 1;
    let mut complete = true;
    for &ci in &cover_lists[e] {
        let rest: Vec<u64> = uncovered.iter().zip(&cands[ci].0).map(|(u, m)| u & !m).collect();
        chosen.push(ci);
        match exact_cover(cands, cover_lists, &rest, k - 1, chosen, budget) {
            Some(true) => return Some(true),
            Some(false) => {}
            None => complete = false,
        }
        chosen.pop();
    }
    if complete {
        Some(false)
    } else {
        None
    }
}

/// Centers drawn from `x` itself, each new one the first vertex still
/// uncovered. Cheap and often enough.
fn farthest_first(g: &Graph, x: &VertexSet, k: usize, r: u32) -> Option<VertexSet> {
    let mut covered: HashMap<usize, ()> = HashMap::new();
    let mut centers = Vec::new();
    for v in x.iter() {
        if covered.contains_key(&v) {
            continue;
        }
        if centers.len() == k {
            return None;
        }
        centers.push(v);
        for (w, _) in g.ball_distances(&[v], r) {
            covered.insert(w, ());
        }
    }
    Some(centers.into_iter().collect())
}

/// `subject` has quasi-bound at most `(a, b)`: a decomposition of
/// `G[subject]` whose bags, and whose boundary, are each within distance
/// `b` of at most `a` centers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiBoundCertificate {
    pub subject: VertexSet,
    #[serde(rename = "bags")]
    pub decomposition: LineDecomposition,
    pub bag_centers: Vec<VertexSet>,
    pub a: usize,
    pub b: usize,
    pub boundary_centers: VertexSet,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertificateViolation {
    #[error("decomposition: {0}")]
    Decomposition(Violation),
    #[error("quasi-size: {centers} center sets for {bags} bags")]
    CenterListLength { bags: usize, centers: usize },
    #[error("quasi-size: bag {bag} has {count} centers, more than a")]
    TooManyCenters { bag: usize, count: usize },
    #[error("quasi-size: vertex {vertex} of bag {bag} is further than b from the centers")]
    BagNotCovered { bag: usize, vertex: usize },
    #[error("boundary quasi-size: {0} centers, more than a")]
    TooManyBoundaryCenters(usize),
    #[error("boundary quasi-size: boundary vertex {0} is further than b from the centers")]
    BoundaryNotCovered(usize),
}

impl QuasiBoundCertificate {
    /// Certificate of a single vertex with parameters `(a, b)`.
    pub fn singleton(v: usize, a: usize, b: usize) -> Self {
        let s = VertexSet::singleton(v);
        QuasiBoundCertificate {
            subject: s.clone(),
            decomposition: LineDecomposition::new(vec![s.clone()]),
            bag_centers: vec![s.clone()],
            a: a.max(1),
            b,
            boundary_centers: s,
        }
    }

    /// Empty subject.
    pub fn empty(a: usize, b: usize) -> Self {
        QuasiBoundCertificate {
            subject: VertexSet::new(),
            decomposition: LineDecomposition::new(vec![VertexSet::new()]),
            bag_centers: vec![VertexSet::new()],
            a,
            b,
            boundary_centers: VertexSet::new(),
        }
    }

    pub fn width(&self) -> usize {
        decomposition_width(&self.decomposition).unwrap_or(0)
    }

    /// Same witness with weaker declared parameters.
    pub fn relaxed(mut self, a: usize, b: usize) -> Self {
        self.a = self.a.max(a);
        self.b = self.b.max(b);
        self
    }

    /// Restricts to `y ⊆ subject`, keeping bag centers (distances are
    /// measured in `G`, so they still cover) and searching new boundary
    /// centers at the same parameters.
    pub fn restrict(&self, g: &Graph, y: &VertexSet) -> Option<QuasiBoundCertificate> {
        let decomposition = self.decomposition.restrict(y);
        let bd = g.boundary(y);
        let boundary_centers = find_quasi_center(g, &bd, self.a, self.b)?.centers;
        Some(QuasiBoundCertificate {
            subject: y.clone(),
            decomposition,
            bag_centers: self.bag_centers.clone(),
            a: self.a,
            b: self.b,
            boundary_centers,
        })
    }

    /// Certificates of pairwise non-touching subjects placed side by side.
    pub fn concat(g: &Graph, parts: &[QuasiBoundCertificate]) -> QuasiBoundCertificate {
        if parts.is_empty() {
            return QuasiBoundCertificate::empty(0, 0);
        }
        let subject = parts.iter().fold(VertexSet::new(), |acc, p| acc.union(&p.subject));
        let bd = g.boundary(&subject);
        let boundary_centers = parts
            .iter()
            .filter(|p| p.subject.intersects(&bd))
            .fold(VertexSet::new(), |acc, p| acc.union(&p.boundary_centers));
        QuasiBoundCertificate {
            subject,
            decomposition: LineDecomposition::concat(parts.iter().map(|p| &p.decomposition)),
            bag_centers: parts.iter().flat_map(|p| p.bag_centers.iter().cloned()).collect(),
            a: parts.iter().map(|p| p.a).max().unwrap(),
            b: parts.iter().map(|p| p.b).max().unwrap(),
            boundary_centers,
        }
    }
}

/// Checks the decomposition and every bag against the declared `(a, b)`.
pub fn verify_line_width(g: &Graph, cert: &QuasiBoundCertificate) -> Result<Option<CertificateViolation>> {
    g.check_set(&cert.subject)?;
    for c in &cert.bag_centers {
        g.check_set(c)?;
    }
    g.check_set(&cert.boundary_centers)?;
    if let Some(v) = verify_line_decomposition(g, &cert.subject, &cert.decomposition)? {
        return Ok(Some(CertificateViolation::Decomposition(v)));
    }
    if cert.bag_centers.len() != cert.decomposition.len() {
        return Ok(Some(CertificateViolation::CenterListLength {
            bags: cert.decomposition.len(),
            centers: cert.bag_centers.len(),
        }));
    }
    let radius = cert.b.min(u32::MAX as usize - 2) as u32;
    let mut cached: Option<(&VertexSet, Vec<u32>)> = None;
    for (t, (bag, centers)) in cert.decomposition.bags.iter().zip(&cert.bag_centers).enumerate() {
        if centers.len() > cert.a {
            return Ok(Some(CertificateViolation::TooManyCenters { bag: t, count: centers.len() }));
        }
        if bag.is_empty() {
            continue;
        }
        if cached.as_ref().map_or(true, |(c, _)| *c != centers) {
            cached = Some((centers, g.distances_within(centers.as_slice(), radius)));
        }
        let dist = &cached.as_ref().unwrap().1;
        if let Some(v) = bag.iter().find(|&v| dist[v] == INF) {
            return Ok(Some(CertificateViolation::BagNotCovered { bag: t, vertex: v }));
        }
    }
    Ok(None)
}

/// Full quasi-bound check: [`verify_line_width`] plus the boundary.
pub fn verify_certificate(g: &Graph, cert: &QuasiBoundCertificate) -> Result<Option<CertificateViolation>> {
    if let Some(v) = verify_line_width(g, cert)? {
        return Ok(Some(v));
    }
    if cert.boundary_centers.len() > cert.a {
        return Ok(Some(CertificateViolation::TooManyBoundaryCenters(cert.boundary_centers.len())));
    }
    let bd = g.boundary(&cert.subject);
    Ok(covered_within(g, &bd, &cert.boundary_centers, cert.b).map(CertificateViolation::BoundaryNotCovered))
}

/// Bags `L_i ∪ L_{i+1}` of breadth-first layers of each component of
/// `G[x]`, rooted at a peripheral vertex.
pub fn layered_decomposition(g: &Graph, x: &VertexSet) -> LineDecomposition {
    let mut bags = Vec::new();
    for comp in g.induced_components(x) {
        let d0 = g.induced_distances(&comp, &[comp.as_slice()[0]]);
        let root = comp.iter().max_by_key(|&v| (d0[v], std::cmp::Reverse(v))).unwrap();
        let d = g.induced_distances(&comp, &[root]);
        let depth = comp.iter().map(|v| d[v]).max().unwrap() as usize;
        let mut layers = vec![Vec::new(); depth + 1];
        for v in comp.iter() {
            layers[d[v] as usize].push(v);
        }
        if depth == 0 {
            bags.push(VertexSet::from_sorted(layers.pop().unwrap()));
            continue;
        }
        for i in 0..depth {
            let mut b = layers[i].clone();
            b.extend_from_slice(&layers[i + 1]);
            bags.push(b.into_iter().collect());
        }
    }
    if bags.is_empty() {
        bags.push(VertexSet::new());
    }
    LineDecomposition::new(bags)
}

/// Any decomposition of `G[x]` plus center searches for its bags and for
/// `bd(x)` at `(a, b)`. Sound but incomplete.
pub fn certify_decomposition(g: &Graph, x: &VertexSet, d: LineDecomposition, a: usize, b: usize) -> Option<QuasiBoundCertificate> {
    let mut bag_centers = Vec::with_capacity(d.len());
    for bag in &d.bags {
        bag_centers.push(find_quasi_center(g, bag, a, b)?.centers);
    }
    let boundary_centers = find_quasi_center(g, &g.boundary(x), a, b)?.centers;
    Some(QuasiBoundCertificate {
        subject: x.clone(),
        decomposition: d,
        bag_centers,
        a,
        b,
        boundary_centers,
    })
}

/// [`certify_decomposition`] over the layered decomposition.
pub fn generic_certificate(g: &Graph, x: &VertexSet, a: usize, b: usize) -> Option<QuasiBoundCertificate> {
    certify_decomposition(g, x, layered_decomposition(g, x), a, b)
}

/// Splices piece certificates into an outer decomposition whose bags are
/// unions of at most `k` pieces (or of their boundaries). The result has
/// parameters `((k+1)a, b)` where `(a, b)` is the largest piece parameter.
pub fn compose_line_decompositions(
    g: &Graph,
    pieces: &[(VertexSet, QuasiBoundCertificate)],
    outer: &LineDecomposition,
    k: usize,
) -> Result<QuasiBoundCertificate> {
    let mut owner = vec![usize::MAX; g.n()];
    for (i, (set, cert)) in pieces.iter().enumerate() {
        g.check_set(set)?;
        if set.is_empty() {
            return Err(Error::Precondition(format!("piece {i} is empty")));
        }
        if &cert.subject != set {
            return Err(Error::Precondition(format!("piece {i} certificate has another subject")));
        }
        for v in set.iter() {
            if owner[v] != usize::MAX {
                return Err(Error::Precondition(format!("pieces overlap at vertex {v}")));
            }
            owner[v] = i;
        }
    }
    let a = pieces.iter().map(|p| p.1.a).max().unwrap_or(0);
    let b = pieces.iter().map(|p| p.1.b).max().unwrap_or(0);
    let bds: Vec<VertexSet> = pieces.iter().map(|(s, _)| g.boundary(s)).collect();

    let mut outer_bags: Vec<(VertexSet, VertexSet)> = Vec::with_capacity(outer.len());
    let mut home = vec![usize::MAX; pieces.len()];
    for (t, bag) in outer.bags.iter().enumerate() {
        let mut hit: Vec<usize> = Vec::new();
        for v in bag.iter() {
            g.check_vertex(v)?;
            if owner[v] == usize::MAX {
                return Err(Error::Precondition(format!("outer bag {t} holds vertex {v} outside every piece")));
            }
            hit.push(owner[v]);
        }
        hit.sort_unstable();
        hit.dedup();
        if hit.len() > k {
            return Err(Error::Precondition(format!("outer bag {t} meets {} pieces, more than {k}", hit.len())));
        }
        let mut nb = VertexSet::new();
        let mut nc = VertexSet::new();
        for &p in &hit {
            if !bds[p].is_empty() {
                nb = nb.union(&bds[p]);
                nc = nc.union(&pieces[p].1.boundary_centers);
                if home[p] == usize::MAX {
                    home[p] = t;
                }
            }
        }
        outer_bags.push((nb, nc));
    }
    if let Some(p) = (0..pieces.len()).find(|&p| !bds[p].is_empty() && home[p] == usize::MAX) {
        return Err(Error::Precondition(format!("no outer bag contains the boundary of piece {p}")));
    }

    let mut by_home: Vec<Vec<usize>> = vec![Vec::new(); outer.len()];
    let mut closed = Vec::new();
    for p in 0..pieces.len() {
        if home[p] == usize::MAX {
            closed.push(p);
        } else {
            by_home[home[p]].push(p);
        }
    }
    let mut bags = Vec::new();
    let mut centers = Vec::new();
    for (t, (nb, nc)) in outer_bags.iter().enumerate() {
        bags.push(nb.clone());
        centers.push(nc.clone());
        for &p in &by_home[t] {
            let cert = &pieces[p].1;
            for (c, cc) in cert.decomposition.bags.iter().zip(&cert.bag_centers) {
                bags.push(nb.union(c));
                centers.push(nc.union(cc));
            }
        }
    }
    for p in closed {
        let cert = &pieces[p].1;
        bags.extend(cert.decomposition.bags.iter().cloned());
        centers.extend(cert.bag_centers.iter().cloned());
    }
    if bags.is_empty() {
        bags.push(VertexSet::new());
        centers.push(VertexSet::new());
    }

    let subject: VertexSet = pieces.iter().fold(VertexSet::new(), |acc, p| acc.union(&p.0));
    let a_out = (k + 1) * a;
    let bd_w = g.boundary(&subject);
    let mut boundary_centers = pieces
        .iter()
        .zip(&bds)
        .filter(|(_, bd)| bd.intersects(&bd_w))
        .fold(VertexSet::new(), |acc, (p, _)| acc.union(&p.1.boundary_centers));
    if boundary_centers.len() > a_out {
        if let Some(qc) = find_quasi_center(g, &bd_w, a_out, b) {
            boundary_centers = qc.centers;
        }
    }
    let cert = QuasiBoundCertificate {
        subject,
        decomposition: LineDecomposition::new(bags),
        bag_centers: centers,
        a: a_out,
        b,
        boundary_centers,
    };
    if let Some(v) = verify_line_width(g, &cert)? {
        return Err(invariant(0, "compose", format!("{v:?}")));
    }
    Ok(cert)
}

/// Composes pieces along a path decomposition of their touching graph.
pub fn compose_touching(g: &Graph, pieces: &[(VertexSet, QuasiBoundCertificate)]) -> Result<QuasiBoundCertificate> {
    let pieces: Vec<(VertexSet, QuasiBoundCertificate)> = pieces.iter().filter(|p| !p.0.is_empty()).cloned().collect();
    if pieces.is_empty() {
        return Ok(QuasiBoundCertificate::empty(0, 0));
    }
    let mut owner = vec![usize::MAX; g.n()];
    for (i, (s, _)) in pieces.iter().enumerate() {
        for v in s.iter() {
            if owner[v] != usize::MAX {
                return Err(Error::Precondition(format!("pieces overlap at vertex {v}")));
            }
            owner[v] = i;
        }
    }
    let mut j_edges = Vec::new();
    for &(u, v) in g.edges() {
        let (a, b) = (owner[u], owner[v]);
        if a != usize::MAX && b != usize::MAX && a != b {
            j_edges.push((a.min(b), a.max(b)));
        }
    }
    let j = Graph::from_edge_list(pieces.len(), &j_edges)?;
    let jd = path_decomposition(&j);
    let k = jd.bags.iter().map(|b| b.len()).max().unwrap_or(1).max(1);
    let outer = LineDecomposition::new(
        jd.bags
            .iter()
            .map(|jb| jb.iter().fold(VertexSet::new(), |acc, p| acc.union(&pieces[p].0)))
            .collect(),
    );
    compose_line_decompositions(g, &pieces, &outer, k)
}
