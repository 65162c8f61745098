use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet, INF};
use crate::minors::model::{verify_fat_minor, verify_minor_model, FatMinorModel, MinorModel, UElem};
use crate::minors::search::find_minor_model;

/// `φ : V(G) → V(G')` claimed to be an `(L, C)`-quasi-isometry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiIsometryMap {
    pub phi: Vec<usize>,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "C")]
    pub c: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QiViolation {
    #[error("map domain mismatch: {0}")]
    Domain(String),
    #[error("upper bound: dist'({u},{v}) = {image} exceeds L*{original}+C")]
    Upper { u: usize, v: usize, original: u32, image: u32 },
    #[error("lower bound: dist({u},{v}) = {original} exceeds L*{image}+C")]
    Lower { u: usize, v: usize, original: u32, image: u32 },
    #[error("density: target vertex {0} is further than C from the image")]
    Density(usize),
}

fn bound(l: usize, d: u32, c: usize) -> u64 {
    l as u64 * d as u64 + c as u64
}

/// Checks the three quasi-isometry conditions over all pairs.
pub fn verify_quasi_isometry(g: &Graph, target: &Graph, q: &QuasiIsometryMap) -> Option<QiViolation> {
    if q.phi.len() != g.n() {
        return Some(QiViolation::Domain(format!("{} images for {} vertices", q.phi.len(), g.n())));
    }
    if let Some(&y) = q.phi.iter().find(|&&y| y >= target.n()) {
        return Some(QiViolation::Domain(format!("image {y} is not a target vertex")));
    }
    let mut image_dist: HashMap<usize, Vec<u32>> = HashMap::new();
    for &y in &q.phi {
        image_dist.entry(y).or_insert_with(|| target.distances_from(&[y]));
    }
    for u in 0..g.n() {
        let du = g.distances_from(&[u]);
        let hu = &image_dist[&q.phi[u]];
        for v in u + 1..g.n() {
            let (dg, dh) = (du[v], hu[q.phi[v]]);
            if dg != INF && (dh == INF || dh as u64 > bound(q.l, dg, q.c)) {
                return Some(QiViolation::Upper { u, v, original: dg, image: dh });
            }
            if dh != INF && (dg == INF || dg as u64 > bound(q.l, dh, q.c)) {
                return Some(QiViolation::Lower { u, v, original: dg, image: dh });
            }
        }
    }
    let mut images = q.phi.clone();
    images.sort_unstable();
    images.dedup();
    let near = target.distances_within(&images, q.c.min(u32::MAX as usize - 2) as u32);
    (0..target.n()).find(|&y| near[y] == INF).map(QiViolation::Density)
}

/// Minor model of `H` in the target, and whether it came from the direct
/// construction (`true`) or the search fallback.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transfer {
    pub model: MinorModel,
    pub constructive: bool,
}

/// A shortest path from `a` to `b`, preferring smaller vertex ids.
fn shortest_path(g: &Graph, a: usize, b: usize) -> Option<Vec<usize>> {
    let d = g.distances_from(&[b]);
    if d[a] == INF {
        return None;
    }
    let mut out = vec![a];
    let mut cur = a;
    while cur != b {
        cur = *g.neighbors(cur).iter().filter(|&&w| d[w] + 1 == d[cur]).min().unwrap();
        out.push(cur);
    }
    Some(out)
}

/// Images of the parts of `η` made connected in the target: each edge of a
/// spanning tree of `G[η(x)]` becomes a target geodesic between the images
/// of its ends.
fn connected_image(g: &Graph, target: &Graph, phi: &[usize], part: &VertexSet) -> Option<VertexSet> {
    let mut out: Vec<usize> = part.iter().map(|v| phi[v]).collect();
    let inside = part.mask(g.n());
    let root = part.min()?;
    let mut seen = HashMap::from([(root, ())]);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if inside[w] && seen.insert(w, ()).is_none() {
                out.extend(shortest_path(target, phi[u], phi[w])?);
                queue.push_back(w);
            }
        }
    }
    Some(out.into_iter().collect())
}

const FREE: usize = usize::MAX;

/// Interior of a shortest path from branch `u` to branch `w` through
/// unclaimed vertices, optionally confined to `region`.
fn link(target: &Graph, owner: &[usize], u: usize, w: usize, region: Option<&[u32]>) -> Option<Vec<usize>> {
    let mut prev = vec![FREE; target.n()];
    let mut queue: VecDeque<usize> = (0..target.n()).filter(|&y| owner[y] == u).collect();
    for &y in &queue {
        prev[y] = y;
    }
    while let Some(y) = queue.pop_front() {
        for &z in target.neighbors(y) {
            if owner[z] == w {
                let mut out = Vec::new();
                let mut cur = y;
                while owner[cur] != u {
                    out.push(cur);
                    cur = prev[cur];
                }
                return Some(out);
            }
            if prev[z] == FREE && owner[z] == FREE && region.map_or(true, |r| r[z] != INF) {
                prev[z] = y;
                queue.push_back(z);
            }
        }
    }
    None
}

/// Vertex parts are imaged first. Each edge of `H` then joins its smaller
/// end to the other through unclaimed vertices, near the edge's own image
/// when possible.
fn construct(g: &Graph, target: &Graph, h: &Graph, phi: &[usize], f: &FatMinorModel, reach: usize) -> Option<MinorModel> {
    let mut owner = vec![FREE; target.n()];
    let mut branch = Vec::with_capacity(h.n());
    for v in 0..h.n() {
        let img = connected_image(g, target, phi, f.eta.get(&UElem::Vertex(v))?)?;
        for y in img.iter() {
            if owner[y] != FREE {
                return None;
            }
            owner[y] = v;
        }
        branch.push(img);
    }
    for &(u, w) in h.edges() {
        let img = connected_image(g, target, phi, f.eta.get(&UElem::Edge(u, w))?)?;
        let near = target.distances_within(img.as_slice(), reach.min(u32::MAX as usize - 2) as u32);
        let path = link(target, &owner, u, w, Some(&near)).or_else(|| link(target, &owner, u, w, None))?;
        for y in path {
            owner[y] = u;
            branch[u].insert(y);
        }
    }
    Some(MinorModel { branch_sets: branch })
}

/// Carries a c-fat model of `H` in `G` through a quasi-isometry to an
/// ordinary minor model in the target.
pub fn transfer_fat_minor(
    g: &Graph,
    target: &Graph,
    h: &Graph,
    q: &QuasiIsometryMap,
    f: &FatMinorModel,
    budget: usize,
) -> Result<Transfer> {
    let threshold = q.l * (q.l + q.c) + q.c;
    if f.c < threshold {
        return Err(Error::Precondition(format!("fatness {} is below L(L+C)+C = {threshold}", f.c)));
    }
    if let Some(v) = verify_fat_minor(g, h, f) {
        return Err(Error::Precondition(format!("not a fat minor: {v}")));
    }
    if let Some(v) = verify_quasi_isometry(g, target, q) {
        return Err(Error::Precondition(format!("not a quasi-isometry: {v}")));
    }
    if let Some(model) = construct(g, target, h, &q.phi, f, q.l + q.c) {
        if verify_minor_model(target, h, &model).is_none() {
            return Ok(Transfer { model, constructive: true });
        }
    }
    match find_minor_model(target, h, budget)?.model {
        Some(model) => Ok(Transfer { model, constructive: false }),
        None => Err(Error::BudgetExhausted),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minors::pattern::build_pattern_tree;
    use std::collections::BTreeMap;

    fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edge_list(n, &e).unwrap()
    }

    #[test]
    fn identity_and_halving() {
        let g = path(6);
        let id = QuasiIsometryMap { phi: (0..6).collect(), l: 1, c: 0 };
        assert_eq!(verify_quasi_isometry(&g, &g, &id), None);
        let big = path(20);
        let half = QuasiIsometryMap { phi: (0..20).map(|i| i / 2).collect(), l: 2, c: 1 };
        assert_eq!(verify_quasi_isometry(&big, &path(10), &half), None);
        let constant = QuasiIsometryMap { phi: vec![0; 10], l: 1, c: 0 };
        assert!(matches!(
            verify_quasi_isometry(&path(10), &Graph::empty(1), &constant),
            Some(QiViolation::Lower { .. })
        ));
    }

    #[test]
    fn identity_transfer() {
        let len = 20;
        let mut e = Vec::new();
        for a in 0..3 {
            let mut prev = 0;
            for i in 1..=len {
                e.push((prev, a * len + i));
                prev = a * len + i;
            }
        }
        let g = Graph::from_edge_list(3 * len + 1, &e).unwrap();
        let h = build_pattern_tree(1);
        let mut eta = BTreeMap::new();
        eta.insert(UElem::Vertex(0), VertexSet::singleton(0));
        for a in 0..3 {
            eta.insert(UElem::Edge(0, a + 1), (a * len + 1..a * len + len).collect());
            eta.insert(UElem::Vertex(a + 1), VertexSet::singleton(a * len + len));
        }
        // Edge images meet at the hub, so only c = 1 holds.
        let f = FatMinorModel { c: 1, eta };
        assert_eq!(verify_fat_minor(&g, h.graph(), &f), None);
        let id = QuasiIsometryMap { phi: (0..g.n()).collect(), l: 1, c: 0 };
        let t = transfer_fat_minor(&g, &g, h.graph(), &id, &f, 1000).unwrap();
        assert!(t.constructive);
        assert_eq!(verify_minor_model(&g, h.graph(), &t.model), None);
        let bad = QuasiIsometryMap { phi: (0..g.n()).collect(), l: 1, c: 1 };
        assert!(matches!(
            transfer_fat_minor(&g, &g, h.graph(), &bad, &f, 1000),
            Err(Error::Precondition(_))
        ));
    }
}
