//! Tie-broken geodesics and Voronoi partitions.
//!
//! A [`TieBreaker`] ranks every edge. Paths are ordered first by length and
//! then by the minimum-rank edge of their symmetric difference. For paths of
//! equal length this is the lexicographic order of their ascending rank
//! lists, which is what the geodesic DP below compares.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet, INF};

/// Serializable description of a tie-breaker. Rank arrays themselves are
/// never written out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TieBreakKind {
    Lex,
    Seeded { seed: u64 },
}

/// Total ranking of the edges of one graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieBreaker {
    kind: TieBreakKind,
    rank: Vec<u32>,
}

impl TieBreaker {
    /// Ranks edges by `(min endpoint, max endpoint)`.
    pub fn lex(g: &Graph) -> TieBreaker {
        TieBreaker {
            kind: TieBreakKind::Lex,
            rank: (0..g.m() as u32).collect(),
        }
    }

    /// Uniformly random permutation of ranks from a ChaCha8 stream.
    pub fn seeded(g: &Graph, seed: u64) -> TieBreaker {
        let mut rank: Vec<u32> = (0..g.m() as u32).collect();
        rank.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        TieBreaker {
            kind: TieBreakKind::Seeded { seed },
            rank,
        }
    }

    pub fn from_kind(g: &Graph, kind: TieBreakKind) -> TieBreaker {
        match kind {
            TieBreakKind::Lex => TieBreaker::lex(g),
            TieBreakKind::Seeded { seed } => TieBreaker::seeded(g, seed),
        }
    }

    pub fn kind(&self) -> TieBreakKind {
        self.kind
    }

    /// Rank of edge `uv`; panics if `uv` is not an edge.
    pub fn rank(&self, g: &Graph, u: usize, v: usize) -> u32 {
        self.rank[g.edge_index(u, v).expect("rank of a non-edge")]
    }

    pub fn rank_of_index(&self, idx: usize) -> u32 {
        self.rank[idx]
    }
}

/// A simple path given by its vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LambdaPath {
    vertices: Vec<usize>,
}

impl LambdaPath {
    /// Checks that consecutive vertices are adjacent and no vertex repeats.
    pub fn new(g: &Graph, vertices: Vec<usize>) -> Result<LambdaPath> {
        if vertices.is_empty() {
            return Err(Error::InvalidPath("empty vertex sequence".into()));
        }
        for &v in &vertices {
            g.check_vertex(v)?;
        }
        let mut seen = HashSet::new();
        if !vertices.iter().all(|v| seen.insert(*v)) {
            return Err(Error::InvalidPath("repeated vertex".into()));
        }
        if let Some(w) = vertices.windows(2).find(|w| !g.has_edge(w[0], w[1])) {
            return Err(Error::InvalidPath(format!("{}-{} is not an edge", w[0], w[1])));
        }
        Ok(LambdaPath { vertices })
    }

    pub(crate) fn from_trusted(vertices: Vec<usize>) -> LambdaPath {
        LambdaPath { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() <= 1
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices.iter().copied().collect()
    }

    pub fn reversed(&self) -> LambdaPath {
        let mut v = self.vertices.clone();
        v.reverse();
        LambdaPath { vertices: v }
    }

    /// Ascending list of edge ranks.
    pub fn sorted_ranks(&self, g: &Graph, tb: &TieBreaker) -> Vec<u32> {
        let mut r: Vec<u32> = self
            .vertices
            .windows(2)
            .map(|w| tb.rank(g, w[0], w[1]))
            .collect();
        r.sort_unstable();
        r
    }
}

/// Orders two distinct paths: `Less` means `p` is Λ-shorter than `q`.
pub fn lambda_compare(g: &Graph, tb: &TieBreaker, p: &LambdaPath, q: &LambdaPath) -> Result<Ordering> {
    let (rp, rq) = (p.sorted_ranks(g, tb), q.sorted_ranks(g, tb));
    if rp == rq {
        // Equal edge sets: the same path up to orientation (or both trivial
        // and equal).
        if p.vertices == q.vertices || p.reversed().vertices == q.vertices || (p.is_empty() && q.is_empty() && p.start() == q.start()) {
            return Err(Error::SamePath);
        }
        // Distinct single-vertex paths have no edges; fall back to vertex id
        // so the order stays total.
        return Ok(p.start().cmp(&q.start()));
    }
    Ok(rp.len().cmp(&rq.len()).then_with(|| rp.cmp(&rq)))
}

/// Λ-geodesics from every vertex to a source set, as a successor forest.
#[derive(Debug, Clone)]
pub struct LambdaForest {
    pub dist: Vec<u32>,
    /// Next vertex toward the sources (`usize::MAX` at sources and
    /// unreachable vertices).
    pub next: Vec<usize>,
    /// Source vertex where the geodesic ends.
    pub root: Vec<usize>,
}

impl LambdaForest {
    /// The Λ-geodesic from `v` to the source set, `v` first.
    pub fn path(&self, v: usize) -> Option<LambdaPath> {
        if self.dist[v] == INF {
            return None;
        }
        let mut out = vec![v];
        let mut cur = v;
        while self.next[cur] != usize::MAX {
            cur = self.next[cur];
            out.push(cur);
        }
        Some(LambdaPath::from_trusted(out))
    }
}

/// Compares the chains `v→a→…` and `v→b→…` of equal length in a partially
/// built forest. Returns `Less` when the chain through `a` is Λ-shorter.
fn compare_chains(g: &Graph, tb: &TieBreaker, next: &[usize], v: usize, a: usize, b: usize) -> Ordering {
    let mut ra = vec![tb.rank(g, v, a)];
    let mut rb = vec![tb.rank(g, v, b)];
    let (mut x, mut y) = (a, b);
    while x != y {
        let (nx, ny) = (next[x], next[y]);
        if nx == usize::MAX || ny == usize::MAX {
            break;
        }
        ra.push(tb.rank(g, x, nx));
        rb.push(tb.rank(g, y, ny));
        x = nx;
        y = ny;
    }
    ra.sort_unstable();
    rb.sort_unstable();
    ra.cmp(&rb)
}

/// Builds the BFS shortest-path DAG from `sources` and selects, layer by
/// layer, the Λ-least extension for every vertex.
pub fn lambda_forest(g: &Graph, tb: &TieBreaker, sources: &[usize]) -> LambdaForest {
    let dist = g.distances_from(sources);
    let n = g.n();
    let mut order: Vec<usize> = (0..n).filter(|&v| dist[v] != INF).collect();
    order.sort_by_key(|&v| dist[v]);
    let mut next = vec![usize::MAX; n];
    let mut root = vec![usize::MAX; n];
    for &v in &order {
        if dist[v] == 0 {
            root[v] = v;
            continue;
        }
        let mut best = usize::MAX;
        for &w in g.neighbors(v) {
            if dist[w] + 1 != dist[v] {
                continue;
            }
            if best == usize::MAX || compare_chains(g, tb, &next, v, w, best) == Ordering::Less {
                best = w;
            }
        }
        next[v] = best;
        root[v] = root[best];
    }
    LambdaForest { dist, next, root }
}

/// The unique Λ-least path from `v` to the set `x` (starting at `v`).
pub fn lambda_geodesic(g: &Graph, tb: &TieBreaker, v: usize, x: &VertexSet) -> Result<LambdaPath> {
    if x.is_empty() {
        return Err(Error::EmptySet);
    }
    g.check_vertex(v)?;
    g.check_set(x)?;
    lambda_forest(g, tb, x.as_slice())
        .path(v)
        .ok_or(Error::Unreachable(v))
}

/// Index of the Λ-closest building to `v`, computed building by building
/// and folded with [`lambda_compare`].
pub fn lambda_closest(g: &Graph, tb: &TieBreaker, buildings: &[VertexSet], v: usize) -> Result<Option<usize>> {
    let mut best: Option<(usize, LambdaPath)> = None;
    for (i, b) in buildings.iter().enumerate() {
        let p = match lambda_geodesic(g, tb, v, b) {
            Ok(p) => p,
            Err(Error::Unreachable(_)) => continue,
            Err(e) => return Err(e),
        };
        best = match best {
            None => Some((i, p)),
            Some((j, q)) => {
                if lambda_compare(g, tb, &p, &q)? == Ordering::Less {
                    Some((i, p))
                } else {
                    Some((j, q))
                }
            }
        };
    }
    Ok(best.map(|(i, _)| i))
}

/// Voronoi partition of `V(G)` by a family of disjoint buildings.
#[derive(Debug, Clone)]
pub struct VoronoiPartition {
    /// Building index owning each vertex.
    pub owner: Vec<usize>,
    pub cells: Vec<VertexSet>,
    /// Distance from each vertex to the union of the buildings.
    pub dist: Vec<u32>,
    pub forest: LambdaForest,
}

impl VoronoiPartition {
    /// Pairs of building indices whose cells touch, `i < j`.
    pub fn touching_pairs(&self, g: &Graph) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for &(u, v) in g.edges() {
            let (a, b) = (self.owner[u], self.owner[v]);
            if a != b {
                out.insert((a.min(b), a.max(b)));
            }
        }
        out
    }

    /// Adjacency lists of the touching relation.
    pub fn touch_graph(&self, g: &Graph) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.cells.len()];
        for (a, b) in self.touching_pairs(g) {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

pub(crate) fn check_family(g: &Graph, buildings: &[VertexSet]) -> Result<Vec<usize>> {
    let mut owner = vec![usize::MAX; g.n()];
    for (i, b) in buildings.iter().enumerate() {
        g.check_set(b)?;
        if !g.is_connected_induced(b) {
            return Err(Error::DisconnectedBuilding(i));
        }
        for v in b.iter() {
            if owner[v] != usize::MAX {
                return Err(Error::OverlappingBuildings(v));
            }
            owner[v] = i;
        }
    }
    Ok(owner)
}

/// Computes `Δ_T(X)` for every building `X` of `buildings`.
pub fn voronoi_partition(g: &Graph, tb: &TieBreaker, buildings: &[VertexSet]) -> Result<VoronoiPartition> {
    let base_owner = check_family(g, buildings)?;
    let sources: Vec<usize> = buildings.iter().flat_map(|b| b.iter()).collect();
    let forest = lambda_forest(g, tb, &sources);
    let mut owner = vec![usize::MAX; g.n()];
    let mut cells = vec![Vec::new(); buildings.len()];
    for v in 0..g.n() {
        let r = forest.root[v];
        if r == usize::MAX {
            return Err(Error::UncoveredComponent(v));
        }
        owner[v] = base_owner[r];
        cells[owner[v]].push(v);
    }
    Ok(VoronoiPartition {
        owner,
        cells: cells.into_iter().map(VertexSet::from_sorted).collect(),
        dist: forest.dist.clone(),
        forest,
    })
}

/// Whether building `x` adjoins building `y` (their cells touch).
pub fn adjoins(g: &Graph, tb: &TieBreaker, buildings: &[VertexSet], x: usize, y: usize) -> Result<bool> {
    if x == y {
        return Err(Error::Precondition("a building does not adjoin itself".into()));
    }
    if x >= buildings.len() || y >= buildings.len() {
        return Err(Error::Precondition("building index out of range".into()));
    }
    let vp = voronoi_partition(g, tb, buildings)?;
    Ok(g.touches(&vp.cells[x], &vp.cells[y]))
}
