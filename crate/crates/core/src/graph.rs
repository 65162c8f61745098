//! Finite simple undirected graphs and the ambient metric.
//!
//! Every distance computed anywhere in the crate is a distance in the whole
//! host graph, even when the objects being measured are subsets or induced
//! subgraphs. The one exception is [`Graph::induced_distances`], used where a
//! definition explicitly asks for a path inside `G[X]`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sentinel for "no path" in raw distance arrays.
pub const INF: u32 = u32::MAX;

/// A sorted, duplicate-free set of vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(vec![v])
    }

    /// Builds a set from an already sorted, duplicate-free vector.
    pub fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        VertexSet(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn min(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        VertexSet(out)
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.iter().copied().filter(|&v| !other.contains(v)).collect())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn insert(&mut self, v: usize) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, v);
                true
            }
        }
    }

    /// Membership mask over `0..n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.0 {
            m[v] = true;
        }
        m
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }
}

impl From<Vec<usize>> for VertexSet {
    fn from(v: Vec<usize>) -> Self {
        v.into_iter().collect()
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, usize>>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

/// Finite simple undirected graph on vertices `0..n`.
///
/// Adjacency lists are sorted ascending and the edge list is canonical
/// (`u < v`, lexicographically sorted), so every iteration order in the
/// crate is reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from an edge list; duplicate pairs collapse.
    pub fn from_edge_list(n: usize, pairs: &[(usize, usize)]) -> Result<Graph> {
        let mut edges = Vec::with_capacity(pairs.len());
        for &(u, v) in pairs {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::Loop(u));
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        edges.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { adj, edges })
    }

    pub fn empty(n: usize) -> Graph {
        Graph {
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Canonical edge list.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Position of `uv` in the canonical edge list.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet((0..self.n()).collect())
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n() })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_set(&self, x: &VertexSet) -> Result<()> {
        x.iter().try_for_each(|v| self.check_vertex(v))
    }

    /// Multi-source BFS distances; unreachable vertices hold [`INF`].
    pub fn distances_from(&self, sources: &[usize]) -> Vec<u32> {
        self.distances_within(sources, u32::MAX - 1)
    }

    /// Multi-source BFS truncated at `radius`; vertices further away hold [`INF`].
    pub fn distances_within(&self, sources: &[usize], radius: u32) -> Vec<u32> {
        let mut dist = vec![INF; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            if du >= radius {
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w] == INF {
                    dist[w] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Sparse truncated BFS: `(vertex, distance)` pairs in BFS order.
    pub fn ball_distances(&self, sources: &[usize], radius: u32) -> Vec<(usize, u32)> {
        let mut seen = std::collections::HashMap::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        for &s in sources {
            if seen.insert(s, 0u32).is_none() {
                order.push((s, 0));
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = seen[&u];
            if du >= radius {
                continue;
            }
            for &w in &self.adj[u] {
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(w) {
                    e.insert(du + 1);
                    order.push((w, du + 1));
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// BFS distance between two vertices; `None` means infinity.
    pub fn distance(&self, u: usize, v: usize) -> Result<Option<usize>> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let d = self.distances_from(&[u])[v];
        Ok((d != INF).then_some(d as usize))
    }

    /// Distance between two nonempty vertex sets.
    pub fn set_distance(&self, x: &VertexSet, y: &VertexSet) -> Result<Option<usize>> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::EmptySet);
        }
        self.check_set(x)?;
        self.check_set(y)?;
        Ok(self.set_distance_raw(x.as_slice(), y.as_slice()))
    }

    pub(crate) fn set_distance_raw(&self, x: &[usize], y: &[usize]) -> Option<usize> {
        let dist = self.distances_from(x);
        y.iter()
            .map(|&v| dist[v])
            .min()
            .filter(|&d| d != INF)
            .map(|d| d as usize)
    }

    /// All vertices within distance `r` of `x`.
    pub fn ball(&self, x: &VertexSet, r: usize) -> Result<VertexSet> {
        if x.is_empty() {
            return Err(Error::EmptySet);
        }
        self.check_set(x)?;
        let r = r.min((u32::MAX - 2) as usize) as u32;
        Ok(self
            .ball_distances(x.as_slice(), r)
            .into_iter()
            .map(|(v, _)| v)
            .collect())
    }

    /// Vertices of `x` with a neighbour outside `x`.
    pub fn boundary(&self, x: &VertexSet) -> VertexSet {
        let mask = x.mask(self.n());
        VertexSet(
            x.iter()
                .filter(|&v| self.adj[v].iter().any(|&w| !mask[w]))
                .collect(),
        )
    }

    /// `x` and `y` intersect or are joined by an edge.
    pub fn touches(&self, x: &VertexSet, y: &VertexSet) -> bool {
        if x.intersects(y) {
            return true;
        }
        let mask = y.mask(self.n());
        x.iter().any(|v| self.adj[v].iter().any(|&w| mask[w]))
    }

    /// `G[x]` is nonempty and connected.
    pub fn is_connected_induced(&self, x: &VertexSet) -> bool {
        if x.is_empty() {
            return false;
        }
        self.induced_components(x).len() == 1
    }

    /// Connected components of `G[x]`, each sorted, ordered by minimum vertex.
    pub fn induced_components(&self, x: &VertexSet) -> Vec<VertexSet> {
        let mask = x.mask(self.n());
        let mut seen = vec![false; self.n()];
        let mut comps = Vec::new();
        for s in x.iter() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if mask[w] && !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comps.push(comp.into_iter().collect());
        }
        comps
    }

    pub fn components(&self) -> Vec<VertexSet> {
        self.induced_components(&self.vertices())
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.components().len() == 1
    }

    /// BFS distances inside `G[x]` from `sources ⊆ x`; vertices outside `x`
    /// or unreachable within it hold [`INF`].
    pub fn induced_distances(&self, x: &VertexSet, sources: &[usize]) -> Vec<u32> {
        let mask = x.mask(self.n());
        let mut dist = vec![INF; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if mask[s] && dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if mask[w] && dist[w] == INF {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Induced subgraph on `x`, relabelled to `0..|x|` in ascending order.
    /// Returns the subgraph and the map from new ids to old ids.
    pub fn induced_subgraph(&self, x: &VertexSet) -> (Graph, Vec<usize>) {
        let mut index = vec![usize::MAX; self.n()];
        for (i, v) in x.iter().enumerate() {
            index[v] = i;
        }
        let pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]))
            .collect();
        let g = Graph::from_edge_list(x.len(), &pairs).expect("induced subgraph is simple");
        (g, x.as_slice().to_vec())
    }

    /// Eccentricity-based diameter of a connected graph (`None` if disconnected).
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for v in 0..self.n() {
            let d = self.distances_from(&[v]);
            let m = *d.iter().max()?;
            if m == INF {
                return None;
            }
            best = best.max(m as usize);
        }
        Some(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edge_list(n, &e).unwrap()
    }

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn construction() {
        assert_eq!(Graph::from_edge_list(2, &[(0, 1)]).unwrap().m(), 1);
        assert_eq!(Graph::from_edge_list(3, &[(0, 1), (0, 1)]).unwrap().m(), 1);
        assert_eq!(Graph::from_edge_list(3, &[(1, 0), (0, 1)]).unwrap().m(), 1);
        assert_eq!(Graph::from_edge_list(4, &[(0, 0)]), Err(Error::Loop(0)));
        assert!(matches!(
            Graph::from_edge_list(2, &[(0, 2)]),
            Err(Error::VertexOutOfRange { vertex: 2, n: 2 })
        ));
    }

    #[test]
    fn distances() {
        let p = path(5);
        assert_eq!(p.distance(0, 4).unwrap(), Some(4));
        assert_eq!(p.distance(3, 3).unwrap(), Some(0));
        let two = Graph::from_edge_list(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(two.distance(0, 3).unwrap(), None);
        assert!(p.distance(0, 9).is_err());

        let p10 = path(10);
        assert_eq!(p10.set_distance(&set(&[1, 2]), &set(&[2, 5])).unwrap(), Some(0));
        assert_eq!(p10.set_distance(&set(&[0]), &set(&[9])).unwrap(), Some(9));
        assert_eq!(two.set_distance(&set(&[0]), &set(&[2, 3])).unwrap(), None);
        assert_eq!(p10.set_distance(&set(&[]), &set(&[1])), Err(Error::EmptySet));
    }

    #[test]
    fn balls_and_boundaries() {
        let p9 = path(9);
        assert_eq!(p9.ball(&set(&[4]), 0).unwrap(), set(&[4]));
        assert_eq!(p9.ball(&set(&[4]), 2).unwrap(), set(&[2, 3, 4, 5, 6]));
        assert_eq!(p9.ball(&set(&[4]), 8).unwrap(), p9.vertices());

        let p5 = path(5);
        assert_eq!(p5.boundary(&p5.vertices()), set(&[]));
        assert_eq!(p5.boundary(&set(&[1, 2, 3])), set(&[1, 3]));
        assert_eq!(p5.boundary(&set(&[])), set(&[]));
    }

    #[test]
    fn touching_and_connectivity() {
        let p4 = path(4);
        assert!(p4.touches(&set(&[0, 1]), &set(&[1, 2])));
        assert!(p4.touches(&set(&[0]), &set(&[1])));
        assert!(!p4.touches(&set(&[0]), &set(&[3])));

        let p5 = path(5);
        assert!(p5.is_connected_induced(&set(&[3])));
        assert!(!p5.is_connected_induced(&set(&[0, 2])));
        assert!(p5.is_connected_induced(&set(&[1, 2, 3])));
        assert!(!p5.is_connected_induced(&set(&[])));
    }
}
