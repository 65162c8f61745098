use std::collections::VecDeque;

use crate::graph::{Graph, VertexSet};

/// The tree `H_ℓ`: every vertex has degree one or three and every leaf is
/// at distance exactly `ℓ` from the root.
///
/// Vertices are numbered breadth-first: root `0`, its children `1, 2, 3`,
/// then two children per internal vertex in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternTree {
    ell: usize,
    graph: Graph,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
}

impl PatternTree {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (v != 0).then(|| self.parent[v])
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Vertices of the subtree rooted at `v`, breadth-first.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            out.push(u);
            queue.extend(self.children[u].iter().copied());
        }
        out
    }

    /// Vertex set of the branch `B_i` (`i ∈ {1, 2, 3}`).
    pub fn branch(&self, i: usize) -> VertexSet {
        assert!(self.ell >= 1 && (1..=3).contains(&i), "branch index out of range");
        self.subtree(i).into_iter().collect()
    }

    /// Vertices of the top `levels` levels, which form `H_{levels-1}`.
    pub fn top(&self, levels: usize) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.depth[v] < levels).collect()
    }
}

/// Canonical `H_ℓ`.
pub fn build_pattern_tree(ell: usize) -> PatternTree {
    let mut parent = vec![usize::MAX];
    let mut children: Vec<Vec<usize>> = vec![Vec::new()];
    let mut depth = vec![0];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        if depth[v] == ell {
            continue;
        }
        let count = if v == 0 { 3 } else { 2 };
        for _ in 0..count {
            let c = parent.len();
            parent.push(v);
            children.push(Vec::new());
            depth.push(depth[v] + 1);
            children[v].push(c);
            edges.push((v, c));
            queue.push_back(c);
        }
    }
    let graph = Graph::from_edge_list(parent.len(), &edges).expect("pattern tree is simple");
    PatternTree {
        ell,
        graph,
        parent,
        children,
        depth,
    }
}
