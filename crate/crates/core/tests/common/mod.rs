//! Independent oracles and generators shared by the integration tests.
//! Nothing here calls the library algorithms it is used to check.

#![allow(dead_code)]

use std::collections::VecDeque;

use cwl_core::{Graph, TieBreaker};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random recursive tree plus each remaining pair with probability `p`.
pub fn random_connected(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut e: Vec<(usize, usize)> = (1..n).map(|i| (r.gen_range(0..i), i)).collect();
    for v in 1..n {
        for u in 0..v {
            if r.gen_bool(p) {
                e.push((u, v));
            }
        }
    }
    Graph::from_edge_list(n, &e).unwrap()
}

/// Erdős–Rényi graph, possibly disconnected.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut e = Vec::new();
    for v in 1..n {
        for u in 0..v {
            if r.gen_bool(p) {
                e.push((u, v));
            }
        }
    }
    Graph::from_edge_list(n, &e).unwrap()
}

/// Plain BFS distances from a source set.
pub fn bfs(g: &Graph, sources: &[usize]) -> Vec<Option<usize>> {
    let mut d = vec![None; g.n()];
    let mut q = VecDeque::new();
    for &s in sources {
        if d[s].is_none() {
            d[s] = Some(0);
            q.push_back(s);
        }
    }
    while let Some(u) = q.pop_front() {
        for &w in g.neighbors(u) {
            if d[w].is_none() {
                d[w] = Some(d[u].unwrap() + 1);
                q.push_back(w);
            }
        }
    }
    d
}

/// Every simple path from `v` that ends at its first vertex in `x`, up to
/// `max_len` edges.
pub fn paths_to(g: &Graph, v: usize, x: &[bool], max_len: usize) -> Vec<Vec<usize>> {
    fn go(g: &Graph, x: &[bool], max_len: usize, path: &mut Vec<usize>, on: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if x[last] {
            out.push(path.clone());
            return;
        }
        if path.len() > max_len {
            return;
        }
        for &w in g.neighbors(last) {
            if !on[w] {
                on[w] = true;
                path.push(w);
                go(g, x, max_len, path, on, out);
                path.pop();
                on[w] = false;
            }
        }
    }
    let mut on = vec![false; g.n()];
    on[v] = true;
    let mut out = Vec::new();
    go(g, x, max_len, &mut vec![v], &mut on, &mut out);
    out
}

/// Edge ranks of a path, ascending.
pub fn rank_key(g: &Graph, tb: &TieBreaker, path: &[usize]) -> Vec<u32> {
    let mut r: Vec<u32> = path.windows(2).map(|w| tb.rank(g, w[0], w[1])).collect();
    r.sort_unstable();
    r
}

/// Λ-least path from `v` to `x` by exhaustive enumeration: shortest first,
/// then the path owning the least rank of the symmetric difference. Returns
/// the winner and how many enumerated paths tie with it.
pub fn lambda_min_brute(g: &Graph, tb: &TieBreaker, v: usize, x: &[bool], max_len: usize) -> Option<(Vec<usize>, usize)> {
    let paths = paths_to(g, v, x, max_len);
    let key = |p: &Vec<usize>| (p.len(), rank_key(g, tb, p));
    let best = paths.iter().min_by_key(|p| key(p))?.clone();
    let k = key(&best);
    let ties = paths.iter().filter(|p| key(p) == k).count();
    Some((best, ties))
}

/// Λ-comparison through the weight `Σ 2^(-rank)` on equal-length paths,
/// in exact binary arithmetic: larger weight is Λ-shorter.
pub fn weight_greater(a: &[u32], b: &[u32]) -> bool {
    let top = a.iter().chain(b).copied().max().unwrap_or(0) as usize + 1;
    let mut wa = vec![0u8; top + 1];
    let mut wb = vec![0u8; top + 1];
    for &r in a {
        wa[r as usize] = 1;
    }
    for &r in b {
        wb[r as usize] = 1;
    }
    // Bit `r` has value 2^(-r); distinct ranks make each a plain binary
    // fraction, so the first difference from the most significant bit decides.
    for i in 0..=top {
        if wa[i] != wb[i] {
            return wa[i] > wb[i];
        }
    }
    false
}

/// Vertex separation number by branch and bound over vertex orders: the
/// least `k` such that some order keeps at most `k` placed vertices with an
/// unplaced neighbour after every step. It equals path-width.
pub fn vertex_separation_brute(g: &Graph) -> usize {
    fn cut(g: &Graph, placed: &[bool]) -> usize {
        (0..g.n())
            .filter(|&u| placed[u] && g.neighbors(u).iter().any(|&w| !placed[w]))
            .count()
    }
    fn go(g: &Graph, k: usize, placed: &mut [bool], count: usize) -> bool {
        if count == g.n() {
            return true;
        }
        for v in 0..g.n() {
            if placed[v] {
                continue;
            }
            placed[v] = true;
            let ok = cut(g, placed) <= k && go(g, k, placed, count + 1);
            placed[v] = false;
            if ok {
                return true;
            }
        }
        false
    }
    let n = g.n();
    (0..=n).find(|&k| go(g, k, &mut vec![false; n], 0)).unwrap()
}

/// The three decomposition axioms checked literally over vertex sets.
pub fn decomposition_axioms(g: &Graph, subject: &[usize], bags: &[Vec<usize>]) -> bool {
    let inside = |v: usize| subject.contains(&v);
    if bags.iter().flatten().any(|&v| !inside(v)) {
        return false;
    }
    if subject.iter().any(|&v| !bags.iter().any(|b| b.contains(&v))) {
        return false;
    }
    for &(u, v) in g.edges() {
        if inside(u) && inside(v) && !bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            return false;
        }
    }
    subject.iter().all(|&v| {
        let hits: Vec<usize> = (0..bags.len()).filter(|&i| bags[i].contains(&v)).collect();
        hits.windows(2).all(|w| w[1] == w[0] + 1)
    })
}

/// Whether `h` is a minor of `g`, by trying every assignment of host
/// vertices to branch sets (or to none).
pub fn is_minor_brute(g: &Graph, h: &Graph) -> bool {
    let n = g.n();
    let k = h.n();
    if k == 0 {
        return true;
    }
    if k > n {
        return false;
    }
    let mut label = vec![0; n];
    loop {
        if assignment_is_model(g, h, &label) {
            return true;
        }
        // Next assignment in base k+1.
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            label[i] += 1;
            if label[i] <= k {
                break;
            }
            label[i] = 0;
            i += 1;
        }
    }
}

fn assignment_is_model(g: &Graph, h: &Graph, label: &[usize]) -> bool {
    let k = h.n();
    for b in 0..k {
        let members: Vec<usize> = (0..g.n()).filter(|&v| label[v] == b).collect();
        if members.is_empty() {
            return false;
        }
        let mut seen = vec![false; g.n()];
        let mut stack = vec![members[0]];
        seen[members[0]] = true;
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if label[w] == b && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if members.iter().any(|&v| !seen[v]) {
            return false;
        }
    }
    h.edges().iter().all(|&(a, b)| g.edges().iter().any(|&(u, v)| (label[u], label[v]) == (a, b) || (label[u], label[v]) == (b, a)))
}

/// Bags of the vertex-separation decomposition along `order`: each vertex
/// with every earlier vertex that still has a neighbour at or after it.
pub fn bags_from_order(g: &Graph, order: &[usize]) -> Vec<Vec<usize>> {
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    (0..order.len())
        .map(|i| {
            let mut bag: Vec<usize> = order[..i]
                .iter()
                .copied()
                .filter(|&u| g.neighbors(u).iter().any(|&w| pos[w] != usize::MAX && pos[w] >= i))
                .collect();
            bag.push(order[i]);
            bag.sort_unstable();
            bag
        })
        .collect()
}

/// Greedy centers covering `set` within `r`: repeatedly the first uncovered
/// vertex becomes a center.
pub fn greedy_centers(g: &Graph, set: &[usize], r: usize) -> Vec<usize> {
    let mut centers = Vec::new();
    let mut covered = vec![false; g.n()];
    for &v in set {
        if covered[v] {
            continue;
        }
        centers.push(v);
        for (w, d) in bfs(g, &[v]).into_iter().enumerate() {
            if d.is_some_and(|d| d <= r) {
                covered[w] = true;
            }
        }
    }
    centers.sort_unstable();
    centers
}

/// A random instance of splicing piece decompositions along an outer
/// decomposition of the piece graph.
pub struct ComposeInstance {
    pub g: Graph,
    pub pieces: Vec<(cwl_core::VertexSet, cwl_core::decomp::QuasiBoundCertificate)>,
    pub outer: cwl_core::decomp::LineDecomposition,
    pub k: usize,
    pub a: usize,
    pub b: usize,
}

pub fn compose_instance(seed: u64) -> ComposeInstance {
    use cwl_core::decomp::{LineDecomposition, QuasiBoundCertificate};
    use cwl_core::VertexSet;

    let mut r = rng(seed);
    let n = r.gen_range(2..40);
    let g = random_connected(n, r.gen_range(0.0..0.12), seed ^ 0x9e37);
    let m = r.gen_range(1..=6.min(n));
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.shuffle(&mut r);
    seeds.truncate(m);
    // Nearest seed by BFS, ties to the earlier seed.
    let dist: Vec<Vec<Option<usize>>> = seeds.iter().map(|&s| bfs(&g, &[s])).collect();
    let owner: Vec<usize> = (0..n).map(|v| (0..m).min_by_key(|&i| (dist[i][v].unwrap(), i)).unwrap()).collect();
    let b = r.gen_range(0..3);
    let mut pieces = Vec::new();
    for i in 0..m {
        let mut members: Vec<usize> = (0..n).filter(|&v| owner[v] == i).collect();
        members.shuffle(&mut r);
        let mut sub_adj_ok = vec![false; n];
        for &v in &members {
            sub_adj_ok[v] = true;
        }
        // Decomposition of G[piece] only: restrict to edges inside.
        let edges: Vec<(usize, usize)> = g.edges().iter().copied().filter(|&(u, v)| sub_adj_ok[u] && sub_adj_ok[v]).collect();
        let inner = Graph::from_edge_list(n, &edges).unwrap();
        let bags = bags_from_order(&inner, &members);
        let centers: Vec<Vec<usize>> = bags.iter().map(|bag| greedy_centers(&g, bag, b)).collect();
        let subject: VertexSet = members.iter().copied().collect();
        let bd: Vec<usize> = g.boundary(&subject).iter().collect();
        let bcenters = greedy_centers(&g, &bd, b);
        let a = centers.iter().map(Vec::len).chain([bcenters.len(), 1]).max().unwrap();
        pieces.push((
            subject.clone(),
            QuasiBoundCertificate {
                subject,
                decomposition: LineDecomposition::new(bags.into_iter().map(VertexSet::from).collect()),
                bag_centers: centers.into_iter().map(VertexSet::from).collect(),
                a,
                b,
                boundary_centers: bcenters.into_iter().collect(),
            },
        ));
    }
    // Outer decomposition from a random order of the piece graph.
    let mut qe = Vec::new();
    for &(u, v) in g.edges() {
        if owner[u] != owner[v] {
            qe.push((owner[u], owner[v]));
        }
    }
    let q = Graph::from_edge_list(m, &qe).unwrap();
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut r);
    let qbags = bags_from_order(&q, &order);
    let k = qbags.iter().map(Vec::len).max().unwrap();
    let outer = LineDecomposition::new(
        qbags
            .iter()
            .map(|qb| qb.iter().fold(VertexSet::new(), |acc, &p| acc.union(&pieces[p].0)))
            .collect(),
    );
    let a = pieces.iter().map(|p| p.1.a).max().unwrap();
    ComposeInstance { g, pieces, outer, k, a, b }
}

/// A connected `W` at distance exactly `c + 1` from each of three models
/// together with a leg from `W` to each model, or `None`.
pub fn claw_setup(
    g: &Graph,
    tb: &TieBreaker,
    models: &[cwl_core::minors::SuperfatModel; 3],
) -> Option<(cwl_core::VertexSet, [cwl_core::LambdaPath; 3])> {
    use cwl_core::metric::lambda_geodesic;
    use cwl_core::VertexSet;

    let c = models[0].c;
    let unions: Vec<VertexSet> = models.iter().map(|m| m.union()).collect();
    let dist: Vec<Vec<Option<usize>>> = unions.iter().map(|u| bfs(g, u.as_slice())).collect();
    let far = |v: usize| dist.iter().all(|d| d[v].is_some_and(|d| d > c));
    let mut seen = vec![false; g.n()];
    for s in 0..g.n() {
        if seen[s] || !far(s) {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < comp.len() {
            for &w in g.neighbors(comp[i]) {
                if !seen[w] && far(w) {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            i += 1;
        }
        let ends: Option<Vec<usize>> = dist.iter().map(|d| comp.iter().copied().find(|&v| d[v] == Some(c + 1))).collect();
        if let Some(ends) = ends {
            let legs: Vec<cwl_core::LambdaPath> =
                ends.iter().zip(&unions).map(|(&v, u)| lambda_geodesic(g, tb, v, u).unwrap()).collect();
            return Some((comp.into_iter().collect(), legs.try_into().unwrap()));
        }
    }
    None
}

/// Hub 0 with three arms of the given lengths; arm tips are returned.
pub fn tripod(arms: [usize; 3]) -> (Graph, [usize; 3]) {
    let mut e = Vec::new();
    let mut next = 1;
    let mut tips = [0; 3];
    for (a, &len) in arms.iter().enumerate() {
        let mut prev = 0;
        for _ in 0..len {
            e.push((prev, next));
            prev = next;
            next += 1;
        }
        tips[a] = prev;
    }
    (Graph::from_edge_list(next, &e).unwrap(), tips)
}

/// Disjoint connected buildings grown from random seeds.
pub fn random_buildings(g: &Graph, count: usize, seed: u64) -> Vec<cwl_core::VertexSet> {
    let mut r = rng(seed);
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.shuffle(&mut r);
    let mut taken = vec![false; g.n()];
    let mut out = Vec::new();
    for &s in order.iter().take(count) {
        if taken[s] {
            continue;
        }
        taken[s] = true;
        let mut b = vec![s];
        let grow = r.gen_range(0..4);
        for _ in 0..grow {
            let last = *b.last().unwrap();
            if let Some(&w) = g.neighbors(last).iter().find(|&&w| !taken[w]) {
                taken[w] = true;
                b.push(w);
            }
        }
        out.push(b.into_iter().collect());
    }
    out
}
