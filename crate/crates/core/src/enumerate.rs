//! Exhaustive generation of small connected graphs up to isomorphism.

use std::collections::BTreeSet;

use crate::graph::Graph;

/// Largest order supported; adjacency fits in a `u64` bitmask.
pub const MAX_ORDER: usize = 8;

fn pair_bit(u: usize, v: usize) -> u32 {
    let (a, b) = (u.min(v), u.max(v));
    (b * (b - 1) / 2 + a) as u32
}

fn adjacency(n: usize, mask: u64) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for b in 1..n {
        for a in 0..b {
            if mask >> pair_bit(a, b) & 1 == 1 {
                adj[a][b] = true;
                adj[b][a] = true;
            }
        }
    }
    adj
}

/// Colour refinement to a stable partition; returns the class of each vertex.
fn refine(adj: &[Vec<bool>]) -> Vec<usize> {
    let n = adj.len();
    let mut colour = vec![0usize; n];
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut s: Vec<usize> = (0..n).filter(|&w| adj[v][w]).map(|w| colour[w]).collect();
                s.sort_unstable();
                (colour[v], s)
            })
            .collect();
        let distinct: BTreeSet<&(usize, Vec<usize>)> = sigs.iter().collect();
        let ids: Vec<&(usize, Vec<usize>)> = distinct.into_iter().collect();
        let next: Vec<usize> = sigs.iter().map(|s| ids.binary_search(&s).unwrap()).collect();
        let before = colour.iter().collect::<BTreeSet<_>>().len();
        if ids.len() == before {
            return next;
        }
        colour = next;
    }
}

/// Least relabelled mask over all orderings that list colour classes in
/// order. Colours are isomorphism invariant, so this is a canonical form.
fn canonical(n: usize, mask: u64) -> u64 {
    let adj = adjacency(n, mask);
    let colour = refine(&adj);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for c in 0..n {
        let class: Vec<usize> = (0..n).filter(|&v| colour[v] == c).collect();
        if !class.is_empty() {
            classes.push(class);
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut best = u64::MAX;
    extend(&adj, &classes, 0, &mut vec![false; n], &mut order, &mut best);
    best
}

fn extend(adj: &[Vec<bool>], classes: &[Vec<usize>], ci: usize, used: &mut [bool], order: &mut Vec<usize>, best: &mut u64) {
    let n = adj.len();
    if order.len() == n {
        let mut m = 0u64;
        for j in 1..n {
            for i in 0..j {
                if adj[order[i]][order[j]] {
                    m |= 1 << pair_bit(i, j);
                }
            }
        }
        *best = (*best).min(m);
        return;
    }
    let class = &classes[ci];
    let placed_in_class = class.iter().filter(|&&v| used[v]).count();
    let next_ci = if placed_in_class + 1 == class.len() { ci + 1 } else { ci };
    for &v in class {
        if used[v] {
            continue;
        }
        used[v] = true;
        order.push(v);
        extend(adj, classes, next_ci, used, order, best);
        order.pop();
        used[v] = false;
    }
}

fn to_graph(n: usize, mask: u64) -> Graph {
    let mut pairs = Vec::new();
    for b in 1..n {
        for a in 0..b {
            if mask >> pair_bit(a, b) & 1 == 1 {
                pairs.push((a, b));
            }
        }
    }
    Graph::from_edge_list(n, &pairs).expect("valid pairs")
}

/// Canonical masks of the connected graphs of order `n`, ascending.
fn connected_masks(n: usize) -> BTreeSet<u64> {
    if n <= 1 {
        return BTreeSet::from([0]);
    }
    // Every connected graph has a vertex whose removal keeps it connected,
    // so attaching a new vertex to smaller connected graphs reaches them all.
    let mut out = BTreeSet::new();
    for base in connected_masks(n - 1) {
        let last = n - 1;
        for nbrs in 1u64..(1 << last) {
            let mut m = base;
            for a in 0..last {
                if nbrs >> a & 1 == 1 {
                    m |= 1 << pair_bit(a, last);
                }
            }
            out.insert(canonical(n, m));
        }
    }
    out
}

/// All connected graphs of order `n` up to isomorphism, `n ≤ MAX_ORDER`.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!(n <= MAX_ORDER, "order {n} exceeds {MAX_ORDER}");
    if n == 0 {
        return Vec::new();
    }
    connected_masks(n).into_iter().map(|m| to_graph(n, m)).collect()
}

/// Connected graphs of every order `1..=max_n`.
pub fn connected_graphs_up_to(max_n: usize) -> Vec<Graph> {
    (1..=max_n).flat_map(connected_graphs).collect()
}
