//! Deterministic graph families used by tests, benchmarks and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::minors::build_pattern_tree;

fn build(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edge_list(n, edges).expect("generated edges are valid")
}

/// Path `0 − 1 − … − (n−1)`.
pub fn path(n: usize) -> Graph {
    let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    build(n, &e)
}

/// Cycle on `n ≥ 3` vertices.
pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Precondition(format!("a cycle needs at least 3 vertices, got {n}")));
    }
    let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Ok(build(n, &e))
}

/// `rows × cols` grid, vertex `r·cols + c`.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let mut e = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                e.push((v, v + 1));
            }
            if r + 1 < rows {
                e.push((v, v + cols));
            }
        }
    }
    build(rows * cols, &e)
}

/// Subdivides every edge of `h` `s` times, turning it into a path with
/// `s + 1` edges. Original vertices keep their ids; subdivision vertices
/// follow edge by edge, ordered from the smaller end.
pub fn subdivide(h: &Graph, s: usize) -> Graph {
    let mut n = h.n();
    let mut e = Vec::new();
    for &(a, b) in h.edges() {
        let mut prev = a;
        for _ in 0..s {
            e.push((prev, n));
            prev = n;
            n += 1;
        }
        e.push((prev, b));
    }
    build(n, &e)
}

/// `K_{1,arms}` with every edge subdivided `s` times. The hub is vertex 0
/// and arm `a` is `a·(s+1) + 1, …, a·(s+1) + s + 1` outward.
pub fn subdivided_star(arms: usize, s: usize) -> Graph {
    let len = s + 1;
    let mut e = Vec::new();
    for a in 0..arms {
        let mut prev = 0;
        for i in 1..=len {
            e.push((prev, a * len + i));
            prev = a * len + i;
        }
    }
    build(arms * len + 1, &e)
}

/// The pattern tree `H_ℓ` with every edge subdivided `s` times.
pub fn subdivided_tree(ell: usize, s: usize) -> Graph {
    subdivide(build_pattern_tree(ell).graph(), s)
}

/// Uniform random recursive tree on `n` vertices.
pub fn random_tree(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e: Vec<_> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    build(n, &e)
}
