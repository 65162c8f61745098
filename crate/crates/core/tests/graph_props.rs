mod common;

use common::{bfs, random_graph};
use cwl_core::json::{graph_from_json, graph_to_json};
use cwl_core::{Graph, VertexSet};
use proptest::prelude::*;

fn subset(n: usize, mask: u64) -> VertexSet {
    (0..n).filter(|&v| mask >> v & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_is_a_metric(n in 1usize..=9, p in 0.1f64..0.7, seed: u64) {
        let g = random_graph(n, p, seed);
        let d: Vec<Vec<Option<usize>>> = (0..n).map(|v| g.distance_row(v)).collect();
        for u in 0..n {
            prop_assert_eq!(d[u][u], Some(0));
            prop_assert_eq!(&d[u], &bfs(&g, &[u]));
            for v in 0..n {
                prop_assert_eq!(d[u][v], d[v][u]);
                for w in 0..n {
                    if let (Some(a), Some(b)) = (d[u][v], d[v][w]) {
                        prop_assert!(d[u][w].unwrap() <= a + b);
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_is_inside_and_empty_only_for_unions_of_components(n in 1usize..=9, p in 0.1f64..0.6, seed: u64, mask: u64) {
        let g = random_graph(n, p, seed);
        let x = subset(n, mask);
        let bd = g.boundary(&x);
        prop_assert!(bd.is_subset(&x));
        let union_of_components = g.components().iter().all(|c| c.is_subset(&x) || !c.intersects(&x));
        prop_assert_eq!(bd.is_empty(), union_of_components);
    }

    #[test]
    fn balls_are_monotone(n in 1usize..=12, p in 0.1f64..0.5, seed: u64, mask: u64, extra: u64, r in 0usize..5) {
        let g = random_graph(n, p, seed);
        let x = subset(n, mask | 1);
        let y = x.union(&subset(n, extra));
        let b = g.ball(&x, r).unwrap();
        prop_assert!(b.is_subset(&g.ball(&x, r + 1).unwrap()));
        prop_assert!(b.is_subset(&g.ball(&y, r).unwrap()));
        prop_assert!(x.is_subset(&b));
    }

    #[test]
    fn json_round_trip(n in 0usize..=12, p in 0.0f64..0.6, seed: u64) {
        let g = random_graph(n, p, seed);
        let txt = graph_to_json(&g).unwrap();
        prop_assert_eq!(graph_from_json(&txt).unwrap(), g.clone());
        prop_assert_eq!(graph_to_json(&graph_from_json(&txt).unwrap()).unwrap(), txt);
    }
}

trait Row {
    fn distance_row(&self, v: usize) -> Vec<Option<usize>>;
}

impl Row for Graph {
    fn distance_row(&self, v: usize) -> Vec<Option<usize>> {
        (0..self.n()).map(|u| self.distance(v, u).unwrap()).collect()
    }
}

#[test]
fn empty_set_edge_cases() {
    let g = cwl_core::corpus::path(4);
    assert!(g.ball(&VertexSet::new(), 3).is_err());
    assert!(g.boundary(&VertexSet::new()).is_empty());
    assert!(g.boundary(&g.vertices()).is_empty());
}
