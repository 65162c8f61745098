mod common;

use std::cmp::Ordering;

use common::{bfs, lambda_min_brute, paths_to, random_buildings, random_connected, rank_key, weight_greater};
use cwl_core::metric::{lambda_compare, lambda_closest, lambda_geodesic, voronoi_partition};
use cwl_core::{LambdaPath, TieBreaker, VertexSet};
use proptest::prelude::*;

fn subset(n: usize, mask: u64) -> VertexSet {
    (0..n).filter(|&v| mask >> v & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn geodesic_is_the_unique_lambda_minimum(n in 1usize..=8, p in 0.1f64..0.8, seed: u64, tseed: u64, mask: u64) {
        let g = random_connected(n, p, seed);
        let tb = TieBreaker::seeded(&g, tseed);
        let x = subset(n, mask | 1);
        let xm = x.mask(n);
        for v in 0..n {
            let (best, ties) = lambda_min_brute(&g, &tb, v, &xm, n).unwrap();
            prop_assert_eq!(ties, 1);
            let got = lambda_geodesic(&g, &tb, v, &x).unwrap();
            prop_assert_eq!(got.vertices(), best.as_slice());
        }
    }

    #[test]
    fn compare_matches_weight_order(n in 2usize..=8, p in 0.2f64..0.9, seed: u64, tseed: u64, a in 0usize..8, b in 0usize..8) {
        let g = random_connected(n, p, seed);
        let tb = TieBreaker::seeded(&g, tseed);
        let (a, b) = (a % n, b % n);
        let target = VertexSet::singleton(b).mask(n);
        let paths = paths_to(&g, a, &target, n);
        for p1 in &paths {
            for p2 in &paths {
                if p1 == p2 || p1.len() != p2.len() {
                    continue;
                }
                let l1 = LambdaPath::new(&g, p1.clone()).unwrap();
                let l2 = LambdaPath::new(&g, p2.clone()).unwrap();
                let ord = lambda_compare(&g, &tb, &l1, &l2).unwrap();
                let heavier = weight_greater(&rank_key(&g, &tb, p1), &rank_key(&g, &tb, p2));
                prop_assert_eq!(ord == Ordering::Less, heavier);
            }
        }
    }

    #[test]
    fn prefixes_of_geodesics_are_geodesics(n in 1usize..=14, p in 0.05f64..0.5, seed: u64, tseed: u64, mask: u64) {
        let g = random_connected(n, p, seed);
        let tb = TieBreaker::seeded(&g, tseed);
        let x = subset(n, mask | 1);
        for v in 0..n {
            let path = lambda_geodesic(&g, &tb, v, &x).unwrap();
            let vs = path.vertices();
            for i in 1..vs.len() {
                let sub = lambda_geodesic(&g, &tb, v, &VertexSet::singleton(vs[i])).unwrap();
                prop_assert_eq!(sub.vertices(), &vs[..=i]);
            }
        }
    }

    #[test]
    fn voronoi_cells_partition_and_are_connected(n in 1usize..=40, p in 0.02f64..0.3, seed: u64, tseed: u64, count in 1usize..6, bseed: u64) {
        let g = random_connected(n, p / 4.0, seed);
        let tb = TieBreaker::seeded(&g, tseed);
        let buildings = random_buildings(&g, count, bseed);
        let vp = voronoi_partition(&g, &tb, &buildings).unwrap();
        let all: VertexSet = buildings.iter().fold(VertexSet::new(), |acc, b| acc.union(b));
        let reach = bfs(&g, all.as_slice());
        let mut seen = vec![0usize; n];
        for (i, cell) in vp.cells.iter().enumerate() {
            prop_assert!(buildings[i].is_subset(cell));
            prop_assert!(g.is_connected_induced(cell));
            for v in cell.iter() {
                seen[v] += 1;
                prop_assert_eq!(lambda_closest(&g, &tb, &buildings, v).unwrap(), Some(i));
                let geo = lambda_geodesic(&g, &tb, v, &all).unwrap();
                prop_assert!(buildings[i].contains(geo.end()));
                prop_assert!(geo.vertices().iter().all(|&w| cell.contains(w)));
            }
        }
        for v in 0..n {
            prop_assert_eq!(seen[v], usize::from(reach[v].is_some()));
        }
    }
}

#[test]
fn uncovered_component_is_an_error() {
    let g = common::random_graph(4, 0.0, 1);
    let tb = TieBreaker::lex(&g);
    assert!(voronoi_partition(&g, &tb, &[VertexSet::singleton(0)]).is_err());
}

#[test]
fn small_examples() {
    let g = cwl_core::corpus::path(5);
    let tb = TieBreaker::lex(&g);
    let p = lambda_geodesic(&g, &tb, 2, &[0, 4].into_iter().collect()).unwrap();
    assert_eq!(p.vertices(), &[2, 1, 0]);
    let vp = voronoi_partition(&g, &tb, &[VertexSet::singleton(0), VertexSet::singleton(4)]).unwrap();
    assert_eq!(vp.cells[0].as_slice(), &[0, 1, 2]);
    assert_eq!(vp.cells[1].as_slice(), &[3, 4]);
}
