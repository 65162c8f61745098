mod common;

use common::random_connected;
use cwl_core::corpus::{cycle, grid, path, random_tree, subdivided_star};
use cwl_core::decomp::verify_certificate;
use cwl_core::minors::verify_superfat;
use cwl_core::pipeline::{make_schedule, run_pipeline, Outcome, PipelineConfig, Schedule, ScheduleMode};
use cwl_core::{Graph, TieBreaker};
use proptest::prelude::*;

fn check(g: &Graph, s: &Schedule, tb: &TieBreaker) -> Result<(), TestCaseError> {
    let run = run_pipeline(g, tb, s, &PipelineConfig::default()).unwrap();
    match &run.outcome {
        Outcome::Certificate(cert) => {
            let (a, b) = s.final_bound();
            prop_assert!(cert.a <= a && cert.b <= b, "({}, {}) exceeds ({a}, {b})", cert.a, cert.b);
            prop_assert_eq!(&cert.subject, &g.vertices());
            prop_assert_eq!(verify_certificate(g, cert).unwrap(), None);
        }
        Outcome::Witness(m) => {
            prop_assert_eq!(m.pattern_ell, s.ell);
            prop_assert!(m.c >= s.c);
            prop_assert_eq!(verify_superfat(g, m), None);
        }
    }
    Ok(())
}

fn corpus(kind: usize, n: usize, seed: u64) -> Graph {
    match kind {
        0 => path(n),
        1 => cycle(n.max(3)).unwrap(),
        2 => random_tree(n, seed),
        3 => subdivided_star(3, n / 3),
        4 => grid(1 + n % 4, 1 + n / 8),
        _ => random_connected(n, 0.03, seed),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn outcomes_always_verify(kind in 0usize..6, n in 1usize..=120, seed: u64, tseed: u64, minimal: bool) {
        let g = corpus(kind, n, seed);
        let mode = if minimal { ScheduleMode::Minimal } else { ScheduleMode::Paper };
        let s = make_schedule(2, 1, mode, None).unwrap();
        check(&g, &s, &TieBreaker::seeded(&g, tseed))?;
    }

    #[test]
    fn two_level_outcomes_verify(kind in 0usize..4, n in 1usize..=200, seed: u64) {
        let g = corpus(kind, n, seed);
        let s = make_schedule(2, 2, ScheduleMode::Minimal, None).unwrap();
        check(&g, &s, &TieBreaker::lex(&g))?;
    }

    #[test]
    fn runs_are_deterministic(kind in 0usize..6, n in 1usize..=80, seed: u64, tseed: u64) {
        let g = corpus(kind, n, seed);
        let s = make_schedule(2, 1, ScheduleMode::Minimal, None).unwrap();
        let tb = TieBreaker::seeded(&g, tseed);
        let first = run_pipeline(&g, &tb, &s, &PipelineConfig::default()).unwrap();
        let second = run_pipeline(&g, &TieBreaker::seeded(&g, tseed), &s, &PipelineConfig::default()).unwrap();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn full_schedules_are_monotone(c in 2usize..6, ell in 1usize..4) {
        let s = make_schedule(c, ell, ScheduleMode::Paper, None).unwrap();
        prop_assert!(s.cross_century_monotone());
        for k in 0..=ell {
            for i in 1..s.delta[k].len() {
                prop_assert!(s.delta[k][i - 1] >= s.delta[k][i]);
            }
        }
    }
}

#[test]
fn long_star_gives_a_witness() {
    let g = subdivided_star(3, 900);
    let s = make_schedule(2, 1, ScheduleMode::Minimal, None).unwrap();
    let run = run_pipeline(&g, &TieBreaker::lex(&g), &s, &PipelineConfig::default()).unwrap();
    match run.outcome {
        Outcome::Witness(m) => assert_eq!(verify_superfat(&g, &m), None),
        Outcome::Certificate(_) => panic!("expected a witness"),
    }
}
