mod common;

use alphabp::engine::{
    factor_to_variable_update, map_decision, marginals, run, run_observed, EngineConfig, Schedule,
};
use alphabp::graph::{FactorGraph, PairwiseSpec};
use alphabp::models::seeded_rng;
use alphabp::oracle::{exact_map, exact_marginals};
use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use common::{max_abs_diff, random_graph, random_tree, reference_sum_product};

fn collect(graph: &FactorGraph, config: &EngineConfig) -> (Vec<Vec<f64>>, alphabp::ConvergenceReport) {
    let mut seen = Vec::new();
    let (_, report) = run_observed(graph, config, None, |c| seen.push(c.table.to_vec())).unwrap();
    (seen, report)
}

fn scaled(graph: &FactorGraph, singleton_scale: f64, pair_scale: f64) -> FactorGraph {
    let singles = graph
        .singletons()
        .iter()
        .map(|s| s.table().iter().map(|v| v * singleton_scale).collect())
        .collect();
    let pairs = graph
        .pairwise()
        .iter()
        .map(|f| {
            let (i, j) = f.endpoints();
            let t = f.table().iter().map(|r| r.iter().map(|v| v * pair_scale).collect()).collect();
            PairwiseSpec::new(i, j, t)
        })
        .collect();
    FactorGraph::new(graph.alphabet().clone(), singles, pairs).unwrap()
}

fn chain3() -> FactorGraph {
    let t = vec![vec![2.0, 0.5], vec![0.5, 2.0]];
    FactorGraph::new(
        alphabp::Alphabet::binary(),
        vec![vec![1.0, 3.0], vec![2.0, 1.0], vec![1.0, 1.5]],
        vec![PairwiseSpec::new(0, 1, t.clone()), PairwiseSpec::new(1, 2, t)],
    )
    .unwrap()
}

#[test]
fn chain_is_exact_after_two_sweeps() {
    let g = chain3();
    let exact = exact_marginals(&g).unwrap();
    let two = EngineConfig { max_sweeps: 2, ..EngineConfig::with_alpha(1.0) };
    let (state, _) = run(&g, &two, None).unwrap();
    assert!(max_abs_diff(&marginals(&state, &g), &exact) < 1e-9);
    // the sweep that confirms the fixed point is the third
    let (state, report) = run(&g, &EngineConfig::with_alpha(1.0), None).unwrap();
    assert!(report.converged);
    assert_eq!(report.sweeps_used, 3);
    assert!(max_abs_diff(&marginals(&state, &g), &exact) < 1e-9);
}

#[test]
fn random_schedule_is_exact_on_trees() {
    let mut rng = seeded_rng(11);
    for seed in 0..20 {
        let g = random_tree(&mut rng, 8, 2);
        let config = EngineConfig {
            schedule: Schedule::SeededRandom { seed },
            // a sweep can leave a weakly coupled branch almost untouched
            tolerance: 1e-13,
            ..EngineConfig::with_alpha(1.0)
        };
        let (state, report) = run(&g, &config, None).unwrap();
        assert!(report.converged);
        assert!(max_abs_diff(&marginals(&state, &g), &exact_marginals(&g).unwrap()) < 1e-9);
    }
}

#[test]
fn damping_keeps_tree_fixed_point() {
    let g = chain3();
    let config = EngineConfig { damping: 0.5, max_sweeps: 200, ..EngineConfig::with_alpha(1.0) };
    let (state, report) = run(&g, &config, None).unwrap();
    assert!(report.converged);
    let m = marginals(&state, &g);
    let exact = exact_marginals(&g).unwrap();
    for (a, b) in m.iter().zip(&exact) {
        assert_abs_diff_eq!(a.as_slice(), b.as_slice(), epsilon = 1e-5);
    }
}

#[test]
fn tree_map_decision_on_chain() {
    let g = chain3();
    let (state, _) = run(&g, &EngineConfig::with_alpha(1.0), None).unwrap();
    assert_eq!(map_decision(&state, &g), exact_map(&g).unwrap().assignment);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alpha_one_matches_reference(seed in any::<u64>(), n in 2usize..8, p in 0.1f64..1.0, ternary in any::<bool>()) {
        let g = random_graph(&mut seeded_rng(seed), n, p, if ternary { 3 } else { 2 });
        let (seen, report) = collect(&g, &EngineConfig::with_alpha(1.0));
        let reference = reference_sum_product(&g, report.sweeps_used);
        prop_assert_eq!(seen.len(), reference.len());
        prop_assert!(max_abs_diff(&seen, &reference) <= 1e-12);
    }

    #[test]
    fn messages_and_beliefs_are_distributions(
        seed in any::<u64>(),
        n in 1usize..8,
        p in 0.0f64..1.0,
        alpha in 0.05f64..2.0,
        damping in 0.0f64..0.9,
        random_order in any::<bool>(),
    ) {
        let g = random_graph(&mut seeded_rng(seed), n, p, 2);
        let config = EngineConfig {
            damping,
            schedule: if random_order { Schedule::SeededRandom { seed } } else { Schedule::FixedOrder },
            ..EngineConfig::with_alpha(alpha)
        };
        let mut ok = true;
        let (state, report) = run_observed(&g, &config, None, |c| {
            let s: f64 = c.table.iter().sum();
            ok &= c.table.iter().all(|&v| v > 0.0) && (s - 1.0).abs() <= 1e-12;
        }).unwrap();
        prop_assert!(ok);
        prop_assert!(report.final_residual >= 0.0);
        prop_assert_eq!(report.converged, report.final_residual <= config.tolerance);
        for q in marginals(&state, &g) {
            prop_assert!(q.iter().all(|&v| v > 0.0));
            prop_assert!((q.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn potentials_are_scale_invariant(seed in any::<u64>(), n in 2usize..7, alpha in 0.1f64..1.6, c1 in 0.01f64..100.0, c2 in 0.01f64..100.0) {
        let g = random_graph(&mut seeded_rng(seed), n, 0.6, 2);
        let h = scaled(&g, c1, c2);
        let config = EngineConfig { max_sweeps: 10, ..EngineConfig::with_alpha(alpha) };
        let (a, _) = collect(&g, &config);
        let (b, _) = collect(&h, &config);
        prop_assert!(max_abs_diff(&a, &b) <= 1e-9);
    }

    #[test]
    fn trees_are_exact(seed in any::<u64>(), n in 1usize..=10, ternary in any::<bool>()) {
        let g = random_tree(&mut seeded_rng(seed), n, if ternary { 3 } else { 2 });
        // residual ≤ 1e-6 can stop one hop early on a weakly coupled branch
        let config = EngineConfig { tolerance: 1e-12, ..EngineConfig::with_alpha(1.0) };
        let (state, report) = run(&g, &config, None).unwrap();
        prop_assert!(report.converged);
        prop_assert!(max_abs_diff(&marginals(&state, &g), &exact_marginals(&g).unwrap()) <= 1e-9);
    }

    #[test]
    fn converged_state_is_a_fixed_point(seed in any::<u64>(), n in 2usize..8, p in 0.1f64..0.6, alpha in 0.3f64..1.2) {
        let g = random_graph(&mut seeded_rng(seed), n, p, 2);
        let config = EngineConfig { max_sweeps: 500, ..EngineConfig::with_alpha(alpha) };
        let (state, report) = run(&g, &config, None).unwrap();
        prop_assume!(report.converged);
        for f in g.pairwise() {
            let (i, j) = f.endpoints();
            for v in [i, j] {
                let fresh = factor_to_variable_update(&state, &g, f.id(), v, alpha).unwrap();
                let old = state.message(&g, f.id(), v).unwrap();
                let change = fresh.iter().zip(old).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                prop_assert!(change <= config.tolerance, "change {} on factor {} var {}", change, f.id(), v);
            }
        }
    }

    #[test]
    fn runs_are_deterministic(seed in any::<u64>(), n in 2usize..8, alpha in 0.1f64..1.5) {
        let g = random_graph(&mut seeded_rng(seed), n, 0.7, 2);
        let config = EngineConfig { schedule: Schedule::SeededRandom { seed }, ..EngineConfig::with_alpha(alpha) };
        let (a, ra) = collect(&g, &config);
        let (b, rb) = collect(&g, &config);
        prop_assert_eq!(a, b);
        prop_assert_eq!(ra, rb);
    }
}
