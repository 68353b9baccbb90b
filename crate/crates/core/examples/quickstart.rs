//! Build a small loopy graph, run α-BP at a few α values and compare the
//! beliefs with the exact marginals.
//!
//! cargo run --example quickstart

use alphabp::engine::{map_decision, marginals, run};
use alphabp::oracle::{exact_map, exact_marginals};
use alphabp::{Alphabet, EngineConfig, FactorGraph, PairwiseSpec};

fn main() -> alphabp::Result<()> {
    // a triangle with one frustrated coupling
    let attract = vec![vec![3.0, 1.0], vec![1.0, 3.0]];
    let repel = vec![vec![1.0, 3.0], vec![3.0, 1.0]];
    let graph = FactorGraph::new(
        Alphabet::binary(),
        vec![vec![1.0, 2.0], vec![1.0, 1.0], vec![1.5, 1.0]],
        vec![
            PairwiseSpec::new(0, 1, attract.clone()),
            PairwiseSpec::new(1, 2, attract),
            PairwiseSpec::new(0, 2, repel),
        ],
    )?;

    let exact = exact_marginals(&graph)?;
    println!("exact MAP {:?}", exact_map(&graph)?.assignment);
    for (i, m) in exact.iter().enumerate() {
        println!("exact x{i}: {:.4} {:.4}", m[0], m[1]);
    }
    for alpha in [0.5, 1.0, 1.5] {
        let (state, report) = run(&graph, &EngineConfig::with_alpha(alpha), None)?;
        println!(
            "\nalpha {alpha}: converged {} after {} sweeps, decision {:?}",
            report.converged,
            report.sweeps_used,
            map_decision(&state, &graph)
        );
        for (i, q) in marginals(&state, &graph).iter().enumerate() {
            println!("  x{i}: {:.4} {:.4}", q[0], q[1]);
        }
    }
    Ok(())
}
