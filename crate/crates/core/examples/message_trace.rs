//! Observe every committed message and the per-sweep residual, comparing
//! fixed and shuffled schedules with and without damping.
//!
//! cargo run --example message_trace

use alphabp::engine::run_observed;
use alphabp::models::{ising_to_graph, sample_ising};
use alphabp::{EngineConfig, Schedule};

fn main() -> alphabp::Result<()> {
    let graph = ising_to_graph(&sample_ising(9, 0.9, 42)?);
    let variants = [
        ("fixed", Schedule::FixedOrder, 0.0),
        ("shuffled", Schedule::SeededRandom { seed: 1 }, 0.0),
        ("fixed, damped", Schedule::FixedOrder, 0.5),
    ];
    for (label, schedule, damping) in variants {
        let config = EngineConfig { schedule, damping, ..EngineConfig::with_alpha(0.6) };
        let mut per_sweep: Vec<f64> = Vec::new();
        // messages start uniform
        let mut previous = vec![vec![0.5; 2]; graph.pairwise().len() * 2];
        let (_, report) = run_observed(&graph, &config, None, |c| {
            let slot = 2 * c.factor + usize::from(graph.factor(c.factor).endpoints().1 == c.variable);
            let change = previous[slot]
                .iter()
                .zip(c.table)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            previous[slot] = c.table.to_vec();
            if per_sweep.len() <= c.sweep {
                per_sweep.push(0.0);
            }
            per_sweep[c.sweep] = per_sweep[c.sweep].max(change);
        })?;
        let trace: Vec<String> = per_sweep.iter().take(8).map(|r| format!("{r:.1e}")).collect();
        println!(
            "{label:>14}: converged {} after {} sweeps; residuals {}",
            report.converged,
            report.sweeps_used,
            trace.join(" ")
        );
    }
    Ok(())
}
