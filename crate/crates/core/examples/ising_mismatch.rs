//! A reduced Ising mismatch sweep: how often α-BP decisions disagree with
//! the exact MAP on random 9-spin models.
//!
//! cargo run --release --example ising_mismatch

use alphabp::experiment::{run_experiment, ExperimentConfig, ExperimentKind, Z95};

fn main() -> alphabp::Result<()> {
    let mut config = ExperimentConfig::defaults(ExperimentKind::IsingMismatch);
    config.trials = 200;
    config.sweep = vec![0.3, 0.6, 0.9];
    config.alphas = vec![0.4, 0.8, 1.0, 1.4];
    let table = run_experiment(&config)?;
    for row in &table.rows {
        let (lo, hi) = row.wilson_interval(Z95);
        println!(
            "p={:.1} {:<9} alpha={:<4} mismatch {:.4} [{lo:.4}, {hi:.4}] converged {:.2}",
            row.sweep,
            row.method,
            row.alpha.map(|a| a.to_string()).unwrap_or_default(),
            row.metric,
            row.converged_frac
        );
    }
    Ok(())
}
