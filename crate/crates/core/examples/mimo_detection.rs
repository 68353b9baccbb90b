//! Detect one 8x8 MIMO transmission with every detector: exact MAP, MMSE,
//! BP, α-BP and α-BP seeded with the MMSE prior.
//!
//! cargo run --example mimo_detection

use alphabp::engine::{map_decision, run};
use alphabp::mmse::{mmse_decide, mmse_posterior, mmse_prior_factors, CovarianceScaling};
use alphabp::models::{mimo_to_graph, sample_mimo, snr_db};
use alphabp::oracle::exact_map;
use alphabp::EngineConfig;

fn errors(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

fn main() -> alphabp::Result<()> {
    let sigma = 0.7;
    let (mut map, mut mmse, mut bp, mut abp, mut abp_prior) = (0, 0, 0, 0, 0);
    let trials = 200;
    for seed in 0..trials {
        let inst = sample_mimo(8, 8, sigma, seed)?;
        let graph = mimo_to_graph(&inst);
        let truth = inst.symbols();

        map += errors(&exact_map(&graph)?.assignment, truth);
        let post = mmse_posterior(&inst, CovarianceScaling::Sigma)?;
        mmse += errors(&mmse_decide(&post, graph.alphabet()), truth);
        let priors: Vec<Option<Vec<f64>>> =
            mmse_prior_factors(&post, graph.alphabet())?.into_iter().map(Some).collect();

        let (s, _) = run(&graph, &EngineConfig::with_alpha(1.0), None)?;
        bp += errors(&map_decision(&s, &graph), truth);
        let (s, _) = run(&graph, &EngineConfig::with_alpha(0.4), None)?;
        abp += errors(&map_decision(&s, &graph), truth);
        let (s, _) = run(&graph, &EngineConfig::with_alpha(0.4), Some(&priors))?;
        abp_prior += errors(&map_decision(&s, &graph), truth);
    }
    let symbols = (trials * 8) as f64;
    println!("sigma_w {sigma} ({:.1} dB), {trials} transmissions", snr_db(8, sigma));
    for (name, e) in [
        ("MAP", map),
        ("MMSE", mmse),
        ("BP", bp),
        ("alpha-BP 0.4", abp),
        ("alpha-BP 0.4 + MMSE", abp_prior),
    ] {
        println!("{name:>20}: SER {:.4}", e as f64 / symbols);
    }
    Ok(())
}
