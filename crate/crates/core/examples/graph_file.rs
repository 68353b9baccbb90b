//! Serialize a generated model to the JSON graph format, read it back and
//! print the same report as `alphabp infer`.
//!
//! cargo run --example graph_file

use alphabp::experiment::infer_report;
use alphabp::format::{parse_graph, write_graph};
use alphabp::models::{ising_to_graph, sample_ising};
use alphabp::EngineConfig;

fn main() -> alphabp::Result<()> {
    let graph = ising_to_graph(&sample_ising(4, 0.7, 3)?);
    let text = write_graph(&graph)?;
    println!("{text}");
    let parsed = parse_graph(&text)?;
    let (report, _) = infer_report(&parsed, &EngineConfig::with_alpha(0.8))?;
    print!("{report}");
    Ok(())
}
