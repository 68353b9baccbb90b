//! Drive an experiment from a JSON config, override fields in code and write
//! the CSV result table.
//!
//! cargo run --release --example experiment_config

use alphabp::experiment::{run_experiment, ConfigPatch};

fn main() -> alphabp::Result<()> {
    let file = ConfigPatch::from_json(
        r#"{"experiment": "mimo-ser", "n": 4, "trials": 500, "sweep": [1.0, 0.5], "alphas": [0.4]}"#,
    )?;
    let overrides = ConfigPatch { seed: Some(11), ..ConfigPatch::default() };
    let config = file.merge(overrides).resolve(None)?;
    let csv = run_experiment(&config)?.to_csv();
    let path = std::env::temp_dir().join("alphabp_mimo.csv");
    std::fs::write(&path, &csv)?;
    print!("{csv}");
    eprintln!("wrote {}", path.display());
    Ok(())
}
