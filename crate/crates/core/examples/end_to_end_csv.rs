//! File-to-file run: write a dirty CSV and its labels, then load, repair and
//! write the same artefacts the command-line tool produces.
//!
//! cargo run --example end_to_end_csv -- /tmp/subrepair-demo

use std::path::PathBuf;

use subrepair::pipeline::{cmd_repair, summary_line};
use subrepair::{inject_errors, synthetic_clean, Algorithm, RunConfig, SyntheticSpec};

fn main() -> subrepair::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("subrepair-demo"));
    std::fs::create_dir_all(&dir).map_err(|e| subrepair::Error::Io { path: dir.clone(), source: e })?;

    let (clean, rules) = synthetic_clean(&SyntheticSpec { rows: 800, cols: 6, domain: 80, seed: 3 })?;
    let (dirty, truth) = inject_errors(&clean, &rules, 0.05, 3)?;
    dirty.save_csv(dir.join("data.csv"))?;
    let rules_text: Vec<String> = rules.iter().map(|r| r.display(&dirty)).collect();
    std::fs::write(dir.join("rules.txt"), rules_text.join("\n") + "\n")
        .map_err(|e| subrepair::Error::Io { path: dir.join("rules.txt"), source: e })?;
    let labels = std::fs::File::create(dir.join("labels.csv"))
        .map_err(|e| subrepair::Error::Io { path: dir.join("labels.csv"), source: e })?;
    truth.write_csv(labels)?;

    let mut config = RunConfig::new(dir.join("data.csv"));
    config.rules_path = Some(dir.join("rules.txt"));
    config.labels_path = Some(dir.join("labels.csv"));
    config.output_dir = Some(dir.join("out"));
    config.options.algorithm = Algorithm::Mico;

    let run = cmd_repair(&config)?;
    println!("{}", summary_line(&run.repaired));
    if let Some(m) = &run.metrics {
        println!("precision {:.3} recall {:.3} f1 {:.3}", m.precision, m.recall, m.f1);
    }
    if let Some(bound) = &run.repaired.plan.bound {
        println!("eta {:.3e}, reported ratio {:?}", bound.eta, bound.ratio_bound);
    }
    println!("outputs in {}", dir.join("out").display());
    Ok(())
}
