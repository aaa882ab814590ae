//! Generates consistent data, injects rule violations at a few error rates,
//! and scores both repair algorithms.
//!
//! cargo run --release --example synthetic_benchmark

use subrepair::eval::metrics_table;
use subrepair::{evaluate, inject_errors, run_pipeline, synthetic_clean};
use subrepair::{Algorithm, PipelineOptions, SyntheticSpec};

fn main() -> subrepair::Result<()> {
    let spec = SyntheticSpec { rows: 3000, cols: 8, domain: 300, seed: 1 };
    let (clean, rules) = synthetic_clean(&spec)?;
    println!("{} rows, {} rules", clean.len(), rules.len());

    for rate in [0.02, 0.05, 0.10] {
        let (dirty, truth) = inject_errors(&clean, &rules, rate, 7)?;
        let mut rows = Vec::new();
        for algorithm in [Algorithm::Ppis, Algorithm::Mico] {
            let options = PipelineOptions { algorithm, ..PipelineOptions::default() };
            let run = run_pipeline(&dirty, &rules, &options)?;
            let mut m = evaluate(&run.plan, &truth)?;
            m.runtime_ms = run.timings;
            rows.push((algorithm.to_string(), m));
        }
        println!("\nerror rate {rate}");
        print!("{}", metrics_table(rows.iter().map(|(n, m)| (n.as_str(), m))));
        for (name, m) in &rows {
            println!("{name}: {:.1} ms total", m.runtime_ms["total"]);
        }
    }
    Ok(())
}
