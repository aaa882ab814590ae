//! Attribute weights, kNN density and per-component penalties on the
//! employee table.
//!
//! cargo run --example density_scoring

use subrepair::decomposition::decompose;
use subrepair::scoring::{component_weights, score_component, DEFAULT_EPSILON};
use subrepair::{compute_density, detect_conflicts, group_rules, load_dataset, parse_rules};
use subrepair::{AttributeWeights, LoadOptions};

fn main() -> subrepair::Result<()> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let opts = LoadOptions::default().excluding(["Id", "Data labeling"]);
    let ds = load_dataset(format!("{data}/employee.csv"), &opts)?;
    let rules = parse_rules(format!("{data}/employee_fds.txt"), &ds)?;
    let (graph, _) = detect_conflicts(&ds, &group_rules(&rules));

    let weights = AttributeWeights::compute(&ds, &rules, 0.5)?;
    println!("{:<16} {:>6} {:>8} {:>8}", "attribute", "cfd", "entropy", "weight");
    for (i, a) in ds.attributes().iter().enumerate() {
        println!(
            "{:<16} {:>6.3} {:>8.3} {:>8.3}",
            a.name, weights.cfd_part[i], weights.entropy_part[i], weights.combined[i]
        );
    }

    let density = compute_density(&ds, &graph, &weights, 3)?;
    if density.pool_is_fallback {
        println!("every row conflicts; densities use the whole table as the neighbour pool");
    }
    for comp in decompose(&graph) {
        let w = component_weights(&comp, &density, &graph);
        println!(
            "component {} ({} rows, clique: {}): w_density {:.3}, w_conflict {:.3}",
            comp.id,
            comp.len(),
            comp.is_clique,
            w.w_density,
            w.w_conflict
        );
        for (row, s) in score_component(&comp, &density, &graph, &w, DEFAULT_EPSILON) {
            println!(
                "  t{row}: rho {:.3}  degree {}  penalty {:.3}",
                s.rho, s.conflict_degree, s.penalty
            );
        }
    }
    Ok(())
}
