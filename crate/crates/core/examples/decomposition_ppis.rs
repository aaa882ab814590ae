//! A ten-row conflict graph with one clique and one non-clique component,
//! repaired with the greedy independent-set strategy.
//!
//! cargo run --example decomposition_ppis

use subrepair::decomposition::{check_independence, decompose};
use subrepair::repair::ppis_partition;
use subrepair::scoring::{component_weights, score_component};
use subrepair::{repair, ConflictGraph, DensityTable, RepairConfig};

fn main() -> subrepair::Result<()> {
    let graph = ConflictGraph::from_edges(
        10,
        [
            (0, 3),
            (0, 4),
            (0, 8),
            (3, 4),
            (3, 8),
            (4, 8),
            (1, 2),
            (1, 6),
            (9, 5),
            (9, 6),
            (6, 7),
            (2, 5),
        ],
    );
    let mut density = DensityTable::empty(10, 3);
    density.rho = vec![2.9, 2.8, 2.0, 1.2, 1.1, 1.5, 1.0, 0.2, 1.0, 2.5];

    let components = decompose(&graph);
    check_independence(&components, &graph)?;
    for c in &components {
        let kind = if c.is_clique { "clique" } else { "non-clique" };
        println!("component {}: {:?} ({kind})", c.id, c.members);
    }

    let open = &components[1];
    let w = component_weights(open, &density, &graph);
    let scores = score_component(open, &density, &graph, &w, 1e-6);
    let mut order = open.members.clone();
    order.sort_by(|a, b| scores[a].penalty.total_cmp(&scores[b].penalty));
    println!("admission order: {order:?}");
    let (kept, removed) = ppis_partition(open, &scores, &graph);
    println!("independent set {kept:?}, local removal {removed:?}");

    let plan = repair(&graph, &components, &density, &RepairConfig::default())?;
    println!("global removal {:?}", plan.removal_set);
    Ok(())
}
