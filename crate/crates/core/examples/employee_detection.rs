//! Conflict detection on the employee table with two plain FDs, then with
//! three constant CFDs.
//!
//! cargo run --example employee_detection

use subrepair::detection::InvertedIndex;
use subrepair::{detect_conflicts, group_rules, load_dataset, parse_rules, LoadOptions};

fn main() -> subrepair::Result<()> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let opts = LoadOptions::default().excluding(["Id", "Data labeling"]);
    let ds = load_dataset(format!("{data}/employee.csv"), &opts)?;

    for file in ["employee_fds.txt", "employee_cfds.txt"] {
        let rules = parse_rules(format!("{data}/{file}"), &ds)?;
        let groups = group_rules(&rules);
        let (graph, stats) = detect_conflicts(&ds, &groups);
        println!("{file}: {} rules in {} groups", rules.len(), groups.len());
        for r in &rules {
            println!("  {}", r.display(&ds));
        }
        println!(
            "  {} edges, {} of {} rows conflicting, {} pairs checked",
            graph.edge_count(),
            graph.vertex_count(),
            ds.len(),
            stats.pairs_checked
        );
        for &(a, b) in graph.edges() {
            print!(" t{a}-t{b}");
        }
        println!();
    }

    let index = InvertedIndex::build(&ds);
    println!("candidates for t0: {:?}", index.candidates_for(0));
    Ok(())
}
