//! Exact minimum-weight vertex cover under a time budget, compared with the
//! greedy seed, and the fallback when the budget is zero.
//!
//! cargo run --release --example mico_exact_cover

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subrepair::cover::{solve_cover, CoverProblem};
use subrepair::repair::{cover_costs, repair_mico, repair_ppis};
use subrepair::scoring::TupleScore;
use subrepair::{decompose, ConflictGraph};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let n = 40;
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for _ in 0..40 {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            edges.push((u.min(v), u.max(v)));
        }
    }
    let graph = ConflictGraph::from_edges(n, edges);
    let comp = &decompose(&graph)[0];
    let scores = comp
        .members
        .iter()
        .map(|&v| {
            let rho = rng.gen_range(0.1..3.0);
            let degree = graph.degree(v);
            let penalty = 0.5 / rho + 0.5 * degree as f64;
            (v, TupleScore { rho, conflict_degree: degree, penalty })
        })
        .collect();

    let costs = cover_costs(comp, &scores, 1e-6);
    let cost = |rows: &[usize]| rows.iter().map(|&r| costs[r]).sum::<f64>();

    let greedy = repair_ppis(comp, &scores, &graph);
    println!("greedy: {} rows, cost {:.4}", greedy.len(), cost(&greedy));

    for budget in [Duration::ZERO, Duration::from_secs(5)] {
        let out = repair_mico(comp, &scores, &graph, budget, 1e-6);
        println!(
            "budget {budget:?}: {} rows, cost {:.4}, {}, {} nodes",
            out.removal.len(),
            out.objective,
            out.strategy.tag(),
            out.nodes
        );
    }

    // the solver also works on any weighted graph directly
    let path = CoverProblem::new(vec![1.0, 1.0, 1.0], [(0, 1), (1, 2)]);
    let out = solve_cover(&path, None, Duration::from_secs(1));
    println!("path cover {:?} ({:?})", out.cover, out.status);
}
