mod common;

use std::collections::BTreeMap;
use std::time::Duration;

use rand::Rng;
use subrepair::cover::{solve_cover, CoverProblem, CoverStatus};
use subrepair::decomposition::{check_independence, decompose};
use subrepair::repair::{
    cover_costs, ppis_partition, repair_clique, repair_mico, repair_ppis, Strategy,
};
use subrepair::scoring::{penalty, ComponentWeights, TupleScore};
use subrepair::{repair, Algorithm, ConflictGraph, DensityTable, RepairConfig};

fn random_scores(rng: &mut impl Rng, members: &[usize]) -> BTreeMap<usize, TupleScore> {
    members
        .iter()
        .map(|&v| {
            (
                v,
                TupleScore {
                    rho: 1.0,
                    conflict_degree: 0,
                    penalty: rng.gen_range(0.0..10.0),
                },
            )
        })
        .collect()
}

#[test]
fn solver_matches_enumeration() {
    let mut rng = common::rng(11);
    for _ in 0..150 {
        let n = rng.gen_range(1..=14);
        let p = rng.gen_range(0.05..0.7);
        let edges = common::random_connected(&mut rng, n, p);
        let costs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..5.0)).collect();
        let problem = CoverProblem::new(costs.clone(), edges.clone());
        let out = solve_cover(&problem, None, Duration::from_secs(10));
        assert_eq!(out.status, CoverStatus::Optimal);
        let cover = out.cover.unwrap();
        assert!(common::is_cover(&edges, &cover));
        let best = common::brute_force_cover(&costs, &edges);
        assert!((out.objective - best).abs() <= 1e-9, "{} vs {best}", out.objective);
    }
}

#[test]
fn mico_is_never_worse_than_ppis() {
    let mut rng = common::rng(12);
    for _ in 0..100 {
        let n = rng.gen_range(2..=12);
        let edges = common::random_connected(&mut rng, n, 0.3);
        let g = ConflictGraph::from_edges(n, edges.clone());
        let comp = &decompose(&g)[0];
        let scores = random_scores(&mut rng, &comp.members);
        let costs = cover_costs(comp, &scores, 1e-6);
        let cost_of = |rem: &[usize]| -> f64 { rem.iter().map(|&r| costs[r]).sum() };
        let greedy = repair_ppis(comp, &scores, &g);
        let exact = repair_mico(comp, &scores, &g, Duration::from_secs(10), 1e-6);
        assert_eq!(exact.strategy, Strategy::MicoOptimal);
        assert!(cost_of(&exact.removal) <= cost_of(&greedy) + 1e-9);
        assert!(common::is_cover(&edges, &exact.removal));
    }
}

#[test]
fn ppis_keeps_a_maximal_independent_set() {
    let mut rng = common::rng(13);
    for _ in 0..100 {
        let n = rng.gen_range(2..=30);
        let edges = common::random_connected(&mut rng, n, 0.15);
        let g = ConflictGraph::from_edges(n, edges.clone());
        let comp = &decompose(&g)[0];
        let scores = random_scores(&mut rng, &comp.members);
        let (keep, removal) = ppis_partition(comp, &scores, &g);
        assert!(common::is_cover(&edges, &removal));
        for &r in &removal {
            assert!(g.neighbors(r).iter().any(|u| keep.contains(u)), "row {r} could be kept");
        }
    }
}

#[test]
fn clique_keeps_argmax_density() {
    let mut rng = common::rng(14);
    for _ in 0..200 {
        let n = rng.gen_range(2..=12);
        let g = ConflictGraph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))));
        let comp = &decompose(&g)[0];
        assert!(comp.is_clique);
        let mut d = DensityTable::empty(g.row_count(), 3);
        d.rho = (0..g.row_count()).map(|_| rng.gen_range(0.0..4.0)).collect();
        let removal = repair_clique(comp, &d);
        let kept: Vec<_> = comp.members.iter().copied().filter(|v| !removal.contains(v)).collect();
        assert_eq!(kept.len(), 1);
        let densest = comp
            .members
            .iter()
            .copied()
            .max_by(|a, b| d.rho[*a].total_cmp(&d.rho[*b]).then(b.cmp(a)))
            .unwrap();
        assert_eq!(kept[0], densest);
        let cheapest = comp
            .members
            .iter()
            .copied()
            .min_by(|a, b| {
                let pa = penalty(d.rho[*a], g.degree(*a), &ComponentWeights::CLIQUE, 1e-6);
                let pb = penalty(d.rho[*b], g.degree(*b), &ComponentWeights::CLIQUE, 1e-6);
                pa.total_cmp(&pb).then(a.cmp(b))
            })
            .unwrap();
        assert_eq!(cheapest, densest);
    }
}

fn random_forest_of_components(rng: &mut impl Rng) -> ConflictGraph {
    let mut edges = Vec::new();
    let mut offset = 0;
    for _ in 0..rng.gen_range(1..8) {
        let n = rng.gen_range(2..10);
        let mut r = common::rng(rng.gen());
        for (u, v) in common::random_connected(&mut r, n, 0.3) {
            edges.push((u + offset, v + offset));
        }
        offset += n + rng.gen_range(0..3);
    }
    ConflictGraph::from_edges(offset, edges)
}

#[test]
fn parallel_and_sequential_plans_are_identical() {
    let mut rng = common::rng(15);
    for algorithm in [Algorithm::Ppis, Algorithm::Mico] {
        for _ in 0..30 {
            let g = random_forest_of_components(&mut rng);
            let comps = decompose(&g);
            check_independence(&comps, &g).unwrap();
            let mut d = DensityTable::empty(g.row_count(), 3);
            d.rho = (0..g.row_count()).map(|_| rng.gen_range(0.0..3.0)).collect();
            let config = RepairConfig {
                algorithm,
                ..RepairConfig::default()
            };
            let par = repair(&g, &comps, &d, &config).unwrap();
            let seq = repair(&g, &comps, &d, &RepairConfig { parallel: false, ..config.clone() }).unwrap();
            let mut reversed = comps.clone();
            reversed.reverse();
            let rev = repair(&g, &reversed, &d, &config).unwrap();
            assert_eq!(
                serde_json::to_string(&par).unwrap(),
                serde_json::to_string(&seq).unwrap()
            );
            assert_eq!(par.removal_set, rev.removal_set);
            assert!(g.is_vertex_cover(&par.removal_set));
        }
    }
}

#[test]
fn zero_budget_tags_every_non_clique_as_fallback() {
    let g = common::mixed_graph();
    let comps = decompose(&g);
    let config = RepairConfig {
        algorithm: Algorithm::Mico,
        time_limit: Duration::ZERO,
        ..RepairConfig::default()
    };
    let plan = repair(&g, &comps, &common::mixed_density(), &config).unwrap();
    let tags: Vec<_> = plan.per_component.iter().map(|t| t.strategy).collect();
    assert_eq!(tags, vec![Strategy::CliqueRetain, Strategy::MicoFallback]);
    assert_eq!(plan.removal_set, vec![2, 3, 4, 5, 6, 8]);
}
