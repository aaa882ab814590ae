//! Brute-force oracles and random instance builders shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subrepair::rules::PatternCell;
use subrepair::{CfdRule, Dataset};

/// Direct reading of the rule semantics on raw strings, one rule at a time.
pub fn naive_violates(ds: &Dataset, rules: &[CfdRule], a: usize, b: usize) -> bool {
    let missing = ds.missing_token();
    rules.iter().any(|rule| {
        let lhs_ok = rule.lhs.iter().all(|&x| {
            let (va, vb) = (ds.cell(a, x), ds.cell(b, x));
            va != missing
                && va == vb
                && match rule.cell(x) {
                    PatternCell::Wildcard => true,
                    PatternCell::Constant(c) => va == c,
                }
        });
        lhs_ok
            && rule.rhs.iter().any(|&y| {
                let (va, vb) = (ds.cell(a, y), ds.cell(b, y));
                match rule.cell(y) {
                    PatternCell::Wildcard => va != vb,
                    PatternCell::Constant(c) => va != c || vb != c,
                }
            })
    })
}

pub fn naive_edges(ds: &Dataset, rules: &[CfdRule]) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for a in 0..ds.len() {
        for b in a + 1..ds.len() {
            if naive_violates(ds, rules, a, b) {
                edges.insert((a, b));
            }
        }
    }
    edges
}

/// Small-domain random relation with some missing cells, plus random FDs and
/// CFDs whose constants are drawn from the data.
pub fn random_instance(rng: &mut ChaCha8Rng, max_rows: usize) -> (Dataset, Vec<CfdRule>) {
    let rows = rng.gen_range(2..=max_rows);
    let attrs = rng.gen_range(2..=10);
    let domain = rng.gen_range(2..=6);
    let headers: Vec<String> = (0..attrs).map(|a| format!("c{a}")).collect();
    let data: Vec<Vec<String>> = (0..rows)
        .map(|_| {
            (0..attrs)
                .map(|_| {
                    if rng.gen_bool(0.05) {
                        String::new()
                    } else {
                        format!("v{}", rng.gen_range(0..domain))
                    }
                })
                .collect()
        })
        .collect();
    let ds = Dataset::from_rows(headers, data, "").unwrap();

    let rule_count = rng.gen_range(1..=8);
    let rules = (0..rule_count)
        .map(|_| {
            let mut attrs_shuffled: Vec<usize> = (0..attrs).collect();
            for i in (1..attrs).rev() {
                attrs_shuffled.swap(i, rng.gen_range(0..=i));
            }
            let lhs_len = rng.gen_range(1..attrs.min(3) + 1).min(attrs - 1);
            let lhs: Vec<usize> = attrs_shuffled[..lhs_len].to_vec();
            let rhs: Vec<usize> = attrs_shuffled[lhs_len..lhs_len + 1].to_vec();
            let mut pattern = std::collections::BTreeMap::new();
            let sample_row = rng.gen_range(0..rows);
            for &x in lhs.iter().chain(&rhs) {
                let cell = if rng.gen_bool(0.3) && !ds.is_missing(sample_row, x) {
                    PatternCell::Constant(ds.cell(sample_row, x).to_owned())
                } else {
                    PatternCell::Wildcard
                };
                pattern.insert(x, cell);
            }
            CfdRule::new(lhs, rhs, pattern).unwrap()
        })
        .collect();
    (ds, rules)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Minimum total cost over every vertex cover, by enumeration.
pub fn brute_force_cover(costs: &[f64], edges: &[(usize, usize)]) -> f64 {
    let n = costs.len();
    assert!(n <= 20);
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if edges
            .iter()
            .all(|&(u, v)| mask & (1 << u) != 0 || mask & (1 << v) != 0)
        {
            let cost: f64 = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| costs[i]).sum();
            best = best.min(cost);
        }
    }
    best
}

/// Random connected graph on `n` vertices: a random spanning tree plus extra
/// edges with probability `p`.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.insert((u, v));
            }
        }
    }
    edges.into_iter().collect()
}

pub fn is_cover(edges: &[(usize, usize)], removal: &[usize]) -> bool {
    edges
        .iter()
        .all(|(u, v)| removal.contains(u) || removal.contains(v))
}

pub fn employee() -> Dataset {
    let opts = subrepair::LoadOptions::default().excluding(["Id", "Data labeling"]);
    subrepair::load_dataset(fixture("employee.csv"), &opts).unwrap()
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// Ten-row conflict graph: clique {0,3,4,8} and a
/// six-vertex non-clique {1,2,5,6,7,9}.
pub fn mixed_graph() -> subrepair::ConflictGraph {
    subrepair::ConflictGraph::from_edges(
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
    )
}

/// Densities for [`mixed_graph`] chosen so the penalty order inside the
/// non-clique is t1 < t9 < t2 < t5 < t6 < t7 and t0 is densest in the clique.
pub fn mixed_density() -> subrepair::DensityTable {
    let mut d = subrepair::DensityTable::empty(10, 3);
    d.rho = vec![2.9, 2.8, 2.0, 1.2, 1.1, 1.5, 1.0, 0.2, 1.0, 2.5];
    d
}
