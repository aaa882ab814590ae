//! Conflict detection over an attribute inverted index with rules grouped by
//! left-hand side.
//!
//! For each row `i` the candidate partners are the rows `k > i` that share at
//! least one non-missing value with it. Each candidate pair is then checked
//! group by group: the shared LHS equality test runs once per group, and the
//! first violated rule ends the check for that pair.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::graph::ConflictGraph;
use crate::rules::{PatternCell, RuleGroup};

/// Per attribute, per value code: ascending row ids holding that value.
#[derive(Debug, Clone)]
pub struct InvertedIndex<'a> {
    dataset: &'a Dataset,
    postings: Vec<Vec<Vec<usize>>>,
}

impl<'a> InvertedIndex<'a> {
    pub fn build(dataset: &'a Dataset) -> Self {
        let postings = (0..dataset.attr_count())
            .map(|attr| {
                let mut lists = vec![Vec::new(); dataset.cardinality(attr)];
                let missing = dataset.missing_code(attr);
                for (row, &code) in dataset.column_codes(attr).iter().enumerate() {
                    if Some(code) != missing {
                        lists[code as usize].push(row);
                    }
                }
                lists
            })
            .collect();
        InvertedIndex { dataset, postings }
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }

    /// Rows holding `value` in `attr`; empty for the missing token and for
    /// values that never occur.
    pub fn posting(&self, attr: usize, value: &str) -> &[usize] {
        self.dataset
            .code_of(attr, value)
            .map(|c| self.postings[attr][c as usize].as_slice())
            .unwrap_or(&[])
    }

    /// Number of distinct indexed values for `attr`.
    pub fn indexed_values(&self, attr: usize) -> usize {
        self.postings[attr].iter().filter(|p| !p.is_empty()).count()
    }

    /// Rows with id greater than `row` that share at least one non-missing
    /// value with it, ascending and deduplicated.
    pub fn candidates_for(&self, row: usize) -> Vec<usize> {
        let mut stamp = vec![usize::MAX; self.dataset.len()];
        let mut out = Vec::new();
        self.collect_candidates(row, &mut stamp, &mut out);
        out
    }

    fn collect_candidates(&self, row: usize, stamp: &mut [usize], out: &mut Vec<usize>) {
        out.clear();
        for attr in 0..self.dataset.attr_count() {
            let code = self.dataset.code(row, attr);
            if Some(code) == self.dataset.missing_code(attr) {
                continue;
            }
            let posting = &self.postings[attr][code as usize];
            let start = posting.partition_point(|&k| k <= row);
            for &k in &posting[start..] {
                if stamp[k] != row {
                    stamp[k] = row;
                    out.push(k);
                }
            }
        }
        out.sort_unstable();
    }
}

#[derive(Debug, Clone, Copy)]
enum RhsCell {
    Wildcard,
    /// `None` when the constant never occurs in the column.
    Constant(Option<u32>),
}

#[derive(Debug, Clone)]
struct PreparedRule {
    lhs_constants: Vec<(usize, Option<u32>)>,
    rhs: Vec<(usize, RhsCell)>,
}

#[derive(Debug, Clone)]
struct PreparedGroup {
    lhs: Vec<usize>,
    rules: Vec<PreparedRule>,
}

/// Rule groups with pattern constants resolved to column codes.
#[derive(Debug, Clone)]
pub struct PairChecker<'a> {
    dataset: &'a Dataset,
    groups: Vec<PreparedGroup>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckCounters {
    /// Group-level LHS equality evaluations.
    pub group_evals: u64,
    /// Individual rule pattern checks after a group's LHS matched.
    pub rule_checks: u64,
}

impl<'a> PairChecker<'a> {
    pub fn new(dataset: &'a Dataset, groups: &[RuleGroup]) -> Self {
        let resolve = |attr: usize, cell: &PatternCell| match cell {
            PatternCell::Wildcard => RhsCell::Wildcard,
            PatternCell::Constant(c) => RhsCell::Constant(dataset.code_of(attr, c)),
        };
        let groups = groups
            .iter()
            .map(|g| PreparedGroup {
                lhs: g.lhs_key.clone(),
                rules: g
                    .rules
                    .iter()
                    .map(|r| PreparedRule {
                        lhs_constants: r
                            .lhs
                            .iter()
                            .filter_map(|&a| match resolve(a, r.cell(a)) {
                                RhsCell::Constant(code) => Some((a, code)),
                                RhsCell::Wildcard => None,
                            })
                            .collect(),
                        rhs: r.rhs.iter().map(|&a| (a, resolve(a, r.cell(a)))).collect(),
                    })
                    .collect(),
            })
            .collect();
        PairChecker { dataset, groups }
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn violates(&self, a: usize, b: usize) -> bool {
        self.violates_counted(a, b, &mut CheckCounters::default())
    }

    pub fn violates_counted(&self, a: usize, b: usize, counters: &mut CheckCounters) -> bool {
        let ds = self.dataset;
        for group in &self.groups {
            counters.group_evals += 1;
            let lhs_equal = group.lhs.iter().all(|&attr| {
                let ca = ds.code(a, attr);
                ca == ds.code(b, attr) && Some(ca) != ds.missing_code(attr)
            });
            if !lhs_equal {
                continue;
            }
            for rule in &group.rules {
                counters.rule_checks += 1;
                // LHS cells are equal here, so checking `a` covers both rows.
                let pattern_matches = rule
                    .lhs_constants
                    .iter()
                    .all(|&(attr, c)| c == Some(ds.code(a, attr)));
                if !pattern_matches {
                    continue;
                }
                let rhs_fails = rule.rhs.iter().any(|&(attr, cell)| {
                    let (ca, cb) = (ds.code(a, attr), ds.code(b, attr));
                    match cell {
                        RhsCell::Wildcard => ca != cb,
                        RhsCell::Constant(c) => c != Some(ca) || c != Some(cb),
                    }
                });
                if rhs_fails {
                    return true;
                }
            }
        }
        false
    }
}

/// Convenience wrapper around [`PairChecker::violates`].
pub fn pair_violates(a: usize, b: usize, groups: &[RuleGroup], dataset: &Dataset) -> bool {
    PairChecker::new(dataset, groups).violates(a, b)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionStats {
    pub rows: usize,
    pub attributes: usize,
    pub groups: usize,
    pub edges: usize,
    pub conflicting_rows: usize,
    /// `C_i`: deduplicated candidate count per row.
    pub candidate_set_sizes: Vec<usize>,
    pub pairs_checked: u64,
    pub groups_checked: u64,
    pub rules_checked: u64,
}

impl DetectionStats {
    pub fn mean_candidates(&self) -> f64 {
        if self.rows == 0 {
            0.0
        } else {
            self.candidate_set_sizes.iter().sum::<usize>() as f64 / self.rows as f64
        }
    }
}

struct RowResult {
    candidates: usize,
    partners: Vec<usize>,
    counters: CheckCounters,
}

pub fn detect_conflicts(dataset: &Dataset, groups: &[RuleGroup]) -> (ConflictGraph, DetectionStats) {
    let n = dataset.len();
    let mut stats = DetectionStats {
        rows: n,
        attributes: dataset.attr_count(),
        groups: groups.len(),
        candidate_set_sizes: vec![0; n],
        ..Default::default()
    };
    if groups.is_empty() || n < 2 {
        return (ConflictGraph::from_edges(n, []), stats);
    }

    let index = InvertedIndex::build(dataset);
    let checker = PairChecker::new(dataset, groups);

    let per_row: Vec<RowResult> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![usize::MAX; n], Vec::new()),
            |(stamp, cands), row| {
                index.collect_candidates(row, stamp, cands);
                let mut counters = CheckCounters::default();
                let partners = cands
                    .iter()
                    .copied()
                    .filter(|&k| checker.violates_counted(row, k, &mut counters))
                    .collect();
                RowResult {
                    candidates: cands.len(),
                    partners,
                    counters,
                }
            },
        )
        .collect();

    let mut edges = Vec::new();
    for (row, r) in per_row.into_iter().enumerate() {
        stats.candidate_set_sizes[row] = r.candidates;
        stats.pairs_checked += r.candidates as u64;
        stats.groups_checked += r.counters.group_evals;
        stats.rules_checked += r.counters.rule_checks;
        edges.extend(r.partners.into_iter().map(|k| (row, k)));
    }
    let graph = ConflictGraph::from_edges(n, edges);
    stats.edges = graph.edge_count();
    stats.conflicting_rows = graph.vertex_count();
    (graph, stats)
}
