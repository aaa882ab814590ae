//! Scoring repairs against ground truth, plus rule-aware dirty data for
//! benchmarks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, GroundTruth, Label};
use crate::detection::detect_conflicts;
use crate::error::{Error, Result};
use crate::repair::RepairPlan;
use crate::rules::{group_rules, CfdRule};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RepairMetrics {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub clean_retention: f64,
    pub removed_count: usize,
    pub runtime_ms: BTreeMap<String, f64>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl RepairMetrics {
    /// Builds the derived rates from raw counts. `clean_total` is the number
    /// of clean rows in the truth.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, clean_total: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        RepairMetrics {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1,
            clean_retention: ratio(clean_total - fp, clean_total),
            removed_count: tp + fp,
            runtime_ms: BTreeMap::new(),
        }
    }
}

pub fn evaluate(plan: &RepairPlan, truth: &GroundTruth) -> Result<RepairMetrics> {
    evaluate_removal(&plan.removal_set, plan.row_count, truth)
}

/// Same as [`evaluate`] for a bare removal list over `row_count` rows.
pub fn evaluate_removal(removal: &[usize], row_count: usize, truth: &GroundTruth) -> Result<RepairMetrics> {
    let removed: BTreeSet<usize> = removal.iter().copied().collect();
    let (mut tp, mut fp, mut fn_, mut clean) = (0, 0, 0, 0);
    for row in 0..row_count {
        let label = truth.get(row).ok_or(Error::MissingTruth { row })?;
        match (label, removed.contains(&row)) {
            (Label::Dirty, true) => tp += 1,
            (Label::Dirty, false) => fn_ += 1,
            (Label::Clean, true) => {
                fp += 1;
                clean += 1;
            }
            (Label::Clean, false) => clean += 1,
        }
    }
    Ok(RepairMetrics::from_counts(tp, fp, fn_, clean))
}

/// Aligned text table with one line per labelled run.
pub fn metrics_table<'a>(runs: impl IntoIterator<Item = (&'a str, &'a RepairMetrics)>) -> String {
    let runs: Vec<_> = runs.into_iter().collect();
    let width = runs
        .iter()
        .map(|(name, _)| name.len())
        .chain(["Algorithm".len()])
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>6}  {:>6}  {:>6}  {:>9}  {:>7}",
        "Algorithm", "Prec.", "Rec.", "F1", "Retention", "Removed"
    );
    for (name, m) in runs {
        let _ = writeln!(
            out,
            "{:<width$}  {:>6.3}  {:>6.3}  {:>6.3}  {:>9.3}  {:>7}",
            name, m.precision, m.recall, m.f1, m.clean_retention, m.removed_count
        );
    }
    out
}

/// `⌈rate·n⌉`, guarded against float noise such as `0.1 * 30 = 3.0000000000000004`.
pub fn injection_count(rate: f64, rows: usize) -> usize {
    let raw = (rate * rows as f64 - 1e-9).ceil();
    (raw.max(0.0) as usize).min(rows)
}

/// Corrupts `⌈rate·n⌉` rows of a consistent dataset. Each chosen row gets one
/// RHS attribute of a random rule set to another value from that column's
/// domain. Returns the dirty copy and per-row labels.
pub fn inject_errors(
    clean: &Dataset,
    rules: &[CfdRule],
    rate: f64,
    seed: u64,
) -> Result<(Dataset, GroundTruth)> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Config(format!("error rate {rate} is outside [0, 1]")));
    }
    let (graph, _) = detect_conflicts(clean, &group_rules(rules));
    if graph.edge_count() > 0 {
        return Err(Error::CleanPrecondition {
            edges: graph.edge_count(),
        });
    }

    let n = clean.len();
    let count = injection_count(rate, n);
    let mut labels: BTreeMap<usize, Label> = (0..n).map(|r| (r, Label::Clean)).collect();
    if count == 0 {
        return Ok((clean.clone(), GroundTruth::new(labels)));
    }
    if rules.is_empty() {
        return Err(Error::Config("cannot inject errors without rules".into()));
    }

    let domains: Vec<Vec<&str>> = (0..clean.attr_count())
        .map(|a| {
            (0..clean.cardinality(a) as u32)
                .filter(|&c| Some(c) != clean.missing_code(a))
                .map(|c| clean.value_of(a, c))
                .collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = index::sample(&mut rng, n, count).into_vec();
    chosen.sort_unstable();

    let mut rows = clean.rows_cloned();
    for row in chosen {
        let rule = rules.choose(&mut rng).expect("non-empty rules");
        let attr = *rule.rhs.choose(&mut rng).expect("non-empty rhs");
        let current = rows[row][attr].clone();
        let others: Vec<&str> = domains[attr]
            .iter()
            .copied()
            .filter(|v| *v != current)
            .collect();
        rows[row][attr] = match others.choose(&mut rng) {
            Some(v) => (*v).to_owned(),
            // single-valued column: no other in-domain value exists
            None => format!("{current}~{}", rng.gen_range(0..1000u32)),
        };
        labels.insert(row, Label::Dirty);
    }
    let dirty = Dataset::from_rows(clean.header_names(), rows, clean.missing_token())?;
    Ok((dirty, GroundTruth::new(labels)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub rows: usize,
    pub cols: usize,
    /// Distinct values per key column.
    pub domain: usize,
    pub seed: u64,
}

/// Consistent dataset with columns `A0..A{cols-1}` and rules `A{j-1} -> A{j}`
/// for every odd `j`. Even columns are uniform keys; each odd column is a
/// fixed function of the key to its left.
pub fn synthetic_clean(spec: &SyntheticSpec) -> Result<(Dataset, Vec<CfdRule>)> {
    if spec.cols < 2 {
        return Err(Error::Config("synthetic data needs at least 2 columns".into()));
    }
    if spec.domain == 0 {
        return Err(Error::Config("synthetic domain must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let headers: Vec<String> = (0..spec.cols).map(|j| format!("A{j}")).collect();
    let rows = (0..spec.rows)
        .map(|_| {
            let mut row = Vec::with_capacity(spec.cols);
            let mut key = 0;
            for j in 0..spec.cols {
                if j % 2 == 0 {
                    key = rng.gen_range(0..spec.domain);
                    row.push(format!("k{j}_{key}"));
                } else {
                    let dependent = (key * 7 + j) % spec.domain;
                    row.push(format!("v{j}_{dependent}"));
                }
            }
            row
        })
        .collect();
    let dataset = Dataset::from_rows(headers, rows, "")?;
    let rules = (1..spec.cols)
        .step_by(2)
        .map(|j| CfdRule::fd(vec![j - 1], vec![j]).map_err(Error::Config))
        .collect::<Result<_>>()?;
    Ok((dataset, rules))
}
